#include "cli.hpp"

#include <algorithm>
#include <map>
#include <ostream>

#include "CLI11.hpp"
#include "commands.hpp"
#include "hctree/errors.hpp"

namespace hctree::cli {

namespace {

const std::vector<std::string> kSubcommands = {"solve", "classify", "sweep", "oracle", "critical", "weak"};

// Multi-character single-dash spellings accepted for convenience.
void rewrite_aliases(std::vector<std::string>& args) {
    for (auto& a : args) {
        if (a == "-lmin") a = "--lmin";
        if (a == "-lmax") a = "--lmax";
    }
}

// Removes `--config FILE` / `--config=FILE` and returns the path, if any.
std::string take_config_path(std::vector<std::string>& args) {
    std::string path;
    for (std::size_t j = 0; j < args.size(); ++j) {
        if (args[j] == "--config") {
            if (j + 1 >= args.size()) throw CLI::ArgumentMismatch("--config requires a file name");
            path = args[j + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(j), args.begin() + static_cast<std::ptrdiff_t>(j) + 2);
            --j;
        } else if (args[j].rfind("--config=", 0) == 0) {
            path = args[j].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(j));
            --j;
        }
    }
    return path;
}

// Config entries become ordinary flags placed directly after the subcommand, so that
// anything given on the command line (which comes later) wins under TakeLast.
void inject_config(std::vector<std::string>& args, const std::string& path, CLI::App& app) {
    const auto sub = std::find_if(args.begin(), args.end(), [](const std::string& a) {
        return std::find(kSubcommands.begin(), kSubcommands.end(), a) != kSubcommands.end();
    });
    if (sub == args.end()) return;
    CLI::App* cmd = app.get_subcommand(*sub);

    std::vector<CLI::ConfigItem> items;
    try {
        items = CLI::ConfigTOML().from_file(path);
    } catch (const CLI::FileError&) {
        throw CLI::FileError::Missing(path);
    }
    std::vector<std::string> injected;
    for (const auto& item : items) {
        if (item.name == "++" || item.name == "--") continue;
        if (!item.parents.empty() && item.parents.front() != *sub) continue;
        const std::string flag = "--" + item.name;
        const CLI::Option* opt = cmd->get_option_no_throw(flag);
        if (opt == nullptr) {
            throw CLI::ConfigError::Extras("unknown key '" + item.name + "' for " + *sub + " in " + path);
        }
        if (opt->get_expected_min() == 0) {
            const std::string v = item.inputs.empty() ? "true" : item.inputs.front();
            if (v == "true" || v == "1" || v == "on" || v == "yes") injected.push_back(flag);
            continue;
        }
        for (const auto& v : item.inputs) {
            injected.push_back(flag);
            injected.push_back(v);
        }
    }
    args.insert(sub + 1, injected.begin(), injected.end());
}

void add_format_flags(CLI::App* cmd, bool& json, bool& csv) {
    auto* j = cmd->add_flag("--json", json, "JSON output");
    auto* c = cmd->add_flag("--csv", csv, "CSV output");
    j->excludes(c);
}

OutputFormat format_of(bool json, bool csv) {
    return json ? OutputFormat::Json : csv ? OutputFormat::Csv : OutputFormat::Table;
}

}  // namespace

int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Boundary laws and Gibbs measures of the hard-core model on Cayley trees", "hctree"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.add_option("--config", "key=value file; command-line flags override it");

    PointOptions solve_opt;
    bool solve_json = false, solve_csv = false;
    auto* solve = app.add_subcommand("solve", "All TI and two-periodic boundary laws at one activity");
    solve->add_option("-k,--order", solve_opt.k, "Tree order k")->required()->check(CLI::Range(1, 1000000));
    solve->add_option("-l,--lambda", solve_opt.lambda, "Activity lambda")->required()->check(CLI::PositiveNumber);
    solve->add_option("--tol", solve_opt.tol, "Residual tolerance")->capture_default_str()->check(CLI::PositiveNumber);
    add_format_flags(solve, solve_json, solve_csv);

    PointOptions classify_opt;
    bool classify_json = false, classify_csv = false;
    auto* classify = app.add_subcommand("classify", "Extremality verdicts for every TI and two-periodic measure");
    classify->add_option("-k,--order", classify_opt.k, "Tree order k")->required()->check(CLI::Range(1, 1000000));
    classify->add_option("-l,--lambda", classify_opt.lambda, "Activity lambda")->required()->check(CLI::PositiveNumber);
    classify->add_option("--tol", classify_opt.tol, "Residual tolerance")->capture_default_str()->check(CLI::PositiveNumber);
    add_format_flags(classify, classify_json, classify_csv);

    SweepSpec sweep_spec;
    std::string scale = "linear";
    std::string out_path;
    auto* sweep = app.add_subcommand("sweep", "CSV table of quantities over an activity grid");
    sweep->add_option("-k,--order", sweep_spec.k, "Tree order k")->required();
    sweep->add_option("--lmin", sweep_spec.lambda_min, "Smallest activity")->required();
    sweep->add_option("--lmax", sweep_spec.lambda_max, "Largest activity")->required();
    sweep->add_option("-n,--points", sweep_spec.points, "Grid points")->capture_default_str();
    sweep->add_option("--scale", scale, "Grid spacing")->check(CLI::IsMember({"linear", "log"}))->capture_default_str();
    sweep->add_option("-q,--quantity", sweep_spec.quantities,
                      "solutions, D, h, g, s2, ks, msw, verdict, weakperiodic_count (repeatable or comma-separated)")
        ->required()
        ->delimiter(',')
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
    sweep->add_option("-i,--subset-size", sweep_spec.i, "|A| for weakperiodic_count")->capture_default_str();
    sweep->add_option("--set", sweep_spec.set, "Invariant set for weakperiodic_count")->capture_default_str();
    sweep->add_option("-o,--out", out_path, "Output file (default stdout)");

    OracleOptions oracle_opt;
    bool oracle_json = false, oracle_csv = false;
    auto* oracle = app.add_subcommand("oracle", "Exact consistency check on a finite ball");
    oracle->add_option("-k,--order", oracle_opt.k, "Tree order k")->required()->check(CLI::Range(1, 1000000));
    oracle->add_option("-l,--lambda", oracle_opt.lambda, "Activity lambda")->required()->check(CLI::PositiveNumber);
    oracle->add_option("-n,--depth", oracle_opt.depth, "Ball radius")->capture_default_str();
    oracle->add_option("--mode", oracle_opt.mode, "Boundary assignment")
        ->check(CLI::IsMember({"ti", "periodic", "perturbed"}))
        ->capture_default_str();
    oracle->add_option("--root", oracle_opt.root, "half: root has k children; full: k + 1")
        ->check(CLI::IsMember({"half", "full"}))
        ->capture_default_str();
    oracle->add_option("--samples", oracle_opt.samples, "Tree-chain samples to draw (0 = none)")->capture_default_str();
    oracle->add_option("--seed", oracle_opt.seed, "Sampler seed")->capture_default_str();
    add_format_flags(oracle, oracle_json, oracle_csv);

    CriticalOptions critical_opt;
    bool critical_json = false, critical_csv = false;
    auto* critical = app.add_subcommand("critical", "Critical activities of a tree order");
    critical->add_option("-k,--order", critical_opt.k, "Tree order k >= 2")->required();
    critical->add_option("--epsilon", critical_opt.epsilon, "epsilon of the large-k bound")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    add_format_flags(critical, critical_json, critical_csv);

    WeakOptions weak_opt;
    bool weak_json = false, weak_csv = false;
    auto* weak = app.add_subcommand("weak", "Weakly periodic boundary laws on an invariant set");
    weak->add_option("-k,--order", weak_opt.k, "Tree order k")->required()->check(CLI::Range(1, 1000000));
    weak->add_option("-i,--subset-size", weak_opt.i, "|A|, 1 <= i <= k + 1")->capture_default_str();
    weak->add_option("-l,--lambda", weak_opt.lambda, "Activity lambda")->required()->check(CLI::PositiveNumber);
    weak->add_option("--set", weak_opt.set, "I2, I3 or I4")->capture_default_str();
    weak->add_option("--tol", weak_opt.tol, "Residual tolerance")->capture_default_str()->check(CLI::PositiveNumber);
    add_format_flags(weak, weak_json, weak_csv);

    try {
        rewrite_aliases(args);
        const std::string config = take_config_path(args);
        if (!config.empty()) inject_config(args, config, app);
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 2;
    }

    try {
        if (solve->parsed()) {
            solve_opt.format = format_of(solve_json, solve_csv);
            return cmd_solve(solve_opt, out);
        }
        if (classify->parsed()) {
            classify_opt.format = format_of(classify_json, classify_csv);
            return cmd_classify(classify_opt, out);
        }
        if (sweep->parsed()) {
            sweep_spec.scale = scale == "log" ? Scale::Log : Scale::Linear;
            return cmd_sweep(sweep_spec, out_path.empty() ? std::nullopt : std::optional(out_path), out);
        }
        if (oracle->parsed()) {
            oracle_opt.format = format_of(oracle_json, oracle_csv);
            return cmd_oracle(oracle_opt, out);
        }
        if (critical->parsed()) {
            if (critical_opt.k < 2) throw UsageError("critical: -k must be >= 2");
            critical_opt.format = format_of(critical_json, critical_csv);
            return cmd_critical(critical_opt, out);
        }
        if (weak->parsed()) {
            weak_opt.format = format_of(weak_json, weak_csv);
            return cmd_weak(weak_opt, out);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}

}  // namespace hctree::cli
