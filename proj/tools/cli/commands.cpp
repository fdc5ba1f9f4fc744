#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "format.hpp"
#include "hctree/extremality.hpp"
#include "hctree/oracle.hpp"
#include "hctree/solvers.hpp"
#include "hctree/weakperiodic.hpp"
#include "json.hpp"

namespace hctree::cli {

namespace {

using nlohmann::json;

constexpr double kOracleThreshold = 1e-8;

json law_json(const BoundaryLaw& law) {
    json j;
    j["kind"] = std::string(to_string(law.kind()));
    j["values"] = law.values();
    if (law.kind() == LawKind::WeakPeriodic) {
        j["invariant_set"] = std::string(to_string(law.invariant_set()));
    } else {
        j["even_value"] = law.even_value();
        j["odd_value"] = law.odd_value();
    }
    return j;
}

std::string law_values_text(const BoundaryLaw& law) {
    std::string s;
    for (double v : law.values()) {
        if (!s.empty()) s += ' ';
        s += format_number(v);
    }
    return s;
}

// Even/odd columns, empty for weak-periodic laws.
std::pair<std::string, std::string> even_odd_text(const BoundaryLaw& law) {
    if (law.kind() == LawKind::WeakPeriodic) {
        return {"", ""};
    }
    return {format_number(law.even_value()), format_number(law.odd_value())};
}

void print_json(std::ostream& out, const json& j) { out << j.dump(2) << '\n'; }

}  // namespace

int cmd_solve(const PointOptions& opt, std::ostream& out) {
    const ModelParams params(opt.k, opt.lambda);
    const SolveReport report = solve_two_periodic(params, opt.tol);

    if (opt.format == OutputFormat::Json) {
        json j;
        j["command"] = "solve";
        j["k"] = opt.k;
        j["lambda"] = opt.lambda;
        j["tolerance"] = opt.tol;
        j["lambda_critical"] = std::isfinite(report.lambda_critical) ? json(report.lambda_critical) : json(nullptr);
        j["method"] = report.method;
        j["degenerate_double_root"] = report.degenerate_double_root;
        j["solutions"] = json::array();
        for (std::size_t s = 0; s < report.solutions.size(); ++s) {
            json e = law_json(report.solutions[s]);
            e["residual"] = report.residuals[s];
            j["solutions"].push_back(e);
        }
        j["diagnostics"] = report.diagnostics;
        print_json(out, j);
        return 0;
    }
    if (opt.format == OutputFormat::Csv) {
        out << "index,kind,even_value,odd_value,residual\n";
        for (std::size_t s = 0; s < report.solutions.size(); ++s) {
            const auto [e, o] = even_odd_text(report.solutions[s]);
            out << s << ',' << to_string(report.solutions[s].kind()) << ',' << e << ',' << o << ','
                << format_number(report.residuals[s]) << '\n';
        }
        return 0;
    }
    out << "k = " << opt.k << ", lambda = " << format_number(opt.lambda)
        << ", lambda_cr = " << format_number(report.lambda_critical) << ", method = " << report.method << '\n';
    out << report.solutions.size() << " solution(s)\n";
    out << std::left << std::setw(4) << "#" << std::setw(24) << "kind" << std::setw(20) << "even z" << std::setw(20)
        << "odd z" << "residual\n";
    for (std::size_t s = 0; s < report.solutions.size(); ++s) {
        const auto [e, o] = even_odd_text(report.solutions[s]);
        out << std::left << std::setw(4) << s << std::setw(24) << to_string(report.solutions[s].kind())
            << std::setw(20) << e << std::setw(20) << o << format_number(report.residuals[s]) << '\n';
    }
    for (const auto& d : report.diagnostics) {
        out << "note: " << d << '\n';
    }
    return 0;
}

int cmd_classify(const PointOptions& opt, std::ostream& out) {
    const ModelParams params(opt.k, opt.lambda);
    const auto measures = classify(params, opt.tol);

    if (opt.format == OutputFormat::Json) {
        json j;
        j["command"] = "classify";
        j["k"] = opt.k;
        j["lambda"] = opt.lambda;
        j["measures"] = json::array();
        for (const auto& m : measures) {
            json e = law_json(m.law);
            e["residual"] = m.residual;
            e["k_eff"] = m.report.k_eff;
            e["s2"] = m.report.s2;
            e["kappa"] = m.report.kappa;
            e["gamma_bound"] = m.report.gamma_bound;
            e["ks_value"] = m.report.ks_value;
            e["msw_value"] = m.report.msw_value;
            e["martinelli_value"] = m.report.martinelli_value;
            e["mossel_value"] = m.report.mossel_value;
            e["verdict"] = std::string(to_string(m.report.verdict));
            j["measures"].push_back(e);
        }
        print_json(out, j);
        return 0;
    }

    const char* header = "index,kind,even_value,odd_value,k_eff,s2,kappa,gamma_bound,ks_value,msw_value,"
                         "martinelli_value,mossel_value,verdict\n";
    if (opt.format == OutputFormat::Csv) {
        out << header;
        for (std::size_t s = 0; s < measures.size(); ++s) {
            const auto& m = measures[s];
            const auto [e, o] = even_odd_text(m.law);
            out << s << ',' << to_string(m.law.kind()) << ',' << e << ',' << o << ',' << m.report.k_eff << ','
                << format_number(m.report.s2) << ',' << format_number(m.report.kappa) << ','
                << format_number(m.report.gamma_bound) << ',' << format_number(m.report.ks_value) << ','
                << format_number(m.report.msw_value) << ',' << format_number(m.report.martinelli_value) << ','
                << format_number(m.report.mossel_value) << ',' << to_string(m.report.verdict) << '\n';
        }
        return 0;
    }
    out << "k = " << opt.k << ", lambda = " << format_number(opt.lambda) << '\n';
    out << std::left << std::setw(4) << "#" << std::setw(24) << "kind" << std::setw(20) << "even z" << std::setw(20)
        << "odd z" << std::setw(6) << "k_eff" << std::setw(20) << "s2" << std::setw(20) << "kappa" << std::setw(20)
        << "KS k*s2^2" << std::setw(20) << "MSW k*kappa*g" << "verdict\n";
    for (std::size_t s = 0; s < measures.size(); ++s) {
        const auto& m = measures[s];
        const auto [e, o] = even_odd_text(m.law);
        out << std::left << std::setw(4) << s << std::setw(24) << to_string(m.law.kind()) << std::setw(20) << e
            << std::setw(20) << o << std::setw(6) << m.report.k_eff << std::setw(20) << format_number(m.report.s2)
            << std::setw(20) << format_number(m.report.kappa) << std::setw(20) << format_number(m.report.ks_value)
            << std::setw(20) << format_number(m.report.msw_value) << to_string(m.report.verdict) << '\n';
    }
    return 0;
}

int cmd_critical(const CriticalOptions& opt, std::ostream& out) {
    const CriticalValues cv = lambda_star(opt.k);
    struct Row {
        std::string key;
        double value;
        std::string label;
    };
    std::vector<Row> rows = {
        {"lambda_cr", cv.lambda_cr, "(k-1)^-1 (k/(k-1))^k; uniqueness and period-2 bifurcation"},
        {"t_star", cv.t_star, "root in (0,1) of t^(k+1) - k t^2 + (2k-1) t - k + 1"},
        {"lambda_star", cv.lambda_star, "(1/t*^k)(1/t* - 1); TI measure extremal below"},
        {"lambda_nonextremal", cv.lambda_nonextremal,
         "(sqrt k - 1)^-1 (sqrt k/(sqrt k - 1))^k; TI measure not extremal above"},
    };
    if (opt.k >= 3) {
        rows.push_back({"lambda_asymptotic", asymptotic_bound(opt.k, opt.epsilon),
                        "e^(1+eps) ln k (ln k + ln ln k + 1 + eps); large-k non-extremality, eps = " +
                            format_number(opt.epsilon)});
    }
    if (opt.k >= 6) {
        const auto [sm, sp] = weak::s_pm(opt.k);
        const auto [lm, lp] = weak::lambda_pm(opt.k);
        rows.push_back({"s_minus", sm, "(k - 3 - sqrt(k^2 - 6k + 1)) / 4"});
        rows.push_back({"s_plus", sp, "(k - 3 + sqrt(k^2 - 6k + 1)) / 4"});
        rows.push_back({"lambda_minus", lm, "(s- + 1)^k s-; weak-periodic window on I4, i = 1"});
        rows.push_back({"lambda_plus", lp, "(s+ + 1)^k s+"});
    }

    if (opt.format == OutputFormat::Json) {
        json j;
        j["command"] = "critical";
        j["k"] = opt.k;
        j["epsilon"] = opt.epsilon;
        j["values"] = json::object();
        j["labels"] = json::object();
        for (const auto& r : rows) {
            j["values"][r.key] = r.value;
            j["labels"][r.key] = r.label;
        }
        j["t_star_residual"] = cv.t_star_residual;
        print_json(out, j);
        return 0;
    }
    if (opt.format == OutputFormat::Csv) {
        out << "quantity,value,formula\n";
        for (const auto& r : rows) {
            out << r.key << ',' << format_number(r.value) << ",\"" << r.label << "\"\n";
        }
        return 0;
    }
    out << "k = " << opt.k << '\n';
    for (const auto& r : rows) {
        out << std::left << std::setw(20) << r.key << std::setw(20) << format_number(r.value) << r.label << '\n';
    }
    return 0;
}

int cmd_oracle(const OracleOptions& opt, std::ostream& out) {
    using namespace hctree::oracle;
    const ModelParams params(opt.k, opt.lambda);
    if (opt.mode != "ti" && opt.mode != "periodic" && opt.mode != "perturbed") {
        throw UsageError("--mode must be ti, periodic or perturbed");
    }
    if (opt.depth < 1) {
        throw UsageError("--depth must be >= 1");
    }
    const RootDegree root = opt.root == "full" ? RootDegree::Full : RootDegree::Half;
    const FiniteBall ball(opt.k, opt.depth, root);
    if (ball.vertex_count() > kEnumerationCap) {
        throw SizeError("ball has " + std::to_string(ball.vertex_count()) + " vertices; enumeration cap is " +
                        std::to_string(kEnumerationCap));
    }

    const double z_star = solve_translation_invariant(params).values()[0];
    double z_even = z_star;
    double z_odd = z_star;
    std::vector<double> assignment;
    if (opt.mode == "periodic") {
        const SolveReport rep = solve_two_periodic(params);
        if (rep.solutions.size() < 2) {
            throw std::runtime_error("no two-periodic pair exists at lambda = " + format_number(opt.lambda) +
                                     " (lambda_cr = " + format_number(rep.lambda_critical) + ")");
        }
        z_even = rep.solutions[1].even_value();
        z_odd = rep.solutions[1].odd_value();
        assignment = periodic_assignment(ball, opt.lambda, z_even, z_odd);
    } else {
        assignment = uniform_assignment(ball, opt.lambda, z_star);
        if (opt.mode == "perturbed") {
            for (double& z : assignment) z += 0.1;
        }
    }
    const double deviation = consistency_check(ball, opt.lambda, assignment);
    const bool pass = deviation < kOracleThreshold;

    json j;
    j["command"] = "oracle";
    j["k"] = opt.k;
    j["lambda"] = opt.lambda;
    j["depth"] = opt.depth;
    j["root"] = opt.root;
    j["mode"] = opt.mode;
    j["vertices"] = ball.vertex_count();
    j["configurations"] = count_admissible_dp(ball);
    j["max_deviation"] = deviation;
    j["threshold"] = kOracleThreshold;
    j["pass"] = pass;

    std::ostringstream sampler_text;
    if (opt.samples > 0) {
        // Child occupation frequency given a free parent, split by the parity of the child depth.
        const auto sampled = sample_tree_chain(params, z_odd, z_even, opt.depth, opt.samples, opt.seed);
        std::array<double, 2> trials{};
        std::array<double, 2> hits{};
        std::size_t violations = 0;
        for (const auto& s : sampled.samples) {
            if (!is_admissible(sampled.ball, s)) ++violations;
            for (std::size_t v = 1; v < s.size(); ++v) {
                if (s[static_cast<std::size_t>(sampled.ball.parent(v))] == 0) {
                    const auto parity = static_cast<std::size_t>(sampled.ball.level(v) % 2);
                    trials[parity] += 1;
                    hits[parity] += s[v];
                }
            }
        }
        const std::array<double, 2> expected = {single_step_matrix(params, z_even).p01,
                                                single_step_matrix(params, z_odd).p01};
        json sj;
        sj["count"] = opt.samples;
        sj["seed"] = opt.seed;
        sj["generator"] = sampled.generator;
        sj["hard_core_violations"] = violations;
        sj["odd_depth_frequency"] = trials[1] > 0 ? hits[1] / trials[1] : 0.0;
        sj["odd_depth_expected"] = expected[1];
        sj["even_depth_frequency"] = trials[0] > 0 ? hits[0] / trials[0] : 0.0;
        sj["even_depth_expected"] = expected[0];
        j["sampler"] = sj;
        sampler_text << "sampler: " << opt.samples << " samples, seed " << opt.seed << ", " << sampled.generator
                     << '\n'
                     << "  hard-core violations: " << violations << '\n'
                     << "  P(child=1 | parent=0), odd depth:  " << format_number(sj["odd_depth_frequency"])
                     << " (expected " << format_number(expected[1]) << ")\n"
                     << "  P(child=1 | parent=0), even depth: " << format_number(sj["even_depth_frequency"])
                     << " (expected " << format_number(expected[0]) << ")\n";
    }

    if (opt.format == OutputFormat::Json) {
        print_json(out, j);
        return 0;
    }
    if (opt.format == OutputFormat::Csv) {
        out << "mode,k,lambda,depth,root,vertices,max_deviation,threshold,result\n"
            << opt.mode << ',' << opt.k << ',' << format_number(opt.lambda) << ',' << opt.depth << ',' << opt.root
            << ',' << ball.vertex_count() << ',' << format_number(deviation) << ',' << format_number(kOracleThreshold)
            << ',' << (pass ? "PASS" : "FAIL") << '\n';
        return 0;
    }
    out << "mode = " << opt.mode << ", k = " << opt.k << ", lambda = " << format_number(opt.lambda)
        << ", depth = " << opt.depth << ", root = " << opt.root << ", vertices = " << ball.vertex_count() << '\n'
        << "max deviation: " << format_number(deviation) << '\n'
        << "threshold:     " << format_number(kOracleThreshold) << '\n'
        << "result:        " << (pass ? "PASS" : "FAIL") << '\n'
        << sampler_text.str();
    return 0;
}

int cmd_weak(const WeakOptions& opt, std::ostream& out) {
    weak::WeakPeriodicParams p{opt.k, opt.i, opt.lambda, InvariantSet::I2};
    try {
        p.set = parse_invariant_set(opt.set);
        p.validate();
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    if (p.set == InvariantSet::I1) {
        throw UsageError("--set must be I2, I3 or I4");
    }
    const SolveReport report = weak::solve_weak_periodic(p, opt.tol);

    if (opt.format == OutputFormat::Json) {
        json j;
        j["command"] = "weak";
        j["k"] = opt.k;
        j["i"] = opt.i;
        j["lambda"] = opt.lambda;
        j["set"] = std::string(to_string(p.set));
        j["solutions"] = json::array();
        for (std::size_t s = 0; s < report.solutions.size(); ++s) {
            json e = law_json(report.solutions[s]);
            e["residual"] = report.residuals[s];
            j["solutions"].push_back(e);
        }
        j["non_translation_invariant"] = report.non_translation_invariant();
        j["diagnostics"] = report.diagnostics;
        print_json(out, j);
        return 0;
    }
    if (opt.format == OutputFormat::Csv) {
        out << "index,kind,z1,z2,z3,z4,residual\n";
        for (std::size_t s = 0; s < report.solutions.size(); ++s) {
            const BoundaryLaw& law = report.solutions[s];
            out << s << ',' << to_string(law.kind());
            for (std::size_t c = 0; c < 4; ++c) {
                out << ',' << format_number(law.values()[std::min(c, law.values().size() - 1)]);
            }
            out << ',' << format_number(report.residuals[s]) << '\n';
        }
        return 0;
    }
    out << "k = " << opt.k << ", i = " << opt.i << ", lambda = " << format_number(opt.lambda)
        << ", set = " << to_string(p.set) << '\n'
        << report.solutions.size() << " solution(s), " << report.non_translation_invariant()
        << " not translation-invariant\n";
    for (std::size_t s = 0; s < report.solutions.size(); ++s) {
        out << "  " << s << "  " << std::left << std::setw(24) << to_string(report.solutions[s].kind())
            << law_values_text(report.solutions[s]) << "  residual " << format_number(report.residuals[s]) << '\n';
    }
    for (const auto& d : report.diagnostics) {
        out << "note: " << d << '\n';
    }
    return 0;
}

}  // namespace hctree::cli
