#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "commands.hpp"
#include "format.hpp"
#include "hctree/extremality.hpp"
#include "hctree/solvers.hpp"
#include "hctree/weakperiodic.hpp"

namespace hctree::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const std::vector<std::string>& known_quantities() {
    static const std::vector<std::string> q = {"solutions", "D",   "h",       "g",
                                               "s2",        "ks",  "msw",     "verdict",
                                               "weakperiodic_count"};
    return q;
}

std::string cell(double v) { return std::isnan(v) ? "nan" : format_number(v); }

// Evaluates a closure, mapping library failures to NaN.
template <class Fn>
double guarded(Fn&& fn) {
    try {
        return fn();
    } catch (const std::exception&) {
        return kNaN;
    }
}

std::string row_for(const SweepSpec& spec, double lambda) {
    const ModelParams params(spec.k, lambda);
    bool classified = false;
    std::vector<ClassifiedMeasure> measures;
    auto ensure_classified = [&] {
        if (classified) return;
        classified = true;
        try {
            measures = classify(params);
        } catch (const std::exception&) {
            measures.clear();
        }
    };
    auto pick = [&](LawKind kind) -> const ClassifiedMeasure* {
        ensure_classified();
        for (const auto& m : measures) {
            if (m.law.kind() == kind) return &m;
        }
        return nullptr;
    };
    auto pair_cells = [&](auto&& field) {
        const auto* ti = pick(LawKind::TranslationInvariant);
        const auto* pp = pick(LawKind::TwoPeriodic);
        return (ti ? field(*ti) : std::string("nan")) + ',' + (pp ? field(*pp) : std::string("nan"));
    };

    std::string row = format_number(lambda);
    for (const auto& q : spec.quantities) {
        row += ',';
        if (q == "solutions") {
            row += cell(guarded([&] { return static_cast<double>(solve_two_periodic(params).solutions.size()); }));
        } else if (q == "D") {
            row += cell(guarded([&] { return discriminant_k3(lambda); }));
        } else if (q == "h") {
            row += cell(guarded([&] { return h_function(lambda); }));
        } else if (q == "g") {
            row += cell(guarded([&] { return g_function(lambda); }));
        } else if (q == "s2") {
            row += pair_cells([](const ClassifiedMeasure& m) { return cell(m.report.s2); });
        } else if (q == "ks") {
            row += pair_cells([](const ClassifiedMeasure& m) { return cell(m.report.ks_value); });
        } else if (q == "msw") {
            row += pair_cells([](const ClassifiedMeasure& m) { return cell(m.report.msw_value); });
        } else if (q == "verdict") {
            row += pair_cells([](const ClassifiedMeasure& m) { return std::string(to_string(m.report.verdict)); });
        } else if (q == "weakperiodic_count") {
            try {
                weak::WeakPeriodicParams p{spec.k, spec.i, lambda, parse_invariant_set(spec.set)};
                const SolveReport rep = weak::solve_weak_periodic(p);
                row += std::to_string(rep.solutions.size()) + ',' + std::to_string(rep.non_translation_invariant());
            } catch (const std::exception&) {
                row += "nan,nan";
            }
        }
    }
    return row;
}

}  // namespace

void SweepSpec::validate() const {
    if (k < 1) throw UsageError("-k must be >= 1");
    if (!(std::isfinite(lambda_min) && std::isfinite(lambda_max)) || !(lambda_min < lambda_max)) {
        throw UsageError("--lmin must be smaller than --lmax");
    }
    if (lambda_min <= 0.0) throw UsageError("--lmin must be positive");
    if (points < 2) throw UsageError("-n must be >= 2");
    if (quantities.empty()) throw UsageError("at least one --quantity is required");
    const auto& known = known_quantities();
    for (const auto& q : quantities) {
        if (std::find(known.begin(), known.end(), q) == known.end()) {
            throw UsageError("unknown quantity '" + q + "'");
        }
        if ((q == "D" || q == "h" || q == "g") && k != 3) {
            throw UsageError("quantity '" + q + "' is defined for k = 3 only");
        }
    }
    if (std::find(quantities.begin(), quantities.end(), "weakperiodic_count") != quantities.end()) {
        InvariantSet s{};
        try {
            s = parse_invariant_set(set);
        } catch (const DomainError& e) {
            throw UsageError(e.what());
        }
        if (s == InvariantSet::I1) throw UsageError("--set must be I2, I3 or I4");
        if (i < 1 || i > k + 1) throw UsageError("-i must lie in [1, k + 1]");
    }
}

std::vector<double> SweepSpec::grid() const {
    std::vector<double> g(static_cast<std::size_t>(points));
    for (int j = 0; j < points; ++j) {
        const double t = static_cast<double>(j) / (points - 1);
        if (scale == Scale::Log) {
            g[static_cast<std::size_t>(j)] = std::exp(std::log(lambda_min) + t * (std::log(lambda_max) - std::log(lambda_min)));
        } else {
            g[static_cast<std::size_t>(j)] = lambda_min + t * (lambda_max - lambda_min);
        }
    }
    g.front() = lambda_min;
    g.back() = lambda_max;
    return g;
}

std::vector<std::string> SweepSpec::header() const {
    std::vector<std::string> h = {"lambda"};
    for (const auto& q : quantities) {
        if (q == "s2" || q == "ks" || q == "msw" || q == "verdict") {
            h.push_back(q + "_ti");
            h.push_back(q + "_periodic");
        } else if (q == "weakperiodic_count") {
            h.push_back("weak_solutions");
            h.push_back("weak_non_ti");
        } else {
            h.push_back(q);
        }
    }
    return h;
}

unsigned sweep_threads() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("HC_TREE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) {
            n = std::min<unsigned>(n, static_cast<unsigned>(v));
        }
    }
    return n;
}

std::string sweep_csv(const SweepSpec& spec, unsigned threads) {
    spec.validate();
    const auto lambdas = spec.grid();
    std::vector<std::string> rows(lambdas.size());

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t j = next++; j < lambdas.size(); j = next++) {
            rows[j] = row_for(spec, lambdas[j]);
        }
    };
    const unsigned n = std::clamp<unsigned>(threads, 1u, static_cast<unsigned>(lambdas.size()));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    std::string csv;
    const auto header = spec.header();
    for (std::size_t c = 0; c < header.size(); ++c) {
        if (c) csv += ',';
        csv += header[c];
    }
    csv += '\n';
    for (const auto& r : rows) {
        csv += r;
        csv += '\n';
    }
    return csv;
}

int cmd_sweep(const SweepSpec& spec, const std::optional<std::string>& out_path, std::ostream& out) {
    const std::string csv = sweep_csv(spec, sweep_threads());
    if (!out_path) {
        out << csv;
        return 0;
    }
    std::ofstream file(*out_path, std::ios::binary | std::ios::trunc);
    if (!file) {
        throw std::runtime_error("cannot open '" + *out_path + "' for writing");
    }
    file << csv;
    file.flush();
    if (!file) {
        throw std::runtime_error("failed writing '" + *out_path + "'");
    }
    out << "wrote " << spec.points << " rows to " << *out_path << '\n';
    return 0;
}

}  // namespace hctree::cli
