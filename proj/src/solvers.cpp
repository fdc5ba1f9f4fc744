#include "hctree/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "detail/bisection.hpp"

namespace hctree {

namespace {

// Gap kept between the upper end of the two-cycle bracket and the TI root.
constexpr double kDeflationGap = 1e-9;
// Relative distance to lambda_cr treated as sitting on the bifurcation point.
constexpr double kBifurcationBand = 1e-12;

void require_tolerance(double tol) {
    if (!(tol > 0.0) || !std::isfinite(tol)) {
        throw DomainError("tolerance must be positive");
    }
}

double pair_residual(const ModelParams& params, double z1, double z2) {
    return std::max(std::abs(z1 - recursion_map(params, z2)), std::abs(z2 - recursion_map(params, z1)));
}

struct PairSearch {
    bool found = false;
    bool degenerate = false;
    double low = 0.0;
    double high = 0.0;
    std::string note;
};

PairSearch closed_form_pair(const ModelParams& params, double lambda_cr) {
    PairSearch out;
    if (params.lambda() <= lambda_cr) {
        out.degenerate = std::abs(params.lambda() / lambda_cr - 1.0) <= kBifurcationBand;
        return out;
    }
    const auto [low, high] = params.k() == 2 ? solve_two_periodic_k2_closed(params.lambda())
                                             : solve_two_periodic_k3_closed(params.lambda());
    out.found = true;
    out.low = low;
    out.high = high;
    return out;
}

PairSearch generic_pair(const ModelParams& params, double z_star) {
    PairSearch out;
    const double slope = -recursion_derivative(params, z_star);
    if (slope <= 1.0) {
        out.degenerate = slope >= 1.0 - kBifurcationBand;
        return out;
    }
    auto second_iterate_gap = [&](double z) { return recursion_map(params, recursion_map(params, z)) - z; };
    const double hi = z_star - std::min(kDeflationGap, 0.5 * z_star);
    if (!(second_iterate_gap(hi) < 0.0)) {
        // f o f crosses the diagonal closer to z* than the deflation gap.
        out.degenerate = true;
        out.note = "two-cycle not separable from the fixed point (|f'(z*)| = " + std::to_string(slope) + ")";
        return out;
    }
    const auto root = detail::bisect(second_iterate_gap, 0.0, hi);
    out.low = root.root;
    out.high = recursion_map(params, out.low);
    out.found = out.low > 0.0 && out.low < z_star && out.high > z_star;
    if (!out.found) {
        out.note = "bisection of f(f(z)) - z returned a point outside (0, z*)";
    }
    return out;
}

}  // namespace

double critical_lambda(int k) {
    if (k < 2) {
        throw DomainError("critical activity requires k >= 2");
    }
    const double kd = k;
    return std::pow(kd / (kd - 1.0), kd) / (kd - 1.0);
}

BoundaryLaw solve_translation_invariant(const ModelParams& params, double tol) {
    require_tolerance(tol);
    const auto result = detail::bisect([&](double z) { return recursion_map(params, z) - z; }, 0.0, 1.0);
    const double residual = std::abs(result.value);
    if (residual > tol || !(result.root > 0.0)) {
        std::ostringstream msg;
        msg << "translation-invariant bisection residual " << residual << " exceeds tolerance " << tol;
        throw ConvergenceError(msg.str(), residual, result.iterations);
    }
    return BoundaryLaw::translation_invariant(result.root);
}

SolveReport solve_two_periodic(const ModelParams& params, double tol, TwoCycleMethod method) {
    require_tolerance(tol);
    SolveReport report;
    report.lambda_critical =
        params.k() >= 2 ? critical_lambda(params.k()) : std::numeric_limits<double>::infinity();

    const BoundaryLaw ti = solve_translation_invariant(params, tol);
    const double z_star = ti.values()[0];
    report.solutions.push_back(ti);
    report.residuals.push_back(std::abs(z_star - recursion_map(params, z_star)));

    const bool has_closed_form = params.k() == 2 || params.k() == 3;
    if (method == TwoCycleMethod::ClosedForm && !has_closed_form) {
        throw DomainError("closed-form two-cycle is only available for k = 2 and k = 3");
    }
    const bool use_closed =
        method == TwoCycleMethod::ClosedForm || (method == TwoCycleMethod::Automatic && has_closed_form);

    PairSearch pair;
    if (params.k() == 1) {
        report.method = "generic";
    } else if (use_closed) {
        report.method = "closed-form";
        pair = closed_form_pair(params, report.lambda_critical);
    } else {
        report.method = "generic";
        pair = generic_pair(params, z_star);
    }
    report.degenerate_double_root = pair.degenerate;
    if (pair.degenerate) {
        report.diagnostics.push_back("degenerate-double-root");
    }
    if (!pair.note.empty()) {
        report.diagnostics.push_back(pair.note);
    }
    if (!pair.found) {
        return report;
    }

    const double residual = pair_residual(params, pair.low, pair.high);
    if (residual > tol) {
        std::ostringstream msg;
        msg << "two-cycle residual " << residual << " exceeds tolerance " << tol << " (k=" << params.k()
            << ", lambda=" << params.lambda() << ", method=" << report.method << ", pair=(" << pair.low << ", "
            << pair.high << "))";
        throw ConvergenceError(msg.str(), residual, detail::kMaxBisectionIterations);
    }
    report.solutions.push_back(BoundaryLaw::two_periodic(pair.low, pair.high));
    report.residuals.push_back(residual);
    report.solutions.push_back(BoundaryLaw::two_periodic(pair.high, pair.low));
    report.residuals.push_back(residual);
    return report;
}

std::pair<double, double> solve_two_periodic_k2_closed(double lambda) {
    if (!(lambda > 4.0) || !std::isfinite(lambda)) {
        throw NoAsymmetricSolution("k=2 asymmetric pair exists only for lambda > 4");
    }
    // sqrt(lambda^2 - 4 lambda) without forming lambda^2.
    const double root = std::sqrt(lambda) * std::sqrt(lambda - 4.0);
    const double x_large = (lambda + root) / (2.0 * lambda);
    // Equal to (lambda - root) / (2 lambda), written without the cancellation.
    const double x_small = 2.0 / (lambda + root);
    return {x_small * x_small, x_large * x_large};
}

double cardano_root_k3(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw DomainError("lambda must be positive");
    }
    const double r = 12.0 * std::sqrt(12.0 * lambda + 81.0) + 8.0 * lambda + 108.0;
    return std::cbrt(r / lambda) / 6.0 + 2.0 / 3.0 * std::cbrt(lambda / r) + 1.0 / 3.0;
}

double discriminant_k3(double lambda) {
    const double a = cardano_root_k3(lambda);
    return a * a * a * a * lambda * lambda - 4.0 * a * lambda;
}

std::pair<double, double> solve_two_periodic_k3_closed(double lambda) {
    if (!(lambda > critical_lambda(3)) || !std::isfinite(lambda)) {
        throw NoAsymmetricSolution("k=3 asymmetric pair exists only for lambda > 27/16");
    }
    const double a = cardano_root_k3(lambda);
    // Just above 27/16 the discriminant can round below zero.
    const double d = std::max(0.0, a * a * a * a * lambda * lambda - 4.0 * a * lambda);
    const double s = std::sqrt(d);
    const double t1 = (lambda * a * a - s) / (2.0 * lambda * a);
    const double t2 = (lambda * a * a + s) / (2.0 * lambda * a);
    return {t1 * t1 * t1, t2 * t2 * t2};
}

CriticalValues lambda_star(int k) {
    if (k < 2) {
        throw DomainError("lambda_* requires k >= 2");
    }
    const double kd = k;
    auto poly = [kd](double t) { return std::pow(t, kd + 1.0) - kd * t * t + (2.0 * kd - 1.0) * t - kd + 1.0; };
    if (!(poly(0.0) < 0.0 && poly(1.0) > 0.0)) {
        throw ConsistencyError("t* polynomial does not change sign on (0,1)");
    }
    const auto root = detail::bisect(poly, 0.0, 1.0);
    CriticalValues out;
    out.k = k;
    out.t_star = root.root;
    out.t_star_residual = std::abs(root.value);
    if (out.t_star_residual > 1e-12) {
        throw ConsistencyError("t* residual " + std::to_string(out.t_star_residual) + " above 1e-12");
    }
    out.lambda_star = (1.0 / out.t_star - 1.0) / std::pow(out.t_star, kd);
    out.lambda_cr = critical_lambda(k);
    out.lambda_nonextremal = nonextremal_bound(k);
    return out;
}

double nonextremal_bound(int k) {
    if (k < 2) {
        throw DomainError("non-extremality bound requires k >= 2");
    }
    const double r = std::sqrt(static_cast<double>(k));
    return std::pow(r / (r - 1.0), k) / (r - 1.0);
}

double asymptotic_bound(int k, double epsilon) {
    if (k < 3) {
        throw DomainError("asymptotic bound requires k >= 3 (ln ln k must be positive)");
    }
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
        throw DomainError("epsilon must be positive");
    }
    const double lk = std::log(static_cast<double>(k));
    return std::exp(1.0 + epsilon) * lk * (lk + std::log(lk) + 1.0 + epsilon);
}

}  // namespace hctree
