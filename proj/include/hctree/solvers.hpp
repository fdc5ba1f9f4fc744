#pragma once

// Translation-invariant and two-periodic boundary laws, and the critical activities
// attached to a tree order.

#include <utility>

#include "hctree/core.hpp"

namespace hctree {

struct CriticalValues {
    int k = 0;
    /// Uniqueness / bifurcation threshold (k-1)^{-1} (k/(k-1))^k.
    double lambda_cr = 0.0;
    /// Below this activity the TI measure is extremal.
    double lambda_star = 0.0;
    /// Above this activity the TI measure is not extremal.
    double lambda_nonextremal = 0.0;
    /// Root in (0,1) of t^{k+1} - k t^2 + (2k-1) t - k + 1.
    double t_star = 0.0;
    /// |polynomial(t_star)|.
    double t_star_residual = 0.0;
};

enum class TwoCycleMethod { Automatic, ClosedForm, Generic };

double critical_lambda(int k);

/// Unique z in (0,1) with z = f(z), by bisection of f(z) - z on [0, 1].
BoundaryLaw solve_translation_invariant(const ModelParams& params, double tol = kDefaultTolerance);

/// All two-periodic solutions: the TI law plus, above the critical activity, both
/// orientations of the asymmetric pair.
SolveReport solve_two_periodic(const ModelParams& params, double tol = kDefaultTolerance,
                               TwoCycleMethod method = TwoCycleMethod::Automatic);

/// Asymmetric pair for k = 2, returned as (smaller, larger). Requires lambda > 4.
std::pair<double, double> solve_two_periodic_k2_closed(double lambda);

/// Real root a > 1 of a^3 - a^2 - 1/lambda = 0 from Cardano's formula.
double cardano_root_k3(double lambda);

/// a^4 lambda^2 - 4 a lambda with a = cardano_root_k3(lambda).
double discriminant_k3(double lambda);

/// Asymmetric pair for k = 3, returned as (smaller, larger). Requires lambda > 27/16.
std::pair<double, double> solve_two_periodic_k3_closed(double lambda);

/// t*, lambda_*, lambda_cr and the non-extremality bound for tree order k >= 2.
CriticalValues lambda_star(int k);

/// (sqrt(k)-1)^{-1} (sqrt(k)/(sqrt(k)-1))^k.
double nonextremal_bound(int k);

/// e^{1+eps} ln k (ln k + ln ln k + 1 + eps), for k >= 3 and eps > 0.
double asymptotic_bound(int k, double epsilon);

}  // namespace hctree
