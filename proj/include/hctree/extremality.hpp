#pragma once

// Extremality criteria for the tree-indexed Markov chains attached to TI and
// two-periodic boundary laws.
//
// For a TI law the chain runs on the k-ary tree with the single-step matrix P_z.
// For a two-periodic law it runs on the k^2-ary tree of even-depth vertices with
// the two-step matrix P_{z1} P_{z2}.

#include <string_view>
#include <utility>
#include <vector>

#include "hctree/core.hpp"

namespace hctree {

enum class Verdict { ProvenExtremal, ProvenNonExtremal, Undetermined };

std::string_view to_string(Verdict v) noexcept;

struct CriterionValue {
    double value = 0.0;
    /// Whether the criterion fires (non-extremal for Kesten-Stigum, extremal or
    /// no-reconstruction for the others).
    bool holds = false;
};

struct ExtremalityReport {
    double s2 = 0.0;           ///< |second eigenvalue| of the chain matrix
    double kappa = 0.0;        ///< Dobrushin-type contraction coefficient
    double gamma_bound = 0.0;  ///< upper bound lambda / (lambda + 1) on gamma; gamma itself is not computed
    double ks_value = 0.0;     ///< k_eff s2^2
    double msw_value = 0.0;    ///< k_eff kappa gamma_bound
    double martinelli_value = 0.0;
    double mossel_value = 0.0;
    int k_eff = 0;
    Verdict verdict = Verdict::Undetermined;
};

/// lambda^2 z1 z2 / (lambda^2 z1 z2 + lambda z1 + lambda z2 + 1).
double second_eigenvalue(const ModelParams& params, double z1, double z2);

/// Kesten-Stigum: k_eff s2^2 > 1 proves non-extremality. For two_periodic = false the
/// chain is the single-step one with field z1 and k_eff = k; otherwise the two-step chain
/// with k_eff = k^2.
CriterionValue kesten_stigum(const ModelParams& params, double z1, double z2, bool two_periodic);

/// k_eff kappa lambda/(lambda+1) < 1 proves extremality.
CriterionValue msw_check(const ModelParams& params, double z1, double z2, bool two_periodic);

/// k_eff (sqrt(p00 p11) - sqrt(p01 p10))^2 <= 1 rules out reconstruction.
CriterionValue martinelli_check(const TransitionMatrix2& m, int k_eff);

/// k_eff (p00 - p10)^2 / min(p00 + p10, p01 + p11) <= 1 rules out reconstruction.
CriterionValue mossel_check(const TransitionMatrix2& m, int k_eff);

/// k = 3 diagnostic 9 kappa^2 - 1 on the closed-form periodic pair (Kesten-Stigum minus one).
double h_function(double lambda);

/// k = 3 diagnostic 9 kappa lambda/(lambda+1) - 1 on the closed-form periodic pair.
double g_function(double lambda);

/// Report for one boundary law (TI or two-periodic). Throws ConsistencyError when
/// Kesten-Stigum and an extremality criterion fire together, which a law that is
/// not a fixed point of the recursion can provoke.
ExtremalityReport extremality_report(const ModelParams& params, const BoundaryLaw& law);

struct ClassifiedMeasure {
    BoundaryLaw law;
    double residual = 0.0;
    ExtremalityReport report;
};

/// Solves for every TI and two-periodic law at `params` and attaches a verdict to each.
std::vector<ClassifiedMeasure> classify(const ModelParams& params, double tol = kDefaultTolerance);

}  // namespace hctree
