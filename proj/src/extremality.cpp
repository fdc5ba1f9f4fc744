#include "hctree/extremality.hpp"

#include <algorithm>
#include <cmath>

#include "hctree/solvers.hpp"

namespace hctree {

namespace {

void require_positive(double z, const char* what) {
    if (!(z > 0.0) || !std::isfinite(z)) {
        throw DomainError(std::string(what) + " must be positive and finite");
    }
}

void require_stochastic(const TransitionMatrix2& m) {
    for (double p : {m.p00, m.p01, m.p10, m.p11}) {
        if (p < 0.0 || !std::isfinite(p)) {
            throw DomainError("transition probabilities must be non-negative");
        }
    }
    if (!is_row_stochastic(m, 1e-12)) {
        throw DomainError("transition matrix is not row-stochastic");
    }
}

// Occupation probability of a child with field z when its parent is free.
double single_step_occupation(double lambda, double z) { return lambda * z / (1.0 + lambda * z); }

double periodic_kappa(double lambda, double z1, double z2) {
    return lambda * lambda * z1 * z2 / ((1.0 + lambda * z1) * (1.0 + lambda * z2));
}

int effective_branching(const ModelParams& params, bool two_periodic) {
    return two_periodic ? params.k() * params.k() : params.k();
}

double k3_periodic_kappa(double lambda) {
    if (!(lambda > critical_lambda(3))) {
        throw DomainError("k=3 diagnostics are defined only for lambda > 27/16");
    }
    const auto [z1, z2] = solve_two_periodic_k3_closed(lambda);
    return periodic_kappa(lambda, z1, z2);
}

}  // namespace

std::string_view to_string(Verdict v) noexcept {
    switch (v) {
        case Verdict::ProvenExtremal: return "ProvenExtremal";
        case Verdict::ProvenNonExtremal: return "ProvenNonExtremal";
        case Verdict::Undetermined: return "Undetermined";
    }
    return "?";
}

double second_eigenvalue(const ModelParams& params, double z1, double z2) {
    require_positive(z1, "z1");
    require_positive(z2, "z2");
    const double l = params.lambda();
    const double prod = l * l * z1 * z2;
    return prod / (prod + l * z1 + l * z2 + 1.0);
}

CriterionValue kesten_stigum(const ModelParams& params, double z1, double z2, bool two_periodic) {
    const double s2 = two_periodic ? second_eigenvalue(params, z1, z2)
                                   : (require_positive(z1, "z1"), single_step_occupation(params.lambda(), z1));
    const double value = effective_branching(params, two_periodic) * s2 * s2;
    return {value, value > 1.0};
}

CriterionValue msw_check(const ModelParams& params, double z1, double z2, bool two_periodic) {
    require_positive(z1, "z1");
    require_positive(z2, "z2");
    const double l = params.lambda();
    const double kappa = two_periodic ? periodic_kappa(l, z1, z2) : single_step_occupation(l, z1);
    const double value = effective_branching(params, two_periodic) * kappa * (l / (l + 1.0));
    return {value, value < 1.0};
}

CriterionValue martinelli_check(const TransitionMatrix2& m, int k_eff) {
    require_stochastic(m);
    const double d = std::sqrt(m.p00 * m.p11) - std::sqrt(m.p01 * m.p10);
    const double value = k_eff * d * d;
    return {value, value <= 1.0};
}

CriterionValue mossel_check(const TransitionMatrix2& m, int k_eff) {
    require_stochastic(m);
    const double denom = std::min(m.p00 + m.p10, m.p01 + m.p11);
    if (!(denom > 0.0)) {
        throw DomainError("Mossel bound undefined: min(p00 + p10, p01 + p11) = 0");
    }
    const double d = m.p00 - m.p10;
    const double value = k_eff * d * d / denom;
    return {value, value <= 1.0};
}

double h_function(double lambda) {
    const double kappa = k3_periodic_kappa(lambda);
    return 9.0 * kappa * kappa - 1.0;
}

double g_function(double lambda) {
    const double kappa = k3_periodic_kappa(lambda);
    return 9.0 * kappa * (lambda / (lambda + 1.0)) - 1.0;
}

ExtremalityReport extremality_report(const ModelParams& params, const BoundaryLaw& law) {
    const double l = params.lambda();
    ExtremalityReport r;
    r.gamma_bound = l / (l + 1.0);
    CriterionValue ks;
    CriterionValue msw;
    CriterionValue mart;
    CriterionValue mos;

    switch (law.kind()) {
        case LawKind::TranslationInvariant: {
            const double z = law.values()[0];
            r.k_eff = params.k();
            r.s2 = single_step_occupation(l, z);
            r.kappa = r.s2;
            ks = kesten_stigum(params, z, z, false);
            msw = msw_check(params, z, z, false);
            const TransitionMatrix2 m = single_step_matrix(params, z);
            mart = martinelli_check(m, r.k_eff);
            mos = mossel_check(m, r.k_eff);
            break;
        }
        case LawKind::TwoPeriodic: {
            const double ze = law.even_value();
            const double zo = law.odd_value();
            r.k_eff = params.k() * params.k();
            r.s2 = second_eigenvalue(params, ze, zo);
            r.kappa = periodic_kappa(l, ze, zo);
            ks = kesten_stigum(params, ze, zo, true);
            msw = msw_check(params, ze, zo, true);
            // The even and odd sublattices carry P_{ze}P_{zo} and P_{zo}P_{ze}; no
            // reconstruction is claimed unless both chains satisfy the bound.
            const TransitionMatrix2 even_chain = two_step_matrix(params, ze, zo);
            const TransitionMatrix2 odd_chain = two_step_matrix(params, zo, ze);
            const auto mart_e = martinelli_check(even_chain, r.k_eff);
            const auto mart_o = martinelli_check(odd_chain, r.k_eff);
            const auto mos_e = mossel_check(even_chain, r.k_eff);
            const auto mos_o = mossel_check(odd_chain, r.k_eff);
            mart = {std::max(mart_e.value, mart_o.value), mart_e.holds && mart_o.holds};
            mos = {std::max(mos_e.value, mos_o.value), mos_e.holds && mos_o.holds};
            break;
        }
        case LawKind::WeakPeriodic:
            throw DomainError("extremality reports cover TI and two-periodic laws only");
    }

    r.ks_value = ks.value;
    r.msw_value = msw.value;
    r.martinelli_value = mart.value;
    r.mossel_value = mos.value;
    const bool non_extremal = ks.holds;
    const bool extremal = msw.holds || mart.holds || mos.holds;
    if (non_extremal && extremal) {
        throw ConsistencyError("Kesten-Stigum and an extremality criterion fire on the same measure");
    }
    r.verdict = non_extremal ? Verdict::ProvenNonExtremal
                             : (extremal ? Verdict::ProvenExtremal : Verdict::Undetermined);
    return r;
}

std::vector<ClassifiedMeasure> classify(const ModelParams& params, double tol) {
    const SolveReport solved = solve_two_periodic(params, tol);
    std::vector<ClassifiedMeasure> out;
    out.reserve(solved.solutions.size());
    for (std::size_t j = 0; j < solved.solutions.size(); ++j) {
        out.push_back({solved.solutions[j], solved.residuals[j], extremality_report(params, solved.solutions[j])});
    }
    return out;
}

}  // namespace hctree
