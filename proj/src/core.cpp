#include "hctree/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace hctree {

namespace {

void require_finite(double value, const char* what) {
    if (!std::isfinite(value)) {
        throw DomainError(std::string(what) + " must be finite");
    }
}

void require_positive_field(double z, const char* what) {
    require_finite(z, what);
    if (!(z > 0.0)) {
        throw DomainError(std::string(what) + " must be positive");
    }
}

}  // namespace

ModelParams::ModelParams(int k, double lambda) : k_(k), lambda_(lambda) {
    if (k < 1) {
        throw DomainError("tree order k must be >= 1");
    }
    if (!std::isfinite(lambda) || !(lambda > 0.0)) {
        throw DomainError("activity lambda must be positive and finite");
    }
}

std::string_view to_string(InvariantSet set) noexcept {
    switch (set) {
        case InvariantSet::I1: return "I1";
        case InvariantSet::I2: return "I2";
        case InvariantSet::I3: return "I3";
        case InvariantSet::I4: return "I4";
    }
    return "?";
}

InvariantSet parse_invariant_set(std::string_view text) {
    if (text == "I1" || text == "1") return InvariantSet::I1;
    if (text == "I2" || text == "2") return InvariantSet::I2;
    if (text == "I3" || text == "3") return InvariantSet::I3;
    if (text == "I4" || text == "4") return InvariantSet::I4;
    throw DomainError("unknown invariant set '" + std::string(text) + "'");
}

std::string_view to_string(LawKind kind) noexcept {
    switch (kind) {
        case LawKind::TranslationInvariant: return "translation-invariant";
        case LawKind::TwoPeriodic: return "two-periodic";
        case LawKind::WeakPeriodic: return "weak-periodic";
    }
    return "?";
}

BoundaryLaw::BoundaryLaw(LawKind kind, std::vector<double> values, bool swapped, InvariantSet set)
    : kind_(kind), values_(std::move(values)), swapped_(swapped), set_(set) {
    for (double v : values_) {
        require_positive_field(v, "boundary-law value");
    }
}

BoundaryLaw BoundaryLaw::translation_invariant(double z) {
    return BoundaryLaw(LawKind::TranslationInvariant, {z}, false, InvariantSet::I1);
}

BoundaryLaw BoundaryLaw::two_periodic(double z_even, double z_odd) {
    const bool swapped = z_even > z_odd;
    return BoundaryLaw(LawKind::TwoPeriodic, {std::min(z_even, z_odd), std::max(z_even, z_odd)},
                       swapped, InvariantSet::I1);
}

BoundaryLaw BoundaryLaw::weak_periodic(const std::array<double, 4>& z, InvariantSet set) {
    return BoundaryLaw(LawKind::WeakPeriodic, {z.begin(), z.end()}, false, set);
}

double BoundaryLaw::even_value() const {
    switch (kind_) {
        case LawKind::TranslationInvariant: return values_[0];
        case LawKind::TwoPeriodic: return swapped_ ? values_[1] : values_[0];
        case LawKind::WeakPeriodic: break;
    }
    throw DomainError("weak-periodic laws have no even/odd split");
}

double BoundaryLaw::odd_value() const {
    switch (kind_) {
        case LawKind::TranslationInvariant: return values_[0];
        case LawKind::TwoPeriodic: return swapped_ ? values_[0] : values_[1];
        case LawKind::WeakPeriodic: break;
    }
    throw DomainError("weak-periodic laws have no even/odd split");
}

TransitionMatrix2 TransitionMatrix2::operator*(const TransitionMatrix2& rhs) const noexcept {
    return {p00 * rhs.p00 + p01 * rhs.p10, p00 * rhs.p01 + p01 * rhs.p11,
            p10 * rhs.p00 + p11 * rhs.p10, p10 * rhs.p01 + p11 * rhs.p11};
}

bool is_row_stochastic(const TransitionMatrix2& m, double tol) noexcept {
    for (double p : {m.p00, m.p01, m.p10, m.p11}) {
        if (!(p >= 0.0 && p <= 1.0)) {
            return false;
        }
    }
    return std::abs(m.p00 + m.p01 - 1.0) <= tol && std::abs(m.p10 + m.p11 - 1.0) <= tol;
}

std::size_t SolveReport::count(LawKind kind) const noexcept {
    return static_cast<std::size_t>(std::count_if(
        solutions.begin(), solutions.end(), [kind](const BoundaryLaw& b) { return b.kind() == kind; }));
}

std::size_t SolveReport::non_translation_invariant() const noexcept {
    return solutions.size() - count(LawKind::TranslationInvariant);
}

double SolveReport::max_residual() const noexcept {
    double worst = 0.0;
    for (double r : residuals) {
        worst = std::max(worst, r);
    }
    return worst;
}

double recursion_map(const ModelParams& params, double z) {
    require_finite(z, "z");
    if (z < 0.0) {
        throw DomainError("z must be non-negative");
    }
    return std::pow(1.0 + params.lambda() * z, -params.k());
}

double recursion_derivative(const ModelParams& params, double z) {
    require_finite(z, "z");
    if (z < 0.0) {
        throw DomainError("z must be non-negative");
    }
    const double k = params.k();
    return -k * params.lambda() * std::pow(1.0 + params.lambda() * z, -k - 1.0);
}

TransitionMatrix2 single_step_matrix(const ModelParams& params, double z_child) {
    require_positive_field(z_child, "z_child");
    const double lz = params.lambda() * z_child;
    const double occupied = lz / (1.0 + lz);
    // p00 is taken as the complement so the row sums to one exactly.
    return {1.0 - occupied, occupied, 1.0, 0.0};
}

TransitionMatrix2 two_step_matrix(const ModelParams& params, double z1, double z2) {
    require_positive_field(z1, "z1");
    require_positive_field(z2, "z2");
    const double l = params.lambda();
    const double a = 1.0 + l * z1;
    const double b = 1.0 + l * z2;
    const double p01 = l * z2 / (a * b);
    const double p11 = l * z2 / b;
    return {1.0 - p01, p01, 1.0 - p11, p11};
}

}  // namespace hctree
