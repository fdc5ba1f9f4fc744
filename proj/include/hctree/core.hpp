#pragma once

// Domain types for the two-state hard-core model on a Cayley tree and the
// one-step boundary-law recursion z -> (1 + lambda z)^(-k).
//
// A boundary law is stored as the scalar ratio z = z_1 / z_0 per vertex class;
// the measure is invariant under rescaling each vertex's (z_0, z_1) pair.

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "hctree/errors.hpp"

namespace hctree {

inline constexpr double kDefaultTolerance = 1e-12;

/// Tree order k (children per non-root vertex) and activity lambda.
class ModelParams {
public:
    ModelParams(int k, double lambda);

    int k() const noexcept { return k_; }
    double lambda() const noexcept { return lambda_; }

private:
    int k_;
    double lambda_;
};

/// Invariant subsets of the index-4 weakly periodic map.
enum class InvariantSet : std::uint8_t { I1, I2, I3, I4 };

std::string_view to_string(InvariantSet set) noexcept;
InvariantSet parse_invariant_set(std::string_view text);

enum class LawKind : std::uint8_t { TranslationInvariant, TwoPeriodic, WeakPeriodic };

std::string_view to_string(LawKind kind) noexcept;

/// Field values of one boundary-law solution.
///
/// TranslationInvariant: one value. TwoPeriodic: two values stored in canonical order
/// values[0] <= values[1]; `swapped` selects which one the even-depth vertices carry
/// (false: values[0] on even depths), so both orientations of an asymmetric pair are
/// distinct solutions with identical stored values. WeakPeriodic: (z1, z2, z3, z4)
/// together with the invariant set it was found on.
class BoundaryLaw {
public:
    static BoundaryLaw translation_invariant(double z);
    static BoundaryLaw two_periodic(double z_even, double z_odd);
    static BoundaryLaw weak_periodic(const std::array<double, 4>& z, InvariantSet set);

    LawKind kind() const noexcept { return kind_; }
    const std::vector<double>& values() const noexcept { return values_; }
    bool swapped() const noexcept { return swapped_; }
    InvariantSet invariant_set() const noexcept { return set_; }

    /// Value carried by vertices at even distance from the root (TI/two-periodic only).
    double even_value() const;
    /// Value carried by vertices at odd distance from the root (TI/two-periodic only).
    double odd_value() const;

private:
    BoundaryLaw(LawKind kind, std::vector<double> values, bool swapped, InvariantSet set);

    LawKind kind_;
    std::vector<double> values_;
    bool swapped_ = false;
    InvariantSet set_ = InvariantSet::I1;
};

/// Row-stochastic 2x2 matrix; rows indexed by the parent spin, columns by the child spin.
struct TransitionMatrix2 {
    double p00 = 1.0;
    double p01 = 0.0;
    double p10 = 1.0;
    double p11 = 0.0;

    double determinant() const noexcept { return p00 * p11 - p01 * p10; }
    double trace() const noexcept { return p00 + p11; }
    /// Eigenvalue other than 1. For a row-stochastic 2x2 matrix this is the determinant.
    double second_eigenvalue() const noexcept { return determinant(); }

    TransitionMatrix2 operator*(const TransitionMatrix2& rhs) const noexcept;
};

/// Checks entries are in [0, 1] and rows sum to one within `tol`.
bool is_row_stochastic(const TransitionMatrix2& m, double tol = 1e-15) noexcept;

/// Outcome of a fixed-point search.
struct SolveReport {
    std::vector<BoundaryLaw> solutions;
    /// Critical activity of the tree order (infinity when k = 1).
    double lambda_critical = 0.0;
    /// max |z - F(z)| per solution, same order as `solutions`.
    std::vector<double> residuals;
    /// Set when lambda sits at the bifurcation point and the pair merges into the TI root.
    bool degenerate_double_root = false;
    std::string method;
    std::vector<std::string> diagnostics;

    std::size_t count(LawKind kind) const noexcept;
    std::size_t non_translation_invariant() const noexcept;
    double max_residual() const noexcept;
};

/// f(z) = (1 + lambda z)^(-k).
double recursion_map(const ModelParams& params, double z);

/// f'(z) = -k lambda (1 + lambda z)^(-k-1).
double recursion_derivative(const ModelParams& params, double z);

/// Transition matrix of the tree-indexed chain towards a child carrying field z_child.
TransitionMatrix2 single_step_matrix(const ModelParams& params, double z_child);

/// P_{z1} P_{z2}, built from the closed-form entries.
TransitionMatrix2 two_step_matrix(const ModelParams& params, double z1, double z2);

}  // namespace hctree
