#pragma once

// Weakly periodic boundary laws for the index-4 normal subgroup H_A ∩ G_k^(2).
//
// A law takes four values z1..z4 indexed by the classes of a vertex and its parent.
// Solutions are the fixed points of the four-component map W; the subgroup H_A enters
// only through i = |A|.

#include <array>
#include <utility>

#include "hctree/core.hpp"

namespace hctree::weak {

using Field4 = std::array<double, 4>;

struct WeakPeriodicParams {
    int k = 2;
    int i = 1;
    double lambda = 1.0;
    InvariantSet set = InvariantSet::I2;

    /// Throws DomainError unless k >= 1, 1 <= i <= k + 1 and lambda > 0.
    void validate() const;
};

/// The map W: one application of the weakly periodic recursion to (z1, z2, z3, z4).
Field4 weak_system_map(const WeakPeriodicParams& p, const Field4& z);

/// Whether z lies in `set` within `tol`, and W(z) does as well.
bool invariant_set_check(InvariantSet set, const Field4& z, double tol, const WeakPeriodicParams& p);

/// Membership only, no image check.
bool in_invariant_set(InvariantSet set, const Field4& z, double tol) noexcept;

/// Embeds reduced coordinates (u, v) into the four-dimensional slice of `set`:
/// I2 -> (u, v, u, v), I3 -> (u, u, v, v), I4 -> (u, v, v, u), I1 -> (u, u, u, u).
Field4 embed(InvariantSet set, double u, double v) noexcept;

/// Fixed points of W on the two-dimensional slice of p.set (I2, I3 or I4).
/// The TI fixed point is reported with kind TranslationInvariant; the rest are
/// WeakPeriodic four-vectors.
SolveReport solve_weak_periodic(const WeakPeriodicParams& p, double tol = kDefaultTolerance);

/// (s-, s+) = ((k - 3) -+ sqrt(k^2 - 6k + 1)) / 4, for k >= 6.
std::pair<double, double> s_pm(int k);

/// (lambda-, lambda+) with lambda± = (s± + 1)^k s±, for k >= 6.
std::pair<double, double> lambda_pm(int k);

}  // namespace hctree::weak
