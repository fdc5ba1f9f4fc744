#pragma once

// Exact finite-volume computations on balls of the Cayley tree.
//
// Two independent routes are kept side by side: exhaustive enumeration of admissible
// configurations (capped at kEnumerationCap vertices) and a bottom-up two-state
// recursion over subtrees that is linear in the ball size.
//
// Weights follow the normalized convention: a configuration sigma on V_n has weight
//   lambda^{#sigma} * prod_{x in W_n, sigma(x) = 1} z_x,
// i.e. (z_0, z_1) = (1, z) on the boundary level.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hctree/core.hpp"

namespace hctree::oracle {

inline constexpr std::size_t kEnumerationCap = 40;

enum class RootDegree : std::uint8_t {
    Full,  ///< root has k + 1 children, every other vertex k
    Half,  ///< every vertex including the root has k children
};

/// Ball V_n around the root, vertices numbered in level order (parents before children).
class FiniteBall {
public:
    FiniteBall(int k, int depth, RootDegree root = RootDegree::Half);

    int k() const noexcept { return k_; }
    int depth() const noexcept { return depth_; }
    RootDegree root_degree() const noexcept { return root_; }
    std::size_t vertex_count() const noexcept { return parent_.size(); }

    /// First vertex of level `level`; level_begin(depth + 1) == vertex_count().
    std::size_t level_begin(int level) const;
    std::size_t level_end(int level) const { return level_begin(level + 1); }
    int level(std::size_t v) const { return level_[v]; }
    /// Parent index, or -1 for the root.
    std::ptrdiff_t parent(std::size_t v) const { return parent_[v]; }
    std::size_t first_child(std::size_t v) const { return first_child_[v]; }
    std::size_t child_count(std::size_t v) const { return child_count_[v]; }
    std::size_t leaf_count() const { return vertex_count() - level_begin(depth_); }

    /// The same ball one level shallower. Vertex indices agree on the common part.
    FiniteBall shrunk() const;

private:
    int k_;
    int depth_;
    RootDegree root_;
    std::vector<std::size_t> level_start_;
    std::vector<int> level_;
    std::vector<std::ptrdiff_t> parent_;
    std::vector<std::size_t> first_child_;
    std::vector<std::size_t> child_count_;
};

/// Spins in level order; 1 = occupied.
using Configuration = std::vector<std::uint8_t>;

bool is_admissible(const FiniteBall& ball, std::span<const std::uint8_t> spins);

// ---------------------------------------------------------------------------
// Counting and partition functions

std::uint64_t count_admissible_enumerated(const FiniteBall& ball);
std::uint64_t count_admissible_dp(const FiniteBall& ball);
/// Enumeration and DP when the ball is within the cap (ConsistencyError if they
/// disagree), DP alone otherwise.
std::uint64_t count_admissible(const FiniteBall& ball);

/// Z_n by the subtree recursion. `leaf_z` has one positive entry per boundary vertex.
double partition_function(const FiniteBall& ball, double lambda, std::span<const double> leaf_z);
double partition_function(const FiniteBall& ball, double lambda, double uniform_leaf_z);

/// Z_n by summing every admissible configuration.
double partition_function_enumerated(const FiniteBall& ball, double lambda, std::span<const double> leaf_z);

/// mu^(n)(sigma(root) = 1) by the subtree recursion.
double root_marginal(const FiniteBall& ball, double lambda, std::span<const double> leaf_z);
double root_marginal(const FiniteBall& ball, double lambda, double uniform_leaf_z);

/// Calls visit(spins, weight) for every admissible configuration.
template <class Visitor>
void for_each_configuration(const FiniteBall& ball, double lambda, std::span<const double> leaf_z, Visitor&& visit);

// ---------------------------------------------------------------------------
// Boundary-law assignments (one z per vertex, level order)

/// Fills interior vertices from the leaves with z_x = prod_{y in S(x)} (1 + lambda z_y)^{-1}.
std::vector<double> propagate_assignment(const FiniteBall& ball, double lambda, std::span<const double> leaf_z);

/// Constant z on the boundary, propagated inward.
std::vector<double> uniform_assignment(const FiniteBall& ball, double lambda, double z);

/// Boundary vertices take z_even or z_odd by the parity of their depth; propagated inward.
std::vector<double> periodic_assignment(const FiniteBall& ball, double lambda, double z_even, double z_odd);

/// Boundary-level entries of a per-vertex assignment.
std::vector<double> boundary_values(const FiniteBall& ball, std::span<const double> assignment);

// ---------------------------------------------------------------------------
// Checks against the analytic objects

/// max over admissible sigma on V_{n-1} of |sum_{omega} mu^(n)(sigma v omega) - mu^(n-1)(sigma)|,
/// with mu^(n) built from the level-n entries of `assignment` and mu^(n-1) from level n-1.
double consistency_check(const FiniteBall& ball, double lambda, std::span<const double> assignment);

/// Exact P(sigma(descendant) = j | sigma(ancestor) = i) under mu^(n), both rows.
TransitionMatrix2 conditional_matrix(const FiniteBall& ball, double lambda, std::span<const double> assignment,
                                     std::size_t ancestor, std::size_t descendant);

/// Row `parent_spin` of the conditional law from the root to its first descendant at
/// distance `steps` (1 or 2).
std::array<double, 2> conditional_child_distribution(const FiniteBall& ball, double lambda,
                                                     std::span<const double> assignment, int parent_spin,
                                                     int steps = 1);

// ---------------------------------------------------------------------------
// Tree-indexed chain sampler

struct ChainSamples {
    FiniteBall ball;
    std::vector<Configuration> samples;
    /// Generator identity and seed-mixing rule, for output metadata.
    std::string generator;
};

/// Root spin from the stationary law of P_{z1} P_{z2}; odd depths are entered with
/// P_{z1} and even depths with P_{z2}. Deterministic in `seed`; sample j uses an
/// independent stream seeded by splitmix64(seed + (j + 1) * 0x9E3779B97F4A7C15).
ChainSamples sample_tree_chain(const ModelParams& params, double z1, double z2, int depth, std::size_t count,
                               std::uint64_t seed);

// ---------------------------------------------------------------------------

namespace detail {

void require_enumerable(const FiniteBall& ball);
void require_leaf_values(const FiniteBall& ball, std::span<const double> leaf_z);

template <class Visitor>
void visit_from(const FiniteBall& ball, double lambda, std::span<const double> leaf_z, std::size_t leaf_begin,
                Configuration& spins, std::size_t v, double weight, Visitor& visit) {
    if (v == spins.size()) {
        visit(std::span<const std::uint8_t>(spins), weight);
        return;
    }
    spins[v] = 0;
    visit_from(ball, lambda, leaf_z, leaf_begin, spins, v + 1, weight, visit);
    const auto p = ball.parent(v);
    if (p < 0 || spins[static_cast<std::size_t>(p)] == 0) {
        spins[v] = 1;
        const double w = v >= leaf_begin ? lambda * leaf_z[v - leaf_begin] : lambda;
        visit_from(ball, lambda, leaf_z, leaf_begin, spins, v + 1, weight * w, visit);
        spins[v] = 0;
    }
}

}  // namespace detail

template <class Visitor>
void for_each_configuration(const FiniteBall& ball, double lambda, std::span<const double> leaf_z, Visitor&& visit) {
    detail::require_enumerable(ball);
    detail::require_leaf_values(ball, leaf_z);
    Configuration spins(ball.vertex_count(), 0);
    detail::visit_from(ball, lambda, leaf_z, ball.level_begin(ball.depth()), spins, 0, 1.0, visit);
}

}  // namespace hctree::oracle
