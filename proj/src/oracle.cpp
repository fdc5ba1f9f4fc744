#include "hctree/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace hctree::oracle {

namespace {

constexpr std::size_t kMaxBallVertices = 50'000'000;
constexpr std::size_t kNoParent = std::numeric_limits<std::size_t>::max();

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    std::uint64_t out = 0;
    if (__builtin_mul_overflow(a, b, &out)) {
        throw std::overflow_error("admissible configuration count exceeds 64 bits");
    }
    return out;
}

std::uint64_t checked_add(std::uint64_t a, std::uint64_t b) {
    std::uint64_t out = 0;
    if (__builtin_add_overflow(a, b, &out)) {
        throw std::overflow_error("admissible configuration count exceeds 64 bits");
    }
    return out;
}

void require_lambda(double lambda) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) {
        throw DomainError("lambda must be positive and finite");
    }
}

// Exhaustive sum over admissible configurations. Interior vertices (levels < n) are
// walked depth-first; the boundary is split into sibling groups under one level-(n-1)
// parent, each group running through all 2^size occupation subsets when the parent is
// free and only the empty subset otherwise. Sums are returned up the recursion rather
// than accumulated globally, which keeps the rounding error proportional to the depth.
class Enumerator {
public:
    Enumerator(const FiniteBall& ball, double lambda, std::span<const double> leaf_z)
        : ball_(ball), lambda_(lambda), leaf_begin_(ball.level_begin(ball.depth())), spins_(ball.vertex_count(), 0) {
        if (ball.depth() == 0) {
            add_group(kNoParent, 0, 1, leaf_z);
        } else {
            for (std::size_t p = ball.level_begin(ball.depth() - 1); p < leaf_begin_; ++p) {
                add_group(p, ball.first_child(p) - leaf_begin_, ball.child_count(p), leaf_z);
            }
        }
    }

    double partition() {
        configurations_ = 0;
        return interior(0, 1.0);
    }

    std::uint64_t configurations() const noexcept { return configurations_; }

    /// Sum over boundary occupations compatible with the interior spins given in `spins`.
    double extensions(std::span<const std::uint8_t> interior_spins) {
        std::copy(interior_spins.begin(), interior_spins.end(), spins_.begin());
        return groups(0, 1.0);
    }

private:
    struct Group {
        std::size_t parent;
        std::vector<double> subset_weight;
    };

    void add_group(std::size_t parent, std::size_t first_leaf, std::size_t size, std::span<const double> leaf_z) {
        if (size >= 31) {
            throw SizeError("sibling group too large to enumerate");
        }
        Group g{parent, std::vector<double>(std::size_t{1} << size)};
        for (std::size_t s = 0; s < g.subset_weight.size(); ++s) {
            double w = 1.0;
            for (std::size_t j = 0; j < size; ++j) {
                if ((s >> j) & 1U) {
                    w *= lambda_ * leaf_z[first_leaf + j];
                }
            }
            g.subset_weight[s] = w;
        }
        groups_.push_back(std::move(g));
    }

    double interior(std::size_t v, double prefix) {
        if (v == leaf_begin_) {
            return groups(0, prefix);
        }
        spins_[v] = 0;
        double total = interior(v + 1, prefix);
        const auto p = ball_.parent(v);
        if (p < 0 || spins_[static_cast<std::size_t>(p)] == 0) {
            spins_[v] = 1;
            total += interior(v + 1, prefix * lambda_);
            spins_[v] = 0;
        }
        return total;
    }

    double groups(std::size_t g, double prefix) {
        if (g == groups_.size()) {
            ++configurations_;
            return prefix;
        }
        const Group& group = groups_[g];
        const bool parent_free = group.parent == kNoParent || spins_[group.parent] == 0;
        if (!parent_free) {
            return groups(g + 1, prefix);
        }
        double total = 0.0;
        if (g + 1 == groups_.size()) {
            for (double w : group.subset_weight) {
                total += prefix * w;
                ++configurations_;
            }
            return total;
        }
        for (double w : group.subset_weight) {
            total += groups(g + 1, prefix * w);
        }
        return total;
    }

    const FiniteBall& ball_;
    double lambda_;
    std::size_t leaf_begin_;
    Configuration spins_;
    std::vector<Group> groups_;
    std::uint64_t configurations_ = 0;
};

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

double unit_uniform(std::mt19937_64& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

}  // namespace

// ---------------------------------------------------------------------------

FiniteBall::FiniteBall(int k, int depth, RootDegree root) : k_(k), depth_(depth), root_(root) {
    if (k < 1) {
        throw DomainError("ball requires k >= 1");
    }
    if (depth < 0) {
        throw DomainError("ball depth must be non-negative");
    }
    const std::size_t kk = static_cast<std::size_t>(k);
    std::size_t width = 1;
    std::size_t total = 0;
    level_start_.push_back(0);
    for (int l = 0; l <= depth; ++l) {
        total += width;
        if (total > kMaxBallVertices) {
            throw SizeError("ball exceeds " + std::to_string(kMaxBallVertices) + " vertices");
        }
        level_start_.push_back(total);
        width = l == 0 ? (root == RootDegree::Full ? kk + 1 : kk) : width * kk;
    }
    parent_.assign(total, -1);
    level_.assign(total, 0);
    first_child_.assign(total, total);
    child_count_.assign(total, 0);
    for (int l = 0; l <= depth; ++l) {
        for (std::size_t v = level_start_[static_cast<std::size_t>(l)]; v < level_start_[static_cast<std::size_t>(l) + 1];
             ++v) {
            level_[v] = l;
        }
    }
    std::size_t next = 1;
    for (std::size_t v = 0; v < level_start_[static_cast<std::size_t>(depth)]; ++v) {
        const std::size_t n_children = (v == 0 && root == RootDegree::Full) ? kk + 1 : kk;
        first_child_[v] = next;
        child_count_[v] = n_children;
        for (std::size_t c = 0; c < n_children; ++c) {
            parent_[next + c] = static_cast<std::ptrdiff_t>(v);
        }
        next += n_children;
    }
}

std::size_t FiniteBall::level_begin(int level) const {
    if (level < 0 || level > depth_ + 1) {
        throw DomainError("level out of range");
    }
    return level_start_[static_cast<std::size_t>(level)];
}

FiniteBall FiniteBall::shrunk() const {
    if (depth_ == 0) {
        throw DomainError("cannot shrink a ball of depth 0");
    }
    return FiniteBall(k_, depth_ - 1, root_);
}

bool is_admissible(const FiniteBall& ball, std::span<const std::uint8_t> spins) {
    if (spins.size() != ball.vertex_count()) {
        return false;
    }
    for (std::size_t v = 0; v < spins.size(); ++v) {
        if (spins[v] > 1) {
            return false;
        }
        const auto p = ball.parent(v);
        if (p >= 0 && spins[v] == 1 && spins[static_cast<std::size_t>(p)] == 1) {
            return false;
        }
    }
    return true;
}

namespace detail {

void require_enumerable(const FiniteBall& ball) {
    if (ball.vertex_count() > kEnumerationCap) {
        throw SizeError("enumeration is capped at " + std::to_string(kEnumerationCap) + " vertices, ball has " +
                        std::to_string(ball.vertex_count()));
    }
}

void require_leaf_values(const FiniteBall& ball, std::span<const double> leaf_z) {
    if (leaf_z.size() != ball.leaf_count()) {
        throw DomainError("expected " + std::to_string(ball.leaf_count()) + " boundary values, got " +
                          std::to_string(leaf_z.size()));
    }
    for (double z : leaf_z) {
        if (!(z > 0.0) || !std::isfinite(z)) {
            throw DomainError("boundary values must be positive and finite");
        }
    }
}

}  // namespace detail

// ---------------------------------------------------------------------------

std::uint64_t count_admissible_enumerated(const FiniteBall& ball) {
    detail::require_enumerable(ball);
    const std::vector<double> ones(ball.leaf_count(), 1.0);
    Enumerator e(ball, 1.0, ones);
    e.partition();
    return e.configurations();
}

std::uint64_t count_admissible_dp(const FiniteBall& ball) {
    const std::size_t n = ball.vertex_count();
    std::vector<std::uint64_t> free_count(n, 1);
    std::vector<std::uint64_t> occupied_count(n, 1);
    for (std::size_t v = n; v-- > 0;) {
        const std::size_t first = ball.first_child(v);
        for (std::size_t c = first; c < first + ball.child_count(v); ++c) {
            free_count[v] = checked_mul(free_count[v], checked_add(free_count[c], occupied_count[c]));
            occupied_count[v] = checked_mul(occupied_count[v], free_count[c]);
        }
    }
    return checked_add(free_count[0], occupied_count[0]);
}

std::uint64_t count_admissible(const FiniteBall& ball) {
    const std::uint64_t dp = count_admissible_dp(ball);
    if (ball.vertex_count() <= kEnumerationCap) {
        const std::uint64_t enumerated = count_admissible_enumerated(ball);
        if (enumerated != dp) {
            throw ConsistencyError("enumerated count " + std::to_string(enumerated) + " differs from DP count " +
                                   std::to_string(dp));
        }
    }
    return dp;
}

double partition_function(const FiniteBall& ball, double lambda, std::span<const double> leaf_z) {
    require_lambda(lambda);
    detail::require_leaf_values(ball, leaf_z);
    const std::size_t n = ball.vertex_count();
    const std::size_t leaf_begin = ball.level_begin(ball.depth());
    // free_w[v]: subtree weight with v empty; occ_w[v]: with v occupied.
    std::vector<double> free_w(n, 1.0);
    std::vector<double> occ_w(n, lambda);
    for (std::size_t v = leaf_begin; v < n; ++v) {
        occ_w[v] = lambda * leaf_z[v - leaf_begin];
    }
    for (std::size_t v = leaf_begin; v-- > 0;) {
        const std::size_t first = ball.first_child(v);
        for (std::size_t c = first; c < first + ball.child_count(v); ++c) {
            free_w[v] *= free_w[c] + occ_w[c];
            occ_w[v] *= free_w[c];
        }
    }
    return free_w[0] + occ_w[0];
}

double partition_function(const FiniteBall& ball, double lambda, double uniform_leaf_z) {
    const std::vector<double> z(ball.leaf_count(), uniform_leaf_z);
    return partition_function(ball, lambda, z);
}

double partition_function_enumerated(const FiniteBall& ball, double lambda, std::span<const double> leaf_z) {
    require_lambda(lambda);
    detail::require_enumerable(ball);
    detail::require_leaf_values(ball, leaf_z);
    Enumerator e(ball, lambda, leaf_z);
    return e.partition();
}

double root_marginal(const FiniteBall& ball, double lambda, std::span<const double> leaf_z) {
    require_lambda(lambda);
    detail::require_leaf_values(ball, leaf_z);
    const std::size_t n = ball.vertex_count();
    const std::size_t leaf_begin = ball.level_begin(ball.depth());
    // ratio[v] = (weight with v occupied) / (weight with v empty)
    std::vector<double> ratio(n, lambda);
    for (std::size_t v = leaf_begin; v < n; ++v) {
        ratio[v] = lambda * leaf_z[v - leaf_begin];
    }
    for (std::size_t v = leaf_begin; v-- > 0;) {
        const std::size_t first = ball.first_child(v);
        for (std::size_t c = first; c < first + ball.child_count(v); ++c) {
            ratio[v] /= 1.0 + ratio[c];
        }
    }
    return ratio[0] / (1.0 + ratio[0]);
}

double root_marginal(const FiniteBall& ball, double lambda, double uniform_leaf_z) {
    const std::vector<double> z(ball.leaf_count(), uniform_leaf_z);
    return root_marginal(ball, lambda, z);
}

// ---------------------------------------------------------------------------

std::vector<double> propagate_assignment(const FiniteBall& ball, double lambda, std::span<const double> leaf_z) {
    require_lambda(lambda);
    detail::require_leaf_values(ball, leaf_z);
    const std::size_t leaf_begin = ball.level_begin(ball.depth());
    std::vector<double> z(ball.vertex_count(), 1.0);
    std::copy(leaf_z.begin(), leaf_z.end(), z.begin() + static_cast<std::ptrdiff_t>(leaf_begin));
    for (std::size_t v = leaf_begin; v-- > 0;) {
        const std::size_t first = ball.first_child(v);
        for (std::size_t c = first; c < first + ball.child_count(v); ++c) {
            z[v] /= 1.0 + lambda * z[c];
        }
    }
    return z;
}

std::vector<double> uniform_assignment(const FiniteBall& ball, double lambda, double z) {
    const std::vector<double> leaves(ball.leaf_count(), z);
    return propagate_assignment(ball, lambda, leaves);
}

std::vector<double> periodic_assignment(const FiniteBall& ball, double lambda, double z_even, double z_odd) {
    const std::vector<double> leaves(ball.leaf_count(), ball.depth() % 2 == 0 ? z_even : z_odd);
    return propagate_assignment(ball, lambda, leaves);
}

std::vector<double> boundary_values(const FiniteBall& ball, std::span<const double> assignment) {
    if (assignment.size() != ball.vertex_count()) {
        throw DomainError("assignment must have one value per vertex");
    }
    const auto first = assignment.begin() + static_cast<std::ptrdiff_t>(ball.level_begin(ball.depth()));
    return {first, assignment.end()};
}

double consistency_check(const FiniteBall& ball, double lambda, std::span<const double> assignment) {
    require_lambda(lambda);
    detail::require_enumerable(ball);
    if (ball.depth() < 1) {
        throw DomainError("consistency check needs depth >= 1");
    }
    const FiniteBall inner = ball.shrunk();
    const std::vector<double> outer_leaves = boundary_values(ball, assignment);
    detail::require_leaf_values(ball, outer_leaves);
    const std::size_t inner_leaf_begin = inner.level_begin(inner.depth());
    const std::span<const double> inner_leaves = assignment.subspan(inner_leaf_begin, inner.leaf_count());
    detail::require_leaf_values(inner, inner_leaves);

    Enumerator outer(ball, lambda, outer_leaves);
    std::vector<double> outer_weight;
    std::vector<double> inner_weight;
    // Unit boundary weights on the inner ball leave lambda^{#sigma}; the inner-level z
    // factors are applied separately.
    const std::vector<double> ones(inner.leaf_count(), 1.0);
    for_each_configuration(inner, lambda, ones, [&](std::span<const std::uint8_t> sigma, double lambda_power) {
        outer_weight.push_back(lambda_power * outer.extensions(sigma));
        double w = lambda_power;
        for (std::size_t v = inner_leaf_begin; v < sigma.size(); ++v) {
            if (sigma[v] == 1) {
                w *= inner_leaves[v - inner_leaf_begin];
            }
        }
        inner_weight.push_back(w);
    });

    double z_outer = 0.0;
    double z_inner = 0.0;
    for (std::size_t j = 0; j < outer_weight.size(); ++j) {
        z_outer += outer_weight[j];
        z_inner += inner_weight[j];
    }
    double worst = 0.0;
    for (std::size_t j = 0; j < outer_weight.size(); ++j) {
        worst = std::max(worst, std::abs(outer_weight[j] / z_outer - inner_weight[j] / z_inner));
    }
    return worst;
}

TransitionMatrix2 conditional_matrix(const FiniteBall& ball, double lambda, std::span<const double> assignment,
                                     std::size_t ancestor, std::size_t descendant) {
    require_lambda(lambda);
    if (ancestor >= ball.vertex_count() || descendant >= ball.vertex_count()) {
        throw DomainError("vertex index out of range");
    }
    const std::vector<double> leaves = boundary_values(ball, assignment);
    std::array<std::array<double, 2>, 2> joint{};
    for_each_configuration(ball, lambda, leaves, [&](std::span<const std::uint8_t> sigma, double w) {
        joint[sigma[ancestor]][sigma[descendant]] += w;
    });
    TransitionMatrix2 m;
    const double row0 = joint[0][0] + joint[0][1];
    const double row1 = joint[1][0] + joint[1][1];
    if (!(row0 > 0.0) || !(row1 > 0.0)) {
        throw DomainError("conditioning event has probability zero");
    }
    m.p00 = joint[0][0] / row0;
    m.p01 = joint[0][1] / row0;
    m.p10 = joint[1][0] / row1;
    m.p11 = joint[1][1] / row1;
    return m;
}

std::array<double, 2> conditional_child_distribution(const FiniteBall& ball, double lambda,
                                                     std::span<const double> assignment, int parent_spin, int steps) {
    if (ball.depth() < 2) {
        throw DomainError("conditional distribution needs depth >= 2");
    }
    if (parent_spin != 0 && parent_spin != 1) {
        throw DomainError("parent spin must be 0 or 1");
    }
    if (steps < 1 || steps > ball.depth()) {
        throw DomainError("steps must be in [1, depth]");
    }
    std::size_t v = 0;
    for (int s = 0; s < steps; ++s) {
        v = ball.first_child(v);
    }
    const TransitionMatrix2 m = conditional_matrix(ball, lambda, assignment, 0, v);
    return parent_spin == 0 ? std::array<double, 2>{m.p00, m.p01} : std::array<double, 2>{m.p10, m.p11};
}

// ---------------------------------------------------------------------------

ChainSamples sample_tree_chain(const ModelParams& params, double z1, double z2, int depth, std::size_t count,
                               std::uint64_t seed) {
    if (depth < 1) {
        throw DomainError("sampler depth must be >= 1");
    }
    if (count < 1) {
        throw DomainError("sample count must be >= 1");
    }
    const TransitionMatrix2 odd_step = single_step_matrix(params, z1);
    const TransitionMatrix2 even_step = single_step_matrix(params, z2);
    const TransitionMatrix2 two_step = odd_step * even_step;
    const double root_occupied = two_step.p01 / (two_step.p01 + two_step.p10);

    ChainSamples out{FiniteBall(params.k(), depth, RootDegree::Half), {}, {}};
    std::ostringstream gen;
    gen << "std::mt19937_64; sample j seeded with splitmix64(" << seed << " + (j+1)*0x9E3779B97F4A7C15)";
    out.generator = gen.str();
    out.samples.reserve(count);
    const FiniteBall& ball = out.ball;
    for (std::size_t j = 0; j < count; ++j) {
        std::mt19937_64 eng(splitmix64(seed + (j + 1) * 0x9E3779B97F4A7C15ULL));
        Configuration spins(ball.vertex_count(), 0);
        spins[0] = unit_uniform(eng) < root_occupied ? 1 : 0;
        for (std::size_t v = 1; v < spins.size(); ++v) {
            const auto p = static_cast<std::size_t>(ball.parent(v));
            if (spins[p] == 1) {
                continue;
            }
            const TransitionMatrix2& step = ball.level(v) % 2 == 1 ? odd_step : even_step;
            spins[v] = unit_uniform(eng) < step.p01 ? 1 : 0;
        }
        out.samples.push_back(std::move(spins));
    }
    return out;
}

}  // namespace hctree::oracle
