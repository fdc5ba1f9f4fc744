#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "hctree/oracle.hpp"
#include "hctree/solvers.hpp"

using namespace hctree;
using namespace hctree::oracle;

namespace {

// Sums over all 2^N bit patterns, independent of the library's enumerators.
struct BruteForce {
    double z = 0.0;
    double root_occupied = 0.0;
    std::uint64_t count = 0;
};

BruteForce brute_force(const FiniteBall& ball, double lambda, const std::vector<double>& leaf_z) {
    const std::size_t n = ball.vertex_count();
    const std::size_t leaf_begin = ball.level_begin(ball.depth());
    BruteForce out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
        bool ok = true;
        double w = 1.0;
        for (std::size_t v = 0; v < n && ok; ++v) {
            if (!((mask >> v) & 1)) continue;
            const auto p = ball.parent(v);
            if (p >= 0 && ((mask >> p) & 1)) ok = false;
            w *= lambda;
            if (v >= leaf_begin) w *= leaf_z[v - leaf_begin];
        }
        if (!ok) continue;
        ++out.count;
        out.z += w;
        if (mask & 1) out.root_occupied += w;
    }
    out.root_occupied /= out.z;
    return out;
}

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("ball geometry") {
    const FiniteBall half(2, 3);
    CHECK(half.vertex_count() == 15);
    CHECK(half.leaf_count() == 8);
    CHECK(half.level_begin(3) == 7);
    CHECK(half.level_end(3) == 15);
    CHECK(half.parent(0) == -1);
    CHECK(half.parent(14) == 6);
    CHECK(half.child_count(0) == 2);
    CHECK(half.first_child(1) == 3);

    const FiniteBall full(3, 2, RootDegree::Full);
    CHECK(full.vertex_count() == 1 + 4 + 12);
    CHECK(full.child_count(0) == 4);
    CHECK(full.child_count(1) == 3);
    CHECK(full.shrunk().vertex_count() == 5);

    CHECK(FiniteBall(3, 0).vertex_count() == 1);
    CHECK_THROWS_AS(FiniteBall(3, 0).shrunk(), DomainError);
    CHECK_THROWS_AS(FiniteBall(0, 2), DomainError);
    CHECK_THROWS_AS(FiniteBall(2, -1), DomainError);
    CHECK_THROWS_AS(FiniteBall(2, 200), SizeError);
}

TEST_CASE("admissibility") {
    const FiniteBall b(2, 1);
    CHECK(is_admissible(b, Configuration{0, 1, 1}));
    CHECK(is_admissible(b, Configuration{1, 0, 0}));
    CHECK_FALSE(is_admissible(b, Configuration{1, 1, 0}));
    CHECK_FALSE(is_admissible(b, Configuration{0, 2, 0}));
    CHECK_FALSE(is_admissible(b, Configuration{0, 0}));
}

TEST_CASE("configuration counts") {
    CHECK(count_admissible(FiniteBall(2, 1)) == 5);
    CHECK(count_admissible(FiniteBall(1, 3)) == 8);  // path on 4 vertices: Fibonacci
    for (int k : {2, 3}) {
        for (auto root : {RootDegree::Half, RootDegree::Full}) {
            for (int depth = 0; depth <= 2; ++depth) {
                const FiniteBall b(k, depth, root);
                if (b.vertex_count() > 20) continue;
                const std::vector<double> ones(b.leaf_count(), 1.0);
                const auto bf = brute_force(b, 1.0, ones);
                CHECK(count_admissible_enumerated(b) == bf.count);
                CHECK(count_admissible_dp(b) == bf.count);
            }
        }
    }
    CHECK(count_admissible(FiniteBall(2, 5)) == count_admissible_dp(FiniteBall(2, 5)));
    CHECK_THROWS_AS(count_admissible_dp(FiniteBall(2, 7)), std::overflow_error);
    CHECK_THROWS_AS(count_admissible_enumerated(FiniteBall(2, 5)), SizeError);
}

TEST_CASE("partition function and root marginal against brute force") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    for (int k : {1, 2, 3}) {
        for (int depth = 1; depth <= 3; ++depth) {
            const FiniteBall b(k, depth);
            if (b.vertex_count() > 20) continue;
            std::vector<double> leaves(b.leaf_count());
            for (double& v : leaves) v = u(rng);
            const double lambda = u(rng);
            const auto bf = brute_force(b, lambda, leaves);
            CHECK(partition_function(b, lambda, leaves) == doctest::Approx(bf.z).epsilon(1e-13));
            CHECK(partition_function_enumerated(b, lambda, leaves) == doctest::Approx(bf.z).epsilon(1e-13));
            CHECK(root_marginal(b, lambda, leaves) == doctest::Approx(bf.root_occupied).epsilon(1e-13));
        }
    }
}

TEST_CASE("partition function input validation") {
    const FiniteBall b(2, 2);
    CHECK_THROWS_AS(partition_function(b, 1.0, std::vector<double>(3, 1.0)), DomainError);
    CHECK_THROWS_AS(partition_function(b, 1.0, std::vector<double>(4, -1.0)), DomainError);
    CHECK_THROWS_AS(partition_function(b, 0.0, 1.0), DomainError);
    CHECK(partition_function(b, 2.0, 1.0) == doctest::Approx(partition_function(b, 2.0, std::vector<double>(4, 1.0))));
}

TEST_CASE("propagated assignments follow the recursion") {
    const FiniteBall b(3, 2);
    const double lambda = 2.0;
    const auto a = uniform_assignment(b, lambda, 0.4);
    const double level1 = std::pow(1.0 + lambda * 0.4, -3);
    CHECK(a[1] == doctest::Approx(level1));
    CHECK(a[0] == doctest::Approx(std::pow(1.0 + lambda * level1, -3)));
    CHECK(boundary_values(b, a) == std::vector<double>(9, 0.4));

    const double z = solve_translation_invariant(ModelParams(3, lambda)).values()[0];
    for (double v : uniform_assignment(b, lambda, z)) CHECK(v == doctest::Approx(z).epsilon(1e-14));
}

TEST_CASE("consistency holds for fixed points and fails for a perturbation") {
    for (int k : {2, 3}) {
        const double lambda = k == 2 ? 5.0 : 2.0;
        const ModelParams p(k, lambda);
        for (auto root : {RootDegree::Half, RootDegree::Full}) {
            const FiniteBall b(k, 2, root);
            const double z = solve_translation_invariant(p).values()[0];
            CHECK(consistency_check(b, lambda, uniform_assignment(b, lambda, z)) < 1e-13);
            const auto rep = solve_two_periodic(p);
            REQUIRE(rep.solutions.size() == 3);
            const auto per = periodic_assignment(b, lambda, rep.solutions[1].even_value(), rep.solutions[1].odd_value());
            CHECK(consistency_check(b, lambda, per) < 1e-13);
            auto bad = uniform_assignment(b, lambda, z);
            for (double& v : bad) v += 0.1;
            CHECK(consistency_check(b, lambda, bad) > 1e-4);
        }
    }
    // Any propagated assignment is consistent, not only fixed points.
    const FiniteBall b(2, 3);
    CHECK(consistency_check(b, 1.5, uniform_assignment(b, 1.5, 0.9)) < 1e-13);
    CHECK_THROWS_AS(consistency_check(FiniteBall(2, 0), 1.0, std::vector<double>(1, 0.5)), DomainError);
}

TEST_CASE("conditional rows match the transition matrices") {
    const double lambda = 5.0;
    const ModelParams p(2, lambda);
    const FiniteBall b(2, 3);
    const auto [lo, hi] = solve_two_periodic_k2_closed(lambda);
    const auto a = periodic_assignment(b, lambda, lo, hi);
    const auto one = conditional_matrix(b, lambda, a, 0, b.first_child(0));
    const auto expected = single_step_matrix(p, hi);
    CHECK(one.p00 == doctest::Approx(expected.p00).epsilon(1e-12));
    CHECK(one.p01 == doctest::Approx(expected.p01).epsilon(1e-12));
    CHECK(one.p10 == doctest::Approx(1.0));
    const auto row = conditional_child_distribution(b, lambda, a, 0, 2);
    const auto two = two_step_matrix(p, hi, lo);
    CHECK(row[0] == doctest::Approx(two.p00).epsilon(1e-12));
    CHECK(row[1] == doctest::Approx(two.p01).epsilon(1e-12));
    CHECK_THROWS_AS(conditional_child_distribution(FiniteBall(2, 1), lambda, uniform_assignment(FiniteBall(2, 1), lambda, 0.2), 0),
                    DomainError);
    CHECK_THROWS_AS(conditional_child_distribution(b, lambda, a, 2), DomainError);
}

TEST_CASE("sampler is deterministic and admissible") {
    const ModelParams p(2, 5.0);
    const auto [lo, hi] = solve_two_periodic_k2_closed(5.0);
    const auto a = sample_tree_chain(p, hi, lo, 4, 500, 99);
    const auto b = sample_tree_chain(p, hi, lo, 4, 500, 99);
    const auto c = sample_tree_chain(p, hi, lo, 4, 500, 100);
    CHECK(a.samples == b.samples);
    CHECK(a.samples != c.samples);
    CHECK(a.generator == b.generator);
    for (const auto& s : a.samples) CHECK(is_admissible(a.ball, s));
    // The first sample does not depend on how many are drawn.
    CHECK(sample_tree_chain(p, hi, lo, 4, 1, 99).samples[0] == a.samples[0]);
    CHECK_THROWS_AS(sample_tree_chain(p, hi, lo, 0, 10, 1), DomainError);
    CHECK_THROWS_AS(sample_tree_chain(p, hi, lo, 3, 0, 1), DomainError);
}


TEST_CASE("worked examples") {
    CHECK(count_admissible(FiniteBall(2, 1, RootDegree::Full)) == 9);
    CHECK(count_admissible(FiniteBall(2, 0)) == 2);
    CHECK(count_admissible(FiniteBall(1, 2)) == 5);

    const double lambda = 1.7;
    const double z = 0.6;
    const FiniteBall star(2, 1, RootDegree::Full);
    const double zs = lambda + std::pow(1 + lambda * z, 3);
    CHECK(partition_function(star, lambda, z) == doctest::Approx(zs).epsilon(1e-15));
    CHECK(partition_function_enumerated(star, lambda, std::vector<double>(3, z)) == doctest::Approx(zs).epsilon(1e-15));
    CHECK(root_marginal(star, lambda, z) == doctest::Approx(lambda / zs).epsilon(1e-15));
    CHECK(partition_function(star, 1e-14, z) == doctest::Approx(1.0));
    CHECK(root_marginal(star, 1e-14, z) < 1e-13);
    CHECK(partition_function(FiniteBall(3, 0), lambda, z) == doctest::Approx(1 + lambda * z).epsilon(1e-15));

    const ModelParams p(2, 5.0);
    const double zstar = solve_translation_invariant(p).values()[0];
    const FiniteBall b(2, 3);
    CHECK(root_marginal(b, 5.0, zstar) == doctest::Approx(5.0 * zstar / (1 + 5.0 * zstar)).epsilon(1e-12));
    CHECK(consistency_check(b, 5.0, uniform_assignment(b, 5.0, zstar)) < 1e-12);

    const auto row = conditional_child_distribution(b, 4.0, uniform_assignment(b, 4.0, 0.25), 0);
    CHECK(row[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(row[1] == doctest::Approx(0.5).epsilon(1e-12));
}

}
