#include <cmath>
#include <limits>

#include "doctest.h"
#include "hctree/core.hpp"
#include "support/reference_values.hpp"

using namespace hctree;

TEST_SUITE("core") {

TEST_CASE("model parameters are validated") {
    CHECK_NOTHROW(ModelParams(2, 1.0));
    CHECK_NOTHROW(ModelParams(1, 1e-8));
    CHECK_THROWS_AS(ModelParams(0, 1.0), DomainError);
    CHECK_THROWS_AS(ModelParams(-3, 1.0), DomainError);
    CHECK_THROWS_AS(ModelParams(2, 0.0), DomainError);
    CHECK_THROWS_AS(ModelParams(2, -1.0), DomainError);
    CHECK_THROWS_AS(ModelParams(2, std::numeric_limits<double>::quiet_NaN()), DomainError);
    CHECK_THROWS_AS(ModelParams(2, std::numeric_limits<double>::infinity()), DomainError);
}

TEST_CASE("invariant set names round-trip") {
    for (auto s : {InvariantSet::I1, InvariantSet::I2, InvariantSet::I3, InvariantSet::I4}) {
        CHECK(parse_invariant_set(to_string(s)) == s);
    }
    CHECK(parse_invariant_set("4") == InvariantSet::I4);
    CHECK_THROWS_AS(parse_invariant_set("I5"), DomainError);
    CHECK_THROWS_AS(parse_invariant_set(""), DomainError);
}

TEST_CASE("two-periodic laws are stored in canonical order") {
    const auto a = BoundaryLaw::two_periodic(0.5, 0.1);
    const auto b = BoundaryLaw::two_periodic(0.1, 0.5);
    CHECK(a.values() == b.values());
    CHECK(a.values()[0] == 0.1);
    CHECK(a.swapped());
    CHECK_FALSE(b.swapped());
    CHECK(a.even_value() == 0.5);
    CHECK(a.odd_value() == 0.1);
    CHECK(b.even_value() == 0.1);
    CHECK(b.odd_value() == 0.5);
}

TEST_CASE("law factories reject invalid values") {
    CHECK_THROWS_AS(BoundaryLaw::translation_invariant(0.0), DomainError);
    CHECK_THROWS_AS(BoundaryLaw::translation_invariant(-1.0), DomainError);
    CHECK_THROWS_AS(BoundaryLaw::two_periodic(0.1, std::numeric_limits<double>::infinity()), DomainError);
    const auto w = BoundaryLaw::weak_periodic({0.1, 0.2, 0.1, 0.2}, InvariantSet::I2);
    CHECK(w.kind() == LawKind::WeakPeriodic);
    CHECK(w.invariant_set() == InvariantSet::I2);
    CHECK_THROWS_AS(w.even_value(), DomainError);
    CHECK_THROWS_AS(w.odd_value(), DomainError);
    const auto t = BoundaryLaw::translation_invariant(0.3);
    CHECK(t.even_value() == 0.3);
    CHECK(t.odd_value() == 0.3);
}

TEST_CASE("recursion map and derivative") {
    const ModelParams p(2, 1.0);
    CHECK(recursion_map(p, 0.0) == 1.0);
    CHECK(recursion_map(p, reference::kTiZ_k2_l1) == doctest::Approx(reference::kTiZ_k2_l1).epsilon(1e-15));
    CHECK(recursion_map(ModelParams(3, 2.0), 1.0) == doctest::Approx(1.0 / 27.0).epsilon(1e-15));

    for (double z : {0.01, 0.3, 2.0}) {
        const double h = 1e-6 * z;
        const double fd = (recursion_map(p, z + h) - recursion_map(p, z - h)) / (2 * h);
        CHECK(recursion_derivative(p, z) == doctest::Approx(fd).epsilon(1e-8));
    }
    CHECK(recursion_derivative(p, 0.0) == -2.0);
    CHECK_THROWS_AS(recursion_map(p, -0.1), DomainError);
    CHECK_THROWS_AS(recursion_derivative(p, std::numeric_limits<double>::quiet_NaN()), DomainError);
}

TEST_CASE("single-step matrix") {
    const ModelParams p(2, 5.0);
    const auto m = single_step_matrix(p, 0.2);
    CHECK(m.p01 == doctest::Approx(0.5));
    CHECK(m.p00 == doctest::Approx(0.5));
    CHECK(m.p10 == 1.0);
    CHECK(m.p11 == 0.0);
    CHECK(is_row_stochastic(m));
    CHECK(m.second_eigenvalue() == doctest::Approx(-0.5));
}

TEST_CASE("two-step matrix equals the product of single steps") {
    for (double lambda : {0.3, 5.0, 40.0}) {
        const ModelParams p(3, lambda);
        for (double z1 : {0.01, 0.4, 3.0}) {
            for (double z2 : {0.02, 0.9}) {
                const auto direct = two_step_matrix(p, z1, z2);
                const auto prod = single_step_matrix(p, z1) * single_step_matrix(p, z2);
                CHECK(direct.p00 == doctest::Approx(prod.p00).epsilon(1e-14));
                CHECK(direct.p01 == doctest::Approx(prod.p01).epsilon(1e-14));
                CHECK(direct.p10 == doctest::Approx(prod.p10).epsilon(1e-14));
                CHECK(direct.p11 == doctest::Approx(prod.p11).epsilon(1e-14));
                CHECK(is_row_stochastic(direct));
                const double kappa = lambda * lambda * z1 * z2 / ((1 + lambda * z1) * (1 + lambda * z2));
                CHECK(direct.determinant() == doctest::Approx(kappa).epsilon(1e-13));
            }
        }
    }
}

TEST_CASE("row-stochastic predicate") {
    CHECK(is_row_stochastic({0.25, 0.75, 1.0, 0.0}));
    CHECK_FALSE(is_row_stochastic({0.25, 0.7, 1.0, 0.0}));
    CHECK_FALSE(is_row_stochastic({-0.1, 1.1, 1.0, 0.0}));
    CHECK(is_row_stochastic({0.25, 0.7, 1.0, 0.0}, 0.1));
}

TEST_CASE("solve report accessors") {
    SolveReport r;
    CHECK(r.max_residual() == 0.0);
    r.solutions = {BoundaryLaw::translation_invariant(0.2), BoundaryLaw::two_periodic(0.1, 0.5),
                   BoundaryLaw::two_periodic(0.5, 0.1)};
    r.residuals = {1e-17, 3e-16, 2e-16};
    CHECK(r.count(LawKind::TwoPeriodic) == 2);
    CHECK(r.count(LawKind::WeakPeriodic) == 0);
    CHECK(r.non_translation_invariant() == 2);
    CHECK(r.max_residual() == 3e-16);
}


TEST_CASE("worked examples for the recursion and the matrices") {
    CHECK(recursion_map(ModelParams(2, 4.0), 0.25) == 0.25);
    CHECK(recursion_map(ModelParams(3, 27.0 / 16.0), 1.0 / 3.0) == doctest::Approx(0.262144).epsilon(1e-15));
    CHECK(recursion_derivative(ModelParams(2, 4.0), 0.25) == doctest::Approx(-1.0).epsilon(1e-15));
    CHECK(recursion_derivative(ModelParams(1, 1.0), 0.0) == -1.0);
    CHECK(recursion_derivative(ModelParams(3, 2.0), 1e8) < 0.0);
    CHECK(recursion_derivative(ModelParams(3, 2.0), 1e8) > -1e-20);

    const auto m = single_step_matrix(ModelParams(2, 4.0), 0.25);
    CHECK(m.p00 == 0.5);
    CHECK(m.p01 == 0.5);
    const auto tiny = single_step_matrix(ModelParams(2, 1e-12), 0.7);
    CHECK(tiny.p00 == doctest::Approx(1.0));
    CHECK(tiny.p01 < 1e-11);
    const auto sym = single_step_matrix(ModelParams(2, 1.0), 1.0);
    CHECK(sym.p00 == 0.5);
    CHECK(sym.p01 == 0.5);

    const ModelParams p5(2, 5.0);
    const double z = 0.2232686597248423;
    const auto sq = single_step_matrix(p5, z) * single_step_matrix(p5, z);
    const auto two = two_step_matrix(p5, z, z);
    CHECK(two.p00 == doctest::Approx(sq.p00).epsilon(1e-15));
    CHECK(two.p11 == doctest::Approx(sq.p11).epsilon(1e-15));
    const double z1 = std::pow((5 + std::sqrt(5.0)) / 10, 2);
    const double z2 = std::pow((5 - std::sqrt(5.0)) / 10, 2);
    CHECK(two_step_matrix(p5, z1, z2).determinant() == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(two_step_matrix(ModelParams(2, 4.0), 0.25, 0.25).p11 == doctest::Approx(0.5));
    CHECK((single_step_matrix(ModelParams(2, 4.0), 0.25) * single_step_matrix(ModelParams(2, 4.0), 0.25)).p11 ==
          doctest::Approx(0.5));
}

}
