#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <ougrad/estimators.hpp>

#include "zoo.hpp"

using namespace ougrad;
using Catch::Approx;

TEST_CASE("semigroup estimate against the gaussian closed form", "[estimators][statistical]") {
    // P_t cos(x) = e^{-t} cos(x) for Q = 1 (variance 2t)
    const LevyModel m = zoo::pure_gaussian();
    const TestFunction f = TestFunction::cos_wave({1.0});
    const double t = 0.8;
    const ScalarEstimate e = estimate_Pt(m, f, {0.4}, t, 40000, {101, 0});
    REQUIRE(std::fabs(e.value - std::exp(-t) * std::cos(0.4)) <= 3.0 * e.std_error);
    REQUIRE(e.n == 40000);
}

TEST_CASE("thread count does not change the estimate", "[estimators]") {
    const LevyModel m = zoo::catalog_floor();
    const TestFunction f = TestFunction::sin_wave({1.0});
    const ScalarEstimate a = estimate_Pt(m, f, {0.2}, 0.5, 12288, {7, 3}, 1);
    const ScalarEstimate b = estimate_Pt(m, f, {0.2}, 0.5, 12288, {7, 3}, 4);
    REQUIRE(a.value == b.value);
    REQUIRE(a.std_error == b.std_error);
    // partial trailing block is also deterministic
    const ScalarEstimate c = estimate_Pt(m, f, {0.2}, 0.5, 5000, {7, 3}, 1);
    const ScalarEstimate d = estimate_Pt(m, f, {0.2}, 0.5, 5000, {7, 3}, 3);
    REQUIRE(c.value == d.value);
}

TEST_CASE("restricted semigroup against the compound poisson closed form",
          "[estimators][statistical]") {
    // pure CP with unit-mass standard normal jumps, t = 1:
    // E[cos(L_1) 1{N >= 1}] = e^{e^{-1/2} - 1} - e^{-1}
    const LevyModel m = zoo::gaussian_floor();
    const TestFunction f = TestFunction::cos_wave({1.0});
    const ScalarEstimate e = estimate_Pt1(m, f, {0.0}, 1.0, 100000, {55, 0});
    const double exact = 0.30683256256445733;
    REQUIRE(std::fabs(e.value - exact) <= 3.0 * e.std_error);
    REQUIRE(e.std_error < 0.01);

    REQUIRE_THROWS_AS(estimate_Pt1(zoo::pure_gaussian(), f, {0.0}, 1.0, 1000, {1, 0}),
                      std::domain_error);
}

TEST_CASE("derivative formula against the closed form", "[estimators][statistical]") {
    // d/dx E[sin(x + L_1) 1{N >= 1}] at 0 equals E[cos(L_1) 1{N >= 1}]
    const LevyModel m = zoo::gaussian_floor();
    const TestFunction f = TestFunction::sin_wave({1.0});
    const GradientEstimate g = derivative_formula(m, f, {0.0}, 1.0, 100000, {56, 0});
    const double exact = 0.30683256256445733;
    REQUIRE(std::fabs(g.value[0] - exact) <= 3.0 * g.std_error[0]);
    REQUIRE(g.std_error[0] < 0.01);

    REQUIRE_THROWS_AS(derivative_formula(zoo::pure_gaussian(), f, {0.0}, 1.0, 1000, {1, 0}),
                      std::domain_error);
}

TEST_CASE("finite differences with common random numbers", "[estimators][statistical]") {
    // d/dx P_t sin(x) at 0 = e^{-t} for the pure Gaussian model
    const LevyModel m = zoo::pure_gaussian();
    const TestFunction f = TestFunction::sin_wave({1.0});
    const double t = 0.6;
    const ScalarEstimate d =
        finite_difference(m, f, {0.0}, t, 20000, 1e-3, {1.0}, {77, 0});
    REQUIRE(std::fabs(d.value - std::exp(-t)) <= 3.5 * d.std_error);
    // CRN keeps the difference quotient's noise at O(1), far below 1/h
    REQUIRE(d.std_error < 0.02);

    const GradientEstimate g = finite_difference_gradient(m, f, {0.0}, t, 20000, 1e-3, {77, 0});
    REQUIRE(std::fabs(g.value[0] - std::exp(-t)) <= 3.5 * g.std_error[0]);

    REQUIRE_THROWS_AS(finite_difference(m, f, {0.0}, t, 1000, 0.0, {1.0}, {1, 0}),
                      std::domain_error);
    REQUIRE_THROWS_AS(
        finite_difference(m, f, {0.0}, t, 1000, 1e-3, {1.0}, {1, 0}, /*jump_restricted=*/true),
        std::domain_error);
}

TEST_CASE("derivative formula agrees with restricted finite differences",
          "[estimators][statistical]") {
    const LevyModel m = zoo::gaussian_floor();
    const TestFunction f = TestFunction::sin_wave({1.0});
    const double t = 0.75;
    const GradientEstimate a = derivative_formula(m, f, {0.3}, t, 40000, {91, 0});
    const GradientEstimate b =
        finite_difference_gradient(m, f, {0.3}, t, 40000, 1e-3, {91, 1 << 21}, true);
    const double se = std::sqrt(a.std_error[0] * a.std_error[0] + b.std_error[0] * b.std_error[0]);
    REQUIRE(std::fabs(a.value[0] - b.value[0]) <= 3.0 * se);
}

TEST_CASE("random shift identity", "[estimators][statistical]") {
    const JumpDensity rho = JumpDensity::gaussian(1, 1.0, 1.0);

    // F = 1: lhs is P(N >= 1) = 1 - e^{-lambda0 t} exactly
    const PathFunctional one = [](const Vec&, long) { return 1.0; };
    const ShiftCheckReport r1 = random_shift_check(rho, 1.0, one, 40000, {31, 0});
    REQUIRE(r1.pass);
    REQUIRE(std::fabs(r1.lhs.value - (1.0 - std::exp(-1.0))) <= 3.5 * r1.lhs.std_error);
    REQUIRE(std::fabs(r1.rhs.value - (1.0 - std::exp(-1.0))) <= 3.5 * r1.rhs.std_error);

    // F = sin of the path endpoint
    const PathFunctional fsin = [](const Vec& z, long) { return std::sin(z[0]); };
    REQUIRE(random_shift_check(rho, 1.0, fsin, 40000, {32, 0}).pass);

    // F = parity indicator; lhs closed form e^{-lam}(cosh lam - 1)
    const PathFunctional even = [](const Vec&, long n) { return n % 2 == 0 ? 1.0 : 0.0; };
    const ShiftCheckReport r3 = random_shift_check(rho, 1.0, even, 40000, {33, 0});
    REQUIRE(r3.pass);
    REQUIRE(std::fabs(r3.lhs.value - 0.19978820044686402) <= 3.5 * r3.lhs.std_error);

    // unbounded functionals are rejected
    const PathFunctional huge = [](const Vec&, long) { return 1e7; };
    REQUIRE_THROWS_AS(random_shift_check(rho, 1.0, huge, 1000, {34, 0}), std::domain_error);
}

TEST_CASE("floor decomposition identity", "[estimators][statistical]") {
    // base model: Gaussian part + catalog lower bound (lambda0 = 3), t with
    // lambda0 t = 0.5
    const LevyModel base = zoo::catalog_base();
    const TestFunction f = TestFunction::cos_wave({1.0});
    const DecompositionReport rep =
        decomposition_check(base, f, {0.1}, 0.5 / 3.0, 10000, {21, 0});
    REQUIRE(rep.inner_samples == 100);
    REQUIRE_FALSE(rep.inconclusive);
    REQUIRE(rep.agree);
    REQUIRE(std::fabs(rep.lhs.value - rep.rhs.value) <= 3.0 * rep.combined_std_error);

    REQUIRE_THROWS_AS(decomposition_check(zoo::pure_gaussian(), f, {0.0}, 0.5, 1000, {1, 0}),
                      std::domain_error);
}
