#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>

#include <ougrad/model.hpp>

#include "zoo.hpp"

using namespace ougrad;
using Catch::Approx;

TEST_CASE("model accessors and guards", "[model]") {
    const LevyModel m = zoo::pure_gaussian();
    REQUIRE(m.dim() == 1);
    REQUIRE(m.A_is_zero());
    REQUIRE(m.has_gaussian_part());
    REQUIRE_FALSE(m.has_floor());
    REQUIRE(m.theta() == 0.0);
    REQUIRE_FALSE(std::signbit(m.theta()));
    REQUIRE_THROWS_AS(m.floor_density(), std::domain_error);

    const LevyModel ou = zoo::ou_floor_2d();
    REQUIRE(ou.theta() == Approx(1.0).epsilon(1e-12));
    REQUIRE(ou.theta_plus() == Approx(1.0));
    REQUIRE(ou.theta_minus() == 0.0);
    REQUIRE(ou.A_norm() == Approx(1.0).epsilon(1e-12));
    REQUIRE(ou.has_floor());

    const LevyModel exp2 = zoo::ou_floor_2d(+1.0);
    REQUIRE(exp2.theta() == Approx(-1.0).epsilon(1e-12));
    REQUIRE(exp2.theta_minus() == Approx(1.0));

    // dimension mismatch and asymmetric Q are rejected
    REQUIRE_THROWS_AS(LevyModel(Mat(2, 2), Vec(1, 0.0), Mat(2, 2), {}), std::domain_error);
    Mat bad_q(2, 2, {1.0, 0.5, 0.0, 1.0});
    REQUIRE_THROWS_AS(LevyModel(Mat(2, 2), Vec(2, 0.0), bad_q, {}), std::domain_error);
}

TEST_CASE("levy symbol closed forms", "[model]") {
    // pure Gaussian with drift: eta(u) = i b u - u^2
    Mat q(1, 1, {1.0});
    const LevyModel g(Mat(1, 1), Vec(1, 2.0), q, {});
    const std::complex<double> e = symbol_eta(g, {3.0});
    REQUIRE(e.real() == Approx(-9.0).epsilon(1e-12));
    REQUIRE(e.imag() == Approx(6.0).epsilon(1e-12));

    // stable kinds: eta(u) = -|u|^alpha
    REQUIRE(symbol_eta(zoo::cauchy(), {2.0}).real() == Approx(-2.0).epsilon(1e-8));
    REQUIRE(symbol_eta(zoo::cauchy(), {2.0}).imag() == Approx(0.0).margin(1e-12));
    REQUIRE(symbol_eta(zoo::stable15(), {2.0}).real() ==
            Approx(-std::pow(2.0, 1.5)).epsilon(1e-8));

    // unit-mass Gaussian jumps: eta(u) = e^{-u^2/2} - 1
    const double u = 1.3;
    REQUIRE(symbol_eta(zoo::gaussian_floor(), {u}).real() ==
            Approx(std::exp(-u * u / 2.0) - 1.0).epsilon(1e-8));
}

TEST_CASE("integrated symbol", "[model]") {
    // A = 0 short-circuits to t eta(z)
    const LevyModel g = zoo::pure_gaussian();
    const std::complex<double> i1 = integrated_symbol(g, 0.7, {1.5});
    REQUIRE(i1.real() == Approx(0.7 * -2.25).epsilon(1e-12));

    // A = -1: int_0^t eta(e^{-s} z) ds = -z^2 (1 - e^{-2t}) / 2
    Mat a(1, 1, {-1.0});
    Mat q(1, 1, {1.0});
    const LevyModel ou(a, Vec(1, 0.0), q, {});
    const double t = 0.9, z = 1.5;
    const std::complex<double> i2 = integrated_symbol(ou, t, {z});
    REQUIRE(i2.real() == Approx(-z * z * (1.0 - std::exp(-2.0 * t)) / 2.0).epsilon(1e-9));
    REQUIRE(i2.imag() == Approx(0.0).margin(1e-12));
}

TEST_CASE("bound constants c0 and lambda0", "[model]") {
    LowerBoundSpec spec{BernsteinFunction::power(1.0), 1.0};
    const OUConstants flat = constants_c0_lambda0(spec, 0.0, 1);
    REQUIRE(flat.c0 == Approx(0.47962348400112945).epsilon(1e-10));
    REQUIRE(flat.lambda0 == Approx(3.0).epsilon(1e-10));

    REQUIRE(constants_c0_lambda0(spec, 0.0, 2).c0 == Approx(0.7613036996601983).epsilon(1e-10));
    REQUIRE(constants_c0_lambda0(spec, 0.0, 3).c0 == Approx(1.02142886962083).epsilon(1e-10));
    REQUIRE(constants_c0_lambda0(spec, 1.0, 1).c0 == Approx(0.06728721130107498).epsilon(1e-10));
}

TEST_CASE("floor component consistency guard", "[model]") {
    // a floor_cp must match the model's lower_bound data
    LowerBoundSpec spec{BernsteinFunction::power(1.0), 1.0};
    LowerBoundSpec other{BernsteinFunction::power(0.5), 1.0};
    Mat q(1, 1, {1.0});
    REQUIRE_NOTHROW(LevyModel(Mat(1, 1), Vec(1, 0.0), q, {JumpComponent::floor_cp(spec, 1)}, spec));
    REQUIRE_THROWS_AS(
        LevyModel(Mat(1, 1), Vec(1, 0.0), q, {JumpComponent::floor_cp(other, 1)}, spec),
        std::domain_error);

    // at most one floor component
    auto f1 = JumpComponent::finite_density(JumpDensity::gaussian(1, 1.0), true);
    auto f2 = JumpComponent::finite_density(JumpDensity::gaussian(1, 2.0), true);
    REQUIRE_THROWS_AS(LevyModel(Mat(1, 1), Vec(1, 0.0), Mat(1, 1), {f1, f2}), std::domain_error);
}
