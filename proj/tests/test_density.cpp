#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <ougrad/density.hpp>
#include <ougrad/rng.hpp>

using namespace ougrad;
using Catch::Approx;

namespace {

// two-sided KS statistic of sorted samples against a CDF
template <class Cdf>
double ks_statistic(std::vector<double> xs, Cdf cdf) {
    std::sort(xs.begin(), xs.end());
    const double n = static_cast<double>(xs.size());
    double d = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double c = cdf(xs[i]);
        d = std::max(d, std::fabs(c - static_cast<double>(i) / n));
        d = std::max(d, std::fabs(c - static_cast<double>(i + 1) / n));
    }
    return d;
}

}  // namespace

TEST_CASE("floor mass closed form", "[density]") {
    // S(r) = r, r0 = 1, d = 1: omega_1 [1/1 + int_0^inf e^{-2s} ds] = 2 * 3/2
    LowerBoundSpec spec{BernsteinFunction::power(1.0), 1.0};
    REQUIRE(floor_mass(spec, 1) == Approx(3.0).epsilon(1e-10));
    // r0 = inf carries no floor
    LowerBoundSpec open{BernsteinFunction::power(1.0)};
    REQUIRE_FALSE(open.has_floor());
    REQUIRE(floor_mass(open, 1) == 0.0);
}

TEST_CASE("gaussian density values and gradients", "[density]") {
    const double m = 2.5;
    const JumpDensity rho = JumpDensity::gaussian(1, 1.0, m);
    REQUIRE(rho.mass() == Approx(m).epsilon(1e-12));
    const Vec z{0.7};
    REQUIRE(rho.value(z) ==
            Approx(m * std::exp(-0.245) / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-12));
    REQUIRE(rho.grad_log(z)[0] == Approx(-0.7).epsilon(1e-12));
    REQUIRE(rho.grad(z)[0] == Approx(-0.7 * rho.value(z)).epsilon(1e-12));

    // int |rho'| = 2 m phi(0)
    const GradIntegralReport g = rho.grad_abs_integral();
    REQUIRE(g.finite);
    REQUIRE(g.value == Approx(2.0 * m / std::sqrt(2.0 * std::numbers::pi)).epsilon(1e-8));
    REQUIRE(g.mollified >= g.value - 1e-12);
}

TEST_CASE("floor density profile", "[density]") {
    LowerBoundSpec spec{BernsteinFunction::power(1.0), 1.0};
    const JumpDensity rho = JumpDensity::floor_density(spec, 1);
    REQUIRE(rho.mass() == Approx(3.0).epsilon(1e-8));
    // plateau S(1) = 1 inside r0, |z|^{-3} outside
    REQUIRE(rho.value({0.5}) == Approx(1.0).epsilon(1e-12));
    REQUIRE(rho.value({2.0}) == Approx(0.125).epsilon(1e-6));
    // gradient integral: 2 int_1^inf 3 r^{-4} dr = 2
    const GradIntegralReport g = rho.grad_abs_integral();
    REQUIRE(g.finite);
    REQUIRE(g.value == Approx(2.0).epsilon(1e-4));

    // mass split at the plateau edge: 2 of 3 inside [-1, 1]
    REQUIRE(rho.radial_cdf(1.0) == Approx(2.0 / 3.0).epsilon(1e-8));
    REQUIRE(rho.radial_cdf(0.5) == Approx(1.0 / 3.0).epsilon(1e-8));
}

TEST_CASE("gaussian radial cdf", "[density]") {
    const JumpDensity rho = JumpDensity::gaussian(1, 1.0);
    REQUIRE(rho.radial_cdf(1.0) == Approx(std::erf(1.0 / std::sqrt(2.0))).epsilon(1e-8));
}

TEST_CASE("sampling matches the radial cdf", "[density][statistical]") {
    const long n = 20000;
    const double ks_crit = 1.63 / std::sqrt(static_cast<double>(n));  // 1% level

    LowerBoundSpec spec{BernsteinFunction::power(1.0), 1.0};
    const JumpDensity floor = JumpDensity::floor_density(spec, 1);
    RngStream rng(20240831, 0);
    std::vector<double> radii;
    radii.reserve(n);
    for (long i = 0; i < n; ++i) radii.push_back(std::fabs(floor.sample(rng)[0]));
    REQUIRE(ks_statistic(radii, [&](double r) { return floor.radial_cdf(r); }) < ks_crit);

    const JumpDensity gauss = JumpDensity::gaussian(2, 1.5, 4.0);
    radii.clear();
    for (long i = 0; i < n; ++i) {
        const Vec z = gauss.sample(rng);
        radii.push_back(std::sqrt(z[0] * z[0] + z[1] * z[1]));
    }
    REQUIRE(ks_statistic(radii, [&](double r) { return gauss.radial_cdf(r); }) < ks_crit);
}

TEST_CASE("radial table density", "[density]") {
    // triangular profile on [0, 2]
    const JumpDensity tab = JumpDensity::radial_table(1, {0.0, 1.0, 2.0}, {1.0, 0.5, 0.0});
    REQUIRE(tab.value({0.0}) == Approx(1.0));
    REQUIRE(tab.value({1.5}) == Approx(0.25).epsilon(1e-12));
    REQUIRE(tab.value({3.0}) == 0.0);
    // mass = 2 int_0^2 profile = 2 (1/2 * (1 + 0.5) * 1 + 1/2 * 0.5 * 1) wedges
    REQUIRE(tab.mass() == Approx(2.0 * (0.75 + 0.25)).epsilon(1e-8));
    REQUIRE_THROWS_AS(JumpDensity::radial_table(1, {0.5, 1.0}, {1.0, 0.0}), std::domain_error);
    REQUIRE_THROWS_AS(JumpDensity::radial_table(1, {0.0, 1.0}, {1.0, -0.5}), std::domain_error);
}
