#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include <ougrad/bernstein.hpp>

using namespace ougrad;
using Catch::Approx;

namespace {

double central_diff(const BernsteinFunction& s, double r) {
    const double h = 1e-6 * r;
    return (s.value(r + h) - s.value(r - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("catalog values", "[bernstein]") {
    REQUIRE(BernsteinFunction::power(0.5).value(4.0) == Approx(2.0).epsilon(1e-14));
    REQUIRE(BernsteinFunction::log_kind().value(std::exp(1.0) - 1.0) == Approx(1.0).epsilon(1e-14));
    // log_power(1): S(r) = log^2(1 + sqrt(r))
    REQUIRE(BernsteinFunction::log_power(1.0).value(4.0) ==
            Approx(1.206948960812582).epsilon(1e-14));

    const auto sum = BernsteinFunction::scaled_sum(
        {{2.0, BernsteinFunction::power(0.5)}, {3.0, BernsteinFunction::log_kind()}});
    REQUIRE(sum.value(4.0) == Approx(2.0 * 2.0 + 3.0 * std::log(5.0)).epsilon(1e-14));

    // power composite of log at delta = 2 coincides with log_power(1)
    const auto comp = bernstein_power(BernsteinFunction::log_kind(), 2.0);
    for (const double r : {0.3, 1.0, 4.0, 50.0})
        REQUIRE(comp.value(r) == Approx(BernsteinFunction::log_power(1.0).value(r)).epsilon(1e-13));
}

TEST_CASE("derivatives match finite differences", "[bernstein]") {
    const std::vector<BernsteinFunction> cat = {
        BernsteinFunction::power(0.3),
        BernsteinFunction::power(1.0),
        BernsteinFunction::log_kind(),
        BernsteinFunction::log_power(0.7),
        BernsteinFunction::scaled_sum({{1.5, BernsteinFunction::power(0.6)},
                                       {0.5, BernsteinFunction::log_kind()}}),
        bernstein_power(BernsteinFunction::log_kind(), 1.8),
    };
    for (const auto& s : cat)
        for (const double r : {0.2, 1.0, 7.5})
            REQUIRE(s.derivative(r) == Approx(central_diff(s, r)).epsilon(1e-6));
}

TEST_CASE("domain guards", "[bernstein]") {
    REQUIRE_THROWS_AS(BernsteinFunction::power(0.0), std::domain_error);
    REQUIRE_THROWS_AS(BernsteinFunction::power(1.5), std::domain_error);
    REQUIRE_THROWS_AS(BernsteinFunction::log_power(0.0), std::domain_error);
    REQUIRE_THROWS_AS(bernstein_power(BernsteinFunction::log_kind(), 1.0), std::domain_error);
    REQUIRE_THROWS_AS(BernsteinFunction::power(0.5).value(-1.0), std::domain_error);
    REQUIRE_THROWS_AS(eval_alpha(BernsteinFunction::power(0.5), 0.0), std::domain_error);
}

TEST_CASE("linear bound constant", "[bernstein]") {
    // power(beta): S(1) + S'(1) = 1 + beta
    REQUIRE(BernsteinFunction::power(0.5).linear_bound_constant() == Approx(1.5));
    const auto s = BernsteinFunction::log_kind();
    // concavity: S(r) <= c r on r >= 1
    const double c = s.linear_bound_constant();
    for (const double r : {1.0, 2.0, 10.0, 1e4}) REQUIRE(s.value(r) <= c * r + 1e-12);
}

TEST_CASE("alpha closed form for the power family", "[bernstein]") {
    // alpha(t) = (1/beta) Gamma(1/(2 beta)) t^{-1/(2 beta)}
    for (const double beta : {0.5, 0.75, 1.0}) {
        for (const double t : {0.1, 1.0, 10.0}) {
            const double exact =
                (1.0 / beta) * std::tgamma(1.0 / (2.0 * beta)) * std::pow(t, -1.0 / (2.0 * beta));
            const AlphaResult a = eval_alpha(BernsteinFunction::power(beta), t);
            REQUIRE_FALSE(a.divergent);
            REQUIRE(a.value == Approx(exact).epsilon(1e-8));
        }
    }
    // spot values
    REQUIRE(eval_alpha(BernsteinFunction::power(1.0), 1.0).value ==
            Approx(std::sqrt(std::numbers::pi)).epsilon(1e-10));
    REQUIRE(eval_alpha(BernsteinFunction::power(0.75), 1.0).value ==
            Approx(1.8054905859018672).epsilon(1e-10));
    REQUIRE(eval_alpha(BernsteinFunction::log_power(1.0), 1.0).value ==
            Approx(3.4604688674074004).epsilon(1e-8));
}

TEST_CASE("alpha divergence probe", "[bernstein]") {
    REQUIRE(alpha_divergent(BernsteinFunction::log_kind()));
    REQUIRE_FALSE(alpha_divergent(BernsteinFunction::power(0.25)));
    REQUIRE_FALSE(alpha_divergent(BernsteinFunction::log_power(0.5)));
    // a power summand dominates the log term at large r
    REQUIRE_FALSE(alpha_divergent(BernsteinFunction::scaled_sum(
        {{1.0, BernsteinFunction::log_kind()}, {0.1, BernsteinFunction::power(0.2)}})));

    const AlphaResult a = eval_alpha(BernsteinFunction::log_kind(), 1.0);
    REQUIRE(a.divergent);
}
