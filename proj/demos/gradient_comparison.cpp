// Estimates the gradient of the jump-restricted semigroup P_t^1 f for a
// compound-Poisson model with unit-mass Gaussian jumps, three ways: the
// unbiased jump-score formula, common-random-number finite differences, and
// the closed form available for f = sin at x = 0.

#include <cmath>
#include <cstdio>

#include <ougrad/estimators.hpp>

using namespace ougrad;

int main() {
    const LevyModel model(Mat(1, 1), Vec(1, 0.0), Mat(1, 1),
                          {JumpComponent::finite_density(JumpDensity::gaussian(1, 1.0, 1.0), true)});
    const TestFunction f = TestFunction::sin_wave({1.0});
    const Vec x(1, 0.0);
    const long n = 200000;

    std::printf("%6s  %22s  %22s  %16s\n", "t", "score formula", "finite difference", "closed form");
    for (const double t : {0.5, 1.0, 2.0}) {
        const GradientEstimate score = derivative_formula(model, f, x, t, n, {2024, 0});
        const GradientEstimate fd =
            finite_difference_gradient(model, f, x, t, n, 1e-3, {2024, 1}, /*jump_restricted=*/true);
        // d/dx E[sin(x + L_t) 1{N >= 1}] at 0 = e^{t(e^{-1/2} - 1)} - e^{-t}
        const double exact = std::exp(t * (std::exp(-0.5) - 1.0)) - std::exp(-t);
        std::printf("%6.2f  %12.6f +- %7.5f  %12.6f +- %7.5f  %16.6f\n", t, score.value[0],
                    score.std_error[0], fd.value[0], fd.std_error[0], exact);
    }
    return 0;
}
