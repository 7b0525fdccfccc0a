// Prints the gradient bound G(t) = e^{lambda0 (t^1)} [alpha(c0 (t^1)) +
// (t^1) S(r0^{-2}) / r0] for a few catalog Bernstein functions, and the
// jump-score bound for a Gaussian floor, against their Monte Carlo
// counterparts.

#include <cstdio>

#include <ougrad/bounds.hpp>
#include <ougrad/estimators.hpp>

using namespace ougrad;

int main() {
    const std::vector<double> ts{0.25, 0.5, 1.0, 2.0, 4.0};

    std::printf("bound G, theta = 0, d = 1, r0 = 1\n");
    for (const auto& [name, S] :
         {std::pair{"power(0.75)", BernsteinFunction::power(0.75)},
          std::pair{"power(1)", BernsteinFunction::power(1.0)},
          std::pair{"log_power(1)", BernsteinFunction::log_power(1.0)}}) {
        const BoundReport rep = bound_G({S, 1.0}, 0.0, 0.0, 1, ts);
        std::printf("  %-14s c0=%.6f lambda0=%.6f\n", name, rep.constants.c0,
                    rep.constants.lambda0);
        for (const BoundRow& r : rep.rows) {
            if (r.divergent)
                std::printf("    t=%-5g rhs=divergent\n", r.t);
            else
                std::printf("    t=%-5g rhs=%.6g\n", r.t, r.rhs);
        }
    }

    // jump-score bound vs the measured gradient for unit-mass Gaussian jumps
    const LevyModel model(Mat(1, 1), Vec(1, 0.0), Mat(1, 1),
                          {JumpComponent::finite_density(JumpDensity::gaussian(1, 1.0, 1.0), true)});
    const TestFunction f = TestFunction::sin_wave({1.0});
    std::printf("\njump-score bound vs |grad P_t^1 sin|(0), Gaussian floor\n");
    for (const double t : ts) {
        const double rhs = bound_thm31(model.floor_density(), model.theta(), 1.0, t);
        const GradientEstimate g = derivative_formula(model, f, Vec(1, 0.0), t, 100000, {7, 0});
        std::printf("  t=%-5g bound=%.6f measured=%.6f +- %.6f\n", t, rhs, g.value[0],
                    g.std_error[0]);
    }
    return 0;
}
