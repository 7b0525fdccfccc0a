// Dumps the Fourier-inverted transition density table of a 1-d model to
// stdout as CSV (x, p, dp). Default model is the Cauchy process at t = 1;
// pass a model JSON path and a time to override.

#include <cstdio>
#include <cstdlib>
#include <iostream>

#include <ougrad/config.hpp>
#include <ougrad/spectral.hpp>

using namespace ougrad;

int main(int argc, char** argv) {
    try {
        LevyModel model = argc > 1
                              ? load_model(argv[1]).model
                              : LevyModel(Mat(1, 1), Vec(1, 0.0), Mat(1, 1),
                                          {JumpComponent::stable_isotropic(1.0, 1.0)});
        const double t = argc > 2 ? std::atof(argv[2]) : 1.0;
        const DensityTable tab = density_from_cf(model, t);
        std::fprintf(stderr, "t=%g L=%g n=%d tail_mass=%.3g\n", tab.t, tab.L, tab.n(),
                     tab.tail_mass_estimate);
        tab.to_csv(std::cout);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
