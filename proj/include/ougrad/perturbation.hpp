#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "density.hpp"
#include "estimators.hpp"
#include "model.hpp"
#include "spectral.hpp"
#include "test_functions.hpp"

namespace ougrad {

/// Separable bounded jump-kernel perturbation k(x, dz) = kappa(x) m(z) dz
/// acting as (sigma f)(x) = kappa(x) (int f(z) m(z) dz - f(x) int m(z) dz):
/// at state-dependent rate kappa the process is redistributed to an absolute
/// target drawn from m (unlike the base Levy jumps, which are increments).
/// Signed perturbations are expressed through a signed kappa; m itself stays
/// a nonnegative density. d = 1 only.
struct PerturbationKernel {
    std::function<double(double)> kappa;
    JumpDensity m = JumpDensity::gaussian(1, 1.0);
    double kappa_max = 0.0;  // simulation envelope, >= sup |kappa|
    bool nonneg = true;      // kappa >= 0 everywhere (simulable by thinning)

    static PerturbationKernel separable(std::function<double(double)> rate, JumpDensity target,
                                        double rate_max, bool nonnegative = true) {
        if (target.dim() != 1)
            throw std::domain_error("PerturbationKernel: target density must be 1-dimensional");
        if (rate_max < 0.0) throw std::domain_error("PerturbationKernel: negative rate envelope");
        PerturbationKernel k;
        k.kappa = std::move(rate);
        k.m = std::move(target);
        k.kappa_max = rate_max;
        k.nonneg = nonnegative;
        return k;
    }

    static PerturbationKernel zero() {
        return separable([](double) { return 0.0; }, JumpDensity::gaussian(1, 1.0), 0.0);
    }

    /// sup_x int |k(x, dz)| = sup_x |kappa(x)| * mass(m), the sup taken over an
    /// x grid (default the shared 21-point [-3, 3] grid).
    double norm_inf(const std::vector<double>& xs = {}) const {
        const std::vector<double> grid = xs.empty() ? sup_grid() : xs;
        double sup = 0.0;
        for (const double x : grid) sup = std::max(sup, std::fabs(kappa(x)));
        return sup * m.mass();
    }
};

/// Applies sigma to a grid-tabulated function by trapezoid quadrature. Both
/// integrals in (sigma g)(x) = kappa(x)(int g m - g(x) int m) use the same
/// discrete mass, so sigma annihilates constants to round-off regardless of
/// grid resolution. Refuses grids that let the redistribution density's mass
/// escape.
inline std::vector<double> sigma_apply(const PerturbationKernel& kernel,
                                       const std::vector<double>& x, double dx,
                                       const std::vector<double>& g) {
    if (x.size() != g.size() || x.size() < 2)
        throw std::domain_error("sigma_apply: grid size mismatch");
    const std::size_t n = x.size();
    double mass = 0.0, mg = 0.0;
    Vec arg(1, 0.0);
    for (std::size_t j = 0; j < n; ++j) {
        const double w = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
        arg[0] = x[j];
        const double mv = kernel.m.value(arg);
        mass += w * mv;
        mg += w * mv * g[j];
    }
    mass *= dx;
    mg *= dx;
    if (std::fabs(mass - kernel.m.mass()) > 1e-6)
        throw std::runtime_error("sigma_apply: redistribution mass escapes the grid; widen it");
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) out[i] = kernel.kappa(x[i]) * (mg - g[i] * mass);
    return out;
}

struct DuhamelGrid {
    double L = 32.0;
    int n = 1 << 10;
};

struct DuhamelSolution {
    std::vector<double> x;          // solver grid
    std::vector<double> values;     // P_t^sigma f on the grid
    std::vector<double> residuals;  // sup-norm Picard increments
    int iterations = 0;
};

/// Solves the perturbed semigroup by Picard iteration of the variation-of-
/// constants identity
///   P_t^sigma f = P_t f + int_0^t P_u sigma P_{t-u}^sigma f du
/// with trapezoid time discretization on `steps` intervals and the base
/// semigroup tabulated by Fourier inversion on a fixed shared grid. The
/// Volterra structure makes the increments contract factorially; iteration
/// stops at sup-norm increment 1e-8 (at most 100 rounds).
inline DuhamelSolution duhamel_solve(const LevyModel& model, const PerturbationKernel& sigma,
                                     const TestFunction& f, double t, int steps = 32,
                                     DuhamelGrid grid = {}, const QuadratureConfig& quad = {}) {
    if (model.dim() != 1) throw std::domain_error("duhamel_solve: only d = 1 supported");
    if (!(t > 0.0)) throw std::domain_error("duhamel_solve: time t must be positive");
    if (steps < 2) throw std::domain_error("duhamel_solve: need at least 2 time steps");
    if (grid.n < 8 || (grid.n & (grid.n - 1)) != 0 || grid.n % 4 != 0)
        throw std::domain_error("duhamel_solve: grid size must be a power of two divisible by 4");
    const double dt = t / steps;
    const int n = grid.n;
    const std::size_t un = static_cast<std::size_t>(n);

    // transition tables and flow factors at the time nodes q dt, q = 1..steps
    std::vector<DensityTable> tabs;
    std::vector<double> flows(static_cast<std::size_t>(steps) + 1, 1.0);
    tabs.reserve(static_cast<std::size_t>(steps));
    const double zmax = std::numbers::pi * n / (2.0 * grid.L);
    for (int q = 1; q <= steps; ++q) {
        const double s = q * dt;
        if (q == 1) {
            // resolution guard: the shortest-time density must be spectrally
            // resolved on the grid, else its discrete table rings
            Vec z(1, zmax);
            const double mag = std::exp(integrated_symbol(model, s, z, quad).real());
            if (mag > 1e-8)
                throw std::runtime_error(
                    "duhamel_solve: first time node unresolved on the solver grid; "
                    "enlarge grid.n or reduce steps");
        }
        tabs.push_back(detail::invert_cf_at(model, s, grid.L, n, quad));
        if (std::fabs(tabs.back().tail_mass_estimate) > 1e-6)
            throw std::runtime_error("duhamel_solve: density mass escapes the solver grid; "
                                     "enlarge grid.L");
        if (!model.A_is_zero()) flows[static_cast<std::size_t>(q)] = expm(s * model.A())(0, 0);
    }
    const std::vector<double>& x = tabs.front().x;
    const double dx = tabs.front().dx;

    // base[q] = P_{q dt} f on the grid; base[0] = f itself
    std::vector<std::vector<double>> base(static_cast<std::size_t>(steps) + 1);
    {
        Vec arg(1, 0.0);
        base[0].resize(un);
        for (std::size_t i = 0; i < un; ++i) {
            arg[0] = x[i];
            base[0][i] = f.eval(arg);
        }
        for (int q = 1; q <= steps; ++q) {
            const std::size_t uq = static_cast<std::size_t>(q);
            const DensityTable& tab = tabs[uq - 1];
            base[uq].assign(un, 0.0);
            for (std::size_t i = 0; i < un; ++i) {
                const double fx = flows[uq] * x[i];
                double acc = 0.0;
                for (std::size_t j = 0; j < un; ++j) {
                    arg[0] = fx + tab.x[j];
                    acc += f.eval(arg) * tab.p[j];
                }
                base[uq][i] = acc * dx;
            }
        }
    }

    DuhamelSolution sol;
    sol.x = x;
    std::vector<std::vector<double>> G = base;
    std::vector<std::vector<double>> next(static_cast<std::size_t>(steps) + 1);
    next[0] = base[0];
    std::vector<std::vector<double>> sg(static_cast<std::size_t>(steps) + 1);
    for (int it = 1; it <= 100; ++it) {
        for (int j = 0; j <= steps; ++j)
            sg[static_cast<std::size_t>(j)] = sigma_apply(sigma, x, dx, G[static_cast<std::size_t>(j)]);
        double res = 0.0;
        for (int q = 1; q <= steps; ++q) {
            const std::size_t uq = static_cast<std::size_t>(q);
            std::vector<double> integral(un, 0.0);
            for (int r = 0; r <= q; ++r) {
                const double w = (r == 0 || r == q) ? 0.5 : 1.0;
                const std::vector<double>& term =
                    r == 0 ? sg[uq]
                           : apply_to_grid(tabs[static_cast<std::size_t>(r) - 1],
                                           flows[static_cast<std::size_t>(r)],
                                           sg[static_cast<std::size_t>(q - r)]);
                for (std::size_t i = 0; i < un; ++i) integral[i] += w * term[i];
            }
            next[uq].resize(un);
            for (std::size_t i = 0; i < un; ++i) {
                next[uq][i] = base[uq][i] + dt * integral[i];
                res = std::max(res, std::fabs(next[uq][i] - G[uq][i]));
            }
        }
        G.swap(next);
        sol.residuals.push_back(res);
        sol.iterations = it;
        if (res < 1e-8) break;
    }
    if (sol.residuals.back() >= 1e-8)
        throw std::runtime_error("duhamel_solve: Picard iteration failed to contract; "
                                 "is t * ||sigma|| too large?");
    sol.values = G[static_cast<std::size_t>(steps)];
    return sol;
}

struct PerturbedEstimate {
    ScalarEstimate estimate;
    double mean_events = 0.0;
};

/// Monte Carlo estimate of P_t^sigma f(x) by thinning: Poisson(kappa_max t)
/// candidate event times, each accepted with probability kappa(state)/kappa_max
/// and then redistributing the state to a fresh draw from m; the base OU
/// dynamics evolve between events. Requires kappa >= 0. kappa_max = 0
/// delegates to the unperturbed estimator (bit-identical).
inline PerturbedEstimate simulate_perturbed(const LevyModel& model,
                                            const PerturbationKernel& sigma,
                                            const TestFunction& f, const Vec& x, double t, long n,
                                            SeedInfo seed, int threads = 1,
                                            const QuadratureConfig& quad = {}) {
    if (model.dim() != 1 || sigma.m.dim() != 1)
        throw std::domain_error("simulate_perturbed: only d = 1 supported");
    if (!sigma.nonneg)
        throw std::domain_error("simulate_perturbed: signed kernels are not simulable by "
                                "thinning; use duhamel_solve");
    if (!(t > 0.0)) throw std::domain_error("simulate_perturbed: time t must be positive");
    if (sigma.kappa_max == 0.0) return {estimate_Pt(model, f, x, t, n, seed, threads, quad), 0.0};

    struct Acc {
        Accumulator val, events;
        void merge(const Acc& o) {
            val.merge(o.val);
            events.merge(o.events);
        }
    };
    const auto body = [&](RngStream& rng, long count, long, Acc& acc) {
        for (long i = 0; i < count; ++i) {
            long events = rng.poisson(sigma.kappa_max * t);
            std::vector<double> times(static_cast<std::size_t>(events));
            for (double& s : times) s = rng.uniform() * t;
            std::sort(times.begin(), times.end());
            Vec state = x;
            double prev = 0.0;
            long accepted = 0;
            for (const double s : times) {
                if (s - prev > 1e-15)
                    state = OUSampler(model, s - prev, quad).sample(state, rng).x_t;
                prev = s;
                const double rate = sigma.kappa(state[0]);
                if (rate < 0.0 || rate > sigma.kappa_max * (1.0 + 1e-12))
                    throw std::domain_error("simulate_perturbed: kappa leaves [0, kappa_max]");
                if (rng.uniform() * sigma.kappa_max < rate) {
                    state = sigma.m.sample(rng);
                    ++accepted;
                }
            }
            if (t - prev > 1e-15)
                state = OUSampler(model, t - prev, quad).sample(state, rng).x_t;
            acc.val.add(f.eval(state));
            acc.events.add(static_cast<double>(accepted));
        }
    };
    const Acc total = detail::run_blocks(n, seed, threads, Acc{}, body);
    PerturbedEstimate out;
    out.estimate = {total.val.mean(), total.val.std_error(), total.val.count(), seed};
    out.mean_events = total.events.mean();
    return out;
}

/// Perturbed-semigroup gradient bound: rhs shape c [alpha(c0 (t^1)) + ||sigma||],
/// modulo one free multiplier on the whole expression, applicable only when
/// int_0^1 alpha(s) ds converges (checked by adaptive quadrature; divergent
/// rows carry rhs = inf).
inline BoundReport bound_cor13(const LowerBoundSpec& spec, int d, double A_norm,
                               double sigma_norm, const std::vector<double>& ts,
                               const QuadratureConfig& quad = {}) {
    if (sigma_norm < 0.0) throw std::domain_error("bound_cor13: negative perturbation norm");
    const OUConstants oc = constants_c0_lambda0(spec, A_norm, d, quad);
    BoundReport rep;
    rep.bound_id = "Cor1.3";
    rep.constants = {oc.c0, oc.lambda0, 0.0, spec.r0, spec.S.describe()};
    rep.note = "rhs modulo one free multiplier c on the whole expression; "
               "requires int_0^1 alpha(s) ds < infinity";

    bool applicable = !alpha_divergent(spec.S);
    if (applicable) {
        // pre-screen on the regular-variation index of alpha at 0: with
        // alpha(s) ~ s^{-gamma}, int_0^1 alpha needs gamma < 1. The quadrature
        // below cannot be trusted alone here, because for fast-divergent alpha
        // its truncated inner integral plateaus and masks the divergence.
        const double a1 = eval_alpha(spec.S, 0.1, quad).value;
        const double a2 = eval_alpha(spec.S, 0.01, quad).value;
        applicable = std::log(a2 / a1) / std::log(10.0) < 1.0 - 1e-3;
    }
    if (applicable) {
        QuadratureConfig inner = quad;
        inner.rel_tol = std::max(quad.rel_tol, 1e-6);
        QuadratureConfig outer;
        outer.rel_tol = 1e-4;
        outer.abs_tol = 1e-10;
        outer.max_intervals = 400;
        const QuadResult total = integrate(
            [&](double s) { return s > 0.0 ? eval_alpha(spec.S, s, inner).value : 0.0; }, 0.0,
            1.0, outer);
        applicable = total.converged && std::isfinite(total.value);
    }
    if (!applicable) rep.note += " (not satisfied here)";

    for (const double t : ts) {
        if (!(t > 0.0)) throw std::domain_error("bound_cor13: time grid must be positive");
        BoundRow row;
        row.t = t;
        if (!applicable) {
            row.divergent = true;
            row.rhs = std::numeric_limits<double>::infinity();
        } else {
            const AlphaResult a = eval_alpha(spec.S, oc.c0 * std::min(t, 1.0), quad);
            row.rhs = a.value + sigma_norm;
        }
        rep.rows.push_back(row);
    }
    return rep;
}

}  // namespace ougrad
