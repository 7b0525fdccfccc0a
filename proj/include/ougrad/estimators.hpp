#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

#include "density.hpp"
#include "model.hpp"
#include "sampling.hpp"
#include "stats.hpp"
#include "test_functions.hpp"

namespace ougrad {

namespace detail {

constexpr long kMcBlock = 4096;
// Stream-id offsets keep the independent halves of paired checks and the
// nested inner estimates off the outer blocks' streams.
constexpr std::uint64_t kPairedStreamOffset = 1u << 21;
constexpr std::uint64_t kNestedStreamOffset = 1u << 22;

/// Runs `body(rng, count, acc)` over fixed-size sample blocks, block b drawing
/// from stream (seed.stream + b). Per-block accumulators are merged in block
/// order, so the result is bit-identical for every thread count.
template <class Acc, class Body>
Acc run_blocks(long n, SeedInfo seed, int threads, const Acc& proto, const Body& body) {
    if (n < 2) throw std::domain_error("monte carlo: need n >= 2 samples");
    const long blocks = (n + kMcBlock - 1) / kMcBlock;
    std::vector<Acc> parts(static_cast<std::size_t>(blocks), proto);
    const auto work = [&](long first, long step) {
        for (long b = first; b < blocks; b += step) {
            RngStream rng(seed.seed, seed.stream + static_cast<std::uint64_t>(b));
            const long count = std::min<long>(kMcBlock, n - b * kMcBlock);
            body(rng, count, b, parts[static_cast<std::size_t>(b)]);
        }
    };
    threads = std::max(1, threads);
    if (threads == 1 || blocks == 1) {
        work(0, 1);
    } else {
        std::vector<std::thread> pool;
        const int used = static_cast<int>(std::min<long>(threads, blocks));
        pool.reserve(static_cast<std::size_t>(used));
        for (int j = 0; j < used; ++j) pool.emplace_back(work, j, used);
        for (auto& th : pool) th.join();
    }
    Acc total = proto;
    for (const auto& p : parts) total.merge(p);
    return total;
}

}  // namespace detail

/// Plain Monte Carlo estimate of P_t f(x) = E f(X_t^x).
inline ScalarEstimate estimate_Pt(const LevyModel& model, const TestFunction& f, const Vec& x, double t, long n,
                                  SeedInfo seed, int threads = 1, const QuadratureConfig& quad = {}) {
    const OUSampler sampler(model, t, quad);
    const Accumulator acc = detail::run_blocks(
        n, seed, threads, Accumulator{}, [&](RngStream& rng, long count, long, Accumulator& a) {
            for (long i = 0; i < count; ++i) a.add(f.eval(sampler.sample(x, rng).x_t));
        });
    return {acc.mean(), acc.std_error(), acc.count(), seed};
}

/// Monte Carlo estimate of P_t^1 f(x) = E[f(X_t^x) 1{N_t >= 1}], where N_t
/// counts the jumps of the floor component only.
inline ScalarEstimate estimate_Pt1(const LevyModel& model, const TestFunction& f, const Vec& x, double t, long n,
                                   SeedInfo seed, int threads = 1, const QuadratureConfig& quad = {}) {
    if (!model.has_floor()) throw std::domain_error("estimate_Pt1: model has no floor component");
    const OUSampler sampler(model, t, quad);
    const Accumulator acc = detail::run_blocks(
        n, seed, threads, Accumulator{}, [&](RngStream& rng, long count, long, Accumulator& a) {
            for (long i = 0; i < count; ++i) {
                const OUEndpoint ep = sampler.sample(x, rng);
                a.add(ep.floor_path.count() >= 1 ? f.eval(ep.x_t) : 0.0);
            }
        });
    return {acc.mean(), acc.std_error(), acc.count(), seed};
}

/// Unbiased estimate of the gradient of P_t^1 f(x) by the jump-size
/// score-average formula: each sample contributes
///   -f(X_t^x) (1/N_t) sum_i e^{tau_i A^T} grad log rho_0(xi_i)
/// over the floor jumps (tau_i, xi_i), and 0 when N_t = 0. Refuses models
/// whose floor density fails the mollified gradient-integrability condition.
inline GradientEstimate derivative_formula(const LevyModel& model, const TestFunction& f, const Vec& x, double t,
                                           long n, SeedInfo seed, int threads = 1,
                                           const QuadratureConfig& quad = {}) {
    if (!model.has_floor()) throw std::domain_error("derivative_formula: model has no floor component");
    const JumpDensity& rho = model.floor_density();
    if (!rho.grad_abs_integral(quad).finite)
        throw std::domain_error("derivative_formula: floor density gradient is not integrable");
    const OUSampler sampler(model, t, quad);
    const int d = model.dim();
    const bool flat = model.A_is_zero();
    const Mat At = model.A().transpose();
    const VecAccumulator acc = detail::run_blocks(
        n, seed, threads, VecAccumulator(d), [&](RngStream& rng, long count, long, VecAccumulator& a) {
            Vec w(static_cast<std::size_t>(d), 0.0);
            for (long i = 0; i < count; ++i) {
                const OUEndpoint ep = sampler.sample(x, rng);
                const long jumps = ep.floor_path.count();
                std::fill(w.begin(), w.end(), 0.0);
                if (jumps >= 1) {
                    for (long j = 0; j < jumps; ++j) {
                        Vec g = rho.grad_log(ep.floor_path.sizes[static_cast<std::size_t>(j)]);
                        if (!flat) g = expm(ep.floor_path.times[static_cast<std::size_t>(j)] * At) * g;
                        w += g;
                    }
                    const double scale = -f.eval(ep.x_t) / static_cast<double>(jumps);
                    for (double& v : w) v *= scale;
                }
                a.add(w);
            }
        });
    return {acc.mean(), acc.std_error(), acc.count(), seed};
}

/// Central finite difference of x -> P_t f(x) (or P_t^1 f with
/// jump_restricted) along `direction`, using common random numbers: both
/// shifted starting points share every noise draw, so only the deterministic
/// flow part differs.
inline ScalarEstimate finite_difference(const LevyModel& model, const TestFunction& f, const Vec& x, double t, long n,
                                        double h, const Vec& direction, SeedInfo seed, bool jump_restricted = false,
                                        int threads = 1, const QuadratureConfig& quad = {}) {
    if (!(h > 0.0)) throw std::domain_error("finite_difference: step h must be positive");
    if (direction.size() != x.size()) throw std::domain_error("finite_difference: direction dimension mismatch");
    if (jump_restricted && !model.has_floor())
        throw std::domain_error("finite_difference: jump-restricted mode needs a floor component");
    const OUSampler sampler(model, t, quad);
    Vec xp = x, xm = x;
    for (std::size_t j = 0; j < x.size(); ++j) {
        xp[j] += h * direction[j];
        xm[j] -= h * direction[j];
    }
    const Vec mp = sampler.apply_flow(xp);
    const Vec mm = sampler.apply_flow(xm);
    const int d = model.dim();
    const Accumulator acc = detail::run_blocks(
        n, seed, threads, Accumulator{}, [&](RngStream& rng, long count, long, Accumulator& a) {
            Vec up(static_cast<std::size_t>(d)), um(static_cast<std::size_t>(d));
            for (long i = 0; i < count; ++i) {
                const OUNoise noise = sampler.sample_noise(rng);
                if (jump_restricted && noise.floor_path.count() < 1) {
                    a.add(0.0);
                    continue;
                }
                for (int j = 0; j < d; ++j) {
                    up[static_cast<std::size_t>(j)] = mp[static_cast<std::size_t>(j)] + noise.y[static_cast<std::size_t>(j)];
                    um[static_cast<std::size_t>(j)] = mm[static_cast<std::size_t>(j)] + noise.y[static_cast<std::size_t>(j)];
                }
                a.add((f.eval(up) - f.eval(um)) / (2.0 * h));
            }
        });
    return {acc.mean(), acc.std_error(), acc.count(), seed};
}

/// Full finite-difference gradient (all coordinate directions) in one sampling
/// pass, sharing each noise draw across the 2 * dim shifted evaluations.
inline GradientEstimate finite_difference_gradient(const LevyModel& model, const TestFunction& f, const Vec& x,
                                                   double t, long n, double h, SeedInfo seed,
                                                   bool jump_restricted = false, int threads = 1,
                                                   const QuadratureConfig& quad = {}) {
    if (!(h > 0.0)) throw std::domain_error("finite_difference_gradient: step h must be positive");
    if (jump_restricted && !model.has_floor())
        throw std::domain_error("finite_difference_gradient: jump-restricted mode needs a floor component");
    const OUSampler sampler(model, t, quad);
    const int d = model.dim();
    std::vector<Vec> mp(static_cast<std::size_t>(d)), mm(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
        Vec xp = x, xm = x;
        xp[static_cast<std::size_t>(j)] += h;
        xm[static_cast<std::size_t>(j)] -= h;
        mp[static_cast<std::size_t>(j)] = sampler.apply_flow(xp);
        mm[static_cast<std::size_t>(j)] = sampler.apply_flow(xm);
    }
    const VecAccumulator acc = detail::run_blocks(
        n, seed, threads, VecAccumulator(d), [&](RngStream& rng, long count, long, VecAccumulator& a) {
            Vec diff(static_cast<std::size_t>(d), 0.0);
            Vec up(static_cast<std::size_t>(d)), um(static_cast<std::size_t>(d));
            for (long i = 0; i < count; ++i) {
                const OUNoise noise = sampler.sample_noise(rng);
                if (jump_restricted && noise.floor_path.count() < 1) {
                    std::fill(diff.begin(), diff.end(), 0.0);
                    a.add(diff);
                    continue;
                }
                for (int j = 0; j < d; ++j) {
                    for (int k = 0; k < d; ++k) {
                        up[static_cast<std::size_t>(k)] =
                            mp[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] + noise.y[static_cast<std::size_t>(k)];
                        um[static_cast<std::size_t>(k)] =
                            mm[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] + noise.y[static_cast<std::size_t>(k)];
                    }
                    diff[static_cast<std::size_t>(j)] = (f.eval(up) - f.eval(um)) / (2.0 * h);
                }
                a.add(diff);
            }
        });
    return {acc.mean(), acc.std_error(), acc.count(), seed};
}

/// Bounded functional of a compound-Poisson endpoint: F(position, jump count).
using PathFunctional = std::function<double(const Vec&, long)>;

struct ShiftCheckReport {
    ScalarEstimate lhs;  // E[F(L_t, N_t) 1{N_t >= 1}]
    ScalarEstimate rhs;  // lambda0 t E[F(L_t + xi, N_t + 1) / (N_t + 1)]
    double combined_std_error = 0.0;
    bool pass = false;
};

/// Verifies the random-shift identity for the compound-Poisson process with
/// jump density rho: adding one extra jump at a uniform time, with size drawn
/// from rho / mass(rho), reweights exactly by (N_t + 1) / (lambda0 t). The two
/// sides use independent streams; pass means they agree within 3 combined
/// standard errors. Functional values above 1e6 are rejected as unbounded.
inline ShiftCheckReport random_shift_check(const JumpDensity& rho, double t, const PathFunctional& F, long n,
                                           SeedInfo seed, int threads = 1) {
    if (!(t > 0.0)) throw std::domain_error("random_shift_check: time t must be positive");
    const double lam_t = rho.mass() * t;
    const auto checked = [](double v) {
        if (!(std::fabs(v) <= 1e6)) throw std::domain_error("random_shift_check: functional exceeds bound 1e6");
        return v;
    };
    const auto endpoint = [&](const CompoundPoissonPath& path) {
        Vec sum(static_cast<std::size_t>(rho.dim()), 0.0);
        for (const Vec& s : path.sizes) sum += s;
        return sum;
    };
    const Accumulator la = detail::run_blocks(
        n, seed, threads, Accumulator{}, [&](RngStream& rng, long count, long, Accumulator& a) {
            for (long i = 0; i < count; ++i) {
                const CompoundPoissonPath path = sample_compound_poisson(rho, t, rng);
                a.add(path.count() >= 1 ? checked(F(endpoint(path), path.count())) : 0.0);
            }
        });
    const SeedInfo rseed{seed.seed, seed.stream + detail::kPairedStreamOffset};
    const Accumulator ra = detail::run_blocks(
        n, rseed, threads, Accumulator{}, [&](RngStream& rng, long count, long, Accumulator& a) {
            for (long i = 0; i < count; ++i) {
                const CompoundPoissonPath path = sample_compound_poisson(rho, t, rng);
                (void)rng.uniform(0.0, t);  // the shifted jump's time; F does not see it
                const Vec xi = rho.sample(rng);
                Vec pos = endpoint(path);
                pos += xi;
                a.add(lam_t * checked(F(pos, path.count() + 1)) / static_cast<double>(path.count() + 1));
            }
        });
    ShiftCheckReport rep;
    rep.lhs = {la.mean(), la.std_error(), la.count(), seed};
    rep.rhs = {ra.mean(), ra.std_error(), ra.count(), rseed};
    rep.combined_std_error = std::sqrt(la.std_error() * la.std_error() + ra.std_error() * ra.std_error());
    rep.pass = std::fabs(rep.lhs.value - rep.rhs.value) <= 3.0 * rep.combined_std_error;
    return rep;
}

struct DecompositionReport {
    ScalarEstimate lhs;  // P_t f(x), sampled directly
    ScalarEstimate rhs;  // e^{lambda0 t} (Pbar_t f - Pbar_t^1 P_t f)(x), nested
    double combined_std_error = 0.0;
    long inner_samples = 0;
    bool agree = false;
    bool inconclusive = false;  // rhs noise too large to decide
};

/// Checks the floor decomposition: with nu_bar = nu + rho_0,
///   P_t f(x) = e^{lambda0 t} (Pbar_t f - Pbar_t^1 P_t f)(x),
/// where Pbar uses nu_bar and Pbar_t^1 restricts to paths with at least one
/// rho_0 jump. The inner P_t f is evaluated at the flow-consistent point
/// x + e^{-tA} (sum_i e^{(t - tau_i) A} xi_i) with sqrt(n) nested samples.
inline DecompositionReport decomposition_check(const LevyModel& model, const TestFunction& f, const Vec& x, double t,
                                               long n, SeedInfo seed, int threads = 1,
                                               const QuadratureConfig& quad = {}) {
    if (!model.lower_bound() || !model.lower_bound()->has_floor())
        throw std::domain_error("decomposition_check: model needs a lower bound with finite r0");
    const int d = model.dim();
    std::vector<JumpComponent> jumps = model.jumps();
    for (auto& c : jumps) c.is_floor = false;
    jumps.push_back(JumpComponent::floor_cp(*model.lower_bound(), d, quad));
    const LevyModel augmented(model.A(), model.b(), model.Q(), jumps, model.lower_bound());
    const double lam0 = augmented.floor_density().mass();

    DecompositionReport rep;
    rep.lhs = estimate_Pt(model, f, x, t, n, seed, threads, quad);
    rep.inner_samples = std::max<long>(2, static_cast<long>(std::llround(std::sqrt(static_cast<double>(n)))));

    const OUSampler outer(augmented, t, quad);
    const OUSampler inner(model, t, quad);
    const bool flat = model.A_is_zero();
    const Mat inv_flow = flat ? Mat::identity(d) : expm((-t) * model.A());
    const double amplification = std::exp(lam0 * t);
    const SeedInfo rseed{seed.seed, seed.stream + detail::kPairedStreamOffset};
    const long n_in = rep.inner_samples;
    const Accumulator ra = detail::run_blocks(
        n, rseed, threads, Accumulator{}, [&](RngStream& rng, long count, long block, Accumulator& a) {
            for (long i = 0; i < count; ++i) {
                const OUNoise noise = outer.sample_noise(rng);
                const Vec xbar = outer.apply_flow(x) + noise.y;
                double nested = 0.0;
                if (noise.floor_path.count() >= 1) {
                    Vec shift(static_cast<std::size_t>(d), 0.0);
                    for (long j = 0; j < noise.floor_path.count(); ++j) {
                        Vec s = noise.floor_path.sizes[static_cast<std::size_t>(j)];
                        if (!flat) s = expm((t - noise.floor_path.times[static_cast<std::size_t>(j)]) * model.A()) * s;
                        shift += s;
                    }
                    Vec w = x;
                    w += flat ? shift : inv_flow * shift;
                    const std::uint64_t global = static_cast<std::uint64_t>(block * detail::kMcBlock + i);
                    RngStream irng(seed.seed, seed.stream + detail::kNestedStreamOffset + global);
                    Accumulator ia;
                    const Vec wflow = inner.apply_flow(w);
                    for (long k = 0; k < n_in; ++k) ia.add(f.eval(wflow + inner.sample_noise(irng).y));
                    nested = ia.mean();
                }
                a.add(amplification * (f.eval(xbar) - nested));
            }
        });
    rep.rhs = {ra.mean(), ra.std_error(), ra.count(), rseed};
    rep.combined_std_error =
        std::sqrt(rep.lhs.std_error * rep.lhs.std_error + rep.rhs.std_error * rep.rhs.std_error);
    rep.inconclusive = rep.rhs.std_error > 0.1;
    rep.agree = !rep.inconclusive && std::fabs(rep.lhs.value - rep.rhs.value) <= 3.0 * rep.combined_std_error;
    return rep;
}

}  // namespace ougrad
