#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>

#include "linalg.hpp"

namespace ougrad {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
}  // namespace detail

struct SeedInfo {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;
};

/// Seeded random stream: identical (seed, stream) reproduces the exact draw
/// sequence; distinct stream ids give independent-quality streams. All
/// distribution code is in-house so sequences are stable across platforms.
class RngStream {
  public:
    RngStream(std::uint64_t seed, std::uint64_t stream) : info_{seed, stream} {
        std::uint64_t s = seed ^ (0x6a09e667f3bcc909ULL * (stream + 1));
        std::seed_seq seq{detail::splitmix64(s), detail::splitmix64(s), detail::splitmix64(s), detail::splitmix64(s)};
        eng_.seed(seq);
    }
    explicit RngStream(SeedInfo info) : RngStream(info.seed, info.stream) {}

    SeedInfo info() const { return info_; }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    double uniform(double a, double b) { return a + (b - a) * uniform(); }

    /// Standard normal (Marsaglia polar, one value cached).
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double m = std::sqrt(-2.0 * std::log(s) / s);
        cached_ = v * m;
        have_cached_ = true;
        return u * m;
    }

    double exponential() { return -std::log1p(-uniform()); }

    /// Gamma(shape, scale 1), Marsaglia-Tsang.
    double gamma(double shape) {
        if (shape <= 0.0) throw std::domain_error("gamma: shape must be positive");
        if (shape < 1.0) {
            double u;
            do {
                u = uniform();
            } while (u == 0.0);
            return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
        }
        const double d = shape - 1.0 / 3.0;
        const double c = 1.0 / std::sqrt(9.0 * d);
        for (;;) {
            double x, v;
            do {
                x = normal();
                v = 1.0 + c * x;
            } while (v <= 0.0);
            v = v * v * v;
            const double u = uniform();
            if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
            if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
        }
    }

    /// Poisson(mean): exact inversion at small mean, PTRS transformed rejection above.
    long poisson(double mean) {
        if (mean < 0.0) throw std::domain_error("poisson: mean must be nonnegative");
        if (mean == 0.0) return 0;
        if (mean <= 30.0) {
            const double target = uniform();
            double p = std::exp(-mean), cdf = p;
            long k = 0;
            while (target > cdf && k < 1000) {
                ++k;
                p *= mean / static_cast<double>(k);
                cdf += p;
            }
            return k;
        }
        return poisson_ptrs(mean);
    }

    /// Uniform direction on the unit sphere in R^d (d = 1 gives +-1).
    Vec sphere_direction(int d) {
        Vec v(d);
        if (d == 1) {
            v[0] = uniform() < 0.5 ? -1.0 : 1.0;
            return v;
        }
        double n;
        do {
            for (int i = 0; i < d; ++i) v[i] = normal();
            n = norm2(v);
        } while (n < 1e-12);
        for (int i = 0; i < d; ++i) v[i] /= n;
        return v;
    }

  private:
    long poisson_ptrs(double mean) {
        // Hoermann's PTRS, valid for mean >= 10.
        const double b = 0.931 + 2.53 * std::sqrt(mean);
        const double a = -0.059 + 0.02483 * b;
        const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
        const double v_r = 0.9277 - 3.6224 / (b - 2.0);
        const double log_mean = std::log(mean);
        for (;;) {
            const double u = uniform() - 0.5;
            const double v = uniform();
            const double us = 0.5 - std::fabs(u);
            const double kf = std::floor((2.0 * a / us + b) * u + mean + 0.43);
            if (us >= 0.07 && v <= v_r) return static_cast<long>(kf);
            if (kf < 0.0 || (us < 0.013 && v > us)) continue;
            const double k = kf;
            if (std::log(v * inv_alpha / (a / (us * us) + b)) <= k * log_mean - mean - std::lgamma(k + 1.0))
                return static_cast<long>(kf);
        }
    }

    std::mt19937_64 eng_;
    SeedInfo info_;
    double cached_ = 0.0;
    bool have_cached_ = false;
};

}  // namespace ougrad
