#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "model.hpp"
#include "quadrature.hpp"
#include "test_functions.hpp"

namespace ougrad {

namespace detail {

/// In-place iterative radix-2 FFT, forward convention
/// X_j = sum_k x_k e^{-2 pi i j k / n}; n must be a power of two.
inline void fft_inplace(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0) throw std::domain_error("fft: size must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = a[i + k];
                const std::complex<double> v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

}  // namespace detail

/// Noise density p_t and its derivative on a uniform grid x_j = -L + j dx,
/// j = 0..n-1, recovered by Fourier inversion of the characteristic function.
struct DensityTable {
    double t = 0.0;
    double L = 0.0;   // grid half-width
    double dx = 0.0;  // spacing, dx = 2L/n
    std::vector<double> x, p, dp;
    // |p| mass outside [-L/2, L/2]; nonzero when no sweep candidate could hold
    // the tails below 1e-10 (heavy-tailed laws), recorded instead of refusing.
    double tail_mass_estimate = 0.0;

    int n() const { return static_cast<int>(x.size()); }

    void to_csv(std::ostream& os) const {
        os << "x,p,dp\n";
        for (std::size_t j = 0; j < x.size(); ++j) {
            char line[96];
            std::snprintf(line, sizeof(line), "%.12g,%.12g,%.12g\n", x[j], p[j], dp[j]);
            os << line;
        }
    }
};

namespace detail {

// One inversion pass at fixed half-width L. Grid duality dx dz = 2 pi / n with
// z_k = (k - n/2) dz; the (-1)^k / (-1)^j factors shift both grids to be
// origin-centred, and n = 0 mod 4 makes sum p dx = mu(0) = 1 an exact
// identity of the discrete transform.
inline DensityTable invert_cf_at(const LevyModel& model, double t, double L, int n,
                                 const QuadratureConfig& quad) {
    const double dz = std::numbers::pi / L;
    const double dx = 2.0 * L / n;
    std::vector<std::complex<double>> cf(static_cast<std::size_t>(n));
    Vec z(1, 0.0);
    for (int k = n / 2; k < n; ++k) {  // z >= 0 half; mirror by hermitian symmetry
        z[0] = (k - n / 2) * dz;
        const std::complex<double> v = std::exp(integrated_symbol(model, t, z, quad));
        cf[static_cast<std::size_t>(k)] = v;
        if (k > n / 2) cf[static_cast<std::size_t>(n - k)] = std::conj(v);
    }
    std::vector<std::complex<double>> work(static_cast<std::size_t>(n));
    DensityTable tab;
    tab.t = t;
    tab.L = L;
    tab.dx = dx;
    tab.x.resize(static_cast<std::size_t>(n));
    tab.p.resize(static_cast<std::size_t>(n));
    tab.dp.resize(static_cast<std::size_t>(n));
    const double scale = dz / (2.0 * std::numbers::pi);
    for (int pass = 0; pass < 2; ++pass) {
        for (int k = 0; k < n; ++k) {
            const double sign = (k % 2 == 0) ? 1.0 : -1.0;
            const double zk = (k - n / 2) * dz;
            // density from mu itself, derivative from (-i z) mu
            work[static_cast<std::size_t>(k)] =
                pass == 0 ? sign * cf[static_cast<std::size_t>(k)]
                          : sign * std::complex<double>(0.0, -zk) * cf[static_cast<std::size_t>(k)];
        }
        fft_inplace(work);
        for (int j = 0; j < n; ++j) {
            const double sign = (j % 2 == 0) ? 1.0 : -1.0;
            const double v = scale * sign * work[static_cast<std::size_t>(j)].real();
            if (pass == 0)
                tab.p[static_cast<std::size_t>(j)] = v;
            else
                tab.dp[static_cast<std::size_t>(j)] = v;
        }
    }
    double tail = 0.0;
    for (int j = 0; j < n; ++j) {
        tab.x[static_cast<std::size_t>(j)] = (j - n / 2) * dx;
        if (std::fabs(tab.x[static_cast<std::size_t>(j)]) > L / 2.0)
            tail += std::fabs(tab.p[static_cast<std::size_t>(j)]) * dx;
    }
    tab.tail_mass_estimate = tail;
    return tab;
}

}  // namespace detail

/// Recovers the time-t noise density of a d=1 model from its characteristic
/// function. The half-width sweep picks the smallest L in {4, 8, ..., 4096}
/// whose spectrum-truncation error (1/2pi) int_{|z| > Nyquist} |mu_t| dz is
/// below 1e-8 (resolution) and whose |p| mass outside [-L/2, L/2] stays below
/// 1e-10 (aliasing); when no candidate can hold the tails, the largest
/// truncation-admissible L is used and the residual tail mass is recorded in
/// the table. A characteristic function without integrable decay (atomic law,
/// e.g. pure compound Poisson) is refused.
inline DensityTable density_from_cf(const LevyModel& model, double t, const QuadratureConfig& quad = {},
                                    int n = 1 << 14) {
    if (model.dim() != 1) throw std::domain_error("density_from_cf: only d = 1 supported");
    if (!(t > 0.0)) throw std::domain_error("density_from_cf: time t must be positive");
    if (n < 8 || (n & (n - 1)) != 0 || n % 4 != 0)
        throw std::domain_error("density_from_cf: n must be a power of two, multiple of 4");

    std::vector<double> admissible;
    double best_truncation = std::numeric_limits<double>::infinity();
    QuadratureConfig probe = quad;
    probe.rel_tol = 1e-4;  // one-digit truncation estimate suffices here
    probe.abs_tol = 1e-14;
    for (double L = 4.0; L <= 4096.0; L *= 2.0) {
        const double zmax = std::numbers::pi * n / (2.0 * L);  // Nyquist frequency of the L-grid
        const auto cf_mag = [&](double zz) {
            return std::exp(integrated_symbol(model, t, Vec{zz}, quad).real());
        };
        // cheap screen: the integral cannot reach 1e-8 unless the magnitude
        // itself is already tiny at the cutoff (also keeps atomic laws from
        // triggering hopeless far-frequency symbol quadrature)
        const double at_cut = cf_mag(zmax);
        if (at_cut > 1e-9) {
            best_truncation = std::min(best_truncation, at_cut);
            continue;
        }
        const QuadResult tail = integrate_semi_infinite(cf_mag, zmax, probe, std::max(1.0, zmax / 8.0));
        const double truncation = tail.value / std::numbers::pi;  // both half-lines over 2 pi
        best_truncation = std::min(best_truncation, truncation);
        if (tail.converged && truncation < 1e-8) admissible.push_back(L);
    }
    if (admissible.empty()) {
        char msg[224];
        std::snprintf(msg, sizeof(msg),
                      "density_from_cf: characteristic function decays too slowly (best spectrum tail "
                      "%.3e, need < 1e-8); the law is atomic or near-atomic and the table is refused",
                      best_truncation);
        throw std::runtime_error(msg);
    }

    DensityTable tab;
    bool have = false;
    for (const double L : admissible) {  // ascending: finest resolution first
        tab = detail::invert_cf_at(model, t, L, n, quad);
        have = true;
        if (tab.tail_mass_estimate < 1e-10) break;
    }
    if (!have) throw std::runtime_error("density_from_cf: internal sweep failure");

    double mass = 0.0, min_p = 0.0;
    for (const double v : tab.p) {
        mass += v;
        min_p = std::min(min_p, v);
    }
    mass *= tab.dx;
    if (min_p < -1e-8)
        throw std::runtime_error("density_from_cf: inversion produced negative density beyond noise floor");
    if (std::fabs(mass - 1.0) > 1e-6)
        throw std::runtime_error("density_from_cf: recovered density mass deviates from 1");
    return tab;
}

struct SemigroupValues {
    std::vector<double> value;     // P_t f(x) per evaluation point
    std::vector<double> gradient;  // d/dx P_t f(x) per evaluation point
};

/// Convolution quadrature of P_t f(x) = int f(e^{tA} x + y) p_t(y) dy and its
/// x-derivative -e^{tA} int f(e^{tA} x + y) p_t'(y) dy on the table grid.
/// Refuses tables whose recorded tail mass makes the quadrature unreliable.
inline SemigroupValues semigroup_and_gradient(const DensityTable& tab, const TestFunction& f,
                                              const std::vector<double>& xs, const LevyModel& model) {
    if (model.dim() != 1) throw std::domain_error("semigroup_and_gradient: only d = 1 supported");
    if (tab.tail_mass_estimate > 1e-2)
        throw std::runtime_error("semigroup_and_gradient: density mass escapes the grid; widen the grid");
    const double flow = model.A_is_zero() ? 1.0 : expm(tab.t * model.A())(0, 0);
    SemigroupValues out;
    out.value.reserve(xs.size());
    out.gradient.reserve(xs.size());
    Vec arg(1, 0.0);
    for (const double x : xs) {
        const double base = flow * x;
        double v = 0.0, g = 0.0;
        for (std::size_t j = 0; j < tab.x.size(); ++j) {
            arg[0] = base + tab.x[j];
            const double fx = f.eval(arg);
            v += fx * tab.p[j];
            g += fx * tab.dp[j];
        }
        out.value.push_back(v * tab.dx);
        out.gradient.push_back(-flow * g * tab.dx);
    }
    return out;
}

/// Applies the semigroup step with noise table `tab` to a function given by
/// its values g on the same grid: out_i = sum_j g(flow x_i + x_j) p_j dx.
/// Off-grid arguments clamp to the boundary value (g is treated as constant
/// beyond the grid, the right extension for bounded test functions).
inline std::vector<double> apply_to_grid(const DensityTable& tab, double flow, const std::vector<double>& g) {
    const int n = tab.n();
    if (static_cast<int>(g.size()) != n) throw std::domain_error("apply_to_grid: grid size mismatch");
    std::vector<double> out(static_cast<std::size_t>(n), 0.0);
    if (flow == 1.0) {
        // flow x_i + x_j lands on the grid: index i + j - n/2, clamped
        for (int i = 0; i < n; ++i) {
            double acc = 0.0;
            const int off = i - n / 2;
            for (int j = 0; j < n; ++j) {
                const int k = std::min(n - 1, std::max(0, off + j));
                acc += g[static_cast<std::size_t>(k)] * tab.p[static_cast<std::size_t>(j)];
            }
            out[static_cast<std::size_t>(i)] = acc * tab.dx;
        }
        return out;
    }
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        const double base = flow * tab.x[static_cast<std::size_t>(i)];
        for (int j = 0; j < n; ++j) {
            const double u = base + tab.x[static_cast<std::size_t>(j)];
            // clamped linear interpolation of g at u
            double gu;
            if (u <= tab.x.front()) {
                gu = g.front();
            } else if (u >= tab.x.back()) {
                gu = g.back();
            } else {
                const double s = (u - tab.x.front()) / tab.dx;
                const int k = static_cast<int>(s);
                const double w = s - k;
                gu = (1.0 - w) * g[static_cast<std::size_t>(k)] + w * g[static_cast<std::size_t>(k + 1)];
            }
            acc += gu * tab.p[static_cast<std::size_t>(j)];
        }
        out[static_cast<std::size_t>(i)] = acc * tab.dx;
    }
    return out;
}

}  // namespace ougrad
