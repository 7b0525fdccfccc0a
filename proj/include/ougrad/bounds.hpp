#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "bernstein.hpp"
#include "density.hpp"
#include "model.hpp"
#include "spectral.hpp"
#include "stats.hpp"
#include "test_functions.hpp"

namespace ougrad {

struct BoundConstants {
    double c0 = 0.0;
    double lambda0 = 0.0;
    double theta = 0.0;
    double r0 = std::numeric_limits<double>::infinity();
    std::string S_id;
};

struct BoundRow {
    double t = 0.0;
    double rhs = 0.0;
    bool divergent = false;
    double empirical = std::numeric_limits<double>::quiet_NaN();
    double std_error = std::numeric_limits<double>::quiet_NaN();
    double ratio = std::numeric_limits<double>::quiet_NaN();
};

/// One evaluated bound over a time grid. Absolute constants are never
/// invented: `note` records which free multiplier the rhs column is
/// understood modulo, and ratio columns support shape checks in its place.
struct BoundReport {
    std::string bound_id;
    BoundConstants constants;
    std::string note;
    std::vector<BoundRow> rows;

    void attach_empirical(std::size_t i, double value, double std_error) {
        BoundRow& row = rows.at(i);
        row.empirical = value;
        row.std_error = std_error;
        row.ratio = (row.divergent || row.rhs == 0.0) ? std::numeric_limits<double>::quiet_NaN()
                                                      : value / row.rhs;
    }

    void to_csv(std::ostream& os) const {
        os << "t,rhs,empirical,stderr,ratio\n";
        char line[160];
        for (const BoundRow& r : rows) {
            if (std::isnan(r.empirical)) {
                std::snprintf(line, sizeof(line), "%.12g,%.12g,,,\n", r.t, r.rhs);
            } else {
                std::snprintf(line, sizeof(line), "%.12g,%.12g,%.12g,%.12g,%.12g\n", r.t, r.rhs,
                              r.empirical, r.std_error, r.ratio);
            }
            os << line;
        }
    }
};

/// Gradient bound for the general OU case: rhs shape
///   e^{lambda0 (t^1) - theta^+ t} [alpha(c0 (t^1)) + (t^1) S(r0^{-2}) / r0]
/// with t^1 = min(t, 1), modulo one free multiplier on the whole expression;
/// the floor term drops when r0 = infinity. alpha-divergent kinds flag the
/// row Divergent (rhs = inf).
inline BoundReport bound_G(const LowerBoundSpec& spec, double theta, double A_norm, int d,
                           const std::vector<double>& ts, const QuadratureConfig& quad = {}) {
    const OUConstants oc = constants_c0_lambda0(spec, A_norm, d, quad);
    BoundReport rep;
    rep.bound_id = "G";
    rep.constants = {oc.c0, oc.lambda0, theta, spec.r0, spec.S.describe()};
    rep.note = "rhs modulo one free multiplier c1 on the whole expression";
    const double theta_plus = std::max(theta, 0.0);
    const bool floor = spec.has_floor();
    const double floor_term = floor ? spec.S.value(1.0 / (spec.r0 * spec.r0)) / spec.r0 : 0.0;
    for (const double t : ts) {
        if (!(t > 0.0)) throw std::domain_error("bound_G: time grid must be positive");
        BoundRow row;
        row.t = t;
        const double tc = std::min(t, 1.0);
        const AlphaResult a = eval_alpha(spec.S, oc.c0 * tc, quad);
        if (a.divergent) {
            row.divergent = true;
            row.rhs = std::numeric_limits<double>::infinity();
        } else {
            row.rhs = std::exp(oc.lambda0 * tc - theta_plus * t) * (a.value + tc * floor_term);
        }
        rep.rows.push_back(row);
    }
    return rep;
}

/// Sharper A = 0 gradient bound: rhs
///   e^{lambda0 t} [alpha(c0 t) / sqrt(2 pi) + c1 (1 - e^{-t lambda0}) S(r0^{-2}) / (r0 lambda0)]
/// evaluated at c1 = 1; the free multiplier applies to the floor term only,
/// which vanishes when r0 = infinity.
inline BoundReport bound_G2(const LowerBoundSpec& spec, int d, const std::vector<double>& ts,
                            const QuadratureConfig& quad = {}) {
    const OUConstants oc = constants_c0_lambda0(spec, 0.0, d, quad);
    BoundReport rep;
    rep.bound_id = "G2";
    rep.constants = {oc.c0, oc.lambda0, 0.0, spec.r0, spec.S.describe()};
    rep.note = "A = 0 only; free multiplier c1 on the floor term only (here c1 = 1)";
    const bool floor = spec.has_floor();
    const double Sr = floor ? spec.S.value(1.0 / (spec.r0 * spec.r0)) : 0.0;
    for (const double t : ts) {
        if (!(t > 0.0)) throw std::domain_error("bound_G2: time grid must be positive");
        BoundRow row;
        row.t = t;
        const AlphaResult a = eval_alpha(spec.S, oc.c0 * t, quad);
        if (a.divergent) {
            row.divergent = true;
            row.rhs = std::numeric_limits<double>::infinity();
        } else {
            const double first = a.value / std::sqrt(2.0 * std::numbers::pi);
            const double second =
                floor ? -std::expm1(-t * oc.lambda0) * Sr / (spec.r0 * oc.lambda0) : 0.0;
            row.rhs = std::exp(oc.lambda0 * t) * (first + second);
        }
        rep.rows.push_back(row);
    }
    return rep;
}

/// Constant-free bound on |grad P_t^1 f| for ||f|| <= 1:
///   e^{theta^- t} (1 - e^{-lambda0 t}) / lambda0 * int |grad rho_0|.
inline double bound_thm31(const JumpDensity& floor_density, double theta, double lambda0, double t,
                          const QuadratureConfig& quad = {}) {
    if (!(t > 0.0)) throw std::domain_error("bound_thm31: time t must be positive");
    if (lambda0 < 0.0) throw std::domain_error("bound_thm31: lambda0 must be nonnegative");
    const GradIntegralReport g = floor_density.grad_abs_integral(quad);
    if (!g.finite) throw std::domain_error("bound_thm31: floor density gradient is not integrable");
    const double theta_minus = std::max(-theta, 0.0);
    const double jump_factor = lambda0 > 0.0 ? -std::expm1(-lambda0 * t) / lambda0 : t;
    return std::exp(theta_minus * t) * jump_factor * g.value;
}

enum class Cor22Side { Upper, Lower };

/// Gradient bound constants for the subordinated-BM case. The source prints
/// prefactors 1/sqrt(2 pi) (upper) and 1/(sqrt(2) pi) (lower) on the integral
/// int r^{-1/2} e^{-t S(r)} dr, while the Gamma-integral identity yields
/// 1/sqrt(pi) and 1/pi; the equality case S(r) = r confirms the latter. Both
/// are reported; only the verified member is asserted anywhere.
struct Cor22Bound {
    double printed = std::numeric_limits<double>::infinity();
    double verified = std::numeric_limits<double>::infinity();
    bool divergent = true;
};

inline Cor22Bound bound_cor22(const BernsteinFunction& S, double t, Cor22Side side,
                              const QuadratureConfig& quad = {}) {
    const AlphaResult a = eval_alpha(S, t, quad);
    if (a.divergent) return {};
    Cor22Bound b;
    b.divergent = false;
    if (side == Cor22Side::Upper) {
        b.printed = a.value / std::sqrt(2.0 * std::numbers::pi);
        b.verified = a.value / std::sqrt(std::numbers::pi);
    } else {
        b.printed = a.value / (std::sqrt(2.0) * std::numbers::pi);
        b.verified = a.value / std::numbers::pi;
    }
    return b;
}

struct RateFit {
    LineFit fit;
    bool inconclusive = false;  // noisy or nonpositive series entries
};

/// Least-squares slope of log(gradient) against log(t); for an alpha-stable
/// model the expected decay exponent is -1/alpha. Entries with relative
/// standard error above 0.1, or nonpositive values, flag the fit inconclusive
/// (nonpositive entries are excluded from the regression).
inline RateFit fit_decay_rate(const std::vector<double>& ts, const std::vector<double>& gradients,
                              const std::vector<double>& std_errors = {}) {
    if (ts.size() != gradients.size())
        throw std::domain_error("fit_decay_rate: series length mismatch");
    if (!std_errors.empty() && std_errors.size() != ts.size())
        throw std::domain_error("fit_decay_rate: stderr series length mismatch");
    if (ts.size() < 5) throw std::domain_error("fit_decay_rate: need at least 5 grid points");
    RateFit out;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (!(ts[i] > 0.0)) throw std::domain_error("fit_decay_rate: time grid must be positive");
        if (!(gradients[i] > 0.0)) {
            out.inconclusive = true;
            continue;
        }
        if (!std_errors.empty() && std_errors[i] > 0.1 * gradients[i]) out.inconclusive = true;
        lx.push_back(std::log(ts[i]));
        ly.push_back(std::log(gradients[i]));
    }
    if (lx.size() < 2) throw std::domain_error("fit_decay_rate: too few usable points");
    out.fit = fit_line(lx, ly);
    return out;
}

/// The 21-point x grid on [-3, 3] used to approximate sup-over-x quantities.
inline std::vector<double> sup_grid() {
    std::vector<double> xs(21);
    for (int i = 0; i < 21; ++i) xs[static_cast<std::size_t>(i)] = -3.0 + 0.3 * i;
    return xs;
}

/// Empirical sup_x |d/dx P_t f(x)| over the 21-point grid, via the spectral
/// oracle (d = 1).
inline double sup_gradient_spectral(const DensityTable& tab, const TestFunction& f,
                                    const LevyModel& model) {
    const SemigroupValues sg = semigroup_and_gradient(tab, f, sup_grid(), model);
    double m = 0.0;
    for (const double g : sg.gradient) m = std::max(m, std::fabs(g));
    return m;
}

}  // namespace ougrad
