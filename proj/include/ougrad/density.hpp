#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "bernstein.hpp"
#include "linalg.hpp"
#include "quadrature.hpp"
#include "rng.hpp"

namespace ougrad {

/// Surface area of the unit sphere in R^d (omega_1 = 2, omega_2 = 2 pi, ...).
inline double sphere_area(int d) {
    return 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d);
}

/// Minorization data: nu(dz) >= |z|^{-d} S(|z|^{-2}) 1_{|z| < r0} dz.
/// r0 = +inf means no compound-Poisson floor exists (its mass would be zero).
struct LowerBoundSpec {
    BernsteinFunction S = BernsteinFunction::log_kind();
    double r0 = std::numeric_limits<double>::infinity();

    bool has_floor() const { return std::isfinite(r0); }
};

struct GradIntegralReport {
    double value = 0.0;      // int |grad rho|(z) dz
    double mollified = 0.0;  // same with |grad rho| replaced by its sup over eps-balls
    bool finite = true;
};

/// Total mass of the floor density (r0 v |z|)^{-d} S((r0 v |z|)^{-2}):
/// lambda0 = omega_d [ S(r0^{-2})/d + int_0^inf S(r0^{-2} e^{-2s}) ds ],
/// and 0 when r0 = inf.
inline double floor_mass(const LowerBoundSpec& spec, int d, const QuadratureConfig& quad = {}) {
    if (!spec.has_floor()) return 0.0;
    const double v0 = 1.0 / (spec.r0 * spec.r0);
    const QuadResult tail =
        integrate_semi_infinite([&](double s) { return spec.S.value(v0 * std::exp(-2.0 * s)); }, 0.0, quad);
    if (!tail.converged) throw std::runtime_error("floor_mass: tail quadrature failed");
    return sphere_area(d) * (spec.S.value(v0) / d + tail.value);
}

/// Finite-mass isotropic jump density. Catalog of three radial kinds, each
/// exactly samplable: a Gaussian, the plateau-tail floor density
/// rho(z) = (r0 v |z|)^{-d} S((r0 v |z|)^{-2}), and a piecewise-linear radial
/// table. Radius sampling inverts a monotone CDF table (analytic inside the
/// floor plateau); directions are uniform on the sphere.
class JumpDensity {
  public:
    enum class Kind { Gaussian, Floor, RadialTable };

    static JumpDensity gaussian(int dim, double sigma2, double mass = 1.0) {
        if (dim < 1 || sigma2 <= 0.0 || mass <= 0.0)
            throw std::domain_error("JumpDensity::gaussian: need dim >= 1, sigma2 > 0, mass > 0");
        JumpDensity rho;
        rho.kind_ = Kind::Gaussian;
        rho.dim_ = dim;
        rho.sigma2_ = sigma2;
        rho.mass_ = mass;
        return rho;
    }

    static JumpDensity floor_density(const LowerBoundSpec& spec, int dim, const QuadratureConfig& quad = {}) {
        if (!spec.has_floor()) throw std::domain_error("JumpDensity::floor_density: r0 = inf has no floor");
        if (dim < 1 || spec.r0 <= 0.0) throw std::domain_error("JumpDensity::floor_density: need dim >= 1, r0 > 0");
        JumpDensity rho;
        rho.kind_ = Kind::Floor;
        rho.dim_ = dim;
        rho.spec_ = spec;
        rho.build_floor(quad);
        return rho;
    }

    /// Piecewise-linear radial profile on nodes starting at radius 0; the
    /// density is zero beyond the last node. A positive end value therefore
    /// encodes a boundary jump and makes the gradient integral divergent.
    static JumpDensity radial_table(int dim, std::vector<double> radius, std::vector<double> profile) {
        if (dim < 1) throw std::domain_error("JumpDensity::radial_table: need dim >= 1");
        if (radius.size() != profile.size() || radius.size() < 2)
            throw std::domain_error("JumpDensity::radial_table: need >= 2 matching nodes");
        if (radius.front() != 0.0) throw std::domain_error("JumpDensity::radial_table: first radius must be 0");
        for (std::size_t i = 0; i < radius.size(); ++i) {
            if (profile[i] < 0.0) throw std::domain_error("JumpDensity::radial_table: negative profile value");
            if (i > 0 && radius[i] <= radius[i - 1])
                throw std::domain_error("JumpDensity::radial_table: radii must be strictly increasing");
        }
        JumpDensity rho;
        rho.kind_ = Kind::RadialTable;
        rho.dim_ = dim;
        rho.tab_r_ = std::move(radius);
        rho.tab_p_ = std::move(profile);
        rho.build_table();
        return rho;
    }

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    double mass() const { return mass_; }
    const LowerBoundSpec& lower_bound() const { return spec_; }
    double gaussian_sigma2() const {
        if (kind_ != Kind::Gaussian) throw std::domain_error("JumpDensity: not a Gaussian kind");
        return sigma2_;
    }
    /// Radius beyond which the density vanishes (inf for Gaussian and floor).
    double support_radius() const {
        return kind_ == Kind::RadialTable ? tab_r_.back() : std::numeric_limits<double>::infinity();
    }

    /// Radial profile p with rho(z) = p(|z|).
    double radial_value(double r) const {
        if (r < 0.0) throw std::domain_error("JumpDensity: negative radius");
        switch (kind_) {
            case Kind::Gaussian:
                return mass_ * std::pow(2.0 * std::numbers::pi * sigma2_, -0.5 * dim_) *
                       std::exp(-0.5 * r * r / sigma2_);
            case Kind::Floor: {
                const double rr = std::max(r, spec_.r0);
                return std::pow(rr, -dim_) * spec_.S.value(1.0 / (rr * rr));
            }
            case Kind::RadialTable: {
                if (r > tab_r_.back()) return 0.0;
                const std::size_t i = table_segment(r);
                return tab_p_[i] + tab_slope_[i] * (r - tab_r_[i]);
            }
        }
        return 0.0;
    }

    /// dp/dr; zero on the floor plateau and outside the table support.
    double radial_derivative(double r) const {
        if (r < 0.0) throw std::domain_error("JumpDensity: negative radius");
        switch (kind_) {
            case Kind::Gaussian:
                return -r / sigma2_ * radial_value(r);
            case Kind::Floor: {
                if (r <= spec_.r0) return 0.0;
                const double v = 1.0 / (r * r);
                return -std::pow(r, -dim_ - 1) * (dim_ * spec_.S.value(v) + 2.0 * v * spec_.S.derivative(v));
            }
            case Kind::RadialTable: {
                if (r >= tab_r_.back()) return 0.0;
                return tab_slope_[table_segment(r)];
            }
        }
        return 0.0;
    }

    double value(const Vec& z) const { return radial_value(norm2(z)); }

    Vec grad_log(const Vec& z) const {
        const double r = norm2(z);
        const double p = radial_value(r);
        if (p <= 0.0) throw std::domain_error("JumpDensity::grad_log: density vanishes at z");
        Vec g(dim_, 0.0);
        if (r == 0.0) return g;  // radial profiles are flat at the origin
        const double slope = radial_derivative(r) / p;
        for (int i = 0; i < dim_; ++i) g[i] = slope * z[i] / r;
        return g;
    }

    Vec grad(const Vec& z) const {
        Vec g = grad_log(z);
        const double p = value(z);
        for (double& x : g) x *= p;
        return g;
    }

    /// Radial CDF of the normalized density rho/mass, as used by the sampler
    /// (analytic plateau piece + linear interpolation between table nodes).
    double radial_cdf(double r) const {
        if (r < 0.0) return 0.0;
        switch (kind_) {
            case Kind::Gaussian: {
                // quadrature on the radial mass density; rarely on a hot path
                const auto f = [&](double s) { return sphere_area(dim_) * std::pow(s, dim_ - 1) * radial_value(s); };
                return std::min(1.0, integrate(f, 0.0, r).value / mass_);
            }
            case Kind::Floor:
                if (r <= spec_.r0) return cdf_[0] * std::pow(r / spec_.r0, dim_);
                return interp_cdf(radii_, cdf_, r);
            case Kind::RadialTable:
                return interp_cdf(radii_, cdf_, r);
        }
        return 0.0;
    }

    double sample_radius(RngStream& rng) const {
        if (kind_ == Kind::Gaussian) {
            // chi-distributed radius via the Gaussian vector itself
            double s = 0.0;
            for (int i = 0; i < dim_; ++i) {
                const double x = rng.normal();
                s += x * x;
            }
            return std::sqrt(sigma2_ * s);
        }
        const double u = rng.uniform();
        if (kind_ == Kind::Floor && u < cdf_[0]) return spec_.r0 * std::pow(u / cdf_[0], 1.0 / dim_);
        // invert the monotone CDF table, linear in CDF space
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        if (it == cdf_.end()) return radii_.back();
        const std::size_t j = static_cast<std::size_t>(it - cdf_.begin());
        if (j == 0) return radii_.front() * (cdf_[0] > 0.0 ? u / cdf_[0] : 1.0);
        const double span = cdf_[j] - cdf_[j - 1];
        const double frac = span > 0.0 ? (u - cdf_[j - 1]) / span : 0.0;
        return radii_[j - 1] + frac * (radii_[j] - radii_[j - 1]);
    }

    Vec sample(RngStream& rng) const {
        if (kind_ == Kind::Gaussian) {
            Vec z(dim_);
            const double sd = std::sqrt(sigma2_);
            for (int i = 0; i < dim_; ++i) z[i] = sd * rng.normal();
            return z;
        }
        const double r = sample_radius(rng);
        Vec z = rng.sphere_direction(dim_);
        for (double& x : z) x *= r;
        return z;
    }

    /// int |grad rho| dz together with the eps-mollified variant
    /// int sup_{|x-z|<=eps} |grad rho|(x) dz (sup taken over a local radial
    /// grid). Table densities with a boundary jump or a near-vertical segment
    /// are reported divergent.
    GradIntegralReport grad_abs_integral(const QuadratureConfig& quad = {}, double eps = -1.0) const {
        GradIntegralReport rep;
        const double inf = std::numeric_limits<double>::infinity();
        if (kind_ == Kind::RadialTable && !table_differentiable_) {
            rep.value = inf;
            rep.mollified = inf;
            rep.finite = false;
            return rep;
        }
        if (eps <= 0.0) eps = default_mollifier_eps();
        const auto shell = [&](double r) { return sphere_area(dim_) * std::pow(r, dim_ - 1); };
        const auto g = [&](double r) { return std::fabs(radial_derivative(r)); };
        const auto g_sup = [&](double r) {
            double m = 0.0;
            for (int k = -4; k <= 4; ++k) m = std::max(m, g(std::max(0.0, r + k * eps / 4.0)));
            return m;
        };
        switch (kind_) {
            case Kind::Gaussian: {
                rep.value = integrate_semi_infinite([&](double r) { return shell(r) * g(r); }, 0.0, quad).value;
                rep.mollified = integrate_semi_infinite([&](double r) { return shell(r) * g_sup(r); }, 0.0, quad).value;
                break;
            }
            case Kind::Floor: {
                rep.value = integrate_semi_infinite([&](double r) { return shell(r) * g(r); }, spec_.r0, quad,
                                                    std::max(spec_.r0, 1.0))
                                .value;
                rep.mollified = integrate_semi_infinite([&](double r) { return shell(r) * g_sup(r); },
                                                        std::max(0.0, spec_.r0 - eps), quad, std::max(spec_.r0, 1.0))
                                    .value;
                break;
            }
            case Kind::RadialTable: {
                // exact per segment: slope is constant there
                double total = 0.0;
                for (std::size_t i = 0; i + 1 < tab_r_.size(); ++i)
                    total += sphere_area(dim_) * std::fabs(tab_slope_[i]) *
                             (std::pow(tab_r_[i + 1], dim_) - std::pow(tab_r_[i], dim_)) / dim_;
                rep.value = total;
                rep.mollified = integrate([&](double r) { return shell(r) * g_sup(r); }, 0.0, tab_r_.back() + eps, quad).value;
                break;
            }
        }
        rep.finite = std::isfinite(rep.value) && std::isfinite(rep.mollified);
        return rep;
    }

  private:
    void build_floor(const QuadratureConfig& quad) {
        const double r0 = spec_.r0;
        const double omega = sphere_area(dim_);
        const double v0 = 1.0 / (r0 * r0);
        const double plateau_mass = omega * spec_.S.value(v0) / dim_;
        mass_ = floor_mass(spec_, dim_, quad);

        // Radius cap: residual mass beyond R below 1e-10 of the total.
        double rmax = 2.0 * r0;
        const auto tail_beyond = [&](double R) {
            const double vr = 1.0 / (R * R);
            return omega *
                   integrate_semi_infinite([&](double s) { return spec_.S.value(vr * std::exp(-2.0 * s)); }, 0.0, quad)
                       .value;
        };
        int doublings = 0;
        while (tail_beyond(rmax) > 1e-10 * mass_ && doublings < 400) {
            rmax *= 2.0;
            ++doublings;
        }
        if (doublings >= 400) throw std::runtime_error("floor_density: tail too heavy for sampling table");

        // 2048 log-spaced radii over [r0, rmax]; cumulative mass per segment by
        // one Kronrod panel each (the radial mass density omega_d S(r^{-2})/r
        // varies slowly on a log grid).
        const int n = 2048;
        radii_.resize(n);
        cdf_.resize(n);
        const double step = std::log(rmax / r0) / (n - 1);
        for (int i = 0; i < n; ++i) radii_[i] = r0 * std::exp(step * i);
        const auto mass_density = [&](double r) { return omega * spec_.S.value(1.0 / (r * r)) / r; };
        double acc = plateau_mass;
        cdf_[0] = plateau_mass;
        for (int i = 1; i < n; ++i) {
            double v, e;
            detail::gk15_panel(mass_density, radii_[i - 1], radii_[i], v, e);
            acc += v;
            cdf_[i] = acc;
        }
        if (std::fabs(acc - mass_) > 1e-8 * mass_)
            throw std::runtime_error("floor_density: sampling table mass disagrees with lambda0");
        for (double& c : cdf_) c /= acc;  // the <= 1e-10 residual tail is dropped
    }

    void build_table() {
        const double omega = sphere_area(dim_);
        const std::size_t m = tab_r_.size();
        tab_slope_.resize(m - 1);
        double steepest = 0.0;
        for (std::size_t i = 0; i + 1 < m; ++i) {
            tab_slope_[i] = (tab_p_[i + 1] - tab_p_[i]) / (tab_r_[i + 1] - tab_r_[i]);
            steepest = std::max(steepest, std::fabs(tab_slope_[i]));
        }
        const double scale = *std::max_element(tab_p_.begin(), tab_p_.end()) / tab_r_.back();
        table_differentiable_ = tab_p_.back() == 0.0 && (scale <= 0.0 || steepest <= 1e6 * scale);

        // exact cumulative mass of the piecewise-linear profile
        const auto seg_mass = [&](std::size_t i, double r) {
            const double a = tab_p_[i] - tab_slope_[i] * tab_r_[i];
            const double b = tab_slope_[i];
            return omega * (a * (std::pow(r, dim_) - std::pow(tab_r_[i], dim_)) / dim_ +
                            b * (std::pow(r, dim_ + 1) - std::pow(tab_r_[i], dim_ + 1)) / (dim_ + 1));
        };
        std::vector<double> node_cum(m, 0.0);
        for (std::size_t i = 0; i + 1 < m; ++i) node_cum[i + 1] = node_cum[i] + seg_mass(i, tab_r_[i + 1]);
        mass_ = node_cum.back();
        if (mass_ <= 0.0) throw std::domain_error("JumpDensity::radial_table: zero total mass");

        // fine uniform inversion grid with exact CDF values at the nodes
        const int n = 2048;
        radii_.resize(n);
        cdf_.resize(n);
        for (int j = 0; j < n; ++j) {
            const double r = tab_r_.back() * j / (n - 1.0);
            const std::size_t i = table_segment(r);
            radii_[j] = r;
            cdf_[j] = (node_cum[i] + seg_mass(i, r)) / mass_;
        }
        cdf_.back() = 1.0;
    }

    std::size_t table_segment(double r) const {
        const auto it = std::upper_bound(tab_r_.begin(), tab_r_.end(), r);
        const std::size_t j = static_cast<std::size_t>(it - tab_r_.begin());
        return std::min(std::max<std::size_t>(j, 1) - 1, tab_r_.size() - 2);
    }

    static double interp_cdf(const std::vector<double>& xs, const std::vector<double>& fs, double x) {
        if (x <= xs.front()) return fs.front();
        if (x >= xs.back()) return 1.0;
        const auto it = std::upper_bound(xs.begin(), xs.end(), x);
        const std::size_t j = static_cast<std::size_t>(it - xs.begin());
        const double frac = (x - xs[j - 1]) / (xs[j] - xs[j - 1]);
        return fs[j - 1] + frac * (fs[j] - fs[j - 1]);
    }

    double default_mollifier_eps() const {
        switch (kind_) {
            case Kind::Gaussian:
                return 0.01 * std::sqrt(sigma2_);
            case Kind::Floor:
                return 0.01 * spec_.r0;
            case Kind::RadialTable:
                return 0.005 * tab_r_.back();
        }
        return 0.01;
    }

    Kind kind_ = Kind::Gaussian;
    int dim_ = 1;
    double mass_ = 1.0;
    double sigma2_ = 1.0;        // Gaussian
    LowerBoundSpec spec_;        // Floor
    std::vector<double> tab_r_;  // RadialTable nodes
    std::vector<double> tab_p_;
    std::vector<double> tab_slope_;
    bool table_differentiable_ = true;
    std::vector<double> radii_;  // sampling table (Floor: log-spaced tail; Table: uniform)
    std::vector<double> cdf_;
};

}  // namespace ougrad
