#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <vector>

#include "density.hpp"
#include "linalg.hpp"
#include "quadrature.hpp"

namespace ougrad {

namespace detail {

/// Angular average of cos(x <e1, s>) over the unit sphere in R^d:
/// cos x (d=1), J0(x) (d=2), sinc x (d=3), Bessel form in general.
inline double angular_cos_average(int d, double x) {
    const double ax = std::fabs(x);
    if (ax < 1e-2) {
        // even-moment series of the first sphere coordinate, error O(x^8)
        const double m2 = 1.0 / d, m4 = 3.0 / (d * (d + 2.0)), m6 = 15.0 / (d * (d + 2.0) * (d + 4.0));
        const double x2 = x * x;
        return 1.0 - x2 * (m2 / 2.0) + x2 * x2 * (m4 / 24.0) - x2 * x2 * x2 * (m6 / 720.0);
    }
    if (d == 1) return std::cos(ax);
    if (d == 3) return std::sin(ax) / ax;
    return std::tgamma(0.5 * d) * std::pow(2.0 / ax, 0.5 * d - 1.0) * std::cyl_bessel_j(0.5 * d - 1.0, ax);
}

/// 1 - angular_cos_average, arranged to avoid cancellation near x = 0.
inline double one_minus_angular_cos(int d, double x) {
    const double ax = std::fabs(x);
    if (ax < 1e-2) {
        const double m2 = 1.0 / d, m4 = 3.0 / (d * (d + 2.0)), m6 = 15.0 / (d * (d + 2.0) * (d + 4.0));
        const double x2 = x * x;
        return x2 * (m2 / 2.0) - x2 * x2 * (m4 / 24.0) + x2 * x2 * x2 * (m6 / 720.0);
    }
    if (d == 1) {
        const double s = std::sin(0.5 * ax);
        return 2.0 * s * s;
    }
    return 1.0 - angular_cos_average(d, ax);
}

}  // namespace detail

/// One exactly samplable piece of the Levy measure: a finite-mass density
/// (compound Poisson), an isotropic stable part with symbol -scale |u|^alpha,
/// or the compound-Poisson floor extracted from a LowerBoundSpec. At most one
/// component may be flagged as the floor; it is the one whose jumps drive the
/// jump-restricted semigroup and the derivative weights.
struct JumpComponent {
    enum class Kind { FiniteDensity, StableIsotropic, FloorCP };

    Kind kind = Kind::FiniteDensity;
    JumpDensity density;        // FiniteDensity / FloorCP
    double stable_alpha = 0.0;  // StableIsotropic
    double stable_scale = 0.0;
    bool is_floor = false;

    static JumpComponent finite_density(JumpDensity rho, bool is_floor = false) {
        JumpComponent c;
        c.kind = Kind::FiniteDensity;
        c.density = std::move(rho);
        c.is_floor = is_floor;
        return c;
    }

    static JumpComponent stable_isotropic(double alpha, double scale) {
        if (alpha <= 0.0 || alpha >= 2.0) throw std::domain_error("stable_isotropic: alpha must be in (0,2)");
        if (scale <= 0.0) throw std::domain_error("stable_isotropic: scale must be positive");
        JumpComponent c;
        c.kind = Kind::StableIsotropic;
        c.stable_alpha = alpha;
        c.stable_scale = scale;
        return c;
    }

    static JumpComponent floor_cp(const LowerBoundSpec& spec, int dim, const QuadratureConfig& quad = {}) {
        JumpComponent c;
        c.kind = Kind::FloorCP;
        c.density = JumpDensity::floor_density(spec, dim, quad);
        c.is_floor = true;
        return c;
    }
};

/// The OU model dX = AX dt + dL with L determined by (b, Q, jump components).
/// theta is the contraction rate: the largest value with A <= -theta I.
class LevyModel {
  public:
    LevyModel(Mat A, Vec b, Mat Q, std::vector<JumpComponent> jumps,
              std::optional<LowerBoundSpec> lower_bound = std::nullopt)
        : A_(std::move(A)), b_(std::move(b)), Q_(std::move(Q)), jumps_(std::move(jumps)),
          lower_bound_(std::move(lower_bound)) {
        dim_ = A_.rows();
        if (dim_ < 1 || A_.cols() != dim_) throw std::domain_error("LevyModel: A must be square");
        if (static_cast<int>(b_.size()) != dim_) throw std::domain_error("LevyModel: b dimension mismatch");
        if (Q_.rows() != dim_ || Q_.cols() != dim_) throw std::domain_error("LevyModel: Q dimension mismatch");
        const Mat Qa = Q_ - Q_.transpose();
        if (Qa.max_abs() > 1e-12 * std::max(1.0, Q_.max_abs())) throw std::domain_error("LevyModel: Q not symmetric");
        const SymEig eq = sym_eig(Q_);
        if (eq.values.front() < -1e-12) throw std::domain_error("LevyModel: Q not positive semidefinite");

        theta_ = contraction_rate(A_);
        if (theta_ == 0.0) theta_ = 0.0;  // normalize -0
        Mat shifted = sym_part(A_);
        for (int i = 0; i < dim_; ++i) shifted(i, i) += theta_;
        if (sym_eig(shifted).values.back() > 1e-12) throw std::runtime_error("LevyModel: contraction rate inconsistent");
        A_norm_ = op_norm(A_);

        floor_idx_ = -1;
        for (std::size_t i = 0; i < jumps_.size(); ++i) {
            const JumpComponent& c = jumps_[i];
            if (c.kind != JumpComponent::Kind::StableIsotropic && c.density.dim() != dim_)
                throw std::domain_error("LevyModel: jump density dimension mismatch");
            if (c.is_floor) {
                if (floor_idx_ >= 0) throw std::domain_error("LevyModel: multiple floor components");
                floor_idx_ = static_cast<int>(i);
            }
        }
        // A floor built from the (C1) data must agree with it.
        if (lower_bound_ && floor_idx_ >= 0 && jumps_[floor_idx_].kind == JumpComponent::Kind::FloorCP) {
            const LowerBoundSpec& fs = jumps_[floor_idx_].density.lower_bound();
            if (fs.r0 != lower_bound_->r0 || fs.S.describe() != lower_bound_->S.describe())
                throw std::domain_error("LevyModel: floor component disagrees with lower_bound");
        }
    }

    int dim() const { return dim_; }
    const Mat& A() const { return A_; }
    const Vec& b() const { return b_; }
    const Mat& Q() const { return Q_; }
    double theta() const { return theta_; }
    double theta_plus() const { return std::max(theta_, 0.0); }
    double theta_minus() const { return std::max(-theta_, 0.0); }
    double A_norm() const { return A_norm_; }
    const std::vector<JumpComponent>& jumps() const { return jumps_; }
    const std::optional<LowerBoundSpec>& lower_bound() const { return lower_bound_; }

    bool has_floor() const { return floor_idx_ >= 0; }
    int floor_index() const { return floor_idx_; }
    const JumpComponent& floor_component() const {
        if (floor_idx_ < 0) throw std::domain_error("LevyModel: no floor component");
        return jumps_[floor_idx_];
    }
    const JumpDensity& floor_density() const { return floor_component().density; }

    bool has_gaussian_part() const { return Q_.max_abs() > 0.0; }
    bool A_is_zero() const { return A_.max_abs() == 0.0; }

  private:
    int dim_ = 0;
    Mat A_;
    Vec b_;
    Mat Q_;
    std::vector<JumpComponent> jumps_;
    std::optional<LowerBoundSpec> lower_bound_;
    double theta_ = 0.0;
    double A_norm_ = 0.0;
    int floor_idx_ = -1;
};

/// Levy symbol eta(u) = i<u,b> - <Qu,u> + sum of jump contributions. All
/// catalog densities are isotropic, so their compensator terms vanish and the
/// jump integrals reduce to the real radial form
/// omega_d int r^{d-1} p(r) (Lambda_d(r|u|) - 1) dr.
inline std::complex<double> symbol_eta(const LevyModel& m, const Vec& u, const QuadratureConfig& quad = {}) {
    for (double x : u)
        if (!std::isfinite(x)) throw std::domain_error("symbol_eta: non-finite u");
    const int d = m.dim();
    const double r = norm2(u);
    double re = -dot(m.Q() * u, u);
    double im = dot(u, m.b());
    for (const JumpComponent& c : m.jumps()) {
        if (c.kind == JumpComponent::Kind::StableIsotropic) {
            if (r > 0.0) re -= c.stable_scale * std::pow(r, c.stable_alpha);
            continue;
        }
        if (r == 0.0) continue;
        const JumpDensity& rho = c.density;
        if (rho.kind() == JumpDensity::Kind::Gaussian) {
            re += rho.mass() * (std::exp(-0.5 * rho.gaussian_sigma2() * r * r) - 1.0);
            continue;
        }
        const double omega = sphere_area(d);
        const auto integrand = [&](double s) {
            return -omega * std::pow(s, d - 1) * rho.radial_value(s) * detail::one_minus_angular_cos(d, s * r);
        };
        if (rho.kind() == JumpDensity::Kind::Floor) {
            const double r0 = rho.lower_bound().r0;
            re += integrate(integrand, 0.0, r0, quad).value;
            const double w0 = std::min(std::max(r0, 1e-3), std::numbers::pi / (4.0 * std::max(r, 1e-6)));
            re += integrate_semi_infinite(integrand, r0, quad, w0).value;
        } else {
            re += integrate(integrand, 0.0, rho.support_radius(), quad).value;
        }
    }
    return {re, im};
}

/// log mu_t(z) = int_0^t eta(e^{s A^*} z) ds, the characteristic exponent of
/// the OU convolution kernel. Real part clamped at 0 (it is <= 0 exactly).
inline std::complex<double> integrated_symbol(const LevyModel& m, double t, const Vec& z,
                                              const QuadratureConfig& quad = {}) {
    if (t <= 0.0) throw std::domain_error("integrated_symbol: t must be positive");
    std::complex<double> total;
    if (m.A_is_zero()) {
        total = t * symbol_eta(m, z, quad);
    } else {
        const Mat At = m.A().transpose();
        const auto eta_s = [&](double s) { return symbol_eta(m, expm(s * At) * z, quad); };
        const QuadResult re = integrate([&](double s) { return eta_s(s).real(); }, 0.0, t, quad);
        const QuadResult im = integrate([&](double s) { return eta_s(s).imag(); }, 0.0, t, quad);
        if (!re.converged || !im.converged)
            throw std::runtime_error("integrated_symbol: s-quadrature did not converge");
        total = {re.value, im.value};
    }
    if (total.real() > 1e-8) throw std::runtime_error("integrated_symbol: positive real part, quadrature failure");
    return {std::min(total.real(), 0.0), total.imag()};
}

struct OUConstants {
    double c0 = 0.0;
    double lambda0 = 0.0;
};

/// c0 = int_{|z| <= e^{-||A||}} (1 - cos z_1) |z|^{-d} dz and the floor mass
/// lambda0; the two model constants entering every gradient bound.
inline OUConstants constants_c0_lambda0(const LowerBoundSpec& spec, double A_norm, int d,
                                        const QuadratureConfig& quad = {}) {
    if (d < 1) throw std::domain_error("constants_c0_lambda0: d must be >= 1");
    OUConstants out;
    const double R = std::exp(-A_norm);
    const auto integrand = [&](double r) { return detail::one_minus_angular_cos(d, r) / r; };
    const QuadResult c0 = integrate(integrand, 0.0, R, quad);
    if (!c0.converged) throw std::runtime_error("constants_c0_lambda0: c0 quadrature failed");
    out.c0 = sphere_area(d) * c0.value;
    out.lambda0 = floor_mass(spec, d, quad);
    return out;
}

}  // namespace ougrad
