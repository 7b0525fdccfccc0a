#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "model.hpp"
#include "rng.hpp"

namespace ougrad {

struct CompoundPoissonPath {
    double t = 0.0;
    std::vector<double> times;  // sorted jump times in [0, t]
    std::vector<Vec> sizes;

    long count() const { return static_cast<long>(times.size()); }
};

/// N_t ~ Poisson(mass * t), times sorted uniforms, sizes i.i.d. rho/mass.
/// Draw order: count, all times (then sorted), then sizes.
inline CompoundPoissonPath sample_compound_poisson(const JumpDensity& rho, double t, RngStream& rng) {
    if (t < 0.0) throw std::domain_error("sample_compound_poisson: negative horizon");
    if (rho.mass() <= 0.0) throw std::domain_error("sample_compound_poisson: nonpositive jump mass");
    CompoundPoissonPath path;
    path.t = t;
    if (t == 0.0) return path;
    const long n = rng.poisson(rho.mass() * t);
    path.times.resize(n);
    for (long i = 0; i < n; ++i) path.times[i] = rng.uniform(0.0, t);
    std::sort(path.times.begin(), path.times.end());
    path.sizes.reserve(n);
    for (long i = 0; i < n; ++i) path.sizes.push_back(rho.sample(rng));
    return path;
}

/// True when sample_subordinator supports S: Power (beta = 1 deterministic,
/// beta < 1 stable via Kanter), Log (gamma increments), and positive
/// combinations of these.
inline bool subordinator_samplable(const BernsteinFunction& s) {
    switch (s.kind()) {
        case BernsteinKind::Power:
        case BernsteinKind::Log:
            return true;
        case BernsteinKind::ScaledSum:
            for (const BernsteinFunction& c : s.children())
                if (!subordinator_samplable(c)) return false;
            return true;
        default:
            return false;
    }
}

/// One draw of mu_t^S, the subordinator marginal with E e^{-lambda s} =
/// e^{-t S(lambda)}. Kanter's representation is used for the stable kinds,
/// computed in log space for stability near beta -> 1.
inline double sample_subordinator(const BernsteinFunction& s, double t, RngStream& rng) {
    if (t < 0.0) throw std::domain_error("sample_subordinator: negative time");
    if (t == 0.0) return 0.0;
    switch (s.kind()) {
        case BernsteinKind::Power: {
            const double a = s.param();
            if (a == 1.0) return t;  // S(r) = r: deterministic drift
            double th, sth;
            do {
                th = rng.uniform(0.0, std::numbers::pi);
                sth = std::sin(th);
            } while (sth <= 0.0);
            const double w = rng.exponential();
            const double log_a = std::log(std::sin((1.0 - a) * th)) + (a / (1.0 - a)) * std::log(std::sin(a * th)) -
                                 (1.0 / (1.0 - a)) * std::log(sth);
            // unit draw scaled by t^{1/a} (self-similarity of the stable law)
            return std::pow(t, 1.0 / a) * std::exp(((1.0 - a) / a) * (log_a - std::log(w)));
        }
        case BernsteinKind::Log:
            return rng.gamma(t);  // shape t, unit scale: E e^{-lambda s} = (1+lambda)^{-t}
        case BernsteinKind::ScaledSum: {
            // subordinator for w S at time t equals the one for S at time t w
            double sum = 0.0;
            for (std::size_t i = 0; i < s.children().size(); ++i)
                sum += sample_subordinator(s.children()[i], t * s.weights()[i], rng);
            return sum;
        }
        default:
            throw std::domain_error("sample_subordinator: " + s.describe() + " is not in the sampler catalog");
    }
}

/// Subordinated Brownian motion: draw s ~ mu_t^S, then Normal(0, 2s I_d).
/// Characteristic function e^{-t S(|u|^2)}.
inline Vec sample_subordinated_bm(const BernsteinFunction& s, double t, int d, RngStream& rng) {
    const double sub = sample_subordinator(s, t, rng);
    const double sd = std::sqrt(2.0 * sub);
    Vec z(d);
    for (int i = 0; i < d; ++i) z[i] = sd * rng.normal();
    return z;
}

struct OUNoise {
    Vec y;                           // everything except the e^{tA} x term
    CompoundPoissonPath floor_path;  // empty when the model has no floor component
};

struct OUEndpoint {
    Vec x_t;
    CompoundPoissonPath floor_path;
};

/// Endpoint sampler for dX = AX dt + dL at a fixed horizon t:
///   X_t = e^{tA} x + int_0^t e^{(t-s)A} b ds + N(0, Sigma_t) + jump terms.
/// The noise part is independent of x, so common-random-number coupling across
/// initial points reuses one OUNoise draw. Draw order per sample: Gaussian
/// vector, then jump components in declaration order (CP: count/times/sizes;
/// stable: one subordinated-BM draw per grid step).
class OUSampler {
  public:
    OUSampler(const LevyModel& model, double t, const QuadratureConfig& quad = {})
        : model_(&model), t_(t) {
        (void)quad;
        if (t < 0.0) throw std::domain_error("OUSampler: negative horizon");
        const int d = model.dim();
        flow_ = expm(t * model.A());

        // Sigma_t = int_0^t e^{sA} (2Q) e^{sA*} ds, Simpson on 129 nodes,
        // then a PSD-projected factor for the Gaussian draw.
        has_gauss_ = model.has_gaussian_part() && t > 0.0;
        if (has_gauss_) {
            const Mat twoQ = 2.0 * model.Q();
            if (model.A_is_zero()) {
                gauss_factor_ = psd_factor(t * twoQ);
            } else {
                const auto integrand = [&](double s) {
                    const Mat e = expm(s * model.A());
                    return e * twoQ * e.transpose();
                };
                gauss_factor_ = psd_factor(simpson(integrand, 0.0, t, 128, Mat::zero(d, d)));
            }
        }

        drift_ = Vec(d, 0.0);
        if (norm2(model.b()) > 0.0 && t > 0.0) {
            if (model.A_is_zero()) {
                drift_ = t * model.b();
            } else {
                const auto integrand = [&](double s) { return expm(s * model.A()) * model.b(); };
                drift_ = simpson(integrand, 0.0, t, 128, Vec(d, 0.0));
            }
        }

        // stable components with A != 0: flow factors at step midpoints
        for (const JumpComponent& c : model.jumps()) {
            if (c.kind != JumpComponent::Kind::StableIsotropic || model.A_is_zero()) continue;
            stable_steps_ = std::max<long>(1, static_cast<long>(std::ceil(256.0 * t)));
            if (stable_steps_ > 1000000)
                throw std::runtime_error("OUSampler: stable-with-A grid too fine, horizon too long");
            const double ds = t / stable_steps_;
            stable_flows_.reserve(stable_steps_);
            for (long k = 0; k < stable_steps_; ++k)
                stable_flows_.push_back(expm((t - (k + 0.5) * ds) * model.A()));
            break;  // one grid serves all stable components
        }
    }

    const LevyModel& model() const { return *model_; }
    double horizon() const { return t_; }
    const Mat& flow() const { return flow_; }
    const Vec& drift() const { return drift_; }

    /// Discretization bias scale ||A|| * ds for stable components; 0 when the
    /// stable part is sampled exactly (A = 0 or absent).
    double stable_grid_bias() const {
        return stable_steps_ > 0 ? model_->A_norm() * (t_ / stable_steps_) : 0.0;
    }

    OUNoise sample_noise(RngStream& rng) const {
        const int d = model_->dim();
        OUNoise out;
        out.y = drift_;
        if (has_gauss_) {
            Vec z(d);
            for (int i = 0; i < d; ++i) z[i] = rng.normal();
            out.y += gauss_factor_ * z;
        }
        for (const JumpComponent& c : model_->jumps()) {
            switch (c.kind) {
                case JumpComponent::Kind::FiniteDensity:
                case JumpComponent::Kind::FloorCP: {
                    CompoundPoissonPath path = sample_compound_poisson(c.density, t_, rng);
                    for (long i = 0; i < path.count(); ++i) {
                        if (model_->A_is_zero())
                            out.y += path.sizes[i];
                        else
                            out.y += expm((t_ - path.times[i]) * model_->A()) * path.sizes[i];
                    }
                    if (c.is_floor) out.floor_path = std::move(path);
                    break;
                }
                case JumpComponent::Kind::StableIsotropic: {
                    const BernsteinFunction half = BernsteinFunction::power(0.5 * c.stable_alpha);
                    if (model_->A_is_zero()) {
                        // exact: scale folds into the subordinator clock
                        out.y += sample_subordinated_bm(half, t_ * c.stable_scale, d, rng);
                    } else {
                        const double ds = t_ / stable_steps_;
                        for (long k = 0; k < stable_steps_; ++k)
                            out.y += stable_flows_[k] * sample_subordinated_bm(half, ds * c.stable_scale, d, rng);
                    }
                    break;
                }
            }
        }
        if (!model_->has_floor()) out.floor_path.t = t_;
        return out;
    }

    Vec apply_flow(const Vec& x) const { return flow_ * x; }

    OUEndpoint sample(const Vec& x, RngStream& rng) const {
        OUNoise noise = sample_noise(rng);
        OUEndpoint ep;
        ep.x_t = flow_ * x + noise.y;
        ep.floor_path = std::move(noise.floor_path);
        return ep;
    }

  private:
    const LevyModel* model_;
    double t_;
    Mat flow_;
    Vec drift_;
    bool has_gauss_ = false;
    Mat gauss_factor_;
    long stable_steps_ = 0;
    std::vector<Mat> stable_flows_;
};

/// One-shot endpoint draw; estimator loops should hold an OUSampler instead.
inline OUEndpoint integrate_ou(const LevyModel& model, const Vec& x, double t, RngStream& rng,
                               const QuadratureConfig& quad = {}) {
    return OUSampler(model, t, quad).sample(x, rng);
}

}  // namespace ougrad
