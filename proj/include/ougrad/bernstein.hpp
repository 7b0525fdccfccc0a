#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "quadrature.hpp"

namespace ougrad {

enum class BernsteinKind { Power, Log, LogPower, ScaledSum, PowerComposite };

/// Catalog Bernstein function with S(0) = 0. Closed-form value and derivative
/// per kind; arbitrary user closures are deliberately not representable.
///
///   Power(beta)       S(r) = r^beta,                      beta in (0, 1]
///   Log               S(r) = log(1 + r)
///   LogPower(eps)     S(r) = log^{1+eps}(1 + r^{1/(1+eps)})
///   ScaledSum         S(r) = sum_i w_i S_i(r),            w_i > 0
///   PowerComposite    S(r) = B(r^{1/delta})^delta,        delta > 1
class BernsteinFunction {
  public:
    static BernsteinFunction power(double beta) {
        if (beta <= 0.0 || beta > 1.0) throw std::domain_error("BernsteinFunction::power: beta must be in (0,1]");
        BernsteinFunction s;
        s.kind_ = BernsteinKind::Power;
        s.param_ = beta;
        return s;
    }
    static BernsteinFunction log_kind() {
        BernsteinFunction s;
        s.kind_ = BernsteinKind::Log;
        return s;
    }
    static BernsteinFunction log_power(double eps) {
        if (eps <= 0.0) throw std::domain_error("BernsteinFunction::log_power: eps must be positive");
        BernsteinFunction s;
        s.kind_ = BernsteinKind::LogPower;
        s.param_ = eps;
        return s;
    }
    static BernsteinFunction scaled_sum(std::vector<std::pair<double, BernsteinFunction>> terms) {
        if (terms.empty()) throw std::domain_error("BernsteinFunction::scaled_sum: empty term list");
        BernsteinFunction s;
        s.kind_ = BernsteinKind::ScaledSum;
        for (auto& [w, f] : terms) {
            if (w <= 0.0) throw std::domain_error("BernsteinFunction::scaled_sum: weights must be positive");
            s.weights_.push_back(w);
            s.children_.push_back(std::move(f));
        }
        return s;
    }

    BernsteinKind kind() const { return kind_; }
    double param() const { return param_; }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<BernsteinFunction>& children() const { return children_; }

    double value(double r) const {
        if (r < 0.0) throw std::domain_error("BernsteinFunction: r must be nonnegative");
        switch (kind_) {
            case BernsteinKind::Power:
                return std::pow(r, param_);
            case BernsteinKind::Log:
                return std::log1p(r);
            case BernsteinKind::LogPower: {
                const double q = std::pow(r, 1.0 / (1.0 + param_));
                return std::pow(std::log1p(q), 1.0 + param_);
            }
            case BernsteinKind::ScaledSum: {
                double s = 0.0;
                for (std::size_t i = 0; i < children_.size(); ++i) s += weights_[i] * children_[i].value(r);
                return s;
            }
            case BernsteinKind::PowerComposite: {
                const double q = std::pow(r, 1.0 / param_);
                return std::pow(children_[0].value(q), param_);
            }
        }
        return 0.0;
    }

    double derivative(double r) const {
        if (r <= 0.0) throw std::domain_error("BernsteinFunction: derivative needs r > 0");
        switch (kind_) {
            case BernsteinKind::Power:
                return param_ * std::pow(r, param_ - 1.0);
            case BernsteinKind::Log:
                return 1.0 / (1.0 + r);
            case BernsteinKind::LogPower: {
                const double q = std::pow(r, 1.0 / (1.0 + param_));
                return std::pow(std::log1p(q), param_) * q / (r * (1.0 + q));
            }
            case BernsteinKind::ScaledSum: {
                double s = 0.0;
                for (std::size_t i = 0; i < children_.size(); ++i) s += weights_[i] * children_[i].derivative(r);
                return s;
            }
            case BernsteinKind::PowerComposite: {
                const double q = std::pow(r, 1.0 / param_);
                const double base = children_[0].value(q);
                return std::pow(base, param_ - 1.0) * children_[0].derivative(q) * std::pow(r, 1.0 / param_ - 1.0);
            }
        }
        return 0.0;
    }

    /// c with S(r) <= c r on [1, inf); from S' decreasing and S concave.
    /// No bound near r = 0 exists for the sublinear members, callers must not
    /// assume one; all mass integrals are computed numerically instead.
    double linear_bound_constant() const { return value(1.0) + derivative(1.0); }

    std::string describe() const {
        switch (kind_) {
            case BernsteinKind::Power:
                return "power(" + std::to_string(param_) + ")";
            case BernsteinKind::Log:
                return "log";
            case BernsteinKind::LogPower:
                return "log_power(" + std::to_string(param_) + ")";
            case BernsteinKind::ScaledSum: {
                std::string s = "scaled_sum(";
                for (std::size_t i = 0; i < children_.size(); ++i) {
                    if (i) s += ", ";
                    s += std::to_string(weights_[i]) + "*" + children_[i].describe();
                }
                return s + ")";
            }
            case BernsteinKind::PowerComposite:
                return "power_composite(" + children_[0].describe() + ", " + std::to_string(param_) + ")";
        }
        return "?";
    }

    friend BernsteinFunction bernstein_power(BernsteinFunction base, double delta);

  private:
    BernsteinKind kind_ = BernsteinKind::Log;
    double param_ = 0.0;  // beta / eps / delta depending on kind
    std::vector<double> weights_;
    std::vector<BernsteinFunction> children_;
};

/// r -> S(r^{1/delta})^delta, again a Bernstein function for delta > 1.
inline BernsteinFunction bernstein_power(BernsteinFunction base, double delta) {
    if (delta <= 1.0) throw std::domain_error("bernstein_power: delta must exceed 1");
    BernsteinFunction s;
    s.kind_ = BernsteinKind::PowerComposite;
    s.param_ = delta;
    s.children_.push_back(std::move(base));
    return s;
}

struct AlphaResult {
    double value = 0.0;
    double error = 0.0;
    bool divergent = false;
};

/// Integrability probe for alpha: S must outgrow log r. Declared divergent
/// when S(r) <= (1 + 1e-6) log r at the fixed scale r = 1e12.
inline bool alpha_divergent(const BernsteinFunction& s) {
    const double r = 1e12;
    return s.value(r) <= (1.0 + 1e-6) * std::log(r);
}

/// alpha(t) = int_0^inf r^{-1/2} e^{-t S(r)} dr. The substitution u = sqrt(r)
/// removes the endpoint singularity exactly: alpha(t) = 2 int_0^inf e^{-t S(u^2)} du.
inline AlphaResult eval_alpha(const BernsteinFunction& s, double t, const QuadratureConfig& quad = {}) {
    if (t <= 0.0) throw std::domain_error("eval_alpha: t must be positive");
    AlphaResult out;
    if (alpha_divergent(s)) {
        out.divergent = true;
        return out;
    }
    const auto integrand = [&](double u) { return 2.0 * std::exp(-t * s.value(u * u)); };
    const QuadResult q = integrate_semi_infinite(integrand, 0.0, quad);
    out.value = q.value;
    out.error = q.error;
    out.divergent = !q.converged;
    return out;
}

}  // namespace ougrad
