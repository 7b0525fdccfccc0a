#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "linalg.hpp"
#include "rng.hpp"

namespace ougrad {

/// Streaming mean / variance (Welford).
class Accumulator {
  public:
    void add(double x) {
        ++n_;
        const double d = x - mean_;
        mean_ += d / static_cast<double>(n_);
        m2_ += d * (x - mean_);
    }
    void merge(const Accumulator& o) {
        if (o.n_ == 0) return;
        if (n_ == 0) {
            *this = o;
            return;
        }
        const double d = o.mean_ - mean_;
        const std::size_t n = n_ + o.n_;
        m2_ += o.m2_ + d * d * (static_cast<double>(n_) * static_cast<double>(o.n_) / static_cast<double>(n));
        mean_ += d * static_cast<double>(o.n_) / static_cast<double>(n);
        n_ = n;
    }
    std::size_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    double std_error() const { return n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0; }

  private:
    std::size_t n_ = 0;
    double mean_ = 0.0, m2_ = 0.0;
};

class VecAccumulator {
  public:
    explicit VecAccumulator(int dim) : acc_(dim) {}
    void add(const Vec& x) {
        for (std::size_t i = 0; i < acc_.size(); ++i) acc_[i].add(x[i]);
    }
    void merge(const VecAccumulator& o) {
        for (std::size_t i = 0; i < acc_.size(); ++i) acc_[i].merge(o.acc_[i]);
    }
    std::size_t count() const { return acc_.empty() ? 0 : acc_[0].count(); }
    Vec mean() const {
        Vec m(acc_.size());
        for (std::size_t i = 0; i < acc_.size(); ++i) m[i] = acc_[i].mean();
        return m;
    }
    Vec std_error() const {
        Vec s(acc_.size());
        for (std::size_t i = 0; i < acc_.size(); ++i) s[i] = acc_[i].std_error();
        return s;
    }

  private:
    std::vector<Accumulator> acc_;
};

struct ScalarEstimate {
    double value = 0.0;
    double std_error = 0.0;
    std::size_t n = 0;
    SeedInfo seed;
};

struct GradientEstimate {
    Vec value;
    Vec std_error;
    std::size_t n = 0;
    SeedInfo seed;
};

/// Ordinary least squares fit y ~ intercept + slope * x.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double residual_rms = 0.0;
};

inline LineFit fit_line(const Vec& x, const Vec& y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_line: need >= 2 matched points");
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LineFit f;
    const double denom = n * sxx - sx * sx;
    if (std::fabs(denom) < 1e-300) throw std::invalid_argument("fit_line: degenerate abscissae");
    f.slope = (n * sxy - sx * sy) / denom;
    f.intercept = (sy - f.slope * sx) / n;
    double ss = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (f.intercept + f.slope * x[i]);
        ss += r * r;
    }
    f.residual_rms = std::sqrt(ss / n);
    return f;
}

}  // namespace ougrad
