#pragma once

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace ougrad {

struct QuadratureConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-13;
    int max_intervals = 4000;
};

struct QuadResult {
    double value = 0.0;
    double error = 0.0;  // accumulated Kronrod error estimate
    bool converged = true;
};

namespace detail {

// Gauss 7 / Kronrod 15 nodes and weights on [-1, 1]; node, gauss weight, kronrod weight.
inline constexpr double g7k15[8][3] = {
    {0.000000000000000, 0.417959183673469, 0.209482141084728},
    {0.405845151377397, 0.381830050505119, 0.190350578064785},
    {0.741531185599394, 0.279705391489277, 0.140653259715525},
    {0.949107912342759, 0.129484966168870, 0.063092092629979},
    {0.207784955007898, 0.0, 0.204432940075298},
    {0.586087235467691, 0.0, 0.169004726639267},
    {0.864864423359769, 0.0, 0.104790010322250},
    {0.991455371120813, 0.0, 0.022935322010529},
};

template <class F>
inline void gk15_panel(const F& f, double a, double b, double& value, double& err) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    const double f0 = f(mid);
    double g = g7k15[0][1] * f0, k = g7k15[0][2] * f0;
    for (int i = 1; i < 8; ++i) {
        const double dx = half * g7k15[i][0];
        const double fi = f(mid + dx) + f(mid - dx);
        g += g7k15[i][1] * fi;
        k += g7k15[i][2] * fi;
    }
    g *= half;
    k *= half;
    value = k;
    err = std::pow(200.0 * std::fabs(k - g), 1.5);
}

}  // namespace detail

/// Adaptive Gauss-Kronrod on [a, b] with an explicit interval stack.
template <class F>
QuadResult integrate(const F& f, double a, double b, const QuadratureConfig& cfg = {}) {
    struct Interval {
        double a, b, value, err;
    };
    std::vector<Interval> stack;
    double v0, e0;
    detail::gk15_panel(f, a, b, v0, e0);
    stack.push_back({a, b, v0, e0});
    QuadResult out;
    int used = 1;
    while (!stack.empty()) {
        // refine the interval with the largest error estimate
        std::size_t worst = 0;
        double total = 0.0, toterr = 0.0;
        for (std::size_t i = 0; i < stack.size(); ++i) {
            total += stack[i].value;
            toterr += stack[i].err;
            if (stack[i].err > stack[worst].err) worst = i;
        }
        if (toterr <= cfg.abs_tol || toterr <= cfg.rel_tol * std::fabs(total)) {
            out.value = total;
            out.error = toterr;
            return out;
        }
        if (used >= cfg.max_intervals) {
            out.value = total;
            out.error = toterr;
            out.converged = false;
            return out;
        }
        const Interval w = stack[worst];
        stack.erase(stack.begin() + static_cast<std::ptrdiff_t>(worst));
        const double mid = 0.5 * (w.a + w.b);
        Interval left{w.a, mid, 0, 0}, right{mid, w.b, 0, 0};
        detail::gk15_panel(f, left.a, left.b, left.value, left.err);
        detail::gk15_panel(f, right.a, right.b, right.value, right.err);
        stack.push_back(left);
        stack.push_back(right);
        ++used;
    }
    return out;
}

/// Integral over [a, inf) for integrands that eventually decay: doubling panels
/// [a, a+w], [a+w, a+2w], ... until a panel contributes below tolerance.
template <class F>
QuadResult integrate_semi_infinite(const F& f, double a, const QuadratureConfig& cfg = {}, double first_width = 1.0,
                                   int max_panels = 64) {
    QuadResult out;
    double lo = a, w = first_width;
    for (int p = 0; p < max_panels; ++p) {
        const QuadResult panel = integrate(f, lo, lo + w, cfg);
        out.value += panel.value;
        out.error += panel.error;
        out.converged = out.converged && panel.converged;
        const double scale = std::max(std::fabs(out.value), 1.0e-300);
        if (p > 2 && std::fabs(panel.value) < std::max(cfg.abs_tol, 0.1 * cfg.rel_tol * scale)) return out;
        lo += w;
        w *= 2.0;
    }
    out.converged = false;
    return out;
}

/// Composite Simpson with n+1 nodes (n even) for integrands valued in any
/// linear space reachable through init + axpy-style accumulation.
template <class F, class T>
T simpson(const F& f, double a, double b, int n, T init) {
    if (n % 2 != 0) throw std::invalid_argument("simpson: n must be even");
    const double h = (b - a) / n;
    T acc = init;
    for (int i = 0; i <= n; ++i) {
        const double wgt = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += (wgt * h / 3.0) * f(a + i * h);
    }
    return acc;
}

}  // namespace ougrad
