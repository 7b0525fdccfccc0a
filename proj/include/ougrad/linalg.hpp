#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <vector>

namespace ougrad {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec operator+(Vec a, const Vec& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

inline Vec operator-(Vec a, const Vec& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}

inline Vec operator*(double c, Vec a) {
    for (double& x : a) x *= c;
    return a;
}

inline Vec& operator+=(Vec& a, const Vec& b) {
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

/// Dense row-major matrix sized for state dimensions (d stays small here).
class Mat {
  public:
    Mat() = default;
    Mat(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0) {}
    Mat(int rows, int cols, std::initializer_list<double> vals) : Mat(rows, cols) {
        if (static_cast<int>(vals.size()) != rows * cols) throw std::invalid_argument("Mat: initializer size mismatch");
        std::size_t i = 0;
        for (double v : vals) a_[i++] = v;
    }

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
    static Mat zero(int rows, int cols) { return Mat(rows, cols); }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    double& operator()(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    double operator()(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    const std::vector<double>& data() const { return a_; }
    std::vector<double>& data() { return a_; }

    Mat transpose() const {
        Mat t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Mat& operator+=(const Mat& b) {
        for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += b.a_[i];
        return *this;
    }
    Mat& operator*=(double c) {
        for (double& x : a_) x *= c;
        return *this;
    }

    friend Mat operator+(Mat a, const Mat& b) { return a += b; }
    friend Mat operator-(Mat a, const Mat& b) {
        for (std::size_t i = 0; i < a.a_.size(); ++i) a.a_[i] -= b.a_[i];
        return a;
    }
    friend Mat operator*(double c, Mat a) { return a *= c; }

    friend Mat operator*(const Mat& a, const Mat& b) {
        Mat c(a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                const double aik = a(i, k);
                if (aik == 0.0) continue;
                for (int j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend Vec operator*(const Mat& a, const Vec& x) {
        Vec y(a.rows_, 0.0);
        for (int i = 0; i < a.rows_; ++i) {
            double s = 0.0;
            for (int j = 0; j < a.cols_; ++j) s += a(i, j) * x[j];
            y[i] = s;
        }
        return y;
    }

    double max_abs() const {
        double m = 0.0;
        for (double x : a_) m = std::max(m, std::fabs(x));
        return m;
    }

  private:
    int rows_ = 0, cols_ = 0;
    std::vector<double> a_;
};

inline Mat sym_part(const Mat& a) {
    Mat s(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) s(i, j) = 0.5 * (a(i, j) + a(j, i));
    return s;
}

struct SymEig {
    Vec values;   // ascending
    Mat vectors;  // columns are eigenvectors
};

/// Cyclic Jacobi for symmetric matrices. Sizes here are tiny, convergence is fast.
inline SymEig sym_eig(const Mat& s0) {
    const int n = s0.rows();
    Mat s = s0, v = Mat::identity(n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off += s(i, j) * s(i, j);
        if (off < 1e-30) break;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) {
                if (std::fabs(s(p, q)) < 1e-300) continue;
                const double theta = (s(q, q) - s(p, p)) / (2.0 * s(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0), sn = t * c;
                for (int k = 0; k < n; ++k) {
                    const double skp = s(k, p), skq = s(k, q);
                    s(k, p) = c * skp - sn * skq;
                    s(k, q) = sn * skp + c * skq;
                }
                for (int k = 0; k < n; ++k) {
                    const double spk = s(p, k), sqk = s(q, k);
                    s(p, k) = c * spk - sn * sqk;
                    s(q, k) = sn * spk + c * sqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - sn * vkq;
                    v(k, q) = sn * vkp + c * vkq;
                }
            }
    }
    SymEig e;
    e.values.resize(n);
    for (int i = 0; i < n; ++i) e.values[i] = s(i, i);
    e.vectors = Mat(n, n);
    // sort ascending, permuting columns along
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (e.values[idx[j]] < e.values[idx[i]]) std::swap(idx[i], idx[j]);
    Vec sorted(n);
    for (int i = 0; i < n; ++i) {
        sorted[i] = e.values[idx[i]];
        for (int k = 0; k < n; ++k) e.vectors(k, i) = v(k, idx[i]);
    }
    e.values = sorted;
    return e;
}

/// Operator 2-norm via the spectrum of A^T A.
inline double op_norm(const Mat& a) {
    if (a.rows() == 1 && a.cols() == 1) return std::fabs(a(0, 0));
    const SymEig e = sym_eig(a.transpose() * a);
    return std::sqrt(std::max(0.0, e.values.back()));
}

/// Largest theta with sym(A) + theta I negative semidefinite, i.e. -lambda_max(sym A).
inline double contraction_rate(const Mat& a) {
    const SymEig e = sym_eig(sym_part(a));
    return -e.values.back();
}

/// Matrix exponential by scaling and squaring with a truncated Taylor series.
/// Relative accuracy comfortably below 1e-12 for ||A|| <= 10.
inline Mat expm(const Mat& a) {
    const int n = a.rows();
    if (n == 1) {
        Mat r(1, 1);
        r(0, 0) = std::exp(a(0, 0));
        return r;
    }
    const double nrm = a.max_abs() * n;
    int s = 0;
    double scale = 1.0;
    while (nrm * scale > 0.25) {
        ++s;
        scale *= 0.5;
    }
    Mat b = scale * a;
    Mat term = Mat::identity(n), sum = Mat::identity(n);
    for (int k = 1; k <= 24; ++k) {
        term = (1.0 / k) * (term * b);
        sum += term;
        if (term.max_abs() < 1e-18) break;
    }
    for (int i = 0; i < s; ++i) sum = sum * sum;
    return sum;
}

/// Eigenvalue-clipped symmetric factor: returns L with L L^T = proj_psd(S).
/// Eigenvalues below clip_floor are treated as zero; more negative ones are an error.
inline Mat psd_factor(const Mat& s, double clip_floor = -1e-12) {
    const SymEig e = sym_eig(sym_part(s));
    const int n = s.rows();
    const double scale = std::max(1.0, std::fabs(e.values.back()));
    Mat l(n, n);
    for (int j = 0; j < n; ++j) {
        double ev = e.values[j];
        if (ev < clip_floor * scale) throw std::domain_error("psd_factor: matrix is not positive semidefinite");
        ev = std::max(ev, 0.0);
        const double r = std::sqrt(ev);
        for (int i = 0; i < n; ++i) l(i, j) = e.vectors(i, j) * r;
    }
    return l;
}

}  // namespace ougrad
