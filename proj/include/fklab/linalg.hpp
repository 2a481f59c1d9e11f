#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fklab {

using Vector = std::vector<double>;

// Dense row-major matrix. Small sizes only; everything in this project is
// desk-scale dense linear algebra.
struct Matrix {
    int rows = 0;
    int cols = 0;
    std::vector<double> a;

    Matrix() = default;
    Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), a(static_cast<size_t>(r) * c, fill) {}

    double& operator()(int r, int c) { return a[static_cast<size_t>(r) * cols + c]; }
    double operator()(int r, int c) const { return a[static_cast<size_t>(r) * cols + c]; }

    std::span<const double> row(int r) const { return {a.data() + static_cast<size_t>(r) * cols, static_cast<size_t>(cols)}; }

    static Matrix identity(int n) {
        Matrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline Matrix matmul(const Matrix& x, const Matrix& y) {
    Matrix z(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i) {
        for (int k = 0; k < x.cols; ++k) {
            const double v = x(i, k);
            if (v == 0.0) continue;
            const double* yr = y.a.data() + static_cast<size_t>(k) * y.cols;
            double* zr = z.a.data() + static_cast<size_t>(i) * z.cols;
            for (int j = 0; j < y.cols; ++j) zr[j] += v * yr[j];
        }
    }
    return z;
}

// f |-> M f, function application along rows.
inline Vector matvec(const Matrix& m, const Vector& f) {
    Vector out(m.rows, 0.0);
    for (int i = 0; i < m.rows; ++i) {
        double s = 0.0;
        for (int j = 0; j < m.cols; ++j) s += m(i, j) * f[j];
        out[i] = s;
    }
    return out;
}

// mu |-> mu M, measure transport along columns.
inline Vector measure_apply(const Vector& mu, const Matrix& m) {
    Vector out(m.cols, 0.0);
    for (int i = 0; i < m.rows; ++i) {
        const double v = mu[i];
        if (v == 0.0) continue;
        for (int j = 0; j < m.cols; ++j) out[j] += v * m(i, j);
    }
    return out;
}

// Order-fixed pairwise summation: deterministic regardless of thread count,
// and numerically stable for long accumulations.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const size_t half = v.size() / 2;
    return pairwise_sum(v.subspan(0, half)) + pairwise_sum(v.subspan(half));
}

inline double dot(const Vector& x, const Vector& y) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

inline double sum(const Vector& x) {
    return pairwise_sum(std::span<const double>(x.data(), x.size()));
}

inline double min_element(const Vector& x) {
    double m = x[0];
    for (double v : x) m = v < m ? v : m;
    return m;
}

inline double max_element(const Vector& x) {
    double m = x[0];
    for (double v : x) m = v > m ? v : m;
    return m;
}

inline Vector scaled(Vector v, double c) {
    for (double& x : v) x *= c;
    return v;
}

// Full L1 distance between measures, sup over |f|<=1 of |mu(f)-nu(f)|.
inline double l1_distance(const Vector& x, const Vector& y) {
    double s = 0.0;
    for (size_t i = 0; i < x.size(); ++i) s += x[i] > y[i] ? x[i] - y[i] : y[i] - x[i];
    return s;
}

}  // namespace fklab
