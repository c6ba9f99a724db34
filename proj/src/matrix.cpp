#include "ewd/matrix.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "ewd/errors.hpp"

namespace ewd {

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r)
        for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
    return t;
}

Matrix& Matrix::operator+=(const Matrix& rhs) {
    assert(rows_ == rhs.rows_ && cols_ == rhs.cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += rhs.data_[i];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& rhs) {
    assert(rows_ == rhs.rows_ && cols_ == rhs.cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= rhs.data_[i];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

void Matrix::add_scaled(const Matrix& x, double s) {
    assert(rows_ == x.rows_ && cols_ == x.cols_);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += s * x.data_[i];
}

Matrix operator+(Matrix lhs, const Matrix& rhs) { return lhs += rhs; }
Matrix operator-(Matrix lhs, const Matrix& rhs) { return lhs -= rhs; }
Matrix operator*(Matrix lhs, double s) { return lhs *= s; }
Matrix operator*(double s, Matrix rhs) { return rhs *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw DimensionMismatch("matrix product shape mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    }
    return c;
}

std::vector<double> operator*(const Matrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw DimensionMismatch("matrix-vector shape mismatch");
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
    return y;
}

Matrix outer_scaled(std::span<const double> h, double w) {
    Matrix m(h.size(), h.size());
    for (std::size_t i = 0; i < h.size(); ++i) {
        const double wi = w * h[i];
        for (std::size_t j = 0; j < h.size(); ++j) m(i, j) = wi * h[j];
    }
    return m;
}

double trace(const Matrix& m) {
    double t = 0.0;
    for (std::size_t i = 0; i < std::min(m.rows(), m.cols()); ++i) t += m(i, i);
    return t;
}

double max_abs(const Matrix& m) {
    double v = 0.0;
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) v = std::max(v, std::fabs(m(r, c)));
    return v;
}

double dot(std::span<const double> a, std::span<const double> b) {
    assert(a.size() == b.size());
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

LuFactors lu_factor(Matrix m) {
    if (!m.square()) throw DimensionMismatch("LU requires a square matrix");
    const std::size_t n = m.rows();
    LuFactors f;
    f.perm.resize(n);
    for (std::size_t i = 0; i < n; ++i) f.perm[i] = i;

    double max_pivot = 0.0;
    std::vector<double> pivots(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        double best = std::fabs(m(k, k));
        for (std::size_t r = k + 1; r < n; ++r) {
            const double v = std::fabs(m(r, k));
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (piv != k) {
            for (std::size_t c = 0; c < n; ++c) std::swap(m(k, c), m(piv, c));
            std::swap(f.perm[k], f.perm[piv]);
            f.sign = -f.sign;
        }
        const double pivot = m(k, k);
        pivots[k] = std::fabs(pivot);
        max_pivot = std::max(max_pivot, pivots[k]);
        if (pivot != 0.0) {
            const double inv = 1.0 / pivot;
            for (std::size_t r = k + 1; r < n; ++r) {
                const double l = m(r, k) * inv;
                m(r, k) = l;
                if (l == 0.0) continue;
                for (std::size_t c = k + 1; c < n; ++c) m(r, c) -= l * m(k, c);
            }
        }
    }
    for (std::size_t k = 0; k < n; ++k) {
        if (pivots[k] <= kSingularRelTol * max_pivot) {
            f.singular = true;
            break;
        }
    }
    if (max_pivot == 0.0) f.singular = true;
    f.lu = std::move(m);
    return f;
}

double det(const Matrix& m) {
    if (!m.square()) throw DimensionMismatch("det requires a square matrix");
    if (m.rows() == 0) return 1.0;
    const LuFactors f = lu_factor(m);
    if (f.singular) return 0.0;
    double d = f.sign;
    for (std::size_t i = 0; i < m.rows(); ++i) d *= f.lu(i, i);
    return d;
}

double log_det(const Matrix& m) {
    if (!m.square()) throw DimensionMismatch("log_det requires a square matrix");
    const LuFactors f = lu_factor(m);
    if (f.singular) return -std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (std::size_t i = 0; i < m.rows(); ++i) s += std::log(std::fabs(f.lu(i, i)));
    return s;
}

std::vector<double> lu_solve(const LuFactors& f, std::span<const double> rhs) {
    const std::size_t n = f.lu.rows();
    if (rhs.size() != n) throw DimensionMismatch("lu_solve rhs size mismatch");
    if (f.singular) throw SingularMatrix("lu_solve: matrix is singular");
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = rhs[f.perm[i]];
    for (std::size_t i = 1; i < n; ++i) {
        double s = x[i];
        for (std::size_t j = 0; j < i; ++j) s -= f.lu(i, j) * x[j];
        x[i] = s;
    }
    for (std::size_t ii = n; ii-- > 0;) {
        double s = x[ii];
        for (std::size_t j = ii + 1; j < n; ++j) s -= f.lu(ii, j) * x[j];
        x[ii] = s / f.lu(ii, ii);
    }
    return x;
}

Matrix inverse(const Matrix& m) {
    const LuFactors f = lu_factor(m);
    if (f.singular) throw SingularMatrix("inverse: matrix is singular");
    const std::size_t n = m.rows();
    Matrix inv(n, n);
    std::vector<double> e(n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
        e[c] = 1.0;
        const std::vector<double> col = lu_solve(f, e);
        e[c] = 0.0;
        for (std::size_t r = 0; r < n; ++r) inv(r, c) = col[r];
    }
    return inv;
}

bool is_symmetric(const Matrix& m, double rel_tol) {
    if (!m.square()) return false;
    const double scale = std::max(max_abs(m), 1e-300);
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = r + 1; c < m.cols(); ++c)
            if (std::fabs(m(r, c) - m(c, r)) > rel_tol * scale) return false;
    return true;
}

std::vector<double> symmetric_eigenvalues(Matrix m) {
    if (!m.square()) throw DimensionMismatch("symmetric_eigenvalues requires square input");
    const std::size_t n = m.rows();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = r + 1; c < n; ++c) off += m(r, c) * m(r, c);
        if (off <= 1e-30 * std::max(1.0, max_abs(m) * max_abs(m))) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = m(p, q);
                if (apq == 0.0) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < n; ++i) {
                    const double mip = m(i, p), miq = m(i, q);
                    m(i, p) = c * mip - s * miq;
                    m(i, q) = s * mip + c * miq;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    const double mpi = m(p, i), mqi = m(q, i);
                    m(p, i) = c * mpi - s * mqi;
                    m(q, i) = s * mpi + c * mqi;
                }
            }
        }
    }
    std::vector<double> ev(n);
    for (std::size_t i = 0; i < n; ++i) ev[i] = m(i, i);
    std::sort(ev.begin(), ev.end());
    return ev;
}

bool is_psd(const Matrix& m, double rel_tol) {
    if (!is_symmetric(m, 1e-8)) return false;
    if (m.rows() == 0) return true;
    const std::vector<double> ev = symmetric_eigenvalues(m);
    const double largest = std::max(ev.back(), 0.0);
    return ev.front() >= -rel_tol * std::max(largest, 1e-300);
}

}  // namespace ewd
