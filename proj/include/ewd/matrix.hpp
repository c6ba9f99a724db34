#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ewd {

// Dense row-major matrix. Everything in this project is small (p <= 32), so
// no blocking, no sparsity, plain doubles throughout.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool square() const { return rows_ == cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
    std::span<const double> row(std::size_t r) const { return {data_.data() + r * cols_, cols_}; }

    Matrix transposed() const;

    Matrix& operator+=(const Matrix& rhs);
    Matrix& operator-=(const Matrix& rhs);
    Matrix& operator*=(double s);

    // y += s * x, entrywise over the whole storage.
    void add_scaled(const Matrix& x, double s);

    bool operator==(const Matrix& rhs) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(Matrix lhs, const Matrix& rhs);
Matrix operator-(Matrix lhs, const Matrix& rhs);
Matrix operator*(Matrix lhs, double s);
Matrix operator*(double s, Matrix rhs);
Matrix operator*(const Matrix& a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);

// w * h h^T, the rank-one building block of GLM information matrices.
Matrix outer_scaled(std::span<const double> h, double w);

double trace(const Matrix& m);
double max_abs(const Matrix& m);
double dot(std::span<const double> a, std::span<const double> b);

// ---- pivoted LU ----------------------------------------------------------
//
// A pivot counts as zero when |pivot| <= kSingularRelTol * max |pivot|; this
// is the single singularity rule used by det/inverse and everything above
// them.
inline constexpr double kSingularRelTol = 1e-12;

struct LuFactors {
    Matrix lu;                    // L below diagonal (unit), U on and above
    std::vector<std::size_t> perm;
    int sign = 1;
    bool singular = false;
};

LuFactors lu_factor(Matrix m);

double det(const Matrix& m);      // 0.0 on rank deficiency
double log_det(const Matrix& m);  // -inf on rank deficiency
Matrix inverse(const Matrix& m);  // throws SingularMatrix

std::vector<double> lu_solve(const LuFactors& f, std::span<const double> rhs);

// ---- symmetric helpers ----------------------------------------------------

bool is_symmetric(const Matrix& m, double rel_tol = 1e-10);

// Eigenvalues of a symmetric matrix by cyclic Jacobi sweeps, ascending.
std::vector<double> symmetric_eigenvalues(Matrix m);

// PSD up to roundoff: smallest eigenvalue >= -rel_tol * largest eigenvalue.
bool is_psd(const Matrix& m, double rel_tol = 1e-10);

}  // namespace ewd
