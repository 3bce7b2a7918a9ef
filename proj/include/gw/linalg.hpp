#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace gw {

// Dense row-major real matrix. Small sizes only (d <= 16 in practice).
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    Matrix(std::initializer_list<std::initializer_list<double>> rows);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> values);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool is_square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::span<const double> data() const noexcept { return data_; }

    Matrix transposed() const;
    double trace() const;
    // Largest absolute entry.
    double max_abs() const;
    double frobenius() const;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double s);

    bool operator==(const Matrix& other) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);
Matrix operator*(const Matrix& a, const Matrix& b);
std::vector<double> operator*(const Matrix& a, std::span<const double> x);

// Symmetric matrix; entries are symmetrized as (M + M^T) / 2 on construction,
// so (i, j) and (j, i) are bit-identical.
class SymMatrix {
public:
    SymMatrix() = default;
    explicit SymMatrix(const Matrix& m);
    SymMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static SymMatrix zero(std::size_t n);
    static SymMatrix identity(std::size_t n);

    std::size_t dim() const noexcept { return m_.rows(); }
    double operator()(std::size_t i, std::size_t j) const { return m_(i, j); }
    const Matrix& matrix() const noexcept { return m_; }
    double trace() const { return m_.trace(); }
    double max_abs() const { return m_.max_abs(); }

    bool operator==(const SymMatrix& other) const = default;

private:
    Matrix m_;
};

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator-(const SymMatrix& a, const SymMatrix& b);
SymMatrix operator*(double s, const SymMatrix& a);

// Orthogonal diagonalizer: columns of p are eigenvectors, lambda sorted
// descending, first nonzero component of each eigenvector positive.
struct EigenPair {
    Matrix p;
    std::vector<double> lambda;

    std::size_t dim() const noexcept { return lambda.size(); }
    // P diag(lambda) P^T
    SymMatrix reconstruct() const;
};

// Positive-definiteness threshold for a spectrum whose largest magnitude is
// `max_abs_eigenvalue`.
double eps_pd(double max_abs_eigenvalue);

// Cyclic Jacobi. Throws NumericalFailure past the sweep cap.
EigenPair sym_eig(const SymMatrix& m);

// Symmetric positive definite matrix. The eigendecomposition is computed once
// at construction (it is needed for the definiteness check) and kept.
class SpdMatrix {
public:
    explicit SpdMatrix(const SymMatrix& m);
    explicit SpdMatrix(const Matrix& m) : SpdMatrix(SymMatrix(m)) {}
    SpdMatrix(std::initializer_list<std::initializer_list<double>> rows)
        : SpdMatrix(SymMatrix(rows)) {}

    // Builds P diag(lambda) P^T from a known orthogonal P; lambda need not be sorted.
    static SpdMatrix from_eigen(const Matrix& p, std::span<const double> lambda);

    std::size_t dim() const noexcept { return sym_.dim(); }
    double operator()(std::size_t i, std::size_t j) const { return sym_(i, j); }
    const SymMatrix& sym() const noexcept { return sym_; }
    const Matrix& matrix() const noexcept { return sym_.matrix(); }
    const EigenPair& eig() const noexcept { return eig_; }
    double trace() const { return sym_.trace(); }
    double condition_number() const { return eig_.lambda.front() / eig_.lambda.back(); }

private:
    SpdMatrix(SymMatrix sym, EigenPair eig) : sym_(std::move(sym)), eig_(std::move(eig)) {}

    SymMatrix sym_;
    EigenPair eig_;
};

SpdMatrix spd_sqrt(const SpdMatrix& a);
// Warns (gw::warn) when the condition number exceeds 1e12.
SpdMatrix spd_inv_sqrt(const SpdMatrix& a);

// tr(M^{1/2}) for a 2x2 positive semidefinite M, from (tr M)^2 = tr M^2 + 2 det M:
// tr(M^{1/2}) = sqrt(tr M + 2 sqrt(det M)). No eigendecomposition.
double trace_sqrt_2x2(const SymMatrix& m);
double trace_sqrt_2x2(const SpdMatrix& m);

// Rotation R(theta) = [[cos, -sin], [sin, cos]].
Matrix rotation_2x2(double theta);

struct Rotation2x2 {
    double theta;  // in (-pi/4, pi/4]
    // p = R(theta); lambda = diagonal of R^T M R in column order (not sorted).
    EigenPair eig;
};

// Angle with cot(2 theta) = (m11 - m22) / (2 m12); theta = 0 when m12 == 0.
Rotation2x2 rotation_diagonalize_2x2(const SymMatrix& m);

}  // namespace gw
