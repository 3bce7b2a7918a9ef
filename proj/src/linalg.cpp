#include "gw/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "gw/error.hpp"

namespace gw {

namespace {

constexpr int kMaxJacobiSweeps = 100;
constexpr double kJacobiTolerance = 1e-14;
constexpr double kIllConditioned = 1e12;

void require_square(const Matrix& m, const char* what) {
    if (!m.is_square()) {
        throw DimensionError(std::string(what) + ": matrix must be square");
    }
}

void require_dim(std::size_t actual, std::size_t expected, const char* what) {
    if (actual != expected) {
        std::ostringstream os;
        os << what << ": expected dimension " << expected << ", got " << actual;
        throw DimensionError(os.str());
    }
}

// Sort eigenpairs descending and flip each column so its first
// non-negligible component is positive.
EigenPair canonicalize(const Matrix& p, std::span<const double> lambda) {
    const std::size_t n = lambda.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return lambda[a] > lambda[b]; });

    EigenPair out{Matrix(n, n), std::vector<double>(n)};
    for (std::size_t c = 0; c < n; ++c) {
        const std::size_t src = order[c];
        out.lambda[c] = lambda[src];
        double sign = 1.0;
        for (std::size_t r = 0; r < n; ++r) {
            if (std::abs(p(r, src)) > 1e-12) {
                sign = p(r, src) > 0.0 ? 1.0 : -1.0;
                break;
            }
        }
        for (std::size_t r = 0; r < n; ++r) out.p(r, c) = sign * p(r, src);
    }
    return out;
}

Matrix compose(const Matrix& p, std::span<const double> lambda) {
    const std::size_t n = lambda.size();
    Matrix out(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < n; ++k) s += p(i, k) * lambda[k] * p(j, k);
            out(i, j) = s;
        }
    }
    return out;
}

void check_positive(std::span<const double> lambda, const char* what) {
    double max_abs = 0.0;
    for (double l : lambda) max_abs = std::max(max_abs, std::abs(l));
    const double eps = eps_pd(max_abs);
    for (double l : lambda) {
        if (!(l > eps)) {
            std::ostringstream os;
            os << what << ": matrix is not positive definite (eigenvalue " << l
               << " <= " << eps << ")";
            throw NotPositiveDefinite(os.str());
        }
    }
}

}  // namespace

// ---- Matrix ---------------------------------------------------------------

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::initializer_list<std::initializer_list<double>> rows)
    : rows_(rows.size()), cols_(rows.size() ? rows.begin()->size() : 0) {
    data_.reserve(rows_ * cols_);
    for (const auto& row : rows) {
        if (row.size() != cols_) throw DimensionError("Matrix: ragged initializer");
        data_.insert(data_.end(), row.begin(), row.end());
    }
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> values) {
    Matrix m(values.size(), values.size());
    for (std::size_t i = 0; i < values.size(); ++i) m(i, i) = values[i];
    return m;
}

Matrix Matrix::transposed() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i)
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
}

double Matrix::trace() const {
    double s = 0.0;
    for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
    return s;
}

double Matrix::max_abs() const {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

double Matrix::frobenius() const {
    double s = 0.0;
    for (double v : data_) s += v * v;
    return std::sqrt(s);
}

Matrix& Matrix::operator+=(const Matrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw DimensionError("Matrix +: shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    if (rows_ != other.rows_ || cols_ != other.cols_) throw DimensionError("Matrix -: shape mismatch");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
    return *this;
}

Matrix& Matrix::operator*=(double s) {
    for (double& v : data_) v *= s;
    return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw DimensionError("Matrix *: inner dimension mismatch");
    Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            for (std::size_t j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
        }
    return c;
}

std::vector<double> operator*(const Matrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw DimensionError("Matrix * vector: dimension mismatch");
    std::vector<double> y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j) y[i] += a(i, j) * x[j];
    return y;
}

// ---- SymMatrix ------------------------------------------------------------

SymMatrix::SymMatrix(const Matrix& m) : m_(m.rows(), m.cols()) {
    require_square(m, "SymMatrix");
    const std::size_t n = m.rows();
    for (std::size_t i = 0; i < n; ++i) {
        m_(i, i) = m(i, i);
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = 0.5 * (m(i, j) + m(j, i));
            m_(i, j) = v;
            m_(j, i) = v;
        }
    }
}

SymMatrix::SymMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : SymMatrix(Matrix(rows)) {}

SymMatrix SymMatrix::zero(std::size_t n) { return SymMatrix(Matrix(n, n)); }
SymMatrix SymMatrix::identity(std::size_t n) { return SymMatrix(Matrix::identity(n)); }

SymMatrix operator+(const SymMatrix& a, const SymMatrix& b) {
    return SymMatrix(a.matrix() + b.matrix());
}
SymMatrix operator-(const SymMatrix& a, const SymMatrix& b) {
    return SymMatrix(a.matrix() - b.matrix());
}
SymMatrix operator*(double s, const SymMatrix& a) { return SymMatrix(s * a.matrix()); }

// ---- eigen ----------------------------------------------------------------

SymMatrix EigenPair::reconstruct() const { return SymMatrix(compose(p, lambda)); }

double eps_pd(double max_abs_eigenvalue) { return 1e-12 * std::max(1.0, max_abs_eigenvalue); }

EigenPair sym_eig(const SymMatrix& m) {
    const std::size_t n = m.dim();
    Matrix a = m.matrix();
    Matrix v = Matrix::identity(n);
    const double tol = kJacobiTolerance * a.frobenius();

    bool converged = false;
    for (int sweep = 0; sweep <= kMaxJacobiSweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
        if (std::sqrt(off) <= tol) {
            converged = true;
            break;
        }
        if (sweep == kMaxJacobiSweeps) break;

        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e150) {
                    t = 0.5 / theta;
                } else {
                    t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;

                for (std::size_t k = 0; k < n; ++k) {
                    if (k == p || k == q) continue;
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = a(p, k) = c * akp - s * akq;
                    a(k, q) = a(q, k) = s * akp + c * akq;
                }
                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = a(q, p) = 0.0;

                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    if (!converged) {
        throw NumericalFailure("sym_eig: Jacobi iteration did not converge within 100 sweeps");
    }

    std::vector<double> lambda(n);
    for (std::size_t i = 0; i < n; ++i) lambda[i] = a(i, i);
    return canonicalize(v, lambda);
}

// ---- SpdMatrix ------------------------------------------------------------

SpdMatrix::SpdMatrix(const SymMatrix& m) : sym_(m), eig_(sym_eig(m)) {
    check_positive(eig_.lambda, "SpdMatrix");
}

SpdMatrix SpdMatrix::from_eigen(const Matrix& p, std::span<const double> lambda) {
    require_square(p, "SpdMatrix::from_eigen");
    require_dim(p.rows(), lambda.size(), "SpdMatrix::from_eigen");
    check_positive(lambda, "SpdMatrix::from_eigen");
    return SpdMatrix(SymMatrix(compose(p, lambda)), canonicalize(p, lambda));
}

SpdMatrix spd_sqrt(const SpdMatrix& a) {
    const EigenPair& e = a.eig();
    std::vector<double> root(e.lambda.size());
    std::transform(e.lambda.begin(), e.lambda.end(), root.begin(),
                   [](double l) { return std::sqrt(l); });
    return SpdMatrix::from_eigen(e.p, root);
}

SpdMatrix spd_inv_sqrt(const SpdMatrix& a) {
    const double cond = a.condition_number();
    if (cond > kIllConditioned) {
        std::ostringstream os;
        os << "spd_inv_sqrt: ill-conditioned matrix (condition number " << cond << ")";
        warn(os.str());
    }
    const EigenPair& e = a.eig();
    std::vector<double> inv_root(e.lambda.size());
    std::transform(e.lambda.begin(), e.lambda.end(), inv_root.begin(),
                   [](double l) { return 1.0 / std::sqrt(l); });
    return SpdMatrix::from_eigen(e.p, inv_root);
}

double trace_sqrt_2x2(const SymMatrix& m) {
    require_dim(m.dim(), 2, "trace_sqrt_2x2");
    const double tr = m(0, 0) + m(1, 1);
    double det = m(0, 0) * m(1, 1) - m(0, 1) * m(0, 1);
    const double eps = eps_pd(std::abs(tr));
    if (tr < -eps || det < -eps * std::max(1.0, std::abs(tr))) {
        throw NotPositiveDefinite("trace_sqrt_2x2: matrix is not positive semidefinite");
    }
    det = std::max(det, 0.0);
    return std::sqrt(std::max(tr + 2.0 * std::sqrt(det), 0.0));
}

double trace_sqrt_2x2(const SpdMatrix& m) { return trace_sqrt_2x2(m.sym()); }

Matrix rotation_2x2(double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return Matrix{{c, -s}, {s, c}};
}

Rotation2x2 rotation_diagonalize_2x2(const SymMatrix& m) {
    require_dim(m.dim(), 2, "rotation_diagonalize_2x2");
    double theta = 0.0;
    if (m(0, 1) != 0.0) {
        const double diff = m(0, 0) - m(1, 1);
        theta = diff == 0.0 ? std::numbers::pi / 4.0 : 0.5 * std::atan(2.0 * m(0, 1) / diff);
    }
    const Matrix r = rotation_2x2(theta);
    const Matrix d = r.transposed() * m.matrix() * r;
    return Rotation2x2{theta, EigenPair{r, {d(0, 0), d(1, 1)}}};
}

}  // namespace gw
