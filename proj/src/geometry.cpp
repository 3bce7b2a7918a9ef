#include "gw/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gw/error.hpp"

namespace gw {

namespace {

constexpr int kLocalIterations = 100;

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
    if (a != b) {
        std::ostringstream os;
        os << what << ": dimension mismatch (" << a << " vs " << b << ")";
        throw DimensionError(os.str());
    }
}

SymMatrix sandwich(const Matrix& outer, const Matrix& inner) {
    return SymMatrix(outer * inner * outer);
}

double mean_gap_squared(const Gaussian& a, const Gaussian& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        const double d = a.mean()[i] - b.mean()[i];
        s += d * d;
    }
    return s;
}

bool precedes(const Gaussian& a, const Gaussian& b) {
    const auto x = a.cov().matrix().data();
    const auto y = b.cov().matrix().data();
    if (!std::ranges::equal(x, y)) return std::lexicographical_compare(x.begin(), x.end(), y.begin(), y.end());
    return std::lexicographical_compare(a.mean().begin(), a.mean().end(), b.mean().begin(),
                                        b.mean().end());
}

// tr((U^1/2 V U^1/2)^1/2)
double cross_trace(const SpdMatrix& v, const SpdMatrix& u, bool force_eigen_path) {
    const Matrix u_half = spd_sqrt(u).matrix();
    const SymMatrix m = sandwich(u_half, v.matrix());
    if (m.dim() == 2 && !force_eigen_path) return trace_sqrt_2x2(m);
    double s = 0.0;
    for (double l : sym_eig(m).lambda) s += std::sqrt(std::max(l, 0.0));
    return s;
}

}  // namespace

Gaussian::Gaussian(std::vector<double> mean, SpdMatrix cov)
    : mean_(std::move(mean)), cov_(std::move(cov)) {
    require_same_dim(mean_.size(), cov_.dim(), "Gaussian");
}

Gaussian::Gaussian(SpdMatrix cov) : mean_(cov.dim(), 0.0), cov_(std::move(cov)) {}

std::vector<double> AffineMap::apply(std::span<const double> x) const {
    std::vector<double> y = linear * x;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += shift[i];
    return y;
}

double w2_squared(const Gaussian& a_in, const Gaussian& b_in, bool force_eigen_path) {
    require_same_dim(a_in.dim(), b_in.dim(), "w2_distance");
    // Evaluate in a canonical argument order so the result is exactly symmetric.
    const bool swap = precedes(b_in, a_in);
    const Gaussian& a = swap ? b_in : a_in;
    const Gaussian& b = swap ? a_in : b_in;
    if (a.cov().matrix() == b.cov().matrix()) return mean_gap_squared(a, b);
    const double w2 = mean_gap_squared(a, b) + a.cov().trace() + b.cov().trace() -
                      2.0 * cross_trace(a.cov(), b.cov(), force_eigen_path);
    return std::max(w2, 0.0);
}

double w2_distance(const Gaussian& a, const Gaussian& b, bool force_eigen_path) {
    return std::sqrt(w2_squared(a, b, force_eigen_path));
}

double w2_squared_local(const SpdMatrix& x, const SpdMatrix& y) {
    require_same_dim(x.dim(), y.dim(), "w2_squared_local");
    const std::size_t n = x.dim();
    const Matrix& q = x.eig().p;
    const std::vector<double>& mu = x.eig().lambda;

    // Work in the eigenbasis of x, where x is diag(mu).
    const Matrix diff = q.transposed() * (y.matrix() - x.matrix()) * q;
    Matrix delta(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            delta(i, j) = std::sqrt(mu[i]) * diff(i, j) * std::sqrt(mu[j]);

    Matrix r(n, n);
    bool converged = false;
    for (int it = 0; it < kLocalIterations; ++it) {
        const Matrix r2 = r * r;
        double change = 0.0;
        double size = 0.0;
        Matrix next(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                next(i, j) = (delta(i, j) - r2(i, j)) / (mu[i] + mu[j]);
                change = std::max(change, std::abs(next(i, j) - r(i, j)));
                size = std::max(size, std::abs(next(i, j)));
            }
        r = std::move(next);
        if (!std::isfinite(size) || size > 0.5 * mu.back()) break;
        if (change <= 4e-16 * size) {
            converged = true;
            break;
        }
    }
    if (!converged) return w2_squared(Gaussian(x), Gaussian(y), true);

    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s += r(i, j) * r(i, j) / mu[j];
    return s;
}

AffineMap optimal_map(const Gaussian& a, const Gaussian& b) {
    require_same_dim(a.dim(), b.dim(), "optimal_map");
    const Matrix u_half = spd_sqrt(b.cov()).matrix();
    const SpdMatrix middle(sandwich(u_half, a.cov().matrix()));
    const Matrix w = SymMatrix(u_half * spd_inv_sqrt(middle).matrix() * u_half).matrix();

    std::vector<double> shift = w * std::span<const double>(a.mean());
    for (std::size_t i = 0; i < shift.size(); ++i) shift[i] = b.mean()[i] - shift[i];
    return AffineMap{w, std::move(shift)};
}

Gaussian geodesic(const Gaussian& a, const Gaussian& b, double t) {
    if (!(t >= 0.0 && t <= 1.0)) {
        std::ostringstream os;
        os << "geodesic: t = " << t << " outside [0, 1] (use exp_map to extrapolate)";
        throw DomainError(os.str());
    }
    const std::size_t d = a.dim();
    const AffineMap map = optimal_map(a, b);
    const Matrix m = (1.0 - t) * Matrix::identity(d) + t * map.linear;

    std::vector<double> mean(d);
    for (std::size_t i = 0; i < d; ++i) mean[i] = (1.0 - t) * a.mean()[i] + t * b.mean()[i];
    return Gaussian(std::move(mean), SpdMatrix(sandwich(m, a.cov().matrix())));
}

double metric(const SpdMatrix& base_cov, const SymMatrix& x, const SymMatrix& y) {
    require_same_dim(x.dim(), base_cov.dim(), "metric");
    require_same_dim(y.dim(), base_cov.dim(), "metric");
    return (x.matrix() * base_cov.matrix() * y.matrix()).trace();
}

double metric(const Gaussian& base, const Tangent& x, const Tangent& y) {
    return metric(base.cov(), x.coeff, y.coeff);
}

Gaussian exp_map(const Gaussian& base, const Tangent& s, double t) {
    require_same_dim(s.dim(), base.dim(), "exp_map");
    const SymMatrix m(Matrix::identity(base.dim()) + t * s.coeff.matrix());
    try {
        SpdMatrix check(m);
    } catch (const NotPositiveDefinite&) {
        throw DomainError("exp-map outside PD domain: E + tS is not positive definite");
    }
    return Gaussian(base.mean(), SpdMatrix(sandwich(m.matrix(), base.cov().matrix())));
}

Tangent log_map(const Gaussian& base, const Gaussian& target) {
    require_same_dim(base.dim(), target.dim(), "log_map");
    double scale = 1.0;
    for (double m : base.mean()) scale = std::max(scale, std::abs(m));
    for (std::size_t i = 0; i < base.dim(); ++i) {
        if (std::abs(base.mean()[i] - target.mean()[i]) > 1e-12 * scale) {
            throw DomainError(
                "log_map: means differ; translate the target onto the base mean first");
        }
    }
    const AffineMap map = optimal_map(base, target);
    return Tangent{SymMatrix(map.linear - Matrix::identity(base.dim()))};
}

Gaussian translate(const Gaussian& g, std::span<const double> v) {
    require_same_dim(v.size(), g.dim(), "translate");
    std::vector<double> mean = g.mean();
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += v[i];
    return Gaussian(std::move(mean), g.cov());
}

// ---- frame -----------------------------------------------------------------

std::string FrameVector::label() const {
    if (kind == FrameKind::EPlus) return "e+";
    std::ostringstream os;
    os << (kind == FrameKind::EDiag ? 'e' : 'f') << (i + 1);
    if (i + 1 > 9 || j + 1 > 9) os << '_';
    os << (j + 1);
    return os.str();
}

FrameVector frame_vector(const EigenPair& base_eig, FrameKind kind, std::size_t i, std::size_t j) {
    const std::size_t d = base_eig.dim();
    if (d < 2) throw DimensionError("frame: dimension must be at least 2");
    if (kind == FrameKind::EPlus) {
        i = 0;
        j = d - 1;
    } else if (!(i < j && j < d)) {
        std::ostringstream os;
        os << "frame: indices must satisfy 1 <= i < j <= " << d << " (got " << i + 1 << ", "
           << j + 1 << ")";
        throw DomainError(os.str());
    }

    const auto& lam = base_eig.lambda;
    Matrix unit(d, d);
    switch (kind) {
        case FrameKind::EPlus:
        case FrameKind::EDiag:
            unit(i, i) = 1.0;
            unit(j, j) = kind == FrameKind::EPlus ? 1.0 : -1.0;
            break;
        case FrameKind::FOff:
            unit(i, j) = 1.0;
            unit(j, i) = 1.0;
            break;
    }
    unit *= 1.0 / std::sqrt(lam[i] + lam[j]);
    const Matrix& p = base_eig.p;
    return FrameVector{kind, i, j, p, lam, Tangent{SymMatrix(p * unit * p.transposed())}};
}

std::vector<FrameVector> frame(const EigenPair& base_eig) {
    const std::size_t d = base_eig.dim();
    if (d < 2) throw DimensionError("frame: dimension must be at least 2");
    std::vector<FrameVector> out;
    out.reserve(d * d - d + 1);
    out.push_back(frame_vector(base_eig, FrameKind::EPlus));
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i + 1; j < d; ++j) {
            out.push_back(frame_vector(base_eig, FrameKind::EDiag, i, j));
            out.push_back(frame_vector(base_eig, FrameKind::FOff, i, j));
        }
    return out;
}

// ---- flat families -----------------------------------------------------------

FlatCoordinates flat_coordinates(const Matrix& p, const Gaussian& g) {
    require_same_dim(p.rows(), g.dim(), "flat_coordinates");
    if (!p.is_square()) throw DimensionError("flat_coordinates: frame must be square");
    const Matrix d = p.transposed() * g.cov().matrix() * p;
    const double scale = g.cov().matrix().max_abs();
    for (std::size_t i = 0; i < d.rows(); ++i)
        for (std::size_t j = 0; j < d.cols(); ++j)
            if (i != j && std::abs(d(i, j)) > 1e-10 * scale)
                throw DomainError("flat_coordinates: covariance is not diagonal in the given frame");

    FlatCoordinates out{g.mean(), std::vector<double>(g.dim())};
    for (std::size_t i = 0; i < g.dim(); ++i) out.sd[i] = std::sqrt(d(i, i));
    return out;
}

// ---- ellipses ------------------------------------------------------------------

Gaussian ellipse_gaussian(double alpha, double beta, double theta) {
    if (!(alpha > 0.0 && beta > 0.0)) throw DomainError("ellipse: alpha and beta must be positive");
    const std::vector<double> lam{alpha * alpha, beta * beta};
    return Gaussian(SpdMatrix::from_eigen(rotation_2x2(theta), lam));
}

EllipseParameters ellipse_parameters(const SpdMatrix& cov) {
    const Rotation2x2 rot = rotation_diagonalize_2x2(cov.sym());
    return EllipseParameters{std::sqrt(std::max(rot.eig.lambda[0], 0.0)),
                             std::sqrt(std::max(rot.eig.lambda[1], 0.0)), rot.theta};
}

}  // namespace gw
