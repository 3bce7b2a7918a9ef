#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gw/linalg.hpp"

namespace gw {

// A point of the Gaussian manifold: N(mean, cov).
class Gaussian {
public:
    Gaussian(std::vector<double> mean, SpdMatrix cov);
    // Mean-zero Gaussian N(cov).
    explicit Gaussian(SpdMatrix cov);

    std::size_t dim() const noexcept { return mean_.size(); }
    const std::vector<double>& mean() const noexcept { return mean_; }
    const SpdMatrix& cov() const noexcept { return cov_; }

private:
    std::vector<double> mean_;
    SpdMatrix cov_;
};

// Tangent vector at a mean-zero Gaussian, identified with the symmetric
// matrix S of the linear map x -> S x. Displacement convention: the geodesic
// leaving N(V) in direction S is t -> N((E + tS) V (E + tS)).
struct Tangent {
    SymMatrix coeff;

    std::size_t dim() const noexcept { return coeff.dim(); }
};

// x -> linear * x + shift
struct AffineMap {
    Matrix linear;
    std::vector<double> shift;

    std::vector<double> apply(std::span<const double> x) const;
};

// W2 distance. d == 2 uses the eigen-free 2x2 trace identity unless
// `force_eigen_path` is set; otherwise tr((U^1/2 V U^1/2)^1/2) via sym_eig.
double w2_distance(const Gaussian& a, const Gaussian& b, bool force_eigen_path = false);
double w2_squared(const Gaussian& a, const Gaussian& b, bool force_eigen_path = false);

// Squared W2 between two mean-zero Gaussians with covariances x and y that are
// close to each other. Evaluated as tr(R x^-1 R) with R solving
// x R + R x + R^2 = x^1/2 (y - x) x^1/2, which avoids the cancellation in
// tr x + tr y - 2 tr(...)^1/2. Falls back to the closed form when the fixed
// point iteration does not contract.
double w2_squared_local(const SpdMatrix& x, const SpdMatrix& y);

// Brenier map pushing a onto b: x -> W (x - m_a) + m_b with
// W = U^1/2 (U^1/2 V U^1/2)^-1/2 U^1/2.
AffineMap optimal_map(const Gaussian& a, const Gaussian& b);

// Displacement interpolation at t in [0, 1].
Gaussian geodesic(const Gaussian& a, const Gaussian& b, double t);

// g_V(X, Y) = tr(X V Y)
double metric(const Gaussian& base, const Tangent& x, const Tangent& y);
double metric(const SpdMatrix& base_cov, const SymMatrix& x, const SymMatrix& y);

// N(mean, (E + tS) V (E + tS)); throws DomainError outside E + tS > 0.
Gaussian exp_map(const Gaussian& base, const Tangent& s, double t = 1.0);

// S = W - E for the optimal map matrix W. Means must be equal; translate first.
Tangent log_map(const Gaussian& base, const Gaussian& target);

Gaussian translate(const Gaussian& g, std::span<const double> v);

// ---- normalized frame ------------------------------------------------------

enum class FrameKind { EPlus, EDiag, FOff };

// One of e+, e_ij, f_ij at N(P diag(lambda) P^T). Indices are 0-based with
// i < j; for EPlus they are (0, d-1).
struct FrameVector {
    FrameKind kind;
    std::size_t i;
    std::size_t j;
    Matrix frame_p;
    std::vector<double> frame_lambda;
    Tangent as_tangent;

    // "e+", "e12", "f34" (1-based; "e1_12" style once an index exceeds 9).
    std::string label() const;
};

// Single frame vector.
FrameVector frame_vector(const EigenPair& base_eig, FrameKind kind, std::size_t i = 0,
                         std::size_t j = 0);

// e+, then e_ij and f_ij for all i < j in lexicographic order.
// The family has d^2 - d + 1 unit vectors; it is not an orthonormal basis.
std::vector<FrameVector> frame(const EigenPair& base_eig);

// ---- flat families ---------------------------------------------------------

struct FlatCoordinates {
    std::vector<double> mean;
    std::vector<double> sd;  // square roots of the eigenvalues of cov in frame P
};

// Coordinates of g inside the family of Gaussians diagonalized by p. Within
// one family W2 is the Euclidean distance of (mean, sd).
FlatCoordinates flat_coordinates(const Matrix& p, const Gaussian& g);

// ---- 2-D ellipse parametrization --------------------------------------------

// (alpha, beta; theta) = N(R(theta) diag(alpha^2, beta^2) R(theta)^T)
Gaussian ellipse_gaussian(double alpha, double beta, double theta);

struct EllipseParameters {
    double alpha;
    double beta;
    double theta;  // in (-pi/4, pi/4]
};

EllipseParameters ellipse_parameters(const SpdMatrix& cov);

}  // namespace gw
