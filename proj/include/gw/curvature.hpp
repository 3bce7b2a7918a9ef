#pragma once

#include <span>
#include <utility>
#include <vector>

#include "gw/geometry.hpp"
#include "gw/linalg.hpp"

namespace gw {

// The ten closed-form cases for sectional curvatures of frame-vector pairs.
enum class CurvatureCase : int {
    EPlusEDiag = 1,        // K(e+, e_ij) = 0
    EPlusFCorner = 2,      // K(e+, f_1d) = 0
    EPlusFEdge = 3,        // K(e+, f_ij), i = 1 or j = d
    EPlusFInterior = 4,    // K(e+, f_kl) = 0, 1 < k < l < d
    EDiagEDiag = 5,        // K(e_ij, e_kl) = 0
    EDiagFDisjoint = 6,    // K(e_ij, f_kl) = 0, disjoint indices
    EDiagFShared = 7,      // K(e_ik, f_ij), j != k
    EDiagFSame = 8,        // K(e_ij, f_ij)
    FFDisjoint = 9,        // K(f_ij, f_kl) = 0, disjoint indices
    FFShared = 10,         // K(f_ij, f_ik), j != k
};

inline int case_number(CurvatureCase c) { return static_cast<int>(c); }

// Throws UnsupportedPair for pairs outside the ten cases (equal vectors,
// (e+, e+)), DomainError when the vectors live in different frames.
CurvatureCase classify_pair(const FrameVector& a, const FrameVector& b);

class CurvaturePair {
public:
    CurvaturePair(FrameVector a, FrameVector b);

    const FrameVector& a() const noexcept { return a_; }
    const FrameVector& b() const noexcept { return b_; }
    CurvatureCase case_id() const noexcept { return case_; }

private:
    FrameVector a_;
    FrameVector b_;
    CurvatureCase case_;
};

// Closed form; depends only on the eigenvalues and the index pattern.
double sectional_curvature(const CurvaturePair& pair);

// 12 a^2 b^2 / (a^2 + b^2)^3 for the 2-D ellipse family (alpha, beta; theta).
double otto_curvature_2d(double alpha, double beta);

// ---- geodesic circles ---------------------------------------------------------

// Circle of radius r in the plane of a g-orthonormal pair (a, b) at
// N(P diag(lambda) P^T).
class CircleSpec {
public:
    CircleSpec(EigenPair base_eig, Tangent a, Tangent b, double r, int n_theta = 256);

    const EigenPair& base_eig() const noexcept { return base_eig_; }
    const SpdMatrix& base_cov() const noexcept { return base_cov_; }
    const Tangent& a() const noexcept { return a_; }
    const Tangent& b() const noexcept { return b_; }
    double r() const noexcept { return r_; }
    int n_theta() const noexcept { return n_theta_; }

private:
    EigenPair base_eig_;
    SpdMatrix base_cov_;
    Tangent a_;
    Tangent b_;
    double r_;
    int n_theta_;
};

// Largest r with E + r (cos t A + sin t B) positive definite over a grid of
// `n_grid` angles, times the 0.5 safety factor.
double max_admissible_radius(const Tangent& a, const Tangent& b, int n_grid = 720);

// [E + r(cos t A + sin t B)] V [E + r(cos t A + sin t B)]
SpdMatrix circle_covariance(const CircleSpec& spec, double theta);

inline constexpr double kDefaultSpeedStep = 1e-4;

// Speed of theta -> C_r(theta) at theta0 from central second differences of
// the squared W2 distance, with one Richardson step in the angular step h.
double circle_speed(const CircleSpec& spec, double theta0, double h = kDefaultSpeedStep);

// Trapezoid rule over n_theta uniform nodes on [0, 2 pi).
double circle_length(const CircleSpec& spec, double h = kDefaultSpeedStep);

struct EstimateOptions {
    double r0 = 0.0;  // 0 selects 0.08 * max_admissible_radius
    int n_theta = 256;
    double h = kDefaultSpeedStep;
};

struct CurvatureEstimate {
    double value;                 // extrapolated K
    std::vector<double> radii;    // r0, r0/2, r0/4
    std::vector<double> raw;      // 6 (1 - L(r) / 2 pi r) / r^2 at each radius
};

// Sectional curvature of the plane spanned by a g-orthonormal pair, from the
// length of geodesic circles: L(r) = 2 pi r (1 - K r^2 / 6 + o(r^2)).
// Raw values at three radii are Richardson-extrapolated in r^2.
CurvatureEstimate estimate_curvature(const EigenPair& base_eig, const Tangent& a,
                                     const Tangent& b, const EstimateOptions& opts = {});

// g-orthonormalize (a, b) at N(P diag(lambda) P^T), keeping the spanned plane.
std::pair<Tangent, Tangent> gram_schmidt_pair(const EigenPair& base_eig, const Tangent& a,
                                              const Tangent& b);

// ---- ellipse families in 2-D --------------------------------------------------

// Angle between the flat families N(theta) and N(phi): 2 |theta - phi|.
double angle_between_families(double theta, double phi);

struct AngleNumeric {
    double cosine;  // g(X(theta), X(phi)) / sqrt(g(X(theta), X(theta)) g(X(phi), X(phi)))
    double angle;
};

// Evaluates the angle through the metric at the umbilic projection
// rho = ((alpha + beta) / 2, (alpha + beta) / 2; theta), with X(.) the log map
// from rho to (alpha, beta; .). Requires alpha > beta > 0.
AngleNumeric angle_between_families_numeric(double theta, double phi, double alpha, double beta);

struct UmbilicProjection {
    Gaussian rho;
    double distance;
};

// Nearest isotropic Gaussian to (alpha, beta; theta); distance (alpha - beta) / sqrt 2.
UmbilicProjection projection_to_umbilic(double alpha, double beta, double theta);

}  // namespace gw
