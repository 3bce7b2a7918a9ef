#include "gw/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gw/error.hpp"

namespace gw {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kQuarterPi = std::numbers::pi / 4.0;
constexpr double kOrthonormalTol = 1e-10;

int kind_rank(FrameKind k) {
    switch (k) {
        case FrameKind::EPlus: return 0;
        case FrameKind::EDiag: return 1;
        case FrameKind::FOff: return 2;
    }
    return 3;
}

bool same_frame(const FrameVector& a, const FrameVector& b) {
    if (a.frame_lambda.size() != b.frame_lambda.size()) return false;
    for (std::size_t k = 0; k < a.frame_lambda.size(); ++k) {
        const double scale = std::max(1.0, std::abs(a.frame_lambda[k]));
        if (std::abs(a.frame_lambda[k] - b.frame_lambda[k]) > 1e-12 * scale) return false;
    }
    return (a.frame_p - b.frame_p).max_abs() <= 1e-12;
}

int shared_count(const FrameVector& a, const FrameVector& b) {
    int n = 0;
    for (std::size_t x : {a.i, a.j})
        for (std::size_t y : {b.i, b.j}) n += x == y;
    return n;
}

// Index common to both pairs; requires shared_count == 1.
std::size_t shared_index(const FrameVector& a, const FrameVector& b) {
    return (a.i == b.i || a.i == b.j) ? a.i : a.j;
}

std::size_t other_index(const FrameVector& v, std::size_t shared) {
    return v.i == shared ? v.j : v.i;
}

[[noreturn]] void unsupported(const FrameVector& a, const FrameVector& b) {
    throw UnsupportedPair("sectional curvature: pair (" + a.label() + ", " + b.label() +
                          ") is not covered by the closed-form cases");
}

void check_orthonormal(const SpdMatrix& v, const Tangent& a, const Tangent& b) {
    const double aa = metric(v, a.coeff, a.coeff);
    const double bb = metric(v, b.coeff, b.coeff);
    const double ab = metric(v, a.coeff, b.coeff);
    if (std::abs(aa - 1.0) > kOrthonormalTol || std::abs(bb - 1.0) > kOrthonormalTol ||
        std::abs(ab) > kOrthonormalTol) {
        std::ostringstream os;
        os << "tangent pair is not g-orthonormal (g(a,a)=" << aa << ", g(b,b)=" << bb
           << ", g(a,b)=" << ab << "); use gram_schmidt_pair";
        throw DomainError(os.str());
    }
}

SymMatrix direction(const Tangent& a, const Tangent& b, double theta) {
    return std::cos(theta) * a.coeff + std::sin(theta) * b.coeff;
}

}  // namespace

CurvatureCase classify_pair(const FrameVector& a_in, const FrameVector& b_in) {
    if (!same_frame(a_in, b_in)) {
        throw DomainError("classify_pair: frame vectors belong to different frames");
    }
    const bool swap = kind_rank(a_in.kind) > kind_rank(b_in.kind);
    const FrameVector& a = swap ? b_in : a_in;
    const FrameVector& b = swap ? a_in : b_in;
    const std::size_t d = a.frame_lambda.size();
    const int shared = shared_count(a, b);

    switch (a.kind) {
        case FrameKind::EPlus:
            if (b.kind == FrameKind::EPlus) break;
            if (b.kind == FrameKind::EDiag) return CurvatureCase::EPlusEDiag;
            if (b.i == 0 && b.j == d - 1) return CurvatureCase::EPlusFCorner;
            if (b.i == 0 || b.j == d - 1) return CurvatureCase::EPlusFEdge;
            return CurvatureCase::EPlusFInterior;
        case FrameKind::EDiag:
            if (b.kind == FrameKind::EDiag) {
                if (shared == 2) break;
                return CurvatureCase::EDiagEDiag;
            }
            if (shared == 0) return CurvatureCase::EDiagFDisjoint;
            if (shared == 1) return CurvatureCase::EDiagFShared;
            return CurvatureCase::EDiagFSame;
        case FrameKind::FOff:
            if (shared == 0) return CurvatureCase::FFDisjoint;
            if (shared == 1) return CurvatureCase::FFShared;
            break;
    }
    unsupported(a_in, b_in);
}

CurvaturePair::CurvaturePair(FrameVector a, FrameVector b)
    : a_(std::move(a)), b_(std::move(b)), case_(classify_pair(a_, b_)) {}

double sectional_curvature(const CurvaturePair& pair) {
    const bool swap = kind_rank(pair.a().kind) > kind_rank(pair.b().kind);
    const FrameVector& a = swap ? pair.b() : pair.a();
    const FrameVector& b = swap ? pair.a() : pair.b();
    const auto& lam = a.frame_lambda;
    const std::size_t d = lam.size();

    switch (pair.case_id()) {
        case CurvatureCase::EPlusEDiag:
        case CurvatureCase::EPlusFCorner:
        case CurvatureCase::EPlusFInterior:
        case CurvatureCase::EDiagEDiag:
        case CurvatureCase::EDiagFDisjoint:
        case CurvatureCase::FFDisjoint:
            return 0.0;
        case CurvatureCase::EPlusFEdge: {
            const double li = lam[b.i];
            const double lj = lam[b.j];
            return 3.0 * li * lj / ((li + lj) * (li + lj) * (lam[0] + lam[d - 1]));
        }
        case CurvatureCase::EDiagFShared: {
            // e_ik and f_ij sharing i
            const std::size_t i = shared_index(a, b);
            const double li = lam[i];
            const double lj = lam[other_index(b, i)];
            const double lk = lam[other_index(a, i)];
            return 3.0 * li * lj / ((li + lj) * (li + lj) * (li + lk));
        }
        case CurvatureCase::EDiagFSame: {
            const double li = lam[a.i];
            const double lj = lam[a.j];
            return 12.0 * li * lj / ((li + lj) * (li + lj) * (li + lj));
        }
        case CurvatureCase::FFShared: {
            // f_ij and f_ik sharing i
            const std::size_t i = shared_index(a, b);
            const double li = lam[i];
            const double lj = lam[other_index(a, i)];
            const double lk = lam[other_index(b, i)];
            return 3.0 * lj * lk / ((li + lj) * (lj + lk) * (lk + li));
        }
    }
    unsupported(pair.a(), pair.b());
}

double otto_curvature_2d(double alpha, double beta) {
    if (!(alpha > 0.0 && beta > 0.0)) {
        throw DomainError("otto_curvature_2d: alpha and beta must be positive");
    }
    const double a2 = alpha * alpha;
    const double b2 = beta * beta;
    return 12.0 * a2 * b2 / ((a2 + b2) * (a2 + b2) * (a2 + b2));
}

// ---- circles -------------------------------------------------------------------

CircleSpec::CircleSpec(EigenPair base_eig, Tangent a, Tangent b, double r, int n_theta)
    : base_eig_(std::move(base_eig)),
      base_cov_(SpdMatrix::from_eigen(base_eig_.p, base_eig_.lambda)),
      a_(std::move(a)),
      b_(std::move(b)),
      r_(r),
      n_theta_(n_theta) {
    if (a_.dim() != base_cov_.dim() || b_.dim() != base_cov_.dim()) {
        throw DimensionError("CircleSpec: tangent dimension does not match base");
    }
    if (!(r_ >= 0.0) || !std::isfinite(r_)) throw DomainError("CircleSpec: radius must be >= 0");
    if (n_theta_ < 256) throw DomainError("CircleSpec: n_theta must be at least 256");
    check_orthonormal(base_cov_, a_, b_);
}

double max_admissible_radius(const Tangent& a, const Tangent& b, int n_grid) {
    double r_max = std::numeric_limits<double>::infinity();
    for (int k = 0; k < n_grid; ++k) {
        const double theta = kTwoPi * k / n_grid;
        const double lowest = sym_eig(direction(a, b, theta)).lambda.back();
        if (lowest < 0.0) r_max = std::min(r_max, -1.0 / lowest);
    }
    return 0.5 * r_max;
}

SpdMatrix circle_covariance(const CircleSpec& spec, double theta) {
    theta = std::remainder(theta, kTwoPi);
    const std::size_t d = spec.base_cov().dim();
    const SymMatrix m(Matrix::identity(d) + spec.r() * direction(spec.a(), spec.b(), theta).matrix());
    try {
        SpdMatrix check(m);
    } catch (const NotPositiveDefinite&) {
        const double bound = max_admissible_radius(spec.a(), spec.b());
        std::ostringstream os;
        os << "circle_covariance: radius " << spec.r()
           << " leaves the PD domain (max admissible radius " << bound << ")";
        throw RadiusTooLarge(os.str(), bound);
    }
    return SpdMatrix(SymMatrix(m.matrix() * spec.base_cov().matrix() * m.matrix()));
}

double circle_speed(const CircleSpec& spec, double theta0, double h) {
    if (!(h > 0.0)) throw DomainError("circle_speed: step must be positive");
    const SpdMatrix x0 = circle_covariance(spec, theta0);
    auto second_difference = [&](double step) {
        const double forward = w2_squared_local(x0, circle_covariance(spec, theta0 + step));
        const double backward = w2_squared_local(x0, circle_covariance(spec, theta0 - step));
        return (forward + backward) / (2.0 * step * step);
    };
    // The h^2 term of the chord expansion cancels in (4 q(h) - q(2h)) / 3.
    const double speed2 = (4.0 * second_difference(h) - second_difference(2.0 * h)) / 3.0;
    return std::sqrt(std::max(speed2, 0.0));
}

double circle_length(const CircleSpec& spec, double h) {
    const int n = spec.n_theta();
    double sum = 0.0;
    for (int k = 0; k < n; ++k) sum += circle_speed(spec, kTwoPi * k / n, h);
    return sum * kTwoPi / n;
}

CurvatureEstimate estimate_curvature(const EigenPair& base_eig, const Tangent& a,
                                     const Tangent& b, const EstimateOptions& opts) {
    check_orthonormal(SpdMatrix::from_eigen(base_eig.p, base_eig.lambda), a, b);
    const double bound = max_admissible_radius(a, b);
    const double r0 = opts.r0 > 0.0 ? opts.r0 : 0.08 * bound;
    if (!(r0 <= bound)) {
        std::ostringstream os;
        os << "estimate_curvature: radius ladder infeasible (r0 = " << r0
           << " exceeds admissible radius " << bound << ")";
        throw RadiusTooLarge(os.str(), bound);
    }

    CurvatureEstimate out;
    for (double r : {r0, r0 / 2.0, r0 / 4.0}) {
        const CircleSpec spec(base_eig, a, b, r, opts.n_theta);
        const double length = circle_length(spec, opts.h);
        out.radii.push_back(r);
        out.raw.push_back(6.0 * (1.0 - length / (kTwoPi * r)) / (r * r));
    }
    // K(r) = K + c2 r^2 + c4 r^4 + ...
    const double first0 = (4.0 * out.raw[1] - out.raw[0]) / 3.0;
    const double first1 = (4.0 * out.raw[2] - out.raw[1]) / 3.0;
    out.value = (16.0 * first1 - first0) / 15.0;
    return out;
}

std::pair<Tangent, Tangent> gram_schmidt_pair(const EigenPair& base_eig, const Tangent& a,
                                              const Tangent& b) {
    const SpdMatrix v = SpdMatrix::from_eigen(base_eig.p, base_eig.lambda);
    const double aa = metric(v, a.coeff, a.coeff);
    const double bb = metric(v, b.coeff, b.coeff);
    const double ab = metric(v, a.coeff, b.coeff);
    if (!(aa * bb - ab * ab > 1e-12)) {
        throw DomainError("gram_schmidt_pair: tangent vectors are linearly dependent");
    }
    const SymMatrix u = (1.0 / std::sqrt(aa)) * a.coeff;
    const SymMatrix w = b.coeff - metric(v, u, b.coeff) * u;
    const SymMatrix second = (1.0 / std::sqrt(metric(v, w, w))) * w;
    return {Tangent{u}, Tangent{second}};
}

// ---- 2-D families ----------------------------------------------------------------

double angle_between_families(double theta, double phi) {
    for (double x : {theta, phi}) {
        if (!(x > -kQuarterPi && x <= kQuarterPi)) {
            throw DomainError("angle_between_families: angles must lie in (-pi/4, pi/4]");
        }
    }
    return 2.0 * std::abs(theta - phi);
}

AngleNumeric angle_between_families_numeric(double theta, double phi, double alpha, double beta) {
    angle_between_families(theta, phi);
    if (!(alpha > beta && beta > 0.0)) {
        throw DomainError("angle_between_families_numeric: requires alpha > beta > 0");
    }
    const Gaussian rho = projection_to_umbilic(alpha, beta, theta).rho;
    const SymMatrix x = log_map(rho, ellipse_gaussian(alpha, beta, theta)).coeff;
    const SymMatrix y = log_map(rho, ellipse_gaussian(alpha, beta, phi)).coeff;
    const SpdMatrix& v = rho.cov();

    const double xx = metric(v, x, x);
    const double yy = metric(v, y, y);
    const double cosine = metric(v, x, y) / std::sqrt(xx * yy);

    // arccos is ill-conditioned near 0; take the angle from the chord and its
    // complement of the normalized vectors instead.
    const SymMatrix ux = (1.0 / std::sqrt(xx)) * x;
    const SymMatrix uy = (1.0 / std::sqrt(yy)) * y;
    const SymMatrix diff = ux - uy;
    const SymMatrix sum = ux + uy;
    const double angle = 2.0 * std::atan2(std::sqrt(std::max(metric(v, diff, diff), 0.0)),
                                          std::sqrt(std::max(metric(v, sum, sum), 0.0)));
    return AngleNumeric{cosine, angle};
}

UmbilicProjection projection_to_umbilic(double alpha, double beta, double theta) {
    if (!(alpha >= beta && beta > 0.0)) {
        throw DomainError("projection_to_umbilic: requires alpha >= beta > 0");
    }
    const double s = 0.5 * (alpha + beta);
    return UmbilicProjection{ellipse_gaussian(s, s, theta), (alpha - beta) / std::numbers::sqrt2};
}

}  // namespace gw
