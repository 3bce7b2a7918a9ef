#include <doctest.h>

#include <cmath>
#include <numbers>

#include "gw/error.hpp"
#include "gw/geometry.hpp"
#include "support.hpp"

using namespace gw;
using gw::testing::make_rng;
using gw::testing::max_abs_diff;
using gw::testing::random_gaussian;
using gw::testing::random_spd;
using gw::testing::uniform;

namespace {

Gaussian n1(double m, double var) { return Gaussian({m}, SpdMatrix{{var}}); }

// E[(x - T(x))^2] for x ~ N(m, s^2) and the monotone map T(x) = n + (t/s)(x - m),
// integrated by composite Simpson on +-12 sd.
double monotone_coupling_cost_1d(double m, double s, double n, double t) {
    const int steps = 4000;
    const double lo = -12.0, hi = 12.0, h = (hi - lo) / steps;
    double acc = 0.0;
    for (int k = 0; k <= steps; ++k) {
        const double z = lo + k * h;
        const double x = m + s * z;
        const double y = n + t * z;
        const double f = (x - y) * (x - y) * std::exp(-0.5 * z * z) / std::sqrt(2 * std::numbers::pi);
        const double w = (k == 0 || k == steps) ? 1.0 : (k % 2 ? 4.0 : 2.0);
        acc += w * f;
    }
    return acc * h / 3.0;
}

}  // namespace

TEST_CASE("w2_distance examples") {
    const Gaussian id2(SpdMatrix(SymMatrix::identity(2)));
    CHECK(w2_distance(id2, id2) == doctest::Approx(0.0));

    const double quad = monotone_coupling_cost_1d(0.0, 1.0, 3.0, 2.0);
    CHECK(quad == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(w2_distance(n1(0, 1), n1(3, 4)) == doctest::Approx(std::sqrt(quad)).epsilon(1e-12));

    const Gaussian a(SpdMatrix{{1, 0}, {0, 4}});
    const Gaussian b(SpdMatrix{{9, 0}, {0, 16}});
    CHECK(w2_distance(a, b) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-14));
    CHECK(w2_distance(a, b, true) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-14));
}

TEST_CASE("w2_distance rejects dimension mismatch") {
    CHECK_THROWS_AS(w2_distance(n1(0, 1), Gaussian(SpdMatrix(SymMatrix::identity(2)))), DimensionError);
}

TEST_CASE("the 2x2 fast path agrees with the eigen path") {
    auto rng = make_rng(11);
    for (int trial = 0; trial < 500; ++trial) {
        const Gaussian a = random_gaussian(rng, 2);
        const Gaussian b = random_gaussian(rng, 2);
        const double fast = w2_squared(a, b);
        const double slow = w2_squared(a, b, true);
        CHECK(std::abs(fast - slow) <= 1e-10 * std::max(1.0, slow));
    }
}

TEST_CASE("optimal_map examples") {
    SUBCASE("identity when a == b") {
        auto rng = make_rng(12);
        const Gaussian a = random_gaussian(rng, 3);
        const AffineMap m = optimal_map(a, a);
        CHECK(max_abs_diff(m.linear, Matrix::identity(3)) <= 1e-10);
        const auto y = m.apply(a.mean());
        for (std::size_t i = 0; i < 3; ++i) CHECK(y[i] == doctest::Approx(a.mean()[i]));
    }
    SUBCASE("cov(a) = I gives cov(b)^1/2") {
        const Gaussian a(SpdMatrix(SymMatrix::identity(2)));
        const Gaussian b(SpdMatrix{{2, 1}, {1, 2}});
        CHECK(max_abs_diff(optimal_map(a, b).linear, spd_sqrt(b.cov()).matrix()) <= 1e-12);
    }
    SUBCASE("pushforward of diag(1,2) onto [[2,1],[1,2]]") {
        const Gaussian a(SpdMatrix{{1, 0}, {0, 2}});
        const Gaussian b(SpdMatrix{{2, 1}, {1, 2}});
        const Matrix w = optimal_map(a, b).linear;
        CHECK(max_abs_diff(w * a.cov().matrix() * w, b.cov().matrix()) <= 1e-9 * 3.0);
    }
}

TEST_CASE("optimal_map pushes forward random pairs") {
    auto rng = make_rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 1 + trial % 4;
        const Gaussian a = random_gaussian(rng, d);
        const Gaussian b = random_gaussian(rng, d);
        const AffineMap m = optimal_map(a, b);
        const Matrix push = m.linear * a.cov().matrix() * m.linear;
        CHECK(max_abs_diff(push, b.cov().matrix()) <= 1e-9 * b.cov().matrix().max_abs());
        CHECK(max_abs_diff(m.linear, m.linear.transposed()) <= 1e-12 * m.linear.max_abs());
        const auto y = m.apply(a.mean());
        for (std::size_t i = 0; i < d; ++i) CHECK(std::abs(y[i] - b.mean()[i]) <= 1e-12);
    }
}

TEST_CASE("geodesic examples") {
    auto rng = make_rng(14);
    const Gaussian a = random_gaussian(rng, 3);
    const Gaussian b = random_gaussian(rng, 3);
    CHECK(max_abs_diff(geodesic(a, b, 0.0).cov().matrix(), a.cov().matrix()) <= 1e-10);
    CHECK(max_abs_diff(geodesic(a, b, 1.0).cov().matrix(), b.cov().matrix()) <= 1e-10);

    const Gaussian mid = geodesic(n1(0, 1), n1(0, 9), 0.5);
    CHECK(mid.cov()(0, 0) == doctest::Approx(4.0).epsilon(1e-14));
    CHECK(w2_distance(n1(0, 1), mid) == doctest::Approx(1.0).epsilon(1e-14));

    CHECK_THROWS_AS(geodesic(a, b, -0.1), DomainError);
    CHECK_THROWS_AS(geodesic(a, b, 1.5), DomainError);
}

TEST_CASE("geodesics are affine in the distance") {
    auto rng = make_rng(15);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 1 + trial % 4;
        const Gaussian a = random_gaussian(rng, d);
        const Gaussian b = random_gaussian(rng, d);
        const double s = uniform(rng, 0, 1), t = uniform(rng, 0, 1);
        const double dist = w2_distance(a, b);
        const double ds = w2_distance(geodesic(a, b, s), geodesic(a, b, t));
        CHECK(std::abs(ds - std::abs(s - t) * dist) <= 1e-8 * std::max(1.0, dist));
    }
}

TEST_CASE("metric axioms on random triples") {
    auto rng = make_rng(16);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t d = 1 + trial % 4;
        const Gaussian a = random_gaussian(rng, d);
        const Gaussian b = random_gaussian(rng, d);
        const Gaussian c = random_gaussian(rng, d);
        const double ab = w2_distance(a, b), ba = w2_distance(b, a);
        CHECK(ab == ba);
        CHECK(ab >= 0.0);
        CHECK(w2_distance(a, a) <= 1e-10 * std::max(1.0, a.cov().matrix().max_abs()));
        CHECK(w2_distance(a, c) <= ab + w2_distance(b, c) + 1e-9);
    }
}

TEST_CASE("metric tensor examples") {
    const SpdMatrix v{{1, 0}, {0, 2}};
    CHECK(metric(v, SymMatrix::zero(2), SymMatrix::zero(2)) == 0.0);

    // tr(x V y) with x = E11, y = swap: x V y = [[0,1],[0,0]], trace 0
    const SymMatrix x{{1, 0}, {0, 0}};
    const SymMatrix y{{0, 1}, {1, 0}};
    const Matrix prod = x.matrix() * v.matrix() * y.matrix();
    CHECK(metric(v, x, y) == prod(0, 0) + prod(1, 1));
    CHECK(metric(v, x, y) == 0.0);

    const SymMatrix z{{0.5, 1}, {1, -2}};
    const Matrix pz = x.matrix() * v.matrix() * z.matrix();
    CHECK(metric(v, x, z) == doctest::Approx(pz.trace()));
    CHECK(metric(v, x, z) == doctest::Approx(metric(v, z, x)));
    CHECK_THROWS_AS(metric(v, SymMatrix::zero(3), SymMatrix::zero(3)), DimensionError);
}

TEST_CASE("exp_map examples") {
    auto rng = make_rng(17);
    const Gaussian base = random_gaussian(rng, 3);
    for (double t : {-1.0, 0.0, 2.5}) {
        const Gaussian g = exp_map(base, Tangent{SymMatrix::zero(3)}, t);
        CHECK(max_abs_diff(g.cov().matrix(), base.cov().matrix()) <= 1e-14);
    }
    const Gaussian id(SpdMatrix(SymMatrix::identity(2)));
    const Gaussian g = exp_map(id, Tangent{0.5 * SymMatrix::identity(2)}, 1.0);
    CHECK(max_abs_diff(g.cov().matrix(), Matrix::identity(2) * 2.25) <= 1e-14);

    CHECK_THROWS_WITH_AS(exp_map(id, Tangent{SymMatrix::identity(2)}, -1.0),
                         doctest::Contains("exp-map outside PD domain"), DomainError);
}

TEST_CASE("log_map examples") {
    const Gaussian id(SpdMatrix(SymMatrix::identity(2)));
    const Gaussian four(SpdMatrix(4.0 * SymMatrix::identity(2)));
    CHECK(max_abs_diff(log_map(id, four).coeff.matrix(), Matrix::identity(2)) <= 1e-14);
    CHECK(log_map(four, four).coeff.max_abs() <= 1e-14);
    CHECK_THROWS_AS(log_map(id, translate(id, std::vector<double>{1.0, 0.0})), DomainError);
}

TEST_CASE("exp and log are inverse and norm compatible") {
    auto rng = make_rng(18);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t d = 1 + trial % 4;
        const Gaussian a(random_spd(rng, d));
        const Gaussian b(random_spd(rng, d));
        const Tangent s = log_map(a, b);
        const Gaussian back = exp_map(a, s, 1.0);
        CHECK(max_abs_diff(back.cov().matrix(), b.cov().matrix()) <= 1e-9 * b.cov().matrix().max_abs());

        const double sq = w2_squared(a, b);
        CHECK(std::abs(metric(a, s, s) - sq) <= 1e-9 * std::max(sq, 1e-3));

        // log(exp(S)) = S for S inside the cut domain of a symmetric map
        const Tangent small{0.3 * log_map(a, b).coeff};
        const Tangent again = log_map(a, exp_map(a, small, 1.0));
        CHECK(max_abs_diff(again.coeff.matrix(), small.coeff.matrix()) <= 1e-9);
    }
}

TEST_CASE("frame in d = 2 at the identity") {
    const EigenPair eig = sym_eig(SymMatrix::identity(2));
    const auto f = frame(eig);
    REQUIRE(f.size() == 3);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(f[0].label() == "e+");
    CHECK(max_abs_diff(f[0].as_tangent.coeff.matrix(), Matrix{{s, 0}, {0, s}}) <= 1e-15);
    CHECK(f[1].label() == "e12");
    CHECK(max_abs_diff(f[1].as_tangent.coeff.matrix(), Matrix{{s, 0}, {0, -s}}) <= 1e-15);
    CHECK(f[2].label() == "f12");
    CHECK(max_abs_diff(f[2].as_tangent.coeff.matrix(), Matrix{{0, s}, {s, 0}}) <= 1e-15);
}

TEST_CASE("frame vectors are unit and the claimed pairs orthogonal") {
    auto rng = make_rng(19);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t d = 2 + trial % 4;
        const SpdMatrix v = random_spd(rng, d);
        const EigenPair& eig = v.eig();
        const auto f = frame(eig);
        CHECK(f.size() == d * d - d + 1);
        for (const auto& x : f) CHECK(metric(Gaussian(v), x.as_tangent, x.as_tangent) == doctest::Approx(1.0).epsilon(1e-12));
        for (std::size_t p = 0; p < f.size(); ++p) {
            for (std::size_t q = p + 1; q < f.size(); ++q) {
                const bool both_diag = f[p].kind != FrameKind::FOff && f[q].kind != FrameKind::FOff;
                if (both_diag) continue;  // (e+, e_ij) and (e_ij, e_kl) are not orthogonal in general
                CHECK(std::abs(metric(Gaussian(v), f[p].as_tangent, f[q].as_tangent)) <= 1e-12);
            }
        }
    }
    CHECK_THROWS_AS(frame(sym_eig(SymMatrix{{1.0}})), DimensionError);
}

TEST_CASE("d = 3 frame example: f12 and f13 are orthogonal") {
    const SpdMatrix v{{1, 0, 0}, {0, 2, 0}, {0, 0, 3}};
    const FrameVector f12 = frame_vector(v.eig(), FrameKind::FOff, 0, 1);
    const FrameVector f13 = frame_vector(v.eig(), FrameKind::FOff, 0, 2);
    const Matrix prod = f12.as_tangent.coeff.matrix() * v.matrix() * f13.as_tangent.coeff.matrix();
    CHECK(prod.trace() == 0.0);
    CHECK(std::abs(metric(Gaussian(v), f12.as_tangent, f13.as_tangent)) <= 1e-15);
    CHECK(metric(Gaussian(v), f12.as_tangent, f12.as_tangent) == doctest::Approx(1.0).epsilon(1e-14));
    // e+ and e12 are not orthogonal
    const FrameVector ep = frame_vector(v.eig(), FrameKind::EPlus);
    const FrameVector e12 = frame_vector(v.eig(), FrameKind::EDiag, 0, 1);
    CHECK(std::abs(metric(Gaussian(v), ep.as_tangent, e12.as_tangent)) > 0.1);
}

TEST_CASE("frame labels") {
    const EigenPair eig = sym_eig(SymMatrix::identity(12));
    CHECK(frame_vector(eig, FrameKind::FOff, 2, 3).label() == "f34");
    CHECK(frame_vector(eig, FrameKind::EDiag, 0, 11).label() == "e1_12");
}

TEST_CASE("flat_coordinates examples") {
    const Matrix id = Matrix::identity(2);
    auto c = flat_coordinates(id, Gaussian(SpdMatrix(SymMatrix::identity(2))));
    CHECK(c.mean == std::vector<double>{0.0, 0.0});
    CHECK(c.sd == std::vector<double>{1.0, 1.0});

    c = flat_coordinates(id, Gaussian(SpdMatrix{{4, 0}, {0, 9}}));
    CHECK(c.sd == std::vector<double>{2.0, 3.0});

    const Gaussian a(SpdMatrix{{1, 0}, {0, 4}});
    const Gaussian b(SpdMatrix{{9, 0}, {0, 16}});
    const auto ca = flat_coordinates(id, a), cb = flat_coordinates(id, b);
    const double euclid = std::hypot(ca.sd[0] - cb.sd[0], ca.sd[1] - cb.sd[1]);
    CHECK(euclid == doctest::Approx(std::sqrt(8.0)).epsilon(1e-15));
    CHECK(euclid == doctest::Approx(w2_distance(a, b)).epsilon(1e-14));

    CHECK_THROWS_AS(flat_coordinates(id, Gaussian(SpdMatrix{{2, 1}, {1, 2}})), DomainError);
}

TEST_CASE("flat families are flat") {
    auto rng = make_rng(20);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t d = 1 + trial % 4;
        const Matrix p = gw::testing::random_orthogonal(rng, d);
        auto draw = [&] {
            std::vector<double> lam(d), m(d);
            for (auto& l : lam) l = uniform(rng, 0.1, 6.0);
            for (auto& x : m) x = uniform(rng, -2.0, 2.0);
            return Gaussian(m, SpdMatrix::from_eigen(p, lam));
        };
        const Gaussian a = draw(), b = draw();
        const auto ca = flat_coordinates(p, a), cb = flat_coordinates(p, b);
        double sq = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            sq += (ca.mean[i] - cb.mean[i]) * (ca.mean[i] - cb.mean[i]);
            sq += (ca.sd[i] - cb.sd[i]) * (ca.sd[i] - cb.sd[i]);
        }
        const double w = w2_distance(a, b);
        CHECK(std::abs(std::sqrt(sq) - w) <= 1e-10 * std::max(1.0, w));
    }
}

TEST_CASE("one-dimensional Gaussians form a half plane") {
    auto rng = make_rng(21);
    for (int trial = 0; trial < 500; ++trial) {
        const double m1 = uniform(rng, -5, 5), m2 = uniform(rng, -5, 5);
        const double s1 = uniform(rng, 0.1, 4), s2 = uniform(rng, 0.1, 4);
        const double expected = (m1 - m2) * (m1 - m2) + (s1 - s2) * (s1 - s2);
        CHECK(std::abs(w2_squared(n1(m1, s1 * s1), n1(m2, s2 * s2)) - expected) <= 1e-12 * std::max(1.0, expected));
    }
}

TEST_CASE("translate") {
    const Gaussian id(SpdMatrix(SymMatrix::identity(2)));
    CHECK(w2_distance(id, translate(id, std::vector<double>{0.0, 0.0})) == 0.0);
    CHECK(w2_distance(id, translate(id, std::vector<double>{3.0, 4.0})) == doctest::Approx(5.0).epsilon(1e-15));
    CHECK_THROWS_AS(translate(id, std::vector<double>{1.0}), DimensionError);

    auto rng = make_rng(22);
    for (int trial = 0; trial < 100; ++trial) {
        const Gaussian g = random_gaussian(rng, 3);
        std::vector<double> v(3);
        for (auto& x : v) x = uniform(rng, -3, 3);
        const double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
        CHECK(std::abs(w2_distance(g, translate(g, v)) - len) <= 1e-12 * std::max(1.0, len));
        // additivity along the line
        std::vector<double> half{v[0] / 2, v[1] / 2, v[2] / 2};
        const Gaussian h = translate(g, half);
        CHECK(std::abs(w2_distance(g, h) + w2_distance(h, translate(g, v)) - len) <= 1e-12 * std::max(1.0, len));
    }
}

TEST_CASE("w2_squared_local matches the closed form away from cancellation") {
    auto rng = make_rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t d = 1 + trial % 4;
        const SpdMatrix x = random_spd(rng, d);
        const SymMatrix s = 0.05 * gw::testing::random_sym(rng, d);
        const SpdMatrix y(SymMatrix((Matrix::identity(d) + s.matrix()) * x.matrix() * (Matrix::identity(d) + s.matrix())));
        const double local = w2_squared_local(x, y);
        const double closed = w2_squared(Gaussian(x), Gaussian(y), true);
        CHECK(std::abs(local - closed) <= 1e-9 * std::max(closed, 1e-6));
    }
}

TEST_CASE("ellipse parametrization round trip") {
    auto rng = make_rng(24);
    for (int trial = 0; trial < 200; ++trial) {
        const double beta = uniform(rng, 0.2, 3.0);
        const double alpha = beta + uniform(rng, 0.01, 3.0);
        const double theta = uniform(rng, -std::numbers::pi / 4 + 1e-3, std::numbers::pi / 4);
        const auto p = ellipse_parameters(ellipse_gaussian(alpha, beta, theta).cov());
        CHECK(p.alpha == doctest::Approx(alpha).epsilon(1e-12));
        CHECK(p.beta == doctest::Approx(beta).epsilon(1e-12));
        CHECK(p.theta == doctest::Approx(theta).epsilon(1e-10));
    }
}
