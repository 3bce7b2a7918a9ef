#include "gw/ot_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "gw/error.hpp"

namespace gw {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();

double squared_distance(const Matrix& x, std::size_t i, const Matrix& y, std::size_t j) {
    double s = 0.0;
    for (std::size_t k = 0; k < x.cols(); ++k) {
        const double d = x(i, k) - y(j, k);
        s += d * d;
    }
    return s;
}

// Frame diagonalizing both covariances, if they commute and a generic
// combination separates the eigenvectors.
std::optional<Matrix> common_frame(const SpdMatrix& v, const SpdMatrix& u) {
    const Matrix vu = v.matrix() * u.matrix();
    const Matrix uv = u.matrix() * v.matrix();
    const double scale = v.matrix().max_abs() * u.matrix().max_abs();
    if ((vu - uv).max_abs() > 1e-12 * scale) return std::nullopt;
    const double kappa = 0.6180339887498949 * v.matrix().max_abs() / u.matrix().max_abs();
    return sym_eig(v.sym() + kappa * u.sym()).p;
}

}  // namespace

// ---- DiscreteMeasure -------------------------------------------------------------

DiscreteMeasure::DiscreteMeasure(Matrix points, std::vector<double> weights)
    : points_(std::move(points)), weights_(std::move(weights)) {
    if (weights_.empty()) throw DomainError("DiscreteMeasure: at least one atom required");
    if (points_.rows() != weights_.size()) {
        throw DimensionError("DiscreteMeasure: one point per weight required");
    }
    double total = 0.0;
    for (double w : weights_) {
        if (!(w >= 0.0)) throw DomainError("DiscreteMeasure: weights must be nonnegative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-12) {
        std::ostringstream os;
        os << "DiscreteMeasure: weights sum to " << total << ", expected 1";
        throw DomainError(os.str());
    }
}

std::vector<double> DiscreteMeasure::mean() const {
    std::vector<double> m(dim(), 0.0);
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t k = 0; k < dim(); ++k) m[k] += weights_[i] * points_(i, k);
    return m;
}

Matrix DiscreteMeasure::covariance() const {
    const std::vector<double> m = mean();
    Matrix c(dim(), dim());
    for (std::size_t i = 0; i < size(); ++i)
        for (std::size_t a = 0; a < dim(); ++a)
            for (std::size_t b = 0; b < dim(); ++b)
                c(a, b) += weights_[i] * (points_(i, a) - m[a]) * (points_(i, b) - m[b]);
    return c;
}

DiscreteMeasure discretize_gaussian(const Gaussian& g, int points_per_axis, double radius_sigmas,
                                    const std::optional<Matrix>& frame) {
    const std::size_t d = g.dim();
    if (d > 3) throw DomainError("discretize_gaussian: supported for d <= 3 only");
    if (points_per_axis < 2) throw DomainError("discretize_gaussian: need at least 2 points per axis");
    if (!(radius_sigmas > 0.0)) throw DomainError("discretize_gaussian: radius must be positive");

    Matrix p;
    std::vector<double> sd(d);
    if (frame) {
        const FlatCoordinates fc = flat_coordinates(*frame, Gaussian(g.cov()));
        p = *frame;
        sd = fc.sd;
    } else {
        p = g.cov().eig().p;
        for (std::size_t k = 0; k < d; ++k) sd[k] = std::sqrt(g.cov().eig().lambda[k]);
    }

    const std::size_t n = static_cast<std::size_t>(points_per_axis);
    std::vector<double> nodes(n);
    const double spacing = 2.0 * radius_sigmas / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) nodes[k] = -radius_sigmas + (static_cast<double>(k) + 0.5) * spacing;

    std::size_t total = 1;
    for (std::size_t k = 0; k < d; ++k) total *= n;

    Matrix points(total, d);
    std::vector<double> weights(total);
    std::vector<std::size_t> idx(d, 0);
    double sum = 0.0;
    for (std::size_t a = 0; a < total; ++a) {
        double r2 = 0.0;
        for (std::size_t k = 0; k < d; ++k) r2 += nodes[idx[k]] * nodes[idx[k]];
        for (std::size_t row = 0; row < d; ++row) {
            double x = g.mean()[row];
            for (std::size_t k = 0; k < d; ++k) x += p(row, k) * sd[k] * nodes[idx[k]];
            points(a, row) = x;
        }
        weights[a] = std::exp(-0.5 * r2);
        sum += weights[a];
        for (std::size_t k = d; k-- > 0;) {
            if (++idx[k] < n) break;
            idx[k] = 0;
        }
    }
    for (double& w : weights) w /= sum;
    return DiscreteMeasure(std::move(points), std::move(weights));
}

// ---- transportation solver ---------------------------------------------------------

TransportSolver::TransportSolver(const DiscreteMeasure& mu, const DiscreteMeasure& nu)
    : mu_(mu), nu_(nu) {
    if (mu.dim() != nu.dim()) throw DimensionError("solve_discrete_ot: dimension mismatch");
}

TransportPlan TransportSolver::solve() {
    if (used_) throw DomainError("TransportSolver: instance already used");
    used_ = true;

    const std::size_t n = mu_.size();
    const std::size_t m = nu_.size();
    std::vector<double> cost(n * m);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j)
            cost[i * m + j] = squared_distance(mu_.points(), i, nu_.points(), j);

    std::vector<double> supply = mu_.weights();
    std::vector<double> demand = nu_.weights();
    std::vector<double> flow(n * m, 0.0);

    // Node potentials keeping reduced costs c_ij + hs_i - ht_j >= 0 on every
    // residual arc.
    std::vector<double> hs(n, 0.0);
    std::vector<double> ht(m, kInf);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) ht[j] = std::min(ht[j], cost[i * m + j]);

    std::vector<double> ds(n), dt(m);
    std::vector<char> done_s(n), done_t(m);
    std::vector<std::size_t> parent_s(n), parent_t(m);

    for (;;) {
        const bool any_supply = std::any_of(supply.begin(), supply.end(), [](double s) { return s > 0.0; });
        const bool any_demand = std::any_of(demand.begin(), demand.end(), [](double s) { return s > 0.0; });
        if (!any_supply || !any_demand) break;

        std::fill(done_s.begin(), done_s.end(), 0);
        std::fill(done_t.begin(), done_t.end(), 0);
        std::fill(dt.begin(), dt.end(), kInf);
        std::fill(parent_s.begin(), parent_s.end(), kNone);
        std::fill(parent_t.begin(), parent_t.end(), kNone);
        for (std::size_t i = 0; i < n; ++i) ds[i] = supply[i] > 0.0 ? 0.0 : kInf;

        std::size_t target = kNone;
        double reach = kInf;
        for (;;) {
            // Dense Dijkstra: pick the closest unfinished node.
            double best = kInf;
            std::size_t pick = kNone;
            bool pick_is_source = false;
            for (std::size_t i = 0; i < n; ++i)
                if (!done_s[i] && ds[i] < best) best = ds[i], pick = i, pick_is_source = true;
            for (std::size_t j = 0; j < m; ++j)
                if (!done_t[j] && dt[j] < best) best = dt[j], pick = j, pick_is_source = false;
            if (pick == kNone) break;

            if (pick_is_source) {
                const std::size_t i = pick;
                done_s[i] = 1;
                const double* row = &cost[i * m];
                for (std::size_t j = 0; j < m; ++j) {
                    if (done_t[j]) continue;
                    const double nd = std::max(best, best + row[j] + hs[i] - ht[j]);
                    if (nd < dt[j]) dt[j] = nd, parent_t[j] = i;
                }
            } else {
                const std::size_t j = pick;
                done_t[j] = 1;
                if (demand[j] > 0.0) {
                    target = j;
                    reach = best;
                    break;
                }
                for (std::size_t i = 0; i < n; ++i) {
                    if (done_s[i] || flow[i * m + j] <= 0.0) continue;
                    const double nd = std::max(best, best - cost[i * m + j] + ht[j] - hs[i]);
                    if (nd < ds[i]) ds[i] = nd, parent_s[i] = j;
                }
            }
        }
        if (target == kNone) throw NumericalFailure("solve_discrete_ot: no augmenting path");

        for (std::size_t i = 0; i < n; ++i) hs[i] += std::min(ds[i], reach);
        for (std::size_t j = 0; j < m; ++j) ht[j] += std::min(dt[j], reach);

        // Bottleneck along the path target <- source <- sink <- ... <- root source.
        double delta = demand[target];
        std::size_t j = target;
        std::size_t root = kNone;
        for (;;) {
            const std::size_t i = parent_t[j];
            const std::size_t prev = parent_s[i];
            if (prev == kNone) {
                delta = std::min(delta, supply[i]);
                root = i;
                break;
            }
            delta = std::min(delta, flow[i * m + prev]);
            j = prev;
        }

        j = target;
        for (;;) {
            const std::size_t i = parent_t[j];
            flow[i * m + j] += delta;
            const std::size_t prev = parent_s[i];
            if (prev == kNone) break;
            double& back = flow[i * m + prev];
            back = back == delta ? 0.0 : back - delta;
            j = prev;
        }
        supply[root] = supply[root] == delta ? 0.0 : supply[root] - delta;
        demand[target] = demand[target] == delta ? 0.0 : demand[target] - delta;
    }

    TransportPlan plan;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            const double f = flow[i * m + j];
            if (f > 0.0) {
                plan.flows.push_back(Flow{i, j, f});
                plan.cost += f * cost[i * m + j];
            }
        }
    plan.source_potential.resize(n);
    for (std::size_t i = 0; i < n; ++i) plan.source_potential[i] = -hs[i];
    plan.target_potential = ht;
    return plan;
}

TransportPlan solve_discrete_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
    return TransportSolver(mu, nu).solve();
}

PlanCertificate certify(const TransportPlan& plan, const DiscreteMeasure& mu,
                        const DiscreteMeasure& nu) {
    const std::size_t n = mu.size();
    const std::size_t m = nu.size();
    std::vector<double> rows(n, 0.0), cols(m, 0.0);
    PlanCertificate cert{0.0, kInf, 0.0, 0.0};
    for (const Flow& f : plan.flows) {
        rows[f.source] += f.mass;
        cols[f.target] += f.mass;
        const double c = squared_distance(mu.points(), f.source, nu.points(), f.target);
        cert.max_slackness = std::max(
            cert.max_slackness,
            std::abs(c - plan.source_potential[f.source] - plan.target_potential[f.target]));
    }
    for (std::size_t i = 0; i < n; ++i)
        cert.max_marginal_error = std::max(cert.max_marginal_error, std::abs(rows[i] - mu.weights()[i]));
    for (std::size_t j = 0; j < m; ++j)
        cert.max_marginal_error = std::max(cert.max_marginal_error, std::abs(cols[j] - nu.weights()[j]));

    double dual = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        dual += plan.source_potential[i] * mu.weights()[i];
        for (std::size_t j = 0; j < m; ++j) {
            const double rc = squared_distance(mu.points(), i, nu.points(), j) -
                              plan.source_potential[i] - plan.target_potential[j];
            cert.min_reduced_cost = std::min(cert.min_reduced_cost, rc);
        }
    }
    for (std::size_t j = 0; j < m; ++j) dual += plan.target_potential[j] * nu.weights()[j];
    cert.duality_gap = std::abs(plan.cost - dual);
    return cert;
}

// ---- oracles ------------------------------------------------------------------------

double quantile_w2_1d(const Gaussian& a, const Gaussian& b) {
    if (a.dim() != 1 || b.dim() != 1) throw DimensionError("quantile_w2_1d: 1-D Gaussians only");
    const double dm = a.mean()[0] - b.mean()[0];
    const double ds = std::sqrt(a.cov()(0, 0)) - std::sqrt(b.cov()(0, 0));

    // Lower half of (0, 1); the upper half enters through Phi^-1(1 - u) = -Phi^-1(u).
    auto integrand = [&](double u) {
        const double z = -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * u);
        const double lo = dm + ds * z;
        const double hi = dm - ds * z;
        return lo * lo + hi * hi;
    };
    using Rule = boost::math::quadrature::gauss<double, 20>;
    double total = 0.0;
    double hi = 0.5;
    for (int k = 0; k < 100; ++k) {
        const double lo = 0.5 * hi;
        total += Rule::integrate(integrand, lo, hi);
        hi = lo;
    }
    return std::sqrt(total);
}

OracleResult oracle_w2(const Gaussian& a, const Gaussian& b, int points_per_axis,
                       double radius_sigmas) {
    if (a.dim() != b.dim()) throw DimensionError("oracle_w2: dimension mismatch");
    if (a.dim() > 2) throw DomainError("oracle_w2: LP oracle supports d <= 2");

    std::optional<Matrix> frame = common_frame(a.cov(), b.cov());
    std::optional<DiscreteMeasure> mu, nu;
    if (frame) {
        try {
            mu.emplace(discretize_gaussian(a, points_per_axis, radius_sigmas, frame));
            nu.emplace(discretize_gaussian(b, points_per_axis, radius_sigmas, frame));
        } catch (const DomainError&) {
            frame.reset();
        }
    }
    if (!frame) {
        mu.emplace(discretize_gaussian(a, points_per_axis, radius_sigmas));
        nu.emplace(discretize_gaussian(b, points_per_axis, radius_sigmas));
    }

    const TransportPlan plan = solve_discrete_ot(*mu, *nu);
    OracleResult out{w2_distance(a, b),
                     std::sqrt(plan.cost),
                     std::nullopt,
                     mu->size(),
                     nu->size(),
                     frame.has_value(),
                     certify(plan, *mu, *nu)};
    if (a.dim() == 1) out.quantile = quantile_w2_1d(a, b);
    return out;
}

}  // namespace gw
