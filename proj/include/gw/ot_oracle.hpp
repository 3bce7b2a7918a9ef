#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "gw/geometry.hpp"
#include "gw/linalg.hpp"

namespace gw {

// Weighted point cloud; weights are nonnegative and sum to 1 (+-1e-12).
class DiscreteMeasure {
public:
    // points is n x d, one atom per row.
    DiscreteMeasure(Matrix points, std::vector<double> weights);

    std::size_t size() const noexcept { return weights_.size(); }
    std::size_t dim() const noexcept { return points_.cols(); }
    const Matrix& points() const noexcept { return points_; }
    const std::vector<double>& weights() const noexcept { return weights_; }

    std::vector<double> mean() const;
    Matrix covariance() const;

private:
    Matrix points_;
    std::vector<double> weights_;
};

// Tensor grid over mean +- radius_sigmas standard deviations along each
// principal axis (cell centers), weights proportional to the density at the
// nodes. `frame` overrides the principal axes; it must diagonalize cov(g).
DiscreteMeasure discretize_gaussian(const Gaussian& g, int points_per_axis,
                                    double radius_sigmas = 5.0,
                                    const std::optional<Matrix>& frame = std::nullopt);

struct Flow {
    std::size_t source;
    std::size_t target;
    double mass;
};

struct TransportPlan {
    std::vector<Flow> flows;
    double cost = 0.0;
    // Dual variables with u_i + v_j <= |x_i - y_j|^2, equality on the support.
    std::vector<double> source_potential;
    std::vector<double> target_potential;
};

struct PlanCertificate {
    double max_marginal_error;   // rows and columns against the input weights
    double min_reduced_cost;     // min over all (i, j) of c_ij - u_i - v_j
    double max_slackness;        // max |c_ij - u_i - v_j| over flows
    double duality_gap;          // |primal cost - dual objective|
};

// Exact solver for the squared-Euclidean transportation problem by successive
// shortest paths with Dijkstra on reduced costs. One solve per instance.
class TransportSolver {
public:
    TransportSolver(const DiscreteMeasure& mu, const DiscreteMeasure& nu);
    TransportPlan solve();

private:
    const DiscreteMeasure& mu_;
    const DiscreteMeasure& nu_;
    bool used_ = false;
};

TransportPlan solve_discrete_ot(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

PlanCertificate certify(const TransportPlan& plan, const DiscreteMeasure& mu,
                        const DiscreteMeasure& nu);

// W2 between two 1-D Gaussians through the quantile coupling,
// integral over q in (0, 1) of (F_a^-1(q) - F_b^-1(q))^2 by Gauss-Legendre
// panels refined geometrically toward the endpoints.
double quantile_w2_1d(const Gaussian& a, const Gaussian& b);

struct OracleResult {
    double closed_form;
    double lp;
    std::optional<double> quantile;  // d == 1 only
    std::size_t atoms_a;
    std::size_t atoms_b;
    bool shared_frame;  // both grids laid out in a common principal frame
    PlanCertificate certificate;
};

// Closed form against the exact LP on grid discretizations (d <= 2). When the
// covariances commute both grids use a common diagonalizing frame.
OracleResult oracle_w2(const Gaussian& a, const Gaussian& b, int points_per_axis,
                       double radius_sigmas = 5.0);

}  // namespace gw
