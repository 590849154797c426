#pragma once

// Grid-free solvers for
//
//   V_t + (1/2) |grad V|_M^2 + U(x) = 0,   V(., 0) = Phi,
//
// where M = P P^T, U(x) = sum_i U_i((P^{-1}(x - u0))_i) with two-slope
// concave pieces U_i, and Phi is one of the supported initial costs.  The
// value at a single point is the supremum of a concave dual objective
//
//   V(x, t) = sup_p  sum_i V(x~_i, t; p_i, a_i, b_i) - Phi~*(p),
//
// solved per query point: coordinatewise closed form + scalar prox for
// separable conjugates, a splitting iteration for coupled convex conjugates,
// and branchwise solves plus a pointwise min for min-of-quadratics costs.
// No spatial grid is ever built; cost per point is polynomial in dimension.

#include "hj/core1d.hpp"
#include "hj/initial_costs.hpp"
#include "hj/prox1d.hpp"

#include <Eigen/Dense>

#include <array>
#include <memory>
#include <optional>
#include <vector>

namespace hj::hopf {

// Affine change of variables: ambient x corresponds to internal
// x~ = P^{-1}(x - u0).  P must be invertible.
struct Transform {
    Eigen::MatrixXd P;
    Eigen::VectorXd u0;
};

// Immutable problem description.  Validates and factors everything once so
// that per-point solves are cheap and safe to run from many threads.
class ProblemSpec {
  public:
    ProblemSpec(Eigen::VectorXd a, Eigen::VectorXd b, initial_costs::InitialCostSpec cost,
                std::optional<Transform> transform = std::nullopt);

    int n() const { return n_; }
    const Eigen::VectorXd& a() const { return a_; }
    const Eigen::VectorXd& b() const { return b_; }
    const initial_costs::InitialCostSpec& cost() const { return cost_; }
    core1d::PotentialParams1D params(int i) const {
        return core1d::PotentialParams1D(a_[i], b_[i]);
    }

    bool has_transform() const { return transform_.has_value(); }
    const Transform& transform() const;
    // kinetic matrix M = P P^T (identity when no transform is present)
    const Eigen::MatrixXd& kinetic_matrix() const { return kinetic_; }
    bool diagonal_transform() const { return diagonal_transform_; }

    Eigen::VectorXd to_internal(const Eigen::VectorXd& x) const;  // P^{-1}(x - u0)
    Eigen::VectorXd to_ambient(const Eigen::VectorXd& xi) const;  // P xi + u0

    // cached pieces used by the solvers
    const Eigen::MatrixXd& p_inverse() const { return p_inv_; }
    const Eigen::VectorXd& u0_internal() const { return u0_int_; }  // P^{-1} u0
    const Eigen::VectorXd& transform_diagonal() const { return p_diag_; }
    const Eigen::MatrixXd& ptp_inverse() const { return ptp_inv_; }  // (P^T P)^{-1}
    const initial_costs::EllipsoidProjector* conjugate_projector() const {
        return projector_.get();
    }
    const Eigen::MatrixXd& conjugate_ball_matrix() const { return conj_ball_; }
    const std::vector<initial_costs::Quadratic>& minplus_branches() const { return branches_; }

  private:
    int n_;
    Eigen::VectorXd a_;
    Eigen::VectorXd b_;
    initial_costs::InitialCostSpec cost_;
    std::optional<Transform> transform_;
    Eigen::MatrixXd kinetic_;
    Eigen::MatrixXd p_inv_;
    Eigen::VectorXd u0_int_;
    bool diagonal_transform_ = true;
    Eigen::VectorXd p_diag_;
    Eigen::MatrixXd ptp_inv_;
    Eigen::MatrixXd conj_ball_;  // dual feasible ellipsoid matrix, if any
    std::shared_ptr<const initial_costs::EllipsoidProjector> projector_;
    std::vector<initial_costs::Quadratic> branches_;
};

struct AdmmConfig {
    double lambda = 1.0;   // splitting weight
    double eps = 1e-8;     // stopping tolerance on each of the three update/gap norms
    int max_iter = 10000;
    // initial iterates in internal coordinates; defaults: d0 = x~, w0 = 0
    std::optional<Eigen::VectorXd> d0;
    std::optional<Eigen::VectorXd> w0;
    prox1d::NewtonConfig newton;
};

struct SolveResult {
    double value = 0.0;
    Eigen::VectorXd p_star;  // dual maximizer, internal coordinates
    int iterations = 0;      // splitting iterations, or max Newton depth for direct solves
    bool converged = true;
    // squared norms |v_k+1 - v_k|^2, |d_k+1 - d_k|^2, |v_k+1 - d_k+1|^2 at exit
    std::array<double, 3> residuals{0.0, 0.0, 0.0};
    std::optional<int> branch;  // winning branch for min-of-quadratics costs
};

struct TrajectorySample {
    std::vector<double> times;  // sorted, within [0, t]
    Eigen::MatrixXd states;     // row k = gamma(times[k]) in ambient coordinates
};

// Entry point: dispatches on cost type and transform presence.  t = 0 returns
// Phi(x) directly.  Throws std::invalid_argument on malformed queries.
SolveResult solve(const Eigen::VectorXd& x, double t, const ProblemSpec& spec,
                  const AdmmConfig& cfg = {});

// Separable closed form for quadratic costs without a transform: one scalar
// prox per dimension, no iteration beyond the scalar Newton root.
SolveResult solve_quadratic(const Eigen::VectorXd& x, double t, const ProblemSpec& spec,
                            const prox1d::NewtonConfig& newton = {});

// Splitting iteration for convex costs (works with a transform as well).
SolveResult solve_admm(const Eigen::VectorXd& x, double t, const ProblemSpec& spec,
                       const AdmmConfig& cfg = {});

// Branchwise solves + pointwise min for min-of-quadratics costs; the winning
// branch index (lowest on ties) lands in SolveResult::branch.
SolveResult solve_minplus(const Eigen::VectorXd& x, double t, const ProblemSpec& spec,
                          const AdmmConfig& cfg = {});

// Transform-aware dispatch (requires spec.has_transform()).
SolveResult solve_general(const Eigen::VectorXd& x, double t, const ProblemSpec& spec,
                          const AdmmConfig& cfg = {});

// Optimal trajectory through (x, t) using the momenta of a finished solve;
// times must lie in [0, t] (they are sorted into the sample).  The final
// state reproduces x.
TrajectorySample optimal_trajectory(const Eigen::VectorXd& x, double t,
                                    const SolveResult& result, const ProblemSpec& spec,
                                    std::vector<double> times);

// Allocation-free separable quadratic kernel for benchmark loops: momenta are
// written into p_out (preallocated, size n) and the value is returned.
// newton_depth_out receives the deepest scalar Newton iteration count.
double solve_quadratic_into(const Eigen::VectorXd& x, double t, const ProblemSpec& spec,
                            const prox1d::NewtonConfig& newton, Eigen::VectorXd& p_out,
                            int& newton_depth_out);

}  // namespace hj::hopf
