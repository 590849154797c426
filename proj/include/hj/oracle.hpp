#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "hj/hopf_solver.hpp"

// Brute-force and finite-difference reference computations. Everything here is
// deliberately slow and shares no numerical machinery with the analytic
// solvers: agreement between the two sides is evidence, not tautology. The
// problem description types (ProblemSpec, initial-cost evaluation) are reused
// as plain data carriers only.
namespace hj::oracle {

// Tuning knobs for the reference computations.
struct OracleConfig {
    long grid_points = 1'000'000;  // 1D exhaustive search resolution
    double fd_step = 1e-4;         // finite-difference step
    int quad_panels = 64;          // Simpson panels per smooth piece
    int oc_segments = 200;         // trajectory discretization segments
    double oc_tol = 1e-9;          // relative-improvement stopping tolerance

    void validate() const {
        if (grid_points < 2 || !(fd_step > 0.0) || quad_panels < 1 || oc_segments < 1 ||
            !(oc_tol > 0.0)) {
            throw std::invalid_argument("oracle: config values must be positive");
        }
    }
};

// Exhaustive minimization of a scalar function on [lo, hi]: uniform scan over
// grid_points cells followed by a golden-section refinement of the winning
// cell pair. The returned point is within 2*(hi-lo)/grid_points of a global
// minimizer of a continuous objective. Non-finite objective values are
// skipped; if the whole grid is non-finite an exception is thrown. Templated
// on the callable so tight objectives stay inlined in hot verification loops.
template <class F>
double grid_argmin_1d(F&& objective, double lo, double hi, long grid_points) {
    if (!(lo < hi)) throw std::invalid_argument("grid_argmin_1d: need lo < hi");
    if (grid_points < 2) throw std::invalid_argument("grid_argmin_1d: need >= 2 grid points");
    const double step = (hi - lo) / static_cast<double>(grid_points);

    double best_v = std::numeric_limits<double>::infinity();
    long best_i = -1;
    for (long i = 0; i <= grid_points; ++i) {
        const double v = objective(lo + step * static_cast<double>(i));
        if (v < best_v) {
            best_v = v;
            best_i = i;
        }
    }
    if (best_i < 0) {
        throw std::runtime_error("grid_argmin_1d: objective non-finite on the whole grid");
    }
    double arg = lo + step * static_cast<double>(best_i);

    double bl = std::max(lo, arg - step);
    double br = std::min(hi, arg + step);
    constexpr double inv_phi = 0.61803398874989484820;
    double c = br - inv_phi * (br - bl);
    double d = bl + inv_phi * (br - bl);
    double fc = objective(c);
    double fd = objective(d);
    for (int it = 0; it < 80 && (br - bl) > 1e-9 * step; ++it) {
        if (fc < fd) {
            br = d;
            d = c;
            fd = fc;
            c = br - inv_phi * (br - bl);
            fc = objective(c);
        } else {
            bl = c;
            c = d;
            fc = fd;
            d = bl + inv_phi * (br - bl);
            fd = objective(d);
        }
    }
    if (fc < best_v) {
        best_v = fc;
        arg = c;
    }
    if (fd < best_v) {
        best_v = fd;
        arg = d;
    }
    return arg;
}

// Absolute PDE residual |V_t + 0.5 <grad V, M grad V> + U(x)| of a claimed
// solution evaluator, with central finite differences of step fd_step in both
// space and time. Requires t - fd_step > 0 so the time stencil stays in the
// solution's domain.
double pde_residual(const std::function<double(const Eigen::VectorXd&, double)>& solution,
                    const Eigen::VectorXd& x, double t, const Eigen::MatrixXd& M,
                    const std::function<double(const Eigen::VectorXd&)>& potential,
                    double fd_step);

// A path s -> position(s) on [0, horizon] with its analytic velocity and the
// interior times where the velocity (or the potential along the path) may
// kink. Quadrature is split at those times so Simpson panels only ever see
// smooth integrands.
struct SampledPath {
    std::function<Eigen::VectorXd(double)> position;
    std::function<Eigen::VectorXd(double)> velocity;
    std::vector<double> breakpoints;
    double horizon = 0.0;
};

// Total control cost of a path:
//   initial_cost(position(0)) + integral_0^horizon [ 0.5 |velocity|^2_{M^-1}
//                                                    - potential(position) ] ds
// via composite Simpson with quad_panels panels per smooth piece.
double trajectory_cost(const SampledPath& path,
                       const std::function<double(const Eigen::VectorXd&)>& potential,
                       const std::function<double(const Eigen::VectorXd&)>& initial_cost,
                       const Eigen::MatrixXd& M, int quad_panels);

// The separable two-slope potential sum_i U_i(z_i) with U_i(z) = -a_i z for
// z >= 0 and U_i(z) = b_i z for z < 0 (concave, non-positive, kinked at 0).
double two_slope_potential(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                           const Eigen::VectorXd& z);

// Result of the direct optimal-control discretization: discrete optimal value,
// the optimizing piecewise-linear path as an (oc_segments+1) x n matrix of
// nodes (last row pinned to the query point), and the iteration count used.
struct DirectOcRun {
    double value = 0.0;
    Eigen::MatrixXd path;
    int iterations = 0;
    double last_improvement = 0.0;
};

// Minimizes the trapezoidal discretization of
//   Phi(gamma(0)) + integral_0^t [ 0.5 |gamma'|^2_{M^-1} - U(gamma) ] ds
// over piecewise-linear paths with oc_segments segments and gamma(t) = x, by
// accelerated proximal first-order descent with backtracking; the kinked
// potential is handled by its exact scalar proximal map when the coordinate
// change is absent or diagonal, and by subgradients otherwise. Runs at most
// 2000 iterations and stops early once the relative improvement stays below
// oc_tol; throws if that never happens (descent non-convergence). Only desk
// scale (n <= 3) is supported. An optional initial path (same layout as the
// returned one) warm-starts the descent, e.g. when refining segment counts.
DirectOcRun direct_oc_run(const Eigen::VectorXd& x, double t, const hopf::ProblemSpec& spec,
                          int oc_segments, double oc_tol,
                          const std::optional<Eigen::MatrixXd>& initial_path = std::nullopt);

// Value-only convenience wrapper around direct_oc_run.
double direct_oc_solve(const Eigen::VectorXd& x, double t, const hopf::ProblemSpec& spec,
                       int oc_segments, double oc_tol);

}  // namespace hj::oracle
