#pragma once

// Initial-cost catalogue for the multi-dimensional solvers, plus the convex
// building blocks the splitting iteration needs: Legendre-Fenchel conjugates,
// proximal maps of the conjugates, an exact ellipsoid projector and an exact
// sort-and-scan prox for the squared l1 norm.  All maps here are closed-form
// or finite-algorithm exact; no inner iterative solves besides the scalar
// Lagrange-multiplier root of the ellipsoid projection.

#include <Eigen/Dense>

#include <functional>
#include <variant>
#include <vector>

namespace hj::initial_costs {

// Phi(x) = <slope, x>
struct Linear {
    Eigen::VectorXd slope;
};

// Phi(x) = |x - y|^2 / (2 weight) + offset,  weight > 0
struct Quadratic {
    Eigen::VectorXd y;
    double weight = 1.0;
    double offset = 0.0;
};

// Phi(x) = sqrt(x^T M x),  M symmetric positive definite
struct EllipsoidNorm {
    Eigen::MatrixXd M;
};

// Phi(x) = (1/2) |x - shift|_1^2
struct ShiftedL1Squared {
    Eigen::VectorXd shift;
};

// Phi(x) = min_j (1/2)|x - y_j|^2 + offset_j   (non-convex for m > 1)
struct QuadraticBranch {
    Eigen::VectorXd y;
    double offset = 0.0;
};
struct MinOfQuadratics {
    std::vector<QuadraticBranch> branches;
};

using InitialCostSpec =
    std::variant<Linear, Quadratic, EllipsoidNorm, ShiftedL1Squared, MinOfQuadratics>;

// Ambient dimension the spec was written for.
int dimension(const InitialCostSpec& cost);

// Throws std::invalid_argument unless the spec is well-formed for dimension n
// (consistent sizes, weight > 0, SPD matrix, non-empty branch list).
void validate(const InitialCostSpec& cost, int n);

bool is_convex(const InitialCostSpec& cost);

// Phi(x).
double evaluate(const InitialCostSpec& cost, const Eigen::VectorXd& x);

// One element of the subdifferential of Phi at x (the gradient wherever Phi
// is differentiable; min-of-quadratics uses the lowest-index active branch).
Eigen::VectorXd subgradient(const InitialCostSpec& cost, const Eigen::VectorXd& x);

// Conjugate of the quadratic cost:
//   Phi*(p) = (weight/2) |p + y/weight|^2 - |y|^2/(2 weight) - offset.
double conjugate_quadratic(const Eigen::VectorXd& p, const Eigen::VectorXd& y, double weight,
                           double offset);

// Phi*(p) for the convex variants (+inf outside the domain); throws
// std::invalid_argument for MinOfQuadratics, which has no useful conjugate.
double conjugate(const InitialCostSpec& cost, const Eigen::VectorXd& p);

// Euclidean projection onto the ellipsoid { v : <v, M^{-1} v> <= 1 }.
// Diagonal M takes a direct scalar root-find; a general SPD M is rotated into
// its eigenbasis first.  tol bounds the constraint residual at the output.
Eigen::VectorXd project_ellipsoid(const Eigen::VectorXd& z, const Eigen::MatrixXd& M,
                                  double tol = 1e-12);

// Same projection with the factorization cached across calls.
class EllipsoidProjector {
  public:
    explicit EllipsoidProjector(const Eigen::MatrixXd& M, double tol = 1e-12);
    Eigen::VectorXd operator()(const Eigen::VectorXd& z) const;

  private:
    bool diagonal_;
    Eigen::VectorXd m_;   // eigenvalues (or the diagonal itself)
    Eigen::MatrixXd q_;   // eigenvectors; empty on the diagonal fast path
    double tol_;
};

// Exact prox kernel  argmin_u (mu/2)(sum_i |u_i|)^2 + sum_i (u_i - w_i)^2/(2 sigma_i)
// via sorting the activation thresholds and one linear scan.
Eigen::VectorXd prox_l1sq_weighted(const Eigen::VectorXd& w, double mu,
                                   const Eigen::VectorXd& sigma);

// argmin_v  Phi(lambda v) + (lambda/2)|v - z|^2   for Phi = (1/2)|. - shift|_1^2,
// i.e. the scaled-cost prox the splitting iteration feeds into moreau_v_update.
Eigen::VectorXd prox_shifted_l1_squared(const Eigen::VectorXd& z, const Eigen::VectorXd& shift,
                                        double lambda);

// Moreau identity: prox of Phi*/lambda at z equals z - prox_phi_scaled(z),
// where prox_phi_scaled is the map computed by prox_shifted_l1_squared (or any
// prox of (1/lambda) Phi(lambda .)).
Eigen::VectorXd moreau_v_update(
    const Eigen::VectorXd& z,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& prox_phi_scaled);

// prox of Phi*/lambda at z for the convex variants:
//   argmin_v Phi*(v) + (lambda/2)|v - z|^2.
Eigen::VectorXd prox_conjugate(const InitialCostSpec& cost, const Eigen::VectorXd& z,
                               double lambda);

// The quadratic pieces of a min-of-quadratics cost, as standalone cost specs
// (weight 1, branch offsets preserved).
std::vector<Quadratic> minplus_components(const MinOfQuadratics& cost);

}  // namespace hj::initial_costs
