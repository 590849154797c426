#pragma once

// Scalar proximal step for the negated one-dimensional value function:
//
//   p* = argmin_p  -V(x, t; p, a, b) + (lambda/2) (p - c)^2,   lambda > 0, t > 0.
//
// -V is strictly convex and piecewise closed-form in p, so the minimizer is
// found exactly by comparing four candidates: the closed-form stationary
// points of the two straight-characteristic pieces (p1, p2), the stationary
// point of the kink-parked piece (p4, closed form), and the stationary point
// of the one-crossing piece (p3, safeguarded Newton on a bracketed root).
// This kernel is the inner loop of every multi-dimensional solve.

#include "hj/core1d.hpp"

#include <optional>

namespace hj::prox1d {

struct ProxQuery {
    double x;       // terminal position
    double t;       // horizon, > 0
    double c;       // prox center
    double lambda;  // prox weight, > 0
    core1d::PotentialParams1D params;
};

struct NewtonConfig {
    double tol = 1e-12;          // stationarity residual target
    int max_iter = 50;           // Newton iteration cap (tolerance mode)
    bool fixed_iter_mode = false;  // run exactly fixed_iter_count plain clamped steps
    int fixed_iter_count = 20;
};

// Which closed-form piece produced the winning candidate.
enum class Candidate { P1, P2, P3, P4 };

struct ProxResult {
    double p_star = 0.0;
    Candidate candidate_used = Candidate::P1;
    int newton_iterations = 0;   // iterations spent on the p3 root
    bool newton_converged = true;
    double p3 = 0.0;             // the Newton candidate itself, for warm starts
};

// Solve the scalar prox problem.  warm_start, when given, seeds the Newton
// iteration for p3 (callers running fixed-point loops pass the previous p3;
// the state is owned by the caller, the function itself is stateless and
// safe to call concurrently).  Throws std::invalid_argument on t <= 0,
// lambda <= 0 or non-finite input.
ProxResult prox_neg_value(const ProxQuery& query, const NewtonConfig& cfg = {},
                          std::optional<double> warm_start = std::nullopt);

// Objective -V(x,t;p) + (lambda/2)(p - c)^2 evaluated at p; exposed because
// tests and the verification CLI compare candidates against grid scans.
double prox_objective(const ProxQuery& query, double p);

// Derivative of the objective, -dV/dp + lambda (p - c); zero at the solution.
double prox_stationarity(const ProxQuery& query, double p);

}  // namespace hj::prox1d
