#pragma once

// Closed-form machinery for the one-dimensional Hamilton-Jacobi building block
//
//   V_t + (1/2) V_x^2 + U(x) = 0,   V(x, 0) = p * x,
//
// with the two-slope concave potential
//
//   U(x) = -a * x  (x >= 0),   U(x) = b * x  (x < 0),   a, b > 0.
//
// For every momentum p the value V(x, t; p, a, b), its partial derivatives and
// the optimal trajectory are piecewise closed-form in five regions of the
// (x, t, p) space.  Everything here is scalar double arithmetic; the
// multi-dimensional solvers combine these kernels coordinate by coordinate.

#include <vector>

namespace hj::core1d {

// Two positive slopes of the concave potential.  Construction validates.
struct PotentialParams1D {
    double a;  // slope magnitude on x >= 0  (U = -a x)
    double b;  // slope magnitude on x < 0   (U =  b x)

    PotentialParams1D(double a_, double b_);
};

// U(x) for the given slopes.  Always <= 0.
double potential(double x, const PotentialParams1D& params);

// A point of the extended state space (terminal position x at time t, momentum
// p, query time s along the trajectory).  Small plumbing aggregate used by the
// CLI single-point path; ops below take scalars directly.
struct Point1D {
    double x = 0.0;
    double t = 0.0;
    double p = 0.0;
    double s = 0.0;
};

// The five structural regions of (x, t, p >= 0) space.  Omega1/Omega2: the
// characteristic never touches the potential kink; Omega3: one crossing;
// Omega4/Omega5: the trajectory parks on the kink for an interval.
enum class RegionId { Omega1, Omega2, Omega3, Omega4, Omega5 };

// Exact half-open region membership for p >= 0, t >= 0.  Exactly one region
// matches.  Throws std::invalid_argument for p < 0 (reflect first) or
// non-finite input.
RegionId classify_region(double x, double t, double p, const PotentialParams1D& params);

// Value V(x, t; p, a, b).  Valid for every real p (negative momenta evaluate
// through the mirror identity V(x,t;p,a,b) = V(-x,t;-p,b,a)); t = 0 returns
// p*x without touching the piecewise machinery.
double value(double x, double t, double p, const PotentialParams1D& params);

// dV/dp.  Equals the optimal trajectory's starting point gamma(0).  t >= 0.
double value_dp(double x, double t, double p, const PotentialParams1D& params);

// dV/dx and dV/dt, t > 0.  Together they satisfy
//   value_dt + 0.5 * value_dx^2 + U(x) = 0   exactly (up to rounding).
double value_dx(double x, double t, double p, const PotentialParams1D& params);
double value_dt(double x, double t, double p, const PotentialParams1D& params);

// Optimal trajectory gamma(s) for s in [0, t], t > 0, with gamma(t) = x.
// Throws std::invalid_argument when s is outside [0, t] or t <= 0.
double trajectory(double s, double x, double t, double p, const PotentialParams1D& params);

// Analytic d(gamma)/ds of the same trajectory (one-sided from the right at
// interior breakpoints).  Makes quadrature of the running cost exact.
double trajectory_derivative(double s, double x, double t, double p,
                             const PotentialParams1D& params);

// Interior times (strictly inside (0, t), sorted ascending) where the
// trajectory switches between its closed-form pieces.
std::vector<double> trajectory_breakpoints(double x, double t, double p,
                                           const PotentialParams1D& params);

}  // namespace hj::core1d
