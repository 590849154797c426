#include "hj/core1d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hj::core1d {

namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) {
        throw std::invalid_argument(std::string("core1d: non-finite ") + name);
    }
}

// discriminant of the one-crossing branch; exactly >= 0 whenever x >= 0, the
// clamp only absorbs harmless rounding if a caller feeds a boundary point.
double guarded_delta(double delta) {
    if (delta < 0.0) {
        if (-delta <= 1e-12 * (1.0 + std::abs(delta))) return 0.0;
        throw std::logic_error("core1d: negative branch discriminant beyond rounding");
    }
    return delta;
}

double cube(double v) { return v * v * v; }

// ---- value pieces, valid for p of either sign wherever their branch applies

double f_no_crossing_pos(double x, double t, double p, double a) {
    // characteristic stays in x >= 0
    return cube(p) / (6.0 * a) - cube(a * t + p) / (6.0 * a) + x * (a * t + p);
}

double f_no_crossing_neg(double x, double t, double p, double b) {
    // characteristic stays in x < 0
    return -cube(p) / (6.0 * b) - cube(b * t - p) / (6.0 * b) - x * (b * t - p);
}

double f_one_crossing(double x, double t, double p, double a, double b) {
    const double A = b * t - p;
    const double delta = guarded_delta(A * A + 2.0 * x * (a + 2.0 * b));
    const double sq = std::sqrt(delta);
    return (a + b) / (3.0 * (a + 2.0 * b) * (a + 2.0 * b)) * (cube(A) + cube(sq)) -
           b * x * A / (a + 2.0 * b) - cube(p) / (6.0 * b) - cube(A) / (6.0 * b);
}

double f_parked_pos(double x, double p, double a, double b) {
    // trajectory waits on the kink, terminal x >= 0
    return std::sqrt(8.0 * a * cube(std::abs(x))) / 3.0 - cube(p) / (6.0 * b);
}

double f_parked_neg(double x, double p, double b) {
    // trajectory waits on the kink, terminal x < 0
    return std::sqrt(8.0 * b * cube(std::abs(x))) / 3.0 - cube(p) / (6.0 * b);
}

// value for p >= 0 and t > 0
double value_nonneg(double x, double t, double p, double a, double b) {
    if (x >= p * t + 0.5 * a * t * t) return f_no_crossing_pos(x, t, p, a);
    if (x >= 0.0) {
        return std::max(f_one_crossing(x, t, p, a, b), f_parked_pos(x, p, a, b));
    }
    const double d = t - p / b;
    if (d >= 0.0 && x >= -0.5 * b * d * d) return f_parked_neg(x, p, b);
    return f_no_crossing_neg(x, t, p, b);
}

double dp_nonneg(double x, double t, double p, const PotentialParams1D& params);
double dx_nonneg(double x, double t, double p, const PotentialParams1D& params);
double dt_nonneg(double x, double t, double p, const PotentialParams1D& params);

// switch time of the one-crossing trajectory; inside [0, t] by construction
double crossing_time(double x, double t, double p, double a, double b) {
    const double delta = guarded_delta((b * t - p) * (b * t - p) + 2.0 * x * (a + 2.0 * b));
    const double tau = ((a + b) * t + p - std::sqrt(delta)) / (a + 2.0 * b);
    return std::clamp(tau, 0.0, t);
}

struct ParkedTimes {
    double leave_kink_start;  // end of the approach piece
    double leave_kink_end;    // start of the departure piece
};

ParkedTimes parked_times_pos(double x, double t, double p, double a, double b) {
    return {p / b, t - std::sqrt(2.0 * x / a)};
}

ParkedTimes parked_times_neg(double x, double t, double p, double b) {
    return {p / b, t - std::sqrt(-2.0 * x / b)};
}

double trajectory_nonneg(double s, double x, double t, double p, const PotentialParams1D& params) {
    const double a = params.a;
    const double b = params.b;
    if (s == t) return x;  // all branch formulas reduce to x; keep it exact
    switch (classify_region(x, t, p, params)) {
        case RegionId::Omega1:
            return x - p * (t - s) - 0.5 * a * (t * t - s * s);
        case RegionId::Omega2:
            return x - p * (t - s) + 0.5 * b * (t * t - s * s);
        case RegionId::Omega3: {
            const double tau = crossing_time(x, t, p, a, b);
            if (s < tau) return -p * (tau - s) + 0.5 * b * (tau * tau - s * s);
            return (p - b * tau) * (s - tau) + 0.5 * a * (s - tau) * (s - tau);
        }
        case RegionId::Omega4: {
            const auto [t1, t2] = parked_times_pos(x, t, p, a, b);
            if (s < t1) return -(p - b * s) * (p - b * s) / (2.0 * b);
            if (s < t2) return 0.0;
            return 0.5 * a * (s - t2) * (s - t2);
        }
        case RegionId::Omega5: {
            const auto [t1, t2] = parked_times_neg(x, t, p, b);
            if (s < t1) return -(p - b * s) * (p - b * s) / (2.0 * b);
            if (s < t2) return 0.0;
            return -0.5 * b * (s - t2) * (s - t2);
        }
    }
    throw std::logic_error("core1d: unreachable region");
}

double trajectory_derivative_nonneg(double s, double x, double t, double p,
                                    const PotentialParams1D& params) {
    const double a = params.a;
    const double b = params.b;
    switch (classify_region(x, t, p, params)) {
        case RegionId::Omega1:
            return p + a * s;
        case RegionId::Omega2:
            return p - b * s;
        case RegionId::Omega3: {
            const double tau = crossing_time(x, t, p, a, b);
            if (s < tau) return p - b * s;
            return (p - b * tau) + a * (s - tau);
        }
        case RegionId::Omega4: {
            const auto [t1, t2] = parked_times_pos(x, t, p, a, b);
            if (s < t1) return p - b * s;
            if (s < t2) return 0.0;
            return a * (s - t2);
        }
        case RegionId::Omega5: {
            const auto [t1, t2] = parked_times_neg(x, t, p, b);
            if (s < t1) return p - b * s;
            if (s < t2) return 0.0;
            return -b * (s - t2);
        }
    }
    throw std::logic_error("core1d: unreachable region");
}

void check_xt(double x, double t) {
    require_finite(x, "x");
    require_finite(t, "t");
    if (t < 0.0) throw std::invalid_argument("core1d: t must be >= 0");
}

void check_positive_time(double t) {
    if (!(t > 0.0)) throw std::invalid_argument("core1d: t must be > 0");
}

}  // namespace

PotentialParams1D::PotentialParams1D(double a_, double b_) : a(a_), b(b_) {
    if (!std::isfinite(a) || !std::isfinite(b) || a <= 0.0 || b <= 0.0) {
        throw std::invalid_argument("core1d: potential slopes must be finite and > 0");
    }
}

double potential(double x, const PotentialParams1D& params) {
    return x >= 0.0 ? -params.a * x : params.b * x;
}

RegionId classify_region(double x, double t, double p, const PotentialParams1D& params) {
    check_xt(x, t);
    require_finite(p, "p");
    if (p < 0.0) throw std::invalid_argument("core1d: classify_region requires p >= 0");

    const double a = params.a;
    const double b = params.b;
    if (x >= p * t + 0.5 * a * t * t) return RegionId::Omega1;
    if (t < p / b) return x >= 0.0 ? RegionId::Omega3 : RegionId::Omega2;
    const double d = t - p / b;
    if (x >= 0.0) return x >= 0.5 * a * d * d ? RegionId::Omega3 : RegionId::Omega4;
    return x >= -0.5 * b * d * d ? RegionId::Omega5 : RegionId::Omega2;
}

double value(double x, double t, double p, const PotentialParams1D& params) {
    check_xt(x, t);
    require_finite(p, "p");
    if (t == 0.0) return p * x;
    if (p < 0.0) return value_nonneg(-x, t, -p, params.b, params.a);
    return value_nonneg(x, t, p, params.a, params.b);
}

namespace {

double dp_nonneg(double x, double t, double p, const PotentialParams1D& params) {
    const double a = params.a;
    const double b = params.b;
    switch (classify_region(x, t, p, params)) {
        case RegionId::Omega1:
            return -0.5 * a * t * t - p * t + x;
        case RegionId::Omega2:
            return 0.5 * b * t * t - p * t + x;
        case RegionId::Omega3: {
            const double A = b * t - p;
            const double sq = std::sqrt(guarded_delta(A * A + 2.0 * x * (a + 2.0 * b)));
            const double w = (a + b) / ((a + 2.0 * b) * (a + 2.0 * b));
            return w * (-A * A - A * sq) + b * x / (a + 2.0 * b) + 0.5 * b * t * t - p * t;
        }
        case RegionId::Omega4:
        case RegionId::Omega5:
            return -p * p / (2.0 * b);
    }
    throw std::logic_error("core1d: unreachable region");
}

double dx_nonneg(double x, double t, double p, const PotentialParams1D& params) {
    const double a = params.a;
    const double b = params.b;
    switch (classify_region(x, t, p, params)) {
        case RegionId::Omega1:
            return a * t + p;
        case RegionId::Omega2:
            return -b * t + p;
        case RegionId::Omega3: {
            const double A = b * t - p;
            const double sq = std::sqrt(guarded_delta(A * A + 2.0 * x * (a + 2.0 * b)));
            return ((a + b) * sq - b * A) / (a + 2.0 * b);
        }
        case RegionId::Omega4:
            return std::sqrt(2.0 * a * x);
        case RegionId::Omega5:
            return -std::sqrt(-2.0 * b * x);
    }
    throw std::logic_error("core1d: unreachable region");
}

double dt_nonneg(double x, double t, double p, const PotentialParams1D& params) {
    const double a = params.a;
    const double b = params.b;
    switch (classify_region(x, t, p, params)) {
        case RegionId::Omega1:
            return -0.5 * a * a * t * t - a * p * t + a * x - 0.5 * p * p;
        case RegionId::Omega2:
            return -0.5 * b * b * t * t + b * p * t - b * x - 0.5 * p * p;
        case RegionId::Omega3: {
            const double A = b * t - p;
            const double sq = std::sqrt(guarded_delta(A * A + 2.0 * x * (a + 2.0 * b)));
            const double w = b * (a + b) / ((a + 2.0 * b) * (a + 2.0 * b));
            return w * (A * A + A * sq) - b * b * x / (a + 2.0 * b) - 0.5 * b * b * t * t +
                   b * p * t - 0.5 * p * p;
        }
        case RegionId::Omega4:
        case RegionId::Omega5:
            return 0.0;
    }
    throw std::logic_error("core1d: unreachable region");
}

}  // namespace

double value_dp(double x, double t, double p, const PotentialParams1D& params) {
    check_xt(x, t);
    require_finite(p, "p");
    if (p < 0.0) {
        const PotentialParams1D mirrored(params.b, params.a);
        return -dp_nonneg(-x, t, -p, mirrored);
    }
    return dp_nonneg(x, t, p, params);
}

double value_dx(double x, double t, double p, const PotentialParams1D& params) {
    check_xt(x, t);
    check_positive_time(t);
    require_finite(p, "p");
    if (p < 0.0) {
        const PotentialParams1D mirrored(params.b, params.a);
        return -dx_nonneg(-x, t, -p, mirrored);
    }
    return dx_nonneg(x, t, p, params);
}

double value_dt(double x, double t, double p, const PotentialParams1D& params) {
    check_xt(x, t);
    check_positive_time(t);
    require_finite(p, "p");
    if (p < 0.0) {
        const PotentialParams1D mirrored(params.b, params.a);
        return dt_nonneg(-x, t, -p, mirrored);
    }
    return dt_nonneg(x, t, p, params);
}

double trajectory(double s, double x, double t, double p, const PotentialParams1D& params) {
    check_xt(x, t);
    check_positive_time(t);
    require_finite(p, "p");
    require_finite(s, "s");
    if (s < 0.0 || s > t) throw std::invalid_argument("core1d: trajectory time outside [0, t]");
    if (p < 0.0) {
        const PotentialParams1D mirrored(params.b, params.a);
        return -trajectory_nonneg(s, -x, t, -p, mirrored);
    }
    return trajectory_nonneg(s, x, t, p, params);
}

double trajectory_derivative(double s, double x, double t, double p,
                             const PotentialParams1D& params) {
    check_xt(x, t);
    check_positive_time(t);
    require_finite(p, "p");
    require_finite(s, "s");
    if (s < 0.0 || s > t) throw std::invalid_argument("core1d: trajectory time outside [0, t]");
    if (p < 0.0) {
        const PotentialParams1D mirrored(params.b, params.a);
        return -trajectory_derivative_nonneg(s, -x, t, -p, mirrored);
    }
    return trajectory_derivative_nonneg(s, x, t, p, params);
}

std::vector<double> trajectory_breakpoints(double x, double t, double p,
                                           const PotentialParams1D& params) {
    check_xt(x, t);
    check_positive_time(t);
    require_finite(p, "p");

    double xe = x;
    double pe = p;
    PotentialParams1D eff = params;
    if (p < 0.0) {  // mirrored trajectory switches pieces at the same times
        xe = -x;
        pe = -p;
        eff = PotentialParams1D(params.b, params.a);
    }

    std::vector<double> out;
    switch (classify_region(xe, t, pe, eff)) {
        case RegionId::Omega1:
        case RegionId::Omega2:
            break;
        case RegionId::Omega3:
            out.push_back(crossing_time(xe, t, pe, eff.a, eff.b));
            break;
        case RegionId::Omega4: {
            const auto [t1, t2] = parked_times_pos(xe, t, pe, eff.a, eff.b);
            out.push_back(t1);
            out.push_back(t2);
            break;
        }
        case RegionId::Omega5: {
            const auto [t1, t2] = parked_times_neg(xe, t, pe, eff.b);
            out.push_back(t1);
            out.push_back(t2);
            break;
        }
    }

    std::sort(out.begin(), out.end());
    std::vector<double> interior;
    for (double s : out) {
        if (s > 0.0 && s < t && (interior.empty() || s != interior.back())) {
            interior.push_back(s);
        }
    }
    return interior;
}

}  // namespace hj::core1d
