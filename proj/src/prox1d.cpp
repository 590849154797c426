#include "hj/prox1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace hj::prox1d {

namespace {

struct NewtonOutcome {
    double p = 0.0;
    int iterations = 0;
    bool converged = true;
};

// Stationarity of the one-crossing piece plus the prox term, and its
// derivative in p.  Valid for x >= 0 on p >= plo, where the piece formula is
// the active branch of -V and is convex.
struct CrossingPiece {
    double x, t, a, b, c, lambda;

    double g(double p) const {
        const double A = b * t - p;
        const double s = std::sqrt(A * A + 2.0 * x * (a + 2.0 * b));
        const double w = (a + b) / ((a + 2.0 * b) * (a + 2.0 * b));
        return w * (A * A + A * s) - b * x / (a + 2.0 * b) - 0.5 * b * t * t + p * t +
               lambda * (p - c);
    }

    double gprime(double p) const {
        const double A = b * t - p;
        const double s = std::sqrt(A * A + 2.0 * x * (a + 2.0 * b));
        const double w = (a + b) / ((a + 2.0 * b) * (a + 2.0 * b));
        const double q = s > 0.0 ? (A * A + x * (a + 2.0 * b)) / s : 0.0;
        return -2.0 * w * (A + q) + t + lambda;
    }
};

// Root of the one-crossing stationarity for x >= 0.  The root, when it
// exists, lies in [plo, phi]; when the derivative is already positive at plo
// the piece has no interior stationary point and plo itself is the candidate.
NewtonOutcome crossing_root(double x, double t, double a, double b, double c, double lambda,
                            const NewtonConfig& cfg, std::optional<double> warm) {
    const double plo =
        std::max({x / t - 0.5 * a * t, b * t - b * std::sqrt(2.0 * x / a), 0.0});
    const double phi = std::max(b * t + std::abs(c) + 1.0, plo);
    const CrossingPiece piece{x, t, a, b, c, lambda};

    if (piece.g(plo) > 0.0) return {plo, 0, true};

    double p = std::clamp(warm.value_or(plo + 1.0), plo, phi);

    if (cfg.fixed_iter_mode) {
        // fixed-latency kernel: exactly N plain clamped Newton steps
        for (int k = 0; k < cfg.fixed_iter_count; ++k) {
            p = std::clamp(p - piece.g(p) / piece.gprime(p), plo, phi);
        }
        return {p, cfg.fixed_iter_count, true};
    }

    double lo = plo;
    double hi = phi;
    double best_p = p;
    double best_abs = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= cfg.max_iter; ++k) {
        const double g = piece.g(p);
        const double ag = std::abs(g);
        if (ag < best_abs) {
            best_abs = ag;
            best_p = p;
        }
        if (ag <= cfg.tol) return {p, k, true};
        if (g > 0.0) {
            hi = p;
        } else {
            lo = p;
        }
        double next = p - g / piece.gprime(p);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisection safeguard
        p = next;
    }
    return {best_p, cfg.max_iter, false};
}

void validate(const ProxQuery& q) {
    if (!std::isfinite(q.x) || !std::isfinite(q.c) || !std::isfinite(q.t) ||
        !std::isfinite(q.lambda)) {
        throw std::invalid_argument("prox1d: non-finite query");
    }
    if (!(q.t > 0.0)) throw std::invalid_argument("prox1d: t must be > 0");
    if (!(q.lambda > 0.0)) throw std::invalid_argument("prox1d: lambda must be > 0");
}

}  // namespace

double prox_objective(const ProxQuery& q, double p) {
    return -core1d::value(q.x, q.t, p, q.params) + 0.5 * q.lambda * (p - q.c) * (p - q.c);
}

double prox_stationarity(const ProxQuery& q, double p) {
    return -core1d::value_dp(q.x, q.t, p, q.params) + q.lambda * (p - q.c);
}

ProxResult prox_neg_value(const ProxQuery& q, const NewtonConfig& cfg,
                          std::optional<double> warm_start) {
    validate(q);
    const double a = q.params.a;
    const double b = q.params.b;
    const double t = q.t;
    const double lam = q.lambda;
    const double c = q.c;

    // stationary points of the straight-characteristic pieces
    const double p1 = (-0.5 * a * t * t + q.x + lam * c) / (t + lam);
    const double p2 = (0.5 * b * t * t + q.x + lam * c) / (t + lam);

    // stationary point of the kink-parked piece (sign of c selects the side)
    const double p4 = c >= 0.0
                          ? -b * lam + std::sqrt(b * lam * b * lam + 2.0 * b * lam * c)
                          : a * lam - std::sqrt(a * lam * a * lam - 2.0 * a * lam * c);

    // stationary point of the one-crossing piece; mirror for x < 0
    NewtonOutcome n;
    if (q.x >= 0.0) {
        n = crossing_root(q.x, t, a, b, c, lam, cfg, warm_start);
    } else {
        std::optional<double> w;
        if (warm_start) w = -*warm_start;
        n = crossing_root(-q.x, t, b, a, -c, lam, cfg, w);
        n.p = -n.p;
    }

    const double candidates[4] = {p1, p2, n.p, p4};
    constexpr Candidate tags[4] = {Candidate::P1, Candidate::P2, Candidate::P3, Candidate::P4};

    ProxResult out;
    out.newton_iterations = n.iterations;
    out.newton_converged = n.converged;
    out.p3 = n.p;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i) {
        const double obj = prox_objective(q, candidates[i]);
        if (obj < best) {
            best = obj;
            out.p_star = candidates[i];
            out.candidate_used = tags[i];
        }
    }
    return out;
}

}  // namespace hj::prox1d
