#include "hj/initial_costs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace hj::initial_costs {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_size(const Eigen::VectorXd& v, int n, const char* what) {
    if (v.size() != n) {
        throw std::invalid_argument(std::string("initial_costs: ") + what + " has wrong size");
    }
}

double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

int dimension(const InitialCostSpec& cost) {
    return std::visit(
        [](const auto& c) -> int {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, Linear>) return static_cast<int>(c.slope.size());
            if constexpr (std::is_same_v<T, Quadratic>) return static_cast<int>(c.y.size());
            if constexpr (std::is_same_v<T, EllipsoidNorm>) return static_cast<int>(c.M.rows());
            if constexpr (std::is_same_v<T, ShiftedL1Squared>)
                return static_cast<int>(c.shift.size());
            if constexpr (std::is_same_v<T, MinOfQuadratics>) {
                return c.branches.empty() ? 0 : static_cast<int>(c.branches.front().y.size());
            }
        },
        cost);
}

void validate(const InitialCostSpec& cost, int n) {
    if (n <= 0) throw std::invalid_argument("initial_costs: dimension must be positive");
    std::visit(
        [n](const auto& c) {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, Linear>) {
                require_size(c.slope, n, "linear slope");
            } else if constexpr (std::is_same_v<T, Quadratic>) {
                require_size(c.y, n, "quadratic center");
                if (!(c.weight > 0.0) || !std::isfinite(c.weight)) {
                    throw std::invalid_argument("initial_costs: quadratic weight must be > 0");
                }
            } else if constexpr (std::is_same_v<T, EllipsoidNorm>) {
                if (c.M.rows() != n || c.M.cols() != n) {
                    throw std::invalid_argument("initial_costs: ellipsoid matrix has wrong size");
                }
                EllipsoidProjector checker(c.M);  // SPD check happens here
                (void)checker;
            } else if constexpr (std::is_same_v<T, ShiftedL1Squared>) {
                require_size(c.shift, n, "l1 shift");
            } else if constexpr (std::is_same_v<T, MinOfQuadratics>) {
                if (c.branches.empty()) {
                    throw std::invalid_argument("initial_costs: empty branch list");
                }
                for (const auto& br : c.branches) require_size(br.y, n, "branch center");
            }
        },
        cost);
}

bool is_convex(const InitialCostSpec& cost) {
    if (const auto* mq = std::get_if<MinOfQuadratics>(&cost)) {
        return mq->branches.size() <= 1;
    }
    return true;
}

double evaluate(const InitialCostSpec& cost, const Eigen::VectorXd& x) {
    return std::visit(
        [&x](const auto& c) -> double {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, Linear>) {
                return c.slope.dot(x);
            } else if constexpr (std::is_same_v<T, Quadratic>) {
                return (x - c.y).squaredNorm() / (2.0 * c.weight) + c.offset;
            } else if constexpr (std::is_same_v<T, EllipsoidNorm>) {
                return std::sqrt(std::max(0.0, x.dot(c.M * x)));
            } else if constexpr (std::is_same_v<T, ShiftedL1Squared>) {
                const double s = (x - c.shift).template lpNorm<1>();
                return 0.5 * s * s;
            } else {
                double best = kInf;
                for (const auto& br : c.branches) {
                    best = std::min(best, 0.5 * (x - br.y).squaredNorm() + br.offset);
                }
                return best;
            }
        },
        cost);
}

Eigen::VectorXd subgradient(const InitialCostSpec& cost, const Eigen::VectorXd& x) {
    return std::visit(
        [&x](const auto& c) -> Eigen::VectorXd {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, Linear>) {
                return c.slope;
            } else if constexpr (std::is_same_v<T, Quadratic>) {
                return (x - c.y) / c.weight;
            } else if constexpr (std::is_same_v<T, EllipsoidNorm>) {
                const Eigen::VectorXd mx = c.M * x;
                const double nrm = std::sqrt(std::max(0.0, x.dot(mx)));
                if (nrm == 0.0) return Eigen::VectorXd::Zero(x.size());
                return mx / nrm;
            } else if constexpr (std::is_same_v<T, ShiftedL1Squared>) {
                const Eigen::VectorXd d = x - c.shift;
                const double s = d.lpNorm<1>();
                Eigen::VectorXd g(d.size());
                for (Eigen::Index i = 0; i < d.size(); ++i) g[i] = s * sign_of(d[i]);
                return g;
            } else {
                double best = kInf;
                std::size_t r = 0;
                for (std::size_t j = 0; j < c.branches.size(); ++j) {
                    const double v = 0.5 * (x - c.branches[j].y).squaredNorm() + c.branches[j].offset;
                    if (v < best) {
                        best = v;
                        r = j;
                    }
                }
                return x - c.branches[r].y;
            }
        },
        cost);
}

double conjugate_quadratic(const Eigen::VectorXd& p, const Eigen::VectorXd& y, double weight,
                           double offset) {
    return 0.5 * weight * (p + y / weight).squaredNorm() - y.squaredNorm() / (2.0 * weight) -
           offset;
}

double conjugate(const InitialCostSpec& cost, const Eigen::VectorXd& p) {
    return std::visit(
        [&p](const auto& c) -> double {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, Linear>) {
                // indicator of the single slope; scaled tolerance absorbs rounding
                const double scale = 1.0 + c.slope.template lpNorm<Eigen::Infinity>();
                return (p - c.slope).template lpNorm<Eigen::Infinity>() <= 1e-12 * scale ? 0.0 : kInf;
            } else if constexpr (std::is_same_v<T, Quadratic>) {
                return conjugate_quadratic(p, c.y, c.weight, c.offset);
            } else if constexpr (std::is_same_v<T, EllipsoidNorm>) {
                // indicator of { p : <p, M^{-1} p> <= 1 }
                const double q = p.dot(c.M.llt().solve(p));
                return q <= 1.0 + 1e-8 ? 0.0 : kInf;
            } else if constexpr (std::is_same_v<T, ShiftedL1Squared>) {
                const double m = p.lpNorm<Eigen::Infinity>();
                return p.dot(c.shift) + 0.5 * m * m;
            } else {
                throw std::invalid_argument(
                    "initial_costs: min-of-quadratics has no conjugate; solve per branch");
            }
        },
        cost);
}

EllipsoidProjector::EllipsoidProjector(const Eigen::MatrixXd& M, double tol) : tol_(tol) {
    if (M.rows() != M.cols() || M.rows() == 0) {
        throw std::invalid_argument("initial_costs: ellipsoid matrix must be square");
    }
    const double asym = (M - M.transpose()).lpNorm<Eigen::Infinity>();
    if (asym > 1e-12 * (1.0 + M.lpNorm<Eigen::Infinity>())) {
        throw std::invalid_argument("initial_costs: ellipsoid matrix must be symmetric");
    }
    diagonal_ = M.isDiagonal(0.0);
    if (diagonal_) {
        m_ = M.diagonal();
    } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
        if (es.info() != Eigen::Success) {
            throw std::invalid_argument("initial_costs: eigendecomposition failed");
        }
        m_ = es.eigenvalues();
        q_ = es.eigenvectors();
    }
    if ((m_.array() <= 0.0).any() || !m_.allFinite()) {
        throw std::invalid_argument("initial_costs: ellipsoid matrix must be positive definite");
    }
}

Eigen::VectorXd EllipsoidProjector::operator()(const Eigen::VectorXd& z) const {
    if (z.size() != m_.size()) {
        throw std::invalid_argument("initial_costs: projection input has wrong size");
    }
    const Eigen::VectorXd zt = diagonal_ ? z : Eigen::VectorXd(q_.transpose() * z);

    // constraint value as a function of the multiplier mu:
    //   h(mu) = sum_i m_i zt_i^2 / (m_i + 2 mu)^2 - 1, strictly decreasing, convex
    const auto h = [&](double mu) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < m_.size(); ++i) {
            const double d = m_[i] + 2.0 * mu;
            acc += m_[i] * zt[i] * zt[i] / (d * d);
        }
        return acc - 1.0;
    };
    const auto hprime = [&](double mu) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < m_.size(); ++i) {
            const double d = m_[i] + 2.0 * mu;
            acc += -4.0 * m_[i] * zt[i] * zt[i] / (d * d * d);
        }
        return acc;
    };

    if (h(0.0) <= 0.0) return z;  // already inside

    double lo = 0.0;
    double hi = 1.0;
    while (h(hi) > 0.0) hi *= 2.0;  // h -> -1 as mu -> inf, so this terminates

    // Newton from the feasible-side bound, bisection whenever a step escapes
    double mu = lo;
    for (int k = 0; k < 200; ++k) {
        const double val = h(mu);
        if (std::abs(val) <= tol_) break;
        if (val > 0.0) {
            lo = mu;
        } else {
            hi = mu;
        }
        double next = mu - val / hprime(mu);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        mu = next;
    }

    Eigen::VectorXd vt(m_.size());
    for (Eigen::Index i = 0; i < m_.size(); ++i) vt[i] = m_[i] * zt[i] / (m_[i] + 2.0 * mu);
    return diagonal_ ? vt : Eigen::VectorXd(q_ * vt);
}

Eigen::VectorXd project_ellipsoid(const Eigen::VectorXd& z, const Eigen::MatrixXd& M,
                                  double tol) {
    return EllipsoidProjector(M, tol)(z);
}

Eigen::VectorXd prox_l1sq_weighted(const Eigen::VectorXd& w, double mu,
                                   const Eigen::VectorXd& sigma) {
    if (!(mu > 0.0)) throw std::invalid_argument("initial_costs: prox weight must be > 0");
    if (sigma.size() != w.size() || (sigma.array() <= 0.0).any()) {
        throw std::invalid_argument("initial_costs: invalid prox scales");
    }
    const Eigen::Index n = w.size();
    if (w.lpNorm<1>() == 0.0) return Eigen::VectorXd::Zero(n);

    // activation order: coordinate i is nonzero iff |w_i|/sigma_i > mu * S
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(n));
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](Eigen::Index i, Eigen::Index j) {
        return std::abs(w[i]) / sigma[i] > std::abs(w[j]) / sigma[j];
    });

    const auto ratio = [&](Eigen::Index j) {
        return std::abs(w[idx[static_cast<std::size_t>(j)]]) /
               sigma[idx[static_cast<std::size_t>(j)]];
    };
    double sum_w = 0.0;
    double sum_sigma = 0.0;
    double S = 0.0;
    bool found = false;
    for (Eigen::Index k = 0; k < n; ++k) {
        sum_w += std::abs(w[idx[static_cast<std::size_t>(k)]]);
        sum_sigma += sigma[idx[static_cast<std::size_t>(k)]];
        const double cand = sum_w / (1.0 + mu * sum_sigma);
        if (ratio(k) > mu * cand && (k + 1 == n || ratio(k + 1) <= mu * cand)) {
            S = cand;
            found = true;
            break;
        }
    }
    if (!found) S = sum_w / (1.0 + mu * sum_sigma);  // exact ties land on the full set

    Eigen::VectorXd u(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        u[i] = sign_of(w[i]) * std::max(std::abs(w[i]) - mu * sigma[i] * S, 0.0);
    }
    return u;
}

Eigen::VectorXd prox_shifted_l1_squared(const Eigen::VectorXd& z, const Eigen::VectorXd& shift,
                                        double lambda) {
    if (shift.size() != z.size()) {
        throw std::invalid_argument("initial_costs: shift has wrong size");
    }
    if (!(lambda > 0.0)) throw std::invalid_argument("initial_costs: lambda must be > 0");
    // substitute u = lambda v - shift; the problem becomes the weighted kernel
    const Eigen::VectorXd w = lambda * z - shift;
    const Eigen::VectorXd u =
        prox_l1sq_weighted(w, lambda, Eigen::VectorXd::Ones(z.size()));
    return (u + shift) / lambda;
}

Eigen::VectorXd moreau_v_update(
    const Eigen::VectorXd& z,
    const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& prox_phi_scaled) {
    return z - prox_phi_scaled(z);
}

Eigen::VectorXd prox_conjugate(const InitialCostSpec& cost, const Eigen::VectorXd& z,
                               double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("initial_costs: lambda must be > 0");
    return std::visit(
        [&](const auto& c) -> Eigen::VectorXd {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, Linear>) {
                return c.slope;
            } else if constexpr (std::is_same_v<T, Quadratic>) {
                return (lambda * z - c.y) / (c.weight + lambda);
            } else if constexpr (std::is_same_v<T, EllipsoidNorm>) {
                return project_ellipsoid(z, c.M);
            } else if constexpr (std::is_same_v<T, ShiftedL1Squared>) {
                return moreau_v_update(z, [&](const Eigen::VectorXd& y) {
                    return prox_shifted_l1_squared(y, c.shift, lambda);
                });
            } else {
                throw std::invalid_argument(
                    "initial_costs: min-of-quadratics has no conjugate prox; solve per branch");
            }
        },
        cost);
}

std::vector<Quadratic> minplus_components(const MinOfQuadratics& cost) {
    std::vector<Quadratic> out;
    out.reserve(cost.branches.size());
    for (const auto& br : cost.branches) out.push_back(Quadratic{br.y, 1.0, br.offset});
    return out;
}

}  // namespace hj::initial_costs
