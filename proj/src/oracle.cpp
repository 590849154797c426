#include "hj/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "hj/initial_costs.hpp"

namespace hj::oracle {

namespace {

namespace ic = hj::initial_costs;

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

double pde_residual(const std::function<double(const Eigen::VectorXd&, double)>& solution,
                    const Eigen::VectorXd& x, double t, const Eigen::MatrixXd& M,
                    const std::function<double(const Eigen::VectorXd&)>& potential,
                    double fd_step) {
    if (!(fd_step > 0.0)) throw std::invalid_argument("pde_residual: fd_step must be > 0");
    if (!(t - fd_step > 0.0)) {
        throw std::invalid_argument("pde_residual: time stencil leaves the domain");
    }
    const Eigen::Index n = x.size();
    if (M.rows() != n || M.cols() != n) {
        throw std::invalid_argument("pde_residual: kinetic matrix has wrong size");
    }

    const double vt = (solution(x, t + fd_step) - solution(x, t - fd_step)) / (2.0 * fd_step);
    Eigen::VectorXd grad(n);
    Eigen::VectorXd xs = x;
    for (Eigen::Index i = 0; i < n; ++i) {
        const double xi = xs[i];
        xs[i] = xi + fd_step;
        const double vp = solution(xs, t);
        xs[i] = xi - fd_step;
        const double vm = solution(xs, t);
        xs[i] = xi;
        grad[i] = (vp - vm) / (2.0 * fd_step);
    }
    return std::abs(vt + 0.5 * grad.dot(M * grad) + potential(x));
}

double trajectory_cost(const SampledPath& path,
                       const std::function<double(const Eigen::VectorXd&)>& potential,
                       const std::function<double(const Eigen::VectorXd&)>& initial_cost,
                       const Eigen::MatrixXd& M, int quad_panels) {
    if (!(path.horizon > 0.0)) throw std::invalid_argument("trajectory_cost: horizon must be > 0");
    if (quad_panels < 1) throw std::invalid_argument("trajectory_cost: need >= 1 panel");
    const Eigen::Index n = M.rows();
    if (M.cols() != n) throw std::invalid_argument("trajectory_cost: kinetic matrix not square");
    const Eigen::MatrixXd m_inv =
        M.llt().solve(Eigen::MatrixXd::Identity(n, n));

    std::vector<double> knots;
    knots.push_back(0.0);
    for (double s : path.breakpoints) {
        if (s > 0.0 && s < path.horizon) knots.push_back(s);
    }
    knots.push_back(path.horizon);
    std::sort(knots.begin(), knots.end());

    const auto running = [&](double s) {
        const Eigen::VectorXd v = path.velocity(s);
        return 0.5 * v.dot(m_inv * v) - potential(path.position(s));
    };

    double total = initial_cost(path.position(0.0));
    for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
        const double s0 = knots[j];
        const double s1 = knots[j + 1];
        if (!(s1 > s0)) continue;
        const double h = (s1 - s0) / quad_panels;
        for (int k = 0; k < quad_panels; ++k) {
            const double sa = s0 + h * k;
            const double sb = (k + 1 == quad_panels) ? s1 : sa + h;
            total += (sb - sa) / 6.0 * (running(sa) + 4.0 * running(0.5 * (sa + sb)) + running(sb));
        }
    }
    return total;
}

double two_slope_potential(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                           const Eigen::VectorXd& z) {
    if (a.size() != z.size() || b.size() != z.size()) {
        throw std::invalid_argument("two_slope_potential: size mismatch");
    }
    double acc = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
        acc += z[i] >= 0.0 ? -a[i] * z[i] : b[i] * z[i];
    }
    return acc;
}

namespace {

// Per-coordinate description of the convex barrier W = -U along the path, as a
// function of the ambient coordinate: V-shaped with a kink at `center`, slope
// `right` above it and `-left` below it (both positive).
struct Kink {
    double center = 0.0;
    double left = 0.0;
    double right = 0.0;
};

// exact scalar prox of tau * (right*(v-c)^+ + left*(c-v)^+)
double prox_two_slope(double v, double tau, const Kink& k) {
    if (v - k.center > tau * k.right) return v - tau * k.right;
    if (v - k.center < -tau * k.left) return v + tau * k.left;
    return k.center;
}

struct Discretization {
    int K = 0;
    int n = 0;
    double dt = 0.0;
    Eigen::VectorXd x;           // fixed terminal node
    Eigen::MatrixXd m_inv;       // inverse kinetic matrix
    Eigen::MatrixXd p_inv;       // coordinate change into potential coordinates
    Eigen::VectorXd shift;       // ambient offset of the potential coordinates
    bool has_change = false;
    bool proxable = false;       // potential prox available per coordinate
    std::vector<Kink> kinks;     // per coordinate, when proxable
    const hopf::ProblemSpec* spec = nullptr;

    double barrier(const Eigen::VectorXd& g) const {
        const Eigen::VectorXd z = has_change ? Eigen::VectorXd(p_inv * (g - shift)) : g;
        return -two_slope_potential(spec->a(), spec->b(), z);
    }

    Eigen::VectorXd barrier_subgrad(const Eigen::VectorXd& g) const {
        const Eigen::VectorXd z = has_change ? Eigen::VectorXd(p_inv * (g - shift)) : g;
        Eigen::VectorXd s(n);
        for (int i = 0; i < n; ++i) {
            s[i] = z[i] > 0.0 ? spec->a()[i] : (z[i] < 0.0 ? -spec->b()[i] : 0.0);
        }
        return has_change ? Eigen::VectorXd(p_inv.transpose() * s) : s;
    }

    // Barrier quadrature weights.  Node 0's trapezoid half-weight is folded
    // into node 1 so that node 0 carries the initial cost alone and its
    // proximal step below stays a single exact map; the change is the same
    // O(dt^2) order as the trapezoid rule itself.
    double node_weight(int k) const {
        if (k == 0) return 0.0;
        return k == 1 ? 1.5 * dt : dt;
    }
};

// Exact prox of tau * Phi at v (ambient coordinates).  Every supported cost
// has a closed form or a finite-dimensional projection: this is what keeps
// the descent stable when the optimal start sits on a kink of Phi.
Eigen::VectorXd initial_cost_prox(const hopf::ProblemSpec& spec, double tau,
                                  const Eigen::VectorXd& v) {
    const auto& cost = spec.cost();
    if (const auto* lin = std::get_if<ic::Linear>(&cost)) {
        return v - tau * lin->slope;
    }
    if (const auto* qc = std::get_if<ic::Quadratic>(&cost)) {
        return (qc->weight * v + tau * qc->y) / (qc->weight + tau);
    }
    if (const auto* el = std::get_if<ic::EllipsoidNorm>(&cost)) {
        // Moreau: the conjugate of sqrt(v^T M v) is the indicator of the
        // ellipsoid { p : <p, M^{-1} p> <= 1 }, whose prox is the projection
        return v - tau * ic::project_ellipsoid(v / tau, el->M);
    }
    if (const auto* l1 = std::get_if<ic::ShiftedL1Squared>(&cost)) {
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(v.size());
        return l1->shift + ic::prox_l1sq_weighted(v - l1->shift, tau, ones);
    }
    const auto& mq = std::get<ic::MinOfQuadratics>(cost);
    Eigen::VectorXd best;
    double best_val = kInf;
    for (const auto& br : mq.branches) {
        const Eigen::VectorXd w = (v + tau * br.y) / (1.0 + tau);
        const double val = 0.5 * (w - br.y).squaredNorm() + br.offset +
                           0.5 * (w - v).squaredNorm() / tau;
        if (val < best_val) {
            best_val = val;
            best = w;
        }
    }
    return best;
}

// smooth part: kinetic energy of the chain (plus, when the potential prox is
// unavailable, the barrier itself handled by subgradients).
double smooth_eval(const Discretization& d, const Eigen::MatrixXd& nodes,
                   Eigen::MatrixXd* grad) {
    if (grad != nullptr) grad->setZero();
    double val = 0.0;
    for (int k = 0; k < d.K; ++k) {
        const Eigen::VectorXd next = (k + 1 == d.K) ? d.x : Eigen::VectorXd(nodes.row(k + 1));
        const Eigen::VectorXd diff = next - nodes.row(k).transpose();
        const Eigen::VectorXd r = d.m_inv * diff / d.dt;
        val += 0.5 * diff.dot(r);
        if (grad != nullptr) {
            grad->row(k) -= r.transpose();
            if (k + 1 < d.K) grad->row(k + 1) += r.transpose();
        }
    }
    if (!d.proxable) {
        for (int k = 1; k < d.K; ++k) {
            const Eigen::VectorXd gk = nodes.row(k).transpose();
            val += d.node_weight(k) * d.barrier(gk);
            if (grad != nullptr) {
                grad->row(k) += d.node_weight(k) * d.barrier_subgrad(gk).transpose();
            }
        }
    }
    return val;
}

double rough_eval(const Discretization& d, const Eigen::MatrixXd& nodes) {
    double val = ic::evaluate(d.spec->cost(), nodes.row(0).transpose());
    if (!d.proxable) return val;
    for (int k = 1; k < d.K; ++k) {
        val += d.node_weight(k) * d.barrier(nodes.row(k).transpose());
    }
    return val;
}

void rough_prox(const Discretization& d, double tau, Eigen::MatrixXd& nodes) {
    nodes.row(0) = initial_cost_prox(*d.spec, tau, nodes.row(0).transpose()).transpose();
    if (!d.proxable) return;
    for (int k = 1; k < d.K; ++k) {
        const double w = tau * d.node_weight(k);
        for (int i = 0; i < d.n; ++i) {
            nodes(k, i) = prox_two_slope(nodes(k, i), w, d.kinks[static_cast<std::size_t>(i)]);
        }
    }
}

Eigen::VectorXd anchor_point(const hopf::ProblemSpec& spec, const Eigen::VectorXd& x) {
    const auto& cost = spec.cost();
    if (const auto* qc = std::get_if<ic::Quadratic>(&cost)) return qc->y;
    if (const auto* mq = std::get_if<ic::MinOfQuadratics>(&cost)) {
        int best = 0;
        double bv = kInf;
        for (std::size_t j = 0; j < mq->branches.size(); ++j) {
            const double v = 0.5 * (x - mq->branches[j].y).squaredNorm() + mq->branches[j].offset;
            if (v < bv) {
                bv = v;
                best = static_cast<int>(j);
            }
        }
        return mq->branches[static_cast<std::size_t>(best)].y;
    }
    if (const auto* l1 = std::get_if<ic::ShiftedL1Squared>(&cost)) return l1->shift;
    if (std::get_if<ic::EllipsoidNorm>(&cost) != nullptr) {
        return spec.has_transform() ? spec.transform().u0
                                    : Eigen::VectorXd::Zero(spec.n());
    }
    return x;
}

}  // namespace

DirectOcRun direct_oc_run(const Eigen::VectorXd& x, double t, const hopf::ProblemSpec& spec,
                          int oc_segments, double oc_tol,
                          const std::optional<Eigen::MatrixXd>& initial_path) {
    if (!(t > 0.0)) throw std::invalid_argument("direct_oc: t must be > 0");
    if (oc_segments < 1) throw std::invalid_argument("direct_oc: need >= 1 segment");
    if (!(oc_tol > 0.0)) throw std::invalid_argument("direct_oc: oc_tol must be > 0");
    if (spec.n() > 3) throw std::invalid_argument("direct_oc: desk scale supports n <= 3");
    if (x.size() != spec.n() || !x.allFinite()) {
        throw std::invalid_argument("direct_oc: bad query point");
    }

    Discretization d;
    d.K = oc_segments;
    d.n = spec.n();
    d.dt = t / oc_segments;
    d.x = x;
    d.spec = &spec;
    d.m_inv = spec.kinetic_matrix().llt().solve(Eigen::MatrixXd::Identity(d.n, d.n));
    d.has_change = spec.has_transform();
    if (d.has_change) {
        d.p_inv = spec.p_inverse();
        d.shift = spec.transform().u0;
    }
    d.proxable = !d.has_change || spec.diagonal_transform();
    if (d.proxable) {
        d.kinks.resize(static_cast<std::size_t>(d.n));
        for (int i = 0; i < d.n; ++i) {
            Kink k;
            if (!d.has_change) {
                k.center = 0.0;
                k.right = spec.a()[i];
                k.left = spec.b()[i];
            } else {
                const double di = spec.transform_diagonal()[i];
                k.center = spec.transform().u0[i];
                if (di > 0.0) {
                    k.right = spec.a()[i] / di;
                    k.left = spec.b()[i] / di;
                } else {
                    k.right = spec.b()[i] / -di;
                    k.left = spec.a()[i] / -di;
                }
            }
            d.kinks[static_cast<std::size_t>(i)] = k;
        }
    }
    // terminal node carries half a trapezoid weight of the barrier; constant
    // in the decision variables but part of the reported integral.
    const double tail = 0.5 * d.dt * d.barrier(x);

    Eigen::MatrixXd nodes(d.K, d.n);
    if (initial_path) {
        if (initial_path->cols() != d.n || initial_path->rows() < 2) {
            throw std::invalid_argument("direct_oc: bad initial path");
        }
        // resample the provided path (rows = nodes including terminal) onto
        // this discretization by linear interpolation in the time index
        const Eigen::Index rows = initial_path->rows();
        for (int k = 0; k < d.K; ++k) {
            const double pos = static_cast<double>(k) / d.K * static_cast<double>(rows - 1);
            const auto lo = static_cast<Eigen::Index>(std::floor(pos));
            const Eigen::Index hi = std::min(lo + 1, rows - 1);
            const double frac = pos - static_cast<double>(lo);
            nodes.row(k) = (1.0 - frac) * initial_path->row(lo) + frac * initial_path->row(hi);
        }
    } else {
        const Eigen::VectorXd anchor = anchor_point(spec, x);
        for (int k = 0; k < d.K; ++k) {
            const double frac = static_cast<double>(k) / d.K;
            nodes.row(k) = ((1.0 - frac) * anchor + frac * x).transpose();
        }
    }

    const auto total = [&](const Eigen::MatrixXd& g) {
        return smooth_eval(d, g, nullptr) + rough_eval(d, g);
    };

    Eigen::MatrixXd prev = nodes;
    Eigen::MatrixXd y = nodes;
    Eigen::MatrixXd grad(d.K, d.n), cand(d.K, d.n);
    Eigen::MatrixXd best = nodes;
    double best_val = total(nodes);
    double prev_val = best_val;
    double lip = 4.0 * d.m_inv.norm() / d.dt + 1.0;
    double theta = 1.0;
    bool converged = false;
    int used = 0;
    int stall = 0;
    double last_improvement = 0.0;

    // hard cap only; the stall rule below exits long before this in practice.
    // The chain Hessian conditions like (segments)^2, so cold starts at a few
    // hundred segments legitimately need a few thousand accelerated steps.
    constexpr int kMaxIter = 8000;
    for (int iter = 1; iter <= kMaxIter; ++iter) {
        used = iter;
        const double fy = smooth_eval(d, y, &grad);
        double fc = 0.0;
        for (int bt = 0;; ++bt) {
            cand = y - grad / lip;
            rough_prox(d, 1.0 / lip, cand);
            const Eigen::MatrixXd diff = cand - y;
            const double model =
                fy + diff.cwiseProduct(grad).sum() + 0.5 * lip * diff.squaredNorm();
            fc = smooth_eval(d, cand, nullptr);
            if (fc <= model + 1e-12 * (1.0 + std::abs(fc)) || bt >= 60) break;
            lip *= 2.0;
        }
        const double cand_val = fc + rough_eval(d, cand);

        if (cand_val > prev_val) {
            // momentum took the objective uphill: restart from the last
            // accepted iterate with a plain proximal step next round
            theta = 1.0;
            y = prev;
        } else {
            const double theta_new = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
            y = cand + ((theta - 1.0) / theta_new) * (cand - prev);
            theta = theta_new;
            prev = cand;
            prev_val = cand_val;
            lip *= 0.9;
        }

        last_improvement = best_val - std::min(best_val, cand_val);
        if (cand_val < best_val) {
            best_val = cand_val;
            best = cand;
        }
        if (!std::isfinite(best_val)) {
            throw std::runtime_error("direct_oc: objective diverged");
        }
        if (last_improvement <= oc_tol * (1.0 + std::abs(best_val))) {
            if (++stall >= 10 && iter >= 50) {
                converged = true;
                break;
            }
        } else {
            stall = 0;
        }
    }
    if (!converged) {
        throw std::runtime_error("direct_oc: descent did not converge within budget");
    }

    DirectOcRun out;
    out.value = best_val + tail;
    out.path.resize(d.K + 1, d.n);
    out.path.topRows(d.K) = best;
    out.path.row(d.K) = x.transpose();
    out.iterations = used;
    out.last_improvement = last_improvement;
    return out;
}

double direct_oc_solve(const Eigen::VectorXd& x, double t, const hopf::ProblemSpec& spec,
                       int oc_segments, double oc_tol) {
    return direct_oc_run(x, t, spec, oc_segments, oc_tol).value;
}

}  // namespace hj::oracle
