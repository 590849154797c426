#include "hj/hopf_solver.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace hj::hopf {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

namespace ic = hj::initial_costs;

void check_point(const Eigen::VectorXd& x, double t, const ProblemSpec& spec) {
    if (x.size() != spec.n()) throw std::invalid_argument("hopf: query point has wrong size");
    if (!x.allFinite() || !std::isfinite(t)) {
        throw std::invalid_argument("hopf: non-finite query");
    }
    if (t < 0.0) throw std::invalid_argument("hopf: t must be >= 0");
}

int minplus_winner(const ic::MinOfQuadratics& mq, const Eigen::VectorXd& x) {
    double best = kInf;
    int r = 0;
    for (std::size_t j = 0; j < mq.branches.size(); ++j) {
        const double v = 0.5 * (x - mq.branches[j].y).squaredNorm() + mq.branches[j].offset;
        if (v < best) {
            best = v;
            r = static_cast<int>(j);
        }
    }
    return r;
}

// t = 0: the value is the initial cost itself and the dual maximizer is a
// subgradient of the (transformed) cost.
SolveResult bypass_initial_time(const Eigen::VectorXd& x, const ProblemSpec& spec) {
    SolveResult out;
    out.value = ic::evaluate(spec.cost(), x);
    const Eigen::VectorXd g = ic::subgradient(spec.cost(), x);
    out.p_star = spec.has_transform() ? Eigen::VectorXd(spec.transform().P.transpose() * g) : g;
    out.iterations = 0;
    out.converged = true;
    if (const auto* mq = std::get_if<ic::MinOfQuadratics>(&spec.cost())) {
        out.branch = minplus_winner(*mq, x);
    }
    return out;
}

struct QuadCore {
    double value = 0.0;
    int newton_depth = 0;
    bool converged = true;
};

// Separable solve for a quadratic cost seen through a diagonal (or absent)
// change of variables: each momentum is an independent scalar prox with
//   center c_i = d_i (u0_i - y_i) / weight,  prox weight w_i = weight / d_i^2,
// followed by the exact transformed conjugate in the value assembly.
QuadCore quadratic_core(const Eigen::VectorXd& x, double t, const ProblemSpec& spec,
                        const ic::Quadratic& qc, const prox1d::NewtonConfig& newton,
                        Eigen::VectorXd& p_out) {
    QuadCore out;
    const bool tr = spec.has_transform();
    const Eigen::VectorXd& d = spec.transform_diagonal();
    const auto& u0 = tr ? spec.transform().u0 : Eigen::VectorXd();

    double sum_v = 0.0;
    double sum_conj = 0.0;
    for (int i = 0; i < spec.n(); ++i) {
        const double di = tr ? d[i] : 1.0;
        const double u0i = tr ? u0[i] : 0.0;
        const double xi = (x[i] - u0i) / di;
        const double wi = qc.weight / (di * di);
        const double ci = di * (u0i - qc.y[i]) / qc.weight;
        const prox1d::ProxQuery q{xi, t, ci, wi, spec.params(i)};
        const prox1d::ProxResult r = prox1d::prox_neg_value(q, newton);
        p_out[i] = r.p_star;
        out.newton_depth = std::max(out.newton_depth, r.newton_iterations);
        out.converged = out.converged && r.newton_converged;
        sum_v += core1d::value(xi, t, r.p_star, q.params);
        // transformed conjugate, accumulated per coordinate:
        //   (weight/2)(p_i/d_i + y_i/weight)^2 - y_i^2/(2 weight) - p_i u0_i/d_i
        const double pd = p_out[i] / di;
        const double yb = qc.y[i] / qc.weight;
        sum_conj += 0.5 * qc.weight * (pd + yb) * (pd + yb) -
                    qc.y[i] * qc.y[i] / (2.0 * qc.weight) - p_out[i] * u0i / di;
    }
    out.value = sum_v - (sum_conj - qc.offset);
    return out;
}

// conjugate evaluation + prox of (conjugate / lambda), specialized per cost
// and per transform presence; built once per solve call.
struct ConjugateOps {
    std::function<double(const Eigen::VectorXd&)> conj;
    std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)> prox;
};

ConjugateOps make_conjugate_ops(const ProblemSpec& spec, const ic::InitialCostSpec& cost,
                                double lambda) {
    ConjugateOps ops;
    if (!spec.has_transform()) {
        // hold a copy: callers may pass a cost spec that dies before the ops do
        const auto held = std::make_shared<const ic::InitialCostSpec>(cost);
        ops.conj = [held](const Eigen::VectorXd& p) { return ic::conjugate(*held, p); };
        if (std::get_if<ic::EllipsoidNorm>(&cost) != nullptr) {
            const auto* proj = spec.conjugate_projector();
            ops.prox = [proj](const Eigen::VectorXd& z, Eigen::VectorXd& out) {
                out = (*proj)(z);
            };
        } else {
            ops.prox = [held, lambda](const Eigen::VectorXd& z, Eigen::VectorXd& out) {
                out = ic::prox_conjugate(*held, z, lambda);
            };
        }
        return ops;
    }

    const Eigen::MatrixXd pinv = spec.p_inverse();
    const Eigen::MatrixXd pinv_t = pinv.transpose();
    const Eigen::VectorXd u0_int = spec.u0_internal();

    if (const auto* qc = std::get_if<ic::Quadratic>(&cost)) {
        const Eigen::MatrixXd K =
            qc->weight * spec.ptp_inverse() +
            lambda * Eigen::MatrixXd::Identity(spec.n(), spec.n());
        const auto llt = std::make_shared<Eigen::LLT<Eigen::MatrixXd>>(K);
        if (llt->info() != Eigen::Success) {
            throw std::invalid_argument("hopf: transformed quadratic prox is not SPD");
        }
        const Eigen::VectorXd r0 = u0_int - pinv * qc->y;
        const Eigen::VectorXd y = qc->y;
        const double w = qc->weight;
        const double off = qc->offset;
        ops.prox = [llt, r0, lambda](const Eigen::VectorXd& z, Eigen::VectorXd& out) {
            out = llt->solve(lambda * z + r0);
        };
        ops.conj = [pinv_t, u0_int, y, w, off](const Eigen::VectorXd& p) {
            return ic::conjugate_quadratic(pinv_t * p, y, w, off) - p.dot(u0_int);
        };
        return ops;
    }
    if (std::get_if<ic::EllipsoidNorm>(&cost) != nullptr) {
        const auto* proj = spec.conjugate_projector();
        const Eigen::MatrixXd ball = spec.conjugate_ball_matrix();
        ops.prox = [proj, u0_int, lambda](const Eigen::VectorXd& z, Eigen::VectorXd& out) {
            out = (*proj)(z + u0_int / lambda);
        };
        ops.conj = [ball, u0_int](const Eigen::VectorXd& p) {
            const double q = p.dot(ball.llt().solve(p));
            return q <= 1.0 + 1e-8 ? -p.dot(u0_int) : kInf;
        };
        return ops;
    }
    if (const auto* l1 = std::get_if<ic::ShiftedL1Squared>(&cost)) {
        if (!spec.diagonal_transform()) {
            throw std::invalid_argument(
                "hopf: shifted-l1-squared cost supports only diagonal transforms");
        }
        const Eigen::VectorXd d = spec.transform_diagonal();
        const Eigen::VectorXd u0 = spec.transform().u0;
        const Eigen::VectorXd shift = l1->shift;
        const Eigen::VectorXd sigma = (lambda * lambda) * d.array().square().matrix();
        ops.prox = [d, u0, shift, sigma, lambda](const Eigen::VectorXd& z,
                                                 Eigen::VectorXd& out) {
            const Eigen::VectorXd w0 =
                lambda * d.cwiseProduct(z) + u0 - shift;
            const Eigen::VectorXd u = ic::prox_l1sq_weighted(w0, 1.0 / lambda, sigma);
            const Eigen::VectorXd scaled_prox =
                (u + shift - u0).cwiseQuotient(lambda * d);
            out = z - scaled_prox;
        };
        ops.conj = [d, u0_int, shift](const Eigen::VectorXd& p) {
            const Eigen::VectorXd q = p.cwiseQuotient(d);
            const double m = q.lpNorm<Eigen::Infinity>();
            return q.dot(shift) + 0.5 * m * m - p.dot(u0_int);
        };
        return ops;
    }
    if (const auto* lin = std::get_if<ic::Linear>(&cost)) {
        const Eigen::VectorXd pt_slope = spec.transform().P.transpose() * lin->slope;
        const Eigen::VectorXd slope = lin->slope;
        ops.prox = [pt_slope](const Eigen::VectorXd&, Eigen::VectorXd& out) { out = pt_slope; };
        ops.conj = [pinv_t, slope, u0_int](const Eigen::VectorXd& p) {
            const double scale = 1.0 + slope.lpNorm<Eigen::Infinity>();
            const double dev = (pinv_t * p - slope).lpNorm<Eigen::Infinity>();
            return dev <= 1e-9 * scale ? -p.dot(u0_int) : kInf;
        };
        return ops;
    }
    throw std::invalid_argument("hopf: cost not supported by the splitting iteration");
}

SolveResult run_admm(const Eigen::VectorXd& x_int, double t, const ProblemSpec& spec,
                     const AdmmConfig& cfg, const ConjugateOps& ops) {
    const int n = spec.n();
    if (!(cfg.lambda > 0.0)) throw std::invalid_argument("hopf: lambda must be > 0");
    if (!(cfg.eps > 0.0)) throw std::invalid_argument("hopf: eps must be > 0");
    if (cfg.max_iter < 1) throw std::invalid_argument("hopf: max_iter must be >= 1");

    Eigen::VectorXd d = cfg.d0.value_or(x_int);
    Eigen::VectorXd w = cfg.w0.value_or(Eigen::VectorXd::Zero(n));
    if (d.size() != n || w.size() != n) {
        throw std::invalid_argument("hopf: initial iterate has wrong size");
    }
    Eigen::VectorXd v_prev = d;
    Eigen::VectorXd v(n), d_new(n);
    std::vector<double> warm(static_cast<std::size_t>(n), 0.0);
    bool have_warm = false;

    const auto dual_objective = [&](const Eigen::VectorXd& p) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i) acc += core1d::value(x_int[i], t, p[i], spec.params(i));
        return acc - ops.conj(p);
    };

    SolveResult out;
    Eigen::VectorXd best_v;
    double best_obj = -kInf;
    int k = 0;
    bool converged = false;
    for (k = 1; k <= cfg.max_iter; ++k) {
        ops.prox(d - w, v);
        for (int i = 0; i < n; ++i) {
            const prox1d::ProxQuery q{x_int[i], t, v[i] + w[i], cfg.lambda, spec.params(i)};
            const prox1d::ProxResult r = prox1d::prox_neg_value(
                q, cfg.newton,
                have_warm ? std::optional<double>(warm[static_cast<std::size_t>(i)])
                          : std::nullopt);
            d_new[i] = r.p_star;
            warm[static_cast<std::size_t>(i)] = r.p3;
        }
        have_warm = true;
        w += v - d_new;

        out.residuals = {(v - v_prev).squaredNorm(), (d_new - d).squaredNorm(),
                         (v - d_new).squaredNorm()};

        const double obj = dual_objective(v);
        if (k == 1 || obj > best_obj) {
            best_obj = obj;
            best_v = v;
        }

        v_prev = v;
        d = d_new;
        // Stop once each of the three norms reaches eps.  The iteration
        // contracts geometrically (ratio ~1/2 for unit-weight quadratics), so
        // the distance of v to the true maximizer is of the same order as the
        // last update; driving the norms themselves to eps keeps the momenta
        // accurate to ~eps instead of ~sqrt(eps).
        const double tol = cfg.eps * cfg.eps;
        if (out.residuals[0] <= tol && out.residuals[1] <= tol && out.residuals[2] <= tol) {
            converged = true;
            break;
        }
    }

    out.converged = converged;
    out.iterations = converged ? k : cfg.max_iter;
    out.p_star = converged ? v : best_v;
    out.value = dual_objective(out.p_star);
    return out;
}

// quadratic-cost solve for an arbitrary spec (with or without transform);
// min-plus branches reuse this so branchwise values are bit-identical to
// standalone single-branch solves.
SolveResult solve_quadratic_like(const Eigen::VectorXd& x, double t, const ProblemSpec& spec,
                                 const ic::Quadratic& qc, const AdmmConfig& cfg) {
    if (!spec.has_transform() || spec.diagonal_transform()) {
        SolveResult out;
        out.p_star.resize(spec.n());
        const QuadCore core = quadratic_core(x, t, spec, qc, cfg.newton, out.p_star);
        out.value = core.value;
        out.iterations = core.newton_depth;
        out.converged = core.converged;
        return out;
    }
    const ConjugateOps ops = make_conjugate_ops(spec, ic::InitialCostSpec(qc), cfg.lambda);
    return run_admm(spec.to_internal(x), t, spec, cfg, ops);
}

SolveResult solve_linear(const Eigen::VectorXd& x, double t, const ProblemSpec& spec) {
    const auto& lin = std::get<ic::Linear>(spec.cost());
    SolveResult out;
    if (spec.has_transform()) {
        out.p_star = spec.transform().P.transpose() * lin.slope;
    } else {
        out.p_star = lin.slope;
    }
    const Eigen::VectorXd x_int = spec.to_internal(x);
    double acc = 0.0;
    for (int i = 0; i < spec.n(); ++i) {
        acc += core1d::value(x_int[i], t, out.p_star[i], spec.params(i));
    }
    // conjugate of the transformed linear cost at its own slope: -<p, P^{-1}u0>
    out.value = acc + out.p_star.dot(spec.u0_internal());
    out.iterations = 0;
    out.converged = true;
    return out;
}

}  // namespace

ProblemSpec::ProblemSpec(Eigen::VectorXd a, Eigen::VectorXd b, ic::InitialCostSpec cost,
                         std::optional<Transform> transform)
    : n_(static_cast<int>(a.size())),
      a_(std::move(a)),
      b_(std::move(b)),
      cost_(std::move(cost)),
      transform_(std::move(transform)) {
    if (n_ <= 0) throw std::invalid_argument("hopf: dimension must be positive");
    if (b_.size() != n_) throw std::invalid_argument("hopf: slope vectors differ in size");
    for (int i = 0; i < n_; ++i) {
        if (!std::isfinite(a_[i]) || !std::isfinite(b_[i]) || a_[i] <= 0.0 || b_[i] <= 0.0) {
            throw std::invalid_argument("hopf: potential slopes must be finite and > 0");
        }
    }
    ic::validate(cost_, n_);

    if (transform_) {
        const Eigen::MatrixXd& P = transform_->P;
        if (P.rows() != n_ || P.cols() != n_ || transform_->u0.size() != n_) {
            throw std::invalid_argument("hopf: transform has wrong size");
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(P);
        if (!lu.isInvertible()) throw std::invalid_argument("hopf: transform P is singular");
        p_inv_ = lu.inverse();
        kinetic_ = P * P.transpose();
        u0_int_ = p_inv_ * transform_->u0;
        diagonal_transform_ = P.isDiagonal(0.0);
        p_diag_ = P.diagonal();
        ptp_inv_ = p_inv_ * p_inv_.transpose();
    } else {
        p_inv_ = Eigen::MatrixXd::Identity(n_, n_);
        kinetic_ = Eigen::MatrixXd::Identity(n_, n_);
        u0_int_ = Eigen::VectorXd::Zero(n_);
        diagonal_transform_ = true;
        p_diag_ = Eigen::VectorXd::Ones(n_);
        ptp_inv_ = Eigen::MatrixXd::Identity(n_, n_);
    }

    if (const auto* el = std::get_if<ic::EllipsoidNorm>(&cost_)) {
        conj_ball_ = transform_ ? Eigen::MatrixXd(transform_->P.transpose() * el->M *
                                                  transform_->P)
                                : el->M;
        projector_ = std::make_shared<ic::EllipsoidProjector>(conj_ball_);
    }
    if (const auto* mq = std::get_if<ic::MinOfQuadratics>(&cost_)) {
        branches_ = ic::minplus_components(*mq);
    }
}

const Transform& ProblemSpec::transform() const {
    if (!transform_) throw std::logic_error("hopf: spec has no transform");
    return *transform_;
}

Eigen::VectorXd ProblemSpec::to_internal(const Eigen::VectorXd& x) const {
    if (!transform_) return x;
    return p_inv_ * (x - transform_->u0);
}

Eigen::VectorXd ProblemSpec::to_ambient(const Eigen::VectorXd& xi) const {
    if (!transform_) return xi;
    return transform_->P * xi + transform_->u0;
}

SolveResult solve(const Eigen::VectorXd& x, double t, const ProblemSpec& spec,
                  const AdmmConfig& cfg) {
    check_point(x, t, spec);
    if (t == 0.0) return bypass_initial_time(x, spec);
    return std::visit(
        [&](const auto& c) -> SolveResult {
            using T = std::decay_t<decltype(c)>;
            if constexpr (std::is_same_v<T, ic::Linear>) {
                return solve_linear(x, t, spec);
            } else if constexpr (std::is_same_v<T, ic::Quadratic>) {
                return solve_quadratic_like(x, t, spec, c, cfg);
            } else if constexpr (std::is_same_v<T, ic::MinOfQuadratics>) {
                return solve_minplus(x, t, spec, cfg);
            } else {
                return solve_admm(x, t, spec, cfg);
            }
        },
        spec.cost());
}

SolveResult solve_quadratic(const Eigen::VectorXd& x, double t, const ProblemSpec& spec,
                            const prox1d::NewtonConfig& newton) {
    check_point(x, t, spec);
    const auto* qc = std::get_if<ic::Quadratic>(&spec.cost());
    if (qc == nullptr) throw std::invalid_argument("hopf: solve_quadratic needs a quadratic cost");
    if (spec.has_transform()) {
        throw std::invalid_argument("hopf: solve_quadratic is the plain separable path");
    }
    if (t == 0.0) return bypass_initial_time(x, spec);
    AdmmConfig cfg;
    cfg.newton = newton;
    return solve_quadratic_like(x, t, spec, *qc, cfg);
}

SolveResult solve_admm(const Eigen::VectorXd& x, double t, const ProblemSpec& spec,
                       const AdmmConfig& cfg) {
    check_point(x, t, spec);
    if (!ic::is_convex(spec.cost())) {
        throw std::invalid_argument("hopf: splitting iteration needs a convex cost");
    }
    if (t == 0.0) return bypass_initial_time(x, spec);
    const ConjugateOps ops = make_conjugate_ops(spec, spec.cost(), cfg.lambda);
    return run_admm(spec.to_internal(x), t, spec, cfg, ops);
}

SolveResult solve_minplus(const Eigen::VectorXd& x, double t, const ProblemSpec& spec,
                          const AdmmConfig& cfg) {
    check_point(x, t, spec);
    if (std::get_if<ic::MinOfQuadratics>(&spec.cost()) == nullptr) {
        throw std::invalid_argument("hopf: solve_minplus needs a min-of-quadratics cost");
    }
    if (t == 0.0) return bypass_initial_time(x, spec);

    const auto& branches = spec.minplus_branches();
    SolveResult best;
    int r = 0;
    bool all_converged = true;
    for (std::size_t j = 0; j < branches.size(); ++j) {
        SolveResult res = solve_quadratic_like(x, t, spec, branches[j], cfg);
        all_converged = all_converged && res.converged;
        if (j == 0 || res.value < best.value) {
            best = std::move(res);
            r = static_cast<int>(j);
        }
    }
    best.branch = r;
    best.converged = all_converged;
    return best;
}

SolveResult solve_general(const Eigen::VectorXd& x, double t, const ProblemSpec& spec,
                          const AdmmConfig& cfg) {
    if (!spec.has_transform()) {
        throw std::invalid_argument("hopf: solve_general requires a transform");
    }
    return solve(x, t, spec, cfg);
}

TrajectorySample optimal_trajectory(const Eigen::VectorXd& x, double t,
                                    const SolveResult& result, const ProblemSpec& spec,
                                    std::vector<double> times) {
    check_point(x, t, spec);
    if (!(t > 0.0)) throw std::invalid_argument("hopf: trajectories need t > 0");
    if (result.p_star.size() != spec.n()) {
        throw std::invalid_argument("hopf: solve result does not match the spec");
    }
    std::sort(times.begin(), times.end());
    for (double s : times) {
        if (!(s >= 0.0 && s <= t)) {
            throw std::invalid_argument("hopf: sample times must lie in [0, t]");
        }
    }

    const Eigen::VectorXd x_int = spec.to_internal(x);
    TrajectorySample out;
    out.states.resize(static_cast<Eigen::Index>(times.size()), spec.n());
    Eigen::VectorXd gamma(spec.n());
    for (std::size_t k = 0; k < times.size(); ++k) {
        for (int i = 0; i < spec.n(); ++i) {
            gamma[i] = core1d::trajectory(times[k], x_int[i], t, result.p_star[i],
                                          spec.params(i));
        }
        out.states.row(static_cast<Eigen::Index>(k)) =
            spec.has_transform() ? spec.to_ambient(gamma).transpose() : gamma.transpose();
    }
    out.times = std::move(times);
    return out;
}

double solve_quadratic_into(const Eigen::VectorXd& x, double t, const ProblemSpec& spec,
                            const prox1d::NewtonConfig& newton, Eigen::VectorXd& p_out,
                            int& newton_depth_out) {
    const auto* qc = std::get_if<ic::Quadratic>(&spec.cost());
    if (qc == nullptr || spec.has_transform()) {
        throw std::invalid_argument("hopf: benchmark kernel needs a plain quadratic cost");
    }
    if (p_out.size() != spec.n()) throw std::invalid_argument("hopf: p_out has wrong size");
    if (t == 0.0) {
        double acc = 0.0;
        for (int i = 0; i < spec.n(); ++i) {
            const double di = x[i] - qc->y[i];
            p_out[i] = di / qc->weight;
            acc += di * di;
        }
        newton_depth_out = 0;
        return acc / (2.0 * qc->weight) + qc->offset;
    }
    const QuadCore core = quadratic_core(x, t, spec, *qc, newton, p_out);
    newton_depth_out = core.newton_depth;
    return core.value;
}

}  // namespace hj::hopf
