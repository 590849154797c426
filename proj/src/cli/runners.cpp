#include "runners.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <random>
#include <variant>
#include <vector>

#include "hj/initial_costs.hpp"
#include "hj/parallel.hpp"
#include "verify.hpp"

namespace hj::cli {

namespace {

namespace ic = hj::initial_costs;

// implementation-defined distributions are avoided on purpose: taking the top
// 53 bits keeps sampled point sets identical across standard libraries
double unit_double(std::mt19937_64& eng) {
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

double uniform_in(std::mt19937_64& eng, double lo, double hi) {
    return lo + (hi - lo) * unit_double(eng);
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open output file: " + path);
    return out;
}

std::string resolve_output(const RunConfig& cfg, const CliOptions& opts) {
    return opts.out_override.empty() ? cfg.output : opts.out_override;
}

std::string timed_output_path(const std::string& base, std::size_t time_index) {
    const std::filesystem::path p(base);
    const std::filesystem::path file =
        p.stem().string() + "_t" + std::to_string(time_index) + p.extension().string();
    return (p.parent_path() / file).string();
}

// warnings stay visible under --quiet; only informational chatter is muted
struct RunContext {
    const RunConfig& cfg;
    const CliOptions& opts;
    std::uint64_t seed = 0;
    std::atomic<long> unconverged{0};
};

int finish(const RunContext& ctx) {
    const long bad = ctx.unconverged.load();
    if (bad == 0) return 0;
    std::cerr << "warning: " << bad << " solve(s) did not reach the requested tolerance\n";
    if (ctx.cfg.strict) {
        std::cerr << "error: strict mode escalates non-convergence\n";
        return 2;
    }
    return 0;
}

int run_single_point(const SinglePointQuery& q, RunContext& ctx) {
    const hopf::SolveResult res = hopf::solve(q.x, q.t, *ctx.cfg.problem, ctx.cfg.admm);
    if (!res.converged) ++ctx.unconverged;
    std::cout << "value = " << format_value(res.value) << "\n";
    std::cout << "p_star =";
    for (Eigen::Index i = 0; i < res.p_star.size(); ++i) {
        std::cout << ' ' << format_value(res.p_star[i]);
    }
    std::cout << "\niterations = " << res.iterations << "\n";
    std::cout << "converged = " << (res.converged ? "true" : "false") << "\n";
    if (res.branch) std::cout << "branch = " << *res.branch << "\n";
    return finish(ctx);
}

int run_grid(const GridQuery& q, RunContext& ctx) {
    const std::string base = resolve_output(ctx.cfg, ctx.opts);
    if (base.empty()) throw ConfigError("grid query needs an output path");
    const hopf::ProblemSpec& spec = *ctx.cfg.problem;
    const bool with_branch =
        std::holds_alternative<ic::MinOfQuadratics>(spec.cost());

    const auto coord = [](const GridAxis& ax, int k) {
        return ax.min + (ax.max - ax.min) * (static_cast<double>(k) / (ax.count - 1));
    };

    for (std::size_t ti = 0; ti < q.times.size(); ++ti) {
        const double t = q.times[ti];
        const std::size_t total =
            static_cast<std::size_t>(q.axis1.count) * static_cast<std::size_t>(q.axis2.count);
        std::vector<double> values(total);
        std::vector<int> branches(with_branch ? total : 0);

        parallel_for(total, ctx.opts.threads, [&](std::size_t begin, std::size_t end) {
            Eigen::VectorXd x = q.fixed;
            for (std::size_t idx = begin; idx < end; ++idx) {
                const int r = static_cast<int>(idx / static_cast<std::size_t>(q.axis2.count));
                const int c = static_cast<int>(idx % static_cast<std::size_t>(q.axis2.count));
                x[q.axis1.index] = coord(q.axis1, r);
                x[q.axis2.index] = coord(q.axis2, c);
                const hopf::SolveResult res = hopf::solve(x, t, spec, ctx.cfg.admm);
                if (!res.converged) ++ctx.unconverged;
                values[idx] = res.value;
                if (with_branch) branches[idx] = res.branch.value_or(-1);
            }
        });

        const std::string path = timed_output_path(base, ti);
        std::ofstream out = open_output(path);
        out << "coord1,coord2,t,value" << (with_branch ? ",branch" : "") << "\n";
        for (std::size_t idx = 0; idx < total; ++idx) {
            const int r = static_cast<int>(idx / static_cast<std::size_t>(q.axis2.count));
            const int c = static_cast<int>(idx % static_cast<std::size_t>(q.axis2.count));
            out << format_value(coord(q.axis1, r)) << ',' << format_value(coord(q.axis2, c))
                << ',' << format_value(t) << ',' << format_value(values[idx]);
            if (with_branch) out << ',' << branches[idx];
            out << '\n';
        }
        if (!out) throw IoError("write failure: " + path);
        if (!ctx.opts.quiet) {
            std::cout << "wrote " << path << " (" << total << " rows)\n";
        }
    }
    return finish(ctx);
}

int run_trajectory(const TrajectoryQuery& q, RunContext& ctx) {
    const std::string path = resolve_output(ctx.cfg, ctx.opts);
    if (path.empty()) throw ConfigError("trajectory query needs an output path");
    const hopf::ProblemSpec& spec = *ctx.cfg.problem;

    const hopf::SolveResult res = hopf::solve(q.x, q.t, spec, ctx.cfg.admm);
    if (!res.converged) ++ctx.unconverged;

    std::vector<double> times(static_cast<std::size_t>(q.samples));
    for (int k = 0; k < q.samples; ++k) {
        times[static_cast<std::size_t>(k)] = q.t * (static_cast<double>(k) / (q.samples - 1));
    }
    const hopf::TrajectorySample traj = hopf::optimal_trajectory(q.x, q.t, res, spec, times);

    std::ofstream out = open_output(path);
    out << "s";
    for (int i = 0; i < spec.n(); ++i) out << ",gamma_" << (i + 1);
    out << "\n";
    for (std::size_t k = 0; k < traj.times.size(); ++k) {
        out << format_value(traj.times[k]);
        for (int i = 0; i < spec.n(); ++i) {
            out << ',' << format_value(traj.states(static_cast<Eigen::Index>(k), i));
        }
        out << '\n';
    }
    if (!out) throw IoError("write failure: " + path);
    if (!ctx.opts.quiet) std::cout << "wrote " << path << "\n";
    return finish(ctx);
}

struct BenchmarkRow {
    int n = 0;
    long points = 0;
    std::string mode;
    double mean_ns = 0.0;
    double median_ns = 0.0;
    double checksum = 0.0;
};

int run_benchmark(const BenchmarkQuery& q, RunContext& ctx) {
    const hopf::ProblemSpec& spec = *ctx.cfg.problem;
    const auto* qc = std::get_if<ic::Quadratic>(&spec.cost());
    if (qc == nullptr || spec.has_transform()) {
        throw ConfigError("benchmark mode needs a plain quadratic cost");
    }

    prox1d::NewtonConfig newton = ctx.cfg.admm.newton;
    std::string mode_name = "tolerance";
    if (q.mode == BenchmarkMode::FixedIteration) {
        newton.fixed_iter_mode = true;
        newton.fixed_iter_count = 20;
        mode_name = "fixed_iteration";
    }

    std::vector<BenchmarkRow> rows;
    for (int n : q.sizes) {
        const hopf::ProblemSpec sub(spec.a().head(n), spec.b().head(n),
                                    ic::Quadratic{qc->y.head(n), qc->weight, qc->offset});

        // one deterministic stream per dimension so size lists can be edited
        // without reshuffling other rows
        std::mt19937_64 eng(ctx.seed + 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(n));
        const auto count = static_cast<std::size_t>(q.points);
        std::vector<Eigen::VectorXd> pts(count);
        std::vector<double> times(count);
        for (std::size_t i = 0; i < count; ++i) {
            Eigen::VectorXd x(n);
            for (int j = 0; j < n; ++j) x[j] = uniform_in(eng, -4.0, 4.0);
            pts[i] = std::move(x);
            times[i] = uniform_in(eng, 0.0, 0.5);
        }

        std::vector<double> ns(count, 0.0);
        std::vector<double> vals(count, 0.0);
        parallel_for(count, ctx.opts.threads, [&](std::size_t begin, std::size_t end) {
            Eigen::VectorXd p_buf(n);
            int depth = 0;
            // untimed warmup pass over the head of the block so code and data
            // are hot before measurement; no allocations occur afterwards
            const std::size_t warm = std::min(end, begin + 32);
            for (std::size_t i = begin; i < warm; ++i) {
                vals[i] = hopf::solve_quadratic_into(pts[i], times[i], sub, newton, p_buf, depth);
            }
            for (std::size_t i = begin; i < end; ++i) {
                const auto t0 = std::chrono::steady_clock::now();
                vals[i] = hopf::solve_quadratic_into(pts[i], times[i], sub, newton, p_buf, depth);
                const auto t1 = std::chrono::steady_clock::now();
                ns[i] = std::chrono::duration<double, std::nano>(t1 - t0).count();
            }
        });

        BenchmarkRow row;
        row.n = n;
        row.points = q.points;
        row.mode = mode_name;
        row.mean_ns = std::accumulate(ns.begin(), ns.end(), 0.0) / static_cast<double>(count);
        std::vector<double> sorted = ns;
        std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(count / 2),
                         sorted.end());
        row.median_ns = sorted[count / 2];
        row.checksum = std::accumulate(vals.begin(), vals.end(), 0.0);
        rows.push_back(row);

        if (!ctx.opts.quiet) {
            std::cout << "n=" << n << "  mean=" << row.mean_ns << " ns  median=" << row.median_ns
                      << " ns  checksum=" << format_value(row.checksum) << "\n";
        }
    }

    const std::string path = resolve_output(ctx.cfg, ctx.opts);
    if (!path.empty()) {
        std::ofstream out = open_output(path);
        out << "n,points,mode,mean_ns,median_ns,value_checksum\n";
        for (const BenchmarkRow& row : rows) {
            out << row.n << ',' << row.points << ',' << row.mode << ','
                << format_value(row.mean_ns) << ',' << format_value(row.median_ns) << ','
                << format_value(row.checksum) << '\n';
        }
        if (!out) throw IoError("write failure: " + path);
    }
    return finish(ctx);
}

}  // namespace

std::string format_value(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

int run(const RunConfig& cfg, const CliOptions& opts) {
    RunContext ctx{cfg, opts};
    ctx.seed = opts.seed_override.value_or(cfg.seed);
    return std::visit(
        [&](const auto& q) -> int {
            using T = std::decay_t<decltype(q)>;
            if constexpr (std::is_same_v<T, SinglePointQuery>) {
                return run_single_point(q, ctx);
            } else if constexpr (std::is_same_v<T, GridQuery>) {
                return run_grid(q, ctx);
            } else if constexpr (std::is_same_v<T, TrajectoryQuery>) {
                return run_trajectory(q, ctx);
            } else if constexpr (std::is_same_v<T, BenchmarkQuery>) {
                return run_benchmark(q, ctx);
            } else {
                return run_verify(q.suite, ctx.seed, opts.quiet);
            }
        },
        cfg.query);
}

}  // namespace hj::cli
