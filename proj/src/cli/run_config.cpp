#include "run_config.hpp"

#include <fstream>

#include <json.hpp>

#include "hj/initial_costs.hpp"

namespace hj::cli {

namespace {

using nlohmann::json;
namespace ic = hj::initial_costs;

const json& need(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end()) throw ConfigError(std::string("config: missing key '") + key + "'");
    return *it;
}

double need_number(const json& j, const char* key) {
    const json& v = need(j, key);
    if (!v.is_number()) throw ConfigError(std::string("config: '") + key + "' must be a number");
    return v.get<double>();
}

double opt_number(const json& j, const char* key, double fallback) {
    const auto it = j.find(key);
    if (it == j.end()) return fallback;
    if (!it->is_number()) throw ConfigError(std::string("config: '") + key + "' must be a number");
    return it->get<double>();
}

Eigen::VectorXd as_vector(const json& v, const char* what) {
    if (!v.is_array() || v.empty()) {
        throw ConfigError(std::string("config: '") + what + "' must be a non-empty array");
    }
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) {
            throw ConfigError(std::string("config: '") + what + "' must hold numbers");
        }
        out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
}

Eigen::MatrixXd as_matrix(const json& v, const char* what) {
    if (!v.is_array() || v.empty()) {
        throw ConfigError(std::string("config: '") + what + "' must be an array of rows");
    }
    const std::size_t rows = v.size();
    std::size_t cols = 0;
    Eigen::MatrixXd out;
    for (std::size_t r = 0; r < rows; ++r) {
        const Eigen::VectorXd row = as_vector(v[r], what);
        if (r == 0) {
            cols = static_cast<std::size_t>(row.size());
            out.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
        } else if (static_cast<std::size_t>(row.size()) != cols) {
            throw ConfigError(std::string("config: '") + what + "' rows differ in length");
        }
        out.row(static_cast<Eigen::Index>(r)) = row.transpose();
    }
    return out;
}

ic::InitialCostSpec parse_cost(const json& j) {
    const std::string type = need(j, "type").get<std::string>();
    if (type == "linear") {
        return ic::Linear{as_vector(need(j, "slope"), "cost.slope")};
    }
    if (type == "quadratic") {
        ic::Quadratic q;
        q.y = as_vector(need(j, "y"), "cost.y");
        q.weight = opt_number(j, "weight", 1.0);
        q.offset = opt_number(j, "offset", 0.0);
        return q;
    }
    if (type == "ellipsoid") {
        return ic::EllipsoidNorm{as_matrix(need(j, "M"), "cost.M")};
    }
    if (type == "shifted_l1_squared") {
        return ic::ShiftedL1Squared{as_vector(need(j, "shift"), "cost.shift")};
    }
    if (type == "min_of_quadratics") {
        const json& br = need(j, "branches");
        if (!br.is_array() || br.empty()) {
            throw ConfigError("config: 'cost.branches' must be a non-empty array");
        }
        ic::MinOfQuadratics mq;
        for (const auto& bj : br) {
            ic::QuadraticBranch qb;
            qb.y = as_vector(need(bj, "y"), "branch.y");
            qb.offset = opt_number(bj, "offset", 0.0);
            mq.branches.push_back(std::move(qb));
        }
        return mq;
    }
    throw ConfigError("config: unknown cost type '" + type + "'");
}

GridAxis parse_axis(const json& j) {
    GridAxis ax;
    ax.index = need(j, "index").get<int>();
    ax.min = need_number(j, "min");
    ax.max = need_number(j, "max");
    ax.count = need(j, "count").get<int>();
    if (ax.count < 2) throw ConfigError("config: grid axis count must be >= 2");
    if (!(ax.min < ax.max)) throw ConfigError("config: grid axis needs min < max");
    return ax;
}

Query parse_query(const json& j, int n) {
    const std::string type = need(j, "type").get<std::string>();
    if (type == "single_point") {
        SinglePointQuery q;
        q.x = as_vector(need(j, "x"), "query.x");
        q.t = need_number(j, "t");
        if (q.x.size() != n) throw ConfigError("config: query.x size mismatch");
        return q;
    }
    if (type == "grid") {
        const json& axes = need(j, "axes");
        if (!axes.is_array() || axes.size() != 2) {
            throw ConfigError("config: grid needs exactly two axes");
        }
        GridQuery q;
        q.axis1 = parse_axis(axes[0]);
        q.axis2 = parse_axis(axes[1]);
        if (q.axis1.index == q.axis2.index) {
            throw ConfigError("config: grid axes must vary different coordinates");
        }
        for (const GridAxis* ax : {&q.axis1, &q.axis2}) {
            if (ax->index < 0 || ax->index >= n) {
                throw ConfigError("config: grid axis index out of range");
            }
        }
        if (j.contains("fixed")) {
            q.fixed = as_vector(j["fixed"], "query.fixed");
            if (q.fixed.size() != n) throw ConfigError("config: query.fixed size mismatch");
        } else {
            q.fixed = Eigen::VectorXd::Zero(n);
        }
        const json& times = need(j, "times");
        if (!times.is_array() || times.empty()) {
            throw ConfigError("config: grid needs a non-empty 'times' array");
        }
        for (const auto& tv : times) {
            if (!tv.is_number()) throw ConfigError("config: grid times must be numbers");
            const double t = tv.get<double>();
            if (!(t >= 0.0)) throw ConfigError("config: grid times must be >= 0");
            q.times.push_back(t);
        }
        return q;
    }
    if (type == "trajectory") {
        TrajectoryQuery q;
        q.x = as_vector(need(j, "x"), "query.x");
        q.t = need_number(j, "t");
        q.samples = need(j, "samples").get<int>();
        if (q.x.size() != n) throw ConfigError("config: query.x size mismatch");
        if (!(q.t > 0.0)) throw ConfigError("config: trajectory needs t > 0");
        if (q.samples < 2) throw ConfigError("config: trajectory needs >= 2 samples");
        return q;
    }
    if (type == "benchmark") {
        BenchmarkQuery q;
        if (j.contains("sizes")) {
            for (const auto& sv : j["sizes"]) q.sizes.push_back(sv.get<int>());
        } else {
            q.sizes = {4, 8, 12, 16};
        }
        if (q.sizes.empty()) throw ConfigError("config: benchmark needs at least one size");
        for (int s : q.sizes) {
            if (s < 1 || s > n) throw ConfigError("config: benchmark size out of range");
        }
        q.points = j.contains("points") ? j["points"].get<long>() : 102400;
        if (q.points < 1) throw ConfigError("config: benchmark needs >= 1 point");
        const std::string mode =
            j.contains("mode") ? j["mode"].get<std::string>() : std::string("tolerance");
        if (mode == "tolerance") {
            q.mode = BenchmarkMode::Tolerance;
        } else if (mode == "fixed_iteration") {
            q.mode = BenchmarkMode::FixedIteration;
        } else {
            throw ConfigError("config: benchmark mode must be tolerance|fixed_iteration");
        }
        return q;
    }
    if (type == "verify") {
        VerifyQuery q;
        q.suite = need(j, "suite").get<std::string>();
        return q;
    }
    throw ConfigError("config: unknown query type '" + type + "'");
}

}  // namespace

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file: " + path);
    json doc;
    try {
        in >> doc;
    } catch (const std::exception& ex) {
        throw ConfigError(std::string("config: JSON parse failure: ") + ex.what());
    }

    RunConfig cfg;
    try {
        const json& pj = need(doc, "problem");
        const Eigen::VectorXd a = as_vector(need(pj, "a"), "problem.a");
        const Eigen::VectorXd b = as_vector(need(pj, "b"), "problem.b");
        ic::InitialCostSpec cost = parse_cost(need(pj, "cost"));
        std::optional<hopf::Transform> transform;
        if (pj.contains("transform")) {
            const json& tj = pj["transform"];
            hopf::Transform tr;
            tr.P = as_matrix(need(tj, "P"), "transform.P");
            tr.u0 = tj.contains("u0") ? as_vector(tj["u0"], "transform.u0")
                                      : Eigen::VectorXd::Zero(a.size());
            transform = std::move(tr);
        }
        cfg.problem.emplace(a, b, std::move(cost), std::move(transform));

        cfg.query = parse_query(need(doc, "query"), cfg.problem->n());

        if (doc.contains("admm")) {
            const json& aj = doc["admm"];
            cfg.admm.lambda = opt_number(aj, "lambda", cfg.admm.lambda);
            cfg.admm.eps = opt_number(aj, "eps", cfg.admm.eps);
            if (aj.contains("max_iter")) cfg.admm.max_iter = aj["max_iter"].get<int>();
        }
        if (doc.contains("newton")) {
            const json& nj = doc["newton"];
            cfg.admm.newton.tol = opt_number(nj, "tol", cfg.admm.newton.tol);
            if (nj.contains("max_iter")) cfg.admm.newton.max_iter = nj["max_iter"].get<int>();
            if (nj.contains("fixed_iter_mode")) {
                cfg.admm.newton.fixed_iter_mode = nj["fixed_iter_mode"].get<bool>();
            }
            if (nj.contains("fixed_iter_count")) {
                cfg.admm.newton.fixed_iter_count = nj["fixed_iter_count"].get<int>();
            }
        }
        if (doc.contains("output")) cfg.output = doc["output"].get<std::string>();
        if (doc.contains("seed")) cfg.seed = doc["seed"].get<std::uint64_t>();
        if (doc.contains("strict")) cfg.strict = doc["strict"].get<bool>();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& ex) {
        // invalid problem data surfaces from the library constructors
        throw ConfigError(std::string("config: ") + ex.what());
    }
    return cfg;
}

}  // namespace hj::cli
