#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "hj/hopf_solver.hpp"

namespace hj::cli {

// configuration problems (bad JSON, failed validation) -> exit code 1
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// file-system problems (unreadable config, unwritable output) -> exit code 3
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SinglePointQuery {
    Eigen::VectorXd x;
    double t = 0.0;
};

struct GridAxis {
    int index = 0;
    double min = 0.0;
    double max = 0.0;
    int count = 0;
};

struct GridQuery {
    GridAxis axis1;
    GridAxis axis2;
    Eigen::VectorXd fixed;       // base point; varied coordinates get overwritten
    std::vector<double> times;
};

struct TrajectoryQuery {
    Eigen::VectorXd x;
    double t = 0.0;
    int samples = 0;
};

enum class BenchmarkMode { Tolerance, FixedIteration };

struct BenchmarkQuery {
    std::vector<int> sizes;
    long points = 102400;
    BenchmarkMode mode = BenchmarkMode::Tolerance;
};

struct VerifyQuery {
    std::string suite;
};

using Query =
    std::variant<SinglePointQuery, GridQuery, TrajectoryQuery, BenchmarkQuery, VerifyQuery>;

struct RunConfig {
    std::optional<hopf::ProblemSpec> problem;
    Query query;
    hopf::AdmmConfig admm;
    std::string output;          // empty -> stdout-only queries must not need a file
    std::uint64_t seed = 0;
    bool strict = false;         // non-convergence escalates from warning to exit 2
};

// Parses and validates the JSON run configuration. Throws ConfigError for
// malformed or invalid content and IoError when the file cannot be read.
RunConfig load_run_config(const std::string& path);

}  // namespace hj::cli
