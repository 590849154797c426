#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hj/parallel.hpp"
#include "run_config.hpp"
#include "runners.hpp"

int main(int argc, char** argv) {
    CLI::App app{
        "hjsolve: grid-free pointwise solver for Hamilton-Jacobi equations with "
        "quadratic kinetic energy and a piecewise-affine concave potential"};

    std::string config_path;
    std::string out_override;
    unsigned threads = hj::default_thread_count();
    std::uint64_t seed_value = 0;
    bool quiet = false;

    app.add_option("--config", config_path, "path to the JSON run configuration")
        ->required();
    app.add_option("--out", out_override, "output path (overrides the config's output)");
    app.add_option("--threads", threads, "worker pool size (default: logical cores)");
    auto* seed_opt =
        app.add_option("--seed", seed_value, "random seed (overrides the config's seed)");
    app.add_flag("--quiet", quiet, "suppress informational output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const hj::cli::RunConfig cfg = hj::cli::load_run_config(config_path);
        hj::cli::CliOptions opts;
        opts.threads = threads == 0 ? hj::default_thread_count() : threads;
        opts.quiet = quiet;
        opts.out_override = out_override;
        if (seed_opt->count() > 0) opts.seed_override = seed_value;
        return hj::cli::run(cfg, opts);
    } catch (const hj::cli::IoError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 3;
    } catch (const hj::cli::ConfigError& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
}
