#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "run_config.hpp"

namespace hj::cli {

struct CliOptions {
    unsigned threads = 1;
    bool quiet = false;
    std::string out_override;                    // empty -> use config's output path
    std::optional<std::uint64_t> seed_override;  // --seed beats the config seed
};

// Executes the configured query. Returns the process exit code: 0 on success,
// 1 for configuration problems discovered at run time, 2 when a solve fails to
// converge under strict mode or a verification suite fails, 3 on I/O failure.
int run(const RunConfig& cfg, const CliOptions& opts);

// 17-significant-digit decimal formatting; round-trips binary64 exactly.
std::string format_value(double v);

}  // namespace hj::cli
