#pragma once

#include <cstdint>
#include <string>

namespace hj::cli {

// Runs one of the built-in verification suites ("core1d", "prox1d", "hopf",
// or "all"): each suite replays solver outputs against the brute-force and
// finite-difference reference computations and prints one [PASS]/[FAIL] line
// per invariant. Returns 0 when everything passes, 2 on any failure; throws
// ConfigError for an unknown suite name.
int run_verify(const std::string& suite, std::uint64_t seed, bool quiet);

}  // namespace hj::cli
