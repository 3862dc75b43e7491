#pragma once

#include <cstdint>
#include <vector>

#include "lbt/planner.hpp"

namespace lbt {

// Stream rule v1. Every trial draws from its own substream so that serial
// and parallel executions produce identical results:
//   state_0(seed, trial) = mix64(mix64(seed) + trial * 0xD1B54A32D192ED03)
//   next():  state += 0x9E3779B97F4A7C15; return mix64(state)
// where mix64 is the SplitMix64 finalizer. Changing any part of this rule
// changes every sampled number, so the rule is versioned and the version
// is reported alongside simulation results.
inline constexpr int stream_rule_version = 1;

std::uint64_t mix64(std::uint64_t z);

class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t state) : state_(state) {}

    std::uint64_t next();

    // Uniform in [0, 1), 53 random bits.
    double next_unit();

    // Uniform in [0, bound), unbiased (rejection on the short range).
    std::uint64_t next_below(std::uint64_t bound);

  private:
    std::uint64_t state_;
};

// Substream for one trial index under stream rule v1.
SplitMix64 trial_stream(std::uint64_t seed, std::uint64_t trial);

struct SimConfig {
    ModelA model;
    ExplosionModel explosion;
    int m = 0;
    long long trials = 0;
    std::uint64_t seed = 0;
};

struct SimResult {
    double mean_destroyed = 0.0;
    double std_error = 0.0;                  // from the sample variance
    std::vector<double> per_x_mean;          // [x = 0..n]; 0 where no trials
    std::vector<double> per_x_std_error;     // [x]; 0 where fewer than 2 trials
    std::vector<long long> trials_per_x;     // [x]
};

// Samples the full process: uniform lock placement, per-box signals,
// the solver's fill-and-switch bomb allocation for the observed minus
// count, then independent explosions. Deterministic for a fixed
// (config, seed); trials run on independent substreams.
SimResult simulate(const SimConfig& config);

}  // namespace lbt
