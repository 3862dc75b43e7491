#include "lbt/montecarlo.hpp"

#include <cmath>

#include "lbt/exact.hpp"

namespace lbt {

namespace {

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
constexpr std::uint64_t kStreamStride = 0xD1B54A32D192ED03ull;

}  // namespace

std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
}

std::uint64_t SplitMix64::next() {
    state_ += kGolden;
    return mix64(state_);
}

double SplitMix64::next_unit() {
    return static_cast<double>(next() >> 11) * 0x1.0p-53;
}

std::uint64_t SplitMix64::next_below(std::uint64_t bound) {
    if (bound == 0) throw domain_error("bound must be positive");
    // Rejection keeps the draw exactly uniform.
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        const std::uint64_t raw = next();
        const unsigned __int128 product =
            static_cast<unsigned __int128>(raw) * static_cast<unsigned __int128>(bound);
        if (static_cast<std::uint64_t>(product) >= threshold) {
            return static_cast<std::uint64_t>(product >> 64);
        }
    }
}

SplitMix64 trial_stream(std::uint64_t seed, std::uint64_t trial) {
    return SplitMix64(mix64(mix64(seed) + trial * kStreamStride));
}

SimResult simulate(const SimConfig& config) {
    config.model.validate();
    config.explosion.validate();
    if (config.trials < 1) throw domain_error("at least one trial is required");
    if (config.m < 0) throw domain_error("bomb count must be >= 0");
    if (!(config.model.a + config.model.b > 1.0)) {
        throw unsupported_regime("the simulated policy requires informative tests (a + b > 1)");
    }

    const int n = config.model.n;
    const int k = config.model.k;
    const int m = config.m;
    const std::uint64_t config_count = binom_u64(n, k);

    // Per-x bomb allocations are fixed by the policy; precompute them.
    const PosteriorTable posteriors = posterior_from_reduced_pmf(config.model);
    std::vector<AllocationTuple> alloc_for_x(static_cast<std::size_t>(n) + 1);
    std::vector<bool> alloc_defined(static_cast<std::size_t>(n) + 1, false);
    for (int x = 1; x < n; ++x) {
        const PosteriorRow& row = posteriors.at(x);
        if (!row.defined) continue;
        const int d = threshold_d(row, config.explosion, m);
        alloc_for_x[static_cast<std::size_t>(x)] = allocate_duap(n, x, m, d);
        alloc_defined[static_cast<std::size_t>(x)] = true;
    }

    double sum = 0.0;
    double sum_squares = 0.0;
    std::vector<double> per_x_sum(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<double> per_x_sum_squares(static_cast<std::size_t>(n) + 1, 0.0);
    std::vector<long long> per_x_count(static_cast<std::size_t>(n) + 1, 0);

    std::vector<int> locked(static_cast<std::size_t>(n), 0);
    std::vector<int> minus_boxes;
    std::vector<int> plus_boxes;
    std::vector<int> bombs(static_cast<std::size_t>(n), 0);
    minus_boxes.reserve(static_cast<std::size_t>(n));
    plus_boxes.reserve(static_cast<std::size_t>(n));

    for (long long trial = 0; trial < config.trials; ++trial) {
        SplitMix64 rng = trial_stream(config.seed, static_cast<std::uint64_t>(trial));

        // Lock placement: a uniform index unranked into k positions.
        std::fill(locked.begin(), locked.end(), 0);
        for (int position : unrank_combination(n, k, rng.next_below(config_count))) {
            locked[static_cast<std::size_t>(position)] = 1;
        }

        // Per-box signals, box order.
        minus_boxes.clear();
        plus_boxes.clear();
        for (int i = 0; i < n; ++i) {
            const double u = rng.next_unit();
            const bool minus = locked[static_cast<std::size_t>(i)] == 1
                                   ? u < 1.0 - config.model.a
                                   : u < config.model.b;
            if (minus) {
                minus_boxes.push_back(i);
            } else {
                plus_boxes.push_back(i);
            }
        }
        const int x = static_cast<int>(minus_boxes.size());

        // Bomb allocation for the observed minus count. Extras go to the
        // lowest-index boxes of their group; values are permutation
        // invariant, so any fixed choice works.
        std::fill(bombs.begin(), bombs.end(), 0);
        if (x == 0 || x == n) {
            const int layers = m / n;
            const int extras = m % n;
            for (int i = 0; i < n; ++i) {
                bombs[static_cast<std::size_t>(i)] = layers + (i < extras ? 1 : 0);
            }
        } else if (alloc_defined[static_cast<std::size_t>(x)]) {
            const AllocationTuple& tuple = alloc_for_x[static_cast<std::size_t>(x)];
            for (std::size_t j = 0; j < minus_boxes.size(); ++j) {
                bombs[static_cast<std::size_t>(minus_boxes[j])] =
                    tuple.l_minus + (static_cast<int>(j) < tuple.e_minus ? 1 : 0);
            }
            for (std::size_t j = 0; j < plus_boxes.size(); ++j) {
                bombs[static_cast<std::size_t>(plus_boxes[j])] =
                    tuple.l_plus + (static_cast<int>(j) < tuple.e_plus ? 1 : 0);
            }
        }

        // Explosions: one draw per unlocked box holding bombs, box order.
        int destroyed = 0;
        for (int i = 0; i < n; ++i) {
            if (locked[static_cast<std::size_t>(i)] == 1) continue;
            const int u = bombs[static_cast<std::size_t>(i)];
            if (u == 0) continue;
            if (rng.next_unit() < config.explosion.prob(u)) ++destroyed;
        }

        const double value = static_cast<double>(destroyed);
        sum += value;
        sum_squares += value * value;
        per_x_sum[static_cast<std::size_t>(x)] += value;
        per_x_sum_squares[static_cast<std::size_t>(x)] += value * value;
        per_x_count[static_cast<std::size_t>(x)] += 1;
    }

    SimResult result;
    const double trials = static_cast<double>(config.trials);
    result.mean_destroyed = sum / trials;
    if (config.trials > 1) {
        const double variance =
            std::max(0.0, (sum_squares - trials * result.mean_destroyed * result.mean_destroyed) /
                              (trials - 1.0));
        result.std_error = std::sqrt(variance / trials);
    }
    result.per_x_mean.assign(static_cast<std::size_t>(n) + 1, 0.0);
    result.per_x_std_error.assign(static_cast<std::size_t>(n) + 1, 0.0);
    result.trials_per_x = per_x_count;
    for (int x = 0; x <= n; ++x) {
        const std::size_t xi = static_cast<std::size_t>(x);
        if (per_x_count[xi] == 0) continue;
        const double count = static_cast<double>(per_x_count[xi]);
        result.per_x_mean[xi] = per_x_sum[xi] / count;
        if (per_x_count[xi] > 1) {
            const double variance =
                std::max(0.0, (per_x_sum_squares[xi] -
                               count * result.per_x_mean[xi] * result.per_x_mean[xi]) /
                                  (count - 1.0));
            result.per_x_std_error[xi] = std::sqrt(variance / count);
        }
    }
    return result;
}

}  // namespace lbt
