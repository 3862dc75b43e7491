#include "lbt/exact.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

namespace lbt {

namespace {

constexpr int kOracleMaxBoxes = 8;
constexpr int kOracleMaxBombs = 12;
constexpr std::uint64_t kGridSearchMaxConfigs = 3;

// Ties between potential losses are split at this relative tolerance.
constexpr double kTieTolerance = 1e-12;

std::string bits_to_string(const std::vector<int>& bits) {
    std::string out;
    out.reserve(bits.size());
    for (int bit : bits) out.push_back(bit ? '1' : '0');
    return out;
}

void check_probability(const char* name, double value) {
    if (value < 0.0 || value > 1.0) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%s = %g is outside [0, 1]", name, value);
        throw domain_error(buf);
    }
}

// All partitions of total into at most slots parts, each part <= cap,
// listed as non-increasing part lists padded with zeros to length slots.
void partitions_into(int total, int slots, int cap, std::vector<int>& current,
                     std::vector<std::vector<int>>& out) {
    if (total == 0) {
        std::vector<int> padded = current;
        padded.resize(static_cast<std::size_t>(slots), 0);
        out.push_back(std::move(padded));
        return;
    }
    if (static_cast<int>(current.size()) == slots) return;
    const int high = std::min(total, cap);
    for (int part = high; part >= 1; --part) {
        current.push_back(part);
        partitions_into(total - part, slots, part, current, out);
        current.pop_back();
    }
}

std::vector<std::vector<int>> partitions(int total, int slots) {
    std::vector<std::vector<int>> out;
    if (slots == 0) {
        if (total == 0) out.push_back({});
        return out;
    }
    std::vector<int> current;
    partitions_into(total, slots, total, current, out);
    return out;
}

}  // namespace

std::uint64_t binom_u64(int n, int k) {
    if (k < 0 || k > n) return 0;
    if (k > n - k) k = n - k;
    unsigned __int128 result = 1;
    for (int i = 1; i <= k; ++i) {
        result = result * static_cast<unsigned>(n - k + i) / static_cast<unsigned>(i);
        if (result > UINT64_MAX) {
            throw guard_error("binomial coefficient overflows 64 bits");
        }
    }
    return static_cast<std::uint64_t>(result);
}

std::vector<int> unrank_combination(int n, int k, std::uint64_t rank) {
    if (k < 0 || k > n) throw domain_error("combination needs 0 <= k <= n");
    if (rank >= binom_u64(n, k)) throw domain_error("combination rank out of range");
    std::vector<int> positions;
    positions.reserve(static_cast<std::size_t>(k));
    int next = 0;
    for (int remaining = k; remaining > 0; --remaining) {
        for (int candidate = next;; ++candidate) {
            const std::uint64_t with_candidate = binom_u64(n - candidate - 1, remaining - 1);
            if (rank < with_candidate) {
                positions.push_back(candidate);
                next = candidate + 1;
                break;
            }
            rank -= with_candidate;
        }
    }
    return positions;
}

std::uint64_t rank_combination(int n, const std::vector<int>& positions) {
    std::uint64_t rank = 0;
    const int k = static_cast<int>(positions.size());
    int previous = -1;
    for (int i = 0; i < k; ++i) {
        const int position = positions[static_cast<std::size_t>(i)];
        if (position <= previous || position >= n) {
            throw domain_error("positions must be strictly increasing within 0..n-1");
        }
        for (int skipped = previous + 1; skipped < position; ++skipped) {
            rank += binom_u64(n - skipped - 1, k - i - 1);
        }
        previous = position;
    }
    return rank;
}

int LockConfig::lock_count() const {
    int count = 0;
    for (int bit : bits) count += bit;
    return count;
}

std::string LockConfig::to_string() const { return bits_to_string(bits); }

int Signal::minus_count() const {
    int count = 0;
    for (int bit : bits) count += bit == 0 ? 1 : 0;
    return count;
}

std::string Signal::to_string() const { return bits_to_string(bits); }

std::vector<LockConfig> enumerate_lock_configs(int n, int k) {
    if (n < 1 || n > 30) throw guard_error("configuration enumeration supports 1 <= n <= 30");
    if (k < 0 || k > n) throw domain_error("lock count needs 0 <= k <= n");
    std::vector<LockConfig> configs;
    configs.reserve(static_cast<std::size_t>(binom_u64(n, k)));
    for (std::uint32_t word = 0; word < (1u << n); ++word) {
        LockConfig config;
        config.bits.resize(static_cast<std::size_t>(n));
        int count = 0;
        for (int i = 0; i < n; ++i) {
            const int bit = (word >> (n - 1 - i)) & 1u;
            config.bits[static_cast<std::size_t>(i)] = bit;
            count += bit;
        }
        if (count == k) configs.push_back(std::move(config));
    }
    return configs;
}

std::vector<Signal> enumerate_signals(int n) {
    if (n < 1 || n > 30) throw guard_error("signal enumeration supports 1 <= n <= 30");
    std::vector<Signal> signals;
    signals.reserve(static_cast<std::size_t>(1) << n);
    for (std::uint32_t word = 0; word < (1u << n); ++word) {
        Signal s;
        s.bits.resize(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            s.bits[static_cast<std::size_t>(i)] = (word >> (n - 1 - i)) & 1u;
        }
        signals.push_back(std::move(s));
    }
    return signals;
}

void Prior::validate(std::size_t config_count) const {
    if (weights.size() != config_count) {
        throw domain_error("prior length must match the configuration count");
    }
    double total = 0.0;
    for (double w : weights) {
        if (w < 0.0) throw domain_error("prior weight is negative");
        total += w;
    }
    if (std::abs(total - 1.0) > 1e-9) throw domain_error("prior weights must sum to 1");
}

Prior uniform_prior(std::size_t config_count) {
    if (config_count == 0) throw domain_error("no configurations to mix over");
    Prior prior;
    prior.weights.assign(config_count, 1.0 / static_cast<double>(config_count));
    return prior;
}

double likelihood(const LockConfig& gamma, const Signal& s, double a, double b) {
    if (gamma.bits.size() != s.bits.size()) {
        throw domain_error("configuration and signal lengths differ");
    }
    check_probability("a", a);
    check_probability("b", b);
    double value = 1.0;
    for (std::size_t i = 0; i < gamma.bits.size(); ++i) {
        if (gamma.bits[i] == 1) {
            value *= s.bits[i] == 1 ? a : 1.0 - a;
        } else {
            value *= s.bits[i] == 1 ? 1.0 - b : b;
        }
    }
    return value;
}

double signal_prob(const Prior& prior, const std::vector<LockConfig>& configs,
                   const Signal& s, double a, double b) {
    prior.validate(configs.size());
    double total = 0.0;
    for (std::size_t j = 0; j < configs.size(); ++j) {
        total += prior.weights[j] * likelihood(configs[j], s, a, b);
    }
    return total;
}

PosteriorMatrix posterior_matrix(int n, int k, const Prior& prior, double a, double b) {
    const std::vector<LockConfig> configs = enumerate_lock_configs(n, k);
    const std::vector<Signal> signals = enumerate_signals(n);
    prior.validate(configs.size());

    PosteriorMatrix matrix;
    matrix.theta.assign(signals.size(), std::vector<double>(configs.size(), 0.0));
    matrix.defined.assign(signals.size(), false);
    for (std::size_t si = 0; si < signals.size(); ++si) {
        double total = 0.0;
        for (std::size_t j = 0; j < configs.size(); ++j) {
            const double w = prior.weights[j] * likelihood(configs[j], signals[si], a, b);
            matrix.theta[si][j] = w;
            total += w;
        }
        if (total > 0.0) {
            matrix.defined[si] = true;
            for (double& w : matrix.theta[si]) w /= total;
        }
    }
    return matrix;
}

MarginalMatrix marginal_matrix(int n, int k, const Prior& prior, double a, double b) {
    const std::vector<LockConfig> configs = enumerate_lock_configs(n, k);
    const PosteriorMatrix posterior = posterior_matrix(n, k, prior, a, b);

    MarginalMatrix matrix;
    matrix.alpha.assign(posterior.theta.size(),
                        std::vector<double>(static_cast<std::size_t>(n), 0.0));
    matrix.defined = posterior.defined;
    for (std::size_t si = 0; si < posterior.theta.size(); ++si) {
        if (!posterior.defined[si]) continue;
        for (std::size_t j = 0; j < configs.size(); ++j) {
            for (int i = 0; i < n; ++i) {
                if (configs[j].bits[static_cast<std::size_t>(i)] == 0) {
                    matrix.alpha[si][static_cast<std::size_t>(i)] += posterior.theta[si][j];
                }
            }
        }
    }
    return matrix;
}

PartitionTable partition_counts(const ModelA& model) {
    model.validate();
    const int n = model.n;
    const int k = model.k;
    PartitionTable table;
    table.n = n;
    table.k = k;
    table.group_size.assign(static_cast<std::size_t>(k) + 1,
                            std::vector<double>(static_cast<std::size_t>(n) + 1, 0.0));
    table.p_tx = table.group_size;
    for (int t = 0; t <= k; ++t) {
        for (int x = t; x <= t + (n - k); ++x) {
            table.group_size[static_cast<std::size_t>(t)][static_cast<std::size_t>(x)] =
                binom(n, k) * binom(k, t) * binom(n - k, x - t);
            table.p_tx[static_cast<std::size_t>(t)][static_cast<std::size_t>(x)] =
                std::pow(model.a, k - t) * std::pow(1.0 - model.a, t) *
                std::pow(model.b, x - t) * std::pow(1.0 - model.b, n - k - (x - t));
        }
    }
    return table;
}

Stage2Result stage2_response(int n, int k, const Prior& prior, double a, double b,
                             double p, const std::vector<double>& costs) {
    const std::vector<LockConfig> configs = enumerate_lock_configs(n, k);
    const std::vector<Signal> signals = enumerate_signals(n);
    prior.validate(configs.size());
    check_probability("p", p);
    if (static_cast<int>(costs.size()) != n) {
        throw domain_error("one cost per box is required");
    }
    for (double c : costs) {
        if (!(c > 0.0)) throw domain_error("costs must be positive");
    }

    Stage2Result result;
    result.response.assign(signals.size(), std::vector<double>(static_cast<std::size_t>(n), 0.0));
    result.defined.assign(signals.size(), false);

    std::vector<double> weighted(configs.size(), 0.0);
    std::vector<double> loss(static_cast<std::size_t>(n), 0.0);
    for (std::size_t si = 0; si < signals.size(); ++si) {
        double total = 0.0;
        for (std::size_t j = 0; j < configs.size(); ++j) {
            weighted[j] = prior.weights[j] * likelihood(configs[j], signals[si], a, b);
            total += weighted[j];
        }
        if (total <= 0.0) continue;
        result.defined[si] = true;

        // loss[i] = p * costs[i] * alpha_i(s) * P(s); the common P(s)
        // factor cancels in the argmax and folds into the damage sum.
        double best = 0.0;
        for (int i = 0; i < n; ++i) {
            double unlocked_mass = 0.0;
            for (std::size_t j = 0; j < configs.size(); ++j) {
                if (configs[j].bits[static_cast<std::size_t>(i)] == 0) {
                    unlocked_mass += weighted[j];
                }
            }
            loss[static_cast<std::size_t>(i)] =
                p * costs[static_cast<std::size_t>(i)] * unlocked_mass;
            best = std::max(best, loss[static_cast<std::size_t>(i)]);
        }
        const double tie_band = kTieTolerance * std::max(1.0, best);
        int tied = 0;
        for (int i = 0; i < n; ++i) {
            if (best - loss[static_cast<std::size_t>(i)] <= tie_band) ++tied;
        }
        for (int i = 0; i < n; ++i) {
            if (best - loss[static_cast<std::size_t>(i)] <= tie_band) {
                result.response[si][static_cast<std::size_t>(i)] = 1.0 / tied;
            }
        }
        result.damage += best;
    }
    return result;
}

OracleResult oracle_best_allocation(const PosteriorRow& row, const ExplosionModel& explosion,
                                    int n, int x, int m) {
    if (n > kOracleMaxBoxes || m > kOracleMaxBombs) {
        throw guard_error("oracle guard: n <= 8 and m <= 12");
    }
    if (x <= 0 || x >= n) throw domain_error("oracle requires 0 < x < n");
    if (m < 0) throw domain_error("bomb count must be >= 0");

    // Two passes: find the maximum, then collect every allocation within
    // the tie tolerance of it.
    OracleResult result;
    bool first = true;
    const auto visit = [&](const auto& fn) {
        for (int to_minus = 0; to_minus <= m; ++to_minus) {
            const auto minus_options = partitions(to_minus, x);
            const auto plus_options = partitions(m - to_minus, n - x);
            for (const auto& minus_bombs : minus_options) {
                for (const auto& plus_bombs : plus_options) {
                    fn(minus_bombs, plus_bombs);
                }
            }
        }
    };
    visit([&](const std::vector<int>& minus_bombs, const std::vector<int>& plus_bombs) {
        const double value = strategy_value(row, explosion, n, x, minus_bombs, plus_bombs);
        if (first || value > result.max_value) {
            result.max_value = value;
            first = false;
        }
    });
    visit([&](const std::vector<int>& minus_bombs, const std::vector<int>& plus_bombs) {
        const double value = strategy_value(row, explosion, n, x, minus_bombs, plus_bombs);
        if (value >= result.max_value - kTieTolerance) {
            result.argmax.push_back({minus_bombs, plus_bombs});
        }
    });
    return result;
}

GridSearchResult gridsearch_prior(int n, int k, double a, double b, double p,
                                  const std::vector<double>& costs, double resolution) {
    const std::uint64_t config_count = binom_u64(n, k);
    if (config_count > kGridSearchMaxConfigs) {
        throw guard_error("grid search guard: C(n, k) <= 3");
    }
    if (!(resolution > 0.0) || resolution > 1.0) {
        throw domain_error("resolution must lie in (0, 1]");
    }
    const std::vector<LockConfig> configs = enumerate_lock_configs(n, k);
    const std::vector<Signal> signals = enumerate_signals(n);
    check_probability("a", a);
    check_probability("b", b);
    check_probability("p", p);
    if (static_cast<int>(costs.size()) != n) {
        throw domain_error("one cost per box is required");
    }

    // Cache the likelihood matrix once; the grid only reweights it.
    std::vector<std::vector<double>> lik(signals.size(),
                                         std::vector<double>(configs.size(), 0.0));
    for (std::size_t si = 0; si < signals.size(); ++si) {
        for (std::size_t j = 0; j < configs.size(); ++j) {
            lik[si][j] = likelihood(configs[j], signals[si], a, b);
        }
    }

    const auto damage_for = [&](const std::vector<double>& weights) {
        double damage = 0.0;
        for (std::size_t si = 0; si < signals.size(); ++si) {
            double best = 0.0;
            for (int i = 0; i < n; ++i) {
                double unlocked_mass = 0.0;
                for (std::size_t j = 0; j < configs.size(); ++j) {
                    if (configs[j].bits[static_cast<std::size_t>(i)] == 0) {
                        unlocked_mass += weights[j] * lik[si][j];
                    }
                }
                best = std::max(best, p * costs[static_cast<std::size_t>(i)] * unlocked_mass);
            }
            damage += best;
        }
        return damage;
    };

    const long long steps = std::max<long long>(1, std::llround(1.0 / resolution));
    const auto for_each_grid_point = [&](const auto& fn) {
        if (config_count == 1) {
            fn(std::vector<double>{1.0});
        } else if (config_count == 2) {
            for (long long i = 0; i <= steps; ++i) {
                const double w0 = static_cast<double>(i) / static_cast<double>(steps);
                fn(std::vector<double>{w0, 1.0 - w0});
            }
        } else {
            for (long long i = 0; i <= steps; ++i) {
                for (long long j = 0; j + i <= steps; ++j) {
                    const double w0 = static_cast<double>(i) / static_cast<double>(steps);
                    const double w1 = static_cast<double>(j) / static_cast<double>(steps);
                    fn(std::vector<double>{w0, w1, 1.0 - w0 - w1});
                }
            }
        }
    };

    // Two passes: locate the minimum, then gather every grid point within
    // 1e-9 of it (grid minimizers are rarely unique).
    GridSearchResult result;
    bool first = true;
    for_each_grid_point([&](const std::vector<double>& weights) {
        const double damage = damage_for(weights);
        ++result.evaluations;
        if (first || damage < result.min_value) {
            result.min_value = damage;
            first = false;
        }
    });
    for_each_grid_point([&](const std::vector<double>& weights) {
        if (damage_for(weights) <= result.min_value + 1e-9) {
            result.argmin.push_back(weights);
        }
    });
    return result;
}

}  // namespace lbt
