#pragma once

#include <cstdint>
#include <vector>

#include "lbt/planner.hpp"

namespace lbt {

// C(n, k) in 64-bit integer arithmetic; throws guard_error on overflow.
std::uint64_t binom_u64(int n, int k);

// rank -> k-subset of {0, ..., n-1} in lexicographic order of the sorted
// position lists. Inverse of rank_combination.
std::vector<int> unrank_combination(int n, int k, std::uint64_t rank);
std::uint64_t rank_combination(int n, const std::vector<int>& positions);

// Lock configuration: bits[i] = 1 means box i holds a lock.
struct LockConfig {
    std::vector<int> bits;

    int lock_count() const;
    std::string to_string() const;
};

// Signal vector: bits[i] is the test outcome for box i (1 plus, 0 minus).
struct Signal {
    std::vector<int> bits;

    int minus_count() const;
    std::string to_string() const;
};

// All C(n, k) configurations, in lexicographic order of their bit strings.
std::vector<LockConfig> enumerate_lock_configs(int n, int k);

// All 2^n signals, in lexicographic order of their bit strings.
std::vector<Signal> enumerate_signals(int n);

// Defender's mixed strategy over the indexed configuration list.
struct Prior {
    std::vector<double> weights;

    // Throws domain_error unless weights has the given size, entries are
    // >= 0, and the total is within 1e-9 of 1.
    void validate(std::size_t config_count) const;
};

Prior uniform_prior(std::size_t config_count);

// P(s | gamma) = prod_{locked i} a^{s_i} (1-a)^{1-s_i}
//              * prod_{unlocked i} b^{1-s_i} (1-b)^{s_i}.
double likelihood(const LockConfig& gamma, const Signal& s, double a, double b);

// P(s | prior) = sum_gamma prior(gamma) P(s | gamma).
double signal_prob(const Prior& prior, const std::vector<LockConfig>& configs,
                   const Signal& s, double a, double b);

// Bayes posterior over configurations, one row per signal. Rows with
// P(s | prior) = 0 are marked undefined.
struct PosteriorMatrix {
    std::vector<std::vector<double>> theta;  // [signal][config]
    std::vector<bool> defined;               // [signal]
};

PosteriorMatrix posterior_matrix(int n, int k, const Prior& prior, double a, double b);

// Per-box no-lock posteriors alpha_i(s) = P(box i unlocked | s); each
// defined row sums to n - k.
struct MarginalMatrix {
    std::vector<std::vector<double>> alpha;  // [signal][box]
    std::vector<bool> defined;               // [signal]
};

MarginalMatrix marginal_matrix(int n, int k, const Prior& prior, double a, double b);

// Orbit decomposition of (configuration, signal) pairs by
// (t, x) = (false minuses, total minuses):
//   group_size(t, x) = C(n,k) C(k,t) C(n-k, x-t) = C(n,x) C(x,t) C(n-x, k-t)
//   p_tx(t, x)       = a^(k-t) (1-a)^t b^(x-t) (1-b)^(n-k-x+t)
// and C(n,k) * P(N1 = t, N = x) = p_tx * group_size cell by cell.
struct PartitionTable {
    int n = 0;
    int k = 0;
    std::vector<std::vector<double>> group_size;  // [t][x]
    std::vector<std::vector<double>> p_tx;        // [t][x]
};

PartitionTable partition_counts(const ModelA& model);

// Single-bomb best response: for each signal, the potential loss of box i
// is p * costs[i] * alpha_i(s); the bomb goes to an argmax box, ties
// split evenly. damage = sum_s P(s) max_i loss_i(s), the total expected
// damage against this prior.
struct Stage2Result {
    std::vector<std::vector<double>> response;  // [signal][box], rows sum to 1
    std::vector<bool> defined;                  // [signal]
    double damage = 0.0;
};

Stage2Result stage2_response(int n, int k, const Prior& prior, double a, double b,
                             double p, const std::vector<double>& costs);

// One explicit allocation: bomb counts per minus box and per plus box,
// each sorted in non-increasing order.
struct OracleAllocation {
    std::vector<int> minus_bombs;
    std::vector<int> plus_bombs;
};

// Exhaustive maximum of strategy_value over every split of m bombs into
// x minus slots and n-x plus slots (up to within-group permutation).
// Guarded to n <= 8, m <= 12 (throws guard_error above that).
struct OracleResult {
    double max_value = 0.0;
    std::vector<OracleAllocation> argmax;
};

OracleResult oracle_best_allocation(const PosteriorRow& row, const ExplosionModel& explosion,
                                    int n, int x, int m);

// Naive minimization of stage-2 damage over the prior simplex on a grid
// with the given step. Reports every grid point within 1e-9 of the
// minimum. Guarded to C(n, k) <= 3 (throws guard_error above that).
struct GridSearchResult {
    double min_value = 0.0;
    std::vector<std::vector<double>> argmin;
    std::size_t evaluations = 0;
};

GridSearchResult gridsearch_prior(int n, int k, double a, double b, double p,
                                  const std::vector<double>& costs, double resolution);

}  // namespace lbt
