#pragma once

#include <vector>

#include "lbt/pmf.hpp"

namespace lbt {

// Posterior no-lock probabilities for one observed total minus count x:
//   p_minus = P(box unlocked | box tested minus, N = x)
//   p_plus  = P(box unlocked | box tested plus,  N = x)
//   ratio   = p_minus / p_plus.
// A row is undefined when P(N = x) = 0. When p_plus is exactly 0
// (perfect specificity) the ratio is marked infinite instead of letting
// a float infinity leak into arithmetic.
struct PosteriorRow {
    int x = 0;
    bool defined = false;
    double p_minus = 0.0;
    double p_plus = 0.0;
    double ratio = 0.0;
    bool ratio_infinite = false;
};

// Rows for x = 1..n-1. The boundary cases x = 0 and x = n carry no row;
// there every box has the same sign and the unconditional no-lock
// probability (n-k)/n applies.
struct PosteriorTable {
    ModelA model;
    std::vector<PosteriorRow> rows;

    const PosteriorRow& at(int x) const;  // throws domain_error outside 1..n-1
};

// Test-quality scalar c = (a/(1-a)) * (b/(1-b)); c > 1 iff a + b > 1
// for a, b strictly inside (0, 1). The ratio depends on (a, b) only
// through c. Throws domain_error when a = 1 or b = 1.
double quality_c(double a, double b);

// Route 1: reduced-model pmf identities. With g = minus_count_pmf,
//   p_minus(x) = ((n-k)/x)     * b     * g_{n-1,k}(x-1) / g_{n,k}(x)
//   p_plus(x)  = ((n-k)/(n-x)) * (1-b) * g_{n-1,k}(x)   / g_{n,k}(x).
PosteriorTable posterior_from_reduced_pmf(const ModelA& model);

// Route 2: conditional-mean identities. With e = E(N1 | N = x),
//   p_minus(x) = (x - e) / x
//   p_plus(x)  = (n - x - k + e) / (n - x).
PosteriorTable posterior_from_conditional_mean(const ModelA& model);

// Route 3: the ratio as a function of (n, k, x) and c alone:
//   ratio(x) = ((n-x)/x) * [sum_i C(k,i) C(n-k-1, x-i-1) c^-i]
//              / [sum_i C(k,i) C(n-k-1, x-i) c^-i].
double ratio_from_quality(int n, int k, int x, double c);

// Route 3 with c computed from (a, b); requires a, b strictly in (0, 1).
double ratio_via_c(const ModelA& model, int x);

// Ratio for independent per-box lock placement with probability lambda:
//   (b/(1-b)) * ((1-b + lambda*h) / (b - lambda*h)),  h = a + b - 1.
// Throws domain_error when lambda is outside (0, 1) or b - lambda*h <= 0.
double ratio_model_b(double a, double b, double lambda);

// Unconditional per-box probabilities before any signal is seen.
struct BoxProbs {
    double t0 = 0.0;  // P(box unlocked) = (n-k)/n
    double s0 = 0.0;  // P(test minus)   = (k/n)(1-a) + ((n-k)/n) b
    double s1 = 0.0;  // P(test plus)
};

BoxProbs marginal_probs(const ModelA& model);

}  // namespace lbt
