#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace lbt {

// Argument outside the mathematical domain of an operation
// (invalid probability, zero-probability conditioning event, ...).
struct domain_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Parameters outside the regime the solver is derived for (a + b <= 1).
struct unsupported_regime : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Request exceeds a combinatorial size guard of an exhaustive routine.
struct guard_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Symmetric lock placement: n boxes, k locks placed uniformly at random,
// per-box tests with sensitivity a = P(plus | locked) and
// specificity b = P(minus | unlocked).
struct ModelA {
    int n = 0;
    int k = 0;
    double a = 0.0;
    double b = 0.0;

    // Throws domain_error unless 0 < k < n and a, b lie in [0, 1].
    void validate() const;
};

// Geometric explosion law: u bombs destroy an unlocked box with
// probability p(u) = 1 - (1-p)^u, where p is the single-bomb probability.
struct ExplosionModel {
    double p = 0.0;

    double q() const { return 1.0 - p; }

    // p(u) = 1 - q^u; prob(0) = 0.
    double prob(int u) const;

    // Throws domain_error unless 0 < p <= 1.
    void validate() const;
};

}  // namespace lbt
