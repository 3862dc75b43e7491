#pragma once

#include <vector>

#include "lbt/model.hpp"

namespace lbt {

// Binomial coefficient C(n, k) as a double. Exact for every value that
// fits a double's integer range, which covers all supported model sizes.
double binom(int n, int k);

// Probability mass function on {0, ..., support_max()}.
class Pmf {
  public:
    // Validates the mass vector: non-empty, entries >= 0, total within
    // 1e-9 of 1. Deviations are rejected, never silently renormalized.
    explicit Pmf(std::vector<double> mass);

    static Pmf point_mass(int at);

    int support_max() const { return static_cast<int>(mass_.size()) - 1; }

    // Mass at j; 0 outside the support.
    double operator()(int j) const {
        if (j < 0 || j > support_max()) return 0.0;
        return mass_[static_cast<std::size_t>(j)];
    }

    const std::vector<double>& mass() const { return mass_; }

  private:
    std::vector<double> mass_;
};

// Bin(r, p): mass(j) = C(r, j) p^j (1-p)^(r-j).
Pmf binomial_pmf(int r, double p);

// Distribution of the sum of independent variables with laws f and g.
Pmf convolve(const Pmf& f, const Pmf& g);

// Law of the total minus count N for the given model:
// the convolution of Bin(k, 1-a) (false minuses among locked boxes)
// and Bin(n-k, b) (correct minuses among unlocked boxes).
Pmf minus_count_pmf(const ModelA& model);

// Joint law of (N1, N): N1 false minuses, N total minuses.
// Entry (t, x) = P(N1 = t, N = x) = p1(t) p2(x - t) with p1 = Bin(k, 1-a)
// and p2 = Bin(n-k, b). Out-of-support queries return 0.
class JointTx {
  public:
    explicit JointTx(const ModelA& model);

    int t_max() const { return k_; }
    int x_max() const { return n_; }

    double at(int t, int x) const;

    // Column sums over t; equals minus_count_pmf for the same model.
    Pmf column_sums() const;

  private:
    int n_ = 0;
    int k_ = 0;
    // Row t = 0..k, column x = 0..n.
    std::vector<std::vector<double>> mass_;
};

JointTx joint_tx(const ModelA& model);

// E(N1 | N = x). Throws domain_error when P(N = x) = 0.
double conditional_n1_mean(const ModelA& model, int x);

}  // namespace lbt
