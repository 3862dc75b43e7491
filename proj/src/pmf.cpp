#include "lbt/pmf.hpp"

#include <cmath>
#include <cstdio>

namespace lbt {

namespace {

std::string describe_probability(const char* name, double value) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%s = %g is outside [0, 1]", name, value);
    return buf;
}

constexpr double kMassTolerance = 1e-9;

}  // namespace

void ModelA::validate() const {
    if (n <= 0) throw domain_error("n must be positive");
    if (k <= 0 || k >= n) throw domain_error("k must satisfy 0 < k < n");
    if (a < 0.0 || a > 1.0) throw domain_error(describe_probability("a", a));
    if (b < 0.0 || b > 1.0) throw domain_error(describe_probability("b", b));
}

double ExplosionModel::prob(int u) const {
    if (u <= 0) return 0.0;
    return 1.0 - std::pow(q(), u);
}

void ExplosionModel::validate() const {
    if (!(p > 0.0) || p > 1.0) throw domain_error(describe_probability("p", p));
}

double binom(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    if (k > n - k) k = n - k;
    double result = 1.0;
    for (int i = 1; i <= k; ++i) {
        result *= static_cast<double>(n - k + i);
        result /= static_cast<double>(i);
    }
    return result;
}

Pmf::Pmf(std::vector<double> mass) : mass_(std::move(mass)) {
    if (mass_.empty()) throw domain_error("pmf mass vector is empty");
    double total = 0.0;
    for (double v : mass_) {
        if (v < 0.0) throw domain_error("pmf entry is negative");
        total += v;
    }
    if (std::abs(total - 1.0) > kMassTolerance) {
        char buf[96];
        std::snprintf(buf, sizeof(buf), "pmf mass sums to %.17g, not 1", total);
        throw domain_error(buf);
    }
}

Pmf Pmf::point_mass(int at) {
    if (at < 0) throw domain_error("point mass location must be >= 0");
    std::vector<double> mass(static_cast<std::size_t>(at) + 1, 0.0);
    mass.back() = 1.0;
    return Pmf(std::move(mass));
}

Pmf binomial_pmf(int r, double p) {
    if (r < 0) throw domain_error("trial count must be >= 0");
    if (p < 0.0 || p > 1.0) throw domain_error(describe_probability("p", p));
    std::vector<double> mass(static_cast<std::size_t>(r) + 1, 0.0);
    for (int j = 0; j <= r; ++j) {
        mass[static_cast<std::size_t>(j)] =
            binom(r, j) * std::pow(p, j) * std::pow(1.0 - p, r - j);
    }
    return Pmf(std::move(mass));
}

Pmf convolve(const Pmf& f, const Pmf& g) {
    std::vector<double> mass(
        static_cast<std::size_t>(f.support_max() + g.support_max()) + 1, 0.0);
    for (int i = 0; i <= f.support_max(); ++i) {
        for (int j = 0; j <= g.support_max(); ++j) {
            mass[static_cast<std::size_t>(i + j)] += f(i) * g(j);
        }
    }
    return Pmf(std::move(mass));
}

Pmf minus_count_pmf(const ModelA& model) {
    model.validate();
    return convolve(binomial_pmf(model.k, 1.0 - model.a),
                    binomial_pmf(model.n - model.k, model.b));
}

JointTx::JointTx(const ModelA& model) : n_(model.n), k_(model.k) {
    model.validate();
    const Pmf p1 = binomial_pmf(k_, 1.0 - model.a);
    const Pmf p2 = binomial_pmf(n_ - k_, model.b);
    mass_.assign(static_cast<std::size_t>(k_) + 1,
                 std::vector<double>(static_cast<std::size_t>(n_) + 1, 0.0));
    for (int t = 0; t <= k_; ++t) {
        for (int x = t; x <= t + (n_ - k_); ++x) {
            mass_[static_cast<std::size_t>(t)][static_cast<std::size_t>(x)] =
                p1(t) * p2(x - t);
        }
    }
}

double JointTx::at(int t, int x) const {
    if (t < 0 || t > k_ || x < 0 || x > n_) return 0.0;
    return mass_[static_cast<std::size_t>(t)][static_cast<std::size_t>(x)];
}

Pmf JointTx::column_sums() const {
    std::vector<double> sums(static_cast<std::size_t>(n_) + 1, 0.0);
    for (int x = 0; x <= n_; ++x) {
        for (int t = 0; t <= k_; ++t) {
            sums[static_cast<std::size_t>(x)] += at(t, x);
        }
    }
    return Pmf(std::move(sums));
}

JointTx joint_tx(const ModelA& model) { return JointTx(model); }

double conditional_n1_mean(const ModelA& model, int x) {
    const JointTx joint(model);
    if (x < 0 || x > model.n) throw domain_error("x outside 0..n");
    double total = 0.0;
    double weighted = 0.0;
    for (int t = 0; t <= model.k; ++t) {
        const double s = joint.at(t, x);
        total += s;
        weighted += t * s;
    }
    if (total <= 0.0) throw domain_error("conditioning on a zero-probability minus count");
    return weighted / total;
}

}  // namespace lbt
