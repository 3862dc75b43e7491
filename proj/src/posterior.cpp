#include "lbt/posterior.hpp"

#include <cmath>

namespace lbt {

namespace {

// p_plus is treated as exactly zero (infinite ratio) below this level;
// it can only underflow to such values when 1 - b itself is zero.
bool effectively_zero(double v) { return v == 0.0; }

PosteriorRow make_row(int x, double p_minus, double p_plus) {
    PosteriorRow row;
    row.x = x;
    row.defined = true;
    row.p_minus = p_minus;
    row.p_plus = p_plus;
    if (effectively_zero(p_plus)) {
        row.ratio_infinite = true;
        row.ratio = 0.0;
    } else {
        row.ratio = p_minus / p_plus;
    }
    return row;
}

}  // namespace

const PosteriorRow& PosteriorTable::at(int x) const {
    if (x < 1 || x > model.n - 1) throw domain_error("posterior row requires 0 < x < n");
    return rows[static_cast<std::size_t>(x - 1)];
}

double quality_c(double a, double b) {
    if (a < 0.0 || a >= 1.0 || b < 0.0 || b >= 1.0) {
        throw domain_error("quality scalar needs a and b in [0, 1)");
    }
    return (a / (1.0 - a)) * (b / (1.0 - b));
}

PosteriorTable posterior_from_reduced_pmf(const ModelA& model) {
    model.validate();
    const int n = model.n;
    const int k = model.k;
    const Pmf g = minus_count_pmf(model);
    const Pmf g_reduced =
        convolve(binomial_pmf(k, 1.0 - model.a), binomial_pmf(n - 1 - k, model.b));

    PosteriorTable table;
    table.model = model;
    table.rows.reserve(static_cast<std::size_t>(n - 1));
    for (int x = 1; x < n; ++x) {
        if (g(x) <= 0.0) {
            PosteriorRow row;
            row.x = x;
            table.rows.push_back(row);
            continue;
        }
        const double p_minus =
            (static_cast<double>(n - k) / x) * model.b * g_reduced(x - 1) / g(x);
        const double p_plus =
            (static_cast<double>(n - k) / (n - x)) * (1.0 - model.b) * g_reduced(x) / g(x);
        table.rows.push_back(make_row(x, p_minus, p_plus));
    }
    return table;
}

PosteriorTable posterior_from_conditional_mean(const ModelA& model) {
    model.validate();
    const int n = model.n;
    const int k = model.k;
    const Pmf g = minus_count_pmf(model);

    PosteriorTable table;
    table.model = model;
    table.rows.reserve(static_cast<std::size_t>(n - 1));
    for (int x = 1; x < n; ++x) {
        if (g(x) <= 0.0) {
            PosteriorRow row;
            row.x = x;
            table.rows.push_back(row);
            continue;
        }
        const double mean_n1 = conditional_n1_mean(model, x);
        const double p_minus = (x - mean_n1) / x;
        const double p_plus = (n - x - k + mean_n1) / (n - x);
        table.rows.push_back(make_row(x, p_minus, p_plus));
    }
    return table;
}

double ratio_from_quality(int n, int k, int x, double c) {
    if (n < 2 || k <= 0 || k >= n) throw domain_error("ratio needs 0 < k < n");
    if (x <= 0 || x >= n) throw domain_error("ratio is defined for 0 < x < n");
    if (!(c > 0.0)) throw domain_error("quality scalar must be positive");
    double numerator = 0.0;
    double denominator = 0.0;
    for (int i = 0; i <= k; ++i) {
        const double weight = binom(k, i) * std::pow(c, -i);
        numerator += weight * binom(n - k - 1, x - i - 1);
        denominator += weight * binom(n - k - 1, x - i);
    }
    if (denominator <= 0.0) throw domain_error("ratio series degenerates for this x");
    return (static_cast<double>(n - x) / x) * numerator / denominator;
}

double ratio_via_c(const ModelA& model, int x) {
    model.validate();
    if (model.a <= 0.0 || model.a >= 1.0 || model.b <= 0.0 || model.b >= 1.0) {
        throw domain_error("quality-scalar route needs a and b strictly inside (0, 1)");
    }
    return ratio_from_quality(model.n, model.k, x, quality_c(model.a, model.b));
}

double ratio_model_b(double a, double b, double lambda) {
    if (a < 0.0 || a > 1.0 || b < 0.0 || b > 1.0) {
        throw domain_error("a and b must lie in [0, 1]");
    }
    if (!(lambda > 0.0) || !(lambda < 1.0)) {
        throw domain_error("lambda must lie strictly inside (0, 1)");
    }
    if (b >= 1.0) throw domain_error("b = 1 makes the plus posterior degenerate");
    const double h = a + b - 1.0;
    const double denominator = b - lambda * h;
    if (denominator <= 0.0) throw domain_error("b - lambda*(a+b-1) must be positive");
    return (b / (1.0 - b)) * ((1.0 - b + lambda * h) / denominator);
}

BoxProbs marginal_probs(const ModelA& model) {
    model.validate();
    const double t = static_cast<double>(model.k) / model.n;
    BoxProbs probs;
    probs.t0 = 1.0 - t;
    probs.s0 = t * (1.0 - model.a) + (1.0 - t) * model.b;
    probs.s1 = t * model.a + (1.0 - t) * (1.0 - model.b);
    return probs;
}

}  // namespace lbt
