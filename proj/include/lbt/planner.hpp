#pragma once

#include <string>
#include <vector>

#include "lbt/posterior.hpp"

namespace lbt {

// Layer/remainder encoding of a fill-and-switch allocation for one (x, m):
// the x minus boxes hold l_minus complete layers plus e_minus extra bombs,
// the n-x plus boxes hold l_plus complete layers plus e_plus extras.
// Always e_minus * e_plus = 0 and the totals add up to m.
struct AllocationTuple {
    int l_minus = 0;
    int e_minus = 0;
    int l_plus = 0;
    int e_plus = 0;

    bool operator==(const AllocationTuple&) const = default;

    int total(int n, int x) const {
        return l_minus * x + e_minus + l_plus * (n - x) + e_plus;
    }
};

// Advantage threshold d = min(i >= 1 : ratio * q^i < 1): the bomb depth in
// minus boxes at which an empty plus box becomes the better target.
// Defined as 1 when p = 1. Requires ratio > 1 (throws domain_error).
int threshold_d(double ratio, const ExplosionModel& explosion);

// Same, reading the ratio from a posterior row. A row with an infinite
// ratio (perfect specificity) yields m: plus boxes never become
// attractive, so all m bombs stay in minus boxes.
int threshold_d(const PosteriorRow& row, const ExplosionModel& explosion, int m);

// Deterministic fill-and-switch order: minus boxes one-by-one to depth d,
// then a layer over the plus boxes, then another minus layer, and so on.
// Requires 0 < x < n, m >= 0, d >= 1.
AllocationTuple allocate_duap(int n, int x, int m, int d);

// Value when every box has the same sign (x = 0 or x = n): spread the
// bombs uniformly-as-possible over all n boxes. With m = n*l + e,
//   v = ((n-k)/n) [e p(l+1) + (n-e) p(l)].
double value_boundary(const ModelA& model, const ExplosionModel& explosion, int m);

struct InteriorValue {
    double value = 0.0;
    AllocationTuple alloc;
    int d = 0;
};

// Value for 0 < x < n under the d-UAP allocation:
//   v = p_minus [(x - e-) p(l-) + e- p(l- + 1)]
//     + p_plus  [(n - x - e+) p(l+) + e+ p(l+ + 1)].
// The row must be defined.
InteriorValue value_interior(const PosteriorRow& row, const ExplosionModel& explosion,
                             int n, int x, int m);

// Solved tables for m = 1..m_max. Cells for x with P(N = x) = 0 are
// stored as 0 with row_defined[x] = false; they carry no weight in v_m.
struct GameTables {
    int n = 0;
    int m_max = 0;
    std::vector<bool> row_defined;                  // x = 0..n
    std::vector<std::vector<double>> v_xm;          // [x][m-1], x = 0..n
    std::vector<double> v_m;                        // [m-1]
    std::vector<std::vector<AllocationTuple>> alloc;  // [x][m-1]; meaningful for 0 < x < n
    std::vector<int> d;  // [x], 0 < x < n; for infinite-ratio rows this is the m_max cap
};

// Full solve: posterior table, thresholds, allocations, v(x,m), and
// v(m) = sum_x P(N = x) v(x, m). Requires a + b > 1 (throws
// unsupported_regime otherwise; tests that point the wrong way are not
// handled by this planner).
GameTables solve(const ModelA& model, const ExplosionModel& explosion, int m_max);

// Expected destruction of an explicit allocation: bomb counts for the x
// minus boxes and the n-x plus boxes. Invariant under permutations within
// each group:
//   w = p_minus * sum_minus p(u_i) + p_plus * sum_plus p(u_i).
double strategy_value(const PosteriorRow& row, const ExplosionModel& explosion,
                      int n, int x,
                      const std::vector<int>& minus_bombs,
                      const std::vector<int>& plus_bombs);

// Known discrepancies between widely circulated value tables for specific
// worked instances and the brute-force-certified optima this solver
// reports. Empty for instances with no recorded note.
std::vector<std::string> published_value_notes(const ModelA& model,
                                               const ExplosionModel& explosion);

}  // namespace lbt
