#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <string>
#include <vector>

#include "lbt/planner.hpp"

namespace {

lbt::ModelA model_a(int n, int k, double a, double b) {
    lbt::ModelA m;
    m.n = n;
    m.k = k;
    m.a = a;
    m.b = b;
    return m;
}

lbt::ExplosionModel explosion(double p) {
    lbt::ExplosionModel ex;
    ex.p = p;
    return ex;
}

lbt::AllocationTuple tuple(int lm, int em, int lp, int ep) {
    lbt::AllocationTuple t;
    t.l_minus = lm;
    t.e_minus = em;
    t.l_plus = lp;
    t.e_plus = ep;
    return t;
}

const double kA = 7.0 / 12.0;
const double kB = 9.0 / 12.0;

std::vector<int> expand(int count, int layers, int extras) {
    std::vector<int> bombs(static_cast<std::size_t>(count), layers);
    for (int i = 0; i < extras; ++i) bombs[static_cast<std::size_t>(i)] += 1;
    return bombs;
}

}  // namespace

TEST_CASE("advantage threshold") {
    const lbt::ExplosionModel ex = explosion(0.6);
    CHECK(lbt::threshold_d(4.2, ex) == 2);
    CHECK(lbt::threshold_d(13.0 / 5.0, ex) == 2);
    CHECK(lbt::threshold_d(21.0 / 13.0, ex) == 1);
    CHECK(lbt::threshold_d(1.0001, ex) == 1);

    // Strict inequality: at ratio * q^i = 1 the scan keeps going.
    CHECK(lbt::threshold_d(2.5, explosion(0.6)) == 2);
    CHECK(lbt::threshold_d(6.25, explosion(0.6)) == 3);

    // A certain explosion ends the advantage immediately.
    CHECK(lbt::threshold_d(1000.0, explosion(1.0)) == 1);

    CHECK_THROWS_AS(lbt::threshold_d(1.0, ex), lbt::domain_error);
    CHECK_THROWS_AS(lbt::threshold_d(0.5, ex), lbt::domain_error);

    // Vanishing explosion probability pushes the threshold out of range.
    CHECK_THROWS_AS(lbt::threshold_d(2.0, explosion(1e-12)), lbt::guard_error);

    lbt::PosteriorRow row;
    row.defined = true;
    row.ratio_infinite = true;
    CHECK(lbt::threshold_d(row, ex, 9) == 9);
    row.defined = false;
    CHECK_THROWS_AS(lbt::threshold_d(row, ex, 9), lbt::domain_error);
}

TEST_CASE("fill and switch order") {
    // Two boxes, one minus: depth 2 fills the minus box twice, then the
    // plus box once, then back.
    CHECK(lbt::allocate_duap(2, 1, 1, 2) == tuple(1, 0, 0, 0));
    CHECK(lbt::allocate_duap(2, 1, 2, 2) == tuple(2, 0, 0, 0));
    CHECK(lbt::allocate_duap(2, 1, 3, 2) == tuple(2, 0, 1, 0));
    CHECK(lbt::allocate_duap(2, 1, 4, 2) == tuple(3, 0, 1, 0));
    CHECK(lbt::allocate_duap(2, 1, 5, 2) == tuple(3, 0, 2, 0));

    // Partial fills produce extras, never both signs at once.
    CHECK(lbt::allocate_duap(7, 6, 5, 2) == tuple(0, 5, 0, 0));
    CHECK(lbt::allocate_duap(7, 2, 15, 1) == tuple(2, 1, 2, 0));
    CHECK(lbt::allocate_duap(7, 6, 15, 2) == tuple(2, 2, 1, 0));
    CHECK(lbt::allocate_duap(5, 2, 0, 1) == tuple(0, 0, 0, 0));

    CHECK_THROWS_AS(lbt::allocate_duap(5, 0, 3, 1), lbt::domain_error);
    CHECK_THROWS_AS(lbt::allocate_duap(5, 5, 3, 1), lbt::domain_error);
    CHECK_THROWS_AS(lbt::allocate_duap(5, 2, -1, 1), lbt::domain_error);
    CHECK_THROWS_AS(lbt::allocate_duap(5, 2, 3, 0), lbt::domain_error);
}

TEST_CASE("allocation bookkeeping on a sweep") {
    for (int n = 2; n <= 7; ++n) {
        for (int x = 1; x < n; ++x) {
            for (int d = 1; d <= 3; ++d) {
                for (int m = 0; m <= 20; ++m) {
                    const lbt::AllocationTuple t = lbt::allocate_duap(n, x, m, d);
                    CHECK(t.total(n, x) == m);
                    CHECK(t.l_minus >= 0);
                    CHECK(t.l_plus >= 0);
                    CHECK(t.e_minus >= 0);
                    CHECK(t.e_plus >= 0);
                    CHECK(t.e_minus < std::max(1, x));
                    CHECK(t.e_plus < std::max(1, n - x));
                    CHECK(t.e_minus * t.e_plus == 0);
                    // Until the first switch the minus boxes stay within depth d.
                    if (t.l_plus == 0 && t.e_plus == 0) {
                        CHECK(t.l_minus + (t.e_minus > 0 ? 1 : 0) <= d);
                    }
                }
            }
        }
    }
}

TEST_CASE("boundary value") {
    const lbt::ModelA model = model_a(2, 1, kA, kB);
    const lbt::ExplosionModel ex = explosion(0.6);
    const std::vector<double> expected = {0.3, 0.6, 0.72, 0.84, 0.888};
    for (int m = 1; m <= 5; ++m) {
        CHECK(lbt::value_boundary(model, ex, m) ==
              doctest::Approx(expected[static_cast<std::size_t>(m - 1)]).epsilon(1e-12));
    }
    CHECK(lbt::value_boundary(model, ex, 0) == 0.0);
}

TEST_CASE("interior value fixture, two boxes") {
    const lbt::ModelA model = model_a(2, 1, kA, kB);
    const lbt::ExplosionModel ex = explosion(0.6);
    const lbt::PosteriorRow row = lbt::posterior_from_reduced_pmf(model).at(1);
    const std::vector<double> expected = {63.0 / 130.0, 441.0 / 650.0, 258.0 / 325.0,
                                          1416.0 / 1625.0, 1491.0 / 1625.0};
    const std::vector<lbt::AllocationTuple> tuples = {tuple(1, 0, 0, 0), tuple(2, 0, 0, 0),
                                                      tuple(2, 0, 1, 0), tuple(3, 0, 1, 0),
                                                      tuple(3, 0, 2, 0)};
    for (int m = 1; m <= 5; ++m) {
        const lbt::InteriorValue v = lbt::value_interior(row, ex, 2, 1, m);
        CHECK(v.value == doctest::Approx(expected[static_cast<std::size_t>(m - 1)]).epsilon(1e-12));
        CHECK(v.alloc == tuples[static_cast<std::size_t>(m - 1)]);
        CHECK(v.d == 2);
    }
}

TEST_CASE("interior value fixture, seven boxes") {
    const lbt::ModelA model = model_a(7, 3, kA, kB);
    const lbt::ExplosionModel ex = explosion(0.6);
    const lbt::PosteriorTable table = lbt::posterior_from_reduced_pmf(model);

    const std::vector<double> v5 = {1.7696969696969698, 1.8349962321024869, 1.9100085378612057,
                                    1.9895863896126644, 2.0575192096597146, 1.8795180722891567};
    const std::vector<lbt::AllocationTuple> t5 = {tuple(1, 0, 0, 4), tuple(1, 0, 0, 3),
                                                  tuple(1, 0, 0, 2), tuple(1, 0, 0, 1),
                                                  tuple(1, 0, 0, 0), tuple(0, 5, 0, 0)};
    const std::vector<double> v15 = {3.4414545454545453, 3.4389992464204973, 3.4357342440385286,
                                     3.43137518337676, 3.4258406147091107, 3.422457831325301};
    const std::vector<lbt::AllocationTuple> t15 = {tuple(3, 0, 2, 0), tuple(2, 1, 2, 0),
                                                   tuple(2, 1, 2, 0), tuple(2, 1, 2, 0),
                                                   tuple(2, 1, 2, 0), tuple(2, 2, 1, 0)};
    for (int x = 1; x <= 6; ++x) {
        const lbt::InteriorValue a = lbt::value_interior(table.at(x), ex, 7, x, 5);
        CHECK(a.value == doctest::Approx(v5[static_cast<std::size_t>(x - 1)]).epsilon(1e-12));
        CHECK(a.alloc == t5[static_cast<std::size_t>(x - 1)]);
        const lbt::InteriorValue b = lbt::value_interior(table.at(x), ex, 7, x, 15);
        CHECK(b.value == doctest::Approx(v15[static_cast<std::size_t>(x - 1)]).epsilon(1e-12));
        CHECK(b.alloc == t15[static_cast<std::size_t>(x - 1)]);
    }
}

TEST_CASE("full solve, two boxes") {
    const lbt::GameTables tables = lbt::solve(model_a(2, 1, kA, kB), explosion(0.6), 5);
    const std::vector<double> vm = {0.4, 0.6425, 0.76, 0.857, 0.904};
    for (int m = 1; m <= 5; ++m) {
        CHECK(tables.v_m[static_cast<std::size_t>(m - 1)] ==
              doctest::Approx(vm[static_cast<std::size_t>(m - 1)]).epsilon(1e-12));
    }
    CHECK(tables.d[1] == 2);
}

TEST_CASE("full solve, seven boxes") {
    const lbt::GameTables tables = lbt::solve(model_a(7, 3, kA, kB), explosion(0.6), 15);
    CHECK(tables.v_m[4] == doctest::Approx(1.9609089781746032).epsilon(1e-12));
    CHECK(tables.v_m[14] == doctest::Approx(3.4297265004960317).epsilon(1e-12));
    const std::vector<int> d = {1, 1, 1, 1, 1, 2};
    for (int x = 1; x <= 6; ++x) {
        CHECK(tables.d[static_cast<std::size_t>(x)] == d[static_cast<std::size_t>(x - 1)]);
    }
}

TEST_CASE("averaging, monotonicity, and boundary symmetry") {
    for (const auto& model : {model_a(2, 1, kA, kB), model_a(4, 2, 0.7, 0.6), model_a(5, 3, 0.8, 0.55),
                              model_a(6, 1, 0.6, 0.85)}) {
        for (double p : {0.35, 0.8}) {
            const lbt::GameTables tables = lbt::solve(model, explosion(p), 7);
            const lbt::Pmf g = lbt::minus_count_pmf(model);
            for (int m = 1; m <= 7; ++m) {
                const std::size_t mi = static_cast<std::size_t>(m - 1);
                double average = 0.0;
                for (int x = 0; x <= model.n; ++x) {
                    if (!tables.row_defined[static_cast<std::size_t>(x)]) continue;
                    average += g(x) * tables.v_xm[static_cast<std::size_t>(x)][mi];
                }
                CHECK(tables.v_m[mi] == doctest::Approx(average).epsilon(1e-12));
                CHECK(tables.v_xm[0][mi] == tables.v_xm[static_cast<std::size_t>(model.n)][mi]);
                if (m > 1) {
                    for (int x = 0; x <= model.n; ++x) {
                        CHECK(tables.v_xm[static_cast<std::size_t>(x)][mi] >=
                              tables.v_xm[static_cast<std::size_t>(x)][mi - 1] - 1e-12);
                    }
                }
            }
        }
    }
}

TEST_CASE("explicit allocation value") {
    const lbt::ExplosionModel ex = explosion(0.6);
    const lbt::PosteriorRow row2 = lbt::posterior_from_reduced_pmf(model_a(2, 1, kA, kB)).at(1);
    CHECK(lbt::strategy_value(row2, ex, 2, 1, {2}, {0}) ==
          doctest::Approx(441.0 / 650.0).epsilon(1e-12));
    CHECK(lbt::strategy_value(row2, ex, 2, 1, {0}, {0}) == 0.0);

    const lbt::PosteriorRow row3 = lbt::posterior_from_reduced_pmf(model_a(3, 1, kA, kB)).at(1);
    CHECK(lbt::strategy_value(row3, ex, 3, 1, {1}, {0, 0}) ==
          doctest::Approx(0.6 * 42.0 / 47.0).epsilon(1e-12));

    // Permutations within a sign group do not change the value.
    CHECK(lbt::strategy_value(row3, ex, 3, 1, {2}, {1, 3}) ==
          doctest::Approx(lbt::strategy_value(row3, ex, 3, 1, {2}, {3, 1})).epsilon(1e-15));

    CHECK_THROWS_AS(lbt::strategy_value(row3, ex, 3, 1, {1, 1}, {0}), lbt::domain_error);
    CHECK_THROWS_AS(lbt::strategy_value(row3, ex, 3, 1, {-1}, {0, 0}), lbt::domain_error);
}

TEST_CASE("one bomb moved across signs never helps") {
    const lbt::ExplosionModel ex = explosion(0.55);
    for (int n = 2; n <= 5; ++n) {
        for (int k = 1; k < n; ++k) {
            const lbt::PosteriorTable table = lbt::posterior_from_reduced_pmf(model_a(n, k, 0.7, 0.65));
            for (int x = 1; x < n; ++x) {
                for (int m = 1; m <= 6; ++m) {
                    const lbt::InteriorValue best = lbt::value_interior(table.at(x), ex, n, x, m);
                    std::vector<int> minus = expand(x, best.alloc.l_minus, best.alloc.e_minus);
                    std::vector<int> plus = expand(n - x, best.alloc.l_plus, best.alloc.e_plus);
                    const double reference = lbt::strategy_value(table.at(x), ex, n, x, minus, plus);
                    CHECK(reference == doctest::Approx(best.value).epsilon(1e-12));
                    for (std::size_t from = 0; from < minus.size(); ++from) {
                        if (minus[from] == 0) continue;
                        for (std::size_t to = 0; to < plus.size(); ++to) {
                            auto moved_minus = minus;
                            auto moved_plus = plus;
                            moved_minus[from] -= 1;
                            moved_plus[to] += 1;
                            CHECK(lbt::strategy_value(table.at(x), ex, n, x, moved_minus, moved_plus) <=
                                  reference + 1e-12);
                        }
                    }
                    for (std::size_t from = 0; from < plus.size(); ++from) {
                        if (plus[from] == 0) continue;
                        for (std::size_t to = 0; to < minus.size(); ++to) {
                            auto moved_minus = minus;
                            auto moved_plus = plus;
                            moved_plus[from] -= 1;
                            moved_minus[to] += 1;
                            CHECK(lbt::strategy_value(table.at(x), ex, n, x, moved_minus, moved_plus) <=
                                  reference + 1e-12);
                        }
                    }
                }
            }
        }
    }
}

TEST_CASE("solver rejects uninformative detectors") {
    CHECK_THROWS_AS(lbt::solve(model_a(3, 1, 0.4, 0.5), explosion(0.6), 3), lbt::unsupported_regime);
    CHECK_THROWS_AS(lbt::solve(model_a(3, 1, 0.5, 0.5), explosion(0.6), 3), lbt::unsupported_regime);
}

TEST_CASE("perfect specificity sends every bomb to a minus box") {
    const lbt::GameTables tables = lbt::solve(model_a(4, 2, 0.7, 1.0), explosion(0.6), 6);
    for (int x = 2; x <= 3; ++x) {
        CHECK(tables.row_defined[static_cast<std::size_t>(x)]);
        CHECK(tables.d[static_cast<std::size_t>(x)] == 6);
        for (int m = 1; m <= 6; ++m) {
            const lbt::AllocationTuple& t =
                tables.alloc[static_cast<std::size_t>(x)][static_cast<std::size_t>(m - 1)];
            CHECK(t.l_plus == 0);
            CHECK(t.e_plus == 0);
        }
    }
    CHECK_FALSE(tables.row_defined[1]);
}

TEST_CASE("zero bomb solve yields empty value tables") {
    const lbt::GameTables tables = lbt::solve(model_a(3, 1, kA, kB), explosion(0.6), 0);
    CHECK(tables.v_m.empty());
    CHECK(tables.v_xm[0].empty());
    CHECK(tables.m_max == 0);
}

TEST_CASE("notes flag the two recorded instances") {
    const auto two = lbt::published_value_notes(model_a(2, 1, kA, kB), explosion(0.6));
    REQUIRE(two.size() == 1);
    CHECK(two[0].find("0.600") != std::string::npos);
    CHECK(two[0].find("0.840") != std::string::npos);
    CHECK(two[0].find("0.678") != std::string::npos);
    CHECK(two[0].find("0.871") != std::string::npos);

    const auto seven = lbt::published_value_notes(model_a(7, 3, kA, kB), explosion(0.6));
    CHECK(seven.size() == 1);

    CHECK(lbt::published_value_notes(model_a(3, 1, kA, kB), explosion(0.6)).empty());
    CHECK(lbt::published_value_notes(model_a(2, 1, kA, kB), explosion(0.5)).empty());
}
