#include <charconv>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "lbt/exact.hpp"
#include "lbt/model.hpp"
#include "lbt/montecarlo.hpp"
#include "lbt/planner.hpp"
#include "lbt/pmf.hpp"
#include "lbt/posterior.hpp"

namespace {

using nlohmann::ordered_json;

constexpr const char* kVersion = "1.0.0";

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

double parse_real(const std::string& text, const std::string& flag) {
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        long long num = 0;
        long long den = 0;
        const char* nb = text.data();
        const char* ne = text.data() + slash;
        const char* db = text.data() + slash + 1;
        const char* de = text.data() + text.size();
        auto nr = std::from_chars(nb, ne, num);
        auto dr = std::from_chars(db, de, den);
        if (nr.ec != std::errc{} || nr.ptr != ne || dr.ec != std::errc{} || dr.ptr != de || den == 0) {
            throw usage_error(flag + ": '" + text + "' is not a valid fraction");
        }
        return static_cast<double>(num) / static_cast<double>(den);
    }
    double value = 0.0;
    const char* b = text.data();
    const char* e = text.data() + text.size();
    auto r = std::from_chars(b, e, value);
    if (r.ec != std::errc{} || r.ptr != e) {
        throw usage_error(flag + ": '" + text + "' is not a valid number");
    }
    return value;
}

std::uint64_t parse_seed(const std::string& text, const std::string& source) {
    std::uint64_t value = 0;
    const char* b = text.data();
    const char* e = text.data() + text.size();
    auto r = std::from_chars(b, e, value);
    if (r.ec != std::errc{} || r.ptr != e) {
        throw usage_error(source + ": '" + text + "' is not a valid unsigned 64-bit seed");
    }
    return value;
}

std::string fixed(double value, int precision) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, value);
    return buf;
}

std::string full(double value) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

struct CommonOpts {
    int n = 0;
    int k = 0;
    std::string a;
    std::string b;
    std::string format = "text";
    int precision = 3;
};

void add_model_options(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--n", opts.n, "number of boxes")->required();
    cmd->add_option("--k", opts.k, "number of locks")->required();
    cmd->add_option("--a", opts.a, "detector sensitivity, decimal or fraction like 7/12")->required();
    cmd->add_option("--b", opts.b, "detector specificity, decimal or fraction like 9/12")->required();
    cmd->add_option("--format", opts.format, "output format: text, csv, or json")
        ->check(CLI::IsMember({"text", "csv", "json"}));
    cmd->add_option("--precision", opts.precision, "decimal places for text output")
        ->check(CLI::Range(0, 17));
}

lbt::ModelA make_model(const CommonOpts& opts) {
    lbt::ModelA model;
    model.n = opts.n;
    model.k = opts.k;
    model.a = parse_real(opts.a, "--a");
    model.b = parse_real(opts.b, "--b");
    if (model.n < 2) throw usage_error("--n must be at least 2");
    if (model.k < 1 || model.k >= model.n) throw usage_error("--k must satisfy 0 < k < n");
    if (model.a < 0.0 || model.a > 1.0) throw usage_error("--a must lie in [0, 1]");
    if (model.b < 0.0 || model.b > 1.0) throw usage_error("--b must lie in [0, 1]");
    return model;
}

lbt::ExplosionModel make_explosion(const std::string& text) {
    lbt::ExplosionModel ex;
    ex.p = parse_real(text, "--p");
    if (!(ex.p > 0.0) || ex.p > 1.0) throw usage_error("--p must lie in (0, 1]");
    return ex;
}

ordered_json model_params(const lbt::ModelA& model, const CommonOpts& opts, const char* command) {
    ordered_json params;
    params["command"] = command;
    params["n"] = model.n;
    params["k"] = model.k;
    params["a"] = model.a;
    params["b"] = model.b;
    params["format"] = opts.format;
    params["precision"] = opts.precision;
    return params;
}

void print_warnings(const ordered_json& doc) {
    for (const auto& w : doc["warnings"]) {
        std::cerr << "warning: " << w.get<std::string>() << "\n";
    }
}

void emit_json(const ordered_json& doc) {
    std::cout << doc.dump(2) << "\n";
}

ordered_json posterior_rows_json(const lbt::PosteriorTable& table, const std::vector<int>* d_by_x) {
    ordered_json rows = ordered_json::array();
    for (const auto& row : table.rows) {
        ordered_json item;
        item["x"] = row.x;
        item["defined"] = row.defined;
        if (row.defined) {
            item["p_minus"] = row.p_minus;
            item["p_plus"] = row.p_plus;
            if (row.ratio_infinite) {
                item["ratio"] = nullptr;
                item["ratio_infinite"] = true;
            } else {
                item["ratio"] = row.ratio;
                item["ratio_infinite"] = false;
            }
        } else {
            item["p_minus"] = nullptr;
            item["p_plus"] = nullptr;
            item["ratio"] = nullptr;
            item["ratio_infinite"] = false;
        }
        if (d_by_x != nullptr) {
            if (row.defined) {
                item["d"] = (*d_by_x)[static_cast<std::size_t>(row.x)];
            } else {
                item["d"] = nullptr;
            }
        }
        rows.push_back(std::move(item));
    }
    return rows;
}

ordered_json tuple_json(const lbt::AllocationTuple& t) {
    return ordered_json{t.l_minus, t.e_minus, t.l_plus, t.e_plus};
}

ordered_json build_solve_doc(const lbt::ModelA& model, const lbt::ExplosionModel& ex, int m_max,
                             const CommonOpts& opts, const char* command) {
    const lbt::GameTables tables = lbt::solve(model, ex, m_max);
    const lbt::PosteriorTable post = lbt::posterior_from_reduced_pmf(model);
    const lbt::Pmf g = lbt::minus_count_pmf(model);

    ordered_json doc;
    doc["params"] = model_params(model, opts, command);
    doc["params"]["p"] = ex.p;
    doc["params"]["m_max"] = m_max;

    ordered_json results;
    ordered_json gj = ordered_json::array();
    for (int x = 0; x <= model.n; ++x) gj.push_back(g(x));
    results["g"] = std::move(gj);
    results["posteriors"] = posterior_rows_json(post, &tables.d);

    ordered_json vxm = ordered_json::array();
    for (int x = 0; x <= model.n; ++x) {
        ordered_json row = ordered_json::array();
        for (int m = 1; m <= m_max; ++m) {
            if (tables.row_defined[static_cast<std::size_t>(x)]) {
                row.push_back(tables.v_xm[static_cast<std::size_t>(x)][static_cast<std::size_t>(m - 1)]);
            } else {
                row.push_back(nullptr);
            }
        }
        vxm.push_back(std::move(row));
    }
    results["v_xm"] = std::move(vxm);

    ordered_json vm = ordered_json::array();
    for (int m = 1; m <= m_max; ++m) vm.push_back(tables.v_m[static_cast<std::size_t>(m - 1)]);
    results["v_m"] = std::move(vm);

    ordered_json allocs = ordered_json::array();
    for (int x = 0; x <= model.n; ++x) {
        ordered_json row;
        row["x"] = x;
        if (x == 0 || x == model.n || !tables.row_defined[static_cast<std::size_t>(x)]) {
            row["tuples"] = nullptr;
        } else {
            ordered_json ts = ordered_json::array();
            for (int m = 1; m <= m_max; ++m) {
                ts.push_back(tuple_json(tables.alloc[static_cast<std::size_t>(x)][static_cast<std::size_t>(m - 1)]));
            }
            row["tuples"] = std::move(ts);
        }
        allocs.push_back(std::move(row));
    }
    results["allocations"] = std::move(allocs);

    doc["results"] = std::move(results);
    doc["warnings"] = lbt::published_value_notes(model, ex);
    doc["version"] = kVersion;
    return doc;
}

void render_solve_text(const ordered_json& doc, std::ostream& os, int prec) {
    const auto& p = doc["params"];
    const auto& r = doc["results"];
    const int n = p["n"].get<int>();
    const int m_max = p["m_max"].get<int>();

    os << "game: n=" << n << " k=" << p["k"].get<int>() << " a=" << fixed(p["a"].get<double>(), prec)
       << " b=" << fixed(p["b"].get<double>(), prec) << " p=" << fixed(p["p"].get<double>(), prec) << "\n\n";

    os << "minus-count distribution g(x):\n";
    for (int x = 0; x <= n; ++x) {
        os << "  x=" << x << "  " << fixed(r["g"][static_cast<std::size_t>(x)].get<double>(), prec) << "\n";
    }

    os << "\nposteriors and advantage thresholds:\n";
    os << "  " << std::setw(3) << "x" << std::setw(12) << "p_minus" << std::setw(12) << "p_plus"
       << std::setw(12) << "ratio" << std::setw(5) << "d" << "\n";
    for (const auto& row : r["posteriors"]) {
        os << "  " << std::setw(3) << row["x"].get<int>();
        if (!row["defined"].get<bool>()) {
            os << std::setw(12) << "-" << std::setw(12) << "-" << std::setw(12) << "-" << std::setw(5) << "-" << "\n";
            continue;
        }
        os << std::setw(12) << fixed(row["p_minus"].get<double>(), prec)
           << std::setw(12) << fixed(row["p_plus"].get<double>(), prec);
        if (row["ratio_infinite"].get<bool>()) {
            os << std::setw(12) << "inf";
        } else {
            os << std::setw(12) << fixed(row["ratio"].get<double>(), prec);
        }
        os << std::setw(5) << row["d"].get<int>() << "\n";
    }

    os << "\nexpected boxes destroyed v(x,m):\n  " << std::setw(3) << "x";
    for (int m = 1; m <= m_max; ++m) os << std::setw(12) << ("m=" + std::to_string(m));
    os << "\n";
    for (int x = 0; x <= n; ++x) {
        os << "  " << std::setw(3) << x;
        for (int m = 1; m <= m_max; ++m) {
            const auto& cell = r["v_xm"][static_cast<std::size_t>(x)][static_cast<std::size_t>(m - 1)];
            if (cell.is_null()) {
                os << std::setw(12) << "-";
            } else {
                os << std::setw(12) << fixed(cell.get<double>(), prec);
            }
        }
        os << "\n";
    }

    os << "\ngame value v(m):\n";
    for (int m = 1; m <= m_max; ++m) {
        os << "  m=" << m << "  " << fixed(r["v_m"][static_cast<std::size_t>(m - 1)].get<double>(), prec) << "\n";
    }
}

void render_solve_csv(const ordered_json& doc, std::ostream& os) {
    const auto& p = doc["params"];
    const auto& r = doc["results"];
    const int n = p["n"].get<int>();
    const int m_max = p["m_max"].get<int>();
    os << "kind,x,m,value\n";
    for (int x = 0; x <= n; ++x) {
        os << "g," << x << ",," << full(r["g"][static_cast<std::size_t>(x)].get<double>()) << "\n";
    }
    for (int x = 0; x <= n; ++x) {
        for (int m = 1; m <= m_max; ++m) {
            const auto& cell = r["v_xm"][static_cast<std::size_t>(x)][static_cast<std::size_t>(m - 1)];
            if (cell.is_null()) continue;
            os << "v_xm," << x << "," << m << "," << full(cell.get<double>()) << "\n";
        }
    }
    for (int m = 1; m <= m_max; ++m) {
        os << "v_m,," << m << "," << full(r["v_m"][static_cast<std::size_t>(m - 1)].get<double>()) << "\n";
    }
}

int run_solve(const CommonOpts& opts, const std::string& p_text, int m_max) {
    const lbt::ModelA model = make_model(opts);
    const lbt::ExplosionModel ex = make_explosion(p_text);
    if (m_max < 0) throw usage_error("--m-max must be non-negative");
    const ordered_json doc = build_solve_doc(model, ex, m_max, opts, "solve");
    if (opts.format == "json") {
        emit_json(doc);
    } else if (opts.format == "csv") {
        render_solve_csv(doc, std::cout);
        print_warnings(doc);
    } else {
        render_solve_text(doc, std::cout, opts.precision);
        print_warnings(doc);
    }
    return 0;
}

int run_ratios(const CommonOpts& opts) {
    const lbt::ModelA model = make_model(opts);
    const lbt::PosteriorTable reduced = lbt::posterior_from_reduced_pmf(model);
    const lbt::PosteriorTable conditional = lbt::posterior_from_conditional_mean(model);

    const bool interior = model.a > 0.0 && model.a < 1.0 && model.b > 0.0 && model.b < 1.0;
    double mean_diff = 0.0;
    double quality_diff = 0.0;
    for (std::size_t i = 0; i < reduced.rows.size(); ++i) {
        const auto& lhs = reduced.rows[i];
        const auto& rhs = conditional.rows[i];
        if (!lhs.defined || !rhs.defined) continue;
        mean_diff = std::max(mean_diff, std::abs(lhs.p_minus - rhs.p_minus));
        mean_diff = std::max(mean_diff, std::abs(lhs.p_plus - rhs.p_plus));
        if (interior && !lhs.ratio_infinite && lhs.x >= 1 && lhs.x <= model.n - 1) {
            const double series = lbt::ratio_via_c(model, lhs.x);
            quality_diff = std::max(quality_diff, std::abs(lhs.ratio - series));
        }
    }

    ordered_json doc;
    doc["params"] = model_params(model, opts, "ratios");
    ordered_json results;
    if (interior) {
        results["c"] = lbt::quality_c(model.a, model.b);
    } else {
        results["c"] = nullptr;
    }
    results["rows"] = posterior_rows_json(reduced, nullptr);
    ordered_json cross;
    cross["conditional_mean_max_diff"] = mean_diff;
    if (interior) {
        cross["quality_route_max_diff"] = quality_diff;
    } else {
        cross["quality_route_max_diff"] = nullptr;
    }
    results["cross_check"] = std::move(cross);
    doc["results"] = std::move(results);
    doc["warnings"] = ordered_json::array();
    doc["version"] = kVersion;

    if (opts.format == "json") {
        emit_json(doc);
    } else if (opts.format == "csv") {
        std::cout << "x,p_minus,p_plus,ratio\n";
        for (const auto& row : doc["results"]["rows"]) {
            if (!row["defined"].get<bool>()) continue;
            std::cout << row["x"].get<int>() << "," << full(row["p_minus"].get<double>()) << ","
                      << full(row["p_plus"].get<double>()) << ",";
            if (row["ratio_infinite"].get<bool>()) {
                std::cout << "inf";
            } else {
                std::cout << full(row["ratio"].get<double>());
            }
            std::cout << "\n";
        }
        print_warnings(doc);
    } else {
        const int prec = opts.precision;
        std::cout << "posterior bomb-survival probabilities per observed minus count x:\n";
        std::cout << "  " << std::setw(3) << "x" << std::setw(12) << "p_minus" << std::setw(12) << "p_plus"
                  << std::setw(12) << "ratio" << "\n";
        for (const auto& row : doc["results"]["rows"]) {
            std::cout << "  " << std::setw(3) << row["x"].get<int>();
            if (!row["defined"].get<bool>()) {
                std::cout << std::setw(12) << "-" << std::setw(12) << "-" << std::setw(12) << "-" << "\n";
                continue;
            }
            std::cout << std::setw(12) << fixed(row["p_minus"].get<double>(), prec)
                      << std::setw(12) << fixed(row["p_plus"].get<double>(), prec);
            if (row["ratio_infinite"].get<bool>()) {
                std::cout << std::setw(12) << "inf";
            } else {
                std::cout << std::setw(12) << fixed(row["ratio"].get<double>(), prec);
            }
            std::cout << "\n";
        }
        if (!doc["results"]["c"].is_null()) {
            std::cout << "\nsignal quality c = " << fixed(doc["results"]["c"].get<double>(), prec) << "\n";
        }
        const auto& cross = doc["results"]["cross_check"];
        std::cout << "cross-check max deviation, conditional-mean route: "
                  << full(cross["conditional_mean_max_diff"].get<double>()) << "\n";
        if (!cross["quality_route_max_diff"].is_null()) {
            std::cout << "cross-check max deviation, quality-series route: "
                      << full(cross["quality_route_max_diff"].get<double>()) << "\n";
        }
        print_warnings(doc);
    }
    return 0;
}

int run_dist(const CommonOpts& opts) {
    const lbt::ModelA model = make_model(opts);
    const lbt::Pmf g = lbt::minus_count_pmf(model);

    ordered_json doc;
    doc["params"] = model_params(model, opts, "dist");
    ordered_json results;
    ordered_json gj = ordered_json::array();
    for (int x = 0; x <= model.n; ++x) gj.push_back(g(x));
    results["g"] = std::move(gj);
    double mean = 0.0;
    for (int x = 0; x <= model.n; ++x) mean += x * g(x);
    results["mean"] = mean;
    doc["results"] = std::move(results);
    doc["warnings"] = ordered_json::array();
    doc["version"] = kVersion;

    if (opts.format == "json") {
        emit_json(doc);
    } else if (opts.format == "csv") {
        std::cout << "x,probability\n";
        for (int x = 0; x <= model.n; ++x) {
            std::cout << x << "," << full(doc["results"]["g"][static_cast<std::size_t>(x)].get<double>()) << "\n";
        }
    } else {
        std::cout << "minus-count distribution g(x) for n=" << model.n << " k=" << model.k << ":\n";
        for (int x = 0; x <= model.n; ++x) {
            std::cout << "  x=" << x << "  "
                      << fixed(doc["results"]["g"][static_cast<std::size_t>(x)].get<double>(), opts.precision) << "\n";
        }
        std::cout << "mean " << fixed(doc["results"]["mean"].get<double>(), opts.precision) << "\n";
    }
    return 0;
}

int run_tables(const CommonOpts& opts, const std::string& which, const std::string& p_text, int m_max,
               bool p_given) {
    const lbt::ModelA model = make_model(opts);

    if (which == "values") {
        if (!p_given) throw usage_error("--p is required for --which values");
        const lbt::ExplosionModel ex = make_explosion(p_text);
        if (m_max < 0) throw usage_error("--m-max must be non-negative");
        const ordered_json doc = build_solve_doc(model, ex, m_max, opts, "tables");
        if (opts.format == "json") {
            emit_json(doc);
        } else if (opts.format == "csv") {
            render_solve_csv(doc, std::cout);
            print_warnings(doc);
        } else {
            render_solve_text(doc, std::cout, opts.precision);
            print_warnings(doc);
        }
        return 0;
    }

    if (which == "joint") {
        const lbt::JointTx joint = lbt::joint_tx(model);
        ordered_json doc;
        doc["params"] = model_params(model, opts, "tables");
        doc["params"]["which"] = which;
        ordered_json results;
        results["t_max"] = joint.t_max();
        results["x_max"] = joint.x_max();
        ordered_json grid = ordered_json::array();
        for (int t = 0; t <= joint.t_max(); ++t) {
            ordered_json row = ordered_json::array();
            for (int x = 0; x <= joint.x_max(); ++x) row.push_back(joint.at(t, x));
            grid.push_back(std::move(row));
        }
        results["s"] = std::move(grid);
        const lbt::Pmf g = joint.column_sums();
        ordered_json sums = ordered_json::array();
        for (int x = 0; x <= joint.x_max(); ++x) sums.push_back(g(x));
        results["column_sums"] = std::move(sums);
        doc["results"] = std::move(results);
        doc["warnings"] = ordered_json::array();
        doc["version"] = kVersion;

        if (opts.format == "json") {
            emit_json(doc);
        } else if (opts.format == "csv") {
            std::cout << "kind,t,x,value\n";
            for (int t = 0; t <= joint.t_max(); ++t) {
                for (int x = 0; x <= joint.x_max(); ++x) {
                    std::cout << "s," << t << "," << x << ","
                              << full(doc["results"]["s"][static_cast<std::size_t>(t)][static_cast<std::size_t>(x)]
                                          .get<double>())
                              << "\n";
                }
            }
            for (int x = 0; x <= joint.x_max(); ++x) {
                std::cout << "g,," << x << ","
                          << full(doc["results"]["column_sums"][static_cast<std::size_t>(x)].get<double>()) << "\n";
            }
        } else {
            std::cout << "joint distribution s(t,x) of locked minuses t and total minuses x:\n  " << std::setw(3)
                      << "t";
            for (int x = 0; x <= joint.x_max(); ++x) std::cout << std::setw(12) << ("x=" + std::to_string(x));
            std::cout << "\n";
            for (int t = 0; t <= joint.t_max(); ++t) {
                std::cout << "  " << std::setw(3) << t;
                for (int x = 0; x <= joint.x_max(); ++x) {
                    std::cout << std::setw(12)
                              << fixed(doc["results"]["s"][static_cast<std::size_t>(t)][static_cast<std::size_t>(x)]
                                           .get<double>(),
                                       opts.precision);
                }
                std::cout << "\n";
            }
            std::cout << "  sum";
            for (int x = 0; x <= joint.x_max(); ++x) {
                std::cout << std::setw(12)
                          << fixed(doc["results"]["column_sums"][static_cast<std::size_t>(x)].get<double>(),
                                   opts.precision);
            }
            std::cout << "\n";
        }
        return 0;
    }

    if (which == "likelihood") {
        if (model.n > 8) {
            throw lbt::guard_error("likelihood table is limited to n <= 8; rerun with a smaller n");
        }
        const auto configs = lbt::enumerate_lock_configs(model.n, model.k);
        const auto signals = lbt::enumerate_signals(model.n);
        const lbt::Prior prior = lbt::uniform_prior(configs.size());

        ordered_json doc;
        doc["params"] = model_params(model, opts, "tables");
        doc["params"]["which"] = which;
        ordered_json results;
        ordered_json config_names = ordered_json::array();
        for (const auto& gamma : configs) config_names.push_back(gamma.to_string());
        ordered_json signal_names = ordered_json::array();
        for (const auto& s : signals) signal_names.push_back(s.to_string());
        ordered_json grid = ordered_json::array();
        for (const auto& gamma : configs) {
            ordered_json row = ordered_json::array();
            for (const auto& s : signals) row.push_back(lbt::likelihood(gamma, s, model.a, model.b));
            grid.push_back(std::move(row));
        }
        ordered_json sp = ordered_json::array();
        for (const auto& s : signals) sp.push_back(lbt::signal_prob(prior, configs, s, model.a, model.b));
        results["configs"] = std::move(config_names);
        results["signals"] = std::move(signal_names);
        results["likelihood"] = std::move(grid);
        results["signal_prob_uniform"] = std::move(sp);
        doc["results"] = std::move(results);
        doc["warnings"] = ordered_json::array();
        doc["version"] = kVersion;

        if (opts.format == "json") {
            emit_json(doc);
        } else if (opts.format == "csv") {
            std::cout << "config,signal,likelihood\n";
            for (std::size_t i = 0; i < configs.size(); ++i) {
                for (std::size_t j = 0; j < signals.size(); ++j) {
                    std::cout << configs[i].to_string() << "," << signals[j].to_string() << ","
                              << full(doc["results"]["likelihood"][i][j].get<double>()) << "\n";
                }
            }
        } else {
            std::cout << "likelihood P(signal | lock config) for n=" << model.n << " k=" << model.k << ":\n  "
                      << std::setw(10) << "config";
            for (const auto& s : signals) std::cout << std::setw(10) << s.to_string();
            std::cout << "\n";
            for (std::size_t i = 0; i < configs.size(); ++i) {
                std::cout << "  " << std::setw(10) << configs[i].to_string();
                for (std::size_t j = 0; j < signals.size(); ++j) {
                    std::cout << std::setw(10) << fixed(doc["results"]["likelihood"][i][j].get<double>(), opts.precision);
                }
                std::cout << "\n";
            }
        }
        return 0;
    }

    throw usage_error("--which must be one of likelihood, joint, values");
}

int run_oracle(const CommonOpts& opts, const std::string& p_text, int x, int m) {
    const lbt::ModelA model = make_model(opts);
    const lbt::ExplosionModel ex = make_explosion(p_text);
    if (m < 1) throw usage_error("--m must be at least 1");
    if (x < 1 || x > model.n - 1) throw usage_error("--x must satisfy 0 < x < n");

    const lbt::PosteriorTable post = lbt::posterior_from_reduced_pmf(model);
    const lbt::PosteriorRow& row = post.at(x);
    if (!row.defined) {
        throw lbt::domain_error("minus count x has zero probability under this model");
    }
    const lbt::InteriorValue planner = lbt::value_interior(row, ex, model.n, x, m);
    const lbt::OracleResult oracle = lbt::oracle_best_allocation(row, ex, model.n, x, m);

    const double gap = std::abs(planner.value - oracle.max_value);
    const bool value_agrees = gap <= 1e-10;

    std::vector<int> duap_minus(static_cast<std::size_t>(x), planner.alloc.l_minus);
    for (int i = 0; i < planner.alloc.e_minus; ++i) duap_minus[static_cast<std::size_t>(i)] += 1;
    std::vector<int> duap_plus(static_cast<std::size_t>(model.n - x), planner.alloc.l_plus);
    for (int i = 0; i < planner.alloc.e_plus; ++i) duap_plus[static_cast<std::size_t>(i)] += 1;
    bool in_argmax = false;
    for (const auto& best : oracle.argmax) {
        auto sm = best.minus_bombs;
        auto sp = best.plus_bombs;
        std::sort(sm.rbegin(), sm.rend());
        std::sort(sp.rbegin(), sp.rend());
        if (sm == duap_minus && sp == duap_plus) {
            in_argmax = true;
            break;
        }
    }

    ordered_json doc;
    doc["params"] = model_params(model, opts, "oracle");
    doc["params"]["p"] = ex.p;
    doc["params"]["x"] = x;
    doc["params"]["m"] = m;
    ordered_json results;
    results["d"] = planner.d;
    results["planner_value"] = planner.value;
    results["planner_alloc"] = tuple_json(planner.alloc);
    results["oracle_max"] = oracle.max_value;
    ordered_json argmax = ordered_json::array();
    for (const auto& best : oracle.argmax) {
        ordered_json item;
        item["minus_bombs"] = best.minus_bombs;
        item["plus_bombs"] = best.plus_bombs;
        argmax.push_back(std::move(item));
    }
    results["argmax"] = std::move(argmax);
    results["value_gap"] = gap;
    results["value_agrees"] = value_agrees;
    results["planner_in_argmax"] = in_argmax;
    doc["results"] = std::move(results);
    doc["warnings"] = ordered_json::array();
    doc["version"] = kVersion;

    if (opts.format == "json") {
        emit_json(doc);
    } else if (opts.format == "csv") {
        std::cout << "field,value\n";
        std::cout << "d," << doc["results"]["d"].get<int>() << "\n";
        std::cout << "planner_value," << full(doc["results"]["planner_value"].get<double>()) << "\n";
        std::cout << "oracle_max," << full(doc["results"]["oracle_max"].get<double>()) << "\n";
        std::cout << "value_gap," << full(doc["results"]["value_gap"].get<double>()) << "\n";
        std::cout << "value_agrees," << (value_agrees ? "true" : "false") << "\n";
        std::cout << "planner_in_argmax," << (in_argmax ? "true" : "false") << "\n";
    } else {
        const int prec = opts.precision;
        std::cout << "bomb placement check at x=" << x << " with m=" << m << ":\n";
        std::cout << "  advantage threshold d = " << planner.d << "\n";
        std::cout << "  planner value  " << fixed(planner.value, prec) << "  tuple (l-,e-,l+,e+) = ("
                  << planner.alloc.l_minus << "," << planner.alloc.e_minus << "," << planner.alloc.l_plus << ","
                  << planner.alloc.e_plus << ")\n";
        std::cout << "  oracle maximum " << fixed(oracle.max_value, prec) << " over all placements ("
                  << oracle.argmax.size() << " maximizer" << (oracle.argmax.size() == 1 ? "" : "s") << ")\n";
        std::cout << "  value gap " << full(gap) << (value_agrees ? " (agrees)" : " (DISAGREES)") << "\n";
        std::cout << "  planner placement " << (in_argmax ? "is" : "is NOT") << " among the maximizers\n";
    }
    return 0;
}

int run_simulate(const CommonOpts& opts, const std::string& p_text, int m, long long trials,
                 const std::string& seed_text, bool seed_given) {
    const lbt::ModelA model = make_model(opts);
    const lbt::ExplosionModel ex = make_explosion(p_text);
    if (m < 0) throw usage_error("--m must be non-negative");
    if (trials < 1) throw usage_error("--trials must be at least 1");

    std::uint64_t seed = 0;
    std::string seed_source = "default";
    if (seed_given) {
        seed = parse_seed(seed_text, "--seed");
        seed_source = "--seed";
    } else if (const char* env = std::getenv("LBT_SEED")) {
        seed = parse_seed(env, "LBT_SEED");
        seed_source = "LBT_SEED";
    }

    lbt::SimConfig config;
    config.model = model;
    config.explosion = ex;
    config.m = m;
    config.trials = trials;
    config.seed = seed;
    const lbt::SimResult sim = lbt::simulate(config);

    double analytic = 0.0;
    std::vector<double> analytic_x(static_cast<std::size_t>(model.n) + 1, 0.0);
    std::vector<bool> analytic_defined(static_cast<std::size_t>(model.n) + 1, false);
    if (m >= 1) {
        const lbt::GameTables tables = lbt::solve(model, ex, m);
        analytic = tables.v_m[static_cast<std::size_t>(m - 1)];
        for (int x = 0; x <= model.n; ++x) {
            if (tables.row_defined[static_cast<std::size_t>(x)]) {
                analytic_x[static_cast<std::size_t>(x)] =
                    tables.v_xm[static_cast<std::size_t>(x)][static_cast<std::size_t>(m - 1)];
                analytic_defined[static_cast<std::size_t>(x)] = true;
            }
        }
    }

    ordered_json doc;
    doc["params"] = model_params(model, opts, "simulate");
    doc["params"]["p"] = ex.p;
    doc["params"]["m"] = m;
    doc["params"]["trials"] = trials;
    doc["params"]["seed"] = std::to_string(seed);
    doc["params"]["seed_source"] = seed_source;
    ordered_json results;
    results["stream_rule_version"] = lbt::stream_rule_version;
    results["mean_destroyed"] = sim.mean_destroyed;
    results["std_error"] = sim.std_error;
    if (m >= 1) {
        results["analytic_v_m"] = analytic;
        results["z"] = sim.std_error > 0.0 ? (sim.mean_destroyed - analytic) / sim.std_error : 0.0;
    } else {
        results["analytic_v_m"] = nullptr;
        results["z"] = nullptr;
    }
    ordered_json per_x = ordered_json::array();
    for (int x = 0; x <= model.n; ++x) {
        ordered_json item;
        item["x"] = x;
        item["trials"] = sim.trials_per_x[static_cast<std::size_t>(x)];
        item["mean"] = sim.per_x_mean[static_cast<std::size_t>(x)];
        item["std_error"] = sim.per_x_std_error[static_cast<std::size_t>(x)];
        if (analytic_defined[static_cast<std::size_t>(x)]) {
            item["analytic"] = analytic_x[static_cast<std::size_t>(x)];
        } else {
            item["analytic"] = nullptr;
        }
        per_x.push_back(std::move(item));
    }
    results["per_x"] = std::move(per_x);
    doc["results"] = std::move(results);
    doc["warnings"] = lbt::published_value_notes(model, ex);
    doc["version"] = kVersion;

    if (opts.format == "json") {
        emit_json(doc);
    } else if (opts.format == "csv") {
        std::cout << "x,trials,mean,std_error,analytic\n";
        for (const auto& item : doc["results"]["per_x"]) {
            std::cout << item["x"].get<int>() << "," << item["trials"].get<long long>() << ","
                      << full(item["mean"].get<double>()) << "," << full(item["std_error"].get<double>()) << ",";
            if (item["analytic"].is_null()) {
                std::cout << "";
            } else {
                std::cout << full(item["analytic"].get<double>());
            }
            std::cout << "\n";
        }
        std::cout << "all," << trials << "," << full(sim.mean_destroyed) << "," << full(sim.std_error) << ",";
        if (m >= 1) std::cout << full(analytic);
        std::cout << "\n";
        print_warnings(doc);
    } else {
        const int prec = opts.precision;
        std::cout << "simulation: trials=" << trials << " seed=" << seed << " (" << seed_source
                  << ") stream rule v" << lbt::stream_rule_version << "\n";
        std::cout << "  mean destroyed " << fixed(sim.mean_destroyed, prec) << "  std error "
                  << fixed(sim.std_error, prec) << "\n";
        if (m >= 1) {
            std::cout << "  analytic v(m)  " << fixed(analytic, prec) << "  z "
                      << fixed(doc["results"]["z"].get<double>(), prec) << "\n";
        }
        std::cout << "  per minus count:\n";
        std::cout << "  " << std::setw(3) << "x" << std::setw(12) << "trials" << std::setw(12) << "mean"
                  << std::setw(12) << "analytic" << "\n";
        for (const auto& item : doc["results"]["per_x"]) {
            std::cout << "  " << std::setw(3) << item["x"].get<int>() << std::setw(12)
                      << item["trials"].get<long long>() << std::setw(12) << fixed(item["mean"].get<double>(), prec);
            if (item["analytic"].is_null()) {
                std::cout << std::setw(12) << "-";
            } else {
                std::cout << std::setw(12) << fixed(item["analytic"].get<double>(), prec);
            }
            std::cout << "\n";
        }
        print_warnings(doc);
    }
    return 0;
}

int run_gridsearch(const CommonOpts& opts, const std::string& p_text, const std::vector<std::string>& cost_words,
                   double resolution) {
    const lbt::ModelA model = make_model(opts);
    const lbt::ExplosionModel ex = make_explosion(p_text);
    if (!(resolution > 0.0) || resolution > 1.0) throw usage_error("--resolution must lie in (0, 1]");

    std::vector<double> costs;
    if (cost_words.empty()) {
        costs.assign(static_cast<std::size_t>(model.n), 1.0);
    } else {
        for (const auto& word : cost_words) costs.push_back(parse_real(word, "--costs"));
        if (costs.size() != static_cast<std::size_t>(model.n)) {
            throw usage_error("--costs needs exactly n values");
        }
        for (double c : costs) {
            if (!(c >= 0.0)) throw usage_error("--costs values must be non-negative");
        }
    }

    const lbt::GridSearchResult result =
        lbt::gridsearch_prior(model.n, model.k, model.a, model.b, ex.p, costs, resolution);

    ordered_json doc;
    doc["params"] = model_params(model, opts, "gridsearch");
    doc["params"]["p"] = ex.p;
    doc["params"]["resolution"] = resolution;
    doc["params"]["costs"] = costs;
    ordered_json results;
    results["min_value"] = result.min_value;
    results["evaluations"] = result.evaluations;
    ordered_json argmin = ordered_json::array();
    for (const auto& weights : result.argmin) argmin.push_back(weights);
    results["argmin"] = std::move(argmin);
    ordered_json config_names = ordered_json::array();
    for (const auto& gamma : lbt::enumerate_lock_configs(model.n, model.k)) {
        config_names.push_back(gamma.to_string());
    }
    results["configs"] = std::move(config_names);
    doc["results"] = std::move(results);
    doc["warnings"] = ordered_json::array();
    doc["version"] = kVersion;

    if (opts.format == "json") {
        emit_json(doc);
    } else if (opts.format == "csv") {
        const std::size_t dim = doc["results"]["configs"].size();
        for (std::size_t i = 0; i < dim; ++i) std::cout << (i ? "," : "") << "w" << i;
        std::cout << ",value\n";
        for (const auto& weights : doc["results"]["argmin"]) {
            for (std::size_t i = 0; i < weights.size(); ++i) {
                std::cout << (i ? "," : "") << full(weights[i].get<double>());
            }
            std::cout << "," << full(doc["results"]["min_value"].get<double>()) << "\n";
        }
    } else {
        const int prec = opts.precision;
        std::cout << "defender prior grid search, step " << full(resolution) << ":\n";
        std::cout << "  configs:";
        for (const auto& name : doc["results"]["configs"]) std::cout << " " << name.get<std::string>();
        std::cout << "\n";
        std::cout << "  minimum expected damage " << fixed(result.min_value, prec) << " over "
                  << result.evaluations << " grid points\n";
        std::cout << "  minimizing weights:\n";
        for (const auto& weights : doc["results"]["argmin"]) {
            std::cout << "   ";
            for (const auto& w : weights) std::cout << " " << fixed(w.get<double>(), prec);
            std::cout << "\n";
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"solver for the symmetric locks, bombs, and testing game"};
    app.require_subcommand(1);

    CommonOpts solve_opts;
    std::string solve_p;
    int solve_m_max = 1;
    CLI::App* solve = app.add_subcommand("solve", "posteriors, placements, and game values for m = 1..m-max");
    add_model_options(solve, solve_opts);
    solve->add_option("--p", solve_p, "per-bomb explosion probability")->required();
    solve->add_option("--m-max,--m", solve_m_max, "largest bomb count to solve for")->required();

    CommonOpts ratios_opts;
    CLI::App* ratios = app.add_subcommand("ratios", "posterior survival probabilities with cross-checks");
    add_model_options(ratios, ratios_opts);

    CommonOpts dist_opts;
    CLI::App* dist = app.add_subcommand("dist", "distribution of the observed minus count");
    add_model_options(dist, dist_opts);

    CommonOpts tables_opts;
    std::string tables_which;
    std::string tables_p;
    int tables_m_max = 1;
    CLI::App* tables = app.add_subcommand("tables", "likelihood, joint, or value tables");
    add_model_options(tables, tables_opts);
    tables->add_option("--which", tables_which, "table to print: likelihood, joint, or values")->required();
    CLI::Option* tables_p_opt = tables->add_option("--p", tables_p, "per-bomb explosion probability");
    tables->add_option("--m-max,--m", tables_m_max, "largest bomb count for --which values");

    CommonOpts oracle_opts;
    std::string oracle_p;
    int oracle_x = 0;
    int oracle_m = 1;
    CLI::App* oracle = app.add_subcommand("oracle", "compare the placement rule against brute force");
    add_model_options(oracle, oracle_opts);
    oracle->add_option("--p", oracle_p, "per-bomb explosion probability")->required();
    oracle->add_option("--x", oracle_x, "observed minus count")->required();
    oracle->add_option("--m", oracle_m, "bomb count")->required();

    CommonOpts sim_opts;
    std::string sim_p;
    int sim_m = 1;
    long long sim_trials = 100000;
    std::string sim_seed;
    CLI::App* simulate = app.add_subcommand("simulate", "Monte Carlo check of the analytic values");
    add_model_options(simulate, sim_opts);
    simulate->add_option("--p", sim_p, "per-bomb explosion probability")->required();
    simulate->add_option("--m", sim_m, "bomb count")->required();
    simulate->add_option("--trials", sim_trials, "number of simulated games");
    CLI::Option* sim_seed_opt = simulate->add_option("--seed", sim_seed, "stream seed; LBT_SEED is used when absent");

    CommonOpts grid_opts;
    std::string grid_p;
    std::vector<std::string> grid_costs;
    double grid_resolution = 0.001;
    CLI::App* gridsearch = app.add_subcommand("gridsearch", "defender prior search on a simplex grid");
    add_model_options(gridsearch, grid_opts);
    gridsearch->add_option("--p", grid_p, "per-bomb explosion probability")->required();
    gridsearch->add_option("--costs", grid_costs, "box values, n comma-separated numbers")->delimiter(',');
    gridsearch->add_option("--resolution", grid_resolution, "simplex grid step");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (solve->parsed()) return run_solve(solve_opts, solve_p, solve_m_max);
        if (ratios->parsed()) return run_ratios(ratios_opts);
        if (dist->parsed()) return run_dist(dist_opts);
        if (tables->parsed()) {
            return run_tables(tables_opts, tables_which, tables_p, tables_m_max, tables_p_opt->count() > 0);
        }
        if (oracle->parsed()) return run_oracle(oracle_opts, oracle_p, oracle_x, oracle_m);
        if (simulate->parsed()) {
            return run_simulate(sim_opts, sim_p, sim_m, sim_trials, sim_seed, sim_seed_opt->count() > 0);
        }
        if (gridsearch->parsed()) {
            return run_gridsearch(grid_opts, grid_p, grid_costs, grid_resolution);
        }
        std::cerr << "error: no subcommand selected\n";
        return 1;
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const lbt::guard_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const lbt::unsupported_regime& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const lbt::domain_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
