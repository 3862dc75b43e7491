#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

#include "lbt/montecarlo.hpp"

namespace {

using nlohmann::json;

struct RunResult {
    int exit_code = -1;
    std::string out;
};

std::string cli_path() {
    const char* path = std::getenv("LBT_CLI");
    REQUIRE_MESSAGE(path != nullptr, "set LBT_CLI to the solver binary path");
    return path;
}

RunResult run(const std::string& args) {
    const std::string command = "'" + cli_path() + "' " + args;
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult result;
    char buffer[4096];
    std::size_t got = 0;
    while ((got = fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
        result.out.append(buffer, got);
    }
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

RunResult run_env(const std::string& env_prefix, const std::string& args) {
    const std::string command = env_prefix + " '" + cli_path() + "' " + args;
    FILE* pipe = popen(command.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult result;
    char buffer[4096];
    std::size_t got = 0;
    while ((got = fread(buffer, 1, sizeof(buffer), pipe)) > 0) {
        result.out.append(buffer, got);
    }
    const int status = pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

const std::string kModel = "--n 2 --k 1 --a 7/12 --b 9/12";

}  // namespace

TEST_CASE("solve emits a complete json document") {
    const RunResult result = run("solve " + kModel + " --p 0.6 --m-max 5 --format json 2>/dev/null");
    REQUIRE(result.exit_code == 0);
    const json doc = json::parse(result.out);
    CHECK(doc["version"] == "1.0.0");
    CHECK(doc["params"]["command"] == "solve");
    CHECK(doc["params"]["n"] == 2);
    CHECK(doc["params"]["k"] == 1);
    CHECK(doc["params"]["m_max"] == 5);
    CHECK(doc["params"]["a"].get<double>() == doctest::Approx(7.0 / 12.0).epsilon(1e-15));
    CHECK(doc["results"]["v_m"][1].get<double>() == doctest::Approx(0.6425).epsilon(1e-12));
    CHECK(doc["results"]["v_xm"][1][1].get<double>() == doctest::Approx(441.0 / 650.0).epsilon(1e-12));
    CHECK(doc["results"]["posteriors"][0]["d"] == 2);
    REQUIRE(doc["warnings"].is_array());
    CHECK(doc["warnings"].size() == 1);
}

TEST_CASE("json numbers survive a round trip") {
    for (const std::string& args :
         {"solve --n 7 --k 3 --a 7/12 --b 9/12 --p 0.6 --m-max 15 --format json",
          "ratios --n 5 --k 2 --a 0.61 --b 0.83 --format json",
          "dist --n 6 --k 2 --a 0.55 --b 0.7 --format json"}) {
        const RunResult result = run(args + " 2>/dev/null");
        REQUIRE(result.exit_code == 0);
        const json first = json::parse(result.out);
        const json second = json::parse(first.dump());
        CHECK(first == second);
    }
}

TEST_CASE("text values are the rounded json values") {
    const RunResult as_json = run("solve " + kModel + " --p 0.6 --m-max 5 --format json 2>/dev/null");
    REQUIRE(as_json.exit_code == 0);
    const json doc = json::parse(as_json.out);
    const double v2 = doc["results"]["v_m"][1].get<double>();

    char rounded3[32];
    std::snprintf(rounded3, sizeof(rounded3), "%.3f", v2);
    const RunResult text3 = run("solve " + kModel + " --p 0.6 --m-max 5 2>/dev/null");
    REQUIRE(text3.exit_code == 0);
    CHECK(text3.out.find(rounded3) != std::string::npos);

    char rounded5[32];
    std::snprintf(rounded5, sizeof(rounded5), "%.5f", v2);
    const RunResult text5 = run("solve " + kModel + " --p 0.6 --m-max 5 --precision 5 2>/dev/null");
    REQUIRE(text5.exit_code == 0);
    CHECK(text5.out.find(rounded5) != std::string::npos);
}

TEST_CASE("csv output is machine readable") {
    const RunResult as_json = run("dist --n 3 --k 1 --a 7/12 --b 9/12 --format json 2>/dev/null");
    REQUIRE(as_json.exit_code == 0);
    const json doc = json::parse(as_json.out);

    const RunResult csv = run("dist --n 3 --k 1 --a 7/12 --b 9/12 --format csv 2>/dev/null");
    REQUIRE(csv.exit_code == 0);
    std::istringstream lines(csv.out);
    std::string line;
    REQUIRE(std::getline(lines, line));
    CHECK(line == "x,probability");
    int x = 0;
    while (std::getline(lines, line)) {
        const auto comma = line.find(',');
        REQUIRE(comma != std::string::npos);
        CHECK(line.substr(0, comma) == std::to_string(x));
        CHECK(line.find(',') == line.rfind(','));
        const double value = std::strtod(line.c_str() + comma + 1, nullptr);
        CHECK(value == doc["results"]["g"][static_cast<std::size_t>(x)].get<double>());
        ++x;
    }
    CHECK(x == 4);

    const RunResult solve_csv = run("solve " + kModel + " --p 0.6 --m-max 2 --format csv 2>/dev/null");
    REQUIRE(solve_csv.exit_code == 0);
    CHECK(solve_csv.out.rfind("kind,x,m,value\n", 0) == 0);
}

TEST_CASE("fractions and decimals are interchangeable") {
    const RunResult fraction = run("ratios --n 3 --k 1 --a 7/12 --b 9/12 --format json 2>/dev/null");
    const RunResult decimal =
        run("ratios --n 3 --k 1 --a 0.58333333333333333333 --b 0.75 --format json 2>/dev/null");
    REQUIRE(fraction.exit_code == 0);
    REQUIRE(decimal.exit_code == 0);
    const json lhs = json::parse(fraction.out);
    const json rhs = json::parse(decimal.out);
    CHECK(lhs["results"] == rhs["results"]);
}

TEST_CASE("exit codes separate usage from domain errors") {
    CHECK(run("--help 2>/dev/null").exit_code == 0);
    CHECK(run("solve --help 2>/dev/null").exit_code == 0);
    CHECK(run("2>/dev/null").exit_code == 1);
    CHECK(run("frobnicate 2>/dev/null").exit_code == 1);
    CHECK(run("solve --n 2 --k 2 --a 7/12 --b 9/12 --p 0.6 --m-max 3 2>/dev/null").exit_code == 1);
    CHECK(run("solve --n 2 --k 1 --a 9/0 --b 9/12 --p 0.6 --m-max 3 2>/dev/null").exit_code == 1);
    CHECK(run("solve " + kModel + " --p 0.6 --m-max 3 --format yaml 2>/dev/null").exit_code == 1);
    CHECK(run("solve " + kModel + " --p 1.5 --m-max 3 2>/dev/null").exit_code == 1);
    CHECK(run("solve --n 2 --k 1 --a 0.3 --b 0.3 --p 0.6 --m-max 3 2>/dev/null").exit_code == 2);
    CHECK(run("tables --which likelihood --n 9 --k 3 --a 0.6 --b 0.7 2>/dev/null").exit_code == 2);
    CHECK(run("tables --which values " + kModel + " 2>/dev/null").exit_code == 1);
    CHECK(run("gridsearch --n 4 --k 2 --a 0.6 --b 0.7 --p 0.5 2>/dev/null").exit_code == 2);
    CHECK(run("oracle " + kModel + " --p 0.6 --x 2 --m 1 2>/dev/null").exit_code == 1);
}

TEST_CASE("usage errors name the offending flag") {
    const RunResult bad_k =
        run("solve --n 2 --k 2 --a 7/12 --b 9/12 --p 0.6 --m-max 3 2>&1 1>/dev/null");
    CHECK(bad_k.exit_code == 1);
    CHECK(bad_k.out.find("--k") != std::string::npos);

    const RunResult bad_fraction =
        run("solve --n 2 --k 1 --a 9/0 --b 9/12 --p 0.6 --m-max 3 2>&1 1>/dev/null");
    CHECK(bad_fraction.exit_code == 1);
    CHECK(bad_fraction.out.find("--a") != std::string::npos);
}

TEST_CASE("warnings go to stderr in text mode") {
    const RunResult result = run("solve " + kModel + " --p 0.6 --m-max 5 2>&1 1>/dev/null");
    REQUIRE(result.exit_code == 0);
    CHECK(result.out.find("warning:") != std::string::npos);
    CHECK(result.out.find("0.600") != std::string::npos);

    const RunResult stdout_only = run("solve " + kModel + " --p 0.6 --m-max 5 2>/dev/null");
    CHECK(stdout_only.out.find("warning:") == std::string::npos);
}

TEST_CASE("seed resolution order") {
    const std::string sim = "simulate --n 3 --k 1 --a 7/12 --b 9/12 --p 0.6 --m 2 --trials 5000";

    const RunResult explicit_seed = run(sim + " --seed 123 --format json 2>/dev/null");
    REQUIRE(explicit_seed.exit_code == 0);
    const json explicit_doc = json::parse(explicit_seed.out);
    CHECK(explicit_doc["params"]["seed"] == "123");
    CHECK(explicit_doc["params"]["seed_source"] == "--seed");

    const RunResult env_seed = run_env("LBT_SEED=123", sim + " --format json 2>/dev/null");
    REQUIRE(env_seed.exit_code == 0);
    const json env_doc = json::parse(env_seed.out);
    CHECK(env_doc["params"]["seed"] == "123");
    CHECK(env_doc["params"]["seed_source"] == "LBT_SEED");
    CHECK(env_doc["results"] == explicit_doc["results"]);

    const RunResult both = run_env("LBT_SEED=7", sim + " --seed 123 --format json 2>/dev/null");
    REQUIRE(both.exit_code == 0);
    CHECK(json::parse(both.out)["results"] == explicit_doc["results"]);

    const RunResult default_seed = run(sim + " --format json 2>/dev/null");
    REQUIRE(default_seed.exit_code == 0);
    CHECK(json::parse(default_seed.out)["params"]["seed"] == "0");

    CHECK(run_env("LBT_SEED=xyz", sim + " 2>/dev/null").exit_code == 1);
    const RunResult ignored_env = run_env("LBT_SEED=xyz", sim + " --seed 123 --format json 2>/dev/null");
    CHECK(ignored_env.exit_code == 0);
}

TEST_CASE("simulation through the cli matches the library") {
    const RunResult result = run(
        "simulate --n 3 --k 1 --a 7/12 --b 9/12 --p 0.6 --m 2 --trials 5000 --seed 7 --format json "
        "2>/dev/null");
    REQUIRE(result.exit_code == 0);
    const json doc = json::parse(result.out);
    CHECK(doc["results"]["stream_rule_version"] == 1);

    lbt::SimConfig config;
    config.model.n = 3;
    config.model.k = 1;
    config.model.a = 7.0 / 12.0;
    config.model.b = 9.0 / 12.0;
    config.explosion.p = 0.6;
    config.m = 2;
    config.trials = 5000;
    config.seed = 7;
    const lbt::SimResult reference = lbt::simulate(config);
    CHECK(doc["results"]["mean_destroyed"].get<double>() == reference.mean_destroyed);
    CHECK(doc["results"]["std_error"].get<double>() == reference.std_error);
}

TEST_CASE("oracle subcommand certifies the planner") {
    const RunResult result =
        run("oracle --n 4 --k 2 --a 0.7 --b 0.6 --p 0.55 --x 2 --m 4 --format json 2>/dev/null");
    REQUIRE(result.exit_code == 0);
    const json doc = json::parse(result.out);
    CHECK(doc["results"]["value_agrees"] == true);
    CHECK(doc["results"]["planner_in_argmax"] == true);
    CHECK(doc["results"]["value_gap"].get<double>() <= 1e-10);
}

TEST_CASE("gridsearch subcommand finds the uniform minimizer") {
    const RunResult result =
        run("gridsearch " + kModel + " --p 0.6 --resolution 0.001 --format json 2>/dev/null");
    REQUIRE(result.exit_code == 0);
    const json doc = json::parse(result.out);
    CHECK(doc["results"]["min_value"].get<double>() == doctest::Approx(0.4).epsilon(1e-9));
    REQUIRE(doc["results"]["argmin"].size() == 1);
    CHECK(doc["results"]["argmin"][0][0].get<double>() == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("zero bomb ceiling yields a header only value table") {
    const RunResult result =
        run("tables --which values " + kModel + " --p 0.6 --m-max 0 --format json 2>/dev/null");
    REQUIRE(result.exit_code == 0);
    const json doc = json::parse(result.out);
    CHECK(doc["results"]["v_m"].empty());
    CHECK(doc["results"]["v_xm"][0].empty());

    const RunResult csv =
        run("tables --which values " + kModel + " --p 0.6 --m-max 0 --format csv 2>/dev/null");
    REQUIRE(csv.exit_code == 0);
    CHECK(csv.out.rfind("kind,x,m,value\n", 0) == 0);
    CHECK(csv.out.find("v_m") == std::string::npos);
}

TEST_CASE("joint table fixture through the cli") {
    const RunResult result =
        run("tables --which joint --n 3 --k 1 --a 7/12 --b 9/12 --format json 2>/dev/null");
    REQUIRE(result.exit_code == 0);
    const json doc = json::parse(result.out);
    CHECK(doc["results"]["column_sums"][0].get<double>() == doctest::Approx(7.0 / 192.0).epsilon(1e-12));
    CHECK(doc["results"]["column_sums"][1].get<double>() == doctest::Approx(47.0 / 192.0).epsilon(1e-12));
    CHECK(doc["results"]["column_sums"][2].get<double>() == doctest::Approx(93.0 / 192.0).epsilon(1e-12));
    CHECK(doc["results"]["column_sums"][3].get<double>() == doctest::Approx(45.0 / 192.0).epsilon(1e-12));
    CHECK(doc["results"]["s"][1][1].get<double>() == doctest::Approx(5.0 / 192.0).epsilon(1e-12));
}

TEST_CASE("ratios cross checks stay tiny") {
    const RunResult result = run("ratios --n 7 --k 3 --a 7/12 --b 9/12 --format json 2>/dev/null");
    REQUIRE(result.exit_code == 0);
    const json doc = json::parse(result.out);
    CHECK(doc["results"]["c"].get<double>() == doctest::Approx(4.2).epsilon(1e-12));
    CHECK(doc["results"]["cross_check"]["conditional_mean_max_diff"].get<double>() <= 1e-10);
    CHECK(doc["results"]["cross_check"]["quality_route_max_diff"].get<double>() <= 1e-10);
    const RunResult csv = run("ratios --n 7 --k 3 --a 7/12 --b 9/12 --format csv 2>/dev/null");
    REQUIRE(csv.exit_code == 0);
    CHECK(csv.out.rfind("x,p_minus,p_plus,ratio\n", 0) == 0);
}
