#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qvn/scenario.hpp"

#include "json.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

using namespace qvn;
using nlohmann::json;

namespace {

#ifndef QVN_CLI_PATH
#error "QVN_CLI_PATH must be defined to the qvn binary location"
#endif

struct CliResult {
    int exit_code = -1;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    const std::string cmd = std::string(QVN_CLI_PATH) + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    CliResult r;
    std::array<char, 4096> buf;
    while (fgets(buf.data(), buf.size(), pipe)) r.output += buf.data();
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("scenario parsing validates structure with diagnostics") {
    CHECK_THROWS_AS(scenario_from_json_text("not json"), ScenarioError);
    CHECK_THROWS_AS(scenario_from_json_text(R"({"version":1,"name":"x","steps":[
        {"op":"frobnicate"}]})"),
                    ScenarioError);
    // Steps must reference defined labels.
    CHECK_THROWS_AS(scenario_from_json_text(R"({"version":1,"name":"x","steps":[
        {"op":"compose","labels":["a","b"],"mode":"deterministic"}]})"),
                    ScenarioError);
    CHECK_THROWS_AS(scenario_from_json_text(R"({"version":1,"name":"x","steps":[
        {"op":"download"}]})"),
                    ScenarioError);

    Scenario ok = scenario_from_json_text(R"({"version":1,"name":"x","seed":5,"steps":[
        {"op":"store","label":"h","gate":"H"}]})");
    CHECK(ok.name == "x");
    CHECK(ok.seed == 5);
}

TEST_CASE("built-in demos exist, sorted, and run clean") {
    auto names = list_scenarios();
    CHECK(names.size() >= 8);
    CHECK(std::is_sorted(names.begin(), names.end()));
    for (const char* required : {"compose-HT", "switch-demo", "control-unknown", "lcu-demo",
                                 "superchannel-demo", "download-ebit-qubit", "download-bb84",
                                 "verify-demo"})
        CHECK(std::find(names.begin(), names.end(), required) != names.end());

    for (const auto& name : names) {
        Report r = run_scenario(builtin_demo(name));
        CHECK(r.qubit_peak < 20);
        std::string error;
        CHECK(validate_report_json(r.to_json(), &error));
        INFO(name << ": " << error);
    }
}

TEST_CASE("budget_check reproduces the reference table") {
    std::vector<Report> reports;
    for (const auto& name : list_scenarios()) reports.push_back(run_scenario(builtin_demo(name)));
    auto checks = budget_check(reports);
    CHECK(checks.size() == expected_budgets().size());
    for (const auto& c : checks) {
        INFO(c.key << " expected " << c.expected << " got " << c.actual);
        CHECK(c.pass);
    }
    CHECK(expected_budgets().at("store-qubit-gate") == 2);
    CHECK(expected_budgets().at("store-cz") == 4);
    CHECK(expected_budgets().at("compose-two-qubit-programs") == 5);
    CHECK(expected_budgets().at("superchannel-qubit") == 6);
    CHECK(expected_budgets().at("superchannel-qubit-reduced") == 4);
    CHECK(expected_budgets().at("control-unknown-qubit") == 5);
    CHECK(expected_budgets().at("control-unknown-twoqubit") == 9);
    CHECK(expected_budgets().at("download-ebit-qubit") == 9);
    CHECK(expected_budgets().at("download-ebit-twoqubit") == 17);
}

TEST_CASE("compose-HT demo reports fidelity 1 and peak budget 5") {
    Report r = run_scenario(builtin_demo("compose-HT"));
    REQUIRE(!r.fidelities.empty());
    CHECK(r.fidelities.back() >= 1.0 - 1e-9);
    CHECK(r.qubit_peak == 5);
}

TEST_CASE("download-ebit demos hit the 9- and 17-qubit peaks") {
    CHECK(run_scenario(builtin_demo("download-ebit-qubit")).qubit_peak == 9);
    CHECK(run_scenario(builtin_demo("download-ebit-twoqubit")).qubit_peak == 17);
}

TEST_CASE("identical seeds give identical reports") {
    Scenario s = builtin_demo("compose-HT");
    json a = run_scenario(s).to_json();
    json b = run_scenario(s).to_json();
    a.erase("wall_time_ms");
    b.erase("wall_time_ms");
    CHECK(a == b);
}

TEST_CASE("cli: run executes a scenario file with exit 0") {
    const std::string path = "qvn_cli_ok.json";
    write_file(path, R"({"version":1,"name":"ok","seed":3,"steps":[
        {"op":"store","label":"h","gate":"H"},
        {"op":"store","label":"t","gate":"T"},
        {"op":"compose","labels":["h","t"],"mode":"covariant"}]})");
    CliResult r = run_cli("run " + path);
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("\"scenario\"") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("cli: malformed scenario exits 2 with diagnostics") {
    const std::string path = "qvn_cli_bad.json";
    write_file(path, R"({"version":1,"name":"bad","steps":[{"op":"nonsense"}]})");
    CliResult r = run_cli("run " + path);
    CHECK(r.exit_code == 2);
    CHECK(r.output.find("steps[0]") != std::string::npos);
    std::remove(path.c_str());

    CliResult missing = run_cli("run does_not_exist.json");
    CHECK(missing.exit_code == 2);
}

TEST_CASE("cli: protocol abort exits 3") {
    const std::string path = "qvn_cli_abort.json";
    write_file(path, R"({"version":1,"name":"abort","seed":11,
        "channel":{"kind":"eavesdropper","f":1.0},
        "steps":[{"op":"download","scheme":1,"gates":["H","T"]}]})");
    CliResult r = run_cli("run " + path);
    CHECK(r.exit_code == 3);
    CHECK(r.output.find("abort") != std::string::npos);
    std::remove(path.c_str());
}

TEST_CASE("cli: reports are deterministic for a fixed seed") {
    CliResult a = run_cli("demo compose-HT --seed 42 --out qvn_rep_a.json");
    CliResult b = run_cli("demo compose-HT --seed 42 --out qvn_rep_b.json");
    REQUIRE(a.exit_code == 0);
    REQUIRE(b.exit_code == 0);
    json ja = json::parse(read_file("qvn_rep_a.json"));
    json jb = json::parse(read_file("qvn_rep_b.json"));
    ja.erase("wall_time_ms");
    jb.erase("wall_time_ms");
    CHECK(ja == jb);
    std::string error;
    CHECK(validate_report_json(json::parse(read_file("qvn_rep_a.json")), &error));
    std::remove("qvn_rep_a.json");
    std::remove("qvn_rep_b.json");
}

TEST_CASE("cli: list-scenarios prints sorted names") {
    CliResult r = run_cli("list-scenarios");
    CHECK(r.exit_code == 0);
    std::vector<std::string> names;
    std::stringstream ss(r.output);
    std::string line;
    while (std::getline(ss, line))
        if (!line.empty()) names.push_back(line);
    CHECK(names.size() >= 8);
    CHECK(std::is_sorted(names.begin(), names.end()));
    CHECK(std::find(names.begin(), names.end(), "compose-HT") != names.end());
}

TEST_CASE("cli: unknown demo name exits 2") {
    CliResult r = run_cli("demo no-such-demo");
    CHECK(r.exit_code == 2);
}

TEST_CASE("cli: verify reports all budget checks as PASS") {
    CliResult r = run_cli("verify");
    CHECK(r.exit_code == 0);
    CHECK(r.output.find("PASS") != std::string::npos);
    CHECK(r.output.find("FAIL") == std::string::npos);
}

TEST_CASE("cli: --mode overrides compose steps") {
    CliResult r = run_cli("demo compose-HT --mode postselect --out qvn_rep_mode.json");
    CHECK(r.exit_code == 0);
    json j = json::parse(read_file("qvn_rep_mode.json"));
    CHECK(j["scenario"] == "compose-HT");
    std::remove("qvn_rep_mode.json");
}

TEST_CASE("report schema validation rejects malformed reports") {
    Report r = run_scenario(builtin_demo("compose-HT"));
    json good = r.to_json();
    std::string error;
    CHECK(validate_report_json(good, &error));

    json bad = good;
    bad.erase("qubit_budget");
    CHECK(!validate_report_json(bad, &error));
    CHECK(!error.empty());

    json wrong_type = good;
    wrong_type["seed"] = "forty-two";
    CHECK(!validate_report_json(wrong_type, &error));
}
