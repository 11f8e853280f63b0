// Scenario execution: JSON scenario loading and validation, built-in demo
// scenarios, seeded deterministic runs, qubit-budget accounting, and JSON
// report generation.
#pragma once

#include "qvn/network.hpp"

#include "json.hpp"

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace qvn {

// Malformed or inconsistent scenario input (CLI exit code 2).
class ScenarioError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A protocol aborted at runtime, e.g. BB84 QBER above threshold (exit 3).
class ProtocolAbort : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Scenario {
    std::string name;
    std::uint64_t seed = 1;
    int trials = 1;
    ChannelModel channel = ChannelModel::ideal();
    nlohmann::json steps;  // ordered array of operation descriptors
};

Scenario scenario_from_json_text(const std::string& text);
Scenario scenario_from_file(const std::string& path);

// Built-in demos, addressable by name (sorted by list_scenarios).
std::vector<std::string> list_scenarios();
Scenario builtin_demo(const std::string& name);

struct StepOutcome {
    std::string op;
    std::string outcome;
    int qubits = 0;
};

struct Report {
    std::string scenario;
    std::uint64_t seed = 1;
    int trials = 1;
    std::vector<StepOutcome> steps;
    std::vector<double> probabilities;
    std::vector<double> fidelities;
    std::vector<int> per_step_qubits;
    int qubit_peak = 0;
    std::map<std::string, int> budgets;  // named §-scale resource counts
    double wall_time_ms = 0.0;

    nlohmann::json to_json() const;
};

Report run_scenario(const Scenario& scenario);

// The reference table of expected resource counts checked by budget_check.
const std::map<std::string, int>& expected_budgets();

struct BudgetCheck {
    std::string key;
    int expected = 0;
    int actual = -1;  // -1: the named budget was not produced by any report
    bool pass = false;
};

std::vector<BudgetCheck> budget_check(const std::vector<Report>& reports);

// Structural validation mirroring schemas/report.schema.json.
bool validate_report_json(const nlohmann::json& report, std::string* error = nullptr);

}  // namespace qvn
