// qvn: scenario runner for the quantum von Neumann architecture simulator.
#include "qvn/scenario.hpp"

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitAbort = 3;

bool log_enabled() {
    const char* level = std::getenv("QVN_LOG");
    return level != nullptr && std::string(level) != "" && std::string(level) != "0";
}

void apply_mode_override(qvn::Scenario& scenario, const std::string& mode) {
    if (mode.empty()) return;
    for (auto& step : scenario.steps)
        if (step.value("op", "") == "compose") step["mode"] = mode;
}

int execute(qvn::Scenario scenario, std::uint64_t seed_override, bool seed_set,
            int trials_override, const std::string& mode, const std::string& out_path) {
    if (seed_set) scenario.seed = seed_override;
    if (trials_override > 0) scenario.trials = trials_override;
    apply_mode_override(scenario, mode);

    qvn::Report report = qvn::run_scenario(scenario);
    if (log_enabled())
        for (const auto& step : report.steps)
            std::cerr << "[qvn] " << step.op << ": " << step.outcome << " (" << step.qubits
                      << " qubits)\n";

    const std::string text = report.to_json().dump(2);
    if (out_path.empty()) {
        std::cout << text << '\n';
    } else {
        std::ofstream out(out_path);
        if (!out) {
            std::cerr << "error: cannot write report to " << out_path << '\n';
            return kExitValidation;
        }
        out << text << '\n';
    }
    return kExitOk;
}

int run_verify() {
    std::vector<qvn::Report> reports;
    for (const std::string& name : qvn::list_scenarios()) {
        qvn::Report report = qvn::run_scenario(qvn::builtin_demo(name));
        std::string error;
        if (!qvn::validate_report_json(report.to_json(), &error)) {
            std::cerr << "report schema violation in " << name << ": " << error << '\n';
            return kExitValidation;
        }
        reports.push_back(std::move(report));
    }

    bool all_pass = true;
    for (const qvn::BudgetCheck& check : qvn::budget_check(reports)) {
        std::cout << (check.pass ? "PASS " : "FAIL ") << check.key << ": expected "
                  << check.expected << ", got " << check.actual << '\n';
        all_pass = all_pass && check.pass;
    }
    for (const qvn::Report& report : reports) {
        const bool under = report.qubit_peak < 20;
        std::cout << (under ? "PASS " : "FAIL ") << report.scenario << ": peak "
                  << report.qubit_peak << " qubits (< 20 required)\n";
        all_pass = all_pass && under;
    }
    return all_pass ? kExitOk : kExitValidation;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum von Neumann architecture simulator"};
    app.require_subcommand(1);

    std::string scenario_path, demo_name, out_path, mode;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int trials = 0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--seed", seed, "random seed (u64)")->each([&](const std::string&) {
            seed_set = true;
        });
        cmd->add_option("--out", out_path, "report output path (default: stdout)");
        cmd->add_option("--trials", trials, "number of trials")->check(CLI::PositiveNumber);
        cmd->add_option("--mode", mode, "composition mode for compose steps")
            ->check(CLI::IsMember({"postselect", "deterministic", "covariant"}));
    };

    CLI::App* run = app.add_subcommand("run", "run a scenario file");
    run->add_option("scenario", scenario_path, "scenario JSON file")->required();
    add_common(run);

    CLI::App* list = app.add_subcommand("list-scenarios", "list built-in demo scenarios");

    CLI::App* demo = app.add_subcommand("demo", "run a built-in demo scenario");
    demo->add_option("name", demo_name, "demo name (see list-scenarios)")->required();
    add_common(demo);

    CLI::App* verify =
        app.add_subcommand("verify", "run all demos and check resource budgets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (list->parsed()) {
            for (const std::string& name : qvn::list_scenarios()) std::cout << name << '\n';
            return kExitOk;
        }
        if (verify->parsed()) return run_verify();
        if (run->parsed())
            return execute(qvn::scenario_from_file(scenario_path), seed, seed_set, trials,
                           mode, out_path);
        if (demo->parsed())
            return execute(qvn::builtin_demo(demo_name), seed, seed_set, trials, mode,
                           out_path);
    } catch (const qvn::ProtocolAbort& e) {
        std::cerr << "protocol abort: " << e.what() << '\n';
        return kExitAbort;
    } catch (const qvn::ScenarioError& e) {
        std::cerr << "scenario error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitOk;
}
