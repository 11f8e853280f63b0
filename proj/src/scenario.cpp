#include "qvn/scenario.hpp"

#include "qvn/gates.hpp"
#include "qvn/qcu.hpp"
#include "qvn/qpu.hpp"
#include "qvn/superchannel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace qvn {

namespace {

using nlohmann::json;

int qubit_count(int d) {
    int n = 0, p = 1;
    while (p < d) p *= 2, ++n;
    return n;
}

PureState state_from_step(const json& step, int d) {
    if (!step.contains("state") || step["state"].is_string()) {
        const std::string name = step.value("state", "plus");
        Vec v = Vec::Zero(d);
        if (name == "zero") {
            v(0) = 1.0;
        } else if (name == "plus") {
            v.setConstant(1.0 / std::sqrt(double(d)));
        } else {
            throw ScenarioError("unknown named state '" + name + "'");
        }
        return PureState(v, {d});
    }
    const json& arr = step["state"];
    if (!arr.is_array() || arr.size() != static_cast<size_t>(2 * d))
        throw ScenarioError("state must be " + std::to_string(2 * d) + " re/im numbers");
    Vec v(d);
    for (int i = 0; i < d; ++i) v(i) = cd(arr[2 * i].get<double>(), arr[2 * i + 1].get<double>());
    return PureState(v, {d});
}

ChannelModel channel_from_json(const json& j) {
    const std::string kind = j.value("kind", "ideal");
    if (kind == "ideal") return ChannelModel::ideal();
    if (kind == "depolarizing") return ChannelModel::depolarizing(j.value("p", 0.0));
    if (kind == "eavesdropper") return ChannelModel::eavesdropper(j.value("f", 0.0));
    throw ScenarioError("unknown channel kind '" + kind + "'");
}

// One eigenpair of a unitary, for flag construction in demos.
FlagSpec first_eigenpair(const Mat& u) {
    Eigen::ComplexEigenSolver<Mat> es(u);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("first_eigenpair: eigensolver failed");
    Vec v = es.eigenvectors().col(0);
    return FlagSpec{es.eigenvalues()(0), PureState(v.normalized(), {static_cast<int>(u.rows())})};
}

ProgramSlot slot_of_unitary(const Mat& m, const std::string& label) {
    Unitary u(m, label);
    return ProgramSlot{choi_of_unitary(u), u,    std::nullopt,
                       std::nullopt,       false, label,
                       2 * qubit_count(static_cast<int>(m.rows()))};
}

struct TrialContext {
    MemoryUnit mem;
    RandomSource rng;
    std::optional<DensityOperator> head;  // last injection's accept branch

    explicit TrialContext(std::uint64_t seed) : rng(seed) {}
};

void record_step(Report& report, const std::string& op, const std::string& outcome,
                 int qubits) {
    report.steps.push_back(StepOutcome{op, outcome, qubits});
    report.per_step_qubits.push_back(qubits);
    report.qubit_peak = std::max(report.qubit_peak, qubits);
}

void handle_store(const json& step, TrialContext& ctx, Report& report) {
    const std::string label = step.at("label").get<std::string>();
    const std::string gate = step.at("gate").get<std::string>();
    ProgramSlot& slot = ctx.mem.store_program(Unitary(gates::by_label(gate), gate), label);
    if (slot.head_dim() == 2) report.budgets["store-qubit-gate"] = slot.qubits_stored;
    if (gate == "CZ") report.budgets["store-cz"] = slot.qubits_stored;
    record_step(report, "store", "stored " + gate + " as '" + label + "'", slot.qubits_stored);
}

void handle_write(const json& step, TrialContext& ctx, Report& report) {
    const std::string label = step.at("label").get<std::string>();
    ProgramSlot& slot = ctx.mem.slot(label);
    const int d = slot.tail_dim();
    PureState psi = state_from_step(step, d);
    auto branches = write_inject(slot, psi);
    for (const auto& b : branches) report.probabilities.push_back(b.probability);
    if (branches[0].head) ctx.head = branches[0].head;
    record_step(report, "write", "injected into '" + label + "'",
                slot.qubits_stored + 1);
}

void handle_read(const json&, TrialContext& ctx, Report& report) {
    if (!ctx.head) throw ScenarioError("read step requires a preceding write step");
    const int d = ctx.head->dim();
    std::vector<double> probs = read_out(*ctx.head, Pvm::computational(d));
    for (double p : probs) report.probabilities.push_back(p);
    record_step(report, "read", "readout in the computational basis", qubit_count(d));
}

void handle_compose(const json& step, TrialContext& ctx, Report& report) {
    const auto labels = step.at("labels").get<std::vector<std::string>>();
    if (labels.size() != 2) throw ScenarioError("compose step takes exactly two labels");
    const std::string mode = step.value("mode", "deterministic");
    ProgramSlot& earlier = ctx.mem.slot(labels[0]);
    ProgramSlot& later = ctx.mem.slot(labels[1]);
    if (!earlier.whitebox || !later.whitebox)
        throw ScenarioError("compose demo requires white-box programs");
    Mat product = later.whitebox->matrix * earlier.whitebox->matrix;

    CompositionResult comp = [&] {
        if (mode == "deterministic") return compose_deterministic(earlier, later, ctx.rng);
        if (mode == "covariant") return compose_covariant(earlier, later, ctx.rng);
        if (mode == "postselect") return compose_postselect(earlier, later, ctx.rng);
        throw ScenarioError("unknown compose mode '" + mode + "'");
    }();

    if (comp.corrected || comp.outcome_index == 0) {
        Vec target = choi_of_unitary(Unitary(product, "target")).pure_vector();
        PureState got(comp.choi.pure_vector(), comp.choi.operator_.dims);
        report.fidelities.push_back(
            fidelity(got, PureState(target, comp.choi.operator_.dims)));
    }
    if (earlier.tail_dim() == 2 && later.tail_dim() == 2)
        report.budgets["compose-two-qubit-programs"] = comp.qubits_used;
    record_step(report, "compose",
                "outcome " + std::to_string(comp.outcome_index) +
                    (comp.corrected ? " (corrected)" : ""),
                comp.qubits_used);
}

void handle_switch(const json& step, TrialContext& ctx, Report& report) {
    const std::string label = step.at("label").get<std::string>();
    const std::string prev_gate = step.value("prev_gate", "H");
    Mat prev_m = gates::by_label(prev_gate);
    Unitary prev_u(prev_m, prev_gate);
    ChoiState prev = choi_of_unitary(prev_u);
    const Mat program_m = ctx.mem.slot(label).whitebox->matrix;

    ctx.mem.add_ebits(2);
    SwitchGadget on_gadget = switch_attach(ctx.mem, label, prev);
    CompositionResult on = switch_select(on_gadget, true, ctx.rng);
    Vec on_target = choi_of_unitary(Unitary(program_m * prev_m, "on")).pure_vector();
    report.fidelities.push_back(fidelity(PureState(on.choi.pure_vector(), {2, 2}),
                                         PureState(on_target, {2, 2})));

    ctx.mem.refresh(label);
    SwitchGadget off_gadget = switch_attach(ctx.mem, label, prev);
    CompositionResult off = switch_select(off_gadget, false, ctx.rng);
    Vec off_target = choi_of_unitary(prev_u).pure_vector();
    report.fidelities.push_back(fidelity(PureState(off.choi.pure_vector(), {2, 2}),
                                         PureState(off_target, {2, 2})));

    record_step(report, "switch", "ON and OFF paths executed",
                std::max(on.qubits_used, off.qubits_used));
}

void handle_control(const json& step, TrialContext& ctx, Report& report) {
    const std::string gate = step.at("gate").get<std::string>();
    Mat u = gates::by_label(gate);
    const int d = static_cast<int>(u.rows());
    FlagSpec flag = first_eigenpair(u);
    ControlSignal signal = ControlSignal::qubit(1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0));
    PureState data = haar_random_state(d, ctx.rng);

    ControlledResult result =
        controlled_unknown(OpaqueGate::hide(Unitary(u, gate)), flag, signal, data);

    Mat lambda = Mat::Identity(2 * d, 2 * d);
    lambda.block(d, d, d, d) = u;
    Vec c(2);
    c << signal.alpha(), signal.beta();
    Vec oracle = lambda * kron(Mat(c), Mat(data.amplitudes));
    report.fidelities.push_back(
        fidelity(result.control_data, PureState(oracle, {2, d})));
    report.probabilities.push_back(result.flag_purity);

    const std::string key = d == 2 ? "control-unknown-qubit" : "control-unknown-twoqubit";
    report.budgets[key] = result.qubits_used;
    record_step(report, "control", "controlled execution of hidden " + gate,
                result.qubits_used);
}

void handle_lcu(const json& step, TrialContext& ctx, Report& report) {
    (void)ctx;
    const double alpha = step.value("alpha", 0.6);
    const double beta = step.value("beta", 0.8);

    Vec zero(2), plus(2);
    zero << 1.0, 0.0;
    plus << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    ProgramSlot s1 = slot_of_unitary(gates::pauli_z(), "z");
    s1.flag = FlagSpec{1.0, PureState(zero, {2})};
    ProgramSlot s2 = slot_of_unitary(gates::pauli_x(), "x");
    s2.flag = FlagSpec{1.0, PureState(plus, {2})};

    PureState psi(zero, {2});
    auto branches = lcu_two(s1, s2, ControlSignal::qubit(alpha, beta), psi);

    Vec want = alpha * (gates::pauli_z() * psi.amplitudes) +
               beta * (gates::pauli_x() * psi.amplitudes);
    for (const auto& b : branches) {
        if (!b.success) continue;
        report.probabilities.push_back(b.probability);
        if (b.data)
            report.fidelities.push_back(
                fidelity(*b.data, PureState(want.normalized(), {2})));
    }
    record_step(report, "lcu", "linear combination of two hidden programs", 7);
}

void handle_superchannel(const json& step, TrialContext& ctx, Report& report) {
    const bool reduced = step.value("reduced", false);
    Superchannel s = random_superchannel(2, 2, ctx.rng);
    KrausChannel e = random_channel(2, 2, ctx.rng);
    DensityOperator rho = random_density(2, ctx.rng);

    DensityOperator via_circuit = apply_to_channel(s, e, rho);
    DensityOperator via_choi = apply_to_choi(s, choi_of_channel(e), rho);
    report.fidelities.push_back(fidelity(via_circuit, via_choi));

    const int qubits = superchannel_qubits(1, reduced);
    report.budgets[reduced ? "superchannel-qubit-reduced" : "superchannel-qubit"] = qubits;
    record_step(report, "superchannel",
                reduced ? "choi-form action, reduced ancillas" : "choi-form action", qubits);
}

void handle_download(const json& step, TrialContext& ctx, Report& report,
                     const ChannelModel& channel) {
    const int scheme = step.at("scheme").get<int>();
    if (scheme == 1 || scheme == 2) {
        auto gate_names = step.at("gates").get<std::vector<std::string>>();
        std::vector<GateInstruction> instructions;
        int width = 1;
        for (const std::string& g : gate_names) {
            const int d = static_cast<int>(gates::by_label(g).rows());
            std::vector<int> targets;
            for (int t = 0; t < qubit_count(d); ++t) targets.push_back(t);
            width = std::max(width, qubit_count(d));
            instructions.push_back(GateInstruction{g, targets});
        }
        BitsDownload result = scheme == 1
                                  ? scheme1_send_bits(instructions, width, channel, ctx.rng)
                                  : scheme2_send_bits(instructions, width, channel, ctx.rng);
        report.probabilities.push_back(result.record.qber);
        if (!result.tape)
            throw ProtocolAbort("bit download aborted: QBER " +
                                std::to_string(result.record.qber));

        Mat product = Mat::Identity(1 << width, 1 << width);
        const std::vector<int> dims(width, 2);
        for (const auto& g : instructions) {
            std::vector<int> targets(qubit_count(static_cast<int>(gates::by_label(g.label).rows())));
            for (size_t t = 0; t < targets.size(); ++t) targets[t] = static_cast<int>(t);
            product = embed(gates::by_label(g.label), targets, dims) * product;
        }
        Vec input = Vec::Zero(1 << width);
        input(0) = 1.0;
        PureState replayed = result.tape->execute(PureState(input, dims));
        report.fidelities.push_back(
            fidelity(replayed, PureState(Vec(product * input), dims)));
        record_step(report, "download",
                    "scheme " + std::to_string(scheme) + ": " +
                        std::to_string(result.record.bits_transmitted) + " bits",
                    0);
        return;
    }

    const std::string gate = step.at("gate").get<std::string>();
    Mat u = gates::by_label(gate);
    const int n = qubit_count(static_cast<int>(u.rows()));
    ProgramSlot host = slot_of_unitary(u, gate);

    if (scheme == 3) {
        ProgramDownload result = scheme3_send_qubits(host, channel, ctx.rng);
        report.fidelities.push_back(
            fidelity(result.slot->choi.operator_, host.choi.operator_));
        record_step(report, "download", "scheme 3: photons teleported into memory", 4 * n);
        return;
    }
    if (scheme == 4) {
        ProgramDownload result = scheme4_send_via_ebits(host, channel, ctx.rng);
        if (!result.slot)
            throw ProtocolAbort("ebit download aborted after " +
                                std::to_string(result.record.retries) + " retries");
        report.fidelities.push_back(
            fidelity(result.slot->choi.operator_, host.choi.operator_));
        const int qubits = ebit_download_qubits(n);
        report.budgets[n == 1 ? "download-ebit-qubit" : "download-ebit-twoqubit"] = qubits;
        record_step(report, "download",
                    "scheme 4: accepted after " + std::to_string(result.record.retries) +
                        " retries",
                    qubits);
        return;
    }
    throw ScenarioError("unknown download scheme " + std::to_string(scheme));
}

void handle_verify(const json& step, TrialContext& ctx, Report& report) {
    const std::string gate = step.value("gate", "H");
    const double epsilon = step.value("epsilon", 0.1);
    const double delta = step.value("delta", 0.05);
    Mat u = gates::by_label(gate);
    VerificationPlan plan(epsilon, delta);

    std::vector<ProgramSlot> samples;
    samples.reserve(plan.n_samples);
    for (int i = 0; i < plan.n_samples; ++i)
        samples.push_back(slot_of_unitary(u, gate + "#" + std::to_string(i)));

    VerificationResult result = verify_program(samples, plan, Unitary(u, gate), ctx.rng);
    report.probabilities.push_back(double(result.failures) / result.samples_used);
    report.fidelities.push_back(result.fidelity_bound);
    record_step(report, "verify",
                result.accepted ? "accepted (" + std::to_string(result.samples_used) + " samples)"
                                : "rejected",
                2 * qubit_count(static_cast<int>(u.rows())) + 1);
}

const std::map<std::string, std::string>& demo_texts() {
    static const std::map<std::string, std::string> demos = {
        {"compose-HT", R"({"version":1,"name":"compose-HT","seed":7,"steps":[
            {"op":"store","label":"h","gate":"H"},
            {"op":"store","label":"t","gate":"T"},
            {"op":"compose","labels":["h","t"],"mode":"deterministic"}]})"},
        {"control-unknown", R"({"version":1,"name":"control-unknown","seed":7,"steps":[
            {"op":"control","gate":"T"}]})"},
        {"control-unknown-2q", R"({"version":1,"name":"control-unknown-2q","seed":7,"steps":[
            {"op":"control","gate":"CNOT"}]})"},
        {"download-bb84", R"({"version":1,"name":"download-bb84","seed":7,"steps":[
            {"op":"download","scheme":1,"gates":["H","T"]}]})"},
        {"download-ebit-qubit", R"({"version":1,"name":"download-ebit-qubit","seed":7,"steps":[
            {"op":"download","scheme":4,"gate":"H"}]})"},
        {"download-ebit-twoqubit",
         R"({"version":1,"name":"download-ebit-twoqubit","seed":7,"steps":[
            {"op":"download","scheme":4,"gate":"CNOT"}]})"},
        {"download-qubits", R"({"version":1,"name":"download-qubits","seed":7,"steps":[
            {"op":"download","scheme":3,"gate":"H"}]})"},
        {"lcu-demo", R"({"version":1,"name":"lcu-demo","seed":7,"steps":[
            {"op":"lcu","alpha":0.6,"beta":0.8}]})"},
        {"read-write-demo", R"({"version":1,"name":"read-write-demo","seed":7,"steps":[
            {"op":"store","label":"h","gate":"H"},
            {"op":"store","label":"cz","gate":"CZ"},
            {"op":"write","label":"h","state":"plus"},
            {"op":"read"}]})"},
        {"superchannel-demo", R"({"version":1,"name":"superchannel-demo","seed":7,"steps":[
            {"op":"superchannel","reduced":false},
            {"op":"superchannel","reduced":true}]})"},
        {"switch-demo", R"({"version":1,"name":"switch-demo","seed":7,"steps":[
            {"op":"store","label":"t","gate":"T"},
            {"op":"switch","label":"t","prev_gate":"H"}]})"},
        {"verify-demo", R"({"version":1,"name":"verify-demo","seed":7,"steps":[
            {"op":"verify","gate":"H","epsilon":0.1,"delta":0.05}]})"},
    };
    return demos;
}

const std::vector<std::string> kKnownOps = {"store",  "write",        "read",
                                            "compose", "switch",       "control",
                                            "lcu",     "superchannel", "download",
                                            "verify"};

// Pre-execution validation: known ops, label references, dimension chains.
void validate_steps(const json& steps) {
    if (!steps.is_array() || steps.empty())
        throw ScenarioError("scenario requires a non-empty 'steps' array");
    std::map<std::string, int> stored;  // label -> tail dim
    int index = 0;
    for (const json& step : steps) {
        const std::string where = "steps[" + std::to_string(index++) + "]";
        if (!step.is_object() || !step.contains("op"))
            throw ScenarioError(where + ": each step must be an object with an 'op' field");
        const std::string op = step["op"].get<std::string>();
        if (std::find(kKnownOps.begin(), kKnownOps.end(), op) == kKnownOps.end())
            throw ScenarioError(where + ": unknown op '" + op + "'");

        if (op == "store") {
            if (!step.contains("label") || !step.contains("gate"))
                throw ScenarioError(where + ": store requires 'label' and 'gate'");
            const std::string gate = step["gate"].get<std::string>();
            Mat m;
            try {
                m = gates::by_label(gate);
            } catch (const std::exception& e) {
                throw ScenarioError(where + ": " + e.what());
            }
            stored[step["label"].get<std::string>()] = static_cast<int>(m.rows());
        }
        if (op == "write" || op == "switch") {
            if (!step.contains("label"))
                throw ScenarioError(where + ": '" + op + "' requires 'label'");
            if (!stored.count(step["label"].get<std::string>()))
                throw ScenarioError(where + ": label '" + step["label"].get<std::string>() +
                                    "' is not stored by an earlier step");
        }
        if (op == "compose") {
            if (!step.contains("labels"))
                throw ScenarioError(where + ": compose requires 'labels'");
            int dim = -1;
            for (const json& l : step["labels"]) {
                const std::string label = l.get<std::string>();
                if (!stored.count(label))
                    throw ScenarioError(where + ": label '" + label +
                                        "' is not stored by an earlier step");
                if (dim != -1 && stored[label] != dim)
                    throw ScenarioError(where + ": composition dimension chain mismatch");
                dim = stored[label];
            }
        }
        if (op == "download" && !step.contains("scheme"))
            throw ScenarioError(where + ": download requires 'scheme'");
    }
}

}  // namespace

Scenario scenario_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ScenarioError(std::string("scenario parse error: ") + e.what());
    }
    if (!j.is_object() || !j.contains("name") || !j.contains("steps"))
        throw ScenarioError("scenario requires 'name' and 'steps' fields");
    Scenario s;
    s.name = j["name"].get<std::string>();
    s.seed = j.value("seed", std::uint64_t{1});
    s.trials = j.value("trials", 1);
    if (s.trials < 1) throw ScenarioError("'trials' must be >= 1");
    if (j.contains("channel")) s.channel = channel_from_json(j["channel"]);
    s.steps = j["steps"];
    validate_steps(s.steps);
    return s;
}

Scenario scenario_from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return scenario_from_json_text(buf.str());
}

std::vector<std::string> list_scenarios() {
    std::vector<std::string> names;
    for (const auto& [name, text] : demo_texts()) names.push_back(name);
    std::sort(names.begin(), names.end());
    return names;
}

Scenario builtin_demo(const std::string& name) {
    auto it = demo_texts().find(name);
    if (it == demo_texts().end()) throw ScenarioError("unknown demo scenario '" + name + "'");
    return scenario_from_json_text(it->second);
}

Report run_scenario(const Scenario& scenario) {
    const auto start = std::chrono::steady_clock::now();
    Report report;
    report.scenario = scenario.name;
    report.seed = scenario.seed;
    report.trials = scenario.trials;

    for (int trial = 0; trial < scenario.trials; ++trial) {
        TrialContext ctx(scenario.seed + static_cast<std::uint64_t>(trial));
        for (const json& step : scenario.steps) {
            const std::string op = step.at("op").get<std::string>();
            if (op == "store")
                handle_store(step, ctx, report);
            else if (op == "write")
                handle_write(step, ctx, report);
            else if (op == "read")
                handle_read(step, ctx, report);
            else if (op == "compose")
                handle_compose(step, ctx, report);
            else if (op == "switch")
                handle_switch(step, ctx, report);
            else if (op == "control")
                handle_control(step, ctx, report);
            else if (op == "lcu")
                handle_lcu(step, ctx, report);
            else if (op == "superchannel")
                handle_superchannel(step, ctx, report);
            else if (op == "download")
                handle_download(step, ctx, report, scenario.channel);
            else if (op == "verify")
                handle_verify(step, ctx, report);
            else
                throw ScenarioError("unknown op '" + op + "'");
        }
    }

    const auto end = std::chrono::steady_clock::now();
    report.wall_time_ms =
        std::chrono::duration_cast<std::chrono::duration<double, std::milli>>(end - start)
            .count();
    return report;
}

nlohmann::json Report::to_json() const {
    json steps_json = json::array();
    for (const StepOutcome& s : steps)
        steps_json.push_back({{"op", s.op}, {"outcome", s.outcome}, {"qubits", s.qubits}});
    return json{{"version", 1},
                {"scenario", scenario},
                {"seed", seed},
                {"trials", trials},
                {"steps", steps_json},
                {"probabilities", probabilities},
                {"fidelities", fidelities},
                {"qubit_budget", {{"peak", qubit_peak}, {"per_step", per_step_qubits}}},
                {"budgets", budgets},
                {"wall_time_ms", wall_time_ms}};
}

const std::map<std::string, int>& expected_budgets() {
    static const std::map<std::string, int> table = {
        {"store-qubit-gate", 2},         {"store-cz", 4},
        {"compose-two-qubit-programs", 5}, {"superchannel-qubit", 6},
        {"superchannel-qubit-reduced", 4}, {"control-unknown-qubit", 5},
        {"control-unknown-twoqubit", 9},  {"download-ebit-qubit", 9},
        {"download-ebit-twoqubit", 17},
    };
    return table;
}

std::vector<BudgetCheck> budget_check(const std::vector<Report>& reports) {
    std::map<std::string, int> actual;
    for (const Report& r : reports)
        for (const auto& [key, value] : r.budgets) actual[key] = value;

    std::vector<BudgetCheck> checks;
    for (const auto& [key, expected] : expected_budgets()) {
        BudgetCheck c;
        c.key = key;
        c.expected = expected;
        auto it = actual.find(key);
        if (it != actual.end()) c.actual = it->second;
        c.pass = c.actual == expected;
        checks.push_back(c);
    }
    return checks;
}

bool validate_report_json(const nlohmann::json& report, std::string* error) {
    auto fail = [&](const std::string& message) {
        if (error) *error = message;
        return false;
    };
    if (!report.is_object()) return fail("report must be a JSON object");
    const std::vector<std::pair<std::string, std::string>> required = {
        {"version", "number"},       {"scenario", "string"},
        {"seed", "number"},          {"trials", "number"},
        {"steps", "array"},          {"probabilities", "array"},
        {"fidelities", "array"},     {"qubit_budget", "object"},
        {"budgets", "object"},       {"wall_time_ms", "number"},
    };
    for (const auto& [key, type] : required) {
        if (!report.contains(key)) return fail("missing field '" + key + "'");
        const json& v = report[key];
        const bool ok = (type == "number" && v.is_number()) ||
                        (type == "string" && v.is_string()) ||
                        (type == "array" && v.is_array()) ||
                        (type == "object" && v.is_object());
        if (!ok) return fail("field '" + key + "' must be a " + type);
    }
    const json& budget = report["qubit_budget"];
    if (!budget.contains("peak") || !budget["peak"].is_number())
        return fail("qubit_budget.peak must be a number");
    if (!budget.contains("per_step") || !budget["per_step"].is_array())
        return fail("qubit_budget.per_step must be an array");
    for (const json& s : report["steps"]) {
        if (!s.is_object() || !s.contains("op") || !s.contains("outcome") ||
            !s.contains("qubits"))
            return fail("each step requires op/outcome/qubits");
    }
    for (const json& p : report["probabilities"])
        if (!p.is_number()) return fail("probabilities must be numbers");
    for (const json& f : report["fidelities"])
        if (!f.is_number()) return fail("fidelities must be numbers");
    if (error) error->clear();
    return true;
}

}  // namespace qvn
