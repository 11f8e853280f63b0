#include "qvn/memory.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

namespace qvn {

using nlohmann::json;

namespace {

int qubits_for_dim(int d) {
    int n = 0, p = 1;
    while (p < d) {
        p *= 2;
        ++n;
    }
    return n;
}

// Any unitary with first column |ψ⟩ (Gram–Schmidt completion).
Mat basis_completion(const Vec& psi) {
    const int d = static_cast<int>(psi.size());
    Mat b(d, d);
    b.col(0) = psi;
    int filled = 1;
    for (int k = 0; k < d && filled < d; ++k) {
        Vec e = Vec::Zero(d);
        e(k) = 1.0;
        for (int j = 0; j < filled; ++j) e -= b.col(j).dot(e) * b.col(j);
        if (e.norm() > 1e-8) b.col(filled++) = e / e.norm();
    }
    if (filled != d) throw std::runtime_error("basis_completion: degenerate input");
    return b;
}

bool is_standard_basis_vector(const Vec& psi) {
    int nonzero = 0;
    for (int i = 0; i < psi.size(); ++i)
        if (std::abs(psi(i)) > kTol) ++nonzero;
    return nonzero == 1;
}

}  // namespace

ProgramSlot ProgramSlot::clone(const std::string& new_label) const {
    if (!has_whitebox())
        throw std::logic_error("ProgramSlot::clone: black-box program states cannot be cloned");
    ProgramSlot copy = *this;
    copy.label = new_label;
    copy.consumed = false;
    return copy;
}

ProgramSlot& MemoryUnit::store_program(const Unitary& u, const std::string& label) {
    if (slots_.count(label)) throw std::invalid_argument("store_program: duplicate label " + label);
    ProgramSlot s{choi_of_unitary(u), u, std::nullopt, std::nullopt, false, label,
                  2 * qubits_for_dim(u.dim())};
    return slots_.emplace(label, std::move(s)).first->second;
}

ProgramSlot& MemoryUnit::store_program(const KrausChannel& e, const std::string& label) {
    if (slots_.count(label)) throw std::invalid_argument("store_program: duplicate label " + label);
    ProgramSlot s{choi_of_channel(e), std::nullopt, e, std::nullopt, false, label,
                  qubits_for_dim(e.dim_out()) + qubits_for_dim(e.dim_in())};
    return slots_.emplace(label, std::move(s)).first->second;
}

ProgramSlot& MemoryUnit::store_program(const ChoiState& w, const std::string& label) {
    if (slots_.count(label)) throw std::invalid_argument("store_program: duplicate label " + label);
    ProgramSlot s{w, std::nullopt, std::nullopt, std::nullopt, false, label,
                  qubits_for_dim(w.head_dim()) + qubits_for_dim(w.tail_dim())};
    return slots_.emplace(label, std::move(s)).first->second;
}

ProgramSlot& MemoryUnit::slot(const std::string& label) {
    auto it = slots_.find(label);
    if (it == slots_.end()) throw std::invalid_argument("unknown slot label " + label);
    return it->second;
}

const ProgramSlot& MemoryUnit::slot(const std::string& label) const {
    auto it = slots_.find(label);
    if (it == slots_.end()) throw std::invalid_argument("unknown slot label " + label);
    return it->second;
}

bool MemoryUnit::has_slot(const std::string& label) const { return slots_.count(label) > 0; }

int MemoryUnit::qubits_stored() const {
    int total = 0;
    for (const auto& [label, s] : slots_) total += s.qubits_stored;
    return total;
}

void MemoryUnit::consume_ebit() {
    if (ebit_pool_ <= 0) throw std::runtime_error("MemoryUnit: ebit pool empty");
    --ebit_pool_;
}

ProgramSlot& MemoryUnit::refresh(const std::string& label) {
    ProgramSlot& s = slot(label);
    if (!s.consumed) return s;  // no-op
    if (s.whitebox)
        s.choi = choi_of_unitary(*s.whitebox);
    else if (s.whitebox_channel)
        s.choi = choi_of_channel(*s.whitebox_channel);
    else if (refresh_source_)
        s.choi = refresh_source_(label);
    else
        throw std::runtime_error("refresh: no whitebox and no download source for " + label);
    s.consumed = false;
    return s;
}

std::vector<InjectionBranch> write_inject(ProgramSlot& slot, const PureState& psi) {
    if (slot.consumed) throw std::runtime_error("write_inject: slot already consumed");
    const int d = slot.tail_dim();
    if (psi.dim() != d) throw std::invalid_argument("write_inject: input dimension mismatch");

    Vec conj_psi = psi.amplitudes.conjugate();
    Mat p0 = conj_psi * conj_psi.adjoint();
    Pvm pvm({p0, Mat::Identity(d, d) - p0});

    auto density_branches = measure_pvm(slot.choi.operator_, pvm, {1});
    std::vector<InjectionBranch> out;
    for (int i = 0; i < 2; ++i) {
        InjectionBranch b;
        b.outcome = i;
        b.probability = density_branches[i].probability;
        if (density_branches[i].state)
            b.head = partial_trace(*density_branches[i].state, {0});
        out.push_back(std::move(b));
    }
    slot.consumed = true;
    return out;
}

std::vector<double> read_out(const DensityOperator& head, const Pvm& readout) {
    if (head.dim() != readout.dim())
        throw std::invalid_argument("read_out: dimension mismatch");
    std::vector<double> probs;
    for (const Mat& p : readout.projectors)
        probs.push_back((p * head.matrix).trace().real());
    return probs;
}

double recover_probability(int branch_outcome, double measured_q, int tail_dim) {
    if (measured_q < 0.0 || measured_q > 1.0)
        throw std::invalid_argument("recover_probability: q outside [0,1]");
    double p;
    if (branch_outcome == 0)
        p = measured_q;
    else
        p = 1.0 - (tail_dim - 1) * measured_q;
    if (p < -1e-9 || p > 1.0 + 1e-9)
        throw std::runtime_error("recover_probability: inconsistent inputs");
    return std::clamp(p, 0.0, 1.0);
}

InjectionGadget parity_injection_gadget(ProgramSlot& slot, const PureState& psi) {
    if (slot.consumed) throw std::runtime_error("parity_injection_gadget: slot already consumed");
    const int d = slot.tail_dim();
    if (psi.dim() != d)
        throw std::invalid_argument("parity_injection_gadget: input dimension mismatch");
    if (!slot.choi.purity_hint)
        throw std::invalid_argument("parity_injection_gadget: requires a pure (unitary) program");

    // Wires: head (d), tail (d), ancilla qubit.
    Vec anc = Vec::Zero(2);
    anc(0) = 1.0;
    Vec state = kron(Mat(slot.choi.pure_vector()), Mat(anc));
    std::vector<int> dims = {slot.head_dim(), d, 2};

    // Rotate the tail so the injected state maps to |0…0⟩.
    Mat w = basis_completion(psi.amplitudes.conjugate()).adjoint();
    state = apply_on(w, {1}, dims, state);

    // Toffoli-like parity extraction: flip the ancilla iff the tail is |0…0⟩.
    Mat mcx = Mat::Identity(2 * d, 2 * d);
    mcx(0, 0) = mcx(1, 1) = 0;
    mcx(0, 1) = mcx(1, 0) = 1;
    state = apply_on(mcx, {1, 2}, dims, state);

    // Undo the rotation; the record of the outcome now lives on the ancilla.
    state = apply_on(Mat(w.adjoint()), {1}, dims, state);

    PureState full(state, dims);
    auto anc_branches = measure_pvm(full, Pvm::computational(2), {2});

    InjectionGadget g;
    g.qubits_used = slot.qubits_stored + 1;
    // A single qubit injected in the standard basis is a direct Z
    // measurement; any larger tail needs the parity extracted to the ancilla.
    g.ancilla_required = d > 2 || !is_standard_basis_vector(psi.amplitudes);
    // Ancilla |1⟩ marks the accept (P₀) branch.
    for (int anc = 1; anc >= 0; --anc) {
        InjectionBranch b;
        b.outcome = 1 - anc;
        b.probability = anc_branches[anc].probability;
        if (anc_branches[anc].state)
            b.head = partial_trace(density_of(*anc_branches[anc].state), {0});
        g.branches.push_back(std::move(b));
    }
    slot.consumed = true;
    return g;
}

void load_program_library(MemoryUnit& mem, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_program_library: cannot open " + path);
    json j = json::parse(in);
    for (const auto& entry : j) {
        const std::string label = entry.at("label").get<std::string>();
        const auto dims = entry.at("dims").get<std::vector<int>>();
        const int d = product_dim(dims);
        const auto& raw = entry.at("matrix");
        if (static_cast<int>(raw.size()) != d * d)
            throw std::runtime_error("load_program_library: matrix size mismatch for " + label);
        Mat m(d, d);
        for (int i = 0; i < d; ++i)
            for (int k = 0; k < d; ++k) {
                const auto& pair = raw[i * d + k];
                m(i, k) = cd(pair[0].get<double>(), pair[1].get<double>());
            }
        mem.store_program(Unitary(m, label), label);
    }
}

}  // namespace qvn
