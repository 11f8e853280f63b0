// Quantum memory unit: programs stored as Choi states, measurement-based
// write (initial-state injection at the tail) and read (PVM at the head),
// complement-branch probability recovery, and consumed-slot refresh.
#pragma once

#include "qvn/choi.hpp"
#include "qvn/core.hpp"

#include <functional>
#include <map>
#include <optional>
#include <string>

namespace qvn {

// A known eigenpair (λ, |λ⟩) of an otherwise opaque gate.
struct FlagSpec {
    cd eigenvalue;
    PureState eigenstate;
};

// A stored program: Choi state plus optional white-box description and flag.
// consumed flips on any injection/composition and stays set until refresh.
struct ProgramSlot {
    ChoiState choi;
    std::optional<Unitary> whitebox;
    std::optional<KrausChannel> whitebox_channel;
    std::optional<FlagSpec> flag;
    bool consumed = false;
    std::string label;
    int qubits_stored = 0;  // 2n for an n-qubit program

    int head_dim() const { return choi.head_dim(); }
    int tail_dim() const { return choi.tail_dim(); }
    bool has_whitebox() const { return whitebox.has_value() || whitebox_channel.has_value(); }

    // Cloning requires the classical description; black-box states cannot
    // be duplicated.
    ProgramSlot clone(const std::string& new_label) const;
};

struct InjectionBranch {
    int outcome = 0;  // 0 = accept (P₀), 1 = complement (P_0̄)
    double probability = 0.0;
    std::optional<DensityOperator> head;
};

// Explicit circuit realization of write_inject: basis rotation mapping
// |ψ*⟩ → |0…0⟩ on the tail, multi-controlled NOT extracting the match to a
// qubit ancilla, then an ancilla PVM.
struct InjectionGadget {
    std::vector<InjectionBranch> branches;
    int qubits_used = 0;          // 2n program + 1 ancilla
    bool ancilla_required = true;  // false for single-qubit standard-basis injection
};

class MemoryUnit {
public:
    using RefreshSource = std::function<ChoiState(const std::string& label)>;

    ProgramSlot& store_program(const Unitary& u, const std::string& label);
    ProgramSlot& store_program(const KrausChannel& e, const std::string& label);
    ProgramSlot& store_program(const ChoiState& w, const std::string& label);

    ProgramSlot& slot(const std::string& label);
    const ProgramSlot& slot(const std::string& label) const;
    bool has_slot(const std::string& label) const;

    // Total qubits registered for stored programs.
    int qubits_stored() const;

    int ebit_pool() const { return ebit_pool_; }
    void add_ebits(int n) { ebit_pool_ += n; }
    void consume_ebit();

    void set_refresh_source(RefreshSource src) { refresh_source_ = std::move(src); }

    // Restore a consumed slot from its whitebox, or from the refresh source
    // when the description is unavailable. No-op on unconsumed slots.
    ProgramSlot& refresh(const std::string& label);

private:
    std::map<std::string, ProgramSlot> slots_;
    int ebit_pool_ = 0;
    RefreshSource refresh_source_;
};

// Binary PVM {P₀ = |ψ*⟩⟨ψ*|, 1−P₀} at the tail. The conjugate accounts for
// the |ω⟩ index pairing. Marks the slot consumed.
std::vector<InjectionBranch> write_inject(ProgramSlot& slot, const PureState& psi);

// pᵢ = ⟨ψᵢ|ρ_head|ψᵢ⟩
std::vector<double> read_out(const DensityOperator& head, const Pvm& readout);

// Recover the accept-branch probability from either branch. Outcome 0̄ with
// d = 2 gives p = 1 − q; for d > 2 the complement injects the mixed state
// (1−|ψ*⟩⟨ψ*|)/(d−1), so p = 1 − (d−1)·q.
double recover_probability(int branch_outcome, double measured_q, int tail_dim);

InjectionGadget parity_injection_gadget(ProgramSlot& slot, const PureState& psi);

// Program library file: JSON list of {label, matrix (row-major re/im
// pairs), dims}.
void load_program_library(MemoryUnit& mem, const std::string& path);

}  // namespace qvn
