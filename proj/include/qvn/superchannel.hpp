// Quantum superchannels: transform channels via pre/post unitaries with an
// ancilla, in the circuit representation and the Choi-state representation,
// and compose sequences of superchannels (quantum combs).
#pragma once

#include "qvn/choi.hpp"
#include "qvn/core.hpp"
#include "qvn/memory.hpp"
#include "qvn/qpu.hpp"

#include <string>
#include <vector>

namespace qvn {

// Ŝ(ℰ)(ρ) = tr_a 𝒱 (ℰ⊗1) 𝒰 (ρ⊗|0⟩⟨0|), with 𝒰, 𝒱 on slot⊗ancilla.
// The kept output wire A is subsystem 0; the ancilla is traced.
struct Superchannel {
    Unitary pre;
    Unitary post;
    int slot_dim = 2;
    int ancilla_dim = 1;
    std::vector<int> traced_wires{1};  // indices into the (slot, ancilla) pair

    Superchannel(Unitary pre_, Unitary post_, int slot_dim_, int ancilla_dim_,
                 std::vector<int> traced = {1});
    static Superchannel identity(int slot_dim);
};

// JSON form: {"pre": [[re,im],...], "post": [...], "slot_dim", "ancilla_dim",
// "traced_wires"} with matrices row-major.
Superchannel superchannel_from_json_text(const std::string& text);

DensityOperator apply_to_channel(const Superchannel& s, const KrausChannel& e,
                                 const DensityOperator& rho);

// Ũ = SWAP · 𝒰ᵗ · SWAP, transpose in the computational basis; SWAP exchanges
// the (d_first, d_second) factors.
Mat build_tilde_u(const Mat& u, int d_first, int d_second);

// Choi-form action: the channel enters only through its Choi state and the
// input only through an ebit injected with ρᵗ. The `ebit` parameter exists
// for the corruption regression test; the default is the ideal |ω⟩⟨ω|.
DensityOperator apply_to_choi(const Superchannel& s, const ChoiState& w,
                              const DensityOperator& rho);
DensityOperator apply_to_choi_with_ebit(const Superchannel& s, const ChoiState& w,
                                        const DensityOperator& rho,
                                        const DensityOperator& ebit);

// Choi state of the transformed channel Ŝ(ℰ) (probing a basis of inputs).
ChoiState transformed_choi(const Superchannel& s, const KrausChannel& e);

struct CombResult {
    DensityOperator output;
    std::vector<TranscriptEvent> transcript;
    int qubits_peak = 0;
};

// One program slot per superchannel tooth: transform each slot, then compose
// sequentially (deterministic composition for unitary teeth, white-box Kraus
// composition otherwise) and apply to the input.
CombResult comb_compose(const std::vector<Superchannel>& teeth,
                        std::vector<ProgramSlot>& slots, const DensityOperator& rho);

Superchannel random_superchannel(int input_dim, int ancilla_dim, RandomSource& rng);

// §-scale resource accounting: an arbitrary superchannel on an n-qubit
// program needs 2n program qubits plus 4 ancillas (2 in reduced mode).
int superchannel_qubits(int program_qubits, bool reduced);

}  // namespace qvn
