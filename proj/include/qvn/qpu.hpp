// Program composition engine: Bell measurement with byproduct corrections,
// deterministic white-box composition, covariant (binary-outcome)
// composition via affine forms, switchable composition, and an H/T
// sequence realizer.
#pragma once

#include "qvn/choi.hpp"
#include "qvn/core.hpp"
#include "qvn/memory.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qvn {

// Outcome of a Bell measurement: index i and the byproduct σᵢ (Pauli basis
// for d = 2, Weyl operators for d > 2). σ₀ is the identity.
struct BellOutcome {
    int index = 0;
    Mat byproduct;
};

struct CompositionResult {
    ChoiState choi;
    Mat residual_byproduct;  // sandwiched operator; identity when corrected
    bool corrected = false;
    int outcome_index = 0;
    int ancilla_bits_used = 0;
    int qubits_used = 0;
};

// The real orthogonal rotation induced by conjugation: R_ab = tr(σ_a U σ_b U†)/d
// over the Pauli basis order (X, Y, Z).
struct AffineForm {
    Eigen::Matrix3d matrix;
    Unitary source;
};

struct BellBranch {
    BellOutcome outcome;
    double probability = 0.0;
    std::optional<PureState> post;  // remaining wires after the measured pair collapses
};

// Full branch enumeration of a Bell measurement on (wireA, wireB) against
// the basis {(σᵢ⊗1)|ω⟩} with σ acting on wireA. The post state lives on
// the remaining wires (original order).
std::vector<BellBranch> bell_branches(const PureState& state, int wire_a, int wire_b);

std::pair<BellOutcome, PureState> bell_measure(const PureState& state, int wire_a,
                                               int wire_b, RandomSource& rng);

// Bell-measure earlier's head with later's tail; the result lives on
// (later-head, earlier-tail). Outcome 0 (probability 1/d²) yields
// |later∘earlier⟩; other outcomes carry a sandwiched byproduct.
CompositionResult compose_postselect(ProgramSlot& earlier, ProgramSlot& later,
                                     RandomSource& rng);

// All d² composition branches (for forced-outcome testing).
std::vector<std::pair<double, CompositionResult>> compose_branches(const ProgramSlot& earlier,
                                                                   const ProgramSlot& later);

// For every Bell outcome a correction conjugated through the white-box
// program is applied, so the final choi is |later∘earlier⟩. forced_outcome
// pins a branch; -1 samples.
CompositionResult compose_deterministic(ProgramSlot& earlier, ProgramSlot& later,
                                        RandomSource& rng, int forced_outcome = -1);

AffineForm affine_form(const Unitary& u);

// Qubit-only covariant composition: one binary outcome (trivial vs
// nontrivial byproduct class), correction computed via the affine form of
// the known later program.
CompositionResult compose_covariant(ProgramSlot& earlier, ProgramSlot& later,
                                    RandomSource& rng, int forced_outcome = -1);

// Switchable composition: ebit attached and CZ pattern applied at
// switch_attach (the pre-compose step); switch_select completes one path
// and closes the other.
struct SwitchGadget {
    ProgramSlot program;
    ChoiState prev;
    std::vector<std::pair<int, int>> cz_pattern;
    std::vector<int> on_path;   // 1→2→3→4→5
    std::vector<int> off_path;  // 1→4→5
    bool selected = false;
};

SwitchGadget switch_attach(MemoryUnit& mem, const std::string& label, const ChoiState& prev);
CompositionResult switch_select(SwitchGadget& gadget, bool on, RandomSource& rng,
                                int forced_outcome = -1);

// Breadth-first enumeration of H/T words (canonicalized: no HH, T runs < 8);
// returns the minimal-distance word under operator norm up to global phase.
std::pair<std::string, double> approximate_rotation(const Unitary& target, int max_depth);

enum class ComposeMode { Postselect, Deterministic, Covariant, Switch };

struct TranscriptEvent {
    int step = 0;
    std::string operation;
    int outcome = -1;
    std::string correction;
    int qubits_in_use = 0;
};

struct RunResult {
    std::vector<double> probabilities;  // accept-branch readout probabilities
    std::vector<TranscriptEvent> transcript;
    int qubits_peak = 0;
    ChoiState composite;
};

// Compose all programs per mode, inject psi, read out.
RunResult run_program_sequence(MemoryUnit& memory, const std::vector<std::string>& labels,
                               const PureState& psi, const Pvm& readout, ComposeMode mode,
                               RandomSource& rng);

}  // namespace qvn
