// Quantum control unit: flag-based controlled execution of unknown gates,
// linear combination of two unknown programs, deterministic control-signal
// enforcement, and control/data disentanglement checking.
#pragma once

#include "qvn/core.hpp"
#include "qvn/memory.hpp"

#include <functional>

namespace qvn {

// Control signals are deterministic inputs by construction: there is no way
// to build one from a measurement branch, encoding that control is never
// injected by (random) measurement.
class ControlSignal {
public:
    static ControlSignal classical_bit(int b);
    static ControlSignal qubit(cd alpha, cd beta);

    cd alpha() const { return alpha_; }
    cd beta() const { return beta_; }
    bool classical() const { return classical_; }

private:
    ControlSignal(cd a, cd b, bool classical);
    cd alpha_, beta_;
    bool classical_;
};

// A gate accessible only as a black-box action; the matrix is never read.
class OpaqueGate {
public:
    OpaqueGate(int dim, std::function<Vec(const Vec&)> action)
        : dim_(dim), action_(std::move(action)) {}
    static OpaqueGate hide(const Unitary& u);

    int dim() const { return dim_; }
    Vec act(const Vec& v) const { return action_(v); }
    // One black-box application to the `wire` register of a larger state.
    Vec act_on_wire(const Vec& state, const std::vector<int>& dims, int wire) const;

private:
    int dim_;
    std::function<Vec(const Vec&)> action_;
};

struct ControlledResult {
    PureState control_data;        // output on control⊗data, flag factored out
    DensityOperator flag_marginal;
    double flag_purity = 0.0;
    int qubits_used = 0;
};

// Controlled-SWAP sandwich with eigenvalue phase compensation: output is
// (|0⟩⟨0|⊗1 + |1⟩⟨1|⊗U)|c⟩|ψ⟩ up to global phase; the flag wire returns to
// |λ⟩ disentangled.
ControlledResult controlled_unknown(const OpaqueGate& u, const FlagSpec& flag,
                                    const ControlSignal& control, const PureState& data);

struct LcuBranch {
    int injection_outcome = 0;  // 0 = data passes, 1 = complement
    int control_outcome = 0;    // X-basis: 0 = +, 1 = −
    double probability = 0.0;
    std::optional<PureState> data;
    bool success = false;  // (accept, +): state ∝ (αU₁+βU₂)|ψ⟩
};

// Linear combination of two unknown programs. Control prepared in (α,β),
// data injected by a binary measurement (accept probability 1/2), control
// measured in the X basis; success on (accept, +) with probability
// ‖αU₁|ψ⟩+βU₂|ψ⟩‖²/4.
std::vector<LcuBranch> lcu_two(ProgramSlot& slot1, ProgramSlot& slot2,
                               const ControlSignal& signal, const PureState& psi);

struct DisentangleReport {
    bool disentangled = false;
    double measure = 0.0;  // 1 − purity of the control marginal
};

DisentangleReport disentangle_check(const PureState& state,
                                    const std::vector<int>& control_wires,
                                    const std::vector<int>& data_wires);

}  // namespace qvn
