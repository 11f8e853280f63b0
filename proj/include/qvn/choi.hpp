// Channel-state duality: Choi states of channels and unitaries, Kraus
// recovery from Choi states, and channel application through the readout
// identity ℰ(ρ) = d · tr_B[ω_ℰ (1 ⊗ ρᵗ)].
#pragma once

#include "qvn/core.hpp"

namespace qvn {

// The dual state ω_ℰ of a channel, on head⊗tail. Head (output) is
// subsystem 0, tail (input) is subsystem 1. Trace-1 normalization:
// |ω⟩ carries the 1/√d, and apply_via_choi restores the factor d.
struct ChoiState {
    DensityOperator operator_;
    bool purity_hint = false;  // rank 1 (unitary or isometry program)

    ChoiState(DensityOperator op, bool pure_hint);
    int head_dim() const { return operator_.dims[0]; }
    int tail_dim() const { return operator_.dims[1]; }

    // Pure-state amplitudes; valid only when purity_hint is set.
    Vec pure_vector() const;
};

ChoiState choi_of_channel(const KrausChannel& e);
ChoiState choi_of_unitary(const Unitary& u);

// Kraus operators from the scaled eigenvectors of ω. The reshape pairs
// eigenvector index (i·d_in + j) with entry K[i][j], matching the |ω⟩
// index pairing (pinned by a unit test).
KrausChannel kraus_from_choi(const ChoiState& w);

DensityOperator apply_via_choi(const ChoiState& w, const DensityOperator& rho);

// Numerical rank of ω (eigenvalues > 1e-8).
int choi_rank(const ChoiState& w);

}  // namespace qvn
