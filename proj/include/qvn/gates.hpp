// Standard gate matrices and the Pauli/Weyl byproduct bases.
#pragma once

#include "qvn/core.hpp"

namespace qvn::gates {

Mat identity(int d);
Mat pauli_x();
Mat pauli_y();
Mat pauli_z();
Mat hadamard();
Mat t_gate();   // fourth root of Z
Mat s_gate();   // T²
Mat cnot();
Mat cz();
Mat swap_gate(int d);  // SWAP on H_d ⊗ H_d
// |i⟩⊗|j⟩ ↦ |j⟩⊗|i⟩ from H_{d1}⊗H_{d2} onto H_{d2}⊗H_{d1}.
Mat swap_gate(int d_first, int d_second);
Mat toffoli();

// σᵢ for i in 0..3 = {I, X, Y, Z}. σ₀ is the identity.
Mat pauli(int i);

// Weyl (generalized Pauli) operator X^a Z^b on H_d; reduces to the Pauli
// basis up to phase for d = 2. Index i = a*d + b.
Mat weyl(int d, int i);

// The d² byproduct operators used for the Bell basis {(σᵢ⊗1)|ω⟩}.
std::vector<Mat> byproduct_basis(int d);

// Gate lookup by label (H, T, S, X, Y, Z, I, CNOT, CZ, SWAP, TOFFOLI).
Mat by_label(const std::string& label);

}  // namespace qvn::gates
