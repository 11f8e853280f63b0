#include "qvn/gates.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace qvn::gates {

using std::numbers::pi;

Mat identity(int d) { return Mat::Identity(d, d); }

Mat pauli_x() {
    Mat m(2, 2);
    m << 0, 1, 1, 0;
    return m;
}

Mat pauli_y() {
    Mat m(2, 2);
    m << 0, cd(0, -1), cd(0, 1), 0;
    return m;
}

Mat pauli_z() {
    Mat m(2, 2);
    m << 1, 0, 0, -1;
    return m;
}

Mat hadamard() {
    Mat m(2, 2);
    m << 1, 1, 1, -1;
    return m / std::sqrt(2.0);
}

Mat t_gate() {
    Mat m = Mat::Identity(2, 2);
    m(1, 1) = std::polar(1.0, pi / 4.0);
    return m;
}

Mat s_gate() {
    Mat m = Mat::Identity(2, 2);
    m(1, 1) = cd(0, 1);
    return m;
}

Mat cnot() {
    Mat m = Mat::Zero(4, 4);
    m(0, 0) = m(1, 1) = m(2, 3) = m(3, 2) = 1;
    return m;
}

Mat cz() {
    Mat m = Mat::Identity(4, 4);
    m(3, 3) = -1;
    return m;
}

Mat swap_gate(int d) { return swap_gate(d, d); }

Mat swap_gate(int d_first, int d_second) {
    // |i⟩⊗|j⟩ ↦ |j⟩⊗|i⟩; permutation from H_{d1}⊗H_{d2} onto H_{d2}⊗H_{d1}.
    Mat m = Mat::Zero(d_first * d_second, d_first * d_second);
    for (int i = 0; i < d_first; ++i)
        for (int j = 0; j < d_second; ++j) m(j * d_first + i, i * d_second + j) = 1;
    return m;
}

Mat toffoli() {
    Mat m = Mat::Identity(8, 8);
    m(6, 6) = m(7, 7) = 0;
    m(6, 7) = m(7, 6) = 1;
    return m;
}

Mat pauli(int i) {
    switch (i) {
        case 0: return identity(2);
        case 1: return pauli_x();
        case 2: return pauli_y();
        case 3: return pauli_z();
        default: throw std::invalid_argument("pauli: index out of range");
    }
}

Mat weyl(int d, int i) {
    if (i < 0 || i >= d * d) throw std::invalid_argument("weyl: index out of range");
    const int a = i / d, b = i % d;
    Mat m = Mat::Zero(d, d);
    for (int j = 0; j < d; ++j)
        m((j + a) % d, j) = std::polar(1.0, 2.0 * pi * b * j / d);
    return m;
}

std::vector<Mat> byproduct_basis(int d) {
    std::vector<Mat> ops;
    if (d == 2) {
        for (int i = 0; i < 4; ++i) ops.push_back(pauli(i));
    } else {
        for (int i = 0; i < d * d; ++i) ops.push_back(weyl(d, i));
    }
    return ops;
}

Mat by_label(const std::string& label) {
    if (label == "I") return identity(2);
    if (label == "X") return pauli_x();
    if (label == "Y") return pauli_y();
    if (label == "Z") return pauli_z();
    if (label == "H") return hadamard();
    if (label == "T") return t_gate();
    if (label == "S") return s_gate();
    if (label == "CNOT") return cnot();
    if (label == "CZ") return cz();
    if (label == "SWAP") return swap_gate(2);
    if (label == "TOFFOLI") return toffoli();
    throw std::invalid_argument("by_label: unknown gate label '" + label + "'");
}

}  // namespace qvn::gates
