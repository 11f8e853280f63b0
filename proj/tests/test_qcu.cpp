#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "qvn/gates.hpp"
#include "qvn/qcu.hpp"

#include <cmath>

using namespace qvn;

namespace {

PureState ket(int d, int i) {
    Vec v = Vec::Zero(d);
    v(i) = 1.0;
    return PureState(v, {d});
}

PureState plus() {
    Vec v(2);
    v << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
    return PureState(v, {2});
}

// Oracle: Λ(U) = |0⟩⟨0|⊗1 + |1⟩⟨1|⊗U (built from the hidden matrix here only).
Mat controlled_oracle(const Mat& u) {
    const int d = static_cast<int>(u.rows());
    Mat m = Mat::Zero(2 * d, 2 * d);
    m.topLeftCorner(d, d) = gates::identity(d);
    m.bottomRightCorner(d, d) = u;
    return m;
}

double overlap_up_to_phase(const Vec& a, const Vec& b) { return std::norm(a.dot(b)); }

FlagSpec flag_of(const Mat& u, int which) {
    Eigen::ComplexEigenSolver<Mat> es(u);
    Vec v = es.eigenvectors().col(which);
    v /= v.norm();
    return FlagSpec{es.eigenvalues()(which), PureState(v, {static_cast<int>(u.rows())})};
}

}  // namespace

TEST_CASE("control signals are deterministic-input only") {
    ControlSignal bit = ControlSignal::classical_bit(1);
    CHECK(bit.classical());
    CHECK(std::abs(bit.beta() - 1.0) < kTol);

    ControlSignal q = ControlSignal::qubit(0.6, 0.8);
    CHECK(!q.classical());
    CHECK(std::abs(q.alpha() - 0.6) < kTol);
    CHECK_THROWS(ControlSignal::qubit(1.0, 1.0));  // unnormalized
}

TEST_CASE("opaque gates act without exposing the matrix") {
    OpaqueGate g = OpaqueGate::hide(Unitary(gates::pauli_x()));
    CHECK(g.dim() == 2);
    CHECK((g.act(ket(2, 0).amplitudes) - ket(2, 1).amplitudes).norm() < kTol);
}

TEST_CASE("controlled Z on |+> with control 1 gives |->") {
    OpaqueGate z = OpaqueGate::hide(Unitary(gates::pauli_z()));
    FlagSpec flag{1.0, ket(2, 0)};  // Z|0⟩ = |0⟩
    ControlledResult r = controlled_unknown(z, flag, ControlSignal::classical_bit(1), plus());
    Vec expect(4);  // |1⟩ ⊗ |−⟩
    expect << 0, 0, 1 / std::sqrt(2.0), -1 / std::sqrt(2.0);
    CHECK(overlap_up_to_phase(r.control_data.amplitudes, expect) ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.flag_purity == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.qubits_used == 5);
}

TEST_CASE("control off leaves data and flag unchanged") {
    RandomSource rng(3);
    Unitary u = haar_random_unitary(2, rng);
    FlagSpec flag = flag_of(u.matrix, 0);
    PureState psi = haar_random_state(2, rng);
    ControlledResult r = controlled_unknown(OpaqueGate::hide(u), flag,
                                            ControlSignal::classical_bit(0), psi);
    Vec expect = kron(Mat(ket(2, 0).amplitudes), Mat(psi.amplitudes));
    CHECK(overlap_up_to_phase(r.control_data.amplitudes, expect) ==
          doctest::Approx(1.0).epsilon(1e-9));
    CHECK(fidelity(r.flag_marginal, flag.eigenstate) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("controlled unknown gate matches the Lambda(U) oracle for random U") {
    RandomSource rng(7);
    for (int rep = 0; rep < 25; ++rep) {
        Unitary u = haar_random_unitary(2, rng);
        PureState psi = haar_random_state(2, rng);
        ControlSignal c = ControlSignal::qubit(1 / std::sqrt(2.0), 1 / std::sqrt(2.0));
        Vec control_vec(2);
        control_vec << c.alpha(), c.beta();
        Vec expect = controlled_oracle(u.matrix) *
                     kron(Mat(control_vec), Mat(psi.amplitudes));
        for (int which : {0, 1}) {  // each eigenpair works as a flag
            FlagSpec flag = flag_of(u.matrix, which);
            ControlledResult r = controlled_unknown(OpaqueGate::hide(u), flag, c, psi);
            CHECK(overlap_up_to_phase(r.control_data.amplitudes, expect) ==
                  doctest::Approx(1.0).epsilon(1e-9));
            CHECK(r.flag_purity >= 1.0 - 1e-9);
            CHECK(fidelity(r.flag_marginal, flag.eigenstate) ==
                  doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("the flag pins the phase: joint rephasing tracks Lambda(e^{i phi} U)") {
    // U and e^{iφ}U are indistinguishable as black boxes, yet Λ(U) and
    // Λ(e^{iφ}U) differ physically. The gadget resolves the ambiguity through
    // the declared flag eigenvalue: rephasing (u, λ) → (e^{iφ}u, e^{iφ}λ)
    // yields exactly the controlled version of the rephased gate.
    RandomSource rng(11);
    Unitary u = haar_random_unitary(2, rng);
    PureState psi = haar_random_state(2, rng);
    ControlSignal c = ControlSignal::qubit(0.6, 0.8);
    Vec control_vec(2);
    control_vec << 0.6, 0.8;
    for (double phi : {0.0, 0.4, 1.9, M_PI}) {
        const cd ph = std::exp(cd(0, phi));
        Unitary up(ph * u.matrix);
        FlagSpec base = flag_of(u.matrix, 0);
        FlagSpec flag{ph * base.eigenvalue, base.eigenstate};
        ControlledResult r = controlled_unknown(OpaqueGate::hide(up), flag, c, psi);
        Vec expect = controlled_oracle(up.matrix) * kron(Mat(control_vec), Mat(psi.amplitudes));
        CHECK(overlap_up_to_phase(r.control_data.amplitudes, expect) ==
              doctest::Approx(1.0).epsilon(1e-9));
    }
}

TEST_CASE("a stale flag eigenvalue is rejected") {
    RandomSource rng(13);
    Unitary u = haar_random_unitary(2, rng);
    FlagSpec good = flag_of(u.matrix, 0);
    // Rephase the gate but keep the old eigenvalue: the flag check must fail.
    Unitary up(std::exp(cd(0, 0.5)) * u.matrix);
    CHECK_THROWS(controlled_unknown(OpaqueGate::hide(up), good,
                                    ControlSignal::classical_bit(1), haar_random_state(2, rng)));
    // A wrong eigenstate fails too.
    FlagSpec bad{1.0, haar_random_state(2, rng)};
    CHECK_THROWS(controlled_unknown(OpaqueGate::hide(u), bad,
                                    ControlSignal::classical_bit(1), haar_random_state(2, rng)));
}

TEST_CASE("controlled unknown two-qubit gate reports 9 qubits") {
    RandomSource rng(17);
    Unitary u = haar_random_unitary(4, rng);
    FlagSpec flag = flag_of(u.matrix, 0);
    PureState psi = haar_random_state(4, rng);
    ControlSignal c = ControlSignal::qubit(1 / std::sqrt(2.0), 1 / std::sqrt(2.0));
    ControlledResult r = controlled_unknown(OpaqueGate::hide(u), flag, c, psi);
    CHECK(r.qubits_used == 9);
    Vec control_vec(2);
    control_vec << c.alpha(), c.beta();
    Vec expect = controlled_oracle(u.matrix) * kron(Mat(control_vec), Mat(psi.amplitudes));
    CHECK(overlap_up_to_phase(r.control_data.amplitudes, expect) ==
          doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("LCU pinned examples") {
    auto make_slot = [](MemoryUnit& mem, const Mat& m, const std::string& label) -> ProgramSlot& {
        ProgramSlot& s = mem.store_program(Unitary(m, label), label);
        Eigen::ComplexEigenSolver<Mat> es(m);
        Vec v = es.eigenvectors().col(0);
        v /= v.norm();
        s.flag = FlagSpec{es.eigenvalues()(0), PureState(v, {2})};
        return s;
    };
    const double s2 = 1 / std::sqrt(2.0);
    ControlSignal even = ControlSignal::qubit(s2, s2);

    // U₁ = U₂ = I: success state ψ, probability 1/2.
    {
        MemoryUnit mem;
        ProgramSlot& a = make_slot(mem, gates::identity(2), "a");
        ProgramSlot& b = make_slot(mem, gates::identity(2), "b");
        RandomSource rng(1);
        PureState psi = haar_random_state(2, rng);
        auto branches = lcu_two(a, b, even, psi);
        double total = 0.0;
        for (const auto& br : branches) {
            total += br.probability;
            if (br.success) {
                CHECK(br.probability == doctest::Approx(0.5).epsilon(1e-10));
                CHECK(fidelity(*br.data, psi) == doctest::Approx(1.0).epsilon(1e-9));
            }
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }

    // U₁ = I, U₂ = Z on |0⟩: (I+Z)|0⟩ ∝ |0⟩.
    {
        MemoryUnit mem;
        ProgramSlot& a = make_slot(mem, gates::identity(2), "a");
        ProgramSlot& b = make_slot(mem, gates::pauli_z(), "b");
        auto branches = lcu_two(a, b, even, ket(2, 0));
        for (const auto& br : branches)
            if (br.success)
                CHECK(fidelity(*br.data, ket(2, 0)) == doctest::Approx(1.0).epsilon(1e-9));
    }

    // U₁ = X, U₂ = Z on |0⟩: (X+Z)|0⟩ ∝ (|1⟩+|0⟩)/√2.
    {
        MemoryUnit mem;
        ProgramSlot& a = make_slot(mem, gates::pauli_x(), "a");
        ProgramSlot& b = make_slot(mem, gates::pauli_z(), "b");
        auto branches = lcu_two(a, b, even, ket(2, 0));
        Vec expect(2);
        expect << s2, s2;
        bool found = false;
        for (const auto& br : branches)
            if (br.success) {
                found = true;
                CHECK(fidelity(*br.data, PureState(expect, {2})) ==
                      doctest::Approx(1.0).epsilon(1e-9));
                // ‖α X|0⟩ + β Z|0⟩‖²/4 = ‖(|0⟩+|1⟩)/√2‖²/4 = 1/4.
                CHECK(br.probability == doctest::Approx(0.25).epsilon(1e-10));
            }
        CHECK(found);
    }
}

TEST_CASE("LCU success probability matches the direct formula for random inputs") {
    RandomSource rng(19);
    for (int rep = 0; rep < 10; ++rep) {
        Unitary u1 = haar_random_unitary(2, rng);
        Unitary u2 = haar_random_unitary(2, rng);
        PureState psi = haar_random_state(2, rng);
        const cd alpha(0.6, 0.0), beta(0.0, 0.8);
        MemoryUnit mem;
        ProgramSlot& a = mem.store_program(u1, "a");
        ProgramSlot& b = mem.store_program(u2, "b");
        Eigen::ComplexEigenSolver<Mat> e1(u1.matrix), e2(u2.matrix);
        Vec v1 = e1.eigenvectors().col(0).normalized();
        Vec v2 = e2.eigenvectors().col(0).normalized();
        a.flag = FlagSpec{e1.eigenvalues()(0), PureState(v1, {2})};
        b.flag = FlagSpec{e2.eigenvalues()(0), PureState(v2, {2})};

        auto branches = lcu_two(a, b, ControlSignal::qubit(alpha, beta), psi);
        Vec target = alpha * (u1.matrix * psi.amplitudes) + beta * (u2.matrix * psi.amplitudes);
        double total = 0.0;
        for (const auto& br : branches) {
            total += br.probability;
            if (br.success) {
                CHECK(br.probability ==
                      doctest::Approx(target.squaredNorm() / 4.0).epsilon(1e-10));
                CHECK(overlap_up_to_phase(br.data->amplitudes, target.normalized()) ==
                      doctest::Approx(1.0).epsilon(1e-9));
            }
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("LCU requires flags on both programs") {
    MemoryUnit mem;
    ProgramSlot& a = mem.store_program(Unitary(gates::identity(2)), "a");
    ProgramSlot& b = mem.store_program(Unitary(gates::pauli_z()), "b");
    CHECK_THROWS(lcu_two(a, b, ControlSignal::qubit(0.6, 0.8), ket(2, 0)));
}

TEST_CASE("disentangle_check classifies pinned cases") {
    // Product state.
    PureState prod(kron(Mat(ket(2, 0).amplitudes), Mat(plus().amplitudes)), {2, 2});
    DisentangleReport r1 = disentangle_check(prod, {0}, {1});
    CHECK(r1.disentangled);
    CHECK(r1.measure == doctest::Approx(0.0).epsilon(1e-10));

    // Bell state across the cut.
    DisentangleReport r2 = disentangle_check(bell_state(2), {0}, {1});
    CHECK(!r2.disentangled);
    CHECK(r2.measure == doctest::Approx(0.5).epsilon(1e-10));

    // Controlled-unknown output with c = |+⟩, U = X, ψ = |0⟩: control and
    // data end up entangled (the §-contract's concern before final readout).
    OpaqueGate x = OpaqueGate::hide(Unitary(gates::pauli_x()));
    FlagSpec flag{1.0, plus()};  // X|+⟩ = |+⟩
    ControlledResult out = controlled_unknown(
        x, flag, ControlSignal::qubit(1 / std::sqrt(2.0), 1 / std::sqrt(2.0)), ket(2, 0));
    DisentangleReport r3 = disentangle_check(out.control_data, {0}, {1});
    CHECK(!r3.disentangled);
    CHECK(r3.measure == doctest::Approx(0.5).epsilon(1e-9));
}
