// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each check is validated against a direct matrix-math oracle.
#include "qvn/gates.hpp"
#include "qvn/network.hpp"
#include "qvn/qcu.hpp"
#include "qvn/qpu.hpp"
#include "qvn/scenario.hpp"
#include "qvn/superchannel.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

using namespace qvn;

namespace {

int g_failures = 0;

void report(int index, const std::string& name, bool pass, const std::string& detail = "") {
    std::printf("criterion %2d [%s] %s%s%s\n", index, pass ? "PASS" : "FAIL", name.c_str(),
                detail.empty() ? "" : " — ", detail.c_str());
    if (!pass) ++g_failures;
}

PureState ket(int d, int i) {
    Vec v = Vec::Zero(d);
    v(i) = 1.0;
    return PureState(v, {d});
}

Mat kraus_apply(const KrausChannel& e, const Mat& rho) {
    Mat out = Mat::Zero(e.dim_out(), e.dim_out());
    for (const Mat& k : e.kraus_ops) out += k * rho * k.adjoint();
    return out;
}

// 1. Readout identity for 100 Haar unitaries over d ∈ {2,4,8}.
void criterion_readout() {
    RandomSource rng(1001);
    double worst = 0.0;
    for (int d : {2, 4, 8}) {
        for (int rep = 0; rep < 34; ++rep) {
            Unitary u = haar_random_unitary(d, rng);
            DensityOperator rho = random_density(d, rng);
            Mat via = apply_via_choi(choi_of_unitary(u), rho).matrix;
            Mat direct = u.matrix * rho.matrix * u.matrix.adjoint();
            worst = std::max(worst, frobenius_distance(via, direct));
        }
    }
    report(1, "readout identity (Choi vs direct conjugation)", worst < 1e-9,
           "max distance " + std::to_string(worst));
}

// 2. Duality round trip for 50 random channels.
void criterion_roundtrip() {
    RandomSource rng(1002);
    double worst_fix = 0.0, worst_act = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const int d = (rep % 3 == 0) ? 2 : (rep % 3 == 1 ? 4 : 8);
        const int rank = 1 + static_cast<int>(rng.below(4));
        KrausChannel e = random_channel(d, rank, rng);
        ChoiState w = choi_of_channel(e);
        ChoiState round = choi_of_channel(kraus_from_choi(w));
        worst_fix = std::max(worst_fix,
                             frobenius_distance(round.operator_.matrix, w.operator_.matrix));
        KrausChannel back = kraus_from_choi(w);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                Mat unit = Mat::Zero(d, d);
                unit(i, j) = 1.0;
                worst_act = std::max(
                    worst_act, frobenius_distance(kraus_apply(back, unit), kraus_apply(e, unit)));
            }
    }
    report(2, "duality round trip (choi→kraus→choi, full-basis action)",
           worst_fix < 1e-8 && worst_act < 1e-8,
           "fixed point " + std::to_string(worst_fix) + ", action " + std::to_string(worst_act));
}

// 3. Write/read law for 50 random 1- and 2-qubit programs.
void criterion_write_read() {
    RandomSource rng(1003);
    bool pass = true;
    for (int rep = 0; rep < 50; ++rep) {
        const int d = (rep % 2 == 0) ? 2 : 4;
        Unitary u = haar_random_unitary(d, rng);
        PureState psi = haar_random_state(d, rng);
        Mat basis = haar_random_unitary(d, rng).matrix;
        MemoryUnit mem;
        auto branches = write_inject(mem.store_program(u, "u"), psi);
        auto p = read_out(*branches[0].head, Pvm::from_basis(basis));
        Vec out = u.matrix * psi.amplitudes;
        for (int i = 0; i < d; ++i)
            pass = pass && std::abs(p[i] - std::norm(basis.col(i).dot(out))) < 1e-10;
        if (d == 2) {
            // Complement branch: p′ = 1 − p exactly (qubit case).
            auto q = read_out(*branches[1].head, Pvm::from_basis(basis));
            for (int i = 0; i < d; ++i) pass = pass && std::abs(p[i] + q[i] - 1.0) < 1e-10;
        }
    }
    report(3, "write/read law (accept stats + qubit complement relation)", pass);
}

// 4. Composition in all modes over 100 random program pairs.
void criterion_composition() {
    RandomSource rng(1004);
    bool pass = true;
    for (int rep = 0; rep < 100; ++rep) {
        Unitary u = haar_random_unitary(2, rng);
        Unitary v = haar_random_unitary(2, rng);
        ChoiState target = choi_of_unitary(Unitary(v.matrix * u.matrix));
        for (int forced = 0; forced < 4; ++forced) {
            MemoryUnit ma, mb;
            CompositionResult det = compose_deterministic(ma.store_program(u, "u"),
                                                          ma.store_program(v, "v"), rng, forced);
            CompositionResult cov = compose_covariant(mb.store_program(u, "u"),
                                                      mb.store_program(v, "v"), rng, forced);
            pass = pass && fidelity(det.choi.operator_, target.operator_) >= 1.0 - 1e-9;
            pass = pass && fidelity(cov.choi.operator_, target.operator_) >= 1.0 - 1e-9;
        }
        if (rep < 10) {
            MemoryUnit mc;
            auto branches = compose_branches(mc.store_program(u, "u"), mc.store_program(v, "v"));
            pass = pass && std::abs(branches[0].first - 0.25) < 1e-10;
            pass = pass &&
                   fidelity(branches[0].second.choi.operator_, target.operator_) >= 1.0 - 1e-9;
        }
    }
    // Associativity chain of 5 programs.
    const Mat seq[5] = {gates::hadamard(), gates::t_gate(), gates::hadamard(), gates::t_gate(),
                        gates::hadamard()};
    ChoiState acc = choi_of_unitary(Unitary(seq[0]));
    Mat product = seq[0];
    for (int i = 1; i < 5; ++i) {
        MemoryUnit mem;
        ProgramSlot& e = mem.store_program(Unitary(kraus_from_choi(acc).kraus_ops[0]), "acc");
        ProgramSlot& l = mem.store_program(Unitary(seq[i]), "next");
        acc = compose_deterministic(e, l, rng).choi;
        product = seq[i] * product;
    }
    pass = pass &&
           fidelity(acc.operator_, choi_of_unitary(Unitary(product)).operator_) >= 1.0 - 1e-8;
    report(4, "composition (deterministic, covariant, postselect, 5-chain)", pass);
}

// 5. Affine forms: H is the X↔Z exchange; homomorphism on 100 random pairs.
void criterion_affine() {
    AffineForm h = affine_form(Unitary(gates::hadamard()));
    Eigen::Matrix3d expect_h;
    expect_h << 0, 0, 1, 0, -1, 0, 1, 0, 0;
    bool pass = (h.matrix - expect_h).norm() < 1e-9;
    RandomSource rng(1005);
    for (int rep = 0; rep < 100; ++rep) {
        Unitary u = haar_random_unitary(2, rng);
        Unitary v = haar_random_unitary(2, rng);
        Eigen::Matrix3d lhs = affine_form(Unitary(u.matrix * v.matrix)).matrix;
        Eigen::Matrix3d rhs = affine_form(u).matrix * affine_form(v).matrix;
        pass = pass && (lhs - rhs).norm() < 1e-9;
    }
    report(5, "affine forms (H exchange, homomorphism)", pass);
}

// 6. Switch ON/OFF semantics over 50 random programs, both byproduct classes.
void criterion_switch() {
    RandomSource rng(1006);
    bool pass = true;
    for (int rep = 0; rep < 50; ++rep) {
        Unitary prev = haar_random_unitary(2, rng);
        Unitary gate = haar_random_unitary(2, rng);
        for (int forced : {0, 2}) {  // trivial and nontrivial byproduct classes
            for (bool on : {true, false}) {
                MemoryUnit mem;
                mem.add_ebits(1);
                mem.store_program(gate, "g");
                SwitchGadget g = switch_attach(mem, "g", choi_of_unitary(prev));
                CompositionResult r = switch_select(g, on, rng, forced);
                ChoiState expect = on ? choi_of_unitary(Unitary(gate.matrix * prev.matrix))
                                      : choi_of_unitary(prev);
                pass = pass && fidelity(r.choi.operator_, expect.operator_) >= 1.0 - 1e-9;
            }
        }
    }
    report(6, "switch semantics (ON composes, OFF passes through)", pass);
}

// 7. Controlled unknown gate for 100 random U, both eigenstates as flags.
void criterion_controlled() {
    RandomSource rng(1007);
    bool pass = true;
    for (int rep = 0; rep < 100; ++rep) {
        Unitary u = haar_random_unitary(2, rng);
        PureState psi = haar_random_state(2, rng);
        ControlSignal c = ControlSignal::qubit(1 / std::sqrt(2.0), 1 / std::sqrt(2.0));
        Mat lambda_u = Mat::Zero(4, 4);
        lambda_u.topLeftCorner(2, 2) = gates::identity(2);
        lambda_u.bottomRightCorner(2, 2) = u.matrix;
        Vec control_vec(2);
        control_vec << c.alpha(), c.beta();
        Vec expect = lambda_u * kron(Mat(control_vec), Mat(psi.amplitudes));
        Eigen::ComplexEigenSolver<Mat> es(u.matrix);
        for (int which : {0, 1}) {
            Vec v = es.eigenvectors().col(which).normalized();
            FlagSpec flag{es.eigenvalues()(which), PureState(v, {2})};
            ControlledResult r = controlled_unknown(OpaqueGate::hide(u), flag, c, psi);
            pass = pass &&
                   std::norm(r.control_data.amplitudes.dot(expect)) >= 1.0 - 1e-9;
            pass = pass && r.flag_purity >= 1.0 - 1e-9;
        }
    }
    report(7, "controlled unknown gate (Λ(U) up to global phase, flag restored)", pass);
}

// 8. LCU exact branch arithmetic.
void criterion_lcu() {
    RandomSource rng(1008);
    bool pass = true;
    for (int rep = 0; rep < 50; ++rep) {
        Unitary u1 = haar_random_unitary(2, rng);
        Unitary u2 = haar_random_unitary(2, rng);
        PureState psi = haar_random_state(2, rng);
        const cd alpha(0.6, 0.0), beta(0.0, 0.8);  // |α|²+|β|² = 1
        MemoryUnit mem;
        ProgramSlot& a = mem.store_program(u1, "a");
        ProgramSlot& b = mem.store_program(u2, "b");
        Eigen::ComplexEigenSolver<Mat> e1(u1.matrix), e2(u2.matrix);
        a.flag = FlagSpec{e1.eigenvalues()(0), PureState(e1.eigenvectors().col(0).normalized(),
                                                         {2})};
        b.flag = FlagSpec{e2.eigenvalues()(0), PureState(e2.eigenvectors().col(0).normalized(),
                                                         {2})};
        auto branches = lcu_two(a, b, ControlSignal::qubit(alpha, beta), psi);
        Vec target = alpha * (u1.matrix * psi.amplitudes) + beta * (u2.matrix * psi.amplitudes);
        double total = 0.0;
        for (const auto& br : branches) {
            total += br.probability;
            if (br.success) {
                pass = pass &&
                       std::abs(br.probability - target.squaredNorm() / 4.0) < 1e-10;
                pass = pass && std::norm(br.data->amplitudes.dot(target.normalized())) >=
                                   1.0 - 1e-9;
            }
        }
        pass = pass && std::abs(total - 1.0) < 1e-10;
    }
    report(8, "LCU (success state and exact branch probabilities)", pass);
}

// 9. Superchannels: representation equivalence, CPTP preservation, comb.
void criterion_superchannel() {
    RandomSource rng(1009);
    bool pass = true;
    for (int rep = 0; rep < 100; ++rep) {
        Superchannel s = random_superchannel(2, 2, rng);
        KrausChannel e = random_channel(2, 2, rng);
        DensityOperator rho = random_density(2, rng);
        Mat circuit = apply_to_channel(s, e, rho).matrix;
        Mat choi = apply_to_choi(s, choi_of_channel(e), rho).matrix;
        pass = pass && frobenius_distance(circuit, choi) < 1e-9;
        if (rep < 20) {
            // CPTP preservation: transformed Choi is a valid density operator
            // (enforced by construction) with the I/d tail marginal.
            ChoiState w = transformed_choi(s, e);
            pass = pass && frobenius_distance(partial_trace(w.operator_, {1}).matrix,
                                              gates::identity(2) / 2.0) < 1e-8;
        }
    }
    // Two-tooth comb vs the monolithic circuit.
    for (int rep = 0; rep < 5; ++rep) {
        Superchannel s1 = random_superchannel(2, 2, rng);
        Superchannel s2 = random_superchannel(2, 2, rng);
        Unitary u1 = haar_random_unitary(2, rng);
        Unitary u2 = haar_random_unitary(2, rng);
        DensityOperator rho = random_density(2, rng);
        MemoryUnit mem;
        std::vector<ProgramSlot> slots = {mem.store_program(u1, "u1"),
                                          mem.store_program(u2, "u2")};
        CombResult comb = comb_compose({s1, s2}, slots, rho);
        Mat mid = apply_to_channel(s1, KrausChannel({u1.matrix}), rho).matrix;
        Mat expect =
            apply_to_channel(s2, KrausChannel({u2.matrix}), DensityOperator(mid, {2})).matrix;
        pass = pass && frobenius_distance(comb.output.matrix, expect) < 1e-8;
    }
    report(9, "superchannel (circuit ≡ Choi, CPTP, two-tooth comb)", pass);
}

// 10. Network: four ideal downloads, QBER statistics, sampling, verification.
void criterion_network() {
    bool pass = true;
    std::string detail;

    {  // Schemes 1 and 2: sealed-tape behavior equals the host gate product.
        RandomSource rng(1010);
        Vec expect = gates::t_gate() * gates::hadamard() * ket(2, 0).amplitudes;
        for (int scheme : {1, 2}) {
            BitsDownload d = scheme == 1
                                 ? scheme1_send_bits({{"H", {0}}, {"T", {0}}}, 1,
                                                     ChannelModel::ideal(), rng)
                                 : scheme2_send_bits({{"H", {0}}, {"T", {0}}}, 1,
                                                     ChannelModel::ideal(), rng);
            pass = pass && d.tape.has_value();
            if (d.tape) {
                PureState out = d.tape->execute(ket(2, 0));
                pass = pass && std::norm(out.amplitudes.dot(expect)) >= 1.0 - 1e-9;
            }
        }
    }
    {  // Schemes 3 and 4: Choi fidelity 1 over the ideal channel.
        RandomSource rng(1011);
        MemoryUnit host;
        ProgramSlot& h3 = host.store_program(Unitary(gates::hadamard(), "H"), "h3");
        ProgramSlot& h4 = host.store_program(Unitary(gates::hadamard(), "H"), "h4");
        ProgramDownload d3 = scheme3_send_qubits(h3, ChannelModel::ideal(), rng);
        ProgramDownload d4 = scheme4_send_via_ebits(h4, ChannelModel::ideal(), rng);
        ChoiState target = choi_of_unitary(Unitary(gates::hadamard()));
        pass = pass && d3.slot && fidelity(d3.slot->choi.operator_, target.operator_) >=
                                      1.0 - 1e-9;
        pass = pass && d4.slot && fidelity(d4.slot->choi.operator_, target.operator_) >=
                                      1.0 - 1e-9;
    }
    {  // Intercept-resend QBER within 3σ of 0.25 at n_raw = 10⁵.
        RandomSource rng(1012);
        Bb84Result r = bb84_exchange(100000, ChannelModel::eavesdropper(1.0), rng);
        const double sigma = std::sqrt(0.25 * 0.75 / (r.sifted_length / 2.0));
        pass = pass && std::abs(r.qber - 0.25) < 3 * sigma;
        detail = "QBER " + std::to_string(r.qber);
    }
    pass = pass && sample_count(0.1, 0.05) == 30;
    {  // Verification: 200 seeded repetitions each way.
        RandomSource rng(1013);
        VerificationPlan plan(0.1, 0.05);
        int accepts = 0, rejects = 0;
        for (int rep = 0; rep < 200; ++rep) {
            MemoryUnit good, bad;
            std::vector<ProgramSlot> faithful, wrong;
            for (int i = 0; i < plan.n_samples; ++i) {
                faithful.push_back(
                    good.store_program(Unitary(gates::hadamard(), "H"), "g" + std::to_string(i)));
                wrong.push_back(
                    bad.store_program(Unitary(gates::pauli_z(), "Z"), "b" + std::to_string(i)));
            }
            accepts += verify_program(faithful, plan, Unitary(gates::hadamard(), "H"), rng)
                           .accepted;
            rejects += !verify_program(wrong, plan, Unitary(gates::hadamard(), "H"), rng)
                            .accepted;
        }
        pass = pass && accepts >= 190 && rejects >= 190;
        detail += ", accepts " + std::to_string(accepts) + "/200, rejects " +
                  std::to_string(rejects) + "/200";
    }
    report(10, "network (4 schemes, QBER, sampling, verification)", pass, detail);
}

// 11. §-scale resource budgets across every built-in demo.
void criterion_budgets() {
    std::vector<Report> reports;
    bool under_20 = true;
    for (const auto& name : list_scenarios()) {
        Report r = run_scenario(builtin_demo(name));
        under_20 = under_20 && r.qubit_peak < 20;
        reports.push_back(std::move(r));
    }
    bool pass = under_20;
    for (const BudgetCheck& c : budget_check(reports)) pass = pass && c.pass;
    const auto& expected = expected_budgets();
    pass = pass && expected.at("store-qubit-gate") == 2 && expected.at("store-cz") == 4 &&
           expected.at("compose-two-qubit-programs") == 5 &&
           expected.at("superchannel-qubit") == 6 &&
           expected.at("superchannel-qubit-reduced") == 4 &&
           expected.at("control-unknown-qubit") == 5 &&
           expected.at("control-unknown-twoqubit") == 9 &&
           expected.at("download-ebit-qubit") == 9 &&
           expected.at("download-ebit-twoqubit") == 17;
    report(11, "resource budgets (2,4,5,6/4,5,9,9,17; all demos < 20 qubits)", pass);
}

}  // namespace

int main() {
    criterion_readout();
    criterion_roundtrip();
    criterion_write_read();
    criterion_composition();
    criterion_affine();
    criterion_switch();
    criterion_controlled();
    criterion_lcu();
    criterion_superchannel();
    criterion_network();
    criterion_budgets();

    if (g_failures == 0) {
        std::printf("acceptance: all 11 criteria passed\n");
        return 0;
    }
    std::printf("acceptance: %d criteria FAILED\n", g_failures);
    return 1;
}
