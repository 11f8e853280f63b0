#include "qvn/qcu.hpp"

#include "qvn/choi.hpp"
#include "qvn/gates.hpp"

#include <cmath>
#include <stdexcept>

namespace qvn {

namespace {

std::vector<int> strides_of(const std::vector<int>& dims) {
    std::vector<int> s(dims.size(), 1);
    for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k)
        s[k] = s[k + 1] * dims[k + 1];
    return s;
}

int qubits_for_dim(int d) {
    int n = 0, p = 1;
    while (p < d) {
        p *= 2;
        ++n;
    }
    return n;
}

Vec orthogonal_complement(const Vec& psi) {
    // d = 2 only: the unique (up to phase) orthogonal state.
    Vec perp(2);
    perp(0) = -std::conj(psi(1));
    perp(1) = std::conj(psi(0));
    return perp;
}

// Black-box action of a stored program state: the slot is consumed and its
// unitary action (from the single Kraus operator of the Choi state) is
// exposed only as a function.
OpaqueGate opaque_action_of(ProgramSlot& slot) {
    if (slot.consumed) throw std::runtime_error("opaque_action_of: consumed slot");
    KrausChannel k = kraus_from_choi(slot.choi);
    if (k.rank() != 1)
        throw std::invalid_argument("opaque_action_of: program is not unitary");
    slot.consumed = true;
    Mat m = k.kraus_ops[0];
    // The Kraus operator carries an arbitrary eigenvector phase; the flag
    // eigenpair pins the program's absolute phase (this is what makes the
    // flags load-bearing for linear combinations).
    if (slot.flag) {
        const Vec& ev = slot.flag->eigenstate.amplitudes;
        const cd ratio = ev.dot(m * ev) / slot.flag->eigenvalue;
        if (std::abs(std::abs(ratio) - 1.0) > 1e-6)
            throw std::runtime_error("opaque_action_of: flag does not match the program");
        m /= ratio;
    }
    return OpaqueGate(static_cast<int>(m.rows()), [m](const Vec& v) { return Vec(m * v); });
}

}  // namespace

ControlSignal::ControlSignal(cd a, cd b, bool classical)
    : alpha_(a), beta_(b), classical_(classical) {
    if (std::abs(std::norm(a) + std::norm(b) - 1.0) > kTol)
        throw std::invalid_argument("ControlSignal: |α|²+|β|² != 1");
}

ControlSignal ControlSignal::classical_bit(int b) {
    if (b != 0 && b != 1) throw std::invalid_argument("ControlSignal: bit must be 0 or 1");
    return ControlSignal(b == 0 ? 1.0 : 0.0, b == 1 ? 1.0 : 0.0, true);
}

ControlSignal ControlSignal::qubit(cd alpha, cd beta) {
    return ControlSignal(alpha, beta, false);
}

OpaqueGate OpaqueGate::hide(const Unitary& u) {
    Mat m = u.matrix;
    return OpaqueGate(u.dim(), [m](const Vec& v) { return Vec(m * v); });
}

Vec OpaqueGate::act_on_wire(const Vec& state, const std::vector<int>& dims, int wire) const {
    if (dims.at(wire) != dim_)
        throw std::invalid_argument("OpaqueGate::act_on_wire: dimension mismatch");
    const std::vector<int> strides = strides_of(dims);
    std::vector<int> rest_dims;
    for (size_t k = 0; k < dims.size(); ++k)
        if (static_cast<int>(k) != wire) rest_dims.push_back(dims[k]);
    std::vector<int> rest;
    for (size_t k = 0; k < dims.size(); ++k)
        if (static_cast<int>(k) != wire) rest.push_back(static_cast<int>(k));
    const int R = product_dim(rest_dims);

    Vec out = Vec::Zero(state.size());
    Vec sub(dim_);
    for (int r = 0; r < R; ++r) {
        int base = 0, rr = r;
        for (int k = static_cast<int>(rest.size()) - 1; k >= 0; --k) {
            base += (rr % rest_dims[k]) * strides[rest[k]];
            rr /= rest_dims[k];
        }
        for (int x = 0; x < dim_; ++x) sub(x) = state(base + x * strides[wire]);
        Vec subo = action_(sub);
        for (int x = 0; x < dim_; ++x) out(base + x * strides[wire]) = subo(x);
    }
    return out;
}

ControlledResult controlled_unknown(const OpaqueGate& u, const FlagSpec& flag,
                                    const ControlSignal& control, const PureState& data) {
    const int d = data.dim();
    if (u.dim() != d || flag.eigenstate.dim() != d)
        throw std::invalid_argument("controlled_unknown: dimension mismatch");
    if (std::abs(std::abs(flag.eigenvalue) - 1.0) > 1e-8)
        throw std::invalid_argument("controlled_unknown: eigenvalue not unit modulus");
    // Flag verification: one black-box application.
    Vec residual = u.act(flag.eigenstate.amplitudes) - flag.eigenvalue * flag.eigenstate.amplitudes;
    if (residual.norm() > 1e-6)
        throw std::invalid_argument("controlled_unknown: flag is not an eigenpair of the gate");

    // Wires: control (2), data (d), flag (d).
    Vec c(2);
    c(0) = control.alpha();
    c(1) = control.beta();
    Vec state = kron(kron(Mat(c), Mat(data.amplitudes)), Mat(flag.eigenstate.amplitudes));
    const std::vector<int> dims = {2, d, d};

    // Controlled-SWAP(control; data, flag).
    Mat cswap = Mat::Identity(2 * d * d, 2 * d * d);
    for (int x = 0; x < d; ++x)
        for (int y = 0; y < d; ++y) {
            cswap(d * d + x * d + y, d * d + x * d + y) = 0;
            cswap(d * d + x * d + y, d * d + y * d + x) = 1;
        }
    state = apply_on(cswap, {0, 1, 2}, dims, state);
    state = u.act_on_wire(state, dims, 2);
    state = apply_on(cswap, {0, 1, 2}, dims, state);

    // Eigenvalue compensation on the control: diag(λ⁻¹, 1) up to global phase.
    Mat phase = Mat::Identity(2, 2);
    phase(0, 0) = 1.0 / flag.eigenvalue;
    state = apply_on(phase, {0}, dims, state);

    PureState full(state, dims);
    DensityOperator cd_marginal = partial_trace(density_of(full), {0, 1});
    DensityOperator flag_marginal = partial_trace(density_of(full), {2});
    const double flag_purity = (flag_marginal.matrix * flag_marginal.matrix).trace().real();

    // The flag disentangles exactly; factor it out by taking the dominant
    // eigenvector of the control⊗data marginal.
    auto eigs = spectral_decompose(cd_marginal.matrix);
    PureState out(eigs[0].second, {2, d});

    return ControlledResult{out, flag_marginal, flag_purity, 1 + 2 * qubits_for_dim(d) * 2};
}

std::vector<LcuBranch> lcu_two(ProgramSlot& slot1, ProgramSlot& slot2,
                               const ControlSignal& signal, const PureState& psi) {
    if (!slot1.flag || !slot2.flag)
        throw std::invalid_argument("lcu_two: both program states require flags");
    if (psi.dim() != 2 || slot1.tail_dim() != 2 || slot2.tail_dim() != 2)
        throw std::invalid_argument("lcu_two: qubit programs required");

    OpaqueGate u1 = opaque_action_of(slot1);
    OpaqueGate u2 = opaque_action_of(slot2);

    // Wires: injection ancilla (2), control (2), data (2).
    Vec anc(2), ctrl(2);
    anc << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    ctrl << signal.alpha(), signal.beta();
    Vec state = kron(kron(Mat(anc), Mat(ctrl)), Mat(psi.amplitudes));
    const std::vector<int> dims = {2, 2, 2};

    // Measurement-based data injection: ancilla-controlled rotation into the
    // complement, so the ancilla Z outcome realizes the binary injection PVM
    // {|ψ⟩⟨ψ|, 1−|ψ⟩⟨ψ|} with accept probability exactly 1/2.
    Vec perp = orthogonal_complement(psi.amplitudes);
    Mat xpsi = perp * psi.amplitudes.adjoint() + psi.amplitudes * perp.adjoint();
    Mat cx = Mat::Identity(4, 4);
    cx.block(2, 2, 2, 2) = xpsi;
    state = apply_on(cx, {0, 2}, dims, state);

    // select: anti-controlled U₁, controlled U₂ (flag-gadget execution; the
    // flags certify the relative phases of the black boxes).
    auto controlled_apply = [&](const OpaqueGate& g, int on_value, Vec s) {
        // Apply g to the data wire on the branch where control == on_value.
        Vec out = s;
        const std::vector<int> strides = strides_of(dims);
        // project control branch, act, recombine
        Vec branch = Vec::Zero(s.size());
        for (int i = 0; i < s.size(); ++i) {
            const int cbit = (i / strides[1]) % 2;
            if (cbit == on_value) {
                branch(i) = s(i);
                out(i) = 0;
            }
        }
        branch = g.act_on_wire(branch, dims, 2);
        return Vec(out + branch);
    };
    state = controlled_apply(u1, 0, state);
    state = controlled_apply(u2, 1, state);

    PureState full(state, dims);
    // Branch enumeration: ancilla in Z, control in X.
    Mat xbasis(2, 2);
    xbasis << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0), 1 / std::sqrt(2.0), -1 / std::sqrt(2.0);

    std::vector<LcuBranch> out;
    auto anc_branches = measure_pvm(full, Pvm::computational(2), {0});
    for (int a = 0; a < 2; ++a) {
        if (!anc_branches[a].state) {
            out.push_back({a, 0, 0.0, std::nullopt, false});
            out.push_back({a, 1, 0.0, std::nullopt, false});
            continue;
        }
        auto ctrl_branches = measure_pvm(*anc_branches[a].state, Pvm::from_basis(xbasis), {1});
        for (int x = 0; x < 2; ++x) {
            LcuBranch b;
            b.injection_outcome = a;
            b.control_outcome = x;
            b.probability = anc_branches[a].probability * ctrl_branches[x].probability;
            if (ctrl_branches[x].state) {
                DensityOperator data_marginal =
                    partial_trace(density_of(*ctrl_branches[x].state), {2});
                auto eigs = spectral_decompose(data_marginal.matrix);
                b.data = PureState(eigs[0].second, {2});
            }
            b.success = (a == 0 && x == 0);
            out.push_back(std::move(b));
        }
    }
    return out;
}

DisentangleReport disentangle_check(const PureState& state,
                                    const std::vector<int>& control_wires,
                                    const std::vector<int>& data_wires) {
    if (control_wires.size() + data_wires.size() != state.dims.size())
        throw std::invalid_argument("disentangle_check: wires must partition the state");
    DensityOperator marginal = partial_trace(density_of(state), control_wires);
    const double purity = (marginal.matrix * marginal.matrix).trace().real();
    return DisentangleReport{purity >= 1.0 - 1e-8, 1.0 - purity};
}

}  // namespace qvn
