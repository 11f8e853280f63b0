#include "qvn/qpu.hpp"

#include "qvn/gates.hpp"

#include <cmath>
#include <deque>
#include <numbers>
#include <stdexcept>

namespace qvn {

namespace {

// Digit strides, dims[0] most significant.
std::vector<int> strides_of(const std::vector<int>& dims) {
    std::vector<int> s(dims.size(), 1);
    for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k)
        s[k] = s[k + 1] * dims[k + 1];
    return s;
}

ProgramSlot ephemeral_slot(const ChoiState& choi, std::optional<Unitary> whitebox,
                           const std::string& label) {
    ProgramSlot s{choi, std::move(whitebox), std::nullopt, std::nullopt, false, label, 0};
    s.qubits_stored = 0;
    int d = choi.head_dim() * choi.tail_dim();
    while (d > 1) {
        d /= 2;
        ++s.qubits_stored;
    }
    return s;
}

ChoiState choi_from_vector(const Vec& v, int head_dim, int tail_dim) {
    Vec n = v / v.norm();
    return ChoiState(DensityOperator(n * n.adjoint(), {head_dim, tail_dim}), true);
}

// Apply a matrix to the head (wire 0) or tail (wire 1) of a pure Choi vector.
Vec apply_wire(const Mat& m, const Vec& choi_vec, int head_dim, int tail_dim, int wire) {
    return apply_on(m, {wire}, {head_dim, tail_dim}, choi_vec);
}

}  // namespace

std::vector<BellBranch> bell_branches(const PureState& state, int wire_a, int wire_b) {
    const int n = state.num_subsystems();
    if (wire_a == wire_b || wire_a < 0 || wire_b < 0 || wire_a >= n || wire_b >= n)
        throw std::invalid_argument("bell_branches: bad wire indices");
    const int d = state.dims[wire_a];
    if (state.dims[wire_b] != d)
        throw std::invalid_argument("bell_branches: wires must share a dimension");

    const std::vector<int> strides = strides_of(state.dims);
    std::vector<int> rest;
    for (int k = 0; k < n; ++k)
        if (k != wire_a && k != wire_b) rest.push_back(k);
    std::vector<int> rest_dims;
    for (int k : rest) rest_dims.push_back(state.dims[k]);
    const int R = product_dim(rest_dims);

    const auto sigmas = gates::byproduct_basis(d);
    const double norm = 1.0 / std::sqrt(static_cast<double>(d));

    std::vector<BellBranch> branches;
    double total = 0.0;
    for (int i = 0; i < d * d; ++i) {
        // Φᵢ = (σᵢ⊗1)|ω⟩ with σᵢ on wire_a; contract ⟨Φᵢ| against the state.
        Vec post = Vec::Zero(std::max(R, 1));
        for (int r = 0; r < R; ++r) {
            int base = 0;
            int rr = r;
            for (int k = static_cast<int>(rest.size()) - 1; k >= 0; --k) {
                base += (rr % rest_dims[k]) * strides[rest[k]];
                rr /= rest_dims[k];
            }
            cd acc = 0.0;
            for (int x = 0; x < d; ++x)
                for (int y = 0; y < d; ++y)
                    acc += std::conj(sigmas[i](x, y) * norm) *
                           state.amplitudes(base + x * strides[wire_a] + y * strides[wire_b]);
            post(r) = acc;
        }
        BellBranch b;
        b.outcome = {i, sigmas[i]};
        b.probability = post.squaredNorm();
        total += b.probability;
        if (b.probability > kTol && !rest_dims.empty())
            b.post = PureState(post / std::sqrt(b.probability), rest_dims);
        branches.push_back(std::move(b));
    }
    if (std::abs(total - 1.0) > 1e-9)
        throw std::runtime_error("bell_branches: probabilities do not sum to 1");
    return branches;
}

std::pair<BellOutcome, PureState> bell_measure(const PureState& state, int wire_a,
                                               int wire_b, RandomSource& rng) {
    auto branches = bell_branches(state, wire_a, wire_b);
    std::vector<double> probs;
    for (const auto& b : branches) probs.push_back(b.probability);
    const int i = sample_index(probs, rng);
    if (!branches[i].post)
        throw std::runtime_error("bell_measure: no remaining wires after measurement");
    return {branches[i].outcome, *branches[i].post};
}

std::vector<std::pair<double, CompositionResult>> compose_branches(const ProgramSlot& earlier,
                                                                   const ProgramSlot& later) {
    if (earlier.head_dim() != later.tail_dim())
        throw std::invalid_argument("compose: head dim of earlier != tail dim of later");
    if (!earlier.choi.purity_hint || !later.choi.purity_hint)
        throw std::invalid_argument("compose: requires pure (unitary) program states");

    // Joint wires: (later-head, later-tail, earlier-head, earlier-tail).
    Vec joint = kron(Mat(later.choi.pure_vector()), Mat(earlier.choi.pure_vector()));
    PureState joint_state(joint, {later.head_dim(), later.tail_dim(),
                                  earlier.head_dim(), earlier.tail_dim()});
    auto branches = bell_branches(joint_state, /*wire_a=*/2, /*wire_b=*/1);

    std::vector<std::pair<double, CompositionResult>> out;
    for (auto& b : branches) {
        if (!b.post) {
            // Zero-probability branch; keep the slot so indices line up.
            CompositionResult r{later.choi, b.outcome.byproduct.adjoint(), false,
                                b.outcome.index, 0, 0};
            out.emplace_back(0.0, std::move(r));
            continue;
        }
        CompositionResult r{
            choi_from_vector(b.post->amplitudes, later.head_dim(), earlier.tail_dim()),
            b.outcome.byproduct.adjoint(),  // sandwiched operator is σᵢ†
            b.outcome.index == 0,
            b.outcome.index,
            0,
            earlier.qubits_stored + later.qubits_stored};
        out.emplace_back(b.probability, std::move(r));
    }
    return out;
}

CompositionResult compose_postselect(ProgramSlot& earlier, ProgramSlot& later,
                                     RandomSource& rng) {
    if (earlier.consumed || later.consumed)
        throw std::runtime_error("compose_postselect: consumed slot");
    auto branches = compose_branches(earlier, later);
    earlier.consumed = later.consumed = true;
    std::vector<double> probs;
    for (const auto& [p, r] : branches) probs.push_back(p);
    const int i = sample_index(probs, rng);
    CompositionResult r = branches[i].second;
    r.ancilla_bits_used = 2;
    return r;
}

namespace {

CompositionResult correct_branch(const CompositionResult& raw, const ProgramSlot& earlier,
                                 const ProgramSlot& later) {
    if (raw.outcome_index == 0) {
        CompositionResult r = raw;
        r.corrected = true;
        r.residual_byproduct = Mat::Identity(raw.residual_byproduct.rows(),
                                             raw.residual_byproduct.cols());
        return r;
    }
    const Mat sigma_dag = raw.residual_byproduct;  // σᵢ†
    Vec v = raw.choi.pure_vector();
    const int dh = raw.choi.head_dim(), dt = raw.choi.tail_dim();
    if (later.whitebox) {
        // Residual is V σᵢ† U; apply V σᵢ V† on the head.
        const Mat& vmat = later.whitebox->matrix;
        Mat c = vmat * sigma_dag.adjoint() * vmat.adjoint();
        v = apply_wire(c, v, dh, dt, 0);
    } else if (earlier.whitebox) {
        // Residual is V U (U† σᵢ† U); undo on the tail via the |ω⟩ transport
        // (M⊗1)|ω⟩ = (1⊗Mᵗ)|ω⟩.
        const Mat& umat = earlier.whitebox->matrix;
        Mat w = umat.adjoint() * sigma_dag * umat;
        v = apply_wire(w.conjugate(), v, dh, dt, 1);
    } else {
        throw std::invalid_argument(
            "compose_deterministic: no whitebox on either program; use compose_postselect");
    }
    CompositionResult r = raw;
    r.choi = choi_from_vector(v, dh, dt);
    r.corrected = true;
    r.residual_byproduct = Mat::Identity(sigma_dag.rows(), sigma_dag.cols());
    return r;
}

}  // namespace

CompositionResult compose_deterministic(ProgramSlot& earlier, ProgramSlot& later,
                                        RandomSource& rng, int forced_outcome) {
    if (earlier.consumed || later.consumed)
        throw std::runtime_error("compose_deterministic: consumed slot");
    if (!earlier.has_whitebox() && !later.has_whitebox())
        throw std::invalid_argument(
            "compose_deterministic: no whitebox on either program; use compose_postselect");
    auto branches = compose_branches(earlier, later);
    earlier.consumed = later.consumed = true;
    int i = forced_outcome;
    if (i < 0) {
        std::vector<double> probs;
        for (const auto& [p, r] : branches) probs.push_back(p);
        i = sample_index(probs, rng);
    }
    CompositionResult r = correct_branch(branches.at(i).second, earlier, later);
    r.ancilla_bits_used = 2;
    r.qubits_used = earlier.qubits_stored + later.qubits_stored + 1;
    return r;
}

AffineForm affine_form(const Unitary& u) {
    if (u.dim() != 2) throw std::invalid_argument("affine_form: qubit unitary required");
    Eigen::Matrix3d r;
    for (int a = 1; a <= 3; ++a)
        for (int b = 1; b <= 3; ++b)
            r(a - 1, b - 1) =
                ((gates::pauli(a) * u.matrix * gates::pauli(b) * u.matrix.adjoint()).trace() /
                 2.0)
                    .real();
    if ((r * r.transpose() - Eigen::Matrix3d::Identity()).norm() > 1e-9)
        throw std::runtime_error("affine_form: result not orthogonal");
    return AffineForm{r, u};
}

CompositionResult compose_covariant(ProgramSlot& earlier, ProgramSlot& later,
                                    RandomSource& rng, int forced_outcome) {
    if (earlier.head_dim() != 2 || later.tail_dim() != 2)
        throw std::invalid_argument("compose_covariant: qubit programs required");
    if (!later.whitebox)
        throw std::invalid_argument("compose_covariant: later program must be a whitebox");
    if (earlier.consumed || later.consumed)
        throw std::runtime_error("compose_covariant: consumed slot");

    const AffineForm form = affine_form(*later.whitebox);
    auto branches = compose_branches(earlier, later);
    earlier.consumed = later.consumed = true;
    int i = forced_outcome;
    if (i < 0) {
        std::vector<double> probs;
        for (const auto& [p, r] : branches) probs.push_back(p);
        i = sample_index(probs, rng);
    }
    CompositionResult raw = branches.at(i).second;
    CompositionResult r = raw;
    if (i != 0) {
        // Nontrivial class: the correction V σᵢ V† is assembled from the
        // affine form column of σᵢ (Paulis are Hermitian, σᵢ† = σᵢ).
        Mat c = Mat::Zero(2, 2);
        for (int a = 1; a <= 3; ++a) c += form.matrix(a - 1, i - 1) * gates::pauli(a);
        Vec v = apply_wire(c, raw.choi.pure_vector(), raw.choi.head_dim(),
                           raw.choi.tail_dim(), 0);
        r.choi = choi_from_vector(v, raw.choi.head_dim(), raw.choi.tail_dim());
    }
    r.corrected = true;
    r.residual_byproduct = Mat::Identity(2, 2);
    r.ancilla_bits_used = 1;  // trivial vs nontrivial byproduct class
    r.qubits_used = earlier.qubits_stored + later.qubits_stored + 1;
    return r;
}

SwitchGadget switch_attach(MemoryUnit& mem, const std::string& label, const ChoiState& prev) {
    ProgramSlot& stored = mem.slot(label);
    if (stored.consumed) throw std::runtime_error("switch_attach: consumed slot");
    if (stored.tail_dim() != 2 || stored.head_dim() != 2)
        throw std::invalid_argument("switch_attach: qubit program required");
    mem.consume_ebit();
    SwitchGadget g{stored, prev, {{1, 2}, {3, 4}}, {1, 2, 3, 4, 5}, {1, 4, 5}, false};
    stored.consumed = true;  // wired into the gadget
    g.program.consumed = false;
    return g;
}

CompositionResult switch_select(SwitchGadget& gadget, bool on, RandomSource& rng,
                                int forced_outcome) {
    if (gadget.selected) throw std::runtime_error("switch_select: gadget already selected");
    gadget.selected = true;
    ProgramSlot prev_slot = ephemeral_slot(gadget.prev, std::nullopt, "switch-prev");
    if (on) {
        CompositionResult r =
            compose_deterministic(prev_slot, gadget.program, rng, forced_outcome);
        r.qubits_used = prev_slot.qubits_stored + gadget.program.qubits_stored + 2 + 1;
        return r;
    }
    // OFF path: close the program path; the previous program passes through
    // the ebit (identity composition), byproduct corrected.
    ProgramSlot id_slot =
        ephemeral_slot(choi_of_unitary(Unitary(gates::identity(2), "I")),
                       Unitary(gates::identity(2), "I"), "switch-off");
    CompositionResult r = compose_deterministic(prev_slot, id_slot, rng, forced_outcome);
    r.qubits_used = prev_slot.qubits_stored + gadget.program.qubits_stored + 2 + 1;
    return r;
}

std::pair<std::string, double> approximate_rotation(const Unitary& target, int max_depth) {
    if (target.dim() != 2) throw std::invalid_argument("approximate_rotation: qubit target");
    if (max_depth > 20) throw std::invalid_argument("approximate_rotation: max_depth <= 20");

    const Mat h = gates::hadamard();
    const Mat t = gates::t_gate();

    // Operator-norm distance up to global phase, from the eigenvalue arc of
    // U†W: dist = 2 sin(arc/4).
    auto distance = [&](const Mat& w) {
        Eigen::ComplexEigenSolver<Mat> es(target.matrix.adjoint() * w);
        const double t0 = std::arg(es.eigenvalues()(0));
        const double t1 = std::arg(es.eigenvalues()(1));
        double arc = std::abs(t0 - t1);
        arc = std::min(arc, 2.0 * std::numbers::pi - arc);
        return 2.0 * std::sin(arc / 4.0);
    };

    std::string best_word;
    double best = distance(Mat::Identity(2, 2));

    struct Node {
        std::string word;
        Mat matrix;
        int t_run;
    };
    std::deque<Node> queue{{"", Mat::Identity(2, 2), 0}};
    while (!queue.empty()) {
        Node node = std::move(queue.front());
        queue.pop_front();
        if (static_cast<int>(node.word.size()) >= max_depth) continue;
        // Canonical words: no HH (H² = 1) and T runs < 8 (T⁸ = 1).
        for (char g : {'H', 'T'}) {
            if (g == 'H' && !node.word.empty() && node.word.back() == 'H') continue;
            if (g == 'T' && node.t_run >= 7) continue;
            Node next;
            next.word = node.word + g;
            next.matrix = (g == 'H' ? h : t) * node.matrix;  // left-to-right application order
            next.t_run = (g == 'T') ? node.t_run + 1 : 0;
            const double dist = distance(next.matrix);
            if (dist < best - 1e-12) {
                best = dist;
                best_word = next.word;
            }
            queue.push_back(std::move(next));
        }
    }
    return {best_word, best};
}

RunResult run_program_sequence(MemoryUnit& memory, const std::vector<std::string>& labels,
                               const PureState& psi, const Pvm& readout, ComposeMode mode,
                               RandomSource& rng) {
    const int d = psi.dim();
    ChoiState composite = choi_of_unitary(Unitary(gates::identity(d), "I"));
    std::vector<TranscriptEvent> transcript;
    int step = 0;
    int peak = 0;
    auto log = [&](const std::string& op, int outcome, const std::string& corr, int qubits) {
        transcript.push_back({step++, op, outcome, corr, qubits});
        peak = std::max(peak, qubits);
    };

    bool first = true;
    for (const std::string& label : labels) {
        ProgramSlot& stored = memory.slot(label);
        if (first) {
            if (stored.consumed) throw std::runtime_error("run_program_sequence: consumed slot");
            composite = stored.choi;
            stored.consumed = true;
            log("load:" + label, -1, "", stored.qubits_stored);
            first = false;
            continue;
        }
        ProgramSlot prev = ephemeral_slot(composite, std::nullopt, "composite");
        CompositionResult r{composite, Mat::Identity(d, d), false, 0, 0, 0};
        switch (mode) {
            case ComposeMode::Postselect:
                r = compose_postselect(prev, memory.slot(label), rng);
                break;
            case ComposeMode::Deterministic:
                r = compose_deterministic(prev, memory.slot(label), rng);
                break;
            case ComposeMode::Covariant:
                r = compose_covariant(prev, memory.slot(label), rng);
                break;
            case ComposeMode::Switch: {
                SwitchGadget g = switch_attach(memory, label, composite);
                r = switch_select(g, true, rng);
                break;
            }
        }
        composite = r.choi;
        log("compose:" + label, r.outcome_index,
            r.corrected ? "corrected" : "uncorrected-byproduct", r.qubits_used);
    }

    // Inject and read out on the accept branch.
    ProgramSlot final_slot = ephemeral_slot(composite, std::nullopt, "final");
    auto branches = write_inject(final_slot, psi);
    log("inject", 0, "", final_slot.qubits_stored + 1);
    if (!branches[0].head)
        throw std::runtime_error("run_program_sequence: accept branch has zero probability");
    std::vector<double> probs = read_out(*branches[0].head, readout);
    log("readout", -1, "", final_slot.qubits_stored);

    return RunResult{std::move(probs), std::move(transcript), peak, composite};
}

}  // namespace qvn
