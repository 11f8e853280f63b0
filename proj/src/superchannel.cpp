#include "qvn/superchannel.hpp"

#include "qvn/gates.hpp"

#include "json.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace qvn {

namespace {

// Validate a wire subset of the (slot, ancilla) bipartition.
void check_traced(const std::vector<int>& traced) {
    for (int w : traced)
        if (w != 0 && w != 1)
            throw std::invalid_argument("Superchannel: traced wire out of range");
}

std::vector<int> kept_wires(const std::vector<int>& traced) {
    std::vector<int> kept;
    for (int w : {0, 1})
        if (std::find(traced.begin(), traced.end(), w) == traced.end()) kept.push_back(w);
    if (kept.empty()) throw std::invalid_argument("Superchannel: all wires traced");
    return kept;
}

// Linear action of the superchannel circuit on an arbitrary operator x on
// the slot (not necessarily a density operator): used both by the public
// apply_to_channel and by the basis-probing Choi builder.
Mat circuit_action(const Superchannel& s, const KrausChannel& e, const Mat& x) {
    const int d = s.slot_dim, a = s.ancilla_dim;
    Mat anc = Mat::Zero(a, a);
    anc(0, 0) = 1.0;
    Mat state = kron(x, anc);
    state = s.pre.matrix * state * s.pre.matrix.adjoint();

    const std::vector<int> dims = {d, a};
    Mat after = Mat::Zero(d * a, d * a);
    for (const Mat& k : e.kraus_ops) {
        Mat ke = embed(k, {0}, dims);
        after += ke * state * ke.adjoint();
    }
    after = s.post.matrix * after * s.post.matrix.adjoint();
    return partial_trace_matrix(after, dims, kept_wires(s.traced_wires));
}

}  // namespace

Superchannel::Superchannel(Unitary pre_, Unitary post_, int slot_dim_, int ancilla_dim_,
                           std::vector<int> traced)
    : pre(std::move(pre_)),
      post(std::move(post_)),
      slot_dim(slot_dim_),
      ancilla_dim(ancilla_dim_),
      traced_wires(std::move(traced)) {
    if (slot_dim < 1 || ancilla_dim < 1)
        throw std::invalid_argument("Superchannel: dims must be >= 1");
    if (pre.dim() != slot_dim * ancilla_dim || post.dim() != slot_dim * ancilla_dim)
        throw std::invalid_argument("Superchannel: pre/post must act on slot x ancilla");
    if (!is_unitary(pre.matrix, 1e-9) || !is_unitary(post.matrix, 1e-9))
        throw std::invalid_argument("Superchannel: pre/post must be unitary");
    check_traced(traced_wires);
    kept_wires(traced_wires);
}

Superchannel Superchannel::identity(int slot_dim) {
    return Superchannel(Unitary(Mat::Identity(slot_dim, slot_dim), "1"),
                        Unitary(Mat::Identity(slot_dim, slot_dim), "1"), slot_dim, 1);
}

DensityOperator apply_to_channel(const Superchannel& s, const KrausChannel& e,
                                 const DensityOperator& rho) {
    if (e.dim_in() != s.slot_dim || e.dim_out() != s.slot_dim)
        throw std::invalid_argument("apply_to_channel: channel does not fit the slot");
    if (rho.dim() != s.slot_dim)
        throw std::invalid_argument("apply_to_channel: input dimension mismatch");
    Mat out = circuit_action(s, e, rho.matrix);
    std::vector<int> out_dims;
    const std::vector<int> all = {s.slot_dim, s.ancilla_dim};
    for (int w : kept_wires(s.traced_wires)) out_dims.push_back(all[w]);
    return DensityOperator(out, out_dims);
}

Mat build_tilde_u(const Mat& u, int d_first, int d_second) {
    if (u.rows() != d_first * d_second || u.cols() != u.rows())
        throw std::invalid_argument("build_tilde_u: dimension mismatch");
    Mat sw = gates::swap_gate(d_first, d_second);
    return sw * u.transpose() * sw.transpose();
}

DensityOperator apply_to_choi_with_ebit(const Superchannel& s, const ChoiState& w,
                                        const DensityOperator& rho,
                                        const DensityOperator& ebit) {
    const int d = s.slot_dim, a = s.ancilla_dim;
    if (w.head_dim() != d || w.tail_dim() != d)
        throw std::invalid_argument("apply_to_choi: Choi state does not fit the slot");
    if (rho.dim() != d || ebit.dim() != d * d)
        throw std::invalid_argument("apply_to_choi: input dimension mismatch");

    // Input injection through the ebit: ρ/d = tr₂[ ω (1⊗ρᵗ) ].
    Mat inj = Mat::Zero(d, d);
    for (int s0 = 0; s0 < d; ++s0)
        for (int s1 = 0; s1 < d; ++s1)
            for (int t = 0; t < d; ++t)
                for (int t1 = 0; t1 < d; ++t1)
                    inj(s0, s1) += ebit.matrix(s0 * d + t, s1 * d + t1) * rho.matrix(t, t1);

    // Pre-unitary pulled through the ebit as Ũ: the identity
    // Ũ[(a₀s₀),(as)] = 𝒰[(sa),(s₀a₀)] gives K[(sa),s₀] = Ũ[(0s₀),(as)],
    // so M = K inj K† equals 𝒰 (inj ⊗ |0⟩⟨0|) 𝒰†.
    Mat tu = build_tilde_u(s.pre.matrix, d, a);
    Mat k(d * a, d);
    for (int sl = 0; sl < d; ++sl)
        for (int an = 0; an < a; ++an)
            for (int s0 = 0; s0 < d; ++s0) k(sl * a + an, s0) = tu(0 * d + s0, an * d + sl);
    Mat m = k * inj * k.adjoint();

    // Channel readout from the Choi state on the slot wire.
    const Mat& om = w.operator_.matrix;
    Mat n = Mat::Zero(d * a, d * a);
    for (int i = 0; i < d; ++i)
        for (int i1 = 0; i1 < d; ++i1)
            for (int an = 0; an < a; ++an)
                for (int an1 = 0; an1 < a; ++an1)
                    for (int sl = 0; sl < d; ++sl)
                        for (int sl1 = 0; sl1 < d; ++sl1)
                            n(i * a + an, i1 * a + an1) +=
                                om(i * d + sl, i1 * d + sl1) * m(sl * a + an, sl1 * a + an1);

    // Normalization d²: one d from the duality readout, one from injection.
    Mat out_full = double(d) * double(d) * (s.post.matrix * n * s.post.matrix.adjoint());
    Mat out = partial_trace_matrix(out_full, {d, a}, kept_wires(s.traced_wires));

    std::vector<int> out_dims;
    const std::vector<int> all = {d, a};
    for (int wi : kept_wires(s.traced_wires)) out_dims.push_back(all[wi]);
    return DensityOperator(out, out_dims);
}

DensityOperator apply_to_choi(const Superchannel& s, const ChoiState& w,
                              const DensityOperator& rho) {
    return apply_to_choi_with_ebit(s, w, rho,
                                   density_of(bell_state(s.slot_dim)));
}

ChoiState transformed_choi(const Superchannel& s, const KrausChannel& e) {
    const int d = s.slot_dim;
    std::vector<int> kept = kept_wires(s.traced_wires);
    int d_out = 1;
    const std::vector<int> all = {d, s.ancilla_dim};
    for (int w : kept) d_out *= all[w];

    // ω[(i j),(i' j')] = (1/d) F(|j⟩⟨j'|)[i,i'], probing matrix units.
    Mat om = Mat::Zero(d_out * d, d_out * d);
    for (int j = 0; j < d; ++j)
        for (int j1 = 0; j1 < d; ++j1) {
            Mat unit = Mat::Zero(d, d);
            unit(j, j1) = 1.0;
            Mat f = circuit_action(s, e, unit);
            for (int i = 0; i < d_out; ++i)
                for (int i1 = 0; i1 < d_out; ++i1)
                    om(i * d + j, i1 * d + j1) = f(i, i1) / double(d);
        }
    DensityOperator op(om, {d_out, d});
    auto eigs = spectral_decompose(om);
    const bool pure = eigs[0].first > 1.0 - 1e-8;
    return ChoiState(op, pure);
}

CombResult comb_compose(const std::vector<Superchannel>& teeth,
                        std::vector<ProgramSlot>& slots, const DensityOperator& rho) {
    if (teeth.empty() || teeth.size() != slots.size())
        throw std::invalid_argument("comb_compose: one program slot per tooth required");
    const int d = rho.dim();
    for (const Superchannel& t : teeth) {
        if (t.slot_dim != d)
            throw std::invalid_argument("comb_compose: tooth dimension chain mismatch");
        std::vector<int> kept = kept_wires(t.traced_wires);
        if (kept.size() != 1 || kept[0] != 0)
            throw std::invalid_argument("comb_compose: teeth must output on the slot wire");
    }

    std::vector<TranscriptEvent> transcript;
    RandomSource rng(0);  // byproducts are corrected, so outcomes never matter
    std::optional<ProgramSlot> acc;
    int step = 0, peak = 0;
    const int n_qubits = [&] {
        int n = 0, p = 1;
        while (p < d) p *= 2, ++n;
        return n;
    }();

    for (size_t k = 0; k < teeth.size(); ++k) {
        if (slots[k].consumed) throw std::runtime_error("comb_compose: consumed slot");
        if (slots[k].tail_dim() != d || slots[k].head_dim() != d)
            throw std::invalid_argument("comb_compose: slot dimension chain mismatch");

        KrausChannel e = slots[k].whitebox
                             ? KrausChannel({slots[k].whitebox->matrix})
                             : (slots[k].whitebox_channel ? *slots[k].whitebox_channel
                                                          : kraus_from_choi(slots[k].choi));
        slots[k].consumed = true;
        ChoiState transformed = transformed_choi(teeth[k], e);
        peak = std::max(peak, superchannel_qubits(n_qubits, false));

        ProgramSlot tooth{transformed, std::nullopt, std::nullopt, std::nullopt,
                          false,       "tooth",      2 * n_qubits};
        KrausChannel tk = kraus_from_choi(transformed);
        if (tk.rank() == 1)
            tooth.whitebox = Unitary(tk.kraus_ops[0], "tooth");
        else
            tooth.whitebox_channel = tk;

        if (!acc) {
            acc = std::move(tooth);
            transcript.push_back(
                {step++, "superchannel", -1, "", superchannel_qubits(n_qubits, false)});
            continue;
        }

        if (acc->whitebox && tooth.whitebox) {
            // Teleportation-based composition with byproduct correction.
            CompositionResult comp = compose_deterministic(*acc, tooth, rng);
            acc = ProgramSlot{comp.choi,
                              Unitary(tooth.whitebox->matrix * acc->whitebox->matrix, "comb"),
                              std::nullopt,
                              std::nullopt,
                              false,
                              "comb",
                              2 * n_qubits};
            peak = std::max(peak, comp.qubits_used);
            transcript.push_back({step++, "superchannel+compose", comp.outcome_index,
                                         "byproduct-corrected", comp.qubits_used});
        } else {
            // Non-unitary tooth: white-box Kraus composition.
            KrausChannel first = acc->whitebox_channel ? *acc->whitebox_channel
                                                       : KrausChannel({acc->whitebox->matrix});
            std::vector<Mat> ops;
            for (const Mat& k2 : tk.kraus_ops)
                for (const Mat& k1 : first.kraus_ops) ops.push_back(k2 * k1);
            KrausChannel composed(ops);
            acc = ProgramSlot{choi_of_channel(composed), std::nullopt, composed,
                              std::nullopt,              false,        "comb",
                              2 * n_qubits};
            transcript.push_back({step++, "superchannel+kraus-compose", -1, "",
                                         superchannel_qubits(n_qubits, false)});
        }
    }

    return CombResult{apply_via_choi(acc->choi, rho), std::move(transcript), peak};
}

Superchannel random_superchannel(int input_dim, int ancilla_dim, RandomSource& rng) {
    if (input_dim < 1 || ancilla_dim < 1)
        throw std::invalid_argument("random_superchannel: dims must be >= 1");
    Unitary u = haar_random_unitary(input_dim * ancilla_dim, rng);
    Unitary v = haar_random_unitary(input_dim * ancilla_dim, rng);
    return Superchannel(std::move(u), std::move(v), input_dim, ancilla_dim);
}

int superchannel_qubits(int program_qubits, bool reduced) {
    if (program_qubits < 1)
        throw std::invalid_argument("superchannel_qubits: program_qubits must be >= 1");
    return 2 * program_qubits + (reduced ? 2 : 4);
}

namespace {

Mat matrix_from_json(const nlohmann::json& j) {
    const auto rows = j.size();
    Mat m(rows, rows);
    for (size_t r = 0; r < rows; ++r) {
        if (j[r].size() != 2 * rows)
            throw std::invalid_argument("superchannel_from_json_text: matrix must be square "
                                        "with interleaved re/im entries");
        for (size_t c = 0; c < rows; ++c)
            m(static_cast<int>(r), static_cast<int>(c)) =
                cd(j[r][2 * c].get<double>(), j[r][2 * c + 1].get<double>());
    }
    return m;
}

}  // namespace

Superchannel superchannel_from_json_text(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    Mat pre = matrix_from_json(j.at("pre"));
    Mat post = matrix_from_json(j.at("post"));
    const int slot_dim = j.at("slot_dim").get<int>();
    const int ancilla_dim = j.at("ancilla_dim").get<int>();
    std::vector<int> traced = {1};
    if (j.contains("traced_wires")) traced = j["traced_wires"].get<std::vector<int>>();
    return Superchannel(Unitary(pre, "pre"), Unitary(post, "post"), slot_dim, ancilla_dim,
                        traced);
}

}  // namespace qvn
