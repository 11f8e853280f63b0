#include "qvn/network.hpp"

#include "qvn/gates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <utility>

namespace qvn {

namespace {

int qubit_count(int d) {
    int n = 0, p = 1;
    while (p < d) {
        p *= 2;
        ++n;
    }
    if (p != d) throw std::invalid_argument("network: dimension is not a power of 2");
    return n;
}

// --- bit-level channel simulation -------------------------------------------

struct FlyingBit {
    int basis;  // 0 = Z, 1 = X
    int bit;
    bool scrambled = false;  // replaced by I/2: any measurement is uniform
};

FlyingBit transmit(FlyingBit q, const ChannelModel& channel, RandomSource& rng) {
    switch (channel.kind) {
        case ChannelModel::Kind::Ideal:
            return q;
        case ChannelModel::Kind::Depolarizing:
            if (rng.uniform() < channel.p) q.scrambled = true;
            return q;
        case ChannelModel::Kind::Eavesdropper:
            if (rng.uniform() < channel.f) {
                const int e_basis = rng.bit() ? 1 : 0;
                const int e_bit = (!q.scrambled && e_basis == q.basis)
                                      ? q.bit
                                      : (rng.bit() ? 1 : 0);
                return FlyingBit{e_basis, e_bit, false};  // resent afresh
            }
            return q;
    }
    throw std::logic_error("transmit: unreachable");
}

int measure_flying(const FlyingBit& q, int basis, RandomSource& rng) {
    if (q.scrambled || basis != q.basis) return rng.bit() ? 1 : 0;
    return q.bit;
}

Bb84Result sift_and_test(const std::vector<int>& alice, const std::vector<int>& bob,
                         double abort_threshold) {
    // Alternate sifted positions: even → public test, odd → key.
    Bb84Result result;
    result.sifted_length = static_cast<int>(alice.size());
    int test_count = 0, errors = 0;
    for (size_t i = 0; i < alice.size(); ++i) {
        if (i % 2 == 0) {
            ++test_count;
            if (alice[i] != bob[i]) ++errors;
        } else {
            result.key.push_back(alice[i]);
        }
    }
    result.qber = test_count > 0 ? double(errors) / test_count : 0.0;
    result.aborted = result.qber > abort_threshold;
    if (result.aborted) result.key.clear();
    return result;
}

// --- gate-list serialization -------------------------------------------------

std::string serialize_instructions(const std::vector<GateInstruction>& instructions) {
    std::ostringstream out;
    for (const GateInstruction& g : instructions) {
        out << g.label;
        for (int t : g.targets) out << ' ' << t;
        out << ';';
    }
    return out.str();
}

std::vector<GateInstruction> deserialize_instructions(const std::string& text) {
    std::vector<GateInstruction> out;
    std::istringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ';')) {
        if (item.empty()) continue;
        std::istringstream fields(item);
        GateInstruction g;
        fields >> g.label;
        int t;
        while (fields >> t) g.targets.push_back(t);
        if (g.label.empty()) throw std::runtime_error("deserialize: malformed instruction");
        out.push_back(std::move(g));
    }
    return out;
}

std::vector<int> bits_of(const std::string& text) {
    std::vector<int> bits;
    for (unsigned char c : text)
        for (int k = 7; k >= 0; --k) bits.push_back((c >> k) & 1);
    return bits;
}

std::string text_of(const std::vector<int>& bits) {
    if (bits.size() % 8 != 0) throw std::runtime_error("text_of: bit count not a byte multiple");
    std::string text;
    for (size_t i = 0; i < bits.size(); i += 8) {
        int c = 0;
        for (int k = 0; k < 8; ++k) c = (c << 1) | bits[i + k];
        text.push_back(static_cast<char>(c));
    }
    return text;
}

// Shared implementation of schemes 1 and 2; they differ in the key source.
BitsDownload send_bits_impl(int scheme, const std::vector<GateInstruction>& host_whitebox,
                            int width, const ChannelModel& channel, RandomSource& rng) {
    if (host_whitebox.empty())
        throw std::invalid_argument("send_bits: empty instruction list");
    if (width < 1) throw std::invalid_argument("send_bits: width must be >= 1");

    const std::string message = serialize_instructions(host_whitebox);
    const std::vector<int> plain = bits_of(message);

    TranscriptRecord record;
    record.scheme = scheme;
    record.qubits_transmitted = 0;  // program qubits; key photons are not programs

    // Grow the key until it covers the message (one-time pad needs equal length).
    std::vector<int> key;
    double qber = 0.0;
    int rounds = 0, sifted_total = 0;
    while (key.size() < plain.size()) {
        const int n_raw = std::max<int>(100, 8 * static_cast<int>(plain.size()));
        Bb84Result exchange = scheme == 1 ? bb84_exchange(n_raw, channel, rng)
                                          : bb84_entangled_exchange(n_raw, channel, rng);
        qber = exchange.qber;
        sifted_total += exchange.sifted_length;
        if (exchange.aborted) {
            record.qber = qber;
            record.outcome = "abort";
            return BitsDownload{std::nullopt, record};
        }
        key.insert(key.end(), exchange.key.begin(), exchange.key.end());
        if (++rounds > 16) throw std::runtime_error("send_bits: key generation stalled");
    }

    std::vector<int> cipher(plain.size());
    for (size_t i = 0; i < plain.size(); ++i) cipher[i] = plain[i] ^ key[i];
    // ... classical transmission ...
    std::vector<int> received(cipher.size());
    for (size_t i = 0; i < cipher.size(); ++i) received[i] = cipher[i] ^ key[i];

    record.bits_transmitted = static_cast<int>(cipher.size());
    record.ebits_consumed = scheme == 2 ? sifted_total : 0;
    record.qber = qber;
    record.outcome = "success";
    return BitsDownload{seal_tape(deserialize_instructions(text_of(received)), width),
                        record};
}

// Apply a one-qubit channel to every wire in `targets` of a density matrix
// whose subsystems are all qubits.
Mat apply_per_qubit(const KrausChannel& channel, Mat rho, const std::vector<int>& dims,
                    const std::vector<int>& targets) {
    for (int w : targets) {
        Mat next = Mat::Zero(rho.rows(), rho.cols());
        for (const Mat& k : channel.kraus_ops) {
            Mat ke = embed(k, {w}, dims);
            next += ke * rho * ke.adjoint();
        }
        rho = next;
    }
    return rho;
}

// A unitary whose first column is v (Gram–Schmidt completion).
Mat unitary_with_first_column(const Vec& v) {
    const int n = static_cast<int>(v.size());
    Mat u(n, n);
    u.col(0) = v.normalized();
    int filled = 1;
    for (int e = 0; e < n && filled < n; ++e) {
        Vec cand = Vec::Zero(n);
        cand(e) = 1.0;
        for (int c = 0; c < filled; ++c) cand -= u.col(c).dot(cand) * u.col(c);
        if (cand.norm() > 1e-8) u.col(filled++) = cand.normalized();
    }
    if (filled != n) throw std::logic_error("unitary_with_first_column: completion failed");
    return u;
}

}  // namespace

ChannelModel ChannelModel::ideal() { return ChannelModel{Kind::Ideal, 0.0, 0.0}; }

ChannelModel ChannelModel::depolarizing(double p) {
    if (p < 0.0 || p > 1.0)
        throw std::invalid_argument("ChannelModel: p must lie in [0, 1]");
    return ChannelModel{Kind::Depolarizing, p, 0.0};
}

ChannelModel ChannelModel::eavesdropper(double f) {
    if (f < 0.0 || f > 1.0)
        throw std::invalid_argument("ChannelModel: f must lie in [0, 1]");
    return ChannelModel{Kind::Eavesdropper, 0.0, f};
}

KrausChannel channel_kraus(const ChannelModel& channel) {
    const Mat i2 = gates::identity(2);
    switch (channel.kind) {
        case ChannelModel::Kind::Ideal:
            return KrausChannel({i2});
        case ChannelModel::Kind::Depolarizing: {
            const double p = channel.p;
            return KrausChannel({std::sqrt(1.0 - 3.0 * p / 4.0) * i2,
                                 std::sqrt(p / 4.0) * gates::pauli_x(),
                                 std::sqrt(p / 4.0) * gates::pauli_y(),
                                 std::sqrt(p / 4.0) * gates::pauli_z()});
        }
        case ChannelModel::Kind::Eavesdropper: {
            const double f = channel.f;
            Vec plus(2), minus(2);
            plus << 1 / std::sqrt(2.0), 1 / std::sqrt(2.0);
            minus << 1 / std::sqrt(2.0), -1 / std::sqrt(2.0);
            Mat p0 = Mat::Zero(2, 2), p1 = Mat::Zero(2, 2);
            p0(0, 0) = 1.0;
            p1(1, 1) = 1.0;
            std::vector<Mat> ops = {std::sqrt(1.0 - f) * i2, std::sqrt(f / 2.0) * p0,
                                    std::sqrt(f / 2.0) * p1,
                                    std::sqrt(f / 2.0) * Mat(plus * plus.adjoint()),
                                    std::sqrt(f / 2.0) * Mat(minus * minus.adjoint())};
            if (channel.f >= 1.0) ops.erase(ops.begin());
            return KrausChannel(ops);
        }
    }
    throw std::logic_error("channel_kraus: unreachable");
}

VerificationPlan::VerificationPlan(double epsilon_, double delta_)
    : epsilon(epsilon_), delta(delta_), n_samples(sample_count(epsilon_, delta_)) {}

int sample_count(double epsilon, double delta) {
    if (epsilon <= 0.0 || epsilon >= 1.0 || delta <= 0.0 || delta >= 1.0)
        throw std::invalid_argument("sample_count: epsilon and delta must lie in (0, 1)");
    // Tiny slack keeps exact-integer products from rounding up spuriously.
    return static_cast<int>(std::ceil((1.0 / epsilon) * std::log(1.0 / delta) - 1e-9));
}

Bb84Result bb84_exchange(int n_raw, const ChannelModel& channel, RandomSource& rng,
                         double abort_threshold) {
    if (n_raw < 100) throw std::invalid_argument("bb84_exchange: n_raw must be >= 100");
    std::vector<int> alice, bob;
    for (int i = 0; i < n_raw; ++i) {
        const int a_basis = rng.bit() ? 1 : 0;
        const int a_bit = rng.bit() ? 1 : 0;
        FlyingBit q = transmit(FlyingBit{a_basis, a_bit, false}, channel, rng);
        const int b_basis = rng.bit() ? 1 : 0;
        const int b_bit = measure_flying(q, b_basis, rng);
        if (a_basis == b_basis) {
            alice.push_back(a_bit);
            bob.push_back(b_bit);
        }
    }
    return sift_and_test(alice, bob, abort_threshold);
}

Bb84Result bb84_entangled_exchange(int n_raw, const ChannelModel& channel, RandomSource& rng,
                                   double abort_threshold) {
    if (n_raw < 100)
        throw std::invalid_argument("bb84_entangled_exchange: n_raw must be >= 100");
    std::vector<int> alice, bob;
    for (int i = 0; i < n_raw; ++i) {
        // Alice measures her Bell half first: uniform bit, and the user's
        // half collapses to her outcome in her basis.
        const int a_basis = rng.bit() ? 1 : 0;
        const int a_bit = rng.bit() ? 1 : 0;
        FlyingBit q = transmit(FlyingBit{a_basis, a_bit, false}, channel, rng);
        const int b_basis = rng.bit() ? 1 : 0;
        const int b_bit = measure_flying(q, b_basis, rng);
        if (a_basis == b_basis) {
            alice.push_back(a_bit);
            bob.push_back(b_bit);
        }
    }
    return sift_and_test(alice, bob, abort_threshold);
}

SealedTape::SealedTape(std::vector<GateInstruction> instructions, int width)
    : instructions_(std::move(instructions)), width_(width) {}

SealedTape seal_tape(std::vector<GateInstruction> instructions, int width) {
    return SealedTape(std::move(instructions), width);
}

PureState SealedTape::execute(const PureState& input) const {
    if (static_cast<int>(input.dims.size()) != width_)
        throw std::invalid_argument("SealedTape::execute: wire count mismatch");
    Vec state = input.amplitudes;
    for (const GateInstruction& g : instructions_) {
        for (int t : g.targets)
            if (t < 0 || t >= width_)
                throw std::invalid_argument("SealedTape::execute: target out of range");
        state = apply_on(gates::by_label(g.label), g.targets, input.dims, state);
    }
    return PureState(state, input.dims);
}

BitsDownload scheme1_send_bits(const std::vector<GateInstruction>& host_whitebox, int width,
                               const ChannelModel& channel, RandomSource& rng) {
    return send_bits_impl(1, host_whitebox, width, channel, rng);
}

BitsDownload scheme2_send_bits(const std::vector<GateInstruction>& host_whitebox, int width,
                               const ChannelModel& channel, RandomSource& rng) {
    return send_bits_impl(2, host_whitebox, width, channel, rng);
}

ProgramDownload scheme3_send_qubits(const ProgramSlot& host_slot, const ChannelModel& channel,
                                    RandomSource& rng) {
    (void)rng;  // noise acts at the density level; no sampling required
    const int d = host_slot.head_dim();
    if (host_slot.tail_dim() != d)
        throw std::invalid_argument("scheme3: square programs only");
    const int n = qubit_count(d);
    const std::vector<int> wire_dims(2 * n, 2);
    std::vector<int> all_wires(2 * n);
    for (int w = 0; w < 2 * n; ++w) all_wires[w] = w;

    Mat noisy = apply_per_qubit(channel_kraus(channel), host_slot.choi.operator_.matrix,
                                wire_dims, all_wires);
    const bool ideal = channel.kind == ChannelModel::Kind::Ideal ||
                       (channel.kind == ChannelModel::Kind::Depolarizing && channel.p == 0.0) ||
                       (channel.kind == ChannelModel::Kind::Eavesdropper && channel.f == 0.0);
    ChoiState downloaded(DensityOperator(noisy, {d, d}),
                         ideal && host_slot.choi.purity_hint);

    // Black-box at the user: no whitebox travels with the photons.
    ProgramSlot slot{downloaded, std::nullopt, std::nullopt, std::nullopt,
                     false,      host_slot.label + "@user", 2 * n};

    TranscriptRecord record;
    record.scheme = 3;
    record.qubits_transmitted = 2 * n;
    record.ebits_consumed = 2 * n;        // user-side teleportation into memory
    record.bits_transmitted = 4 * n;      // teleportation corrections
    record.outcome = "success";
    return ProgramDownload{std::move(slot), record};
}

ProgramDownload scheme4_send_via_ebits(const ProgramSlot& host_slot,
                                       const ChannelModel& channel, RandomSource& rng,
                                       int max_retries) {
    if (!host_slot.whitebox && !host_slot.choi.purity_hint)
        throw std::invalid_argument("scheme4: host must know the preparation unitary");
    const int d = host_slot.head_dim();
    if (host_slot.tail_dim() != d)
        throw std::invalid_argument("scheme4: square programs only");
    const int n = qubit_count(d);
    const int nq = 2 * n;       // program-state qubits
    const int big = d * d;      // program-state dimension

    // |U⟩ = V|0…0⟩ with V known to the host.
    Mat v = unitary_with_first_column(host_slot.choi.pure_vector());

    // nq ebits: jointly the maximally entangled state on (host, user).
    Vec omega = bell_vector(big);
    Mat joint = omega * omega.adjoint();
    const std::vector<int> wire_dims(2 * nq, 2);
    std::vector<int> user_wires(nq), host_wires(nq);
    for (int w = 0; w < nq; ++w) {
        host_wires[w] = w;
        user_wires[w] = nq + w;
    }
    joint = apply_per_qubit(channel_kraus(channel), joint, wire_dims, user_wires);

    // Host-side Vᵗ followed by the binary |0…0⟩ injection PVM.
    Mat vt = embed(v.transpose(), host_wires, wire_dims);
    joint = vt * joint * vt.adjoint();
    Mat p0 = Mat::Zero(big, big);
    p0(0, 0) = 1.0;
    Pvm inject({p0, Mat(Mat::Identity(big, big) - p0)});
    DensityOperator joint_rho(joint, wire_dims);
    auto branches = measure_pvm(joint_rho, inject, host_wires);
    const double p_accept = branches[0].probability;

    TranscriptRecord record;
    record.scheme = 4;
    int attempts = 0;
    bool accepted = false;
    while (attempts < max_retries) {
        ++attempts;
        if (rng.uniform() < p_accept) {
            accepted = true;
            break;
        }
    }
    record.retries = attempts - 1;
    record.qubits_transmitted = nq * attempts;  // user ebit halves fly once per attempt
    record.ebits_consumed = nq * attempts;

    if (!accepted || !branches[0].state) {
        record.outcome = "abort";
        return ProgramDownload{std::nullopt, record};
    }

    DensityOperator user = partial_trace(*branches[0].state, user_wires);
    const bool ideal = channel.kind == ChannelModel::Kind::Ideal ||
                       (channel.kind == ChannelModel::Kind::Depolarizing && channel.p == 0.0) ||
                       (channel.kind == ChannelModel::Kind::Eavesdropper && channel.f == 0.0);
    ChoiState downloaded(DensityOperator(user.matrix, {d, d}), ideal);
    ProgramSlot slot{downloaded, std::nullopt, std::nullopt, std::nullopt,
                     false,      host_slot.label + "@user", nq};
    record.outcome = "success";
    return ProgramDownload{std::move(slot), record};
}

int ebit_download_qubits(int program_qubits) {
    if (program_qubits < 1)
        throw std::invalid_argument("ebit_download_qubits: program_qubits must be >= 1");
    return 8 * program_qubits + 1;
}

VerificationResult verify_program(std::vector<ProgramSlot>& samples,
                                  const VerificationPlan& plan, const Unitary& claimed,
                                  RandomSource& rng) {
    if (static_cast<int>(samples.size()) < plan.n_samples)
        throw std::invalid_argument("verify_program: need at least " +
                                    std::to_string(plan.n_samples) + " samples, got " +
                                    std::to_string(samples.size()));
    const int d = claimed.dim();
    const Pvm readout = Pvm::from_basis(claimed.matrix);

    int failures = 0;
    for (int s = 0; s < plan.n_samples; ++s) {
        ProgramSlot& slot = samples[s];
        if (slot.tail_dim() != d)
            throw std::invalid_argument("verify_program: sample dimension mismatch");
        const int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(d)));
        Vec basis_vec = Vec::Zero(d);
        basis_vec(b) = 1.0;
        auto branches = write_inject(slot, PureState(basis_vec, {d}));

        std::vector<double> branch_probs;
        for (const auto& br : branches) branch_probs.push_back(br.probability);
        const int which = sample_index(branch_probs, rng);
        if (!branches[which].head) continue;
        const std::vector<double> probs = read_out(*branches[which].head, readout);
        const int outcome = sample_index(probs, rng);

        // A faithful program answers b on the accept branch and never
        // answers b on the complement branch.
        const bool failed = branches[which].outcome == 0 ? (outcome != b) : (outcome == b);
        if (failed) ++failures;
    }

    VerificationResult result;
    result.failures = failures;
    result.samples_used = plan.n_samples;
    result.accepted = failures == 0;
    result.fidelity_bound = result.accepted ? 1.0 - plan.epsilon : 0.0;
    return result;
}

}  // namespace qvn
