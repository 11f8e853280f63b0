// Simulated quantum internet between a host and a user: BB84 key exchange,
// the four program download schemes (bits via qubits/ebits, program qubits
// directly, program qubits via ebits), channel noise and intercept-resend
// eavesdropping, and sample-budgeted program verification.
#pragma once

#include "qvn/choi.hpp"
#include "qvn/core.hpp"
#include "qvn/memory.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qvn {

struct ChannelModel {
    enum class Kind { Ideal, Depolarizing, Eavesdropper };

    Kind kind = Kind::Ideal;
    double p = 0.0;  // depolarizing probability per qubit
    double f = 0.0;  // intercept-resend fraction

    static ChannelModel ideal();
    static ChannelModel depolarizing(double p);
    static ChannelModel eavesdropper(double f);
};

// Per-qubit channel action as Kraus operators (depolarizing: replace with
// I/2 w.p. p; eavesdropper: measure-and-resend in a random Z/X basis w.p. f).
KrausChannel channel_kraus(const ChannelModel& channel);

enum class DownloadScheme : int {
    QubitsToBits = 1,  // gate bits one-time-padded with a BB84 key
    EbitsToBits = 2,   // same, key from measured Bell pairs
    QubitsToQubits = 3,  // |U⟩ photons teleported into memory
    EbitsToQubits = 4,   // ebits + host-side Vᵗ and |0…0⟩ projection
};

struct VerificationPlan {
    double epsilon = 0.1;  // infidelity tolerance
    double delta = 0.05;   // confidence failure probability
    int n_samples = 0;

    VerificationPlan(double epsilon_, double delta_);
};

// N = ceil((1/ε)·ln(1/δ)); the scaling constant is fixed at 1.
int sample_count(double epsilon, double delta);

struct TranscriptRecord {
    int scheme = 0;
    int qubits_transmitted = 0;  // program-carrying qubits only
    int bits_transmitted = 0;
    int ebits_consumed = 0;
    int retries = 0;
    double qber = 0.0;
    std::string outcome;  // "success" | "abort"
};

struct Bb84Result {
    std::vector<int> key;
    double qber = 0.0;
    bool aborted = false;
    int sifted_length = 0;
};

// Prepare-and-measure BB84 with random Z/X bases; half the sifted bits are
// publicly compared to estimate the QBER, the rest become the key.
Bb84Result bb84_exchange(int n_raw, const ChannelModel& channel, RandomSource& rng,
                         double abort_threshold = 0.11);
// Entanglement-based variant (measured Bell pairs).
Bb84Result bb84_entangled_exchange(int n_raw, const ChannelModel& channel, RandomSource& rng,
                                   double abort_threshold = 0.11);

struct GateInstruction {
    std::string label;         // gate lookup label (H, T, CZ, ...)
    std::vector<int> targets;  // wire indices
};

// Execute-only instruction tape: the user-side control device replays the
// gates without exposing them. There is no accessor for the instructions.
class SealedTape {
public:
    PureState execute(const PureState& input) const;
    int instruction_count() const { return static_cast<int>(instructions_.size()); }
    int width() const { return width_; }

private:
    friend SealedTape seal_tape(std::vector<GateInstruction> instructions, int width);
    SealedTape(std::vector<GateInstruction> instructions, int width);

    std::vector<GateInstruction> instructions_;
    int width_ = 1;
};

SealedTape seal_tape(std::vector<GateInstruction> instructions, int width);

struct BitsDownload {
    std::optional<SealedTape> tape;
    TranscriptRecord record;
};

// Scheme 1: serialize the gate list to bits, one-time-pad with a BB84 key,
// transmit, and reconstruct a sealed tape on the user side.
BitsDownload scheme1_send_bits(const std::vector<GateInstruction>& host_whitebox, int width,
                               const ChannelModel& channel, RandomSource& rng);
// Scheme 2: as scheme 1 with an entanglement-based key.
BitsDownload scheme2_send_bits(const std::vector<GateInstruction>& host_whitebox, int width,
                               const ChannelModel& channel, RandomSource& rng);

struct ProgramDownload {
    std::optional<ProgramSlot> slot;
    TranscriptRecord record;
};

// Scheme 3: the host prepares flying qubits in |U⟩; they traverse the
// channel and are teleported into the user's memory. The downloaded slot is
// black-box (no whitebox description travels with it).
ProgramDownload scheme3_send_qubits(const ProgramSlot& host_slot, const ChannelModel& channel,
                                    RandomSource& rng);

// Scheme 4: ebits are distributed; the host applies Vᵗ (|U⟩ = V|0…0⟩) and a
// binary |0…0⟩ injection on its halves. Rejects retry with fresh ebits up to
// the cap.
ProgramDownload scheme4_send_via_ebits(const ProgramSlot& host_slot,
                                       const ChannelModel& channel, RandomSource& rng,
                                       int max_retries = 64);

// Total qubits involved in an ebit download of an n-qubit program:
// 2n host + 2n flying + 2n user memory + 2n teleport + 1 injection ancilla.
int ebit_download_qubits(int program_qubits);

struct VerificationResult {
    bool accepted = false;
    int failures = 0;
    int samples_used = 0;
    double fidelity_bound = 0.0;  // behavioral fidelity ≥ bound at confidence 1−δ
};

// Behavioral verification: each sample slot receives a random standard-basis
// injection and a readout in the basis published for the claimed program;
// accept iff no sample contradicts the claimed statistics.
VerificationResult verify_program(std::vector<ProgramSlot>& samples,
                                  const VerificationPlan& plan, const Unitary& claimed,
                                  RandomSource& rng);

}  // namespace qvn
