// Dense complex linear algebra and elementary quantum operations:
// tensor products, partial trace, projective measurement with full branch
// enumeration, spectral decomposition, Haar-random sampling.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace qvn {

using cd = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;

// Global tolerances: algebraic identities vs. iterative eigensolvers.
inline constexpr double kTol = 1e-10;
inline constexpr double kEigTol = 1e-8;

// Deterministic generator fixed repo-wide (mt19937_64). Identical seeds
// reproduce identical transcripts bit-for-bit.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed) : gen_(seed) {}

    double uniform() { return unif_(gen_); }
    double normal() { return norm_(gen_); }
    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(gen_);
    }
    bool bit() { return below(2) == 1; }

private:
    std::mt19937_64 gen_;
    std::uniform_real_distribution<double> unif_{0.0, 1.0};
    std::normal_distribution<double> norm_{0.0, 1.0};
};

// Subsystem index convention (fixed repo-wide): dims[0] is the leftmost
// (most significant) factor of the Kronecker product, so |a⟩⊗|b⟩ lives at
// linear index a*dim_b + b.  All circuit figures are mapped to this order.
int product_dim(const std::vector<int>& dims);

// Normalized amplitude vector over subsystems `dims` (product = length).
struct PureState {
    Vec amplitudes;
    std::vector<int> dims;

    PureState(Vec amps, std::vector<int> dims_);
    int dim() const { return static_cast<int>(amplitudes.size()); }
    int num_subsystems() const { return static_cast<int>(dims.size()); }
};

// PSD trace-1 operator over subsystems `dims`.
struct DensityOperator {
    Mat matrix;
    std::vector<int> dims;

    DensityOperator(Mat m, std::vector<int> dims_);
    int dim() const { return static_cast<int>(matrix.rows()); }
};

struct Unitary {
    Mat matrix;
    std::string label;

    explicit Unitary(Mat m, std::string label_ = "");
    int dim() const { return static_cast<int>(matrix.rows()); }
};

// CPTP map as a finite list of Kraus operators, Σ Kᵢ†Kᵢ = 1.
struct KrausChannel {
    std::vector<Mat> kraus_ops;

    explicit KrausChannel(std::vector<Mat> ops);
    int rank() const { return static_cast<int>(kraus_ops.size()); }
    int dim_in() const { return static_cast<int>(kraus_ops.front().cols()); }
    int dim_out() const { return static_cast<int>(kraus_ops.front().rows()); }
    DensityOperator apply(const DensityOperator& rho) const;
};

// Projective measurement: orthogonal idempotents summing to identity.
struct Pvm {
    std::vector<Mat> projectors;

    explicit Pvm(std::vector<Mat> projs);
    int dim() const { return static_cast<int>(projectors.front().rows()); }
    int num_outcomes() const { return static_cast<int>(projectors.size()); }

    static Pvm computational(int d);
    // Rank-1 PVM from an orthonormal basis given as matrix columns.
    static Pvm from_basis(const Mat& basis);
};

// One branch of a full measurement enumeration. Zero-probability branches
// carry no post-state instead of a renormalized 0/0.
struct Branch {
    double probability = 0.0;
    std::optional<PureState> state;
};

struct DensityBranch {
    double probability = 0.0;
    std::optional<DensityOperator> state;
};

// --- elementary operations -------------------------------------------------

PureState tensor_product(const PureState& a, const PureState& b);
DensityOperator tensor_product(const DensityOperator& a, const DensityOperator& b);
Mat kron(const Mat& a, const Mat& b);

DensityOperator density_of(const PureState& psi);

// Reduced operator on the kept subsystems (ascending index order).
DensityOperator partial_trace(const DensityOperator& rho, const std::vector<int>& keep);
// Same contraction on a bare matrix (no density-operator validation).
Mat partial_trace_matrix(const Mat& m, const std::vector<int>& dims,
                         const std::vector<int>& keep);

// Apply an operator acting on the `targets` subsystems to a full-space vector.
Vec apply_on(const Mat& op, const std::vector<int>& targets,
             const std::vector<int>& dims, const Vec& v);
// Full-space embedding of an operator on `targets` (dense; small dims only).
Mat embed(const Mat& op, const std::vector<int>& targets, const std::vector<int>& dims);

std::vector<Branch> measure_pvm(const PureState& psi, const Pvm& pvm,
                                const std::vector<int>& targets);
std::vector<DensityBranch> measure_pvm(const DensityOperator& rho, const Pvm& pvm,
                                       const std::vector<int>& targets);

// Draw a branch index according to the branch probabilities.
int sample_branch(const std::vector<Branch>& branches, RandomSource& rng);
int sample_index(const std::vector<double>& probabilities, RandomSource& rng);

// Eigenpairs of a Hermitian operator, eigenvalues sorted descending.
std::vector<std::pair<double, Vec>> spectral_decompose(const Mat& h);

// QR of a Ginibre matrix with phase fix: Haar-distributed.
Unitary haar_random_unitary(int d, RandomSource& rng);
PureState haar_random_state(int d, RandomSource& rng);
DensityOperator random_density(int d, RandomSource& rng);
KrausChannel random_channel(int d, int rank, RandomSource& rng);

double fidelity(const PureState& a, const PureState& b);
double fidelity(const DensityOperator& a, const DensityOperator& b);
double fidelity(const DensityOperator& a, const PureState& b);

// (1/√d) Σ |i,i⟩
PureState bell_state(int d);
Vec bell_vector(int d);

// --- small checks ----------------------------------------------------------

bool is_hermitian(const Mat& m, double tol = kTol);
bool is_unitary(const Mat& m, double tol = kTol);
double frobenius_distance(const Mat& a, const Mat& b);

}  // namespace qvn
