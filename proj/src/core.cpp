#include "qvn/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qvn {

int product_dim(const std::vector<int>& dims) {
    int p = 1;
    for (int d : dims) p *= d;
    return p;
}

namespace {

// Decompose a linear index into per-subsystem digits, dims[0] most significant.
void digits_of(int index, const std::vector<int>& dims, std::vector<int>& out) {
    out.resize(dims.size());
    for (int k = static_cast<int>(dims.size()) - 1; k >= 0; --k) {
        out[k] = index % dims[k];
        index /= dims[k];
    }
}

int index_of(const std::vector<int>& digits, const std::vector<int>& dims) {
    int idx = 0;
    for (size_t k = 0; k < dims.size(); ++k) idx = idx * dims[k] + digits[k];
    return idx;
}

std::vector<int> strides_of(const std::vector<int>& dims) {
    std::vector<int> s(dims.size(), 1);
    for (int k = static_cast<int>(dims.size()) - 2; k >= 0; --k)
        s[k] = s[k + 1] * dims[k + 1];
    return s;
}

}  // namespace

PureState::PureState(Vec amps, std::vector<int> dims_)
    : amplitudes(std::move(amps)), dims(std::move(dims_)) {
    if (product_dim(dims) != amplitudes.size())
        throw std::invalid_argument("PureState: product(dims) != length(amplitudes)");
    if (std::abs(amplitudes.squaredNorm() - 1.0) > kTol)
        throw std::invalid_argument("PureState: not normalized");
}

DensityOperator::DensityOperator(Mat m, std::vector<int> dims_)
    : matrix(std::move(m)), dims(std::move(dims_)) {
    if (matrix.rows() != matrix.cols() || product_dim(dims) != matrix.rows())
        throw std::invalid_argument("DensityOperator: dimension mismatch");
    if (!is_hermitian(matrix))
        throw std::invalid_argument("DensityOperator: not Hermitian");
    if (std::abs(matrix.trace().real() - 1.0) > kTol)
        throw std::invalid_argument("DensityOperator: trace != 1");
    Eigen::SelfAdjointEigenSolver<Mat> es(matrix, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -kTol)
        throw std::invalid_argument("DensityOperator: negative eigenvalue");
}

Unitary::Unitary(Mat m, std::string label_) : matrix(std::move(m)), label(std::move(label_)) {
    if (!is_unitary(matrix))
        throw std::invalid_argument("Unitary: U†U != 1");
}

KrausChannel::KrausChannel(std::vector<Mat> ops) : kraus_ops(std::move(ops)) {
    if (kraus_ops.empty()) throw std::invalid_argument("KrausChannel: empty operator list");
    const int din = dim_in();
    Mat sum = Mat::Zero(din, din);
    for (const Mat& k : kraus_ops) {
        if (k.cols() != din || k.rows() != kraus_ops.front().rows())
            throw std::invalid_argument("KrausChannel: inconsistent operator shapes");
        sum += k.adjoint() * k;
    }
    if (frobenius_distance(sum, Mat::Identity(din, din)) > 1e-8)
        throw std::invalid_argument("KrausChannel: Σ Kᵢ†Kᵢ != 1");
}

DensityOperator KrausChannel::apply(const DensityOperator& rho) const {
    if (rho.dim() != dim_in())
        throw std::invalid_argument("KrausChannel::apply: dimension mismatch");
    Mat out = Mat::Zero(dim_out(), dim_out());
    for (const Mat& k : kraus_ops) out += k * rho.matrix * k.adjoint();
    return DensityOperator(out, {dim_out()});
}

Pvm::Pvm(std::vector<Mat> projs) : projectors(std::move(projs)) {
    if (projectors.empty()) throw std::invalid_argument("Pvm: empty projector list");
    const int d = dim();
    Mat sum = Mat::Zero(d, d);
    for (size_t i = 0; i < projectors.size(); ++i) {
        const Mat& p = projectors[i];
        if (p.rows() != d || p.cols() != d)
            throw std::invalid_argument("Pvm: inconsistent projector shapes");
        if (!is_hermitian(p) || frobenius_distance(p * p, p) > kTol)
            throw std::invalid_argument("Pvm: projector not Hermitian idempotent");
        for (size_t j = 0; j < i; ++j)
            if ((projectors[j] * p).norm() > kTol)
                throw std::invalid_argument("Pvm: projectors not mutually orthogonal");
        sum += p;
    }
    if (frobenius_distance(sum, Mat::Identity(d, d)) > kTol)
        throw std::invalid_argument("Pvm: projectors do not sum to identity");
}

Pvm Pvm::computational(int d) {
    std::vector<Mat> projs;
    for (int i = 0; i < d; ++i) {
        Mat p = Mat::Zero(d, d);
        p(i, i) = 1.0;
        projs.push_back(std::move(p));
    }
    return Pvm(std::move(projs));
}

Pvm Pvm::from_basis(const Mat& basis) {
    std::vector<Mat> projs;
    for (int i = 0; i < basis.cols(); ++i) {
        Vec v = basis.col(i);
        projs.push_back(v * v.adjoint());
    }
    return Pvm(std::move(projs));
}

Mat kron(const Mat& a, const Mat& b) {
    Mat out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

PureState tensor_product(const PureState& a, const PureState& b) {
    Vec out(a.dim() * b.dim());
    for (int i = 0; i < a.dim(); ++i)
        for (int j = 0; j < b.dim(); ++j)
            out(i * b.dim() + j) = a.amplitudes(i) * b.amplitudes(j);
    std::vector<int> dims = a.dims;
    dims.insert(dims.end(), b.dims.begin(), b.dims.end());
    return PureState(std::move(out), std::move(dims));
}

DensityOperator tensor_product(const DensityOperator& a, const DensityOperator& b) {
    std::vector<int> dims = a.dims;
    dims.insert(dims.end(), b.dims.begin(), b.dims.end());
    return DensityOperator(kron(a.matrix, b.matrix), std::move(dims));
}

DensityOperator density_of(const PureState& psi) {
    return DensityOperator(psi.amplitudes * psi.amplitudes.adjoint(), psi.dims);
}

Mat partial_trace_matrix(const Mat& m, const std::vector<int>& dims,
                         const std::vector<int>& keep) {
    if (keep.empty())
        throw std::invalid_argument("partial_trace: empty keep set (use trace instead)");
    if (m.rows() != m.cols() || product_dim(dims) != m.rows())
        throw std::invalid_argument("partial_trace: dimension mismatch");
    std::vector<int> sorted_keep = keep;
    std::sort(sorted_keep.begin(), sorted_keep.end());
    const int n = static_cast<int>(dims.size());
    for (int k : sorted_keep)
        if (k < 0 || k >= n) throw std::invalid_argument("partial_trace: keep index out of range");

    std::vector<int> traced;
    for (int k = 0; k < n; ++k)
        if (!std::binary_search(sorted_keep.begin(), sorted_keep.end(), k)) traced.push_back(k);

    std::vector<int> keep_dims, traced_dims;
    for (int k : sorted_keep) keep_dims.push_back(dims[k]);
    for (int k : traced) traced_dims.push_back(dims[k]);
    const int dk = product_dim(keep_dims);
    const int dt = product_dim(traced_dims);

    std::vector<int> kd, td;
    Mat out = Mat::Zero(dk, dk);
    for (int i = 0; i < dk; ++i) {
        digits_of(i, keep_dims, kd);
        for (int j = 0; j < dk; ++j) {
            std::vector<int> jd;
            digits_of(j, keep_dims, jd);
            cd acc = 0.0;
            for (int t = 0; t < dt; ++t) {
                digits_of(t, traced_dims, td);
                std::vector<int> row(n), col(n);
                for (size_t a = 0; a < sorted_keep.size(); ++a) {
                    row[sorted_keep[a]] = kd[a];
                    col[sorted_keep[a]] = jd[a];
                }
                for (size_t a = 0; a < traced.size(); ++a) {
                    row[traced[a]] = td[a];
                    col[traced[a]] = td[a];
                }
                acc += m(index_of(row, dims), index_of(col, dims));
            }
            out(i, j) = acc;
        }
    }
    return out;
}

DensityOperator partial_trace(const DensityOperator& rho, const std::vector<int>& keep) {
    Mat out = partial_trace_matrix(rho.matrix, rho.dims, keep);
    std::vector<int> sorted_keep = keep;
    std::sort(sorted_keep.begin(), sorted_keep.end());
    std::vector<int> keep_dims;
    for (int k : sorted_keep) keep_dims.push_back(rho.dims[k]);
    return DensityOperator(std::move(out), std::move(keep_dims));
}

Vec apply_on(const Mat& op, const std::vector<int>& targets,
             const std::vector<int>& dims, const Vec& v) {
    const int n = static_cast<int>(dims.size());
    std::vector<int> tdims;
    for (int t : targets) {
        if (t < 0 || t >= n) throw std::invalid_argument("apply_on: target out of range");
        tdims.push_back(dims[t]);
    }
    const int D = product_dim(tdims);
    if (op.rows() != D || op.cols() != D)
        throw std::invalid_argument("apply_on: operator dimension mismatch");

    const std::vector<int> strides = strides_of(dims);
    std::vector<bool> is_target(n, false);
    for (int t : targets) is_target[t] = true;

    // Enumerate assignments of the non-target digits; gather/scatter the
    // target-subspace vector through the operator.
    std::vector<int> rest;
    for (int k = 0; k < n; ++k)
        if (!is_target[k]) rest.push_back(k);
    std::vector<int> rest_dims;
    for (int k : rest) rest_dims.push_back(dims[k]);
    const int R = product_dim(rest_dims);

    Vec out = Vec::Zero(v.size());
    std::vector<int> rd, td;
    Vec sub(D), subo(D);
    for (int r = 0; r < R; ++r) {
        digits_of(r, rest_dims, rd);
        int base = 0;
        for (size_t a = 0; a < rest.size(); ++a) base += rd[a] * strides[rest[a]];
        for (int t = 0; t < D; ++t) {
            digits_of(t, tdims, td);
            int idx = base;
            for (size_t a = 0; a < targets.size(); ++a) idx += td[a] * strides[targets[a]];
            sub(t) = v(idx);
        }
        subo = op * sub;
        for (int t = 0; t < D; ++t) {
            digits_of(t, tdims, td);
            int idx = base;
            for (size_t a = 0; a < targets.size(); ++a) idx += td[a] * strides[targets[a]];
            out(idx) = subo(t);
        }
    }
    return out;
}

Mat embed(const Mat& op, const std::vector<int>& targets, const std::vector<int>& dims) {
    const int d = product_dim(dims);
    Mat out(d, d);
    for (int j = 0; j < d; ++j) {
        Vec e = Vec::Zero(d);
        e(j) = 1.0;
        out.col(j) = apply_on(op, targets, dims, e);
    }
    return out;
}

std::vector<Branch> measure_pvm(const PureState& psi, const Pvm& pvm,
                                const std::vector<int>& targets) {
    std::vector<int> tdims;
    for (int t : targets) tdims.push_back(psi.dims[t]);
    if (pvm.dim() != product_dim(tdims))
        throw std::invalid_argument("measure_pvm: PVM dimension mismatch");

    std::vector<Branch> branches;
    double total = 0.0;
    for (const Mat& p : pvm.projectors) {
        Vec proj = apply_on(p, targets, psi.dims, psi.amplitudes);
        const double prob = proj.squaredNorm();
        total += prob;
        Branch b;
        b.probability = prob;
        if (prob > kTol) b.state = PureState(proj / std::sqrt(prob), psi.dims);
        branches.push_back(std::move(b));
    }
    if (std::abs(total - 1.0) > kTol)
        throw std::runtime_error("measure_pvm: branch probabilities do not sum to 1");
    return branches;
}

std::vector<DensityBranch> measure_pvm(const DensityOperator& rho, const Pvm& pvm,
                                       const std::vector<int>& targets) {
    std::vector<int> tdims;
    for (int t : targets) tdims.push_back(rho.dims[t]);
    if (pvm.dim() != product_dim(tdims))
        throw std::invalid_argument("measure_pvm: PVM dimension mismatch");

    std::vector<DensityBranch> branches;
    double total = 0.0;
    for (const Mat& p : pvm.projectors) {
        Mat pf = embed(p, targets, rho.dims);
        Mat post = pf * rho.matrix * pf.adjoint();
        const double prob = post.trace().real();
        total += prob;
        DensityBranch b;
        b.probability = prob;
        if (prob > kTol) b.state = DensityOperator(post / prob, rho.dims);
        branches.push_back(std::move(b));
    }
    if (std::abs(total - 1.0) > kTol)
        throw std::runtime_error("measure_pvm: branch probabilities do not sum to 1");
    return branches;
}

int sample_index(const std::vector<double>& probabilities, RandomSource& rng) {
    double total = 0.0;
    for (double p : probabilities) total += p;
    if (std::abs(total - 1.0) > 1e-8)
        throw std::invalid_argument("sample_index: probabilities do not sum to 1");
    double u = rng.uniform() * total;
    for (size_t i = 0; i < probabilities.size(); ++i) {
        u -= probabilities[i];
        if (u <= 0.0) return static_cast<int>(i);
    }
    return static_cast<int>(probabilities.size()) - 1;
}

int sample_branch(const std::vector<Branch>& branches, RandomSource& rng) {
    std::vector<double> probs;
    for (const Branch& b : branches) probs.push_back(b.probability);
    return sample_index(probs, rng);
}

std::vector<std::pair<double, Vec>> spectral_decompose(const Mat& h) {
    if (!is_hermitian(h, kEigTol))
        throw std::invalid_argument("spectral_decompose: input not Hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> es(h);
    std::vector<std::pair<double, Vec>> pairs;
    for (int i = 0; i < h.rows(); ++i)
        pairs.emplace_back(es.eigenvalues()(i), es.eigenvectors().col(i));
    std::sort(pairs.begin(), pairs.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    return pairs;
}

Unitary haar_random_unitary(int d, RandomSource& rng) {
    if (d < 2) throw std::invalid_argument("haar_random_unitary: d >= 2 required");
    Mat g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = cd(rng.normal(), rng.normal());
    Eigen::HouseholderQR<Mat> qr(g);
    Mat q = qr.householderQ();
    Mat r = qr.matrixQR().triangularView<Eigen::Upper>();
    // Fix the phase ambiguity of QR so that the distribution is Haar.
    for (int i = 0; i < d; ++i) q.col(i) *= r(i, i) / std::abs(r(i, i));
    return Unitary(std::move(q));
}

PureState haar_random_state(int d, RandomSource& rng) {
    Vec v(d);
    for (int i = 0; i < d; ++i) v(i) = cd(rng.normal(), rng.normal());
    v /= v.norm();
    return PureState(std::move(v), {d});
}

DensityOperator random_density(int d, RandomSource& rng) {
    Mat g(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) g(i, j) = cd(rng.normal(), rng.normal());
    Mat m = g * g.adjoint();
    m /= m.trace().real();
    m = (m + Mat(m.adjoint())) / 2.0;
    return DensityOperator(std::move(m), {d});
}

KrausChannel random_channel(int d, int rank, RandomSource& rng) {
    // Stinespring: Haar unitary on system⊗ancilla, ancilla initialized |0⟩.
    // K_i = (1⊗⟨i|) U (1⊗|0⟩) restricted to the first `rank` ancilla levels.
    Unitary u = haar_random_unitary(d * rank, rng);
    std::vector<Mat> ops;
    for (int a = 0; a < rank; ++a) {
        Mat k(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) k(i, j) = u.matrix(i * rank + a, j * rank + 0);
        ops.push_back(std::move(k));
    }
    return KrausChannel(std::move(ops));
}

double fidelity(const PureState& a, const PureState& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
    return std::norm(a.amplitudes.dot(b.amplitudes));
}

double fidelity(const DensityOperator& a, const DensityOperator& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
    // Uhlmann: (tr √(√a b √a))². Eigenvalues are clamped at 0 before the
    // square root; -1e-17-size noise would otherwise turn into NaN.
    Eigen::SelfAdjointEigenSolver<Mat> es(a.matrix);
    Vec sqrt_vals(a.dim());
    for (int i = 0; i < a.dim(); ++i)
        sqrt_vals(i) = std::sqrt(std::max(0.0, es.eigenvalues()(i)));
    Mat sqrt_a = es.eigenvectors() * sqrt_vals.asDiagonal() * es.eigenvectors().adjoint();
    Mat inner = sqrt_a * b.matrix * sqrt_a;
    inner = (inner + Mat(inner.adjoint())) / 2.0;
    Eigen::SelfAdjointEigenSolver<Mat> es2(inner);
    double tr = 0.0;
    for (int i = 0; i < inner.rows(); ++i)
        tr += std::sqrt(std::max(0.0, es2.eigenvalues()(i)));
    // Eigensolver noise can push near-pure results marginally past 1.
    return std::clamp(tr * tr, 0.0, 1.0);
}

double fidelity(const DensityOperator& a, const PureState& b) {
    if (a.dim() != b.dim()) throw std::invalid_argument("fidelity: dimension mismatch");
    return (b.amplitudes.adjoint() * a.matrix * b.amplitudes)(0).real();
}

Vec bell_vector(int d) {
    Vec v = Vec::Zero(d * d);
    for (int i = 0; i < d; ++i) v(i * d + i) = 1.0 / std::sqrt(static_cast<double>(d));
    return v;
}

PureState bell_state(int d) {
    if (d < 2) throw std::invalid_argument("bell_state: d >= 2 required");
    return PureState(bell_vector(d), {d, d});
}

bool is_hermitian(const Mat& m, double tol) {
    return m.rows() == m.cols() && frobenius_distance(m, m.adjoint()) <= tol;
}

bool is_unitary(const Mat& m, double tol) {
    if (m.rows() != m.cols()) return false;
    Mat id = Mat::Identity(m.rows(), m.cols());
    return frobenius_distance(m.adjoint() * m, id) <= tol &&
           frobenius_distance(m * m.adjoint(), id) <= tol;
}

double frobenius_distance(const Mat& a, const Mat& b) { return (a - b).norm(); }

}  // namespace qvn
