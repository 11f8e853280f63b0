#include "qvn/choi.hpp"

#include <cmath>
#include <stdexcept>

namespace qvn {

namespace {

// CPTP tail-marginal condition: tr_head(ω) = 1/d_in.
void check_tail_marginal(const DensityOperator& op) {
    const int d_in = op.dims[1];
    DensityOperator tail = partial_trace(op, {1});
    Mat target = Mat::Identity(d_in, d_in) / static_cast<double>(d_in);
    if (frobenius_distance(tail.matrix, target) > 1e-9)
        throw std::invalid_argument("ChoiState: tail marginal != 1/d (not trace-preserving)");
}

}  // namespace

ChoiState::ChoiState(DensityOperator op, bool pure_hint)
    : operator_(std::move(op)), purity_hint(pure_hint) {
    if (operator_.dims.size() != 2)
        throw std::invalid_argument("ChoiState: expected head⊗tail bipartition");
    check_tail_marginal(operator_);
    if (purity_hint) {
        auto eigs = spectral_decompose(operator_.matrix);
        if (std::abs(eigs[0].first - 1.0) > kEigTol)
            throw std::invalid_argument("ChoiState: purity_hint set but state is not rank 1");
    }
}

Vec ChoiState::pure_vector() const {
    if (!purity_hint)
        throw std::logic_error("ChoiState::pure_vector: state is not flagged pure");
    auto eigs = spectral_decompose(operator_.matrix);
    return eigs[0].second;
}

ChoiState choi_of_channel(const KrausChannel& e) {
    const int din = e.dim_in();
    const int dout = e.dim_out();
    const Vec omega = bell_vector(din);
    Mat acc = Mat::Zero(dout * din, dout * din);
    for (const Mat& k : e.kraus_ops) {
        // (K ⊗ 1)|ω⟩
        Vec v = Vec::Zero(dout * din);
        for (int i = 0; i < dout; ++i)
            for (int j = 0; j < din; ++j)
                for (int l = 0; l < din; ++l) v(i * din + j) += k(i, l) * omega(l * din + j);
        acc += v * v.adjoint();
    }
    return ChoiState(DensityOperator(std::move(acc), {dout, din}), e.rank() == 1);
}

ChoiState choi_of_unitary(const Unitary& u) {
    const int d = u.dim();
    Vec v = Vec::Zero(d * d);
    const double norm = 1.0 / std::sqrt(static_cast<double>(d));
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) v(i * d + j) = u.matrix(i, j) * norm;
    return ChoiState(DensityOperator(v * v.adjoint(), {d, d}), true);
}

KrausChannel kraus_from_choi(const ChoiState& w) {
    const int dout = w.head_dim();
    const int din = w.tail_dim();
    std::vector<Mat> ops;
    for (const auto& [lambda, vec] : spectral_decompose(w.operator_.matrix)) {
        if (lambda <= 1e-8) continue;
        Mat k(dout, din);
        const double scale = std::sqrt(lambda * din);
        for (int i = 0; i < dout; ++i)
            for (int j = 0; j < din; ++j) k(i, j) = scale * vec(i * din + j);
        ops.push_back(std::move(k));
    }
    return KrausChannel(std::move(ops));
}

DensityOperator apply_via_choi(const ChoiState& w, const DensityOperator& rho) {
    const int din = w.tail_dim();
    if (rho.dim() != din)
        throw std::invalid_argument("apply_via_choi: dimension mismatch");
    Mat rho_t = rho.matrix.transpose();
    Mat prod = w.operator_.matrix * kron(Mat::Identity(w.head_dim(), w.head_dim()), rho_t);
    const int dout = w.head_dim();
    Mat out = Mat::Zero(dout, dout);
    for (int i = 0; i < dout; ++i)
        for (int j = 0; j < dout; ++j) {
            cd acc = 0.0;
            for (int t = 0; t < din; ++t) acc += prod(i * din + t, j * din + t);
            out(i, j) = static_cast<double>(din) * acc;
        }
    out = (out + Mat(out.adjoint())) / 2.0;
    return DensityOperator(std::move(out), {dout});
}

int choi_rank(const ChoiState& w) {
    int r = 0;
    for (const auto& [lambda, vec] : spectral_decompose(w.operator_.matrix))
        if (lambda > 1e-8) ++r;
    return r;
}

}  // namespace qvn
