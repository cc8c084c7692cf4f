#ifndef QTOMO_MATOPS_HPP
#define QTOMO_MATOPS_HPP

// Complex dense-matrix substrate and iterative spectral routines.
//
// Dense decompositions are delegated to Eigen; the matrix-free side
// (block subspace iteration, gram-trick distances) is implemented here.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <stdexcept>
#include <vector>

namespace qtomo {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Hermitian operator given only by its action v -> Hv.
using LinOp = std::function<ComplexVector(const ComplexVector&)>;
// Block form V -> HV; lets the operator amortize its per-entry overhead.
using BlockOp = std::function<ComplexMatrix(const ComplexMatrix&)>;

struct HermitianEig {
    RealVector eigenvalues;   // descending
    ComplexMatrix eigenvectors;  // orthonormal columns
};

struct SpectralConfig {
    int max_iters = 1000;
    double tol = 1e-10;      // relative residual ||Hv - lambda v|| <= tol*|lambda|
    std::uint64_t seed = 0;
    int block = 4;           // subspace width (raised to at least k+2 internally)
    bool best_effort = false;  // return the current Ritz pairs at max_iters instead of throwing
};

struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require_finite(const ComplexMatrix& H, const char* what) {
    if (!H.allFinite()) throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

// Full spectrum of a Hermitian matrix, eigenvalues descending.
// Input is symmetrized first to absorb floating-point drift.
inline HermitianEig hermitian_eig_dense(const ComplexMatrix& H) {
    if (H.rows() != H.cols()) throw std::invalid_argument("hermitian_eig_dense: non-square input");
    require_finite(H, "hermitian_eig_dense");
    ComplexMatrix S = 0.5 * (H + H.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(S);
    if (es.info() != Eigen::Success) throw ConvergenceError("hermitian_eig_dense: solver failed");
    const Index d = S.rows();
    HermitianEig out;
    out.eigenvalues.resize(d);
    out.eigenvectors.resize(d, d);
    for (Index i = 0; i < d; ++i) {  // Eigen returns ascending; flip
        out.eigenvalues[i] = es.eigenvalues()[d - 1 - i];
        out.eigenvectors.col(i) = es.eigenvectors().col(d - 1 - i);
    }
    return out;
}

namespace detail {

inline ComplexMatrix random_gaussian(Index rows, Index cols, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    ComplexMatrix G(rows, cols);
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j) {
            const double re = nd(gen);
            const double im = nd(gen);
            G(i, j) = Complex(re, im);
        }
    return G;
}

inline ComplexMatrix assemble_dense(const LinOp& op, Index d) {
    ComplexMatrix H(d, d);
    ComplexVector e = ComplexVector::Zero(d);
    for (Index j = 0; j < d; ++j) {
        e[j] = 1.0;
        H.col(j) = op(e);
        e[j] = 0.0;
    }
    return H;
}

}  // namespace detail

// Leading k eigenpairs (by |lambda|) of a Hermitian operator via randomized
// block subspace iteration with Rayleigh-Ritz extraction. Falls back to the
// dense path when the requested subspace covers (most of) the spectrum.
inline HermitianEig top_eigpairs(const BlockOp& op, Index d, Index k,
                                 const SpectralConfig& cfg = {}) {
    if (k < 1 || k > d) throw std::invalid_argument("top_eigpairs: need 1 <= k <= d");
    Index b = std::max<Index>(cfg.block, k + 2);
    if (b >= d) {  // degenerate request: dense path on the assembled operator
        HermitianEig full = hermitian_eig_dense(op(ComplexMatrix::Identity(d, d)));
        std::vector<Index> idx(static_cast<size_t>(d));
        for (Index i = 0; i < d; ++i) idx[static_cast<size_t>(i)] = i;
        std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index c) {
            return std::abs(full.eigenvalues[a]) > std::abs(full.eigenvalues[c]);
        });
        HermitianEig out;
        out.eigenvalues.resize(k);
        out.eigenvectors.resize(d, k);
        for (Index i = 0; i < k; ++i) {
            out.eigenvalues[i] = full.eigenvalues[idx[static_cast<size_t>(i)]];
            out.eigenvectors.col(i) = full.eigenvectors.col(idx[static_cast<size_t>(i)]);
        }
        return out;
    }

    ComplexMatrix Q = detail::random_gaussian(d, b, cfg.seed ^ 0x9e3779b97f4a7c15ULL);
    {
        Eigen::HouseholderQR<ComplexMatrix> qr(Q);
        Q = qr.householderQ() * ComplexMatrix::Identity(d, b);
    }
    ComplexMatrix HQ(d, b);
    HermitianEig ritz;
    for (int it = 0; it < cfg.max_iters; ++it) {
        HQ = op(Q);
        const double hq_norm = HQ.norm();
        if (hq_norm < 1e-300) {  // (numerically) zero operator
            HermitianEig out;
            out.eigenvalues = RealVector::Zero(k);
            out.eigenvectors = Q.leftCols(k);
            return out;
        }
        // Rayleigh-Ritz on the current subspace
        ComplexMatrix S = Q.adjoint() * HQ;
        HermitianEig small = hermitian_eig_dense(S);
        std::vector<Index> idx(static_cast<size_t>(b));
        for (Index i = 0; i < b; ++i) idx[static_cast<size_t>(i)] = i;
        std::stable_sort(idx.begin(), idx.end(), [&](Index a, Index c) {
            return std::abs(small.eigenvalues[a]) > std::abs(small.eigenvalues[c]);
        });
        ritz.eigenvalues.resize(k);
        ritz.eigenvectors.resize(d, k);
        for (Index i = 0; i < k; ++i) {
            ritz.eigenvalues[i] = small.eigenvalues[idx[static_cast<size_t>(i)]];
            ritz.eigenvectors.col(i) = Q * small.eigenvectors.col(idx[static_cast<size_t>(i)]);
        }
        // residual check on the k wanted pairs; H v_i = (HQ) s_i is already
        // available, so no extra operator applications are needed
        bool done = true;
        const double scale = std::abs(ritz.eigenvalues[0]);
        for (Index i = 0; i < k && done; ++i) {
            const ComplexVector s = small.eigenvectors.col(idx[static_cast<size_t>(i)]);
            ComplexVector r = HQ * s - ritz.eigenvalues[i] * ritz.eigenvectors.col(i);
            if (r.norm() > cfg.tol * std::max(scale, 1e-300)) done = false;
        }
        if (done) return ritz;
        // next subspace: orthonormalize H*Q
        Eigen::HouseholderQR<ComplexMatrix> qr(HQ);
        Q = qr.householderQ() * ComplexMatrix::Identity(d, b);
    }
    if (cfg.best_effort) return ritz;
    throw ConvergenceError("top_eigpairs: no convergence after max_iters (raise block or max_iters)");
}

// Leading k eigenpairs by ALGEBRAIC value (not magnitude): shift the spectrum
// by +1.2x a spectral-norm estimate so the wanted end dominates in magnitude,
// then undo the shift. Use this when negative eigenvalues must not displace
// small positive ones (e.g. extracting a PSD approximation).
inline HermitianEig top_eigpairs_by_value(const BlockOp& op, Index d, Index k,
                                          const SpectralConfig& cfg = {}) {
    SpectralConfig est = cfg;
    est.seed = cfg.seed ^ 0xabcdULL;
    est.tol = 5e-2;  // a crude radius suffices; 20% headroom is added below
    est.max_iters = std::min(cfg.max_iters, 200);
    est.best_effort = true;
    const double radius = std::abs(top_eigpairs(op, d, 1, est).eigenvalues[0]);
    const double shift = 1.2 * radius + 1e-12;
    BlockOp shifted = [&op, shift](const ComplexMatrix& V) -> ComplexMatrix {
        return op(V) + shift * V;
    };
    HermitianEig out = top_eigpairs(shifted, d, k, cfg);
    out.eigenvalues.array() -= shift;
    return out;
}

inline HermitianEig top_eigpairs(const LinOp& op, Index d, Index k, const SpectralConfig& cfg = {}) {
    BlockOp block = [&op](const ComplexMatrix& V) -> ComplexMatrix {
        ComplexMatrix out(V.rows(), V.cols());
        for (Index j = 0; j < V.cols(); ++j) out.col(j) = op(V.col(j));
        return out;
    };
    return top_eigpairs(block, d, k, cfg);
}

// |lambda_1| of a Hermitian operator.
inline double top_singular_value(const LinOp& op, Index d, const SpectralConfig& cfg = {}) {
    if (d == 1) return std::abs(op(ComplexVector::Ones(1))[0]);
    return std::abs(top_eigpairs(op, d, 1, cfg).eigenvalues[0]);
}

// ||A A^H - B B^H||_F in O(d r^2) via the gram expansion
// ||A^H A||_F^2 + ||B^H B||_F^2 - 2 ||B^H A||_F^2, never forming d x d.
inline double gram_frobenius_distance(const ComplexMatrix& A, const ComplexMatrix& B) {
    if (A.rows() != B.rows()) throw std::invalid_argument("gram_frobenius_distance: dimension mismatch");
    const double aa = (A.adjoint() * A).squaredNorm();
    const double bb = (B.adjoint() * B).squaredNorm();
    const double ba = (B.adjoint() * A).squaredNorm();
    return std::sqrt(std::max(0.0, aa + bb - 2.0 * ba));
}

}  // namespace qtomo

#endif
