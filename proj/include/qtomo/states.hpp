#ifndef QTOMO_STATES_HPP
#define QTOMO_STATES_HPP

// Ground-truth density matrices, factored iterates, and the distance /
// quality metrics used for reporting (Frobenius error, infidelity, DIST).

#include "matops.hpp"

#include <optional>

namespace qtomo {

using DensityMatrix = ComplexMatrix;  // d x d Hermitian PSD, trace <= 1

// d x r complex factor A with rho = A A^H (never A^H A).
struct Factor {
    ComplexMatrix data;
    Index dim() const { return data.rows(); }
    Index rank() const { return data.cols(); }
    double norm() const { return data.norm(); }
    DensityMatrix to_dense() const { return data * data.adjoint(); }
};

enum class StateKind { pure, low_rank, near_low_rank };

struct StateSpec {
    int n_qubits = 1;
    int rank = 1;
    StateKind kind = StateKind::pure;
    double tail_decay = 0.5;  // eigenvalue decay base of the residual tail
    double tail_mass = 0.05;  // ||zeta||_F relative to ||rho_r||_F
    std::uint64_t seed = 0;
};

struct SpectrumStats {
    double sigma1 = 0;
    double sigma_r = 0;
    double tau = 0;    // sigma1 / sigma_r
    double srank = 0;  // ||rho||_F / sigma1
    std::optional<double> kappa_proxy;  // (1+delta)/(1-delta) when delta supplied
};

struct GroundTruth {
    DensityMatrix rho;   // the state measured (trace exactly 1)
    Factor factor;       // factor of the rank-r part (equals rho for exact-rank kinds)
};

inline Index state_dim(const StateSpec& spec) { return Index(1) << spec.n_qubits; }

inline GroundTruth random_state(const StateSpec& spec) {
    const Index d = state_dim(spec);
    const Index r = spec.rank;
    if (r < 1 || r > d) throw std::invalid_argument("random_state: rank out of range");
    if (spec.kind == StateKind::near_low_rank &&
        (spec.tail_decay <= 0 || spec.tail_decay >= 1 || spec.tail_mass < 0 || spec.tail_mass >= 0.5))
        throw std::invalid_argument("random_state: bad tail parameters");

    std::mt19937_64 gen(spec.seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    auto gauss = [&](Index rows, Index cols) {
        ComplexMatrix G(rows, cols);
        for (Index i = 0; i < rows; ++i)
            for (Index j = 0; j < cols; ++j) {
                const double re = nd(gen);
                const double im = nd(gen);
                G(i, j) = Complex(re, im);
            }
        return G;
    };

    ComplexMatrix G = gauss(d, r);
    const double tr = G.squaredNorm();  // Tr(G G^H)
    G /= std::sqrt(tr);
    GroundTruth out;
    if (spec.kind != StateKind::near_low_rank) {
        out.factor.data = G;
        out.rho = G * G.adjoint();
        return out;
    }

    // near-low-rank: rho = (rho_r + zeta) / (1 + Tr zeta), with zeta PSD
    // full-rank, eigenvalues ~ tail_decay^i, ||zeta||_F = tail_mass*||rho_r||_F.
    DensityMatrix rho_r = G * G.adjoint();
    ComplexMatrix Q = gauss(d, d);
    {
        Eigen::HouseholderQR<ComplexMatrix> qr(Q);
        Q = qr.householderQ() * ComplexMatrix::Identity(d, d);
    }
    RealVector c(d);
    for (Index i = 0; i < d; ++i) c[i] = std::pow(spec.tail_decay, double(i));
    if (spec.tail_mass > 0) {
        c *= spec.tail_mass * rho_r.norm() / c.norm();
        DensityMatrix zeta = Q * c.asDiagonal() * Q.adjoint();
        const double total = 1.0 + c.sum();
        out.rho = (rho_r + zeta) / total;
        out.factor.data = G / std::sqrt(total);
    } else {
        out.rho = rho_r;
        out.factor.data = G;
    }
    return out;
}

// Best Frobenius rank-r PSD approximation (Eckart-Young on the clipped spectrum).
inline DensityMatrix best_rank_r(const DensityMatrix& rho, Index r) {
    if (r > rho.rows()) throw std::invalid_argument("best_rank_r: r > d");
    HermitianEig eig = hermitian_eig_dense(rho);
    DensityMatrix out = DensityMatrix::Zero(rho.rows(), rho.cols());
    for (Index i = 0; i < r; ++i) {
        const double lam = std::max(0.0, eig.eigenvalues[i]);
        if (lam == 0.0) break;
        out += lam * (eig.eigenvectors.col(i) * eig.eigenvectors.col(i).adjoint());
    }
    return out;
}

// Top-r factor of a dense PSD matrix (eigenvalues clipped at zero).
inline Factor factor_from_dense(const DensityMatrix& rho, Index r) {
    HermitianEig eig = hermitian_eig_dense(rho);
    Factor f;
    f.data.resize(rho.rows(), r);
    for (Index i = 0; i < r; ++i)
        f.data.col(i) = std::sqrt(std::max(0.0, eig.eigenvalues[i])) * eig.eigenvectors.col(i);
    return f;
}

// DIST(A,B) = min over unitary R of ||A - B R||_F, closed form via the
// singular values of B^H A (unitary Procrustes).
inline double dist_procrustes(const Factor& A, const Factor& B) {
    if (A.dim() != B.dim() || A.rank() != B.rank())
        throw std::invalid_argument("dist_procrustes: shape mismatch");
    Eigen::JacobiSVD<ComplexMatrix> svd(B.data.adjoint() * A.data);
    const double cross = svd.singularValues().sum();
    const double sq = A.data.squaredNorm() + B.data.squaredNorm() - 2.0 * cross;
    return std::sqrt(std::max(0.0, sq));
}

inline double frobenius_rel_error(const Factor& est, const Factor& truth) {
    const double denom = (truth.data.adjoint() * truth.data).norm();  // ||truth truth^H||_F
    return gram_frobenius_distance(est.data, truth.data) / denom;
}

inline double frobenius_rel_error(const DensityMatrix& est, const DensityMatrix& truth) {
    if (est.rows() != truth.rows()) throw std::invalid_argument("frobenius_rel_error: shape mismatch");
    return (est - truth).norm() / truth.norm();
}

inline double frobenius_rel_error(const Factor& est, const DensityMatrix& truth) {
    return frobenius_rel_error(est.to_dense(), truth);
}

inline double frobenius_rel_error(const DensityMatrix& est, const Factor& truth) {
    return frobenius_rel_error(est, truth.to_dense());
}

// 1 - Tr(sqrt(sqrt(rho*) rho_hat sqrt(rho*)))^2, clipped to [0,1].
// Rank-1 truth uses the pure-state shortcut 1 - <v, rho_hat v>.
inline double infidelity(const DensityMatrix& est, const DensityMatrix& truth) {
    if (est.rows() != truth.rows()) throw std::invalid_argument("infidelity: shape mismatch");
    HermitianEig te = hermitian_eig_dense(truth);
    if (te.eigenvalues[0] < -1e-8 || te.eigenvalues[te.eigenvalues.size() - 1] < -1e-6)
        throw std::invalid_argument("infidelity: truth not PSD");
    double fid;
    if (te.eigenvalues.size() == 1 || te.eigenvalues[1] < 1e-10) {
        const ComplexVector v = te.eigenvectors.col(0);
        fid = te.eigenvalues[0] * (v.adjoint() * est * v)(0, 0).real();
    } else {
        // S = sqrt(truth); fidelity = (sum of sqrt eigenvalues of S est S)^2
        ComplexMatrix S = ComplexMatrix::Zero(truth.rows(), truth.cols());
        for (Index i = 0; i < te.eigenvalues.size(); ++i) {
            const double lam = std::max(0.0, te.eigenvalues[i]);
            S += std::sqrt(lam) * (te.eigenvectors.col(i) * te.eigenvectors.col(i).adjoint());
        }
        HermitianEig me = hermitian_eig_dense(S * est * S);
        double root_sum = 0;
        for (Index i = 0; i < me.eigenvalues.size(); ++i)
            root_sum += std::sqrt(std::max(0.0, me.eigenvalues[i]));
        fid = root_sum * root_sum;
    }
    return std::min(1.0, std::max(0.0, 1.0 - fid));
}

inline SpectrumStats spectrum_stats(const DensityMatrix& rho, Index r,
                                    std::optional<double> delta = std::nullopt) {
    HermitianEig eig = hermitian_eig_dense(rho);
    SpectrumStats s;
    s.sigma1 = eig.eigenvalues[0];
    s.sigma_r = eig.eigenvalues[r - 1];
    if (s.sigma_r <= 1e-12) throw std::invalid_argument("spectrum_stats: rank-deficient for requested r");
    s.tau = s.sigma1 / s.sigma_r;
    s.srank = rho.norm() / s.sigma1;
    if (delta) s.kappa_proxy = (1.0 + *delta) / (1.0 - *delta);
    return s;
}

}  // namespace qtomo

#endif
