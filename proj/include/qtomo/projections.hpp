#ifndef QTOMO_PROJECTIONS_HPP
#define QTOMO_PROJECTIONS_HPP

// Projection operators: the Frobenius-ball scaling Pi_C on factors, the PSD
// cone Pi_+, the {rho >= 0, Tr(rho) <= 1} set Pi_C' and the underlying
// inequality-constrained simplex projection.

#include "states.hpp"

namespace qtomo {

struct ScalingResult {
    Factor scaled;
    double xi = 1.0;  // in (0, 1]; 1 iff the input was already feasible
};

inline ScalingResult project_frobenius_ball(const Factor& B) {
    require_finite(B.data, "project_frobenius_ball");
    ScalingResult out;
    const double nrm = B.data.norm();
    out.xi = (nrm <= 1.0) ? 1.0 : 1.0 / nrm;
    out.scaled.data = (out.xi == 1.0) ? B.data : ComplexMatrix(out.xi * B.data);
    return out;
}

// Euclidean projection onto {w >= 0, sum w <= budget}. Two-phase rule: clip
// negatives; only if the clipped vector is over budget, project onto the
// equality simplex by the classical sort-and-threshold rule.
inline RealVector project_simplex_leq(const RealVector& v, double budget = 1.0) {
    if (budget <= 0) throw std::invalid_argument("project_simplex_leq: budget must be positive");
    if (!v.allFinite()) throw std::invalid_argument("project_simplex_leq: non-finite entries");
    RealVector w = v.cwiseMax(0.0);
    if (w.sum() <= budget) return w;
    std::vector<double> u(v.data(), v.data() + v.size());
    std::stable_sort(u.begin(), u.end(), std::greater<double>());
    double csum = 0, theta = 0;
    for (size_t k = 1; k <= u.size(); ++k) {  // theta from the largest k with u_k > theta_k
        csum += u[k - 1];
        const double t = (csum - budget) / double(k);
        if (u[k - 1] > t) theta = t;
    }
    RealVector out(v.size());
    for (Index i = 0; i < v.size(); ++i) out[i] = std::max(0.0, v[i] - theta);
    return out;
}

// Eigenvalue clipping onto the PSD cone.
inline DensityMatrix project_psd(const ComplexMatrix& H) {
    HermitianEig eig = hermitian_eig_dense(H);
    DensityMatrix out = DensityMatrix::Zero(H.rows(), H.cols());
    for (Index i = 0; i < eig.eigenvalues.size(); ++i) {
        const double lam = eig.eigenvalues[i];
        if (lam <= 0) break;  // descending order
        out += lam * (eig.eigenvectors.col(i) * eig.eigenvectors.col(i).adjoint());
    }
    return out;
}

// Pi_C': Euclidean projection onto {rho >= 0, Tr(rho) <= 1} via simplex
// projection of the eigenvalues.
inline DensityMatrix project_trace_psd(const ComplexMatrix& H) {
    HermitianEig eig = hermitian_eig_dense(H);
    RealVector lam = project_simplex_leq(eig.eigenvalues, 1.0);
    DensityMatrix out = DensityMatrix::Zero(H.rows(), H.cols());
    for (Index i = 0; i < lam.size(); ++i)
        if (lam[i] > 0) out += lam[i] * (eig.eigenvectors.col(i) * eig.eigenvectors.col(i).adjoint());
    return out;
}

}  // namespace qtomo

#endif
