#ifndef QTOMO_BASELINES_HPP
#define QTOMO_BASELINES_HPP

// Reference reimplementations of the two non-convex baselines used for
// relative-performance comparisons: RSVP (projected gradient descent with
// rank-r truncated eigendecompositions) and SparseApproxSDP (Frank-Wolfe
// over the spectrahedron with rank-1 updates). Neither paper supplies
// pseudocode; these are faithful-in-spirit reconstructions and are used for
// directional timing/accuracy claims only. Both keep a dense d x d iterate.

#include "projfgd.hpp"

namespace qtomo {

struct BaselineConfig {
    Index rank = 1;
    Index max_iters = 10000;
    double tol = 5e-6;
    std::optional<double> step;  // RSVP step size; auto = 1/L_hat
    std::uint64_t seed = 0;
    Index log_every = 1;
    int dense_cap = 10;
};

namespace detail {

// Dense-matrix convenience wrapper over the value-ordered block eigensolver.
inline HermitianEig top_eigpairs_by_value(const ComplexMatrix& B, Index k,
                                          std::uint64_t seed, double tol = 1e-10,
                                          int max_iters = 3000, bool best_effort = false) {
    SpectralConfig scfg;
    scfg.seed = seed;
    scfg.tol = tol;
    scfg.max_iters = max_iters;
    scfg.best_effort = best_effort;
    BlockOp bop = [&B](const ComplexMatrix& V) -> ComplexMatrix { return B * V; };
    return qtomo::top_eigpairs_by_value(bop, B.rows(), k, scfg);
}

inline void check_dense_cap(int n, int cap, const char* who) {
    if (n > cap)
        throw std::invalid_argument(std::string(who) +
                                    ": dense-iterate baseline refused above the dense cap (n=" +
                                    std::to_string(n) + " > " + std::to_string(cap) + ")");
}

inline void log_dense_metrics(TraceRecord& rec, const DensityMatrix& rho, const TruthRef& truth) {
    if (truth.rho) rec.rel_frob_error = frobenius_rel_error(rho, *truth.rho);
    else if (truth.factor) rec.rel_frob_error = frobenius_rel_error(rho, *truth.factor);
}

}  // namespace detail

// RSVP: rho_{t+1} = T_r(Pi_+(rho_t - eta grad f(rho_t))), with the trace
// clipped to <= 1 by simplex projection of the kept eigenvalues.
inline std::pair<DensityMatrix, TraceLog> run_rsvp(const BaselineConfig& cfg,
                                                   const SensingEnsemble& ens,
                                                   const MeasurementSet& meas,
                                                   const TruthRef& truth = {},
                                                   const DensityMatrix* rho_init = nullptr) {
    detail::check_dense_cap(ens.n_qubits, cfg.dense_cap, "run_rsvp");
    const Index d = ens.dim();
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&t0] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    const double L = estimate_lipschitz(ens, meas);
    const double eta = cfg.step ? *cfg.step : 1.0 / L;

    DensityMatrix rho = rho_init ? *rho_init : DensityMatrix::Zero(d, d);
    TraceLog log;
    double initial_obj = -1;
    for (Index t = 0; t <= cfg.max_iters; ++t) {
        const RealVector residual = measure_dense(ens, rho) - meas.y;
        const double obj = 0.5 * residual.squaredNorm();
        if (!std::isfinite(obj) ||
            (initial_obj > 0 && obj > 1e6 * std::max(initial_obj, 1e-30)))
            throw DivergenceError("run_rsvp: divergence at iter " + std::to_string(t));
        if (initial_obj < 0) initial_obj = std::max(obj, 1e-30);

        TraceRecord rec;
        rec.iter = t;
        rec.time_s = elapsed();
        rec.objective = obj;
        rec.eta = eta;
        if (cfg.log_every > 0 && t % cfg.log_every == 0)
            detail::log_dense_metrics(rec, rho, truth);
        log.rows.push_back(rec);
        if (t == cfg.max_iters) break;

        const ComplexMatrix B = rho - eta * adjoint_dense(ens, residual);
        HermitianEig top = detail::top_eigpairs_by_value(B, std::min(cfg.rank, d),
                                                         cfg.seed + std::uint64_t(t), 1e-9, 500,
                                                         /*best_effort=*/true);
        RealVector lam = project_simplex_leq(top.eigenvalues.cwiseMax(0.0), 1.0);
        DensityMatrix next = DensityMatrix::Zero(d, d);
        for (Index i = 0; i < lam.size(); ++i)
            if (lam[i] > 0) next += lam[i] * (top.eigenvectors.col(i) * top.eigenvectors.col(i).adjoint());

        const double change = (next - rho).norm();
        const double scale = next.norm();
        rho = std::move(next);
        if (scale > 0 && change / scale <= cfg.tol) {
            TraceRecord fin;
            fin.iter = t + 1;
            fin.time_s = elapsed();
            fin.objective = 0.5 * (measure_dense(ens, rho) - meas.y).squaredNorm();
            fin.eta = eta;
            detail::log_dense_metrics(fin, rho, truth);
            log.rows.push_back(fin);
            break;
        }
    }
    return {std::move(rho), std::move(log)};
}

// SparseApproxSDP: Frank-Wolfe over {rho >= 0, Tr(rho) = 1}. Each step mixes
// in the top eigenvector of -grad f with the classical 2/(t+2) schedule.
// Optional out-param collects the per-iteration duality gap
// <grad f(rho_t), rho_t - v_t v_t^H>.
inline std::pair<DensityMatrix, TraceLog> run_sparse_approx_sdp(
    const BaselineConfig& cfg, const SensingEnsemble& ens, const MeasurementSet& meas,
    const TruthRef& truth = {}, std::vector<double>* duality_gaps = nullptr) {
    detail::check_dense_cap(ens.n_qubits, cfg.dense_cap, "run_sparse_approx_sdp");
    const Index d = ens.dim();
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&t0] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    // rho_0 = v v^H with v the top eigenvector of -grad f(0) = M^H(y)
    DensityMatrix rho;
    {
        HermitianEig top =
            detail::top_eigpairs_by_value(adjoint_dense(ens, meas.y), 1, cfg.seed, 1e-6, 500, true);
        rho = top.eigenvectors.col(0) * top.eigenvectors.col(0).adjoint();
    }

    TraceLog log;
    for (Index t = 0; t <= cfg.max_iters; ++t) {
        const RealVector residual = measure_dense(ens, rho) - meas.y;
        const double obj = 0.5 * residual.squaredNorm();
        if (!std::isfinite(obj)) throw DivergenceError("run_sparse_approx_sdp: non-finite objective");

        TraceRecord rec;
        rec.iter = t;
        rec.time_s = elapsed();
        rec.objective = obj;
        if (cfg.log_every > 0 && t % cfg.log_every == 0)
            detail::log_dense_metrics(rec, rho, truth);
        log.rows.push_back(rec);
        if (t == cfg.max_iters) break;

        const ComplexMatrix grad = adjoint_dense(ens, residual);
        // a Frank-Wolfe vertex only needs a few digits; capped best-effort solve
        HermitianEig top = detail::top_eigpairs_by_value(-grad, 1, cfg.seed + std::uint64_t(t) + 1,
                                                         1e-4, 150, true);
        const ComplexVector v = top.eigenvectors.col(0);
        if (duality_gaps) {
            const Complex g = (grad.cwiseProduct(rho.conjugate())).sum() -
                              (v.adjoint() * grad * v)(0, 0);
            duality_gaps->push_back(g.real());
        }
        const double gamma = 2.0 / double(t + 2);
        DensityMatrix next = (1.0 - gamma) * rho + gamma * (v * v.adjoint());
        const double change = (next - rho).norm();
        const double scale = next.norm();
        rho = std::move(next);
        if (scale > 0 && change / scale <= cfg.tol) {
            TraceRecord fin;
            fin.iter = t + 1;
            fin.time_s = elapsed();
            fin.objective = 0.5 * (measure_dense(ens, rho) - meas.y).squaredNorm();
            detail::log_dense_metrics(fin, rho, truth);
            log.rows.push_back(fin);
            break;
        }
    }
    return {std::move(rho), std::move(log)};
}

}  // namespace qtomo

#endif
