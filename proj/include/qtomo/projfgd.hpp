#ifndef QTOMO_PROJFGD_HPP
#define QTOMO_PROJFGD_HPP

// ProjFGD: projected factored gradient descent
//   A_{t+1} = Pi_C(A_t - eta * grad f(A_t A_t^H) A_t),  Pi_C the Frobenius ball.
// Gradient convention: grad f(rho) = M^H(M(rho) - y) (factor 1; constant
// absorbed into the step-size formulas, which are kept verbatim).

#include "pauli.hpp"
#include "projections.hpp"

#include <chrono>
#include <limits>

namespace qtomo {

enum class InitKind { random, projected_gradient_at_zero, psd_truncation };
enum class StepKind { theory, practical };

struct SolverConfig {
    Index rank = 1;
    Index max_iters = 10000;
    double tol = 5e-6;  // relative change stopping threshold
    InitKind init_kind = InitKind::projected_gradient_at_zero;
    StepKind step_kind = StepKind::practical;
    std::optional<double> L_hat_override;
    std::uint64_t seed = 0;
    Index log_every = 1;      // error/dist metric cadence (xi/objective always logged)
    int dense_cap = 8;        // largest n for dense oracle paths
};

struct TraceRecord {
    Index iter = 0;
    double time_s = 0;
    double objective = 0;
    double rel_frob_error = std::numeric_limits<double>::quiet_NaN();
    double dist = std::numeric_limits<double>::quiet_NaN();
    double xi = 1.0;
    double eta = 0;
};

struct TraceLog {
    std::vector<TraceRecord> rows;
};

// Optional ground truth for metric logging. The factor (of the rank-r part)
// enables O(d r^2) per-iteration metrics; the dense state is used when no
// factor is available.
struct TruthRef {
    const Factor* factor = nullptr;
    const DensityMatrix* rho = nullptr;
};

struct DivergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// L_hat = 2 ||grad f(0) - grad f(J)||_F / d = 2 ||M^H(M(J))||_F / d, with J
// the all-ones matrix. Both factors are exact in closed form: M(J)_i =
// normalization * d * [z_i = 0], and for distinct (trace-orthogonal) Pauli
// strings ||M^H(b)||_F = normalization * sqrt(d) * ||b||_2.
inline double estimate_lipschitz(const SensingEnsemble& ens, const MeasurementSet&,
                                 std::optional<double> override = std::nullopt) {
    if (override) return *override;
    const double d = double(ens.dim());
    double mj_sq = 0;
    for (const PauliString& p : ens.paulis)
        if (p.z_mask == 0) mj_sq += ens.normalization * d * ens.normalization * d;
    const double L = 2.0 * ens.normalization * std::sqrt(d) * std::sqrt(mj_sq) / d;
    return (L < 1e-8) ? 2.0 : L;
}

inline Factor initialize(const SolverConfig& cfg, const SensingEnsemble& ens,
                         const MeasurementSet& meas) {
    const Index d = ens.dim();
    const Index r = cfg.rank;
    if (r < 1 || r > d) throw std::invalid_argument("initialize: rank out of range");

    if (cfg.init_kind == InitKind::random) {
        Factor A{qtomo::detail::random_gaussian(d, r, cfg.seed)};
        A.data /= A.data.norm();
        return A;
    }

    const double L = estimate_lipschitz(ens, meas, cfg.L_hat_override);
    Factor A0;
    if (ens.n_qubits <= cfg.dense_cap) {
        // dense route: Pi_C'((1/L) M^H(y)), then top-r factorization
        DensityMatrix H = adjoint_dense(ens, meas.y) / L;
        DensityMatrix P = (cfg.init_kind == InitKind::psd_truncation) ? project_psd(H)
                                                                      : project_trace_psd(H);
        A0 = factor_from_dense(P, r);
    } else {
        // matrix-free route: top-r eigenpairs of M^H(y)/L, clip, simplex-project
        SpectralConfig scfg;
        scfg.seed = cfg.seed ^ 0x5bf03635ULL;
        scfg.tol = 1e-6;  // the starting point only needs a few correct digits
        // A poorly converged subspace here can strand the factored iteration far
        // from the basin, so the budget grows with the number of wanted pairs.
        scfg.max_iters = std::max<int>(150, 25 * int(r));
        scfg.best_effort = true;
        RealVector y = meas.y;
        BlockOp op = [&ens, &y, L](const ComplexMatrix& V) -> ComplexMatrix {
            return adjoint_times_factor(ens, y, V) / L;
        };
        // value-ordered: ordering by magnitude can hand back large NEGATIVE
        // eigenvalues of M^H(y), which the clip below would turn into zero
        // columns of A0 -- and the factored iteration can never leave the
        // column space it starts with
        HermitianEig top = top_eigpairs_by_value(op, d, r, scfg);
        RealVector lam = top.eigenvalues.cwiseMax(0.0);
        if (cfg.init_kind == InitKind::projected_gradient_at_zero)
            lam = project_simplex_leq(lam, 1.0);
        A0.data.resize(d, r);
        for (Index i = 0; i < r; ++i)
            A0.data.col(i) = std::sqrt(lam[i]) * top.eigenvectors.col(i);
    }
    return project_frobenius_ball(A0).scaled;
}

inline double compute_step_size(const SolverConfig& cfg, const Factor& A0,
                                const SensingEnsemble& ens, const MeasurementSet& meas) {
    const double L = estimate_lipschitz(ens, meas, cfg.L_hat_override);
    Eigen::JacobiSVD<ComplexMatrix> svd(A0.data);
    const double s1_rho0 = svd.singularValues().size() ? std::pow(svd.singularValues()[0], 2) : 0.0;
    const RealVector residual = measure_factor(ens, A0) - meas.y;
    SpectralConfig scfg;
    scfg.seed = cfg.seed ^ 0x7f4a7c15ULL;
    scfg.tol = 1e-3;  // a loose sigma_1 estimate suffices for a step size
    scfg.max_iters = 150;
    scfg.best_effort = true;
    BlockOp gop = [&ens, &residual](const ComplexMatrix& V) -> ComplexMatrix {
        return adjoint_times_factor(ens, residual, V);
    };
    const double s1_grad = std::abs(top_eigpairs(gop, A0.dim(), 1, scfg).eigenvalues[0]);
    const double denom = (cfg.step_kind == StepKind::theory)
                             ? 128.0 * (L * s1_rho0 + s1_grad)
                             : 10.0 * L * s1_rho0 + s1_grad;
    if (denom <= 0)
        throw std::invalid_argument("compute_step_size: zero denominator (degenerate y and A0)");
    return 1.0 / denom;
}

namespace detail {

inline void log_metrics(TraceRecord& rec, const Factor& A, const TruthRef& truth) {
    if (truth.factor) {
        rec.rel_frob_error = frobenius_rel_error(A, *truth.factor);
        rec.dist = dist_procrustes(A, *truth.factor);
    } else if (truth.rho) {
        rec.rel_frob_error = frobenius_rel_error(A, *truth.rho);
    }
}

}  // namespace detail

inline std::pair<Factor, TraceLog> run(const SolverConfig& cfg, const SensingEnsemble& ens,
                                       const MeasurementSet& meas, const TruthRef& truth = {},
                                       const Factor* start = nullptr) {
    if (meas.y.size() != ens.m()) throw std::invalid_argument("run: measurement length mismatch");
    const auto t0 = std::chrono::steady_clock::now();
    auto elapsed = [&t0] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };

    Factor A = start ? project_frobenius_ball(*start).scaled : initialize(cfg, ens, meas);
    const double eta = compute_step_size(cfg, A, ens, meas);

    TraceLog log;
    double xi = 1.0;  // scaling applied by the projection that produced the current iterate
    double initial_obj = -1;
    for (Index t = 0; t <= cfg.max_iters; ++t) {
        const RealVector residual = measure_factor(ens, A) - meas.y;
        const double obj = 0.5 * residual.squaredNorm();
        if (!std::isfinite(obj))
            throw DivergenceError("run: non-finite objective at iter " + std::to_string(t));
        if (initial_obj < 0) initial_obj = obj;
        else if (obj > 1e6 * std::max(initial_obj, 1e-30))
            throw DivergenceError("run: objective exceeded 1e6x initial at iter " + std::to_string(t) +
                                  " (eta=" + std::to_string(eta) + ") - step size misconfigured");

        TraceRecord rec;
        rec.iter = t;
        rec.time_s = elapsed();
        rec.objective = obj;
        rec.xi = xi;
        rec.eta = eta;
        if (cfg.log_every > 0 && (t % cfg.log_every == 0 || t == cfg.max_iters))
            detail::log_metrics(rec, A, truth);
        log.rows.push_back(rec);
        if (t == cfg.max_iters) break;

        const ComplexMatrix GA = adjoint_times_factor(ens, residual, A.data);
        Factor raw{A.data - eta * GA};
        ScalingResult proj = project_frobenius_ball(raw);
        xi = proj.xi;

        // gram-trick relative change ||rho_{t+1} - rho_t||_F / ||rho_{t+1}||_F
        const double change = gram_frobenius_distance(proj.scaled.data, A.data);
        const double scale = (proj.scaled.data.adjoint() * proj.scaled.data).norm();
        A = std::move(proj.scaled);
        if (scale > 0 && change / scale <= cfg.tol) {
            const RealVector res_f = measure_factor(ens, A) - meas.y;
            TraceRecord fin;
            fin.iter = t + 1;
            fin.time_s = elapsed();
            fin.objective = 0.5 * res_f.squaredNorm();
            fin.xi = xi;
            fin.eta = eta;
            detail::log_metrics(fin, A, truth);
            log.rows.push_back(fin);
            break;
        }
    }
    return {std::move(A), std::move(log)};
}

// grad g(A)/2 = grad f(A A^H) A, matrix-free (exposed for tests).
inline ComplexMatrix gradient_step_direction(const Factor& A, const MeasurementSet& meas,
                                             const SensingEnsemble& ens) {
    const RealVector residual = measure_factor(ens, A) - meas.y;
    return adjoint_times_factor(ens, residual, A.data);
}

}  // namespace qtomo

#endif
