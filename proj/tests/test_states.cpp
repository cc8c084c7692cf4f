#include <qtomo/states.hpp>

#include <doctest.h>

using namespace qtomo;

namespace {

ComplexMatrix random_unitary(Index r, std::uint64_t seed) {
    ComplexMatrix G = detail::random_gaussian(r, r, seed);
    Eigen::HouseholderQR<ComplexMatrix> qr(G);
    return qr.householderQ() * ComplexMatrix::Identity(r, r);
}

}  // namespace

TEST_CASE("random_state: invariants and determinism") {
    for (auto kind : {StateKind::pure, StateKind::low_rank, StateKind::near_low_rank}) {
        StateSpec spec;
        spec.n_qubits = 3;
        spec.rank = (kind == StateKind::pure) ? 1 : 2;
        spec.kind = kind;
        spec.seed = 5;
        GroundTruth gt = random_state(spec);
        CHECK(std::abs(gt.rho.trace().real() - 1.0) < 1e-12);
        HermitianEig e = hermitian_eig_dense(gt.rho);
        CHECK(e.eigenvalues[e.eigenvalues.size() - 1] >= -1e-12);
        GroundTruth gt2 = random_state(spec);
        CHECK(gt.rho == gt2.rho);  // bitwise
        CHECK(gt.factor.data == gt2.factor.data);
    }
    StateSpec bad;
    bad.n_qubits = 1;
    bad.rank = 3;
    CHECK_THROWS_AS(random_state(bad), std::invalid_argument);
}

TEST_CASE("random_state: pure draws average to the maximally mixed state") {
    const Index d = 4;
    DensityMatrix mean = DensityMatrix::Zero(d, d);
    const int N = 10000;
    for (int i = 0; i < N; ++i) {
        StateSpec spec;
        spec.n_qubits = 2;
        spec.seed = 1000 + std::uint64_t(i);
        mean += random_state(spec).rho;
    }
    mean /= double(N);
    CHECK((mean - DensityMatrix::Identity(d, d) / double(d)).cwiseAbs().maxCoeff() < 5e-2);
}

TEST_CASE("random_state: near-low-rank structure") {
    StateSpec spec;
    spec.n_qubits = 4;
    spec.rank = 2;
    spec.kind = StateKind::near_low_rank;
    spec.seed = 77;
    GroundTruth gt = random_state(spec);
    const DensityMatrix rho_r = gt.factor.to_dense();
    const DensityMatrix zeta = gt.rho - rho_r;
    HermitianEig ez = hermitian_eig_dense(zeta);
    CHECK(ez.eigenvalues[ez.eigenvalues.size() - 1] >= -1e-12);  // PSD tail
    CHECK(zeta.norm() == doctest::Approx(spec.tail_mass * rho_r.norm()).epsilon(1e-10));
}

TEST_CASE("best_rank_r") {
    StateSpec spec;
    spec.n_qubits = 2;
    spec.seed = 9;
    GroundTruth gt = random_state(spec);
    CHECK((best_rank_r(gt.rho, 1) - gt.rho).norm() < 1e-12);

    DensityMatrix D = DensityMatrix::Zero(2, 2);
    D(0, 0) = 0.7;
    D(1, 1) = 0.3;
    DensityMatrix T = best_rank_r(D, 1);
    CHECK(T(0, 0).real() == doctest::Approx(0.7));
    CHECK(std::abs(T(1, 1)) < 1e-14);

    // Eckart-Young residual = tail eigenvalue energy
    ComplexMatrix G = detail::random_gaussian(8, 8, 31);
    DensityMatrix P = G * G.adjoint();
    HermitianEig e = hermitian_eig_dense(P);
    double tail = 0;
    for (Index i = 2; i < 8; ++i) tail += e.eigenvalues[i] * e.eigenvalues[i];
    CHECK(std::pow((P - best_rank_r(P, 2)).norm(), 2) == doctest::Approx(tail).epsilon(1e-10));
}

TEST_CASE("dist_procrustes: closed form, invariance, phase-grid oracle") {
    Factor A{detail::random_gaussian(8, 2, 41)};
    CHECK(dist_procrustes(A, A) == doctest::Approx(0.0));
    Factor AR{A.data * random_unitary(2, 42)};
    // the closed form cancels ~||A||^2 terms, so O(sqrt(eps ||A||^2)) is expected
    CHECK(dist_procrustes(A, AR) < 1e-6);

    // r=1: minimize over the phase circle explicitly
    Factor a{detail::random_gaussian(8, 1, 43)};
    Factor b{detail::random_gaussian(8, 1, 44)};
    double grid = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 10000; ++k) {
        const double th = 2.0 * M_PI * k / 10000.0;
        grid = std::min(grid, (a.data - b.data * std::polar(1.0, th)).norm());
    }
    CHECK(dist_procrustes(a, b) == doctest::Approx(grid).epsilon(1e-6));
    const double closed = std::sqrt(std::max(
        0.0, a.data.squaredNorm() + b.data.squaredNorm() -
                 2.0 * std::abs((b.data.adjoint() * a.data)(0, 0))));
    CHECK(dist_procrustes(a, b) == doctest::Approx(closed).epsilon(1e-12));
    CHECK_THROWS_AS(dist_procrustes(a, A), std::invalid_argument);
}

TEST_CASE("dist_procrustes: pseudometric on 200 random triples") {
    for (std::uint64_t s = 0; s < 200; ++s) {
        const Index d = 4 + Index(s % 4) * 4;  // <= 16
        const Index r = 1 + Index(s % 3);
        Factor A{detail::random_gaussian(d, r, 900 + 3 * s)};
        Factor B{detail::random_gaussian(d, r, 901 + 3 * s)};
        Factor C{detail::random_gaussian(d, r, 902 + 3 * s)};
        const double ab = dist_procrustes(A, B);
        const double ba = dist_procrustes(B, A);
        CHECK(ab == doctest::Approx(ba).epsilon(1e-9));
        CHECK(ab <= dist_procrustes(A, C) + dist_procrustes(C, B) + 1e-9);
        CHECK(ab >= 0);
    }
}

TEST_CASE("dist_procrustes: closed form is the minimum over sampled unitaries") {
    std::mt19937_64 gen(4242);
    Factor A{detail::random_gaussian(6, 2, 51)};
    Factor B{detail::random_gaussian(6, 2, 52)};
    double sampled = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 10000; ++k)
        sampled = std::min(sampled, (A.data - B.data * random_unitary(2, gen())).norm());
    CHECK(dist_procrustes(A, B) <= sampled + 1e-9);
}

TEST_CASE("frobenius_rel_error") {
    StateSpec spec;
    spec.n_qubits = 3;
    spec.seed = 61;
    GroundTruth gt = random_state(spec);
    CHECK(frobenius_rel_error(gt.factor, gt.factor) == doctest::Approx(0.0));
    Factor zero{ComplexMatrix::Zero(8, 1)};
    CHECK(frobenius_rel_error(zero, gt.factor) == doctest::Approx(1.0));  // pure: ||rho*||_F = 1
    Factor est{detail::random_gaussian(8, 1, 62)};
    const double dense = (est.to_dense() - gt.rho).norm() / gt.rho.norm();
    CHECK(frobenius_rel_error(est, gt.factor) == doctest::Approx(dense).epsilon(1e-10));
    CHECK(frobenius_rel_error(est, gt.rho) == doctest::Approx(dense).epsilon(1e-10));
    CHECK(frobenius_rel_error(est.to_dense(), gt.rho) == doctest::Approx(dense).epsilon(1e-10));
}

TEST_CASE("infidelity") {
    StateSpec spec;
    spec.n_qubits = 2;
    spec.seed = 71;
    GroundTruth gt = random_state(spec);
    CHECK(infidelity(gt.rho, gt.rho) == doctest::Approx(0.0));

    DensityMatrix e0 = DensityMatrix::Zero(2, 2), e1 = DensityMatrix::Zero(2, 2);
    e0(0, 0) = 1;
    e1(1, 1) = 1;
    CHECK(infidelity(e0, e1) == doctest::Approx(1.0));

    // commuting mixed pair: F = (sum_i sqrt(p_i q_i))^2 in closed form
    DensityMatrix P = DensityMatrix::Zero(4, 4), Q = DensityMatrix::Zero(4, 4);
    RealVector p(4), q(4);
    p << 0.4, 0.3, 0.2, 0.1;
    q << 0.1, 0.2, 0.3, 0.4;
    for (Index i = 0; i < 4; ++i) {
        P(i, i) = p[i];
        Q(i, i) = q[i];
    }
    double root = 0;
    for (Index i = 0; i < 4; ++i) root += std::sqrt(p[i] * q[i]);
    CHECK(infidelity(P, Q) == doctest::Approx(1.0 - root * root).epsilon(1e-10));

    // pure-state shortcut equals the full formula
    for (std::uint64_t s = 0; s < 100; ++s) {
        StateSpec ps;
        ps.n_qubits = 2;
        ps.seed = 2000 + s;
        GroundTruth truth = random_state(ps);
        ComplexMatrix G = detail::random_gaussian(4, 4, 3000 + s);
        DensityMatrix est = G * G.adjoint();
        est /= est.trace().real();
        const double fast = infidelity(est, truth.rho);
        // full formula with a synthetic rank-2 truth built from the same state
        DensityMatrix fuzz = (1.0 - 1e-9) * truth.rho + 1e-9 * DensityMatrix::Identity(4, 4) / 4.0;
        const double full = infidelity(est, fuzz);
        CHECK(fast == doctest::Approx(full).epsilon(1e-3));
    }
}

TEST_CASE("spectrum_stats") {
    StateSpec spec;
    spec.n_qubits = 2;
    spec.seed = 81;
    GroundTruth gt = random_state(spec);
    SpectrumStats s = spectrum_stats(gt.rho, 1);
    CHECK(s.tau == doctest::Approx(1.0));
    CHECK(s.srank == doctest::Approx(1.0));
    CHECK_FALSE(s.kappa_proxy.has_value());

    DensityMatrix D = DensityMatrix::Zero(3, 3);
    D(0, 0) = 0.5;
    D(1, 1) = 0.25;
    D(2, 2) = 0.25;
    SpectrumStats t = spectrum_stats(D, 2, 0.2);
    CHECK(t.sigma1 == doctest::Approx(0.5));
    CHECK(t.sigma_r == doctest::Approx(0.25));
    CHECK(t.tau == doctest::Approx(2.0));
    CHECK(t.kappa_proxy.value() == doctest::Approx(1.2 / 0.8));
    CHECK_THROWS_AS(spectrum_stats(gt.rho, 2), std::invalid_argument);  // rank deficient
}
