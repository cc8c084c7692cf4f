#include <qtomo/io.hpp>
#include <qtomo/pauli.hpp>

#include <doctest.h>

#include <set>

using namespace qtomo;

TEST_CASE("sample_ensemble: exhaustive and deterministic") {
    SensingEnsemble e1 = sample_ensemble(1, 4, 3);
    std::set<std::pair<std::uint64_t, std::uint64_t>> got;
    for (const PauliString& p : e1.paulis) got.insert({p.x_mask, p.z_mask});
    std::set<std::pair<std::uint64_t, std::uint64_t>> want{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    CHECK(got == want);  // exactly {I, X, Z, Y}

    SensingEnsemble e2 = sample_ensemble(2, 16, 5);
    std::set<std::pair<std::uint64_t, std::uint64_t>> all2;
    for (const PauliString& p : e2.paulis) all2.insert({p.x_mask, p.z_mask});
    CHECK(all2.size() == 16);

    SensingEnsemble a = sample_ensemble(3, 8, 7), b = sample_ensemble(3, 8, 7),
                    c = sample_ensemble(3, 8, 8);
    for (size_t i = 0; i < 8; ++i) {
        CHECK(a.paulis[i].x_mask == b.paulis[i].x_mask);
        CHECK(a.paulis[i].z_mask == b.paulis[i].z_mask);
    }
    bool differs = false;
    for (size_t i = 0; i < 8; ++i)
        if (a.paulis[i].x_mask != c.paulis[i].x_mask || a.paulis[i].z_mask != c.paulis[i].z_mask)
            differs = true;
    CHECK(differs);

    CHECK_THROWS_AS(sample_ensemble(1, 5, 0), std::invalid_argument);
    CHECK(std::abs(e2.normalization - ensemble_normalization(2, 16)) < 1e-15);
}

TEST_CASE("apply_pauli: definition cases") {
    ComplexVector v(2);
    v << Complex(0.3, 0.1), Complex(-0.2, 0.7);
    PauliString ident{1, 0, 0};
    CHECK((apply_pauli(ident, v) - v).norm() == 0.0);
    PauliString Z{1, 0, 1};
    ComplexVector zv = apply_pauli(Z, v);
    CHECK(zv[0] == v[0]);
    CHECK(zv[1] == -v[1]);
    CHECK_THROWS_AS(apply_pauli(Z, ComplexVector(ComplexVector::Zero(4))), std::invalid_argument);
}

TEST_CASE("apply_pauli: all 256 strings at n=4 match the dense Kronecker oracle") {
    const Index d = 16;
    ComplexVector v = detail::random_gaussian(d, 1, 13).col(0);
    for (std::uint64_t x = 0; x < 16; ++x)
        for (std::uint64_t z = 0; z < 16; ++z) {
            PauliString p{4, x, z};
            const ComplexVector fast = apply_pauli(p, v);
            const ComplexVector dense = dense_pauli(p) * v;
            CHECK((fast - dense).norm() <= 1e-12);
        }
}

TEST_CASE("dense_pauli: single-qubit matrices and a hand Kronecker case") {
    ComplexMatrix X = dense_pauli(PauliString{1, 1, 0});
    CHECK(X(0, 1) == Complex(1, 0));
    CHECK(X(1, 0) == Complex(1, 0));
    CHECK(X(0, 0) == Complex(0, 0));
    ComplexMatrix Y = dense_pauli(PauliString{1, 1, 1});
    CHECK(Y(0, 1) == Complex(0, -1));
    CHECK(Y(1, 0) == Complex(0, 1));
    // X (x) Z: X on the high qubit (mask bit 1), Z on the low (mask bit 0)
    ComplexMatrix XZ = dense_pauli(PauliString{2, 2, 1});
    CHECK(XZ(0, 2) == Complex(1, 0));
    CHECK(XZ(1, 3) == Complex(-1, 0));
    CHECK(XZ(2, 0) == Complex(1, 0));
    CHECK(XZ(3, 1) == Complex(-1, 0));
    CHECK_THROWS_AS(dense_pauli(PauliString{9, 0, 0}), std::invalid_argument);
}

TEST_CASE("pauli invariants: Hermitian, involutory, trace-orthogonal") {
    for (std::uint64_t x = 0; x < 4; ++x)
        for (std::uint64_t z = 0; z < 4; ++z) {
            ComplexMatrix P = dense_pauli(PauliString{2, x, z});
            CHECK((P - P.adjoint()).norm() == 0.0);
        }
    // P^2 = I through the symplectic action, up to n = 10
    for (int n : {3, 6, 10}) {
        const Index d = Index(1) << n;
        ComplexVector v = detail::random_gaussian(d, 1, 17 + std::uint64_t(n)).col(0);
        SensingEnsemble ens = sample_ensemble(n, 20, 19 + std::uint64_t(n));
        for (const PauliString& p : ens.paulis)
            CHECK((apply_pauli(p, apply_pauli(p, v)) - v).norm() <= 1e-12 * v.norm());
    }
    // Tr(P_i P_j) = d delta_ij, exhaustive at n = 3
    const Index d3 = 8;
    for (std::uint64_t a = 0; a < 64; ++a)
        for (std::uint64_t b = 0; b < 64; ++b) {
            PauliString pi{3, a >> 3, a & 7}, pj{3, b >> 3, b & 7};
            const Complex tr = trace_pauli_dense(pi, dense_pauli(pj));
            if (a == b) CHECK(std::abs(tr - Complex(double(d3), 0)) < 1e-12);
            else CHECK(std::abs(tr) < 1e-12);
        }
}

TEST_CASE("measure_factor and measure_dense vs dense trace oracle") {
    SensingEnsemble ens = sample_ensemble(4, 40, 23);
    Factor A{detail::random_gaussian(16, 2, 29)};
    const DensityMatrix rho = A.to_dense();
    const RealVector yf = measure_factor(ens, A);
    const RealVector yd = measure_dense(ens, rho);
    for (Index i = 0; i < 40; ++i) {
        const double oracle = ens.normalization * (dense_pauli(ens.paulis[size_t(i)]) * rho).trace().real();
        CHECK(yf[i] == doctest::Approx(oracle).epsilon(1e-10));
        CHECK(yd[i] == doctest::Approx(oracle).epsilon(1e-10));
    }

    // identity string on a trace-1 state gives the bare normalization
    SensingEnsemble one;
    one.n_qubits = 2;
    one.paulis = {PauliString{2, 0, 0}};
    one.normalization = ensemble_normalization(2, 1);
    Factor B{detail::random_gaussian(4, 1, 31)};
    B.data /= B.data.norm();
    CHECK(measure_factor(one, B)[0] == doctest::Approx(one.normalization));

    SensingEnsemble zs;
    zs.n_qubits = 1;
    zs.paulis = {PauliString{1, 0, 1}};
    zs.normalization = ensemble_normalization(1, 1);
    DensityMatrix ground = DensityMatrix::Zero(2, 2);
    ground(0, 0) = 1;
    CHECK(measure_dense(zs, ground)[0] == doctest::Approx(zs.normalization));
}

TEST_CASE("adjoint_times_factor: trivial and dense-oracle cases") {
    SensingEnsemble ens = sample_ensemble(4, 20, 37);
    ComplexMatrix A = detail::random_gaussian(16, 2, 41);
    CHECK(adjoint_times_factor(ens, RealVector::Zero(20), A).norm() == 0.0);

    SensingEnsemble one;
    one.n_qubits = 4;
    one.paulis = {PauliString{4, 0, 0}};
    one.normalization = ensemble_normalization(4, 1);
    RealVector b1(1);
    b1 << 1.0;
    CHECK((adjoint_times_factor(one, b1, A) - one.normalization * A).norm() < 1e-14);

    RealVector b = RealVector::Random(20);
    ComplexMatrix dense = ComplexMatrix::Zero(16, 16);
    for (Index i = 0; i < 20; ++i) dense += b[i] * dense_pauli(ens.paulis[size_t(i)]);
    dense *= ens.normalization;
    CHECK((adjoint_times_factor(ens, b, A) - dense * A).norm() <= 1e-10 * (dense * A).norm());
    CHECK((adjoint_dense(ens, b) - dense).norm() <= 1e-12 * dense.norm());
}

TEST_CASE("adjoint identity <M(rho), b> = <rho, M^H(b)>") {
    SensingEnsemble ens = sample_ensemble(4, 30, 43);
    Factor A{detail::random_gaussian(16, 2, 47)};
    const DensityMatrix rho = A.to_dense();
    RealVector b = RealVector::Random(30);
    const double lhs = measure_dense(ens, rho).dot(b);
    const ComplexMatrix Mb = adjoint_dense(ens, b);
    const double rhs = (Mb.conjugate().cwiseProduct(rho)).sum().real();
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("adjoint norm identity for distinct strings") {
    // ||M^H(b)||_F = normalization * sqrt(d) * ||b||_2 (trace orthogonality)
    SensingEnsemble ens = sample_ensemble(3, 25, 53);
    RealVector b = RealVector::Random(25);
    const double dense = adjoint_dense(ens, b).norm();
    CHECK(dense == doctest::Approx(ens.normalization * std::sqrt(8.0) * b.norm()).epsilon(1e-12));
}

TEST_CASE("generate_measurements: noise models") {
    SensingEnsemble ens = sample_ensemble(4, 100, 59);
    StateSpec spec;
    spec.n_qubits = 4;
    spec.seed = 61;
    GroundTruth gt = random_state(spec);
    const RealVector clean = measure_factor(ens, gt.factor);

    MeasurementSet none = generate_measurements(ens, gt.factor, NoiseKind::none, 0.0, 1);
    CHECK((none.y - clean).norm() == 0.0);

    MeasurementSet fixed = generate_measurements(ens, gt.factor, NoiseKind::fixed_norm, 1e-3, 2);
    CHECK((fixed.y - clean).norm() == doctest::Approx(1e-3).epsilon(1e-12));

    // gaussian_sigma: per-entry std sigma/sqrt(m), so ||e|| concentrates at sigma
    SensingEnsemble big = sample_ensemble(7, 10000, 67);
    StateSpec sp7;
    sp7.n_qubits = 7;
    sp7.seed = 71;
    GroundTruth g7 = random_state(sp7);
    const RealVector c7 = measure_factor(big, g7.factor);
    MeasurementSet noisy = generate_measurements(big, g7.factor, NoiseKind::gaussian_sigma, 0.05, 3);
    const RealVector e = noisy.y - c7;
    const double sample_std = std::sqrt(e.squaredNorm() / double(e.size()));
    CHECK(sample_std == doctest::Approx(0.05 / std::sqrt(10000.0)).epsilon(0.05));
    CHECK_THROWS_AS(generate_measurements(ens, gt.factor, NoiseKind::gaussian_sigma, -1.0, 4),
                    std::invalid_argument);

    // dense-truth overload agrees with the factor overload
    MeasurementSet md = generate_measurements(ens, gt.rho, NoiseKind::none, 0.0, 5);
    CHECK((md.y - clean).norm() <= 1e-12 * clean.norm());
}

TEST_CASE("dataset file round trip is bit-exact") {
    SensingEnsemble ens = sample_ensemble(3, 12, 73);
    StateSpec spec;
    spec.n_qubits = 3;
    spec.seed = 79;
    GroundTruth gt = random_state(spec);
    Dataset ds{ens, generate_measurements(ens, gt.factor, NoiseKind::gaussian_sigma, 0.01, 83)};
    const std::string path = "roundtrip_dataset.txt";
    save_dataset(path, ds);
    Dataset back = load_dataset(path);
    REQUIRE(back.ensemble.m() == 12);
    CHECK(back.ensemble.n_qubits == 3);
    CHECK(back.ensemble.normalization == ds.ensemble.normalization);
    for (size_t i = 0; i < 12; ++i) {
        CHECK(back.ensemble.paulis[i].x_mask == ds.ensemble.paulis[i].x_mask);
        CHECK(back.ensemble.paulis[i].z_mask == ds.ensemble.paulis[i].z_mask);
    }
    CHECK(back.measurements.y == ds.measurements.y);  // bitwise
    CHECK(back.measurements.noise_kind == NoiseKind::gaussian_sigma);
    CHECK(back.measurements.noise_param == 0.01);

    Factor f{detail::random_gaussian(8, 2, 89)};
    save_factor("roundtrip_factor.txt", f);
    Factor fb = load_factor("roundtrip_factor.txt");
    CHECK(fb.data == f.data);
}
