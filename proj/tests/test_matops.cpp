#include <qtomo/matops.hpp>

#include <doctest.h>

using namespace qtomo;

namespace {

ComplexMatrix random_hermitian(Index d, std::uint64_t seed) {
    ComplexMatrix G = detail::random_gaussian(d, d, seed);
    return 0.5 * (G + G.adjoint());
}

}  // namespace

TEST_CASE("hermitian_eig_dense: diagonal and hand cases") {
    ComplexMatrix H = ComplexMatrix::Zero(2, 2);
    H(0, 0) = 1;
    H(1, 1) = -1;
    HermitianEig e = hermitian_eig_dense(H);
    CHECK(e.eigenvalues[0] == doctest::Approx(1.0));
    CHECK(e.eigenvalues[1] == doctest::Approx(-1.0));
    CHECK((e.eigenvectors.cwiseAbs() - ComplexMatrix::Identity(2, 2).cwiseAbs()).norm() < 1e-12);

    ComplexMatrix X(2, 2);
    X << 0, 1, 1, 0;
    HermitianEig ex = hermitian_eig_dense(X);
    CHECK(ex.eigenvalues[0] == doctest::Approx(1.0));
    CHECK(ex.eigenvalues[1] == doctest::Approx(-1.0));
    const ComplexVector plus = (ComplexVector(2) << 1, 1).finished() / std::sqrt(2.0);
    CHECK(std::abs(std::abs(plus.dot(ex.eigenvectors.col(0))) - 1.0) < 1e-12);

    ComplexVector v = detail::random_gaussian(6, 1, 3).col(0);
    v.normalize();
    HermitianEig ev = hermitian_eig_dense(v * v.adjoint());
    CHECK(ev.eigenvalues[0] == doctest::Approx(1.0));
    for (Index i = 1; i < 6; ++i) CHECK(std::abs(ev.eigenvalues[i]) < 1e-12);
}

TEST_CASE("hermitian_eig_dense: reconstruction and orthonormality invariants") {
    for (std::uint64_t s = 0; s < 20; ++s) {
        const Index d = 4 + Index(s % 5) * 15;  // up to 64
        ComplexMatrix H = random_hermitian(d, 100 + s);
        HermitianEig e = hermitian_eig_dense(H);
        const ComplexMatrix R =
            e.eigenvectors * e.eigenvalues.asDiagonal().toDenseMatrix().cast<Complex>() *
            e.eigenvectors.adjoint();
        CHECK((H - R).norm() <= 1e-10 * H.norm());
        CHECK((e.eigenvectors.adjoint() * e.eigenvectors - ComplexMatrix::Identity(d, d)).norm() <=
              1e-10);
        for (Index i = 1; i < d; ++i) CHECK(e.eigenvalues[i] <= e.eigenvalues[i - 1] + 1e-14);
    }
}

TEST_CASE("hermitian_eig_dense: error paths") {
    CHECK_THROWS_AS(hermitian_eig_dense(ComplexMatrix::Zero(2, 3)), std::invalid_argument);
    ComplexMatrix bad = ComplexMatrix::Zero(2, 2);
    bad(0, 0) = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(hermitian_eig_dense(bad), std::invalid_argument);
}

TEST_CASE("top_eigpairs: trivial operators") {
    LinOp ident = [](const ComplexVector& v) { return v; };
    HermitianEig e = top_eigpairs(ident, 8, 1);
    CHECK(e.eigenvalues[0] == doctest::Approx(1.0));
    CHECK(e.eigenvectors.col(0).norm() == doctest::Approx(1.0));

    RealVector diag(8);
    diag << 3, 1, 0.5, 0.2, 0.1, 0.05, 0.01, 0.001;
    LinOp dop = [&diag](const ComplexVector& v) -> ComplexVector {
        return diag.cast<Complex>().asDiagonal() * v;
    };
    CHECK(top_eigpairs(dop, 8, 1).eigenvalues[0] == doctest::Approx(3.0));
}

TEST_CASE("top_eigpairs: matrix-free vs dense agreement, 100 random matrices") {
    for (std::uint64_t s = 0; s < 100; ++s) {
        const Index d = 8 + Index(s % 8) * 8;  // 8..64
        ComplexMatrix H = random_hermitian(d, 500 + s);
        LinOp op = [&H](const ComplexVector& v) -> ComplexVector { return H * v; };
        HermitianEig it = top_eigpairs(op, d, 2);
        HermitianEig dn = hermitian_eig_dense(H);
        // leading magnitude eigenvalue of dn
        double lead = std::abs(dn.eigenvalues[0]) > std::abs(dn.eigenvalues[d - 1])
                          ? dn.eigenvalues[0]
                          : dn.eigenvalues[d - 1];
        CHECK(it.eigenvalues[0] == doctest::Approx(lead).epsilon(1e-6));
        // residual contract
        CHECK((H * it.eigenvectors.col(0) - it.eigenvalues[0] * it.eigenvectors.col(0)).norm() <=
              1e-9 * std::abs(it.eigenvalues[0]) + 1e-12);
    }
}

TEST_CASE("top_eigpairs: k = d falls through to the dense path") {
    ComplexMatrix H = random_hermitian(6, 7);
    LinOp op = [&H](const ComplexVector& v) -> ComplexVector { return H * v; };
    HermitianEig e = top_eigpairs(op, 6, 6);
    HermitianEig dn = hermitian_eig_dense(H);
    RealVector got = e.eigenvalues, want = dn.eigenvalues;
    std::sort(got.data(), got.data() + 6);
    std::sort(want.data(), want.data() + 6);
    CHECK((got - want).norm() < 1e-10);
}

TEST_CASE("top_singular_value") {
    LinOp zero = [](const ComplexVector& v) -> ComplexVector { return ComplexVector::Zero(v.size()); };
    CHECK(top_singular_value(zero, 8) == doctest::Approx(0.0));
    LinOp neg2 = [](const ComplexVector& v) -> ComplexVector { return -2.0 * v; };
    CHECK(top_singular_value(neg2, 8) == doctest::Approx(2.0));
    ComplexMatrix H = random_hermitian(16, 11);
    LinOp op = [&H](const ComplexVector& v) -> ComplexVector { return H * v; };
    Eigen::JacobiSVD<ComplexMatrix> svd(H);
    CHECK(top_singular_value(op, 16) == doctest::Approx(svd.singularValues()[0]).epsilon(1e-8));
}

TEST_CASE("gram_frobenius_distance") {
    ComplexMatrix A = detail::random_gaussian(8, 2, 21);
    CHECK(gram_frobenius_distance(A, A) == doctest::Approx(0.0));
    ComplexMatrix Z = ComplexMatrix::Zero(8, 2);
    CHECK(gram_frobenius_distance(A, Z) == doctest::Approx((A.adjoint() * A).norm()));
    for (std::uint64_t s = 0; s < 30; ++s) {
        const Index d = 8 + Index(s % 4) * 16;  // up to 56
        ComplexMatrix X = detail::random_gaussian(d, 2, 600 + 2 * s);
        ComplexMatrix Y = detail::random_gaussian(d, 3, 601 + 2 * s);  // ranks may differ
        const double dense = (X * X.adjoint() - Y * Y.adjoint()).norm();
        CHECK(gram_frobenius_distance(X, Y) == doctest::Approx(dense).epsilon(1e-10));
    }
    CHECK_THROWS_AS(gram_frobenius_distance(A, ComplexMatrix::Zero(4, 2)), std::invalid_argument);
}
