#ifndef QTOMO_PAULI_HPP
#define QTOMO_PAULI_HPP

// Matrix-free Pauli sensing. A Pauli string is held in symplectic form
// P = i^{popcount(x&z)} X^x Z^z, so its action on a basis vector is a
// single bit-flip permutation with an exact +-1/+-i phase:
//   P|b> = i^{popcount(x&z)} (-1)^{popcount(z&b)} |b ^ x>.
// This gives M(A A^H) and M^H(b) A in O(m d r) without any d x d storage.

#include "states.hpp"

#include <bit>
#include <unordered_set>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qtomo {

struct PauliString {
    int n_qubits = 1;
    std::uint64_t x_mask = 0;
    std::uint64_t z_mask = 0;
};

struct SensingEnsemble {
    int n_qubits = 1;
    std::vector<PauliString> paulis;
    double normalization = 0;  // sqrt(d/m); see README on the scaling convention
    std::uint64_t seed = 0;
    Index m() const { return Index(paulis.size()); }
    Index dim() const { return Index(1) << n_qubits; }
};

enum class NoiseKind { none, gaussian_sigma, fixed_norm };

struct MeasurementSet {
    RealVector y;
    NoiseKind noise_kind = NoiseKind::none;
    double noise_param = 0;
    std::uint64_t seed = 0;
};

inline double ensemble_normalization(int n, Index m) {
    return std::sqrt(double(Index(1) << n) / double(m));
}

inline SensingEnsemble sample_ensemble(int n, Index m, std::uint64_t seed) {
    if (n < 1 || n > 31) throw std::invalid_argument("sample_ensemble: n out of range");
    const double total = std::pow(4.0, n);
    if (m < 1 || double(m) > total) throw std::invalid_argument("sample_ensemble: need 1 <= m <= 4^n");
    SensingEnsemble ens;
    ens.n_qubits = n;
    ens.seed = seed;
    ens.normalization = ensemble_normalization(n, m);
    ens.paulis.reserve(size_t(m));
    std::mt19937_64 gen(seed);
    const std::uint64_t mask = (std::uint64_t(1) << n) - 1;
    std::unordered_set<std::uint64_t> seen;
    seen.reserve(size_t(m) * 2);
    while (Index(ens.paulis.size()) < m) {
        const std::uint64_t x = gen() & mask;
        const std::uint64_t z = gen() & mask;
        if (seen.insert((x << n) | z).second)
            ens.paulis.push_back(PauliString{n, x, z});
    }
    return ens;
}

namespace detail {

inline Complex i_power(unsigned k) {
    static const Complex tab[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    return tab[k & 3u];
}

inline int parity(std::uint64_t v) { return int(std::popcount(v) & 1u); }

}  // namespace detail

// P v, exact phases.
inline ComplexVector apply_pauli(const PauliString& p, const ComplexVector& v) {
    const Index d = Index(1) << p.n_qubits;
    if (v.size() != d) throw std::invalid_argument("apply_pauli: length mismatch");
    const Complex gp = detail::i_power(unsigned(std::popcount(p.x_mask & p.z_mask)));
    ComplexVector out(d);
    for (Index b = 0; b < d; ++b) {
        const Complex ph = detail::parity(p.z_mask & std::uint64_t(b)) ? -gp : gp;
        out[Index(std::uint64_t(b) ^ p.x_mask)] = ph * v[b];
    }
    return out;
}

// P A, applied row-wise to a d x r block.
inline ComplexMatrix apply_pauli(const PauliString& p, const ComplexMatrix& A) {
    const Index d = Index(1) << p.n_qubits;
    if (A.rows() != d) throw std::invalid_argument("apply_pauli: row count mismatch");
    const Complex gp = detail::i_power(unsigned(std::popcount(p.x_mask & p.z_mask)));
    ComplexMatrix out(d, A.cols());
    for (Index b = 0; b < d; ++b) {
        const Complex ph = detail::parity(p.z_mask & std::uint64_t(b)) ? -gp : gp;
        out.row(Index(std::uint64_t(b) ^ p.x_mask)) = ph * A.row(b);
    }
    return out;
}

// Dense Kronecker construction (oracle path; qubit j of the masks is bit j of
// the basis index, i.e. the (n-1-j)-th tensor factor counting from the left).
inline ComplexMatrix dense_pauli(const PauliString& p, int dense_cap = 8) {
    if (p.n_qubits > dense_cap) throw std::invalid_argument("dense_pauli: n above dense cap");
    const ComplexMatrix I2 = ComplexMatrix::Identity(2, 2);
    ComplexMatrix X(2, 2), Y(2, 2), Z(2, 2);
    X << 0, 1, 1, 0;
    Y << 0, Complex(0, -1), Complex(0, 1), 0;
    Z << 1, 0, 0, -1;
    ComplexMatrix out = ComplexMatrix::Identity(1, 1);
    for (int j = 0; j < p.n_qubits; ++j) {
        const bool xb = (p.x_mask >> j) & 1u;
        const bool zb = (p.z_mask >> j) & 1u;
        const ComplexMatrix& s = xb ? (zb ? Y : X) : (zb ? Z : I2);
        ComplexMatrix next(out.rows() * 2, out.cols() * 2);
        next.block(0, 0, out.rows(), out.cols()) = s(0, 0) * out;
        next.block(0, out.cols(), out.rows(), out.cols()) = s(0, 1) * out;
        next.block(out.rows(), 0, out.rows(), out.cols()) = s(1, 0) * out;
        next.block(out.rows(), out.cols(), out.rows(), out.cols()) = s(1, 1) * out;
        out = next;
    }
    return out;
}

// Tr(P rho) for a dense rho, O(d): the only nonzeros of P are P[c^x, c] = phase(c).
inline Complex trace_pauli_dense(const PauliString& p, const DensityMatrix& rho) {
    const Index d = Index(1) << p.n_qubits;
    const Complex gp = detail::i_power(unsigned(std::popcount(p.x_mask & p.z_mask)));
    Complex acc = 0;
    for (Index c = 0; c < d; ++c) {
        const Complex ph = detail::parity(p.z_mask & std::uint64_t(c)) ? -gp : gp;
        acc += ph * rho(c, Index(std::uint64_t(c) ^ p.x_mask));
    }
    return acc;
}

// M(A A^H): entry i = normalization * Re <A, P_i A>_F. The imaginary residue
// is an exact zero in theory; assert it stays at rounding level in debug.
inline RealVector measure_factor(const SensingEnsemble& ens, const Factor& A) {
    if (A.dim() != ens.dim()) throw std::invalid_argument("measure_factor: dimension mismatch");
    const Index m = ens.m();
    const Index d = ens.dim();
    RealVector y(m);
    // transposed (r x d) copy: basis-index access becomes contiguous
    const ComplexMatrix At = A.data.transpose();
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (Index i = 0; i < m; ++i) {
        const PauliString& p = ens.paulis[size_t(i)];
        const Complex gp = detail::i_power(unsigned(std::popcount(p.x_mask & p.z_mask)));
        double t = 0;  // Re <A, P A>_F = sum_b Re(phase(b) <A.row(b^x), A.row(b)>)
        if (p.x_mask == 0) {
            // diagonal string: phase(b) = +-1 and the inner product is ||a_b||^2
            for (Index b = 0; b < d; ++b) {
                const double nb = At.col(b).squaredNorm();
                t += detail::parity(p.z_mask & std::uint64_t(b)) ? -nb : nb;
            }
        } else {
            // Hermiticity pairs b with b^x: the (b^x, b) and (b, b^x) terms are
            // conjugates up to the sign (-1)^{parity(z&x)}, which equals the
            // parity of popcount(x&z), i.e. whether gp is real or imaginary.
            // Each unordered pair therefore contributes
            //   2 * Re(gp) * s_b * Re(w)   (gp real)  or
            //  -2 * Im(gp) * s_b * Im(w)   (gp imaginary),
            // with w = <a_{b^x}, a_b> and s_b = (-1)^{parity(z&b)}.
            const bool odd = std::popcount(p.x_mask & p.z_mask) & 1u;
            const double g = 2.0 * (odd ? gp.imag() : gp.real());
            for (Index b = 0; b < d; ++b) {
                const Index bx = Index(std::uint64_t(b) ^ p.x_mask);
                if (bx < b) continue;
                const Complex w = At.col(bx).dot(At.col(b));
                const double s = detail::parity(p.z_mask & std::uint64_t(b)) ? -g : g;
                t += odd ? -s * w.imag() : s * w.real();
            }
        }
        y[i] = ens.normalization * t;
    }
    return y;
}

// M(rho) for a dense state, O(m d).
inline RealVector measure_dense(const SensingEnsemble& ens, const DensityMatrix& rho) {
    if (rho.rows() != ens.dim()) throw std::invalid_argument("measure_dense: dimension mismatch");
    const Index m = ens.m();
    RealVector y(m);
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (Index i = 0; i < m; ++i)
        y[i] = ens.normalization * trace_pauli_dense(ens.paulis[size_t(i)], rho).real();
    return y;
}

// M^H(b) A = normalization * sum_i b_i P_i A. The sum is accumulated in a
// fixed number of chunks that are combined in chunk order, so the result is
// bit-stable regardless of thread count.
inline ComplexMatrix adjoint_times_factor(const SensingEnsemble& ens, const RealVector& b,
                                          const ComplexMatrix& A) {
    if (b.size() != ens.m()) throw std::invalid_argument("adjoint_times_factor: length mismatch");
    if (A.rows() != ens.dim()) throw std::invalid_argument("adjoint_times_factor: dimension mismatch");
    const Index m = ens.m();
    const Index d = ens.dim();
    const ComplexMatrix At = A.transpose();  // r x d: contiguous per basis index
    const ComplexMatrix iAt = Complex(0, 1) * At;  // lets imaginary phases use real-scalar axpys
    constexpr Index kChunks = 32;
    const Index nchunks = std::min(kChunks, m);
    std::vector<ComplexMatrix> partial(static_cast<size_t>(nchunks));
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (Index c = 0; c < nchunks; ++c) {
        const Index lo = c * m / nchunks;
        const Index hi = (c + 1) * m / nchunks;
        ComplexMatrix acc = ComplexMatrix::Zero(At.rows(), At.cols());
        for (Index i = lo; i < hi; ++i) {
            if (b[i] == 0.0) continue;
            const PauliString& p = ens.paulis[size_t(i)];
            // the global phase is either real (+-b_i) or imaginary (+-i b_i);
            // folding the i into iAt keeps every axpy a real-scalar one
            const Complex gpc = detail::i_power(unsigned(std::popcount(p.x_mask & p.z_mask)));
            const bool odd = std::popcount(p.x_mask & p.z_mask) & 1u;
            const double g = b[i] * (odd ? gpc.imag() : gpc.real());
            const ComplexMatrix& src = odd ? iAt : At;
            for (Index col = 0; col < d; ++col) {
                const double ph = detail::parity(p.z_mask & std::uint64_t(col)) ? -g : g;
                acc.col(Index(std::uint64_t(col) ^ p.x_mask)) += ph * src.col(col);
            }
        }
        partial[size_t(c)] = std::move(acc);
    }
    ComplexMatrix out = ComplexMatrix::Zero(At.rows(), At.cols());
    for (Index c = 0; c < nchunks; ++c) out += partial[size_t(c)];
    return ComplexMatrix(out.transpose()) * ens.normalization;
}

// M^H(b) assembled dense, O(m d) nonzero writes.
inline ComplexMatrix adjoint_dense(const SensingEnsemble& ens, const RealVector& b) {
    if (b.size() != ens.m()) throw std::invalid_argument("adjoint_dense: length mismatch");
    const Index d = ens.dim();
    const Index m = ens.m();
    ComplexMatrix out = ComplexMatrix::Zero(d, d);
    // parallel over columns: for fixed c every string writes one distinct row
#ifdef _OPENMP
#pragma omp parallel for schedule(static)
#endif
    for (Index c = 0; c < d; ++c) {
        for (Index i = 0; i < m; ++i) {
            if (b[i] == 0.0) continue;
            const PauliString& p = ens.paulis[size_t(i)];
            const Complex gp = detail::i_power(unsigned(std::popcount(p.x_mask & p.z_mask)));
            const Complex ph = detail::parity(p.z_mask & std::uint64_t(c)) ? -gp : gp;
            out(Index(std::uint64_t(c) ^ p.x_mask), c) += b[i] * ph;
        }
    }
    return out * ens.normalization;
}

namespace detail {

inline RealVector make_noise(Index m, NoiseKind kind, double param, std::uint64_t seed) {
    if (param < 0) throw std::invalid_argument("generate_measurements: negative noise_param");
    RealVector e = RealVector::Zero(m);
    if (kind == NoiseKind::none || param == 0.0) return e;
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    for (Index i = 0; i < m; ++i) e[i] = nd(gen);
    if (kind == NoiseKind::gaussian_sigma) {
        // per-entry std sigma/sqrt(m), so E||e||_2 ~= sigma (see README)
        e *= param / std::sqrt(double(m));
    } else {
        e *= param / e.norm();  // fixed_norm: ||e||_2 = param exactly
    }
    return e;
}

}  // namespace detail

inline MeasurementSet generate_measurements(const SensingEnsemble& ens, const Factor& truth,
                                            NoiseKind kind, double param, std::uint64_t seed) {
    MeasurementSet ms;
    ms.y = measure_factor(ens, truth) + detail::make_noise(ens.m(), kind, param, seed);
    ms.noise_kind = kind;
    ms.noise_param = param;
    ms.seed = seed;
    return ms;
}

inline MeasurementSet generate_measurements(const SensingEnsemble& ens, const DensityMatrix& truth,
                                            NoiseKind kind, double param, std::uint64_t seed) {
    MeasurementSet ms;
    ms.y = measure_dense(ens, truth) + detail::make_noise(ens.m(), kind, param, seed);
    ms.noise_kind = kind;
    ms.noise_param = param;
    ms.seed = seed;
    return ms;
}

}  // namespace qtomo

#endif
