#pragma once

#include <cmath>
#include <random>

#include "phreg/linalg.hpp"
#include "phreg/phs_core.hpp"
#include "phreg/regulator.hpp"

namespace phreg::testing {

inline CMatrix random_matrix(std::mt19937& rng, Eigen::Index r, Eigen::Index c, double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    CMatrix M(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j) M(i, j) = Complex(g(rng), g(rng));
    return M;
}

inline CMatrix random_hermitian(std::mt19937& rng, Eigen::Index n) {
    const CMatrix A = random_matrix(rng, n, n);
    return 0.5 * (A + A.adjoint());
}

/// W with W Sigma W* = Sigma, from the Cayley transform of a random
/// D-skew-adjoint generator, D = diag(I, -I), conjugated by
/// J = [[I, I], [I, -I]] / sqrt 2.
inline CMatrix random_sigma_unitary(std::mt19937& rng, Eigen::Index half, double scale = 0.4) {
    const Eigen::Index n2 = 2 * half;
    CMatrix K1 = random_matrix(rng, half, half, scale), K2 = random_matrix(rng, half, half, scale);
    K1 = (0.5 * (K1 - K1.adjoint())).eval();
    K2 = (0.5 * (K2 - K2.adjoint())).eval();
    const CMatrix Zb = random_matrix(rng, half, half, scale);
    CMatrix X(n2, n2);
    X << K1, Zb, Zb.adjoint(), K2;
    const CMatrix I = CMatrix::Identity(n2, n2);
    const CMatrix V = (I - X).inverse() * (I + X);
    CMatrix J(n2, n2);
    const CMatrix Ih = CMatrix::Identity(half, half);
    J << Ih, Ih, Ih, -Ih;
    J /= std::sqrt(2.0);
    return J * V * J;
}

/// First-order (N = 1) model with random Hermitian P1, sampled H and
/// impedance energy preserving boundary maps.
inline PHModel random_first_order_model(std::mt19937& rng, int n, std::size_t nodes, bool dissipative_p0) {
    PHModel m;
    m.order = 1;
    m.dim = n;
    CMatrix P1;
    do {
        P1 = random_hermitian(rng, n);
    } while (linalg::min_singular_value(P1) < 0.3);
    m.P = {P1};
    CMatrix P0 = CMatrix::Zero(n, n);
    if (dissipative_p0) {
        const CMatrix R = random_matrix(rng, n, n, 0.3);
        P0 = -R * R.adjoint();
    }
    m.P0 = MatrixField::constant(P0);
    std::vector<CMatrix> H;
    double lo = 1e300, hi = 0.0;
    for (std::size_t j = 0; j < nodes; ++j) {
        const CMatrix A = random_matrix(rng, n, n, 0.3);
        H.push_back(CMatrix::Identity(n, n) + A * A.adjoint());
        const RVector ev = linalg::hermitian_eigenvalues(H.back());
        lo = std::min(lo, ev.minCoeff());
        hi = std::max(hi, ev.maxCoeff());
    }
    m.H = MatrixField::sampled(H);
    m.h_lower = lo;
    m.h_upper = hi;
    const CMatrix W = random_sigma_unitary(rng, n);
    m.W_B = W.topRows(n);
    m.W_C = W.bottomRows(n);
    return m;
}

inline Exosystem random_exosystem(std::mt19937& rng, Eigen::Index p, int q) {
    std::uniform_real_distribution<double> u(0.5, 6.0);
    Exosystem exo;
    for (int k = 0; k < q; ++k) exo.freqs.push_back((k % 2 ? -1.0 : 1.0) * (u(rng) + 6.0 * k));
    exo.E = random_matrix(rng, p, q);
    exo.F = random_matrix(rng, p, q);
    return exo;
}

}  // namespace phreg::testing
