#include "phreg/spatial_disc.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/QR>

#include "phreg/linalg.hpp"
#include "phreg/parallel.hpp"

namespace phreg {

Grid Grid::with_nodes(double a, double b, std::size_t nodes) {
    if (nodes < 2 || !(a < b)) throw Error(ErrorKind::InputError, "grid needs at least two nodes on a < b");
    return Grid{nodes, a, (b - a) / static_cast<double>(nodes - 1)};
}

Grid Grid::with_spacing(double a, double b, double h) {
    if (!(h > 0.0)) throw Error(ErrorKind::InputError, "grid spacing must be positive");
    const auto cells = static_cast<std::size_t>(std::llround((b - a) / h));
    return with_nodes(a, b, std::max<std::size_t>(cells, 1) + 1);
}

Eigen::MatrixXd sbp_first_derivative(std::size_t nodes, double h) {
    const auto M = static_cast<Eigen::Index>(nodes);
    Eigen::MatrixXd D = Eigen::MatrixXd::Zero(M, M);
    D(0, 0) = -1.0 / h;
    D(0, 1) = 1.0 / h;
    for (Eigen::Index j = 1; j + 1 < M; ++j) {
        D(j, j - 1) = -0.5 / h;
        D(j, j + 1) = 0.5 / h;
    }
    D(M - 1, M - 2) = -1.0 / h;
    D(M - 1, M - 1) = 1.0 / h;
    return D;
}

RVector trapezoid_weights(std::size_t nodes, double h) {
    RVector w = RVector::Constant(static_cast<Eigen::Index>(nodes), h);
    w(0) = w(w.size() - 1) = 0.5 * h;
    return w;
}

namespace {

CMatrix kron(const Eigen::MatrixXd& A, const CMatrix& B) {
    CMatrix K = CMatrix::Zero(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i)
        for (Eigen::Index j = 0; j < A.cols(); ++j)
            if (A(i, j) != 0.0) K.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
    return K;
}

CMatrix block_diagonal(const MatrixField& field, std::size_t nodes, int n, const RVector* scale = nullptr) {
    CMatrix out = CMatrix::Zero(static_cast<Eigen::Index>(nodes) * n, static_cast<Eigen::Index>(nodes) * n);
    for (std::size_t j = 0; j < nodes; ++j) {
        const auto o = static_cast<Eigen::Index>(j) * n;
        const double s = scale ? (*scale)(static_cast<Eigen::Index>(j)) : 1.0;
        out.block(o, o, n, n) = s * field.at(j);
    }
    return out;
}

void check_samples(const MatrixField& field, std::size_t nodes, const char* name) {
    if (!field.is_constant() && field.sample_count() != nodes)
        throw Error(ErrorKind::DimensionMismatch,
                    std::string(name) + " has " + std::to_string(field.sample_count()) + " samples for " +
                        std::to_string(nodes) + " grid nodes");
}

}  // namespace

DiscretePlant assemble(const PHModel& model, const Grid& grid, double closure_kappa) {
    const int n = model.dim;
    const int N = model.order;
    const std::size_t M = grid.nodes;
    if (M < static_cast<std::size_t>(4 * N + 2))
        throw Error(ErrorKind::GridTooCoarse,
                    std::to_string(M) + " nodes; order " + std::to_string(N) + " needs at least " + std::to_string(4 * N + 2));
    if (!(grid.h > 0.0)) throw Error(ErrorKind::GridTooCoarse, "grid spacing must be positive");
    check_samples(model.H, M, "H");
    check_samples(model.P0, M, "P0");

    DiscretePlant dp;
    dp.grid = grid;
    dp.n = n;
    dp.N = N;
    dp.closure_kappa = closure_kappa;

    const Eigen::Index nM = static_cast<Eigen::Index>(M) * n;
    const Eigen::Index nN = model.port_dim();
    const Eigen::MatrixXd D1 = sbp_first_derivative(M, grid.h);
    const CMatrix Hbig = block_diagonal(model.H, M, n);
    const CMatrix I_n = CMatrix::Identity(n, n);

    // sum_k (D1^k (x) P_k) H + blockdiag(P0_j) H
    CMatrix op = block_diagonal(model.P0, M, n);
    Eigen::MatrixXd Dk = Eigen::MatrixXd::Identity(static_cast<Eigen::Index>(M), static_cast<Eigen::Index>(M));
    for (int k = 1; k <= N; ++k) {
        Dk = D1 * Dk;
        op += kron(Dk, model.P[k - 1]);
    }
    dp.A_full = op * Hbig;

    // Signed trace: rows (-1)^k (D1^k Hx)(b) then (-1)^k (D1^k Hx)(a).
    CMatrix trace = CMatrix::Zero(2 * nN, nM);
    Dk.setIdentity();
    for (int k = 0; k < N; ++k) {
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        trace.middleRows(static_cast<Eigen::Index>(k) * n, n) = sign * kron(Dk.bottomRows(1), I_n);
        trace.middleRows(nN + static_cast<Eigen::Index>(k) * n, n) = sign * kron(Dk.topRows(1), I_n);
        Dk = D1 * Dk;
    }
    dp.trace = trace * Hbig;

    const PortMatrices pm = build_port_matrices(model);
    dp.B_map = model.W_B * pm.R_ext * dp.trace;
    dp.C_map = model.W_C * pm.R_ext * dp.trace;
    const RVector w = trapezoid_weights(M, grid.h);
    dp.weight = block_diagonal(model.H, M, n, &w);

    // Eliminate nN unknowns through the closure map; the best-conditioned
    // columns come from column-pivoted QR.
    const CMatrix G = dp.constraint(BoundaryInput{closure_kappa});
    Eigen::ColPivHouseholderQR<CMatrix> qr(G);
    const auto& perm = qr.colsPermutation().indices();
    std::vector<Eigen::Index> elim(perm.data(), perm.data() + nN);
    std::sort(elim.begin(), elim.end());
    std::vector<bool> is_elim(static_cast<std::size_t>(nM), false);
    for (auto e : elim) is_elim[static_cast<std::size_t>(e)] = true;
    std::vector<Eigen::Index> freev;
    for (Eigen::Index i = 0; i < nM; ++i)
        if (!is_elim[static_cast<std::size_t>(i)]) freev.push_back(i);

    CMatrix G_e(nN, nN), G_f(nN, nM - nN);
    for (Eigen::Index c = 0; c < nN; ++c) G_e.col(c) = G.col(elim[static_cast<std::size_t>(c)]);
    for (Eigen::Index c = 0; c < nM - nN; ++c) G_f.col(c) = G.col(freev[static_cast<std::size_t>(c)]);
    const CMatrix coupling = linalg::checked_solve(G_e, G_f, ErrorKind::SingularElimination, "closure elimination");

    // Null-space basis of G with identity on the free unknowns.
    CMatrix Z = CMatrix::Zero(nM, nM - nN);
    for (Eigen::Index c = 0; c < nM - nN; ++c) Z(freev[static_cast<std::size_t>(c)], c) = 1.0;
    for (Eigen::Index r = 0; r < nN; ++r) Z.row(elim[static_cast<std::size_t>(r)]) = -coupling.row(r);

    const CMatrix ZW = Z.adjoint() * dp.weight;
    const CMatrix gram = ZW * Z;
    dp.M_rows = gram.llt().solve(ZW);
    dp.A_rows = dp.M_rows * dp.A_full;
    dp.eliminated = std::move(elim);
    return dp;
}

void LTISystem::check_dimensions() const {
    const bool ok = A.rows() == A.cols() && B.rows() == A.rows() && C.cols() == A.cols() && D.rows() == C.rows() &&
                    D.cols() == B.cols();
    if (!ok) throw Error(ErrorKind::DimensionMismatch, "inconsistent LTI system dimensions");
    if (!A.allFinite() || !B.allFinite() || !C.allFinite() || !D.allFinite())
        throw Error(ErrorKind::InvariantViolation, "LTI system has non-finite entries");
}

CMatrix LTISystem::transfer(Complex lambda) const {
    const CMatrix shifted = lambda * CMatrix::Identity(states(), states()) - A;
    return C * linalg::checked_solve(shifted, B, ErrorKind::ResolventSingular, "LTI resolvent") + D;
}

ReducedPlant reduce_to_lti(const DiscretePlant& dp, BoundaryInput input) {
    const Eigen::Index nM = dp.unknowns();
    const Eigen::Index nN = dp.ports();
    CMatrix stacked(nM, nM);
    stacked << dp.M_rows, dp.constraint(input);
    const CMatrix T = linalg::checked_solve(stacked, CMatrix::Identity(nM, nM), ErrorKind::SingularElimination,
                                            "boundary elimination");
    ReducedPlant rp;
    rp.kappa = input.kappa;
    rp.state_to_x = T.leftCols(nM - nN);
    rp.input_to_x = T.rightCols(nN);
    rp.weight = dp.weight;
    rp.sys.A = dp.A_rows * rp.state_to_x;
    rp.sys.B = dp.A_rows * rp.input_to_x;
    rp.sys.C = dp.C_map * rp.state_to_x;
    rp.sys.D = dp.C_map * rp.input_to_x;
    return rp;
}

CMatrix transfer_function(const DiscretePlant& dp, BoundaryInput input, Complex lambda) {
    const Eigen::Index nM = dp.unknowns();
    const Eigen::Index nN = dp.ports();
    CMatrix stacked(nM, nM);
    stacked << dp.A_rows - lambda * dp.M_rows, dp.constraint(input);
    CMatrix rhs = CMatrix::Zero(nM, nN);
    rhs.bottomRows(nN).setIdentity();
    const CMatrix X = linalg::checked_solve(stacked, rhs, ErrorKind::ResolventSingular, "stacked resolvent");
    return dp.C_map * X;
}

std::vector<CMatrix> transfer_function_batch(const DiscretePlant& dp, BoundaryInput input,
                                             std::span<const Complex> lambdas) {
    std::vector<CMatrix> out(lambdas.size());
    parallel::for_each_index(lambdas.size(), [&](std::size_t i) { out[i] = transfer_function(dp, input, lambdas[i]); });
    return out;
}

std::vector<CMatrix> transfer_function_batch_serial(const DiscretePlant& dp, BoundaryInput input,
                                                    std::span<const Complex> lambdas) {
    std::vector<CMatrix> out;
    out.reserve(lambdas.size());
    for (const Complex& l : lambdas) out.push_back(transfer_function(dp, input, l));
    return out;
}

}  // namespace phreg
