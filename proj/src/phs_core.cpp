#include "phreg/phs_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "phreg/linalg.hpp"

namespace phreg {

namespace {

double scaled_tol(double scale) { return kRankTol * std::max(1.0, scale); }

[[noreturn]] void violation(const std::string& what) { throw Error(ErrorKind::InvariantViolation, what); }

void require_shape(const CMatrix& M, Eigen::Index rows, Eigen::Index cols, const std::string& name) {
    if (M.rows() != rows || M.cols() != cols) {
        std::ostringstream os;
        os << name << " is " << M.rows() << "x" << M.cols() << ", expected " << rows << "x" << cols;
        throw Error(ErrorKind::DimensionMismatch, os.str());
    }
}

}  // namespace

MatrixField MatrixField::constant(CMatrix value) { return MatrixField(std::vector<CMatrix>{std::move(value)}); }

MatrixField MatrixField::sampled(std::vector<CMatrix> samples) {
    if (samples.empty()) throw Error(ErrorKind::InputError, "sampled field needs at least one sample");
    return MatrixField(std::move(samples));
}

const char* to_string(Passivity p) {
    switch (p) {
        case Passivity::EnergyPreserving: return "energy_preserving";
        case Passivity::Passive: return "passive";
        case Passivity::Neither: return "neither";
    }
    return "neither";
}

void validate(const PHModel& model) {
    const int N = model.order;
    const int n = model.dim;
    if (N < 1 || n < 1) violation("order and state dimension must be positive");
    if (!(model.a < model.b)) violation("interval requires a < b");
    if (static_cast<int>(model.P.size()) != N) violation("expected one P_k per derivative order");

    for (int k = 1; k <= N; ++k) {
        const CMatrix& Pk = model.P[k - 1];
        require_shape(Pk, n, n, "P_" + std::to_string(k));
        const double sign = (k % 2 == 1) ? 1.0 : -1.0;  // (-1)^(k+1)
        const double defect = (Pk.adjoint() - sign * Pk).cwiseAbs().maxCoeff();
        if (defect > scaled_tol(Pk.cwiseAbs().maxCoeff()))
            violation("P_" + std::to_string(k) + " violates P_k* = (-1)^(k+1) P_k");
    }
    const RVector sN = linalg::singular_values(model.P.back());
    if (sN(sN.size() - 1) <= kRankTol * sN(0) || sN(0) == 0.0) violation("P_N is not invertible");

    if (model.P0.empty()) violation("P0 is missing");
    for (std::size_t j = 0; j < model.P0.sample_count(); ++j) {
        const CMatrix& P0 = model.P0.samples()[j];
        require_shape(P0, n, n, "P0");
        if (linalg::max_hermitian_eigenvalue(P0) > scaled_tol(P0.norm()))
            violation("Re P0 is not negative semidefinite at sample " + std::to_string(j));
    }

    if (!(model.h_lower > 0.0) || !(model.h_lower <= model.h_upper)) violation("Hamiltonian bounds need 0 < m <= M");
    if (model.H.empty()) violation("H is missing");
    for (std::size_t j = 0; j < model.H.sample_count(); ++j) {
        const CMatrix& H = model.H.samples()[j];
        require_shape(H, n, n, "H");
        const double tol = scaled_tol(H.norm());
        if ((H - H.adjoint()).cwiseAbs().maxCoeff() > tol) violation("H is not Hermitian at sample " + std::to_string(j));
        const RVector ev = linalg::hermitian_eigenvalues(H);
        if (ev.minCoeff() < model.h_lower - tol || ev.maxCoeff() > model.h_upper + tol)
            violation("H leaves the declared bounds [m, M] at sample " + std::to_string(j));
    }

    const Eigen::Index nN = model.port_dim();
    require_shape(model.W_B, nN, 2 * nN, "W_B");
    require_shape(model.W_C, nN, 2 * nN, "W_C");
    if (linalg::numerical_rank(model.W_B) != nN) violation("W_B does not have full row rank");
    if (linalg::numerical_rank(model.W_C) != nN) violation("W_C does not have full row rank");
    CMatrix stacked(2 * nN, 2 * nN);
    stacked << model.W_B, model.W_C;
    if (linalg::numerical_rank(stacked) != 2 * nN) violation("N(W_B) and N(W_C) intersect nontrivially");
}

CMatrix build_q(std::span<const CMatrix> P, int n, int N) {
    if (static_cast<int>(P.size()) != N) throw Error(ErrorKind::DimensionMismatch, "build_q needs N coefficient matrices");
    CMatrix Q = CMatrix::Zero(n * N, n * N);
    for (int i = 1; i <= N; ++i) {
        for (int j = 1; i + j <= N + 1; ++j) {
            const double sign = ((j - 1) % 2 == 0) ? 1.0 : -1.0;
            Q.block((i - 1) * n, (j - 1) * n, n, n) = sign * P[i + j - 2];
        }
    }
    const RVector s = linalg::singular_values(Q);
    if (s(0) == 0.0 || s(s.size() - 1) <= kRankTol * s(0))
        throw Error(ErrorKind::SingularQ, "Q is singular; P_N must be invertible");
    return Q;
}

PortMatrices build_port_matrices(const PHModel& model) {
    PortMatrices pm;
    pm.Q = build_q(model.P, model.dim, model.order);
    const Eigen::Index nN = model.port_dim();
    const CMatrix I = CMatrix::Identity(nN, nN);
    pm.R_ext.resize(2 * nN, 2 * nN);
    pm.R_ext << pm.Q, -pm.Q, I, I;
    pm.R_ext /= std::sqrt(2.0);
    pm.Sigma = linalg::block_swap(nN);
    return pm;
}

PortVariables port_variables(const CVector& jet, const PortMatrices& pm) {
    if (jet.size() != pm.R_ext.cols())
        throw Error(ErrorKind::DimensionMismatch, "jet length must equal 2nN");
    const CVector fe = pm.R_ext * jet;
    const Eigen::Index half = fe.size() / 2;
    return {fe.head(half), fe.tail(half)};
}

PassivityReport classify_passivity(const PHModel& model) {
    PassivityReport rep;
    const Eigen::Index nN = model.port_dim();
    const CMatrix Sigma = linalg::block_swap(nN);
    rep.gram.resize(2 * nN, 2 * nN);
    rep.gram << model.W_B * Sigma * model.W_B.adjoint(), model.W_B * Sigma * model.W_C.adjoint(),
        model.W_C * Sigma * model.W_B.adjoint(), model.W_C * Sigma * model.W_C.adjoint();

    for (const CMatrix& P0 : model.P0.samples()) {
        rep.max_re_p0 = std::max(rep.max_re_p0, linalg::max_hermitian_eigenvalue(P0));
        rep.p0_skew_defect = std::max(rep.p0_skew_defect, (P0 + P0.adjoint()).cwiseAbs().maxCoeff());
    }
    if (model.P0.empty()) rep.max_re_p0 = 0.0;

    if (linalg::numerical_rank(rep.gram) < 2 * nN) {
        rep.gram_singular = true;
        rep.classification = Passivity::Neither;
        rep.diagnostic = "W_B/W_C pairing is degenerate: the port Gram matrix is singular";
        return rep;
    }
    rep.P_WBWC = rep.gram.inverse();
    const CMatrix gap = rep.P_WBWC - Sigma;
    rep.equality_gap = gap.cwiseAbs().maxCoeff();
    rep.max_eig_gap = linalg::max_hermitian_eigenvalue(gap);

    const double tol = kRankTol * std::max(1.0, rep.P_WBWC.cwiseAbs().maxCoeff());
    const bool p0_skew = rep.p0_skew_defect <= tol;
    const bool p0_dissipative = rep.max_re_p0 <= tol;
    if (rep.equality_gap <= tol && p0_skew) {
        rep.classification = Passivity::EnergyPreserving;
    } else if (rep.max_eig_gap <= tol && p0_dissipative) {
        rep.classification = Passivity::Passive;
    } else {
        rep.classification = Passivity::Neither;
        std::ostringstream os;
        if (rep.max_eig_gap > tol) os << "P_WBWC - Sigma has eigenvalue " << rep.max_eig_gap << " > 0";
        if (!p0_dissipative) os << (os.tellp() > 0 ? "; " : "") << "Re P0 has eigenvalue " << rep.max_re_p0 << " > 0";
        rep.diagnostic = os.str();
    }
    return rep;
}

StabilityCertificate stability_certificate(const CMatrix& W_B, const CMatrix& Sigma) {
    if (W_B.cols() != Sigma.rows()) throw Error(ErrorKind::DimensionMismatch, "W_B and Sigma do not conform");
    const CMatrix form = W_B * Sigma * W_B.adjoint();
    StabilityCertificate cert;
    cert.min_eig = linalg::min_hermitian_eigenvalue(form);
    const RVector s = linalg::singular_values(form);
    const double tol = s.size() ? kRankTol * s(0) : 0.0;
    cert.certified = cert.min_eig > tol;
    return cert;
}

FeedbackBoundary feedback_boundary(const CMatrix& W_B, const CMatrix& W_C, double kappa) {
    if (!(kappa > 0.0)) throw Error(ErrorKind::InputError, "feedback gain kappa must be positive");
    if (W_B.rows() != W_C.rows() || W_B.cols() != W_C.cols())
        throw Error(ErrorKind::DimensionMismatch, "W_B and W_C shapes differ");
    const Eigen::Index nN = W_B.rows();
    const CMatrix Sigma = linalg::block_swap(nN);
    const CMatrix cross = W_B * Sigma * W_C.adjoint();
    const double defect = (cross - CMatrix::Identity(nN, nN)).cwiseAbs().maxCoeff();
    if (defect > kRankTol * std::max(1.0, cross.cwiseAbs().maxCoeff()))
        throw Error(ErrorKind::NotPassive, "W_B Sigma W_C* != I (defect " + std::to_string(defect) + ")");

    FeedbackBoundary fb;
    fb.kappa = kappa;
    fb.W_kappa = W_B + kappa * W_C;
    fb.certificate = stability_certificate(fb.W_kappa, Sigma);
    const double bound_tol = kRankTol * std::max(1.0, fb.W_kappa.squaredNorm());
    if (fb.certificate.min_eig < 2.0 * kappa - bound_tol)
        throw Error(ErrorKind::NotPassive, "W_k Sigma W_k* falls below 2 kappa; W_B or W_C Sigma-form is indefinite");
    return fb;
}

RVector trace_signs(int n, int N) {
    RVector s(2 * n * N);
    for (int side = 0; side < 2; ++side)
        for (int k = 0; k < N; ++k)
            s.segment(side * n * N + k * n, n).setConstant(k % 2 == 0 ? 1.0 : -1.0);
    return s;
}

Eigen::Index jet_index(End end, int derivative, int component, int n, int N) {
    if (derivative < 0 || derivative >= N || component < 0 || component >= n)
        throw Error(ErrorKind::InputError, "jet term outside 0 <= derivative < N, 0 <= component < n");
    const Eigen::Index side = (end == End::b) ? 0 : static_cast<Eigen::Index>(n) * N;
    return side + static_cast<Eigen::Index>(derivative) * n + component;
}

CMatrix boundary_map_from_selection(const JetSelection& selection, const PortMatrices& pm, int n, int N) {
    const Eigen::Index width = 2 * static_cast<Eigen::Index>(n) * N;
    if (pm.R_ext.rows() != width) throw Error(ErrorKind::DimensionMismatch, "port matrices do not match n, N");
    CMatrix S = CMatrix::Zero(static_cast<Eigen::Index>(selection.size()), width);
    for (std::size_t r = 0; r < selection.size(); ++r)
        for (const JetTerm& t : selection[r])
            S(static_cast<Eigen::Index>(r), jet_index(t.end, t.derivative, t.component, n, N)) += t.coef;
    // Physical values = S * D * (signed trace), signed trace = R_ext^{-1} (f; e).
    const CMatrix D = trace_signs(n, N).cast<Complex>().asDiagonal();
    return S * D * pm.R_ext.inverse();
}

}  // namespace phreg
