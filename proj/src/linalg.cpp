#include "phreg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace phreg {

const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::SingularQ: return "SingularQ";
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::GramSingular: return "GramSingular";
        case ErrorKind::NotPassive: return "NotPassive";
        case ErrorKind::GridTooCoarse: return "GridTooCoarse";
        case ErrorKind::SingularElimination: return "SingularElimination";
        case ErrorKind::ResolventSingular: return "ResolventSingular";
        case ErrorKind::NotSurjective: return "NotSurjective";
        case ErrorKind::Unstable: return "Unstable";
        case ErrorKind::EigFailure: return "EigFailure";
        case ErrorKind::EmptyGrid: return "EmptyGrid";
        case ErrorKind::StepSolveFailure: return "StepSolveFailure";
        case ErrorKind::AuditFailure: return "AuditFailure";
        case ErrorKind::InvariantViolation: return "InvariantViolation";
        case ErrorKind::InputError: return "InputError";
    }
    return "Unknown";
}

namespace linalg {

RVector singular_values(const CMatrix& A) {
    if (A.size() == 0) return RVector();
    Eigen::BDCSVD<CMatrix> svd(A);
    return svd.singularValues();
}

Eigen::Index numerical_rank(const CMatrix& A, double rel_tol) {
    const RVector s = singular_values(A);
    if (s.size() == 0 || s(0) == 0.0) return 0;
    const double cut = rel_tol * s(0);
    return static_cast<Eigen::Index>(std::count_if(s.begin(), s.end(), [cut](double v) { return v > cut; }));
}

double min_singular_value(const CMatrix& A) {
    const RVector s = singular_values(A);
    if (s.size() == 0) return 0.0;
    // Wide or tall matrices: the smallest of min(rows, cols) values.
    return s(s.size() - 1);
}

CMatrix hermitian_part(const CMatrix& A) { return 0.5 * (A + A.adjoint()); }

RVector hermitian_eigenvalues(const CMatrix& A) {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(A), Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::EigFailure, "Hermitian eigensolver did not converge");
    return es.eigenvalues();
}

double min_hermitian_eigenvalue(const CMatrix& A) { return hermitian_eigenvalues(A).minCoeff(); }

double max_hermitian_eigenvalue(const CMatrix& A) { return hermitian_eigenvalues(A).maxCoeff(); }

bool all_finite(const CMatrix& A) { return A.allFinite(); }

CVector eigenvalues(const CMatrix& A) {
    if (A.rows() != A.cols()) throw Error(ErrorKind::DimensionMismatch, "eigenvalues of a non-square matrix");
    if (!all_finite(A)) throw Error(ErrorKind::EigFailure, "matrix has non-finite entries");
    Eigen::ComplexEigenSolver<CMatrix> es(A, false);
    if (es.info() != Eigen::Success) throw Error(ErrorKind::EigFailure, "complex eigensolver did not converge");
    return es.eigenvalues();
}

double spectral_abscissa(const CMatrix& A) {
    if (A.size() == 0) return -std::numeric_limits<double>::infinity();
    return eigenvalues(A).real().maxCoeff();
}

CMatrix pseudoinverse(const CMatrix& A, double rel_tol) {
    Eigen::JacobiSVD<CMatrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const RVector& s = svd.singularValues();
    RVector inv = RVector::Zero(s.size());
    const double cut = s.size() ? rel_tol * s(0) : 0.0;
    for (Eigen::Index i = 0; i < s.size(); ++i)
        if (s(i) > cut) inv(i) = 1.0 / s(i);
    return svd.matrixV() * inv.cast<Complex>().asDiagonal() * svd.matrixU().adjoint();
}

CMatrix block_swap(Eigen::Index half) {
    CMatrix S = CMatrix::Zero(2 * half, 2 * half);
    S.topRightCorner(half, half).setIdentity();
    S.bottomLeftCorner(half, half).setIdentity();
    return S;
}

CMatrix checked_solve(const CMatrix& A, const CMatrix& B, ErrorKind on_singular, const char* context) {
    if (A.rows() != A.cols() || A.rows() != B.rows())
        throw Error(ErrorKind::DimensionMismatch, std::string(context) + ": incompatible solve dimensions");
    Eigen::PartialPivLU<CMatrix> lu(A);
    const double rc = lu.rcond();
    if (!(rc >= kSingularRcond))
        throw Error(on_singular, std::string(context) + ": reciprocal condition " + std::to_string(rc));
    return lu.solve(B);
}

}  // namespace linalg
}  // namespace phreg
