#pragma once

#include "phreg/types.hpp"

namespace phreg::linalg {

RVector singular_values(const CMatrix& A);

/// Number of singular values above rel_tol * sigma_max.
Eigen::Index numerical_rank(const CMatrix& A, double rel_tol = kRankTol);

double min_singular_value(const CMatrix& A);

CMatrix hermitian_part(const CMatrix& A);

/// Eigenvalues of the Hermitian part of A, ascending.
RVector hermitian_eigenvalues(const CMatrix& A);

double min_hermitian_eigenvalue(const CMatrix& A);
double max_hermitian_eigenvalue(const CMatrix& A);

/// Max real part over the spectrum. Throws EigFailure on non-finite input
/// or when the eigensolver does not converge.
double spectral_abscissa(const CMatrix& A);

CVector eigenvalues(const CMatrix& A);

CMatrix pseudoinverse(const CMatrix& A, double rel_tol = kRankTol);

/// 2x2 block matrix [[0, I], [I, 0]] of size 2*half.
CMatrix block_swap(Eigen::Index half);

/// Solves A X = B with partial pivoting. Throws `on_singular` when the
/// reciprocal condition estimate drops below kSingularRcond.
CMatrix checked_solve(const CMatrix& A, const CMatrix& B, ErrorKind on_singular,
                      const char* context);

bool all_finite(const CMatrix& A);

}  // namespace phreg::linalg
