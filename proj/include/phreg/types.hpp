#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace phreg {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RVector = Eigen::VectorXd;

// Relative rank / positivity threshold, scaled by the largest singular value.
inline constexpr double kRankTol = 1e-9;
// Reciprocal-condition floor below which a square solve is treated as singular.
inline constexpr double kSingularRcond = 1e-12;

enum class ErrorKind {
    SingularQ,
    DimensionMismatch,
    GramSingular,
    NotPassive,
    GridTooCoarse,
    SingularElimination,
    ResolventSingular,
    NotSurjective,
    Unstable,
    EigFailure,
    EmptyGrid,
    StepSolveFailure,
    AuditFailure,
    InvariantViolation,
    InputError,
};

const char* to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
   public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

   private:
    ErrorKind kind_;
};

/// Raised by the energy audit; remembers the first step that broke the inequality.
class AuditFailure : public Error {
   public:
    AuditFailure(std::size_t step, const std::string& what)
        : Error(ErrorKind::AuditFailure, what), step_(step) {}

    std::size_t step() const noexcept { return step_; }

   private:
    std::size_t step_;
};

}  // namespace phreg
