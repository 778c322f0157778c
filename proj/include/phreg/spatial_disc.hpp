#pragma once

#include <span>
#include <vector>

#include "phreg/phs_core.hpp"
#include "phreg/types.hpp"

namespace phreg {

/// Uniform grid with `nodes` points on [a, b].
struct Grid {
    std::size_t nodes = 0;
    double a = 0.0;
    double h = 0.0;

    static Grid with_nodes(double a, double b, std::size_t nodes);
    /// Rounds (b - a) / h to the nearest whole number of cells.
    static Grid with_spacing(double a, double b, double h);

    double node(std::size_t j) const { return a + h * static_cast<double>(j); }
};

/// Selects the boundary map that is driven by the input:
/// (B + kappa C) x = u. kappa = 0 is the open-loop plant.
struct BoundaryInput {
    double kappa = 0.0;

    static BoundaryInput open_loop() { return {0.0}; }
    static BoundaryInput feedback(double kappa) { return {kappa}; }
};

/// Finite-difference realization of a port-Hamiltonian system.
///
/// The nodal operator uses summation-by-parts first differences (central in
/// the interior, one-sided at the ends) composed k times for the k-th
/// derivative, which makes Re<A x, x>_weight equal Re<f, e> of the discrete
/// boundary trace exactly. Boundary conditions are imposed algebraically:
/// the nN constrained directions are fixed by the closure map
/// B + closure_kappa C, and A_rows / M_rows are the remaining equations
/// A_rows x = d/dt (M_rows x), independent of which boundary map is driven.
struct DiscretePlant {
    Grid grid;
    int n = 0;
    int N = 0;
    double closure_kappa = 0.0;

    CMatrix A_full;  // nM x nM nodal operator x -> sum_k P_k D^k (Hx) + P0 Hx
    CMatrix trace;   // 2nN x nM signed boundary trace of Hx
    CMatrix B_map;   // nN x nM, x -> W_B R_ext trace(x)
    CMatrix C_map;   // nN x nM, x -> W_C R_ext trace(x)
    CMatrix weight;  // nM x nM, trapezoid weights times H(z_j)

    CMatrix A_rows;  // (nM - nN) x nM
    CMatrix M_rows;  // (nM - nN) x nM
    std::vector<Eigen::Index> eliminated;  // unknowns solved from the closure map

    Eigen::Index unknowns() const { return A_full.rows(); }
    Eigen::Index ports() const { return B_map.rows(); }
    CMatrix constraint(BoundaryInput input) const { return B_map + input.kappa * C_map; }
};

/// SBP first-difference matrix on `nodes` points.
Eigen::MatrixXd sbp_first_derivative(std::size_t nodes, double h);

/// Trapezoid quadrature weights.
RVector trapezoid_weights(std::size_t nodes, double h);

/// Throws GridTooCoarse when nodes < 4N + 2, DimensionMismatch when sampled
/// coefficients do not match the grid, SingularElimination when the closure
/// map cannot be solved for nN unknowns.
DiscretePlant assemble(const PHModel& model, const Grid& grid, double closure_kappa = 0.0);

struct LTISystem {
    CMatrix A;
    CMatrix B;
    CMatrix C;
    CMatrix D;

    Eigen::Index states() const { return A.rows(); }
    Eigen::Index inputs() const { return B.cols(); }
    Eigen::Index outputs() const { return C.rows(); }

    /// C (lambda - A)^{-1} B + D; throws ResolventSingular near the spectrum.
    CMatrix transfer(Complex lambda) const;
    void check_dimensions() const;
};

/// LTI realization plus the maps needed to rebuild nodal states:
/// x = state_to_x * xi + input_to_x * u.
struct ReducedPlant {
    LTISystem sys;
    CMatrix state_to_x;
    CMatrix input_to_x;
    CMatrix weight;
    double kappa = 0.0;

    double energy(const CVector& x) const { return (x.adjoint() * weight * x).real()(0, 0); }
};

ReducedPlant reduce_to_lti(const DiscretePlant& dp, BoundaryInput input);

/// Solves {A_rows x = lambda M_rows x, constraint x = e_j} and returns the
/// nN x nN matrix with columns C_map x.
CMatrix transfer_function(const DiscretePlant& dp, BoundaryInput input, Complex lambda);

/// Transfer function at many points, evaluated in parallel.
std::vector<CMatrix> transfer_function_batch(const DiscretePlant& dp, BoundaryInput input,
                                             std::span<const Complex> lambdas);

/// Serial reference for transfer_function_batch.
std::vector<CMatrix> transfer_function_batch_serial(const DiscretePlant& dp, BoundaryInput input,
                                                    std::span<const Complex> lambdas);

}  // namespace phreg
