#pragma once

#include <optional>
#include <span>
#include <vector>

#include "phreg/spatial_disc.hpp"
#include "phreg/types.hpp"

namespace phreg {

/// Signal generator v' = S v with S = diag(i omega_k); w = E v, y_ref = -F v.
struct Exosystem {
    std::vector<double> freqs;
    CMatrix E;  // nN x q
    CMatrix F;  // nN x q

    Eigen::Index q() const { return static_cast<Eigen::Index>(freqs.size()); }
    CMatrix S() const;
    /// Throws InputError on repeated frequencies or shape mismatch.
    void validate() const;
};

/// v_k(t) = exp(i omega_k t) v0_k.
CVector exo_solution(const Exosystem& exo, const CVector& v0, double t);

/// Minimal-order internal model controller
/// z' = G1 z + G2 e,  u = K z.
struct Controller {
    CMatrix G1;  // q nN x q nN, diag(i omega_k I)
    CMatrix G2;  // q nN x nN
    CMatrix K;   // nN x q nN, epsilon [K0^1 ... K0^q]
    CMatrix K0;  // nN x q nN, the unscaled gain blocks
    double kappa = 0.0;
    double epsilon = 0.0;
    std::vector<double> freqs;

    Eigen::Index ports() const { return K.rows(); }
    Eigen::Index states() const { return G1.rows(); }
};

/// Builds the controller from P_kappa(i omega_k), one per frequency.
/// With no user gains K0^k = pinv(P_kappa(i omega_k)). Throws NotSurjective
/// when some P_kappa(i omega_k) loses row rank, InputError when a user gain
/// leaves P_kappa K0^k singular.
Controller synthesize(std::span<const double> freqs, std::span<const CMatrix> P_kappa, double kappa, double epsilon,
                      const std::vector<CMatrix>* user_K0 = nullptr);

/// Evaluates P_kappa on the discrete plant (in parallel over frequencies)
/// and synthesizes.
Controller synthesize(const Exosystem& exo, const DiscretePlant& plant, double kappa, double epsilon,
                      const std::vector<CMatrix>* user_K0 = nullptr);

/// Same, for a plant already in LTI form with the kappa feedback built in.
Controller synthesize(const Exosystem& exo, const LTISystem& plant_kappa, double kappa, double epsilon,
                      const std::vector<CMatrix>* user_K0 = nullptr);

/// Copy of `ctrl` with K rescaled to eps K0.
Controller with_epsilon(const Controller& ctrl, double epsilon);

struct FrequencyRanks {
    double omega = 0.0;
    Eigen::Index rank_shift = 0;   // rank(i omega - G1)
    Eigen::Index rank_g2 = 0;      // rank(G2)
    Eigen::Index rank_joint = 0;   // rank[i omega - G1 | G2]
    bool range_ok = false;         // rank_joint == rank_shift + rank_g2
};

struct GConditionReport {
    bool ok = false;
    bool kernel_ok = false;  // N(G2) = {0}
    std::vector<FrequencyRanks> per_frequency;
};

GConditionReport check_g_conditions(const Controller& ctrl, std::span<const double> freqs);

/// Closed loop on plant state (+) controller state:
///   xi_e' = A_e xi_e + B_e v,   e = C_e xi_e + D_e v.
/// The maps rebuild the nodal plant state for energy reporting:
///   x = state_to_x xi + input_to_x (K z + (E - kappa F) v).
struct ClosedLoop {
    CMatrix A_e;
    CMatrix B_e;
    CMatrix C_e;
    CMatrix D_e;

    Eigen::Index plant_states = 0;
    CMatrix state_to_x;
    CMatrix input_to_x;
    CMatrix weight;
    CMatrix K;
    CMatrix E_kappa;

    Eigen::Index states() const { return A_e.rows(); }
    Eigen::Index error_dim() const { return C_e.rows(); }
    CVector nodal_state(const CVector& xi_e, const CVector& v) const;
    double plant_energy(const CVector& xi_e, const CVector& v) const;
};

/// `plant_kappa` must be realized with the (B + kappa C) constraint.
/// Nodal reconstruction is the identity on plant states.
ClosedLoop assemble_closed_loop(const LTISystem& plant_kappa, const Controller& ctrl, const Exosystem& exo);
ClosedLoop assemble_closed_loop(const ReducedPlant& plant_kappa, const Controller& ctrl, const Exosystem& exo);

struct RegulatorSolution {
    CMatrix Sigma;
    double residual = 0.0;  // ||C_e Sigma + D_e||_2
    double d_norm = 0.0;    // ||D_e||_2
    double abscissa = 0.0;
};

/// Columnwise solve of (i omega_k - A_e) Sigma phi_k = B_e phi_k.
/// Throws Unstable unless the closed loop is exponentially stable.
RegulatorSolution solve_regulator_equations(const ClosedLoop& cl, const Exosystem& exo);

double spectral_abscissa(const CMatrix& A);

struct SweepRow {
    double epsilon = 0.0;
    double abscissa = 0.0;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    std::size_t argmin = 0;
    std::size_t stable_prefix = 0;  // rows [0, stable_prefix) have abscissa < 0
    double epsilon_star = 0.0;      // largest epsilon of that prefix, 0 if empty

    double min_abscissa() const { return rows.at(argmin).abscissa; }
};

/// Closed-loop abscissa for each epsilon in an ascending positive grid,
/// evaluated in parallel. Throws EmptyGrid / InputError on bad grids.
SweepResult epsilon_sweep(const LTISystem& plant_kappa, const Controller& base, const Exosystem& exo,
                          std::span<const double> grid);

/// Serial reference for epsilon_sweep.
SweepResult epsilon_sweep_serial(const LTISystem& plant_kappa, const Controller& base, const Exosystem& exo,
                                 std::span<const double> grid);

}  // namespace phreg
