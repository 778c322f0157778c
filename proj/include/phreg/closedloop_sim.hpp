#pragma once

#include <limits>
#include <utility>
#include <vector>

#include "phreg/regulator.hpp"

namespace phreg {

struct Trajectory {
    double dt = 0.0;
    std::vector<double> t;
    std::vector<CVector> state;  // xi_e per step; empty unless requested
    std::vector<CVector> error;
    std::vector<double> err_norm;
    std::vector<double> energy;  // ||x||^2 in the weighted inner product

    std::size_t size() const { return t.size(); }
};

struct SimulationOptions {
    double T = 20.0;
    double dt = 1e-3;
    bool keep_states = false;
};

/// Crank-Nicolson integration of xi' = A_e xi + B_e v(t) with v sampled
/// exactly. round(T / dt) steps, so T / dt + 1 samples.
Trajectory simulate(const ClosedLoop& cl, const Exosystem& exo, const CVector& v0, const CVector& xi0,
                    const SimulationOptions& opt);

struct ErrorMetrics {
    double head_sup = 0.0;
    double tail_sup = 0.0;
    double decay_rate = 0.0;  // -inf when the error vanishes
    bool degenerate = false;

    double ratio() const { return head_sup > 0.0 ? tail_sup / head_sup : 0.0; }
};

ErrorMetrics error_metrics(const Trajectory& traj);

struct AuditReport {
    std::size_t steps = 0;
    double initial_energy = 0.0;
    double final_energy = 0.0;
    double m_hat = 0.0;          // min over steps of -dE / (dt |y_mid|^2)
    double output_integral = 0.0;  // sum dt |y_mid|^2
    double tolerance = 0.0;
    bool integrated_bound_ok = true;
};

/// Simulates the kappa-fed plant with zero external input from reduced
/// state xi0 and checks the discrete dissipation inequality step by step.
/// Throws AuditFailure at the first step where the energy grows.
AuditReport energy_audit(const ReducedPlant& plant_kappa, const CVector& xi0, double T, double dt);

struct Scalings {
    double rho = 1.0;
    double ei = 1.0;
    double e = 1.0;
    double f = 1.0;
};

/// H -> D H D with D = diag(1/sqrt(rho), sqrt(ei), 1, ...), E -> e E,
/// F -> f F. The result is re-validated.
std::pair<PHModel, Exosystem> perturb_model(const PHModel& model, const Exosystem& exo, const Scalings& s);

}  // namespace phreg
