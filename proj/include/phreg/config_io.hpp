#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "phreg/closedloop_sim.hpp"
#include "phreg/regulator.hpp"
#include "phreg/spatial_disc.hpp"

namespace phreg {

struct ControllerOptions {
    double kappa = 1.0;
    double epsilon = 0.17;
    bool user_gain = false;
    std::vector<CMatrix> K0;     // only with user_gain
    std::vector<double> sweep;   // epsilon grid for the sweep command
};

struct ScenarioConfig {
    PHModel model;
    Grid grid;
    std::optional<Exosystem> exo;
    ControllerOptions controller;
    SimulationOptions simulation;
    CVector v0;   // empty -> all ones
    CVector xi0;  // empty -> zero
    std::vector<Scalings> perturbations;
};

/// All parse failures (bad JSON, unknown keys, wrong shapes) throw InputError.
ScenarioConfig parse_config(const nlohmann::json& doc);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Built-in beam scenario: kappa = 1, epsilon = 0.17, h = 0.05, T = 20.
ScenarioConfig beam_scenario();

nlohmann::json complex_to_json(Complex z);
Complex complex_from_json(const nlohmann::json& j);
nlohmann::json matrix_to_json(const CMatrix& M);
CMatrix matrix_from_json(const nlohmann::json& j);
nlohmann::json vector_to_json(const CVector& v);
CVector vector_from_json(const nlohmann::json& j);

nlohmann::json controller_to_json(const Controller& c);
Controller controller_from_json(const nlohmann::json& j);

}  // namespace phreg
