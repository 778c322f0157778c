#pragma once

#include <filesystem>

#include <json.hpp>

#include "phreg/closedloop_sim.hpp"
#include "phreg/regulator.hpp"

namespace phreg {

/// Columns: t, re(e_1), im(e_1), ..., re(e_p), im(e_p), err_norm, energy.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);

void write_sweep_csv(const std::filesystem::path& path, const SweepResult& sweep);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);

/// Static semilog line plot of ||e(t)||.
void write_error_svg(const std::filesystem::path& path, const Trajectory& traj, const std::string& title);

nlohmann::json metrics_to_json(const ErrorMetrics& m);

}  // namespace phreg
