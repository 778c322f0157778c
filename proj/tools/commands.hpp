#pragma once

#include <filesystem>
#include <optional>

namespace phreg::cli {

struct Options {
    std::optional<std::filesystem::path> config;
    std::filesystem::path out = ".";
    double rho_scale = 1.0;
    double ei_scale = 1.0;
    double shift_frequency = 0.0;
};

// Each returns the process exit code: 0 ok, 1 domain failure, 2 input error.
int cmd_validate(const Options& opt);
int cmd_synth(const Options& opt);
int cmd_simulate(const Options& opt);
int cmd_sweep(const Options& opt);
int cmd_reproduce_beam(const Options& opt);

}  // namespace phreg::cli
