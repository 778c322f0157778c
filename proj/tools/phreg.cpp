#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "phreg/parallel.hpp"

int main(int argc, char** argv) {
    phreg::parallel::configure_from_env();

    CLI::App app{"phreg: port-Hamiltonian boundary control and robust output regulation"};
    app.require_subcommand(1);
    phreg::cli::Options opt;
    std::string config;

    auto add = [&](const char* name, const char* help, bool config_required) {
        CLI::App* sub = app.add_subcommand(name, help);
        auto* c = sub->add_option("--config", config, "scenario JSON file");
        if (config_required) c->required();
        sub->add_option("--out", opt.out, "output directory")->required();
        return sub;
    };
    CLI::App* validate = add("validate", "check model invariants, passivity and stability certificates", true);
    CLI::App* synth = add("synth", "synthesize the internal model controller", true);
    CLI::App* simulate = add("simulate", "simulate the closed loop and write the error trajectory", true);
    CLI::App* sweep = add("sweep", "closed-loop spectral abscissa over an epsilon grid", true);
    CLI::App* beam = add("reproduce-beam", "built-in beam regulation scenario with pass/fail checks", false);
    beam->add_option("--rho-scale", opt.rho_scale, "scale of rho for the plant (controller stays nominal)");
    beam->add_option("--ei-scale", opt.ei_scale, "scale of EI for the plant (controller stays nominal)");
    beam->add_option("--shift-frequency", opt.shift_frequency, "detune the controller's first frequency");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    if (!config.empty()) opt.config = config;

    if (validate->parsed()) return phreg::cli::cmd_validate(opt);
    if (synth->parsed()) return phreg::cli::cmd_synth(opt);
    if (simulate->parsed()) return phreg::cli::cmd_simulate(opt);
    if (sweep->parsed()) return phreg::cli::cmd_sweep(opt);
    if (beam->parsed()) return phreg::cli::cmd_reproduce_beam(opt);
    return 2;
}
