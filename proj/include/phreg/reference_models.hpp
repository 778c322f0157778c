#pragma once

#include "phreg/phs_core.hpp"

namespace phreg {

struct Exosystem;

/// x_t = -x_z on [0, 1], u = x(0), y = x(1).
PHModel transport_model();

/// Euler-Bernoulli beam on [0, 1] with state (rho w_t, w_zz) and
/// H = diag(1/rho, EI). Input (e1'(0), e1(0), e2'(1), e2(1)),
/// output (-e2(0), e2'(0), -e1(1), e1'(1)) where e = Hx.
PHModel beam_model(double rho = 1.0, double EI = 1.0);

/// Jet selections realizing the beam's physical input and output maps.
JetSelection beam_input_selection();
JetSelection beam_output_selection();

/// Four-frequency exosystem used for the beam regulation scenario.
Exosystem beam_exosystem();

}  // namespace phreg
