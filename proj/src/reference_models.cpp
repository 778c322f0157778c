#include "phreg/reference_models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "phreg/regulator.hpp"

namespace phreg {

PHModel transport_model() {
    PHModel m;
    m.order = 1;
    m.dim = 1;
    m.a = 0.0;
    m.b = 1.0;
    m.P = {CMatrix::Constant(1, 1, -1.0)};
    m.P0 = MatrixField::constant(CMatrix::Zero(1, 1));
    m.H = MatrixField::constant(CMatrix::Identity(1, 1));
    m.h_lower = m.h_upper = 1.0;
    const double s = 1.0 / std::sqrt(2.0);
    m.W_B.resize(1, 2);
    m.W_B << s, s;
    m.W_C.resize(1, 2);
    m.W_C << -s, s;
    return m;
}

JetSelection beam_input_selection() {
    return {
        {JetTerm{End::a, 1, 0, 1.0}},
        {JetTerm{End::a, 0, 0, 1.0}},
        {JetTerm{End::b, 1, 1, 1.0}},
        {JetTerm{End::b, 0, 1, 1.0}},
    };
}

JetSelection beam_output_selection() {
    return {
        {JetTerm{End::a, 0, 1, -1.0}},
        {JetTerm{End::a, 1, 1, 1.0}},
        {JetTerm{End::b, 0, 0, -1.0}},
        {JetTerm{End::b, 1, 0, 1.0}},
    };
}

PHModel beam_model(double rho, double EI) {
    if (!(rho > 0.0) || !(EI > 0.0)) throw Error(ErrorKind::InvariantViolation, "beam needs rho > 0 and EI > 0");
    PHModel m;
    m.order = 2;
    m.dim = 2;
    m.a = 0.0;
    m.b = 1.0;
    CMatrix P2(2, 2);
    P2 << 0.0, -1.0, 1.0, 0.0;
    m.P = {CMatrix::Zero(2, 2), P2};
    m.P0 = MatrixField::constant(CMatrix::Zero(2, 2));
    CMatrix H = CMatrix::Zero(2, 2);
    H(0, 0) = 1.0 / rho;
    H(1, 1) = EI;
    m.H = MatrixField::constant(H);
    m.h_lower = std::min(1.0 / rho, EI);
    m.h_upper = std::max(1.0 / rho, EI);
    const PortMatrices pm = build_port_matrices(m);
    m.W_B = boundary_map_from_selection(beam_input_selection(), pm, 2, 2);
    m.W_C = boundary_map_from_selection(beam_output_selection(), pm, 2, 2);
    return m;
}

Exosystem beam_exosystem() {
    using std::numbers::pi;
    const Complex i{0.0, 1.0};
    Exosystem exo;
    exo.freqs = {-2.0 * pi, -pi, pi, 2.0 * pi};
    exo.E.resize(4, 4);
    exo.E << i / 2.0, 0.0, 0.0, -i / 2.0,
             0.0, 0.5, 0.5, 0.0,
             0.5, 0.0, 0.0, 0.5,
             0.0, i / 2.0, -i / 2.0, 0.0;
    exo.F.resize(4, 4);
    exo.F << 0.0, i / 2.0, -i / 2.0, 0.0,
             0.5, 0.0, 0.0, 0.5,
             0.0, -0.5, -0.5, 0.0,
             -i / 2.0, 0.0, 0.0, i / 2.0;
    exo.validate();
    return exo;
}

}  // namespace phreg
