#include <doctest.h>

#include <cmath>
#include <random>

#include "phreg/closedloop_sim.hpp"
#include "phreg/reference_models.hpp"
#include "test_support.hpp"

using namespace phreg;

namespace {

const Complex I1{0.0, 1.0};

// xi' = lambda xi with no forcing; the error channel reads xi directly.
ClosedLoop scalar_loop(Complex lambda) {
    ClosedLoop cl;
    cl.A_e = CMatrix::Constant(1, 1, lambda);
    cl.B_e = CMatrix::Zero(1, 0);
    cl.C_e = CMatrix::Identity(1, 1);
    cl.D_e = CMatrix::Zero(1, 0);
    cl.plant_states = 1;
    cl.state_to_x = CMatrix::Identity(1, 1);
    cl.input_to_x = CMatrix::Zero(1, 0);
    cl.weight = CMatrix::Identity(1, 1);
    cl.K = CMatrix::Zero(0, 0);
    cl.E_kappa = CMatrix::Zero(0, 0);
    return cl;
}

double scalar_error(Complex lambda, double dt, double T) {
    const Exosystem none{{}, CMatrix::Zero(0, 0), CMatrix::Zero(0, 0)};
    const Trajectory tr = simulate(scalar_loop(lambda), none, CVector::Zero(0), CVector::Ones(1), {T, dt, false});
    double err = 0.0;
    for (std::size_t j = 0; j < tr.size(); ++j) err = std::max(err, std::abs(tr.error[j](0) - std::exp(lambda * tr.t[j])));
    return err;
}

struct Beam {
    ReducedPlant rp;
    Exosystem exo;
    ClosedLoop cl;
};

const Beam& beam() {
    static const Beam b = [] {
        Beam x;
        const DiscretePlant dp = assemble(beam_model(), Grid::with_spacing(0.0, 1.0, 0.05), 1.0);
        x.rp = reduce_to_lti(dp, BoundaryInput::feedback(1.0));
        x.exo = beam_exosystem();
        x.cl = assemble_closed_loop(x.rp, synthesize(x.exo, dp, 1.0, 0.17), x.exo);
        return x;
    }();
    return b;
}

}  // namespace

TEST_CASE("trapezoidal integrator is second order on scalar problems") {
    for (Complex lambda : {Complex(-1.0), I1}) {
        const double e1 = scalar_error(lambda, 0.02, 4.0);
        const double e2 = scalar_error(lambda, 0.01, 4.0);
        CHECK(e1 / e2 >= 3.5);
        CHECK(e1 / e2 <= 4.5);
        CHECK(e2 <= 4.0 * 0.01 * 0.01);
    }
}

TEST_CASE("unforced zero state gives e = D_e v") {
    const Beam& b = beam();
    ClosedLoop cl = b.cl;
    cl.B_e.setZero();
    const CVector v0 = CVector::Ones(4);
    const Trajectory tr = simulate(cl, b.exo, v0, CVector::Zero(cl.states()), {1.0, 1e-2, false});
    CHECK(tr.size() == 101);
    for (std::size_t j = 0; j < tr.size(); j += 10)
        CHECK((tr.error[j] - cl.D_e * exo_solution(b.exo, v0, tr.t[j])).norm() == 0.0);
}

TEST_CASE("beam closed loop converges at second order in dt") {
    const Beam& b = beam();
    const CVector v0 = CVector::Ones(4);
    const CVector z = CVector::Zero(b.cl.states());
    // the stiffest mode has |lambda| ~ 390; steps below ~3e-4 are asymptotic
    const Trajectory a = simulate(b.cl, b.exo, v0, z, {1.0, 2.5e-4, false});
    const Trajectory c = simulate(b.cl, b.exo, v0, z, {1.0, 1.25e-4, false});
    const Trajectory d = simulate(b.cl, b.exo, v0, z, {1.0, 6.25e-5, false});
    double d1 = 0.0, d2 = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        d1 = std::max(d1, (a.error[j] - c.error[2 * j]).norm());
        d2 = std::max(d2, (c.error[2 * j] - d.error[4 * j]).norm());
    }
    CHECK(d1 / d2 >= 3.5);
    CHECK(d1 / d2 <= 4.5);
}

TEST_CASE("step matrix singularity is reported") {
    const Exosystem none{{}, CMatrix::Zero(0, 0), CMatrix::Zero(0, 0)};
    try {
        simulate(scalar_loop(Complex(200.0)), none, CVector::Zero(0), CVector::Ones(1), {1.0, 0.01, false});
        FAIL("expected StepSolveFailure");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::StepSolveFailure);
    }
}

TEST_CASE("error metrics") {
    Trajectory tr;
    for (int j = 0; j <= 2000; ++j) {
        tr.t.push_back(0.01 * j);
        tr.err_norm.push_back(std::exp(-0.01 * j));
    }
    const ErrorMetrics m = error_metrics(tr);
    CHECK(m.decay_rate == doctest::Approx(-1.0).epsilon(0.05));
    CHECK(m.head_sup == doctest::Approx(1.0));
    CHECK(m.tail_sup == doctest::Approx(std::exp(-18.0)).epsilon(1e-3));

    for (auto& e : tr.err_norm) e = 0.0;
    const ErrorMetrics z = error_metrics(tr);
    CHECK(z.degenerate);
    CHECK(std::isinf(z.decay_rate));
    CHECK(z.decay_rate < 0.0);
    CHECK_THROWS_AS(error_metrics(Trajectory{}), Error);
}

TEST_CASE("beam regulation run: regression baseline") {
    const Beam& b = beam();
    const Trajectory tr = simulate(b.cl, b.exo, CVector::Ones(4), CVector::Zero(b.cl.states()), {20.0, 1e-3, false});
    CHECK(tr.size() == 20001);
    const ErrorMetrics m = error_metrics(tr);
    CHECK(m.decay_rate < 0.0);
    CHECK(m.decay_rate == doctest::Approx(-0.1797).epsilon(0.01));
    CHECK(m.head_sup == doctest::Approx(1.746).epsilon(0.01));
    CHECK(m.tail_sup == doctest::Approx(0.0995).epsilon(0.01));
}

TEST_CASE("energy audit") {
    const Beam& b = beam();
    const AuditReport zero = energy_audit(b.rp, CVector::Zero(b.rp.sys.states()), 1.0, 1e-3);
    CHECK(zero.initial_energy == 0.0);
    CHECK(zero.final_energy == 0.0);
    CHECK(zero.output_integral == 0.0);

    std::mt19937 rng(8);
    const CVector xi0 = phreg::testing::random_matrix(rng, b.rp.sys.states(), 1);
    const AuditReport r = energy_audit(b.rp, xi0, 5.0, 1e-3);
    CHECK(r.integrated_bound_ok);
    CHECK(r.final_energy < r.initial_energy);
    // energy preserving model closed by u = -y: dE = -2 kappa dt |y|^2
    CHECK(r.m_hat == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("energy audit catches an energy-producing discretization") {
    const Beam& b = beam();
    ReducedPlant bad = b.rp;
    bad.sys.A += 0.5 * CMatrix::Identity(bad.sys.states(), bad.sys.states());
    std::mt19937 rng(1);
    const CVector xi0 = phreg::testing::random_matrix(rng, bad.sys.states(), 1);
    CHECK_THROWS_AS(energy_audit(bad, xi0, 1.0, 1e-3), AuditFailure);
}

TEST_CASE("perturb_model") {
    const PHModel beam_m = beam_model();
    const Exosystem exo = beam_exosystem();
    const auto [same, same_exo] = perturb_model(beam_m, exo, Scalings{});
    CHECK((same.H.at(0).array() == beam_m.H.at(0).array()).all());
    CHECK((same_exo.E.array() == exo.E.array()).all());
    CHECK((same_exo.F.array() == exo.F.array()).all());
    CHECK(same.h_lower == beam_m.h_lower);

    const auto [heavy, heavy_exo] = perturb_model(beam_m, exo, Scalings{1.1, 1.0, 1.2, 0.8});
    CHECK(std::abs(heavy.H.at(0)(0, 0) - 1.0 / 1.1) < 1e-15);
    CHECK(std::abs(heavy.H.at(0)(1, 1) - 1.0) < 1e-15);
    CHECK(classify_passivity(heavy).classification == Passivity::EnergyPreserving);
    CHECK((heavy_exo.E - 1.2 * exo.E).norm() < 1e-15);
    CHECK((heavy_exo.F - 0.8 * exo.F).norm() < 1e-15);
    CHECK((heavy.H.at(0) - beam_model(1.1, 1.0).H.at(0)).norm() < 1e-15);

    try {
        perturb_model(beam_m, exo, Scalings{-1.0, 1.0, 1.0, 1.0});
        FAIL("expected InvariantViolation");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvariantViolation);
    }
}
