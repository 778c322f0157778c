#include "phreg/closedloop_sim.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/LU>

#include "phreg/linalg.hpp"

namespace phreg {

namespace {

Eigen::PartialPivLU<CMatrix> factor_step(const CMatrix& A, double dt) {
    const CMatrix lhs = CMatrix::Identity(A.rows(), A.cols()) - 0.5 * dt * A;
    Eigen::PartialPivLU<CMatrix> lu(lhs);
    if (lhs.size() && !(lu.rcond() >= kSingularRcond))
        throw Error(ErrorKind::StepSolveFailure, "I - dt/2 A is singular for dt = " + std::to_string(dt) + "; try dt/2");
    return lu;
}

}  // namespace

Trajectory simulate(const ClosedLoop& cl, const Exosystem& exo, const CVector& v0, const CVector& xi0,
                    const SimulationOptions& opt) {
    if (!(opt.dt > 0.0) || !(opt.T >= opt.dt)) throw Error(ErrorKind::InputError, "need dt > 0 and T >= dt");
    if (xi0.size() != cl.states()) throw Error(ErrorKind::DimensionMismatch, "initial state has wrong length");
    if (v0.size() != exo.q()) throw Error(ErrorKind::DimensionMismatch, "v0 has wrong length");

    const auto steps = static_cast<std::size_t>(std::llround(opt.T / opt.dt));
    const double h = opt.dt;
    const auto lu = factor_step(cl.A_e, h);
    const CMatrix explicit_part = CMatrix::Identity(cl.states(), cl.states()) + 0.5 * h * cl.A_e;

    Trajectory tr;
    tr.dt = h;
    tr.t.reserve(steps + 1);
    tr.error.reserve(steps + 1);
    tr.err_norm.reserve(steps + 1);
    tr.energy.reserve(steps + 1);
    if (opt.keep_states) tr.state.reserve(steps + 1);

    CVector xi = xi0;
    CVector v = exo_solution(exo, v0, 0.0);
    for (std::size_t j = 0;; ++j) {
        const double t = h * static_cast<double>(j);
        const CVector e = cl.C_e * xi + cl.D_e * v;
        tr.t.push_back(t);
        tr.err_norm.push_back(e.norm());
        tr.error.push_back(e);
        tr.energy.push_back(cl.plant_energy(xi, v));
        if (opt.keep_states) tr.state.push_back(xi);
        if (j == steps) break;

        const CVector v_next = exo_solution(exo, v0, h * static_cast<double>(j + 1));
        xi = lu.solve(explicit_part * xi + 0.5 * h * (cl.B_e * (v + v_next)));
        if (!xi.allFinite()) throw Error(ErrorKind::StepSolveFailure, "non-finite state at step " + std::to_string(j + 1));
        v = v_next;
    }
    return tr;
}

ErrorMetrics error_metrics(const Trajectory& traj) {
    const std::size_t n = traj.err_norm.size();
    if (n == 0) throw Error(ErrorKind::InputError, "empty trajectory");
    const std::size_t w = std::max<std::size_t>(1, n / 10);
    const auto& e = traj.err_norm;

    ErrorMetrics m;
    m.head_sup = *std::max_element(e.begin(), e.begin() + static_cast<std::ptrdiff_t>(w));
    m.tail_sup = *std::max_element(e.end() - static_cast<std::ptrdiff_t>(w), e.end());

    // least-squares slope of log|e| over the middle 80%
    const double floor = 1e-300;
    double st = 0, sy = 0, stt = 0, sty = 0;
    std::size_t count = 0;
    const std::size_t lo = (n > 2 * w) ? w : 0;
    const std::size_t hi = (n > 2 * w) ? n - w : n;
    for (std::size_t i = lo; i < hi; ++i) {
        if (!(e[i] > floor)) continue;
        const double y = std::log(e[i]);
        st += traj.t[i];
        sy += y;
        stt += traj.t[i] * traj.t[i];
        sty += traj.t[i] * y;
        ++count;
    }
    const double cnt = static_cast<double>(count);
    const double denom = cnt * stt - st * st;
    if (count < 2 || !(denom > 0.0)) {
        m.degenerate = true;
        m.decay_rate = -std::numeric_limits<double>::infinity();
        return m;
    }
    m.decay_rate = (cnt * sty - st * sy) / denom;
    return m;
}

AuditReport energy_audit(const ReducedPlant& plant, const CVector& xi0, double T, double dt) {
    if (!(dt > 0.0) || !(T >= dt)) throw Error(ErrorKind::InputError, "need dt > 0 and T >= dt");
    const LTISystem& sys = plant.sys;
    if (xi0.size() != sys.states()) throw Error(ErrorKind::DimensionMismatch, "initial state has wrong length");

    const auto steps = static_cast<std::size_t>(std::llround(T / dt));
    const auto lu = factor_step(sys.A, dt);
    const CMatrix explicit_part = CMatrix::Identity(sys.states(), sys.states()) + 0.5 * dt * sys.A;

    AuditReport rep;
    rep.steps = steps;
    CVector xi = xi0;
    double E = plant.energy(plant.state_to_x * xi);
    rep.initial_energy = E;
    rep.tolerance = 1e-6 * E;
    rep.m_hat = std::numeric_limits<double>::infinity();

    std::vector<double> dE(steps), y2(steps);
    for (std::size_t j = 0; j < steps; ++j) {
        const CVector next = lu.solve(explicit_part * xi);
        const CVector y_mid = sys.C * (0.5 * (xi + next));
        const double E_next = plant.energy(plant.state_to_x * next);
        dE[j] = E_next - E;
        y2[j] = y_mid.squaredNorm();
        if (dE[j] > rep.tolerance) {
            std::ostringstream os;
            os << "energy grew by " << dE[j] << " at step " << j;
            throw AuditFailure(j, os.str());
        }
        // ratio only where the output carries measurable energy
        if (y2[j] * dt > rep.tolerance * 1e-6 && y2[j] > 0.0) rep.m_hat = std::min(rep.m_hat, -dE[j] / (dt * y2[j]));
        rep.output_integral += dt * y2[j];
        xi = next;
        E = E_next;
    }
    rep.final_energy = E;

    if (!std::isfinite(rep.m_hat)) {
        // nothing flowed through the output
        rep.m_hat = 0.0;
        rep.integrated_bound_ok = rep.output_integral <= rep.tolerance;
        return rep;
    }
    if (!(rep.m_hat > 0.0)) throw AuditFailure(0, "estimated dissipation rate is not positive");
    for (std::size_t j = 0; j < steps; ++j) {
        if (dE[j] > -rep.m_hat * dt * y2[j] + rep.tolerance) {
            std::ostringstream os;
            os << "dissipation bound broken at step " << j;
            throw AuditFailure(j, os.str());
        }
    }
    rep.integrated_bound_ok = rep.output_integral <= rep.initial_energy / rep.m_hat + rep.tolerance;
    return rep;
}

std::pair<PHModel, Exosystem> perturb_model(const PHModel& model, const Exosystem& exo, const Scalings& s) {
    if (!(s.rho > 0.0) || !(s.ei > 0.0) || !(s.e > 0.0) || !(s.f > 0.0))
        throw Error(ErrorKind::InvariantViolation, "scalings must be positive");
    PHModel out = model;
    const Eigen::Index n = model.dim;
    RVector d = RVector::Ones(n);
    d(0) = 1.0 / std::sqrt(s.rho);
    if (n > 1) d(1) = std::sqrt(s.ei);
    const CMatrix D = d.cast<Complex>().asDiagonal();

    const bool identity = s.rho == 1.0 && s.ei == 1.0;
    if (!identity) {
        std::vector<CMatrix> samples;
        for (const CMatrix& H : model.H.samples()) samples.push_back(D * H * D);
        out.H = model.H.is_constant() ? MatrixField::constant(samples.front()) : MatrixField::sampled(samples);
        const RVector d2 = d.cwiseAbs2();
        out.h_lower = model.h_lower * d2.minCoeff();
        out.h_upper = model.h_upper * d2.maxCoeff();
    }
    validate(out);

    Exosystem ex = exo;
    ex.E = s.e * exo.E;
    ex.F = s.f * exo.F;
    return {std::move(out), std::move(ex)};
}

}  // namespace phreg
