#include "phreg/regulator.hpp"

#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "phreg/linalg.hpp"
#include "phreg/parallel.hpp"

namespace phreg {

namespace {

const Complex kI{0.0, 1.0};

CMatrix concat_blocks(const std::vector<CMatrix>& blocks) {
    if (blocks.empty()) return CMatrix();
    CMatrix out(blocks.front().rows(), blocks.front().cols() * static_cast<Eigen::Index>(blocks.size()));
    for (std::size_t k = 0; k < blocks.size(); ++k)
        out.middleCols(static_cast<Eigen::Index>(k) * blocks[k].cols(), blocks[k].cols()) = blocks[k];
    return out;
}

}  // namespace

CMatrix Exosystem::S() const {
    CMatrix s = CMatrix::Zero(q(), q());
    for (Eigen::Index k = 0; k < q(); ++k) s(k, k) = kI * freqs[static_cast<std::size_t>(k)];
    return s;
}

void Exosystem::validate() const {
    std::set<double> seen;
    for (double w : freqs) {
        if (!std::isfinite(w)) throw Error(ErrorKind::InputError, "exosystem frequency is not finite");
        if (!seen.insert(w).second) throw Error(ErrorKind::InputError, "exosystem frequencies must be distinct");
    }
    if (E.cols() != q() || F.cols() != q() || E.rows() != F.rows())
        throw Error(ErrorKind::DimensionMismatch, "E and F must both be nN x q");
}

CVector exo_solution(const Exosystem& exo, const CVector& v0, double t) {
    if (v0.size() != exo.q()) throw Error(ErrorKind::DimensionMismatch, "v0 length differs from the number of frequencies");
    CVector v(v0.size());
    for (Eigen::Index k = 0; k < v.size(); ++k) v(k) = std::exp(kI * (exo.freqs[static_cast<std::size_t>(k)] * t)) * v0(k);
    return v;
}

Controller synthesize(std::span<const double> freqs, std::span<const CMatrix> P_kappa, double kappa, double epsilon,
                      const std::vector<CMatrix>* user_K0) {
    if (freqs.size() != P_kappa.size()) throw Error(ErrorKind::DimensionMismatch, "one P_kappa value per frequency");
    if (freqs.empty()) throw Error(ErrorKind::InputError, "controller needs at least one frequency");
    if (!(kappa > 0.0) || !(epsilon > 0.0)) throw Error(ErrorKind::InputError, "kappa and epsilon must be positive");
    if (user_K0 && user_K0->size() != freqs.size())
        throw Error(ErrorKind::DimensionMismatch, "one user gain block per frequency");

    const Eigen::Index p = P_kappa.front().rows();
    const Eigen::Index m = P_kappa.front().cols();
    const auto q = static_cast<Eigen::Index>(freqs.size());

    Controller c;
    c.kappa = kappa;
    c.epsilon = epsilon;
    c.freqs.assign(freqs.begin(), freqs.end());
    c.G1 = CMatrix::Zero(q * p, q * p);
    c.G2.resize(q * p, p);
    std::vector<CMatrix> K0(freqs.size());

    for (std::size_t k = 0; k < freqs.size(); ++k) {
        const CMatrix& Pk = P_kappa[k];
        if (Pk.rows() != p || Pk.cols() != m) throw Error(ErrorKind::DimensionMismatch, "P_kappa values differ in shape");
        if (linalg::numerical_rank(Pk) < p) {
            std::ostringstream os;
            os << "P_kappa(i*" << freqs[k] << ") has rank " << linalg::numerical_rank(Pk) << " < " << p;
            throw Error(ErrorKind::NotSurjective, os.str());
        }
        K0[k] = user_K0 ? (*user_K0)[k] : linalg::pseudoinverse(Pk);
        if (K0[k].rows() != m || K0[k].cols() != p) throw Error(ErrorKind::DimensionMismatch, "user gain block has wrong shape");
        const CMatrix PK = Pk * K0[k];
        if (linalg::numerical_rank(PK) < p) throw Error(ErrorKind::InputError, "P_kappa K0 is singular for a user gain");
        const auto o = static_cast<Eigen::Index>(k) * p;
        c.G1.block(o, o, p, p) = kI * freqs[k] * CMatrix::Identity(p, p);
        c.G2.middleRows(o, p) = -PK.adjoint();
    }
    c.K0 = concat_blocks(K0);
    c.K = epsilon * c.K0;
    return c;
}

Controller synthesize(const Exosystem& exo, const DiscretePlant& plant, double kappa, double epsilon,
                      const std::vector<CMatrix>* user_K0) {
    exo.validate();
    std::vector<Complex> lambdas;
    for (double w : exo.freqs) lambdas.push_back(kI * w);
    const auto P = transfer_function_batch(plant, BoundaryInput::feedback(kappa), lambdas);
    return synthesize(exo.freqs, P, kappa, epsilon, user_K0);
}

Controller synthesize(const Exosystem& exo, const LTISystem& plant_kappa, double kappa, double epsilon,
                      const std::vector<CMatrix>* user_K0) {
    exo.validate();
    std::vector<CMatrix> P;
    for (double w : exo.freqs) P.push_back(plant_kappa.transfer(kI * w));
    return synthesize(exo.freqs, P, kappa, epsilon, user_K0);
}

Controller with_epsilon(const Controller& ctrl, double epsilon) {
    Controller c = ctrl;
    c.epsilon = epsilon;
    c.K = epsilon * c.K0;
    return c;
}

GConditionReport check_g_conditions(const Controller& ctrl, std::span<const double> freqs) {
    GConditionReport rep;
    const Eigen::Index dim = ctrl.G1.rows();
    const Eigen::Index rank_g2 = linalg::numerical_rank(ctrl.G2);
    rep.kernel_ok = ctrl.G2.cols() > 0 && rank_g2 == ctrl.G2.cols();
    bool ranges_ok = true;
    for (double w : freqs) {
        FrequencyRanks fr;
        fr.omega = w;
        const CMatrix shift = kI * w * CMatrix::Identity(dim, dim) - ctrl.G1;
        CMatrix joint(dim, dim + ctrl.G2.cols());
        joint << shift, ctrl.G2;
        fr.rank_shift = linalg::numerical_rank(shift);
        fr.rank_g2 = rank_g2;
        fr.rank_joint = linalg::numerical_rank(joint);
        fr.range_ok = fr.rank_joint == fr.rank_shift + fr.rank_g2;
        ranges_ok = ranges_ok && fr.range_ok;
        rep.per_frequency.push_back(fr);
    }
    rep.ok = rep.kernel_ok && ranges_ok;
    return rep;
}

CVector ClosedLoop::nodal_state(const CVector& xi_e, const CVector& v) const {
    const CVector u = K * xi_e.tail(states() - plant_states) + E_kappa * v;
    return state_to_x * xi_e.head(plant_states) + input_to_x * u;
}

double ClosedLoop::plant_energy(const CVector& xi_e, const CVector& v) const {
    const CVector x = nodal_state(xi_e, v);
    return (x.adjoint() * weight * x).real()(0, 0);
}

ClosedLoop assemble_closed_loop(const LTISystem& plant, const Controller& ctrl, const Exosystem& exo) {
    plant.check_dimensions();
    const Eigen::Index nx = plant.states();
    const Eigen::Index p = plant.outputs();
    const Eigen::Index nz = ctrl.states();
    if (plant.inputs() != ctrl.K.rows() || ctrl.G2.cols() != p || ctrl.G2.rows() != nz || ctrl.K.cols() != nz ||
        exo.E.rows() != plant.inputs() || exo.F.rows() != p || exo.E.cols() != exo.q() || exo.F.cols() != exo.q())
        throw Error(ErrorKind::DimensionMismatch, "plant, controller and exosystem dimensions do not conform");

    const CMatrix Ek = exo.E - ctrl.kappa * exo.F;
    ClosedLoop cl;
    cl.A_e.resize(nx + nz, nx + nz);
    cl.A_e << plant.A, plant.B * ctrl.K, ctrl.G2 * plant.C, ctrl.G1 + ctrl.G2 * plant.D * ctrl.K;
    cl.B_e.resize(nx + nz, exo.q());
    cl.B_e << plant.B * Ek, ctrl.G2 * (plant.D * Ek + exo.F);
    cl.C_e.resize(p, nx + nz);
    cl.C_e << plant.C, plant.D * ctrl.K;
    cl.D_e = plant.D * Ek + exo.F;

    cl.plant_states = nx;
    cl.state_to_x = CMatrix::Identity(nx, nx);
    cl.input_to_x = CMatrix::Zero(nx, plant.inputs());
    cl.weight = CMatrix::Identity(nx, nx);
    cl.K = ctrl.K;
    cl.E_kappa = Ek;
    return cl;
}

ClosedLoop assemble_closed_loop(const ReducedPlant& plant, const Controller& ctrl, const Exosystem& exo) {
    ClosedLoop cl = assemble_closed_loop(plant.sys, ctrl, exo);
    cl.state_to_x = plant.state_to_x;
    cl.input_to_x = plant.input_to_x;
    cl.weight = plant.weight;
    return cl;
}

double spectral_abscissa(const CMatrix& A) { return linalg::spectral_abscissa(A); }

RegulatorSolution solve_regulator_equations(const ClosedLoop& cl, const Exosystem& exo) {
    if (cl.B_e.cols() != exo.q() || cl.D_e.cols() != exo.q())
        throw Error(ErrorKind::DimensionMismatch, "closed loop does not match the exosystem");
    RegulatorSolution sol;
    sol.abscissa = linalg::spectral_abscissa(cl.A_e);
    if (!(sol.abscissa < 0.0)) {
        std::ostringstream os;
        os << "closed-loop spectral abscissa " << sol.abscissa << " >= 0";
        throw Error(ErrorKind::Unstable, os.str());
    }
    const Eigen::Index n = cl.states();
    sol.Sigma.resize(n, exo.q());
    for (Eigen::Index k = 0; k < exo.q(); ++k) {
        const CMatrix shifted = kI * exo.freqs[static_cast<std::size_t>(k)] * CMatrix::Identity(n, n) - cl.A_e;
        sol.Sigma.col(k) = linalg::checked_solve(shifted, cl.B_e.col(k), ErrorKind::ResolventSingular, "regulator column");
    }
    const CMatrix res = cl.C_e * sol.Sigma + cl.D_e;
    sol.residual = res.size() ? linalg::singular_values(res)(0) : 0.0;
    sol.d_norm = cl.D_e.size() ? linalg::singular_values(cl.D_e)(0) : 0.0;
    return sol;
}

namespace {

void check_grid(std::span<const double> grid) {
    if (grid.empty()) throw Error(ErrorKind::EmptyGrid, "epsilon grid is empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!(grid[i] > 0.0)) throw Error(ErrorKind::InputError, "epsilon grid must be positive");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw Error(ErrorKind::InputError, "epsilon grid must be strictly ascending");
    }
}

double sweep_point(const LTISystem& plant, const Controller& base, const Exosystem& exo, double eps) {
    return linalg::spectral_abscissa(assemble_closed_loop(plant, with_epsilon(base, eps), exo).A_e);
}

SweepResult summarize(std::span<const double> grid, const std::vector<double>& absc) {
    SweepResult r;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        r.rows.push_back({grid[i], absc[i]});
        if (absc[i] < absc[r.argmin]) r.argmin = i;
    }
    while (r.stable_prefix < absc.size() && absc[r.stable_prefix] < 0.0) ++r.stable_prefix;
    r.epsilon_star = r.stable_prefix ? grid[r.stable_prefix - 1] : 0.0;
    return r;
}

}  // namespace

SweepResult epsilon_sweep(const LTISystem& plant_kappa, const Controller& base, const Exosystem& exo,
                          std::span<const double> grid) {
    check_grid(grid);
    std::vector<double> absc(grid.size());
    parallel::for_each_index(grid.size(), [&](std::size_t i) { absc[i] = sweep_point(plant_kappa, base, exo, grid[i]); });
    return summarize(grid, absc);
}

SweepResult epsilon_sweep_serial(const LTISystem& plant_kappa, const Controller& base, const Exosystem& exo,
                                 std::span<const double> grid) {
    check_grid(grid);
    std::vector<double> absc;
    for (double e : grid) absc.push_back(sweep_point(plant_kappa, base, exo, e));
    return summarize(grid, absc);
}

}  // namespace phreg
