#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "phreg/linalg.hpp"
#include "phreg/reference_models.hpp"
#include "phreg/spatial_disc.hpp"
#include "test_support.hpp"

using namespace phreg;
using phreg::testing::random_matrix;
using std::numbers::pi;

namespace {

const Complex I1{0.0, 1.0};

double transport_error(std::size_t nodes, double omega) {
    const DiscretePlant dp = assemble(transport_model(), Grid::with_nodes(0.0, 1.0, nodes));
    const CMatrix P = transfer_function(dp, BoundaryInput::open_loop(), I1 * omega);
    return std::abs(P(0, 0) - std::exp(-I1 * omega));
}

}  // namespace

TEST_CASE("grid construction") {
    const Grid g = Grid::with_spacing(0.0, 1.0, 0.05);
    CHECK(g.nodes == 21);
    CHECK(g.h == doctest::Approx(0.05));
    CHECK(g.node(20) == doctest::Approx(1.0));
    CHECK_THROWS_AS(Grid::with_spacing(0.0, 1.0, -0.1), Error);
}

TEST_CASE("SBP first difference satisfies the summation-by-parts identity") {
    const std::size_t M = 9;
    const double h = 0.125;
    const Eigen::MatrixXd D = sbp_first_derivative(M, h);
    const Eigen::MatrixXd Hq = trapezoid_weights(M, h).asDiagonal();
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(M, M);
    B(0, 0) = -1.0;
    B(M - 1, M - 1) = 1.0;
    CHECK((Hq * D + D.transpose() * Hq - B).norm() < 1e-13);
    CHECK((D * Eigen::VectorXd::Ones(M)).norm() < 1e-13);
}

TEST_CASE("transport assembly on 11 nodes") {
    const DiscretePlant dp = assemble(transport_model(), Grid::with_nodes(0.0, 1.0, 11));
    CHECK(dp.A_rows.rows() == 10);
    CHECK(dp.A_rows.cols() == 11);
    // nodal operator against a hand-built -d/dz stencil
    const double h = 0.1;
    Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(11, 11);
    ref(0, 0) = 1.0 / h;
    ref(0, 1) = -1.0 / h;
    for (int j = 1; j < 10; ++j) {
        ref(j, j - 1) = 0.5 / h;
        ref(j, j + 1) = -0.5 / h;
    }
    ref(10, 9) = 1.0 / h;
    ref(10, 10) = -1.0 / h;
    CHECK((dp.A_full - ref.cast<Complex>()).norm() < 1e-12);
    CHECK((dp.A_rows * CVector::Ones(11)).norm() < 1e-12);
    // u = x(0), y = x(1)
    CHECK(std::abs(dp.B_map(0, 0) - 1.0) < 1e-14);
    CHECK(dp.B_map.rightCols(10).norm() < 1e-14);
    CHECK(std::abs(dp.C_map(0, 10) - 1.0) < 1e-14);
    CHECK(dp.C_map.leftCols(10).norm() < 1e-14);
}

TEST_CASE("constant states are annihilated") {
    const DiscretePlant dp = assemble(beam_model(), Grid::with_spacing(0.0, 1.0, 0.05), 1.0);
    CVector x(dp.unknowns());
    for (Eigen::Index j = 0; j < x.size(); j += 2) {
        x(j) = Complex(0.7, -0.2);
        x(j + 1) = Complex(-1.3, 0.4);
    }
    CHECK((dp.A_rows * x).norm() < 1e-10);
}

TEST_CASE("beam dimensions at h = 0.05") {
    const DiscretePlant dp = assemble(beam_model(), Grid::with_spacing(0.0, 1.0, 0.05), 1.0);
    CHECK(dp.unknowns() == 42);
    CHECK(dp.B_map.rows() == 4);
    CHECK(dp.B_map.cols() == 42);
    CHECK(dp.A_rows.rows() == 38);
    const CMatrix Wd = dp.weight;
    CHECK((Wd - Wd.adjoint()).norm() == 0.0);
    CHECK(linalg::min_hermitian_eigenvalue(Wd) > 0.0);
    CMatrix stacked(42, 42);
    stacked << dp.A_rows, dp.B_map;
    CHECK(linalg::numerical_rank(stacked) == 42);
}

TEST_CASE("grid and sample checks") {
    try {
        assemble(beam_model(), Grid::with_nodes(0.0, 1.0, 9));
        FAIL("expected GridTooCoarse");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::GridTooCoarse);
    }
    PHModel m = transport_model();
    m.H = MatrixField::sampled(std::vector<CMatrix>(5, CMatrix::Identity(1, 1)));
    try {
        assemble(m, Grid::with_nodes(0.0, 1.0, 11));
        FAIL("expected DimensionMismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DimensionMismatch);
    }
    // sampled constant H gives the constant-H realization
    m.H = MatrixField::sampled(std::vector<CMatrix>(11, CMatrix::Identity(1, 1)));
    const DiscretePlant a = assemble(m, Grid::with_nodes(0.0, 1.0, 11));
    const DiscretePlant b = assemble(transport_model(), Grid::with_nodes(0.0, 1.0, 11));
    CHECK((a.A_rows - b.A_rows).norm() == 0.0);
}

TEST_CASE("reduced plants are stable with a certified boundary") {
    const DiscretePlant tr = assemble(transport_model(), Grid::with_nodes(0.0, 1.0, 51));
    const ReducedPlant rt = reduce_to_lti(tr, BoundaryInput::open_loop());
    CHECK(linalg::spectral_abscissa(rt.sys.A) < 0.0);
    // zero input and zero state stay at rest
    CHECK((rt.sys.A * CVector::Zero(rt.sys.states())).norm() == 0.0);

    for (double h : {0.1, 0.05}) {
        const DiscretePlant dp = assemble(beam_model(), Grid::with_spacing(0.0, 1.0, h), 1.0);
        const ReducedPlant rp = reduce_to_lti(dp, BoundaryInput::feedback(1.0));
        rp.sys.check_dimensions();
        CHECK(linalg::spectral_abscissa(rp.sys.A) < 0.0);
    }
}

TEST_CASE("transport transfer function against exp(-lambda)") {
    CHECK(transport_error(101, pi) <= 0.15);
    CHECK(transport_error(101, 2 * pi) <= 0.15);
    const DiscretePlant dp = assemble(transport_model(), Grid::with_nodes(0.0, 1.0, 101));
    CHECK(std::abs(transfer_function(dp, BoundaryInput::open_loop(), 0.0)(0, 0) - 1.0) < 1e-10);
    for (double w : {pi, 2 * pi}) {
        const double coarse = transport_error(101, w);
        const double fine = transport_error(201, w);
        CHECK(coarse / fine >= 1.8);
    }
}

TEST_CASE("kappa feedback identity P_k = P (I + k P)^-1") {
    for (double kappa : {0.5, 1.0, 2.0}) {
        const DiscretePlant dp = assemble(beam_model(), Grid::with_spacing(0.0, 1.0, 0.05), kappa);
        for (double w : {-2 * pi, 1.0, pi}) {
            const CMatrix P = transfer_function(dp, BoundaryInput::open_loop(), I1 * w);
            const CMatrix Pk = transfer_function(dp, BoundaryInput::feedback(kappa), I1 * w);
            const CMatrix ref = P * (CMatrix::Identity(4, 4) + kappa * P).inverse();
            CHECK((Pk - ref).cwiseAbs().maxCoeff() < 1e-8);
        }
    }
}

TEST_CASE("LTI realization matches the stacked transfer function") {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> re(0.05, 3.0), im(-10.0, 10.0);
    const DiscretePlant dp = assemble(beam_model(), Grid::with_spacing(0.0, 1.0, 0.05), 1.0);
    for (BoundaryInput in : {BoundaryInput::open_loop(), BoundaryInput::feedback(1.0)}) {
        const ReducedPlant rp = reduce_to_lti(dp, in);
        for (int k = 0; k < 8; ++k) {
            const Complex lambda(re(rng), im(rng));
            const CMatrix a = rp.sys.transfer(lambda);
            const CMatrix b = transfer_function(dp, in, lambda);
            CHECK((a - b).cwiseAbs().maxCoeff() < 1e-8 * std::max(1.0, b.cwiseAbs().maxCoeff()));
        }
    }
}

TEST_CASE("discrete dissipativity for energy preserving models") {
    std::mt19937 rng(4);
    auto check = [&](const PHModel& model, std::size_t nodes) {
        const DiscretePlant dp = assemble(model, Grid::with_nodes(model.a, model.b, nodes), 0.0);
        const ReducedPlant rp = reduce_to_lti(dp, BoundaryInput::open_loop());
        for (int k = 0; k < 10; ++k) {
            const CVector xi = random_matrix(rng, rp.sys.states(), 1);
            const CVector x = rp.state_to_x * xi;
            const CVector dx = rp.state_to_x * (rp.sys.A * xi);
            const double rate = (x.adjoint() * rp.weight * dx).real()(0, 0);
            CHECK(rate <= 1e-9 * rp.energy(x));
        }
    };
    check(beam_model(), 21);
    check(beam_model(0.8, 1.3), 15);
    for (int t = 0; t < 4; ++t) check(phreg::testing::random_first_order_model(rng, 1 + t % 2, 9, false), 9);
}

TEST_CASE("batched transfer functions equal the serial reference") {
    const DiscretePlant dp = assemble(beam_model(), Grid::with_spacing(0.0, 1.0, 0.05), 1.0);
    std::vector<Complex> lambdas;
    for (int k = 0; k < 20; ++k) lambdas.emplace_back(0.1, 0.7 * k - 7.0);
    const auto par = transfer_function_batch(dp, BoundaryInput::feedback(1.0), lambdas);
    const auto ser = transfer_function_batch_serial(dp, BoundaryInput::feedback(1.0), lambdas);
    REQUIRE(par.size() == ser.size());
    for (std::size_t i = 0; i < par.size(); ++i) CHECK((par[i] - ser[i]).norm() == 0.0);
}
