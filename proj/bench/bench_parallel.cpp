#include <chrono>
#include <cstdio>
#include <numbers>
#include <vector>


#include "phreg/parallel.hpp"
#include "phreg/reference_models.hpp"
#include "phreg/regulator.hpp"

using namespace phreg;

template <typename F>
double seconds(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

int main() {
    parallel::configure_from_env();
    std::printf("threads: %d\n", parallel::thread_limit());

    const PHModel beam = beam_model();
    const Exosystem exo = beam_exosystem();
    const DiscretePlant dp = assemble(beam, Grid::with_nodes(0.0, 1.0, 41), 1.0);
    const ReducedPlant rp = reduce_to_lti(dp, BoundaryInput::feedback(1.0));
    const Controller base = synthesize(exo, dp, 1.0, 1.0);

    std::vector<double> grid;
    for (int k = 1; k <= 48; ++k) grid.push_back(0.01 * k);
    SweepResult par, ser;
    const double ts = seconds([&] { ser = epsilon_sweep_serial(rp.sys, base, exo, grid); });
    const double tp = seconds([&] { par = epsilon_sweep(rp.sys, base, exo, grid); });
    std::printf("epsilon sweep (%zu points, 41 nodes): serial %.3f s, parallel %.3f s, speedup %.2fx, argmin equal %s\n",
                grid.size(), ts, tp, ts / tp, par.argmin == ser.argmin ? "yes" : "no");

    std::vector<Complex> lambdas;
    for (int k = 0; k < 256; ++k) lambdas.emplace_back(0.0, 0.25 * k + 0.1);
    std::vector<CMatrix> a, b;
    const double fs = seconds([&] { a = transfer_function_batch_serial(dp, BoundaryInput::feedback(1.0), lambdas); });
    const double fp = seconds([&] { b = transfer_function_batch(dp, BoundaryInput::feedback(1.0), lambdas); });
    double diff = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, (a[i] - b[i]).cwiseAbs().maxCoeff());
    std::printf("transfer batch (%zu points): serial %.3f s, parallel %.3f s, speedup %.2fx, max diff %.1e\n",
                lambdas.size(), fs, fp, fs / fp, diff);
    return 0;
}
