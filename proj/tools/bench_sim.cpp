// Benchmark: serial reference vs OpenMP Monte Carlo kernel on the smart-meter
// model. Verifies bitwise agreement while timing.
//
//   bench_sim [n_paths] [horizon]

#include <chrono>
#include <cstdlib>
#include <iostream>

#include "plq/scenarios.hpp"
#include "plq/sim.hpp"
#include "plq/threads.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

bool identical(const plq::SimStats& a, const plq::SimStats& b) {
    if (a.n_paths != b.n_paths || a.n_steps != b.n_steps) return false;
    for (int p = 0; p < a.n_paths; ++p) {
        if (a.terminal_x[p] != b.terminal_x[p]) return false;
        if (a.terminal_xhat[p] != b.terminal_xhat[p]) return false;
        if (a.receiver_avg[p] != b.receiver_avg[p]) return false;
    }
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    const int n_paths = argc > 1 ? std::atoi(argv[1]) : 512;
    const double horizon = argc > 2 ? std::atof(argv[2]) : 50.0;

    plq::SmartMeterParams params;
    const plq::LQPersuasionModel model = params.model(5.5);
    const plq::ReceiverSolution sol = plq::solve_receiver(model);

    plq::SimConfig cfg;
    cfg.dt = 1e-3;
    cfg.horizon = horizon;
    cfg.n_paths = n_paths;
    cfg.seed = 42;

    std::vector<double> grid;
    const int steps = static_cast<int>(horizon / cfg.dt);
    for (int k = 0; k <= steps; ++k) grid.push_back(k * cfg.dt);
    const plq::RiccatiPath riccati =
        plq::integrate_riccati_ode(model.a_x, model.obs_b, plq::Matrix::Zero(1, 1), grid);

    std::cout << "paths=" << n_paths << " horizon=" << horizon << " dt=" << cfg.dt << "\n";

    auto t0 = Clock::now();
    const plq::SimStats serial = plq::simulate_reference(model, sol, riccati, cfg);
    const double t_serial = seconds_since(t0);
    std::cout << "serial reference:  " << t_serial << " s\n";

    const int max_workers = plq::resolve_threads();
    for (int workers = 1; workers <= max_workers; workers *= 2) {
        t0 = Clock::now();
        const plq::SimStats parallel = plq::simulate(model, sol, riccati, cfg, nullptr, workers);
        const double t_par = seconds_since(t0);
        std::cout << "openmp x" << workers << ":         " << t_par << " s  (speedup "
                  << t_serial / t_par << ", bitwise "
                  << (identical(serial, parallel) ? "identical" : "DIFFERENT!") << ")\n";
        if (!identical(serial, parallel)) return 1;
    }
    return 0;
}
