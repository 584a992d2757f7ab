#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "plq/algebra.hpp"
#include "plq/model.hpp"
#include "plq/receiver.hpp"
#include "plq/sender.hpp"
#include "plq/types.hpp"

namespace plq {

struct SimConfig {
    double dt = 1e-3;
    double horizon = 100.0;
    int n_paths = 1;
    std::uint64_t seed = 0;
    double burn_in = 0.2;     ///< fraction of the horizon dropped from ergodic averages
    bool zero_noise = false;  ///< diagnostic mode: dW = dB = 0
};

/**
 * Cross-path Monte Carlo summary. Per-path values are kept so that standard
 * errors are computed across paths (never within a path) and so that the
 * reduction is order-insensitive: per-path slots are filled independently and
 * pairwise-summed in path order afterwards, making the result bitwise
 * identical for any worker count.
 */
struct SimStats {
    int n_paths = 0;
    int n_steps = 0;
    double dt = 0.0;

    std::vector<Vector> terminal_x;     ///< X(T) per path
    std::vector<Vector> terminal_xhat;  ///< Xhat(T) per path
    std::vector<double> receiver_avg;   ///< post-burn-in time average of f(X, v*) per path
    std::vector<double> sender_avg;     ///< post-burn-in time average of g(X, Xhat) per path
    std::vector<std::uint64_t> path_seeds;

    Vector terminal_mean_x() const;
    Vector terminal_mean_xhat() const;
    /// Sample covariance of the stacked terminal state (X, Xhat) across paths.
    Matrix terminal_cov_joint() const;
};

/**
 * Euler–Maruyama on the coupled optimal system with step dt:
 *   X     += (a_x X + b_x v + c_x) dt + dW
 *   Xhat  += (a_x Xhat + b_x v + c_x) dt + P(t) b' (b (X - Xhat) dt + dB)
 *   v      = feedback_k Xhat + feedback_c
 * with dW and dB independent, P(t) read from the Riccati path by
 * piecewise-constant lookup at step times. g is the Sender integrand over the
 * joint state; pass nullptr to skip it.
 *
 * Reproducible: identical (cfg, inputs) give bitwise-identical outputs, for
 * any worker count. n_threads = 0 resolves PERSUASION_LQ_THREADS.
 *
 * Throws UnstablePath when |X| exceeds 1e8 (diagnostic for wrong feedback signs).
 */
SimStats simulate(const LQPersuasionModel& model, const ReceiverSolution& sol,
                  const RiccatiPath& riccati, const SimConfig& cfg,
                  const QuadraticForm* g = nullptr, int n_threads = 0);

/// Serial reference implementation, kept for testing and benchmarking the
/// OpenMP kernel: must produce bitwise-identical SimStats.
SimStats simulate_reference(const LQPersuasionModel& model, const ReceiverSolution& sol,
                            const RiccatiPath& riccati, const SimConfig& cfg,
                            const QuadraticForm* g = nullptr);

/// Post-burn-in time-and-path average with cross-path standard error.
enum class ErgodicTarget { receiver, sender };
std::pair<double, double> ergodic_estimate(const SimStats& stats, ErgodicTarget which);

/// Full single-path record (used for trajectory figures).
struct Trajectory {
    std::vector<double> t;
    std::vector<Vector> x;
    std::vector<Vector> xhat;
    std::vector<Vector> dw;  ///< signal-noise increments actually consumed
};

/// Simulates one path (same RNG streams as path `path_index` of simulate).
Trajectory simulate_path(const LQPersuasionModel& model, const ReceiverSolution& sol,
                         const RiccatiPath& riccati, const SimConfig& cfg,
                         int path_index = 0);

}  // namespace plq
