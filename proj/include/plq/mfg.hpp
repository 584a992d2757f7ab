#pragma once

#include <functional>
#include <vector>

#include "plq/model.hpp"
#include "plq/receiver.hpp"
#include "plq/stationary.hpp"
#include "plq/types.hpp"

namespace plq {

/// Model coefficients that depend on the population's stationary mean m and
/// joint covariance w in the mean-field game.
struct MfgCoefficients {
    Vector f1;
    Matrix f2;
    Vector c_x;
};

/// Must be pure: no shared mutable state (scenario solves may run in parallel).
using CoefficientMap = std::function<MfgCoefficients(const Vector& m, const Matrix& w)>;

/// A family of models indexed by the MFG coupling pair (m, w): the base model
/// with f1, f2, c_x overridden by the coefficient map.
struct MfgFamily {
    LQPersuasionModel base;
    CoefficientMap coefficients;

    LQPersuasionModel instantiate(const Vector& m, const Matrix& w) const;
};

struct MfgOptions {
    double tol = 1e-10;
    double damping = 0.5;  ///< Picard step: (m,w) <- (1-d)(m,w) + d(m_inf, w_inf)
    int max_iter = 500;
};

struct MfgEquilibrium {
    Vector m_star;           ///< equilibrium stationary mean
    Matrix w_star;           ///< equilibrium joint stationary covariance
    ReceiverSolution solution;  ///< receiver solution at (m*, w*)
    StationaryLaw law;          ///< stationary law at (m*, w*)
    int iterations = 0;
    double residual = 0.0;   ///< max(|m* - m_inf(m*,w*)|, |w* - w_inf(m*,w*)|), inf norms
    std::vector<double> residual_history;
};

/// Thrown after max_iter; carries the last iterate for diagnostics.
class NoConvergence : public Error {
public:
    NoConvergence(const std::string& what, MfgEquilibrium last)
        : Error(what), last_iterate(std::move(last)) {}
    MfgEquilibrium last_iterate;
};

/**
 * Damped Picard iteration on the fixed point (m, w) = (m_inf, w_inf)(m, w):
 * at each step the model is instantiated at the current pair, the receiver
 * problem and stationary law are solved, and the pair is relaxed toward the
 * induced law. Stops when the fixed-point gap is <= tol.
 *
 * Throws NoConvergence after max_iter and AssumptionViolatedAtIterate when a
 * solve fails at some iterate.
 */
MfgEquilibrium mfg_solve(const MfgFamily& family, const Vector& init_m, const Matrix& init_w,
                         const MfgOptions& opts = {});

/// Fixed-point gap at a candidate pair; zero exactly at equilibrium.
double mfg_residual(const MfgFamily& family, const Vector& m, const Matrix& w);

}  // namespace plq
