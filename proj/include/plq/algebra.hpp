#pragma once

#include <vector>

#include "plq/types.hpp"

namespace plq {

/// Continuous algebraic Riccati equation  a'P + Pa - P d P + q = 0
/// with d, q symmetric PSD.
struct CareProblem {
    Matrix a;
    Matrix d;
    Matrix q;
};

/**
 * Unique stabilizing symmetric solution: the one that makes a - d*P Hurwitz.
 * Scalar problems use the quadratic formula directly; matrix problems run
 * Newton-Kleinman (one Lyapunov solve per step) from a Bass-construction
 * stabilizing start. The result is verified before returning:
 * residual <= 1e-10 (1 + |P|^2) and the Hurwitz property.
 *
 * Throws NoStabilizingSolution / ResidualTooLarge.
 */
Matrix solve_care(const CareProblem& problem);

/**
 * Unique solution of the Lyapunov equation  w theta' + theta w + q = 0
 * via the Kronecker-vectorized dense linear system (intended for small n).
 * Requires theta Hurwitz; residual verified to 1e-11 (1 + |w|).
 *
 * Throws ThetaNotHurwitz / SingularSystem.
 */
Matrix solve_lyapunov(const Matrix& theta, const Matrix& q);

/// Filter error-covariance path P(t) with its t -> infinity limit.
struct RiccatiPath {
    std::vector<double> t_grid;  ///< strictly increasing, starts at 0
    std::vector<Matrix> values;  ///< P(t_grid[k]), symmetric PSD
    Matrix limit;                ///< P(inf), stabilizing ARE solution

    /// Piecewise-constant lookup at step times (last grid point <= t);
    /// clamps to limit beyond the grid. Used by the simulator.
    const Matrix& at_step(double t) const;
    /// Linear interpolation in t, clamped to [front, limit]. Used by the
    /// moment-ODE integrator.
    Matrix interpolate(double t) const;
};

/**
 * Classical RK4 on  P' = a P + P a' - P obs_b' obs_b P + I  from P(0) = p0,
 * recorded on t_grid. Integration substep is capped at max_step (default
 * 1e-3); symmetry is re-enforced each step by averaging with the transpose.
 * The limit field is filled from solve_care.
 *
 * Throws StepSizeTooCoarse when symmetry or PSD drift exceeds 1e-8.
 */
RiccatiPath integrate_riccati_ode(const Matrix& a, const Matrix& obs_b, const Matrix& p0,
                                  const std::vector<double>& t_grid, double max_step = 1e-3);

}  // namespace plq
