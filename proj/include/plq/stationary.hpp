#pragma once

#include <utility>
#include <vector>

#include "plq/algebra.hpp"
#include "plq/model.hpp"
#include "plq/receiver.hpp"
#include "plq/types.hpp"

namespace plq {

/**
 * Closed-loop joint system for (X*, Xhat*) under the optimal feedback:
 *
 *   d(X, Xhat) = (Theta(t) (X, Xhat) + vartheta) dt + Xi(t) d(W, B)
 *
 *   Theta(t) = [ a_x            -D g2          ]   D = b_x c2^{-1} b_x'
 *              [ P(t) b'b        a_x - Dg2 - P(t) b'b ]
 *   vartheta = (theta, theta),  theta = -1/2 b_x c2^{-1} (b_x'g1 + c1) + c_x
 *   Xi(t)    = blockdiag(I, P(t) b')
 */
struct ClosedLoopSystem {
    Matrix a_x;
    Matrix dg2;    ///< b_x c2^{-1} b_x' g2
    Matrix btb;    ///< obs_b' obs_b
    Matrix obs_b;  ///< (d_b x d_w)
    Vector theta_shift;  ///< theta (d_w)
    RiccatiPath riccati;

    int dim() const { return static_cast<int>(a_x.rows()); }

    Matrix theta(double t) const;
    Matrix theta_limit() const;
    Matrix theta1() const { return a_x - dg2; }
    Matrix xi(double t) const;
    Matrix xi_limit() const;
    Vector vartheta() const;
};

/// Assembles the closed-loop blocks from a receiver solution and the filter
/// covariance path.
ClosedLoopSystem closed_loop_system(const LQPersuasionModel& model, const ReceiverSolution& sol,
                                    RiccatiPath riccati);

/**
 * Stationary Gaussian law of the joint state: mean m_inf shared by X* and
 * Xhat*, joint covariance w_inf of (X*, Xhat*), filter limit P(inf).
 * Satisfies the law of total variance blockwise:
 * Var(X*) - Var(Xhat*) = P(inf).
 */
struct StationaryLaw {
    Vector mean;       ///< m_inf (d_w)
    Matrix cov_joint;  ///< w_inf (2 d_w x 2 d_w), symmetric PSD
    Matrix p_limit;    ///< P(inf)

    Matrix var_x() const { return cov_joint.topLeftCorner(mean.size(), mean.size()); }
    Matrix var_xhat() const { return cov_joint.bottomRightCorner(mean.size(), mean.size()); }
};

/**
 * m_inf = -Theta1^{-1} theta;  w_inf solves the Lyapunov equation
 * w Theta_inf' + Theta_inf w + Xi_inf Xi_inf' = 0.
 *
 * Throws ThetaNotHurwitz when Theta1 or Theta_inf is not Hurwitz.
 */
StationaryLaw stationary_law(const LQPersuasionModel& model, const ReceiverSolution& sol);

struct MomentPaths {
    std::vector<double> t_grid;
    std::vector<Vector> mean;  ///< m(t), m(0) = x0
    std::vector<Matrix> cov;   ///< w(t), w(0) = 0, joint (2 d_w x 2 d_w)
};

/**
 * RK4 on the transient moment ODEs
 *   m' = Theta1 m + theta          from m(0) = x0
 *   w' = w Theta(t)' + Theta(t) w + Xi(t) Xi(t)'   from w(0) = 0,
 * with the time-varying coefficients read from the Riccati path (linear
 * interpolation at substep times). Provides an independent oracle for the
 * Lyapunov-based stationary law.
 *
 * Throws StepSizeTooCoarse when symmetry/PSD drift of w exceeds 1e-8.
 */
MomentPaths integrate_moment_odes(const LQPersuasionModel& model, const ReceiverSolution& sol,
                                  const RiccatiPath& riccati, const std::vector<double>& t_grid,
                                  double max_step = 1e-3);

}  // namespace plq
