#pragma once

#include "plq/algebra.hpp"
#include "plq/model.hpp"
#include "plq/types.hpp"

namespace plq {

/**
 * Solution of the Receiver's separated ergodic control problem. The value
 * ansatz is V(x) = x'g2 x + g1'x; the optimal feedback is affine in the
 * filtered state:  v*(xhat) = feedback_k xhat + feedback_c, with
 * feedback_k = -c2^{-1} b_x' g2 and feedback_c = -1/2 c2^{-1} (b_x' g1 + c1).
 */
struct ReceiverSolution {
    Matrix g2;          ///< quadratic ansatz coefficient, symmetric (d_w x d_w)
    Vector g1;          ///< linear ansatz coefficient (d_w)
    double zeta = 0.0;  ///< ergodic constant of the reduced problem (excludes f0)
    Matrix feedback_k;  ///< affine feedback gain (r x d_w)
    Vector feedback_c;  ///< affine feedback offset (r)
    Matrix p_limit;     ///< filter error covariance limit P(inf)

    Vector feedback(const Vector& xhat) const { return feedback_k * xhat + feedback_c; }
};

/**
 * Solves the separated problem on a normalized model:
 *   g2   = stabilizing solution of a_x'G + G a_x - G b_x c2^{-1} b_x' G + f2 = 0
 *   g1   = Theta1'^{-1} (g2 b_x c2^{-1} c1 - 2 g2 c_x - f1),  Theta1 = a_x - b_x c2^{-1} b_x' g2
 *   zeta = c_x'g1 - 1/4 (b_x'g1 + c1)' c2^{-1} (b_x'g1 + c1) + tr(g2 P b' b P),  P = P(inf)
 *
 * zeta deliberately excludes f0 (the ergodic HJB identification has no
 * constant cost term); receiver_ergodic_value reintroduces it.
 *
 * Throws Theta1Singular when the linear solve for g1 degenerates, ModelError
 * when the model is not normalized, plus anything solve_care throws.
 */
ReceiverSolution solve_receiver(const LQPersuasionModel& model);

/**
 * Residual of the ergodic HJB at x with the analytic minimizer substituted:
 *   inf_v { L_inf V(x) + f(x,v) - f0 } - zeta.
 * Exactly zero (in exact arithmetic) for a correct solution, at every x.
 */
double hjb_residual(const LQPersuasionModel& model, const ReceiverSolution& sol,
                    const Vector& x);

/// Full ergodic Receiver cost: zeta + f0 + tr(f2 P(inf)), i.e. the reduced value
/// plus the constant cost and the filtering-error correction dropped in the
/// separation reduction.
double receiver_ergodic_value(const LQPersuasionModel& model, const ReceiverSolution& sol);

}  // namespace plq
