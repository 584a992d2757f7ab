#include "plq/receiver.hpp"

#include <Eigen/LU>
#include <cmath>
#include <iostream>

namespace plq {

namespace {

Matrix c2_inverse(const LQPersuasionModel& m) {
    return m.c2.llt().solve(Matrix::Identity(m.r, m.r));
}

}  // namespace

ReceiverSolution solve_receiver(const LQPersuasionModel& model) {
    model.validate();
    if (!model.observation_normalized())
        throw ModelError("solve_receiver requires a normalized model (obs_sigma = identity); "
                         "call normalize_observation first");

    const int n = model.d_w;
    const Matrix c2inv = c2_inverse(model);
    const Matrix d = model.b_x * c2inv * model.b_x.transpose();

    ReceiverSolution sol;
    sol.p_limit = solve_care({model.a_x.transpose(), model.obs_b.transpose() * model.obs_b,
                              Matrix::Identity(n, n)});
    sol.g2 = solve_care({model.a_x, d, model.f2});

    // Theta1' g1 = g2 b_x c2^{-1} c1 - 2 g2 c_x - f1,  Theta1 = a_x - D g2.
    const Matrix theta1_t = model.a_x.transpose() - sol.g2 * d;
    Eigen::FullPivLU<Matrix> lu(theta1_t);
    if (!lu.isInvertible())
        throw Theta1Singular("Theta1 = a_x - b_x c2^{-1} b_x' g2 is singular");
    const Vector rhs = sol.g2 * model.b_x * c2inv * model.c1 - 2.0 * sol.g2 * model.c_x - model.f1;
    sol.g1 = lu.solve(rhs);

    const Vector bg1c1 = model.b_x.transpose() * sol.g1 + model.c1;
    const Matrix btb = model.obs_b.transpose() * model.obs_b;
    const double trace_xi = (sol.g2 * sol.p_limit * btb * sol.p_limit).trace();
    const double trace_direct =
        (model.obs_b * sol.p_limit.transpose() * sol.g2 * sol.p_limit * model.obs_b.transpose())
            .trace();
    if (std::abs(trace_xi - trace_direct) > 1e-9 * (1.0 + std::abs(trace_xi)))
        std::cerr << "plq: warning: asymmetric P(inf) trace term (" << trace_xi << " vs "
                  << trace_direct << ")\n";
    sol.zeta = model.c_x.dot(sol.g1) -
               0.25 * (model.b_x.transpose() * sol.g1).dot(c2inv * bg1c1) -
               0.25 * model.c1.dot(c2inv * bg1c1) + trace_xi;

    sol.feedback_k = -c2inv * model.b_x.transpose() * sol.g2;
    sol.feedback_c = -0.5 * c2inv * bg1c1;
    return sol;
}

double hjb_residual(const LQPersuasionModel& model, const ReceiverSolution& sol,
                    const Vector& x) {
    const Matrix c2inv = c2_inverse(model);
    const Vector grad = 2.0 * sol.g2 * x + sol.g1;
    const Vector v = -0.5 * c2inv * (model.b_x.transpose() * grad + model.c1);

    const Matrix btb = model.obs_b.transpose() * model.obs_b;
    const double trace_term = (sol.g2 * sol.p_limit * btb * sol.p_limit).trace();

    const double generator = grad.dot(model.a_x * x + model.b_x * v + model.c_x) + trace_term;
    const double running_cost = x.dot(model.f2 * x) + model.f1.dot(x) + v.dot(model.c2 * v) +
                                model.c1.dot(v);
    return generator + running_cost - sol.zeta;
}

double receiver_ergodic_value(const LQPersuasionModel& model, const ReceiverSolution& sol) {
    return sol.zeta + model.f0 + (model.f2 * sol.p_limit).trace();
}

}  // namespace plq
