#include <doctest.h>

#include <cmath>

#include "plq/receiver.hpp"
#include "plq/rng.hpp"
#include "plq/stationary.hpp"

using namespace plq;

namespace {

LQPersuasionModel figure1_model(double b) {
    LQPersuasionModel m;
    m.d_w = m.d_b = m.r = 1;
    m.a_x = Matrix::Constant(1, 1, -0.5);
    m.b_x = Matrix::Constant(1, 1, 1.0);
    m.c_x = Vector::Constant(1, 0.5);
    m.obs_b = Matrix::Constant(1, 1, b);
    m.obs_sigma = Matrix::Identity(1, 1);
    m.f2 = Matrix::Constant(1, 1, 200.0);
    m.f1 = Vector::Constant(1, -150.0);
    m.f0 = 100.0;
    m.c2 = Matrix::Constant(1, 1, 0.5);
    m.c1 = Vector::Zero(1);
    m.x0 = Vector::Constant(1, 1.0);
    return m;
}

LQPersuasionModel carbon_model(double b, double q) {
    // kappa=0.5, gamma=0.1, lambda_a=0.25, lambda_q=0.75, ell=a=9
    LQPersuasionModel m;
    m.d_w = m.d_b = m.r = 1;
    m.a_x = Matrix::Constant(1, 1, -0.5);
    m.b_x = Matrix::Constant(1, 1, 1.0);
    m.c_x = Vector::Constant(1, 0.5 * 9.0);
    m.obs_b = Matrix::Constant(1, 1, b);
    m.obs_sigma = Matrix::Identity(1, 1);
    m.f2 = Matrix::Constant(1, 1, 1.0);
    m.f1 = Vector::Constant(1, -2.0 * (0.25 * 9.0 + 0.75 * q));
    m.f0 = 0.25 * 81.0;
    m.c2 = Matrix::Constant(1, 1, 1.0 / 0.2);
    m.c1 = Vector::Zero(1);
    m.x0 = Vector::Constant(1, 9.0);
    return m;
}

// A well-posed 2-D model for the matrix-shaped checks.
LQPersuasionModel planar_model() {
    LQPersuasionModel m;
    m.d_w = 2;
    m.d_b = 2;
    m.r = 2;
    m.a_x = Matrix(2, 2);
    m.a_x << -1.0, 0.2, 0.2, -1.5;
    m.b_x = Matrix(2, 2);
    m.b_x << 1.0, 0.0, 0.3, 0.8;
    m.c_x = Vector(2);
    m.c_x << 0.4, -0.2;
    m.obs_b = Matrix(2, 2);
    m.obs_b << 1.0, 0.3, 0.0, 0.8;
    m.obs_sigma = Matrix::Identity(2, 2);
    m.f2 = Matrix(2, 2);
    m.f2 << 2.0, 0.3, 0.3, 1.0;
    m.f1 = Vector(2);
    m.f1 << 0.5, -1.0;
    m.f0 = 3.0;
    m.c2 = Matrix(2, 2);
    m.c2 << 0.5, 0.1, 0.1, 0.8;
    m.c1 = Vector(2);
    m.c1 << 0.2, -0.1;
    m.x0 = Vector::Zero(2);
    m.validate();
    return m;
}

}  // namespace

TEST_SUITE("receiver") {

TEST_CASE("smart-meter solution matches the printed closed forms") {
    const LQPersuasionModel model = figure1_model(5.5);
    const ReceiverSolution sol = solve_receiver(model);

    const double beta = std::sqrt(400.25);
    CHECK(sol.g2(0, 0) == doctest::Approx((beta - 0.5) / 2.0).epsilon(1e-12));
    CHECK(sol.g2(0, 0) == doctest::Approx(9.75312).epsilon(1e-6));
    CHECK(sol.feedback_k(0, 0) == doctest::Approx(-2.0 * sol.g2(0, 0)).epsilon(1e-14));
    CHECK(sol.feedback_k(0, 0) == doctest::Approx(-19.50625).epsilon(1e-6));

    SUBCASE("affine feedback coincides with kappa(x - ell) - beta x + beta m_inf") {
        // m_inf from the printed closed form, independently of stationary_law.
        const double k2u = 0.25 + 200.0;
        const double m_inf = k2u / (0.25 + 400.0) * (1.0 - 50.0 / k2u);
        CHECK(sol.feedback_k(0, 0) == doctest::Approx(0.5 - beta).epsilon(1e-12));
        CHECK(sol.feedback_c(0) ==
              doctest::Approx(-0.5 * 1.0 + beta * m_inf).epsilon(1e-12));
    }
}

TEST_CASE("no linear terms anywhere gives g1 = 0 and zero feedback offset") {
    LQPersuasionModel model = figure1_model(1.0);
    model.f1 = Vector::Zero(1);
    model.c_x = Vector::Zero(1);
    const ReceiverSolution sol = solve_receiver(model);
    CHECK(sol.g1(0) == 0.0);
    CHECK(sol.feedback_c(0) == 0.0);
}

TEST_CASE("carbon solution matches the appendix closed form") {
    const ReceiverSolution sol = solve_receiver(carbon_model(5.5, 9.0));
    CHECK(sol.g2(0, 0) == doctest::Approx((std::sqrt(0.45) - 0.5) / 0.2).epsilon(1e-12));
    CHECK(sol.g2(0, 0) == doctest::Approx(0.854102).epsilon(1e-6));
}

TEST_CASE("HJB residual vanishes at the solution") {
    const LQPersuasionModel model = figure1_model(5.5);
    const ReceiverSolution sol = solve_receiver(model);

    CHECK(std::abs(hjb_residual(model, sol, Vector::Zero(1))) <= 1e-9);

    SUBCASE("100 uniform random states in [-10, 10]") {
        Xoshiro256pp rng(7);
        double max_abs = 0.0;
        for (int i = 0; i < 100; ++i) {
            const Vector x = Vector::Constant(1, -10.0 + 20.0 * rng.uniform_pos());
            max_abs = std::max(max_abs, std::abs(hjb_residual(model, sol, x)));
        }
        CHECK(max_abs <= 1e-8);
    }

    SUBCASE("shifting zeta shifts the residual by the same constant") {
        ReceiverSolution shifted = sol;
        shifted.zeta += 1.0;
        Xoshiro256pp rng(8);
        for (int i = 0; i < 10; ++i) {
            const Vector x = Vector::Constant(1, -10.0 + 20.0 * rng.uniform_pos());
            CHECK(hjb_residual(model, shifted, x) == doctest::Approx(-1.0).epsilon(1e-9));
        }
    }

    SUBCASE("planar model residual") {
        const LQPersuasionModel p = planar_model();
        const ReceiverSolution psol = solve_receiver(p);
        Xoshiro256pp rng(9);
        double max_abs = 0.0;
        for (int i = 0; i < 100; ++i) {
            Vector x(2);
            x << -10.0 + 20.0 * rng.uniform_pos(), -10.0 + 20.0 * rng.uniform_pos();
            max_abs = std::max(max_abs, std::abs(hjb_residual(p, psol, x)));
        }
        CHECK(max_abs <= 1e-8);
    }
}

TEST_CASE("ergodic value decomposition") {
    SUBCASE("f2 = 0 makes the value independent of the precision") {
        LQPersuasionModel model = figure1_model(1.0);
        model.f2 = Matrix::Zero(1, 1);
        double reference = 0.0;
        bool first = true;
        for (double b : {0.1, 1.0, 5.5, 20.0}) {
            model.obs_b = Matrix::Constant(1, 1, b);
            const ReceiverSolution sol = solve_receiver(model);
            const double value = receiver_ergodic_value(model, sol);
            if (first) {
                reference = value;
                first = false;
            }
            CHECK(value == doctest::Approx(reference).epsilon(1e-10));
        }
    }

    SUBCASE("value equals zeta + f0 + tr(f2 P) and the correction vanishes as b grows") {
        const LQPersuasionModel model = figure1_model(1e6);
        const ReceiverSolution sol = solve_receiver(model);
        const double value = receiver_ergodic_value(model, sol);
        CHECK(value == doctest::Approx(sol.zeta + model.f0 +
                                       (model.f2 * sol.p_limit).trace()).epsilon(1e-14));
        CHECK((model.f2 * sol.p_limit).trace() <= 1e-3);
    }

    SUBCASE("f0 moves the value but never zeta") {
        LQPersuasionModel model = figure1_model(5.5);
        const ReceiverSolution base = solve_receiver(model);
        model.f0 += 5.0;
        const ReceiverSolution shifted = solve_receiver(model);
        CHECK(shifted.zeta == base.zeta);
        CHECK(receiver_ergodic_value(model, shifted) ==
              doctest::Approx(receiver_ergodic_value(figure1_model(5.5), base) + 5.0)
                  .epsilon(1e-12));
    }
}

TEST_CASE("feedback form equivalence at random states") {
    const LQPersuasionModel model = planar_model();
    const ReceiverSolution sol = solve_receiver(model);
    const Matrix c2inv = model.c2.inverse();
    Xoshiro256pp rng(11);
    for (int i = 0; i < 50; ++i) {
        Vector xhat(2);
        xhat << -5.0 + 10.0 * rng.uniform_pos(), -5.0 + 10.0 * rng.uniform_pos();
        const Vector direct =
            -0.5 * c2inv *
            (model.b_x.transpose() * (2.0 * sol.g2 * xhat + sol.g1) + model.c1);
        const Vector affine = sol.feedback(xhat);
        CHECK((direct - affine).cwiseAbs().maxCoeff() <= 1e-12 * (1.0 + direct.norm()));
    }
}

TEST_CASE("scalar closed-form agreement across the parameter grid") {
    for (double kappa : {0.1, 0.5, 2.0}) {
        for (double gamma : {0.1, 1.0, 2.0}) {
            for (double f2 : {0.0, 1.0, 200.0}) {
                LQPersuasionModel model = figure1_model(1.0);
                model.a_x = Matrix::Constant(1, 1, -kappa);
                model.c_x = Vector::Constant(1, kappa);
                model.c2 = Matrix::Constant(1, 1, 1.0 / (2.0 * gamma));
                model.f2 = Matrix::Constant(1, 1, f2);
                const ReceiverSolution sol = solve_receiver(model);
                const double expected =
                    (std::sqrt(kappa * kappa + 2.0 * gamma * f2) - kappa) / (2.0 * gamma);
                CHECK(std::abs(sol.g2(0, 0) - expected) <= 1e-12 * (1.0 + expected));
            }
        }
    }
}

TEST_CASE("more information never hurts the receiver") {
    double previous = std::numeric_limits<double>::infinity();
    for (double b : {0.01, 0.1, 0.5, 1.0, 2.0, 5.5, 10.0, 55.0, 100.0}) {
        const LQPersuasionModel model = figure1_model(b);
        const ReceiverSolution sol = solve_receiver(model);
        const double value = receiver_ergodic_value(model, sol);
        CHECK(value <= previous + 1e-10);
        previous = value;
    }
}

TEST_CASE("non-normalized model is rejected") {
    LQPersuasionModel model = figure1_model(5.5);
    model.obs_sigma = Matrix::Constant(1, 1, 2.0);
    CHECK_THROWS_AS(solve_receiver(model), ModelError);
}

}  // TEST_SUITE
