#include <doctest.h>

#include <cmath>

#include "plq/mfg.hpp"
#include "plq/scenarios.hpp"

using namespace plq;

namespace {

MfgFamily smart_meter_family(double b) {
    SmartMeterParams p;
    p.mfg = true;
    return p.mfg_family(b);
}

MfgFamily carbon_family(double b, double eps) {
    CarbonParams p;
    return p.mfg_family(b, eps);
}

Vector m_init() { return Vector::Constant(1, 1.0); }
Matrix w_init() { return Matrix::Identity(2, 2); }

// Fixed-point algebra: m (kappa^2 + 2 gamma u0 + gamma p1) = (kappa^2 + 2 gamma u0) ell - gamma p0
constexpr double kSmartMeterMStar = 150.25 / 300.25;

}  // namespace

TEST_SUITE("mfg") {

TEST_CASE("smart-meter equilibrium matches the scalar fixed-point algebra") {
    const MfgEquilibrium eq = mfg_solve(smart_meter_family(5.5), m_init(), w_init());
    CHECK(std::abs(eq.m_star(0) - kSmartMeterMStar) <= 1e-8);
    CHECK(eq.m_star(0) == doctest::Approx(0.500416).epsilon(1e-6));
    CHECK(eq.residual <= 1e-10);

    SUBCASE("the returned equilibrium re-evaluates below tolerance") {
        CHECK(mfg_residual(smart_meter_family(5.5), eq.m_star, eq.w_star) <= 1e-10);
    }

    SUBCASE("damping does not move the equilibrium") {
        for (double damping : {0.3, 0.5, 1.0}) {
            MfgOptions opts;
            opts.damping = damping;
            const MfgEquilibrium alt = mfg_solve(smart_meter_family(5.5), m_init(), w_init(), opts);
            CHECK(std::abs(alt.m_star(0) - eq.m_star(0)) <= 1e-9);
            CHECK((alt.w_star - eq.w_star).cwiseAbs().maxCoeff() <= 1e-9);
        }
    }
}

TEST_CASE("uncoupled carbon scenario collapses to the single-receiver law") {
    CarbonParams p;
    p.lambda_q = 0.0;
    p.lambda_a = 1.0;
    MfgOptions opts;
    opts.damping = 1.0;  // constant map: one solve determines the fixed point
    const MfgEquilibrium eq =
        mfg_solve(p.mfg_family(5.5, 1.0), Vector::Constant(1, 9.0), w_init(), opts);
    CHECK(eq.iterations <= 2);

    // single-receiver stationary mean with target a only
    const LQPersuasionModel single = p.mfg_family(5.5, 1.0).instantiate(eq.m_star, eq.w_star);
    const StationaryLaw law = stationary_law(single, solve_receiver(single));
    CHECK(std::abs(eq.m_star(0) - law.mean(0)) <= 1e-10);
}

TEST_CASE("residual at perturbed candidates") {
    const MfgFamily family = carbon_family(5.5, 1.0);
    const MfgEquilibrium eq = mfg_solve(family, Vector::Constant(1, 9.0), w_init());

    SUBCASE("coupled scenario: the single-receiver law is not an equilibrium") {
        // Freeze q at the own-target level (what a single receiver would face).
        CarbonParams p;
        const LQPersuasionModel single = p.mfg_family(5.5, 1.0).instantiate(
            Vector::Constant(1, p.a), Matrix::Zero(2, 2));
        const StationaryLaw law = stationary_law(single, solve_receiver(single));
        const double gap = mfg_residual(family, law.mean, law.cov_joint);
        CHECK(gap > 1e-3);
    }

    SUBCASE("unit mean perturbation moves the gap by |1 - slope|") {
        // one-step map slope for the carbon coupling: 2 gamma lambda_q / (kappa^2 + 2 gamma lbar)
        const Vector m_up = eq.m_star + Vector::Constant(1, 1.0);
        const double gap = mfg_residual(family, m_up, eq.w_star);
        CHECK(gap == doctest::Approx(1.0 - 0.15 / 0.45).epsilon(1e-6));
    }
}

TEST_CASE("successive residuals contract geometrically") {
    MfgOptions opts;
    opts.tol = 1e-12;
    opts.max_iter = 200;
    const MfgEquilibrium eq = mfg_solve(smart_meter_family(5.5), m_init(), w_init(), opts);
    REQUIRE(eq.residual_history.size() >= 6);
    for (std::size_t k = 3; k + 1 < eq.residual_history.size(); ++k) {
        if (eq.residual_history[k] < 1e-13) break;  // at round-off floor
        CHECK(eq.residual_history[k + 1] < eq.residual_history[k]);
    }
}

TEST_CASE("carbon consistency condition holds at the equilibrium") {
    const double eps = 1.0;
    const MfgEquilibrium eq = mfg_solve(carbon_family(5.5, eps), Vector::Constant(1, 9.0), w_init());
    const double sigma = std::sqrt(eq.law.var_x()(0, 0));
    const double q = eq.m_star(0) - eps * sigma;
    // re-instantiating at (m*, w*) must produce exactly this f1
    const LQPersuasionModel at_eq = carbon_family(5.5, eps).instantiate(eq.m_star, eq.w_star);
    CHECK(at_eq.f1(0) == doctest::Approx(-2.0 * (0.25 * 9.0 + 0.75 * q)).epsilon(1e-9));
}

TEST_CASE("max_iter exhaustion raises NoConvergence with the last iterate") {
    MfgOptions opts;
    opts.max_iter = 2;
    opts.tol = 1e-14;
    CHECK_THROWS_AS(mfg_solve(smart_meter_family(5.5), m_init(), w_init(), opts), NoConvergence);
    try {
        mfg_solve(smart_meter_family(5.5), m_init(), w_init(), opts);
    } catch (const NoConvergence& e) {
        CHECK(e.last_iterate.iterations == 2);
        CHECK(e.last_iterate.residual_history.size() == 2);
        CHECK(e.last_iterate.m_star.size() == 1);
    }
}

TEST_CASE("solver failure at an iterate is tagged with the iterate") {
    // A coefficient map that turns f2 negative poisons the model validation.
    MfgFamily family = smart_meter_family(5.5);
    family.coefficients = [](const Vector&, const Matrix&) -> MfgCoefficients {
        MfgCoefficients out;
        out.f2 = Matrix::Constant(1, 1, -1.0);
        out.f1 = Vector::Zero(1);
        out.c_x = Vector::Zero(1);
        return out;
    };
    CHECK_THROWS_AS(mfg_solve(family, m_init(), w_init()), AssumptionViolatedAtIterate);
}

}  // TEST_SUITE
