#pragma once

#include <string>
#include <vector>

#include "plq/mfg.hpp"
#include "plq/model.hpp"
#include "plq/sender.hpp"
#include "plq/types.hpp"

namespace plq {

/**
 * Smart-meter application: a consumer mean-reverting to habit level ell with
 * friction-cost 1/(2 gamma) v^2, net utility weight u0, affine electricity
 * price p0 + p1 x, production cost g0 x + 1/2 g1 x^2, and a metering device of
 * precision b. Model mapping (single receiver):
 *   a_x = -kappa, b_x = 1, c_x = kappa ell,
 *   f2 = p1 + u0, f1 = p0 - 2 ell u0, f0 = u0 ell^2, c2 = 1/(2 gamma), c1 = 0.
 * MFG mode: f2 = u0 and f1(m) = p0 + p1 m - 2 ell u0.
 */
struct SmartMeterParams {
    double kappa = 0.5;
    double ell = 1.0;
    double u0 = 100.0;
    double gamma = 1.0;
    double p0 = 50.0;
    double p1 = 100.0;
    double g0 = 1.0;
    double g1 = 400.0;
    double r = 0.04;    ///< discount rate of the device cost
    double eta = 300.0; ///< device cost scale
    bool mfg = false;

    void validate() const;
    LQPersuasionModel model(double b) const;   ///< single-receiver model at precision b
    MfgFamily mfg_family(double b) const;      ///< mean-field family at precision b
    double k_information() const { return mfg ? g1 : g1 - 2.0 * p1; }
};

/**
 * Carbon-accounting application: firms mean-reverting to footprint ell,
 * weighing their own target a (weight lambda_a) against the best-in-class
 * target q = m - epsilon sigma (weight lambda_q); the regulator pays damage
 * c_damage E[(X*)^2] plus the reporting-stringency cost. Model mapping:
 *   a_x = -kappa, b_x = 1, c_x = kappa ell, f2 = lambda_a + lambda_q,
 *   f1(m,w) = -2 (lambda_a a + lambda_q q), c2 = 1/(2 gamma), c1 = 0.
 */
struct CarbonParams {
    double kappa = 0.5;
    double ell = 9.0;
    double a = 9.0;
    double gamma = 0.1;
    double lambda_a = 0.25;
    double lambda_q = 0.75;
    double epsilon = 1.0;   ///< level of best-in-class target
    double c_damage = 0.5;
    double eta = 0.02;      ///< reporting-cost scale (free calibration)

    void validate() const;
    MfgFamily mfg_family(double b, double epsilon_override) const;
    MfgFamily mfg_family(double b) const { return mfg_family(b, epsilon); }
};

/// One cross-checked quantity: the pipeline value against the printed closed
/// form, consistent when |pipeline - published| <= tol * max(1, |pipeline|, |published|).
struct QuantityCheck {
    std::string name;
    double pipeline = 0.0;
    double published = 0.0;
    double tol = 1e-8;
    bool consistent = false;
};

struct ScenarioReport {
    std::string scenario;
    std::vector<QuantityCheck> checks;
    std::vector<std::string> notes;

    const QuantityCheck& find(const std::string& name) const;
    std::vector<std::string> discrepant_names() const;
    std::string to_text() const;
};

/// Sender scenario builders shared by the reports, the CLI and the tests.
/// reduced_g centers the smart-meter production quadratic so that
/// E[g] = 1/2 k_I Var(X*) exactly; the full form keeps g(x) - p(x)x.
SenderScenario smart_meter_sender_scenario(const SmartMeterParams& params, bool reduced_g = true);
SenderScenario carbon_sender_scenario(const CarbonParams& params, double epsilon);

/// Runs the full pipeline at precision b, evaluates every closed form printed
/// for this application, and fills consistency flags. In MFG mode the beta and
/// m_star rows use the published formulas verbatim (documented
/// discrepancies); derived rows use the pipeline-consistent mean-reversion rate.
ScenarioReport smart_meter_report(const SmartMeterParams& params, double b);

/// Same for the carbon application, one block of checks per epsilon in the grid.
ScenarioReport carbon_report(const CarbonParams& params, const std::vector<double>& epsilon_grid);

/**
 * Emits the data behind the two figures as CSV (12 significant digits):
 *   fig1: fig1_variance.csv (variance of the stationary consumption vs b) and
 *         fig1_traj_b{0|5.5|55}.csv (t, X, X_hat; one shared W realization)
 *   fig2: fig2_mean.csv, fig2_std.csv, fig2_costs.csv over the epsilon grid,
 *         pipeline and published-formula columns side by side.
 * Returns the list of files written.
 */
std::vector<std::string> figure_data_fig1(const SmartMeterParams& params,
                                          const std::string& out_dir);
std::vector<std::string> figure_data_fig2(const CarbonParams& params,
                                          const std::vector<double>& epsilon_grid,
                                          const std::string& out_dir);

/// Closed forms printed in the applications (used for the report's published
/// column; tests re-derive them independently).
namespace closed_form {

// --- smart meter -----------------------------------------------------------
double beta(double kappa, double gamma, double f2_eff);  ///< sqrt(kappa^2 + 2 gamma f2_eff)
double g2(double kappa, double gamma, double beta);      ///< (beta - kappa) / (2 gamma)
double smart_meter_g1(const SmartMeterParams& p, double beta);
double smart_meter_m_inf(const SmartMeterParams& p);
double sigma2_inf(double b, double kappa, double beta);  ///< stationary Var(X*); b = 0 gives 1/(2 kappa)
double p_inf(double b, double kappa);                    ///< filter limit (sqrt(kappa^2+b^2)-kappa)/b^2
double smart_meter_mfg_beta_published(const SmartMeterParams& p);   ///< sqrt(kappa^2 + gamma u0), printed
double smart_meter_mfg_m_star_published(const SmartMeterParams& p); ///< printed denominator kappa^2 + gamma (p1+u0)
double smart_meter_mfg_m_star(const SmartMeterParams& p);       ///< pipeline algebra: kappa^2 + 2 gamma u0 + gamma p1

// --- carbon ----------------------------------------------------------------
double carbon_beta(const CarbonParams& p);                      ///< sqrt(kappa^2 + 2 gamma (lambda_a + lambda_q))
double carbon_g1(const CarbonParams& p, double q);              ///< (kappa ell (beta-kappa) - 2 gamma qbar)/(beta gamma)
double carbon_ell_hat_published(const CarbonParams& p, double q);   ///< printed: minus sign on qbar
double carbon_q_star_published(const CarbonParams& p, double eps, double sigma);
double carbon_m0_published(const CarbonParams& p);
double carbon_m1_published(const CarbonParams& p);
double carbon_m_star_published(const CarbonParams& p, double eps, double sigma);
double carbon_m_star_pipeline(const CarbonParams& p, double eps, double sigma);  ///< plus sign on qbar
double carbon_cost_g(double z, double eta, double v_lo, double v_hi);  ///< log-barrier device cost
bool carbon_interior_condition(const CarbonParams& p, double eps, double m0, double m1,
                               double v_lo, double v_hi);
/// Exact FOC root of the reformulated Sender objective
/// G(z) + 1/2 c [(m0 + eps m1 z)^2 + z^2]; stays in (v_lo, v_hi] and matches
/// the published trends.
double carbon_sigma_star(const CarbonParams& p, double eps, double m0, double m1,
                         double v_lo, double v_hi);
/// The optimum exactly as printed; kept for the discrepancy report (it leaves
/// the domain for moderate eps at the published parameters).
double carbon_sigma_star_printed(const CarbonParams& p, double eps, double m0, double m1,
                                 double v_lo, double v_hi);

}  // namespace closed_form

}  // namespace plq
