#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "plq/mfg.hpp"
#include "plq/model.hpp"
#include "plq/types.hpp"

namespace plq {

enum class SenderMode { single_receiver, mfg };

/// Quadratic form over the joint stationary state Z = (X*, Xhat*) in R^{2 d_w}:
/// g(Z) = Z'q Z + l'Z + c0. Its stationary expectation under a Gaussian law is
/// tr(q w) + m'q m + l'm + c0.
struct QuadraticForm {
    Matrix q;
    Vector l;
    double c0 = 0.0;

    double expectation(const Vector& mean_joint, const Matrix& cov_joint) const;
};

/**
 * Device cost h(b). The reciprocal-variance family H and the log-barrier
 * family G are functions of z = Var(X*_inf)(b) on (v_lo, v_hi]; the polynomial
 * family is a function of b itself with no constant term. All families satisfy
 * h(0) = 0 (no information is costless); z <= v_lo maps to +infinity.
 */
struct DeviceCost {
    enum class Family { none, reciprocal_variance, log_barrier_std, polynomial };
    Family family = Family::none;
    double r = 0.0;     ///< discount rate (reciprocal-variance family)
    double eta = 0.0;   ///< cost scale
    double v_lo = 0.0;  ///< full-information variance floor
    double v_hi = 0.0;  ///< no-information variance ceiling
    std::vector<double> poly;  ///< c_k for b^k, k >= 1

    double eval(double b, double variance) const;

    static DeviceCost none() { return {}; }
    static DeviceCost reciprocal_variance(double r, double eta, double v_lo, double v_hi);
    static DeviceCost log_barrier_std(double eta, double v_lo, double v_hi);
    static DeviceCost polynomial(std::vector<double> coeffs);
};

/**
 * The Sender's reduced static problem over the scalar device precision b:
 * minimize E[g(Z_inf)] + h(b) where the stationary law comes from the full
 * pipeline at model_of_b(b) (single receiver) or from the MFG equilibrium
 * (mfg mode, using the coefficient map and a fixed iteration start so results
 * do not depend on evaluation order).
 */
struct SenderScenario {
    SenderMode mode = SenderMode::single_receiver;
    std::function<LQPersuasionModel(double)> model_of_b;  ///< must return normalized models
    QuadraticForm g_spec;
    DeviceCost h_spec;

    CoefficientMap coefficient_map;  ///< mfg mode only
    Vector mfg_init_m;
    Matrix mfg_init_w;
    MfgOptions mfg_opts;
};

enum class BoundaryFlag { interior, no_information, cap };

struct SenderResult {
    double b_star = 0.0;
    double objective_star = 0.0;
    BoundaryFlag flag = BoundaryFlag::interior;
    std::vector<std::pair<double, double>> samples;  ///< (b, objective) over the scan grid
    bool multimodal_warning = false;
};

/// E[g] + h(b) at precision b >= 0. Propagates solver errors.
double sender_objective(const SenderScenario& scenario, double b);

/// Stationary X-block variance at precision b (the z-coordinate of the
/// reparameterized problem). Shares the pipeline with sender_objective.
double stationary_variance_at(const SenderScenario& scenario, double b);

/**
 * Coarse logarithmic grid scan over [0, b_max] (200 points over [1e-3, b_max]
 * plus the endpoints b = 0 and b = b_max) followed by golden-section
 * refinement on the bracketing interval. Grid evaluations are independent and
 * run in parallel; aggregation is ordered by b so the result never depends on
 * the worker count. For unimodal objectives |b* - argmin| <= tol.
 *
 * Multimodal objectives return the best grid-refined point and set
 * multimodal_warning when two non-adjacent grid-local minima agree to 1e-6.
 */
SenderResult optimize_precision(const SenderScenario& scenario, double b_max, double tol = 1e-8);

/**
 * Unique b >= 0 whose stationary X-block variance equals z, by bisection on
 * the strictly decreasing map b -> Var(X*_inf)(b); tolerance 1e-10 in z.
 * Requires z in (v_lo, v_hi] where v_hi = variance at b = 0 and v_lo is the
 * full-information floor. Throws OutOfRange outside that interval.
 */
double invert_variance(const SenderScenario& scenario, double z);

/**
 * Optimal variance target for the reciprocal-variance cost family:
 * v_hi when k (v_hi - v_lo) <= r eta (providing information is not worth it),
 * otherwise the interior FOC root v_lo + sqrt(r eta (v_hi - v_lo) / k) of
 * H'(z) = -k/2. Continuous at the threshold.
 */
double app1_variance_rule(double k, double r, double eta, double v_lo, double v_hi);

/// The back-of-envelope decision numbers behind app1_variance_rule.
struct EnvelopeVerdict {
    double r_eta = 0.0;
    double k_delta_v = 0.0;
    double z_star = 0.0;
    bool no_information = false;  ///< true when z* = v_hi, i.e. b* = 0
};

EnvelopeVerdict information_worth_it(double k, double r, double eta, double v_lo, double v_hi);

}  // namespace plq
