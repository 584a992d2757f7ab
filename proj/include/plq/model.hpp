#pragma once

#include <string>

#include "plq/types.hpp"

namespace plq {

/**
 * Coefficients of the partially observed linear-quadratic game:
 *
 *   signal       dX = (a_x X + b_x v + c_x) dt + dW,        X_0 = x0
 *   message      dM = obs_b X dt + obs_sigma dB,            M_0 = 0
 *   running cost f(x,v) = x'f2 x + f1'x + f0 + v'c2 v + c1'v
 *
 * All downstream solvers require a normalized model (obs_sigma = identity);
 * see normalize_observation. Values are immutable once built: every operation
 * takes the model by const reference and returns fresh objects.
 */
struct LQPersuasionModel {
    int d_w = 0;  ///< signal / W-noise dimension
    int d_b = 0;  ///< message / B-noise dimension
    int r = 0;    ///< control dimension

    Matrix a_x;        ///< drift matrix, symmetric (d_w x d_w)
    Matrix b_x;        ///< control loading (d_w x r)
    Vector c_x;        ///< drift constant (d_w)
    Matrix obs_b;      ///< observation loading (d_b x d_w) -- the device precision
    Matrix obs_sigma;  ///< observation noise loading, invertible (d_b x d_b)
    Matrix f2;         ///< quadratic state cost, symmetric PSD (d_w x d_w)
    Vector f1;         ///< linear state cost (d_w)
    double f0 = 0.0;   ///< constant cost
    Matrix c2;         ///< quadratic control cost, symmetric PD (r x r)
    Vector c1;         ///< linear control cost (r)
    Vector x0;         ///< deterministic initial state (d_w)

    /// Checks dimensions and the structural invariants (a_x symmetric to
    /// 1e-12, f2 symmetric PSD, c2 symmetric PD, obs_sigma invertible).
    /// Throws ModelError on the first violation.
    void validate() const;

    bool observation_normalized(double tol = 1e-12) const;
};

/// Single assumption check with a witness (offending eigenvalues, or the rank
/// achieved vs required).
struct CheckResult {
    bool pass = false;
    std::string witness;
};

/**
 * Verdicts for every standing assumption the solvers rely on. Failures are
 * reported, never thrown. An all-pass report implies every downstream solver
 * precondition holds.
 */
struct AssumptionReport {
    CheckResult stabilisable_filter;   ///< (a_x, obs_b') stabilisable
    CheckResult f2_psd;                ///< f2 >= 0
    CheckResult control_psd;           ///< b_x c2^{-1} b_x' >= 0
    CheckResult stabilisable_control;  ///< (-a_x, b_x c2^{-1} b_x') stabilisable
    CheckResult detectable;            ///< (f2, -a_x) detectable
    CheckResult theta1_hurwitz;        ///< a_x - b_x c2^{-1} b_x' G2 Hurwitz
    CheckResult theta_stable;          ///< closed-loop joint matrix at t=inf Hurwitz
    CheckResult xi_observable;         ///< (Theta_inf, Xi_inf) controllability rank 2 d_w

    bool all_pass() const {
        return stabilisable_filter.pass && f2_psd.pass && control_psd.pass &&
               stabilisable_control.pass && detectable.pass && theta1_hurwitz.pass &&
               theta_stable.pass && xi_observable.pass;
    }
    /// Name of the first failing check, empty when all pass.
    std::string first_failure() const;
};

/**
 * Absorbs the observation noise loading into the precision: obs_b <- sigma^{-1} obs_b,
 * obs_sigma <- identity. The Receiver filtration is unchanged, so every solver
 * output is invariant under this transformation. Idempotent.
 *
 * Throws NormalizationError (carrying the offending singular value) when
 * obs_sigma is numerically singular.
 */
LQPersuasionModel normalize_observation(const LQPersuasionModel& model);

/**
 * Evaluates all standing assumptions. Stabilisability/detectability use the
 * Hautus eigenvalue test (rank [A - lambda I, B] = n for every eigenvalue with
 * nonnegative real part); observability of the noise pair uses the
 * controllability matrix rank. The Theta1/Theta checks solve the receiver ARE
 * and the filter ARE internally; if those solves fail the check reports the
 * failure as its witness. Works on non-normalized models by normalizing first
 * (verdicts are invariant under normalization).
 */
AssumptionReport assumption_report(const LQPersuasionModel& model);

/// Strict JSON schema: exactly the field names of LQPersuasionModel, matrices
/// as row-major nested arrays. Unknown keys are rejected with ConfigError.
LQPersuasionModel model_from_json_text(const std::string& text);
LQPersuasionModel model_from_json_file(const std::string& path);
std::string model_to_json_text(const LQPersuasionModel& model);

}  // namespace plq
