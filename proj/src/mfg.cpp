#include "plq/mfg.hpp"

#include <cmath>
#include <sstream>

namespace plq {

LQPersuasionModel MfgFamily::instantiate(const Vector& m, const Matrix& w) const {
    const MfgCoefficients coeffs = coefficients(m, w);
    LQPersuasionModel model = base;
    model.f1 = coeffs.f1;
    model.f2 = coeffs.f2;
    model.c_x = coeffs.c_x;
    model.validate();
    return model;
}

namespace {

double fixed_point_gap(const Vector& m, const Matrix& w, const StationaryLaw& law) {
    const double mean_gap = (m - law.mean).cwiseAbs().maxCoeff();
    const double cov_gap = (w - law.cov_joint).cwiseAbs().maxCoeff();
    return std::max(mean_gap, cov_gap);
}

StationaryLaw law_at(const MfgFamily& family, const Vector& m, const Matrix& w,
                     ReceiverSolution* sol_out, int iteration) {
    try {
        const LQPersuasionModel model = family.instantiate(m, w);
        ReceiverSolution sol = solve_receiver(model);
        StationaryLaw law = stationary_law(model, sol);
        if (sol_out) *sol_out = std::move(sol);
        return law;
    } catch (const Error& e) {
        std::ostringstream msg;
        msg << "solver failed at MFG iterate " << iteration << ": " << e.what();
        throw AssumptionViolatedAtIterate(msg.str());
    }
}

}  // namespace

MfgEquilibrium mfg_solve(const MfgFamily& family, const Vector& init_m, const Matrix& init_w,
                         const MfgOptions& opts) {
    if (!(opts.damping > 0.0 && opts.damping <= 1.0))
        throw Error("mfg_solve: damping must lie in (0, 1]");

    Vector m = init_m;
    Matrix w = init_w;
    MfgEquilibrium eq;

    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        ReceiverSolution sol;
        const StationaryLaw law = law_at(family, m, w, &sol, iter);
        const double residual = fixed_point_gap(m, w, law);
        eq.residual_history.push_back(residual);

        if (residual <= opts.tol) {
            eq.m_star = m;
            eq.w_star = w;
            eq.solution = std::move(sol);
            eq.law = law;
            eq.iterations = iter;
            eq.residual = residual;
            return eq;
        }
        m = (1.0 - opts.damping) * m + opts.damping * law.mean;
        w = (1.0 - opts.damping) * w + opts.damping * law.cov_joint;
        if (iter == opts.max_iter) {
            eq.m_star = m;
            eq.w_star = w;
            eq.solution = std::move(sol);
            eq.law = law;
            eq.iterations = iter;
            eq.residual = residual;
        }
    }

    std::ostringstream msg;
    msg << "MFG fixed point did not reach tol " << opts.tol << " in " << opts.max_iter
        << " iterations (last residual " << eq.residual << ")";
    throw NoConvergence(msg.str(), std::move(eq));
}

double mfg_residual(const MfgFamily& family, const Vector& m, const Matrix& w) {
    const StationaryLaw law = law_at(family, m, w, nullptr, 0);
    return fixed_point_gap(m, w, law);
}

}  // namespace plq
