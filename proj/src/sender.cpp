#include "plq/sender.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "plq/threads.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace plq {

double QuadraticForm::expectation(const Vector& mean_joint, const Matrix& cov_joint) const {
    return (q * cov_joint).trace() + mean_joint.dot(q * mean_joint) + l.dot(mean_joint) + c0;
}

DeviceCost DeviceCost::reciprocal_variance(double r, double eta, double v_lo, double v_hi) {
    DeviceCost c;
    c.family = Family::reciprocal_variance;
    c.r = r;
    c.eta = eta;
    c.v_lo = v_lo;
    c.v_hi = v_hi;
    return c;
}

DeviceCost DeviceCost::log_barrier_std(double eta, double v_lo, double v_hi) {
    DeviceCost c;
    c.family = Family::log_barrier_std;
    c.eta = eta;
    c.v_lo = v_lo;
    c.v_hi = v_hi;
    return c;
}

DeviceCost DeviceCost::polynomial(std::vector<double> coeffs) {
    DeviceCost c;
    c.family = Family::polynomial;
    c.poly = std::move(coeffs);
    return c;
}

double DeviceCost::eval(double b, double variance) const {
    switch (family) {
        case Family::none:
            return 0.0;
        case Family::reciprocal_variance: {
            const double dv = v_hi - v_lo;
            if (variance <= v_lo) return std::numeric_limits<double>::infinity();
            const double z = std::min(variance, v_hi);
            return 0.5 * r * eta * (dv / (z - v_lo) - 1.0);
        }
        case Family::log_barrier_std: {
            const double dv = v_hi - v_lo;
            if (variance <= v_lo) return std::numeric_limits<double>::infinity();
            const double z = std::min(variance, v_hi);
            return -0.5 * (eta / dv) * std::log((z - v_lo) / dv);
        }
        case Family::polynomial: {
            double h = 0.0, pow_b = 1.0;
            for (double c : poly) {
                pow_b *= b;
                h += c * pow_b;
            }
            return h;
        }
    }
    return 0.0;
}

namespace {

struct PipelineLaw {
    Vector mean_joint;
    Matrix cov_joint;
    double var_x = 0.0;
};

PipelineLaw law_at_precision(const SenderScenario& scenario, double b) {
    if (!(b >= 0.0)) throw Error("sender: precision b must be nonnegative");
    const LQPersuasionModel model = scenario.model_of_b(b);
    StationaryLaw law;
    if (scenario.mode == SenderMode::mfg) {
        MfgFamily family{model, scenario.coefficient_map};
        const MfgEquilibrium eq =
            mfg_solve(family, scenario.mfg_init_m, scenario.mfg_init_w, scenario.mfg_opts);
        law = eq.law;
    } else {
        const ReceiverSolution sol = solve_receiver(model);
        law = stationary_law(model, sol);
    }
    PipelineLaw out;
    const int n = static_cast<int>(law.mean.size());
    out.mean_joint.resize(2 * n);
    out.mean_joint.head(n) = law.mean;
    out.mean_joint.tail(n) = law.mean;
    out.cov_joint = law.cov_joint;
    out.var_x = law.var_x()(0, 0);
    return out;
}

// Golden-section minimization on [lo, hi]; terminates when the bracket is
// narrower than tol. Assumes f finite on the interval.
std::pair<double, double> golden_section(const std::function<double(double)>& f, double lo,
                                         double hi, double tol) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
    }
    const double xm = 0.5 * (a + b);
    return {xm, f(xm)};
}

}  // namespace

double sender_objective(const SenderScenario& scenario, double b) {
    const PipelineLaw law = law_at_precision(scenario, b);
    return scenario.g_spec.expectation(law.mean_joint, law.cov_joint) +
           scenario.h_spec.eval(b, law.var_x);
}

double stationary_variance_at(const SenderScenario& scenario, double b) {
    return law_at_precision(scenario, b).var_x;
}

SenderResult optimize_precision(const SenderScenario& scenario, double b_max, double tol) {
    if (!(b_max > 0.0)) throw Error("optimize_precision: b_max must be positive");

    // Scan grid: b = 0 plus 200 log-spaced points over [1e-3, b_max].
    constexpr int kLogPoints = 200;
    std::vector<double> grid;
    grid.reserve(kLogPoints + 1);
    grid.push_back(0.0);
    const double lo = std::min(1e-3, b_max);
    for (int i = 0; i < kLogPoints; ++i) {
        const double t = static_cast<double>(i) / (kLogPoints - 1);
        grid.push_back(lo * std::pow(b_max / lo, t));
    }
    grid.back() = b_max;

    // Evaluations at distinct b are independent; each worker writes only its
    // own slot so the aggregation below is ordered by b and deterministic.
    std::vector<double> values(grid.size());
    std::exception_ptr failure = nullptr;
#ifdef _OPENMP
    const int workers = resolve_threads();
#pragma omp parallel for schedule(dynamic) num_threads(workers)
#endif
    for (std::size_t i = 0; i < grid.size(); ++i) {
        try {
            values[i] = sender_objective(scenario, grid[i]);
        } catch (...) {
#ifdef _OPENMP
#pragma omp critical
#endif
            if (!failure) failure = std::current_exception();
            values[i] = std::numeric_limits<double>::quiet_NaN();
        }
    }
    if (failure) std::rethrow_exception(failure);

    SenderResult result;
    result.samples.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) result.samples.emplace_back(grid[i], values[i]);

    std::size_t best = 0;
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (values[i] < values[best]) best = i;

    const auto objective = [&](double b) { return sender_objective(scenario, b); };

    // Multimodality: refine every strict interior dip and warn when two
    // non-adjacent refined minima agree to 1e-6.
    std::vector<std::size_t> dips;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i)
        if (values[i] < values[i - 1] && values[i] < values[i + 1]) dips.push_back(i);
    if (dips.size() >= 2) {
        std::vector<double> refined(dips.size());
        for (std::size_t k = 0; k < dips.size(); ++k)
            refined[k] = golden_section(objective, grid[dips[k] - 1], grid[dips[k] + 1], tol)
                             .second;
        for (std::size_t a = 0; a < dips.size() && !result.multimodal_warning; ++a)
            for (std::size_t b = a + 1; b < dips.size(); ++b)
                if (dips[b] > dips[a] + 1 && std::abs(refined[a] - refined[b]) <= 1e-6) {
                    result.multimodal_warning = true;
                    break;
                }
    }

    if (best == 0) {
        // Refine toward 0 in case the minimum is just off the boundary.
        const auto [b_ref, f_ref] = golden_section(objective, 0.0, grid[1], tol);
        if (f_ref < values[0] && b_ref > tol) {
            result.b_star = b_ref;
            result.objective_star = f_ref;
            result.flag = BoundaryFlag::interior;
        } else {
            result.b_star = 0.0;
            result.objective_star = values[0];
            result.flag = BoundaryFlag::no_information;
        }
    } else {
        const double lo_b = grid[best - 1];
        const double hi_b = (best + 1 < grid.size()) ? grid[best + 1] : b_max;
        const auto [b_ref, f_ref] = golden_section(objective, lo_b, hi_b, tol);
        result.b_star = b_ref;
        result.objective_star = f_ref;
        if (b_max - b_ref <= std::max(tol * 4.0, 1e-12 * b_max))
            result.flag = BoundaryFlag::cap;
        else
            result.flag = BoundaryFlag::interior;
        if (result.flag == BoundaryFlag::cap) {
            result.b_star = b_max;
            result.objective_star = values.back();
        }
    }
    return result;
}

double invert_variance(const SenderScenario& scenario, double z) {
    constexpr double tol_z = 1e-10;
    const double v_hi = stationary_variance_at(scenario, 0.0);
    if (z > v_hi + tol_z)
        throw OutOfRange("invert_variance: z = " + std::to_string(z) +
                         " exceeds the no-information variance " + std::to_string(v_hi));
    if (std::abs(z - v_hi) <= tol_z) return 0.0;

    // Bracket by doubling; the variance is strictly decreasing in b. Beyond
    // b ~ 1e9 it sits within ~1e-9 of the full-information floor, below the
    // resolution of the bisection tolerance.
    double lo = 0.0, hi = 1.0;
    double var_hi = stationary_variance_at(scenario, hi);
    while (var_hi > z) {
        lo = hi;
        hi *= 2.0;
        if (hi > 1e9)
            throw OutOfRange("invert_variance: z = " + std::to_string(z) +
                             " is below the full-information floor");
        var_hi = stationary_variance_at(scenario, hi);
    }
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        const double var_mid = stationary_variance_at(scenario, mid);
        if (std::abs(var_mid - z) <= tol_z) return mid;
        if (var_mid > z)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double app1_variance_rule(double k, double r, double eta, double v_lo, double v_hi) {
    if (!(k > 0.0 && r > 0.0 && eta > 0.0) || !(v_hi > v_lo))
        throw Error("app1_variance_rule: inputs must be positive with v_hi > v_lo");
    const double dv = v_hi - v_lo;
    if (k * dv <= r * eta) return v_hi;
    return v_lo + std::sqrt(r * eta * dv / k);
}

EnvelopeVerdict information_worth_it(double k, double r, double eta, double v_lo, double v_hi) {
    EnvelopeVerdict v;
    v.r_eta = r * eta;
    v.k_delta_v = k * (v_hi - v_lo);
    v.z_star = app1_variance_rule(k, r, eta, v_lo, v_hi);
    v.no_information = (v.k_delta_v <= v.r_eta);
    return v;
}

}  // namespace plq
