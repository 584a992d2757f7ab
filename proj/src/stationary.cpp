#include "plq/stationary.hpp"

#include <Eigen/LU>
#include <cmath>

namespace plq {

Matrix ClosedLoopSystem::theta(double t) const {
    const int n = dim();
    const Matrix pt_btb = riccati.interpolate(t) * btb;
    Matrix out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = a_x;
    out.topRightCorner(n, n) = -dg2;
    out.bottomLeftCorner(n, n) = pt_btb;
    out.bottomRightCorner(n, n) = a_x - dg2 - pt_btb;
    return out;
}

Matrix ClosedLoopSystem::theta_limit() const {
    const int n = dim();
    const Matrix p_btb = riccati.limit * btb;
    Matrix out(2 * n, 2 * n);
    out.topLeftCorner(n, n) = a_x;
    out.topRightCorner(n, n) = -dg2;
    out.bottomLeftCorner(n, n) = p_btb;
    out.bottomRightCorner(n, n) = a_x - dg2 - p_btb;
    return out;
}

Matrix ClosedLoopSystem::xi(double t) const {
    const int n = dim();
    const int d_b = static_cast<int>(obs_b.rows());
    Matrix out = Matrix::Zero(2 * n, n + d_b);
    out.topLeftCorner(n, n) = Matrix::Identity(n, n);
    out.bottomRightCorner(n, d_b) = riccati.interpolate(t) * obs_b.transpose();
    return out;
}

Matrix ClosedLoopSystem::xi_limit() const {
    const int n = dim();
    const int d_b = static_cast<int>(obs_b.rows());
    Matrix out = Matrix::Zero(2 * n, n + d_b);
    out.topLeftCorner(n, n) = Matrix::Identity(n, n);
    out.bottomRightCorner(n, d_b) = riccati.limit * obs_b.transpose();
    return out;
}

Vector ClosedLoopSystem::vartheta() const {
    const int n = dim();
    Vector out(2 * n);
    out.head(n) = theta_shift;
    out.tail(n) = theta_shift;
    return out;
}

ClosedLoopSystem closed_loop_system(const LQPersuasionModel& model, const ReceiverSolution& sol,
                                    RiccatiPath riccati) {
    const Matrix c2inv = model.c2.llt().solve(Matrix::Identity(model.r, model.r));
    ClosedLoopSystem sys;
    sys.a_x = model.a_x;
    sys.dg2 = model.b_x * c2inv * model.b_x.transpose() * sol.g2;
    sys.btb = model.obs_b.transpose() * model.obs_b;
    sys.obs_b = model.obs_b;
    sys.theta_shift =
        -0.5 * model.b_x * c2inv * (model.b_x.transpose() * sol.g1 + model.c1) + model.c_x;
    sys.riccati = std::move(riccati);
    return sys;
}

StationaryLaw stationary_law(const LQPersuasionModel& model, const ReceiverSolution& sol) {
    // A degenerate one-point path is enough here: only the limit matters.
    RiccatiPath limit_path;
    limit_path.t_grid = {0.0};
    limit_path.values = {sol.p_limit};
    limit_path.limit = sol.p_limit;
    const ClosedLoopSystem sys = closed_loop_system(model, sol, std::move(limit_path));

    const Matrix theta1 = sys.theta1();
    if (!is_hurwitz(theta1))
        throw ThetaNotHurwitz("Theta1 is not Hurwitz; stationary mean does not exist");

    StationaryLaw law;
    law.mean = -theta1.partialPivLu().solve(sys.theta_shift);
    const Matrix xi_inf = sys.xi_limit();
    law.cov_joint = solve_lyapunov(sys.theta_limit(), xi_inf * xi_inf.transpose());
    law.p_limit = sol.p_limit;
    return law;
}

MomentPaths integrate_moment_odes(const LQPersuasionModel& model, const ReceiverSolution& sol,
                                  const RiccatiPath& riccati, const std::vector<double>& t_grid,
                                  double max_step) {
    if (t_grid.empty() || t_grid.front() != 0.0)
        throw Error("integrate_moment_odes: t_grid must start at 0");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw Error("integrate_moment_odes: t_grid must be strictly increasing");

    const ClosedLoopSystem sys = closed_loop_system(model, sol, riccati);
    const int n = model.d_w;
    const Matrix theta1 = sys.theta1();
    const Vector shift = sys.theta_shift;

    const auto mean_rhs = [&](const Vector& m) -> Vector { return theta1 * m + shift; };
    const auto cov_rhs = [&](double t, const Matrix& w) -> Matrix {
        const Matrix th = sys.theta(t);
        const Matrix xi = sys.xi(t);
        return w * th.transpose() + th * w + xi * xi.transpose();
    };

    MomentPaths paths;
    paths.t_grid = t_grid;
    Vector m = model.x0;
    Matrix w = Matrix::Zero(2 * n, 2 * n);
    paths.mean.push_back(m);
    paths.cov.push_back(w);

    for (std::size_t seg = 1; seg < t_grid.size(); ++seg) {
        const double span = t_grid[seg] - t_grid[seg - 1];
        const int substeps = std::max(1, static_cast<int>(std::ceil(span / max_step - 1e-12)));
        const double h = span / substeps;
        double t = t_grid[seg - 1];
        for (int s = 0; s < substeps; ++s) {
            const Vector mk1 = mean_rhs(m);
            const Vector mk2 = mean_rhs(m + 0.5 * h * mk1);
            const Vector mk3 = mean_rhs(m + 0.5 * h * mk2);
            const Vector mk4 = mean_rhs(m + h * mk3);
            m += (h / 6.0) * (mk1 + 2.0 * mk2 + 2.0 * mk3 + mk4);

            const Matrix wk1 = cov_rhs(t, w);
            const Matrix wk2 = cov_rhs(t + 0.5 * h, w + 0.5 * h * wk1);
            const Matrix wk3 = cov_rhs(t + 0.5 * h, w + 0.5 * h * wk2);
            const Matrix wk4 = cov_rhs(t + h, w + h * wk3);
            w += (h / 6.0) * (wk1 + 2.0 * wk2 + 2.0 * wk3 + wk4);
            t += h;

            const double asym = (w - w.transpose()).cwiseAbs().maxCoeff();
            if (!w.allFinite() || !m.allFinite() || asym > 1e-8)
                throw StepSizeTooCoarse("moment ODE drift at t = " + std::to_string(t));
            w = 0.5 * (w + w.transpose());
            if (min_symmetric_eigenvalue(w) < -1e-8)
                throw StepSizeTooCoarse("moment ODE covariance lost PSD at t = " +
                                        std::to_string(t));
        }
        paths.mean.push_back(m);
        paths.cov.push_back(w);
    }
    return paths;
}

}  // namespace plq
