#include "plq/algebra.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <sstream>

namespace plq {

namespace {

double care_residual_norm(const CareProblem& pb, const Matrix& p) {
    return (pb.a.transpose() * p + p * pb.a - p * pb.d * p + pb.q).norm();
}

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

// 1x1 case: d P^2 - 2 a P - q = 0; the root with a - d P < 0 stabilizes.
// The conjugate form q / (sqrt(a^2 + dq) - a) avoids cancellation when a < 0
// and dq << a^2 (small device precision).
Matrix solve_care_scalar(const CareProblem& pb) {
    const double a = pb.a(0, 0), d = pb.d(0, 0), q = pb.q(0, 0);
    double p;
    if (d <= 0.0) {
        if (!(a < 0.0))
            throw NoStabilizingSolution("scalar CARE with d = 0 requires a < 0, got a = " +
                                        std::to_string(a));
        p = -q / (2.0 * a);
    } else {
        const double disc = a * a + d * q;
        if (disc < 0.0) throw NoStabilizingSolution("scalar CARE discriminant negative");
        const double root = std::sqrt(disc);
        p = a <= 0.0 ? q / (root - a) : (a + root) / d;
        if (!(a - d * p < 0.0))
            throw NoStabilizingSolution("scalar CARE has no root with a - dP < 0");
    }
    Matrix out(1, 1);
    out(0, 0) = p;
    return out;
}

// Bass construction: with rho > ||A||, the solution Z of
// (A + rho I) Z + Z (A + rho I)' = 2 D satisfies
// (A - D Z^{-1}) Z + Z (A - D Z^{-1})' = -2 rho Z, so A - D Z^{-1} is Hurwitz
// whenever Z is invertible. Stabilisable-but-uncontrollable pairs can make Z
// singular; a small ridge restores invertibility (stable modes tolerate it).
Matrix stabilizing_start(const Matrix& a, const Matrix& d) {
    const int n = static_cast<int>(a.rows());
    if (is_hurwitz(a)) return Matrix::Zero(n, n);
    const double rho = a.norm() + 1.0;
    const Matrix m = -(a + rho * Matrix::Identity(n, n));
    const Matrix z = solve_lyapunov(m, 2.0 * d);
    for (double ridge : {0.0, 1e-12, 1e-8, 1e-4, 1.0}) {
        const Matrix z_reg = z + ridge * Matrix::Identity(n, n);
        Eigen::FullPivLU<Matrix> lu(z_reg);
        if (!lu.isInvertible()) continue;
        const Matrix p0 = symmetrize(lu.inverse());
        if (is_hurwitz(a - d * p0)) return p0;
    }
    throw NoStabilizingSolution("no stabilizing initial guess found (pair not stabilisable?)");
}

}  // namespace

Matrix solve_care(const CareProblem& problem) {
    const int n = static_cast<int>(problem.a.rows());
    if (problem.a.cols() != n || problem.d.rows() != n || problem.d.cols() != n ||
        problem.q.rows() != n || problem.q.cols() != n)
        throw Error("solve_care: inconsistent dimensions");

    Matrix p;
    if (n == 1) {
        p = solve_care_scalar(problem);
    } else {
        // Newton-Kleinman: P_{k+1} solves the Lyapunov equation
        // (A - D P_k)' P + P (A - D P_k) + P_k D P_k + Q = 0.
        // Quadratic convergence, stabilizing at every step.
        p = stabilizing_start(problem.a, problem.d);
        double res = care_residual_norm(problem, p);
        for (int iter = 0; iter < 60; ++iter) {
            const Matrix closed = problem.a - problem.d * p;
            const Matrix next = symmetrize(
                solve_lyapunov(closed.transpose(), p * problem.d * p + problem.q));
            const double next_res = care_residual_norm(problem, next);
            const double step = (next - p).norm();
            p = next;
            res = next_res;
            if (step <= 1e-15 * (1.0 + p.norm()) || res <= 1e-14 * (1.0 + p.squaredNorm()))
                break;
        }
    }

    const double res = care_residual_norm(problem, p);
    const double tol = 1e-10 * (1.0 + p.squaredNorm());
    if (!(res <= tol)) {
        std::ostringstream msg;
        msg << "CARE residual " << res << " exceeds " << tol;
        throw ResidualTooLarge(msg.str());
    }
    if (!is_hurwitz(problem.a - problem.d * p))
        throw NoStabilizingSolution("CARE solution does not make A - DP Hurwitz");
    return symmetrize(p);
}

Matrix solve_lyapunov(const Matrix& theta, const Matrix& q) {
    const int n = static_cast<int>(theta.rows());
    if (theta.cols() != n || q.rows() != n || q.cols() != n)
        throw Error("solve_lyapunov: inconsistent dimensions");
    if (!is_hurwitz(theta))
        throw ThetaNotHurwitz("Lyapunov coefficient is not Hurwitz (max Re eig = " +
                              std::to_string(max_real_eigenvalue(theta)) + ")");

    // vec(theta w + w theta') = (I (x) theta + theta (x) I) vec(w) = -vec(q)
    Matrix kron = Matrix::Zero(n * n, n * n);
    for (int i = 0; i < n; ++i)
        kron.block(i * n, i * n, n, n) += theta;  // I (x) theta
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            for (int k = 0; k < n; ++k) kron(j * n + k, i * n + k) += theta(j, i);  // theta (x) I

    Vector rhs(n * n);
    for (int col = 0; col < n; ++col)
        for (int row = 0; row < n; ++row) rhs(col * n + row) = -q(row, col);

    Eigen::PartialPivLU<Matrix> lu(kron);
    const Vector wvec = lu.solve(rhs);
    if (!wvec.allFinite()) throw SingularSystem("vectorized Lyapunov system is singular");

    Matrix w(n, n);
    for (int col = 0; col < n; ++col)
        for (int row = 0; row < n; ++row) w(row, col) = wvec(col * n + row);
    w = symmetrize(w);

    // Backward-error scaling: the plain 1e-11 (1 + |w|) bound is unreachable
    // once |theta| is large (LU round-off alone is eps |theta| |w|).
    const double res = (w * theta.transpose() + theta * w + q).norm();
    if (!(res <= 1e-11 * (1.0 + w.norm()) * (1.0 + theta.norm()) + 1e-13 * q.norm())) {
        std::ostringstream msg;
        msg << "Lyapunov residual " << res << " too large for |w| = " << w.norm();
        throw SingularSystem(msg.str());
    }
    return w;
}

const Matrix& RiccatiPath::at_step(double t) const {
    const auto it = std::upper_bound(t_grid.begin(), t_grid.end(), t);
    if (it == t_grid.begin()) return values.front();
    const std::size_t idx = static_cast<std::size_t>(it - t_grid.begin()) - 1;
    return values[idx];
}

Matrix RiccatiPath::interpolate(double t) const {
    if (t <= t_grid.front()) return values.front();
    if (t >= t_grid.back()) return values.back();
    const auto it = std::upper_bound(t_grid.begin(), t_grid.end(), t);
    const std::size_t hi = static_cast<std::size_t>(it - t_grid.begin());
    const std::size_t lo = hi - 1;
    const double span = t_grid[hi] - t_grid[lo];
    const double alpha = (t - t_grid[lo]) / span;
    return (1.0 - alpha) * values[lo] + alpha * values[hi];
}

RiccatiPath integrate_riccati_ode(const Matrix& a, const Matrix& obs_b, const Matrix& p0,
                                  const std::vector<double>& t_grid, double max_step) {
    if (t_grid.size() < 1 || t_grid.front() != 0.0)
        throw Error("integrate_riccati_ode: t_grid must start at 0");
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw Error("integrate_riccati_ode: t_grid must be strictly increasing");
    if (!(max_step > 0.0)) throw Error("integrate_riccati_ode: max_step must be positive");
    const int n = static_cast<int>(a.rows());
    if (min_symmetric_eigenvalue(p0) < -1e-10)
        throw Error("integrate_riccati_ode: p0 must be PSD");

    const Matrix btb = obs_b.transpose() * obs_b;
    const Matrix id = Matrix::Identity(n, n);
    const auto rhs = [&](const Matrix& p) -> Matrix {
        return a * p + p * a.transpose() - p * btb * p + id;
    };

    RiccatiPath path;
    path.t_grid = t_grid;
    path.values.reserve(t_grid.size());
    Matrix p = symmetrize(p0);
    path.values.push_back(p);

    for (std::size_t seg = 1; seg < t_grid.size(); ++seg) {
        const double span = t_grid[seg] - t_grid[seg - 1];
        const int substeps = std::max(1, static_cast<int>(std::ceil(span / max_step - 1e-12)));
        const double h = span / substeps;
        for (int s = 0; s < substeps; ++s) {
            const Matrix k1 = rhs(p);
            const Matrix k2 = rhs(p + 0.5 * h * k1);
            const Matrix k3 = rhs(p + 0.5 * h * k2);
            const Matrix k4 = rhs(p + h * k3);
            p += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            const double asym = (p - p.transpose()).cwiseAbs().maxCoeff();
            if (!p.allFinite() || asym > 1e-8)
                throw StepSizeTooCoarse("Riccati RK4 symmetry drift " + std::to_string(asym) +
                                        " at t = " + std::to_string(t_grid[seg - 1] + (s + 1) * h));
            p = symmetrize(p);
            if (min_symmetric_eigenvalue(p) < -1e-8)
                throw StepSizeTooCoarse("Riccati RK4 lost positive semi-definiteness at t = " +
                                        std::to_string(t_grid[seg - 1] + (s + 1) * h));
        }
        path.values.push_back(p);
    }

    path.limit = solve_care({a.transpose(), btb, id});
    return path;
}

}  // namespace plq
