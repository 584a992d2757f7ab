#include "plq/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "plq/rng.hpp"
#include "plq/threads.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace plq {

namespace {

// Model coefficients flattened to row-major buffers so the per-step loop is
// free of Eigen temporaries. Dimensions here are tiny (applications are 1-D);
// the cost is dominated by the RNG, so plain loops beat matrix expressions.
struct FlatModel {
    int n = 0, d_b = 0, r = 0;
    std::vector<double> a_x, b_x, c_x, x0;
    std::vector<double> fk, fc;  // feedback gain (r x n) and offset
    std::vector<double> f2, f1;
    double f0 = 0.0;
    std::vector<double> c2, c1;
    std::vector<double> obs_b;  // (d_b x n)
    bool has_g = false;
    std::vector<double> gq, gl;  // (2n x 2n), (2n)
    double gc0 = 0.0;
};

std::vector<double> flatten(const Matrix& m) {
    std::vector<double> out(static_cast<std::size_t>(m.rows()) * m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            out[static_cast<std::size_t>(i) * m.cols() + j] = m(i, j);
    return out;
}

std::vector<double> flatten(const Vector& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
}

inline void matvec(const double* m, int rows, int cols, const double* v, double* out) {
    for (int i = 0; i < rows; ++i) {
        double acc = 0.0;
        const double* row = m + static_cast<std::size_t>(i) * cols;
        for (int j = 0; j < cols; ++j) acc += row[j] * v[j];
        out[i] = acc;
    }
}

inline double quadform(const double* m, int n, const double* v) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double* row = m + static_cast<std::size_t>(i) * n;
        double partial = 0.0;
        for (int j = 0; j < n; ++j) partial += row[j] * v[j];
        acc += v[i] * partial;
    }
    return acc;
}

inline double dot(const double* a, const double* b, int n) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += a[i] * b[i];
    return acc;
}

FlatModel flatten_model(const LQPersuasionModel& model, const ReceiverSolution& sol,
                        const QuadraticForm* g) {
    FlatModel fm;
    fm.n = model.d_w;
    fm.d_b = model.d_b;
    fm.r = model.r;
    fm.a_x = flatten(model.a_x);
    fm.b_x = flatten(model.b_x);
    fm.c_x = flatten(model.c_x);
    fm.x0 = flatten(model.x0);
    fm.fk = flatten(sol.feedback_k);
    fm.fc = flatten(sol.feedback_c);
    fm.f2 = flatten(model.f2);
    fm.f1 = flatten(model.f1);
    fm.f0 = model.f0;
    fm.c2 = flatten(model.c2);
    fm.c1 = flatten(model.c1);
    fm.obs_b = flatten(model.obs_b);
    if (g) {
        if (g->q.rows() != 2 * fm.n || g->l.size() != 2 * fm.n)
            throw Error("simulate: sender integrand must act on the joint state (2 d_w)");
        fm.has_g = true;
        fm.gq = flatten(g->q);
        fm.gl = flatten(g->l);
        fm.gc0 = g->c0;
    }
    return fm;
}

struct PathOutput {
    std::vector<double> terminal_x, terminal_xhat;
    double receiver_avg = 0.0;
    double sender_avg = 0.0;
};

// One Euler-Maruyama path:
//   X    += (a_x X + b_x v + c_x) dt + dW
//   Xhat += (a_x Xhat + b_x v + c_x) dt + gain_k (obs_b (X - Xhat) dt + dB)
// with v = fk Xhat + fc and gain_k = P(t_k) obs_b' precomputed per step.
// The W stream (substream 0) consumes d_w Gaussians per step independent of
// the device precision, so equal seeds share the signal noise across b.
// On instability *error is set instead of throwing (OpenMP region safety).
PathOutput run_path(const FlatModel& fm, const std::vector<double>& gains, int n_steps,
                    const SimConfig& cfg, int path_index, Trajectory* record,
                    std::string* error) {
    const int n = fm.n, d_b = fm.d_b, r = fm.r;
    const double dt = cfg.dt;
    const int burn_start = std::min(n_steps - 1, static_cast<int>(cfg.burn_in * n_steps));
    const int avg_count = n_steps - burn_start;
    const double noise_scale = cfg.zero_noise ? 0.0 : std::sqrt(dt);

    GaussianStream w_stream(derive_stream_seed(cfg.seed, path_index, 0));
    GaussianStream b_stream(derive_stream_seed(cfg.seed, path_index, 1));

    std::vector<double> x = fm.x0, xh = fm.x0;
    std::vector<double> v(r), drift(n), obs_gap(d_b), z(2 * n), dw(n), db(d_b);
    double acc_f = 0.0, acc_g = 0.0;

    if (record) {
        record->t.push_back(0.0);
        record->x.push_back(Eigen::Map<const Vector>(x.data(), n));
        record->xhat.push_back(Eigen::Map<const Vector>(xh.data(), n));
    }

    for (int k = 0; k < n_steps; ++k) {
        matvec(fm.fk.data(), r, n, xh.data(), v.data());
        for (int i = 0; i < r; ++i) v[i] += fm.fc[i];

        if (k >= burn_start) {
            acc_f += quadform(fm.f2.data(), n, x.data()) + dot(fm.f1.data(), x.data(), n) +
                     fm.f0 + quadform(fm.c2.data(), r, v.data()) + dot(fm.c1.data(), v.data(), r);
            if (fm.has_g) {
                std::memcpy(z.data(), x.data(), sizeof(double) * n);
                std::memcpy(z.data() + n, xh.data(), sizeof(double) * n);
                acc_g += quadform(fm.gq.data(), 2 * n, z.data()) +
                         dot(fm.gl.data(), z.data(), 2 * n) + fm.gc0;
            }
        }

        for (int i = 0; i < n; ++i) dw[i] = noise_scale * w_stream.next();
        for (int i = 0; i < d_b; ++i) db[i] = noise_scale * b_stream.next();
        if (record) record->dw.push_back(Eigen::Map<const Vector>(dw.data(), n));

        // innovation increment obs_b (X - Xhat) dt + dB
        for (int i = 0; i < d_b; ++i) {
            double acc = 0.0;
            const double* row = fm.obs_b.data() + static_cast<std::size_t>(i) * n;
            for (int j = 0; j < n; ++j) acc += row[j] * (x[j] - xh[j]);
            obs_gap[i] = acc * dt + db[i];
        }

        // X update
        matvec(fm.a_x.data(), n, n, x.data(), drift.data());
        for (int i = 0; i < n; ++i) {
            double ctrl = 0.0;
            const double* row = fm.b_x.data() + static_cast<std::size_t>(i) * r;
            for (int j = 0; j < r; ++j) ctrl += row[j] * v[j];
            x[i] += (drift[i] + ctrl + fm.c_x[i]) * dt + dw[i];
        }

        // Xhat update with the step's filter gain
        matvec(fm.a_x.data(), n, n, xh.data(), drift.data());
        const double* gain = gains.data() + static_cast<std::size_t>(k) * n * d_b;
        for (int i = 0; i < n; ++i) {
            double ctrl = 0.0;
            const double* row = fm.b_x.data() + static_cast<std::size_t>(i) * r;
            for (int j = 0; j < r; ++j) ctrl += row[j] * v[j];
            double filt = 0.0;
            const double* grow = gain + static_cast<std::size_t>(i) * d_b;
            for (int j = 0; j < d_b; ++j) filt += grow[j] * obs_gap[j];
            xh[i] += (drift[i] + ctrl + fm.c_x[i]) * dt + filt;
        }

        for (int i = 0; i < n; ++i) {
            if (!(std::abs(x[i]) <= 1e8)) {
                std::ostringstream msg;
                msg << "path " << path_index << " unstable at t = " << (k + 1) * dt
                    << " (|X| > 1e8; check feedback signs)";
                *error = msg.str();
                return {};
            }
        }

        if (record) {
            record->t.push_back((k + 1) * dt);
            record->x.push_back(Eigen::Map<const Vector>(x.data(), n));
            record->xhat.push_back(Eigen::Map<const Vector>(xh.data(), n));
        }
    }

    PathOutput out;
    out.terminal_x = x;
    out.terminal_xhat = xh;
    out.receiver_avg = acc_f / avg_count;
    out.sender_avg = fm.has_g ? acc_g / avg_count : 0.0;
    return out;
}

void validate_config(const SimConfig& cfg) {
    if (!(cfg.dt > 0.0) || !(cfg.horizon > 0.0) || cfg.dt > cfg.horizon)
        throw Error("simulate: need 0 < dt <= horizon");
    if (cfg.n_paths < 1) throw Error("simulate: n_paths must be >= 1");
    if (!(cfg.burn_in >= 0.0 && cfg.burn_in < 1.0))
        throw Error("simulate: burn_in must lie in [0, 1)");
}

int step_count(const SimConfig& cfg) {
    return std::max(1, static_cast<int>(std::llround(cfg.horizon / cfg.dt)));
}

// P(t_k) obs_b' for every step, shared by all paths.
std::vector<double> precompute_gains(const LQPersuasionModel& model, const RiccatiPath& riccati,
                                     const SimConfig& cfg, int n_steps) {
    if (riccati.t_grid.empty() || riccati.values.empty())
        throw Error("simulate: empty Riccati path");
    if (riccati.t_grid.back() + 1e-9 < cfg.horizon - cfg.dt)
        throw Error("simulate: Riccati path does not cover the horizon");
    const int n = model.d_w, d_b = model.d_b;
    std::vector<double> gains(static_cast<std::size_t>(n_steps) * n * d_b);
    for (int k = 0; k < n_steps; ++k) {
        const Matrix gain = riccati.at_step(k * cfg.dt) * model.obs_b.transpose();
        double* dst = gains.data() + static_cast<std::size_t>(k) * n * d_b;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < d_b; ++j) dst[static_cast<std::size_t>(i) * d_b + j] = gain(i, j);
    }
    return gains;
}

SimStats collect(const FlatModel& fm, std::vector<PathOutput>& outs, const SimConfig& cfg,
                 int n_steps) {
    SimStats stats;
    stats.n_paths = cfg.n_paths;
    stats.n_steps = n_steps;
    stats.dt = cfg.dt;
    stats.terminal_x.reserve(outs.size());
    stats.terminal_xhat.reserve(outs.size());
    stats.receiver_avg.reserve(outs.size());
    stats.sender_avg.reserve(outs.size());
    stats.path_seeds.reserve(outs.size());
    for (std::size_t p = 0; p < outs.size(); ++p) {
        stats.terminal_x.push_back(Eigen::Map<const Vector>(outs[p].terminal_x.data(), fm.n));
        stats.terminal_xhat.push_back(
            Eigen::Map<const Vector>(outs[p].terminal_xhat.data(), fm.n));
        stats.receiver_avg.push_back(outs[p].receiver_avg);
        stats.sender_avg.push_back(outs[p].sender_avg);
        stats.path_seeds.push_back(derive_stream_seed(cfg.seed, p, 0));
    }
    return stats;
}

// Pairwise summation: deterministic (index order only) and accurate.
double pairwise_sum(const double* data, std::size_t count) {
    if (count <= 4) {
        double acc = 0.0;
        for (std::size_t i = 0; i < count; ++i) acc += data[i];
        return acc;
    }
    const std::size_t half = count / 2;
    return pairwise_sum(data, half) + pairwise_sum(data + half, count - half);
}

double pairwise_mean(const std::vector<double>& v) {
    return pairwise_sum(v.data(), v.size()) / static_cast<double>(v.size());
}

}  // namespace

Vector SimStats::terminal_mean_x() const {
    const int n = static_cast<int>(terminal_x.front().size());
    Vector mean(n);
    std::vector<double> comp(terminal_x.size());
    for (int i = 0; i < n; ++i) {
        for (std::size_t p = 0; p < terminal_x.size(); ++p) comp[p] = terminal_x[p](i);
        mean(i) = pairwise_mean(comp);
    }
    return mean;
}

Vector SimStats::terminal_mean_xhat() const {
    const int n = static_cast<int>(terminal_xhat.front().size());
    Vector mean(n);
    std::vector<double> comp(terminal_xhat.size());
    for (int i = 0; i < n; ++i) {
        for (std::size_t p = 0; p < terminal_xhat.size(); ++p) comp[p] = terminal_xhat[p](i);
        mean(i) = pairwise_mean(comp);
    }
    return mean;
}

Matrix SimStats::terminal_cov_joint() const {
    const int n = static_cast<int>(terminal_x.front().size());
    const std::size_t paths = terminal_x.size();
    const Vector mx = terminal_mean_x();
    const Vector mxh = terminal_mean_xhat();
    Matrix cov(2 * n, 2 * n);
    std::vector<double> prod(paths);
    for (int i = 0; i < 2 * n; ++i) {
        for (int j = i; j < 2 * n; ++j) {
            for (std::size_t p = 0; p < paths; ++p) {
                const double zi = i < n ? terminal_x[p](i) - mx(i) : terminal_xhat[p](i - n) - mxh(i - n);
                const double zj = j < n ? terminal_x[p](j) - mx(j) : terminal_xhat[p](j - n) - mxh(j - n);
                prod[p] = zi * zj;
            }
            const double c = pairwise_sum(prod.data(), paths) / static_cast<double>(paths - 1);
            cov(i, j) = c;
            cov(j, i) = c;
        }
    }
    return cov;
}

SimStats simulate(const LQPersuasionModel& model, const ReceiverSolution& sol,
                  const RiccatiPath& riccati, const SimConfig& cfg, const QuadraticForm* g,
                  int n_threads) {
    validate_config(cfg);
    model.validate();
    const int n_steps = step_count(cfg);
    const FlatModel fm = flatten_model(model, sol, g);
    const std::vector<double> gains = precompute_gains(model, riccati, cfg, n_steps);

    std::vector<PathOutput> outs(cfg.n_paths);
    std::vector<std::string> errors(cfg.n_paths);
    const int workers = resolve_threads(n_threads);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) num_threads(workers)
#endif
    for (int p = 0; p < cfg.n_paths; ++p)
        outs[p] = run_path(fm, gains, n_steps, cfg, p, nullptr, &errors[p]);
    (void)workers;

    for (const auto& err : errors)
        if (!err.empty()) throw UnstablePath(err);
    return collect(fm, outs, cfg, n_steps);
}

SimStats simulate_reference(const LQPersuasionModel& model, const ReceiverSolution& sol,
                            const RiccatiPath& riccati, const SimConfig& cfg,
                            const QuadraticForm* g) {
    validate_config(cfg);
    model.validate();
    const int n_steps = step_count(cfg);
    const FlatModel fm = flatten_model(model, sol, g);
    const std::vector<double> gains = precompute_gains(model, riccati, cfg, n_steps);

    std::vector<PathOutput> outs(cfg.n_paths);
    for (int p = 0; p < cfg.n_paths; ++p) {
        std::string err;
        outs[p] = run_path(fm, gains, n_steps, cfg, p, nullptr, &err);
        if (!err.empty()) throw UnstablePath(err);
    }
    return collect(fm, outs, cfg, n_steps);
}

std::pair<double, double> ergodic_estimate(const SimStats& stats, ErgodicTarget which) {
    const std::vector<double>& per_path =
        which == ErgodicTarget::receiver ? stats.receiver_avg : stats.sender_avg;
    const std::size_t n = per_path.size();
    const double mean = pairwise_mean(per_path);
    if (n < 2) return {mean, 0.0};
    std::vector<double> sq(n);
    for (std::size_t i = 0; i < n; ++i) sq[i] = (per_path[i] - mean) * (per_path[i] - mean);
    const double var = pairwise_sum(sq.data(), n) / static_cast<double>(n - 1);
    return {mean, std::sqrt(var / static_cast<double>(n))};
}

Trajectory simulate_path(const LQPersuasionModel& model, const ReceiverSolution& sol,
                         const RiccatiPath& riccati, const SimConfig& cfg, int path_index) {
    validate_config(cfg);
    model.validate();
    const int n_steps = step_count(cfg);
    const FlatModel fm = flatten_model(model, sol, nullptr);
    const std::vector<double> gains = precompute_gains(model, riccati, cfg, n_steps);

    Trajectory traj;
    traj.t.reserve(n_steps + 1);
    traj.x.reserve(n_steps + 1);
    traj.xhat.reserve(n_steps + 1);
    traj.dw.reserve(n_steps);
    std::string err;
    run_path(fm, gains, n_steps, cfg, path_index, &traj, &err);
    if (!err.empty()) throw UnstablePath(err);
    return traj;
}

}  // namespace plq
