#include "plq/model.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "plq/algebra.hpp"

using nlohmann::json;

namespace plq {

namespace {

constexpr double kSymmetryTol = 1e-12;
constexpr double kPsdTol = 1e-10;

std::string dims(const Matrix& m) {
    return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

void require_shape(const Matrix& m, int rows, int cols, const char* name) {
    if (m.rows() != rows || m.cols() != cols)
        throw ModelError(std::string(name) + " has shape " + dims(m) + ", expected " +
                         std::to_string(rows) + "x" + std::to_string(cols));
}

void require_size(const Vector& v, int n, const char* name) {
    if (v.size() != n)
        throw ModelError(std::string(name) + " has size " + std::to_string(v.size()) +
                         ", expected " + std::to_string(n));
}

std::string eigenvalue_witness(const Matrix& m) {
    Eigen::EigenSolver<Matrix> es(m, false);
    std::ostringstream out;
    out << "eigenvalue real parts:";
    for (int i = 0; i < es.eigenvalues().size(); ++i) out << ' ' << es.eigenvalues()[i].real();
    return out.str();
}

int rank_of(const Eigen::MatrixXcd& m) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(m);
    qr.setThreshold(1e-10);
    return static_cast<int>(qr.rank());
}

// Hautus test: (A, B) is stabilisable iff rank [A - lambda I, B] = n for every
// eigenvalue lambda of A with nonnegative real part.
CheckResult hautus_stabilisable(const Matrix& a, const Matrix& b) {
    const int n = static_cast<int>(a.rows());
    Eigen::EigenSolver<Matrix> es(a, false);
    for (int i = 0; i < n; ++i) {
        const std::complex<double> lambda = es.eigenvalues()[i];
        if (lambda.real() < -1e-12 * std::max(1.0, a.norm())) continue;
        Eigen::MatrixXcd pencil(n, n + b.cols());
        pencil.leftCols(n) = a.cast<std::complex<double>>();
        pencil.leftCols(n).diagonal().array() -= lambda;
        pencil.rightCols(b.cols()) = b.cast<std::complex<double>>();
        const int rank = rank_of(pencil);
        if (rank < n) {
            std::ostringstream out;
            out << "Hautus rank " << rank << " of " << n << " at eigenvalue " << lambda.real();
            if (lambda.imag() != 0.0) out << (lambda.imag() > 0 ? "+" : "") << lambda.imag() << "i";
            return {false, out.str()};
        }
    }
    return {true, "Hautus rank full at every eigenvalue with nonnegative real part"};
}

CheckResult psd_check(const Matrix& m, const char* label) {
    const double min_eig = min_symmetric_eigenvalue(m);
    std::ostringstream out;
    out << label << " min eigenvalue " << min_eig;
    return {min_eig >= -kPsdTol, out.str()};
}

CheckResult hurwitz_check(const Matrix& m) {
    const double max_re = max_real_eigenvalue(m);
    std::ostringstream out;
    out << "max real part " << max_re;
    return {max_re < -1e-12 * std::max(1.0, m.norm()), out.str()};
}

// Controllability of (theta, xi): rank [Xi, Theta Xi, ..., Theta^{n-1} Xi] = n.
CheckResult controllability_check(const Matrix& theta, const Matrix& xi) {
    const int n = static_cast<int>(theta.rows());
    const int p = static_cast<int>(xi.cols());
    Matrix gamma(n, n * p);
    Matrix block = xi;
    for (int k = 0; k < n; ++k) {
        gamma.middleCols(k * p, p) = block;
        block = theta * block;
    }
    Eigen::ColPivHouseholderQR<Matrix> qr(gamma);
    qr.setThreshold(1e-10);
    const int rank = static_cast<int>(qr.rank());
    std::ostringstream out;
    out << "controllability rank " << rank << " of " << n;
    return {rank == n, out.str()};
}

Matrix json_to_matrix(const json& j, const char* name) {
    if (!j.is_array() || j.empty() || !j[0].is_array())
        throw ConfigError(std::string(name) + ": expected a row-major nested array");
    const int rows = static_cast<int>(j.size());
    const int cols = static_cast<int>(j[0].size());
    Matrix m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (!j[i].is_array() || static_cast<int>(j[i].size()) != cols)
            throw ConfigError(std::string(name) + ": ragged rows");
        for (int k = 0; k < cols; ++k) {
            if (!j[i][k].is_number()) throw ConfigError(std::string(name) + ": non-numeric entry");
            m(i, k) = j[i][k].get<double>();
        }
    }
    return m;
}

Vector json_to_vector(const json& j, const char* name) {
    if (!j.is_array()) throw ConfigError(std::string(name) + ": expected an array");
    Vector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        if (!j[i].is_number()) throw ConfigError(std::string(name) + ": non-numeric entry");
        v(static_cast<int>(i)) = j[i].get<double>();
    }
    return v;
}

json matrix_to_json(const Matrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
        rows.push_back(row);
    }
    return rows;
}

json vector_to_json(const Vector& v) {
    json arr = json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

}  // namespace

void LQPersuasionModel::validate() const {
    if (d_w <= 0 || d_b <= 0 || r <= 0)
        throw ModelError("dimensions d_w, d_b, r must be positive");
    require_shape(a_x, d_w, d_w, "a_x");
    require_shape(b_x, d_w, r, "b_x");
    require_size(c_x, d_w, "c_x");
    require_shape(obs_b, d_b, d_w, "obs_b");
    require_shape(obs_sigma, d_b, d_b, "obs_sigma");
    require_shape(f2, d_w, d_w, "f2");
    require_size(f1, d_w, "f1");
    require_shape(c2, r, r, "c2");
    require_size(c1, r, "c1");
    require_size(x0, d_w, "x0");

    if ((a_x - a_x.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol)
        throw ModelError("a_x is not symmetric within 1e-12");
    if ((f2 - f2.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol)
        throw ModelError("f2 is not symmetric within 1e-12");
    if ((c2 - c2.transpose()).cwiseAbs().maxCoeff() > kSymmetryTol)
        throw ModelError("c2 is not symmetric within 1e-12");
    if (min_symmetric_eigenvalue(f2) < -kPsdTol)
        throw ModelError("f2 is not positive semi-definite");
    if (min_symmetric_eigenvalue(c2) <= kPsdTol)
        throw ModelError("c2 is not positive definite");

    Eigen::JacobiSVD<Matrix> svd(obs_sigma);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (!(smin > 0.0) || smax / smin > 1e14)
        throw ModelError("obs_sigma is numerically singular (condition number not finite)");
}

bool LQPersuasionModel::observation_normalized(double tol) const {
    return (obs_sigma - Matrix::Identity(d_b, d_b)).cwiseAbs().maxCoeff() <= tol;
}

LQPersuasionModel normalize_observation(const LQPersuasionModel& model) {
    if (model.observation_normalized()) return model;
    Eigen::JacobiSVD<Matrix> svd(model.obs_sigma, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const double smin = svd.singularValues().minCoeff();
    const double smax = svd.singularValues().maxCoeff();
    if (!(smin > 1e-14 * std::max(1.0, smax)))
        throw NormalizationError(
            "obs_sigma is singular: smallest singular value " + std::to_string(smin), smin);
    LQPersuasionModel out = model;
    out.obs_b = svd.solve(model.obs_b);
    out.obs_sigma = Matrix::Identity(model.d_b, model.d_b);
    return out;
}

std::string AssumptionReport::first_failure() const {
    if (!stabilisable_filter.pass) return "stabilisable_filter";
    if (!f2_psd.pass) return "f2_psd";
    if (!control_psd.pass) return "control_psd";
    if (!stabilisable_control.pass) return "stabilisable_control";
    if (!detectable.pass) return "detectable";
    if (!theta1_hurwitz.pass) return "theta1_hurwitz";
    if (!theta_stable.pass) return "theta_stable";
    if (!xi_observable.pass) return "xi_observable";
    return {};
}

AssumptionReport assumption_report(const LQPersuasionModel& raw) {
    const LQPersuasionModel model =
        raw.observation_normalized() ? raw : normalize_observation(raw);

    AssumptionReport rep;
    rep.stabilisable_filter = hautus_stabilisable(model.a_x, model.obs_b.transpose());
    rep.f2_psd = psd_check(model.f2, "f2");

    const Matrix c2_inv = model.c2.llt().solve(Matrix::Identity(model.r, model.r));
    const Matrix d = model.b_x * c2_inv * model.b_x.transpose();
    rep.control_psd = psd_check(d, "b_x c2^{-1} b_x'");
    rep.stabilisable_control = hautus_stabilisable(-model.a_x, d);
    rep.detectable = hautus_stabilisable(-model.a_x.transpose(), model.f2.transpose());

    // The remaining checks need G2 and P(inf); a failed solve is itself a
    // reported failure, never an exception.
    Matrix g2, p_inf;
    bool have_g2 = false, have_p = false;
    std::string g2_error, p_error;
    try {
        g2 = solve_care({model.a_x, d, model.f2});
        have_g2 = true;
    } catch (const Error& e) {
        g2_error = e.what();
    }
    try {
        p_inf = solve_care({model.a_x.transpose(), model.obs_b.transpose() * model.obs_b,
                            Matrix::Identity(model.d_w, model.d_w)});
        have_p = true;
    } catch (const Error& e) {
        p_error = e.what();
    }

    if (have_g2) {
        rep.theta1_hurwitz = hurwitz_check(model.a_x - d * g2);
    } else {
        rep.theta1_hurwitz = {false, "receiver ARE failed: " + g2_error};
    }

    if (have_g2 && have_p) {
        const int n = model.d_w;
        const Matrix btb = model.obs_b.transpose() * model.obs_b;
        Matrix theta_inf(2 * n, 2 * n);
        theta_inf.topLeftCorner(n, n) = model.a_x;
        theta_inf.topRightCorner(n, n) = -d * g2;
        theta_inf.bottomLeftCorner(n, n) = p_inf * btb;
        theta_inf.bottomRightCorner(n, n) = model.a_x - d * g2 - p_inf * btb;
        Matrix xi_inf = Matrix::Zero(2 * n, n + model.d_b);
        xi_inf.topLeftCorner(n, n) = Matrix::Identity(n, n);
        xi_inf.bottomRightCorner(n, model.d_b) = p_inf * model.obs_b.transpose();
        rep.theta_stable = hurwitz_check(theta_inf);
        rep.xi_observable = controllability_check(theta_inf, xi_inf);
    } else {
        const std::string why = !have_g2 ? "receiver ARE failed: " + g2_error
                                         : "filter ARE failed: " + p_error;
        rep.theta_stable = {false, why};
        rep.xi_observable = {false, why};
    }
    return rep;
}

LQPersuasionModel model_from_json_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("model config must be a JSON object");

    static const std::set<std::string> allowed = {
        "d_w", "d_b", "r",  "a_x", "b_x", "c_x", "obs_b",
        "obs_sigma", "f2", "f1",  "f0",  "c2",  "c1",  "x0"};
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) throw ConfigError("unknown key in model config: " + key);
    for (const auto& key : allowed)
        if (!j.contains(key)) throw ConfigError("missing key in model config: " + key);

    LQPersuasionModel m;
    try {
        m.d_w = j["d_w"].get<int>();
        m.d_b = j["d_b"].get<int>();
        m.r = j["r"].get<int>();
        m.f0 = j["f0"].get<double>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("model config: ") + e.what());
    }
    m.a_x = json_to_matrix(j["a_x"], "a_x");
    m.b_x = json_to_matrix(j["b_x"], "b_x");
    m.c_x = json_to_vector(j["c_x"], "c_x");
    m.obs_b = json_to_matrix(j["obs_b"], "obs_b");
    m.obs_sigma = json_to_matrix(j["obs_sigma"], "obs_sigma");
    m.f2 = json_to_matrix(j["f2"], "f2");
    m.f1 = json_to_vector(j["f1"], "f1");
    m.c2 = json_to_matrix(j["c2"], "c2");
    m.c1 = json_to_vector(j["c1"], "c1");
    m.x0 = json_to_vector(j["x0"], "x0");
    m.validate();
    return m;
}

LQPersuasionModel model_from_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return model_from_json_text(buf.str());
}

std::string model_to_json_text(const LQPersuasionModel& m) {
    json j;
    j["d_w"] = m.d_w;
    j["d_b"] = m.d_b;
    j["r"] = m.r;
    j["a_x"] = matrix_to_json(m.a_x);
    j["b_x"] = matrix_to_json(m.b_x);
    j["c_x"] = vector_to_json(m.c_x);
    j["obs_b"] = matrix_to_json(m.obs_b);
    j["obs_sigma"] = matrix_to_json(m.obs_sigma);
    j["f2"] = matrix_to_json(m.f2);
    j["f1"] = vector_to_json(m.f1);
    j["f0"] = m.f0;
    j["c2"] = matrix_to_json(m.c2);
    j["c1"] = vector_to_json(m.c1);
    j["x0"] = vector_to_json(m.x0);
    return j.dump(2);
}

}  // namespace plq
