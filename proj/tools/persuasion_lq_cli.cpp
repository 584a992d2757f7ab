// persuasion_lq: checks, solves, optimizations, scenario reports and figure
// data for the linear-quadratic ergodic information-design game.
//
// Exit codes: 0 success, 1 solver/assumption failure, 2 usage/config error.

#include <CLI11.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <string>

#include "plq/csv.hpp"
#include "plq/mfg.hpp"
#include "plq/model.hpp"
#include "plq/receiver.hpp"
#include "plq/scenarios.hpp"
#include "plq/sender.hpp"
#include "plq/sim.hpp"
#include "plq/stationary.hpp"

using nlohmann::json;

namespace {

// Doubles pass through a 12-significant-digit round trip so serialized
// reports are byte-stable and match the CSV precision contract.
json num(double x) { return json(std::stod(plq::format12(x))); }

json matrix_json(const plq::Matrix& m) {
    json rows = json::array();
    for (int i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(num(m(i, c)));
        rows.push_back(row);
    }
    return rows;
}

json vector_json(const plq::Vector& v) {
    json arr = json::array();
    for (int i = 0; i < v.size(); ++i) arr.push_back(num(v(i)));
    return arr;
}

json load_json(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw plq::ConfigError("cannot open config: " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw plq::ConfigError("invalid JSON in " + path + ": " + e.what());
    }
}

// key=value with dotted paths into the config; the value is parsed as JSON
// when possible, kept as a string otherwise.
void apply_overrides(json& config, const std::vector<std::string>& overrides) {
    for (const auto& item : overrides) {
        const auto eq = item.find('=');
        if (eq == std::string::npos)
            throw plq::ConfigError("override must look like key=value: " + item);
        const std::string path = item.substr(0, eq);
        const std::string value_text = item.substr(eq + 1);
        json value;
        try {
            value = json::parse(value_text);
        } catch (const json::exception&) {
            value = value_text;
        }
        json* node = &config;
        std::istringstream segments(path);
        std::string segment, prev;
        std::vector<std::string> parts;
        while (std::getline(segments, segment, '.')) parts.push_back(segment);
        if (parts.empty()) throw plq::ConfigError("empty override key");
        for (std::size_t i = 0; i + 1 < parts.size(); ++i) node = &(*node)[parts[i]];
        (*node)[parts.back()] = value;
    }
}

void reject_unknown(const json& j, const std::set<std::string>& allowed,
                    const std::string& where) {
    if (!j.is_object()) throw plq::ConfigError(where + ": expected a JSON object");
    for (const auto& [key, _] : j.items())
        if (!allowed.count(key)) throw plq::ConfigError(where + ": unknown key " + key);
}

double get_num(const json& j, const char* key, double fallback) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number()) throw plq::ConfigError(std::string(key) + " must be a number");
    return j[key].get<double>();
}

plq::SmartMeterParams smart_meter_params(const json& j) {
    reject_unknown(j, {"kappa", "ell", "u0", "gamma", "p0", "p1", "g0", "g1", "r", "eta", "mode"},
                   "smart-meter params");
    plq::SmartMeterParams p;
    p.kappa = get_num(j, "kappa", p.kappa);
    p.ell = get_num(j, "ell", p.ell);
    p.u0 = get_num(j, "u0", p.u0);
    p.gamma = get_num(j, "gamma", p.gamma);
    p.p0 = get_num(j, "p0", p.p0);
    p.p1 = get_num(j, "p1", p.p1);
    p.g0 = get_num(j, "g0", p.g0);
    p.g1 = get_num(j, "g1", p.g1);
    p.r = get_num(j, "r", p.r);
    p.eta = get_num(j, "eta", p.eta);
    if (j.contains("mode")) {
        const std::string mode = j["mode"].get<std::string>();
        if (mode != "single" && mode != "mfg")
            throw plq::ConfigError("smart-meter mode must be single or mfg");
        p.mfg = (mode == "mfg");
    }
    p.validate();
    return p;
}

plq::CarbonParams carbon_params(const json& j) {
    reject_unknown(j, {"kappa", "ell", "a", "gamma", "lambda_a", "lambda_q", "epsilon",
                       "c_damage", "eta"},
                   "carbon params");
    plq::CarbonParams p;
    p.kappa = get_num(j, "kappa", p.kappa);
    p.ell = get_num(j, "ell", p.ell);
    p.a = get_num(j, "a", p.a);
    p.gamma = get_num(j, "gamma", p.gamma);
    p.lambda_a = get_num(j, "lambda_a", p.lambda_a);
    p.lambda_q = get_num(j, "lambda_q", p.lambda_q);
    p.epsilon = get_num(j, "epsilon", p.epsilon);
    p.c_damage = get_num(j, "c_damage", p.c_damage);
    p.eta = get_num(j, "eta", p.eta);
    p.validate();
    return p;
}

plq::SimConfig sim_config(const json& j) {
    reject_unknown(j, {"dt", "horizon", "n_paths", "seed", "burn_in"}, "sim config");
    plq::SimConfig cfg;
    cfg.dt = get_num(j, "dt", cfg.dt);
    cfg.horizon = get_num(j, "horizon", cfg.horizon);
    cfg.n_paths = static_cast<int>(get_num(j, "n_paths", cfg.n_paths));
    if (j.contains("seed")) cfg.seed = j["seed"].get<std::uint64_t>();
    cfg.burn_in = get_num(j, "burn_in", cfg.burn_in);
    return cfg;
}

std::vector<double> epsilon_grid_from(const json& config) {
    std::vector<double> grid;
    if (config.contains("epsilon_grid")) {
        for (const auto& v : config["epsilon_grid"]) grid.push_back(v.get<double>());
    } else {
        for (int i = 0; i <= 20; ++i) grid.push_back(0.1 * i);
    }
    return grid;
}

void write_report(const std::string& out_dir, const json& report) {
    if (out_dir.empty()) return;
    std::filesystem::create_directories(out_dir);
    std::ofstream out(out_dir + "/report.json", std::ios::binary);
    out << report.dump(2) << "\n";
}

plq::RiccatiPath riccati_for(const plq::LQPersuasionModel& model, double horizon, double dt) {
    std::vector<double> grid;
    const int steps = std::max(1, static_cast<int>(std::llround(horizon / dt)));
    grid.reserve(steps + 1);
    for (int k = 0; k <= steps; ++k) grid.push_back(k * dt);
    return plq::integrate_riccati_ode(model.a_x, model.obs_b,
                                      plq::Matrix::Zero(model.d_w, model.d_w), grid,
                                      std::min(dt, 1e-3));
}

int cmd_check(const json& config, const std::string& out_dir) {
    const plq::LQPersuasionModel model = plq::model_from_json_text(config.dump());
    const plq::AssumptionReport rep = plq::assumption_report(model);
    const auto row = [](const char* name, const plq::CheckResult& c) {
        std::cout << "  " << (c.pass ? "[pass] " : "[FAIL] ") << name << ": " << c.witness
                  << "\n";
    };
    std::cout << "assumption report\n";
    row("stabilisable_filter", rep.stabilisable_filter);
    row("f2_psd", rep.f2_psd);
    row("control_psd", rep.control_psd);
    row("stabilisable_control", rep.stabilisable_control);
    row("detectable", rep.detectable);
    row("theta1_hurwitz", rep.theta1_hurwitz);
    row("theta_stable", rep.theta_stable);
    row("xi_observable", rep.xi_observable);

    json out;
    out["command"] = "check";
    out["all_pass"] = rep.all_pass();
    const auto put = [&](const char* name, const plq::CheckResult& c) {
        out["checks"][name] = {{"pass", c.pass}, {"witness", c.witness}};
    };
    put("stabilisable_filter", rep.stabilisable_filter);
    put("f2_psd", rep.f2_psd);
    put("control_psd", rep.control_psd);
    put("stabilisable_control", rep.stabilisable_control);
    put("detectable", rep.detectable);
    put("theta1_hurwitz", rep.theta1_hurwitz);
    put("theta_stable", rep.theta_stable);
    put("xi_observable", rep.xi_observable);
    write_report(out_dir, out);

    if (!rep.all_pass()) {
        std::cout << "FAILED: " << rep.first_failure() << "\n";
        return 1;
    }
    std::cout << "all checks pass\n";
    return 0;
}

int cmd_receiver(const json& config, const std::string& out_dir) {
    const plq::LQPersuasionModel model =
        plq::normalize_observation(plq::model_from_json_text(config.dump()));
    const plq::ReceiverSolution sol = plq::solve_receiver(model);
    const double value = plq::receiver_ergodic_value(model, sol);
    std::cout << "G2 = " << plq::format12(sol.g2(0, 0)) << (model.d_w > 1 ? " (top-left)" : "")
              << "\nzeta = " << plq::format12(sol.zeta)
              << "\nergodic value = " << plq::format12(value) << "\n";

    json out;
    out["command"] = "receiver";
    out["g2"] = matrix_json(sol.g2);
    out["g1"] = vector_json(sol.g1);
    out["zeta"] = num(sol.zeta);
    out["feedback_k"] = matrix_json(sol.feedback_k);
    out["feedback_c"] = vector_json(sol.feedback_c);
    out["p_limit"] = matrix_json(sol.p_limit);
    out["ergodic_value"] = num(value);
    write_report(out_dir, out);
    return 0;
}

int cmd_stationary(const json& config, const std::string& out_dir) {
    const plq::LQPersuasionModel model =
        plq::normalize_observation(plq::model_from_json_text(config.dump()));
    const plq::ReceiverSolution sol = plq::solve_receiver(model);
    const plq::StationaryLaw law = plq::stationary_law(model, sol);
    std::cout << "m_infinity = " << plq::format12(law.mean(0)) << (model.d_w > 1 ? " ..." : "")
              << "\nVar(X) = " << plq::format12(law.var_x()(0, 0))
              << "\nP_infinity = " << plq::format12(law.p_limit(0, 0)) << "\n";

    json out;
    out["command"] = "stationary";
    out["mean"] = vector_json(law.mean);
    out["cov_joint"] = matrix_json(law.cov_joint);
    out["p_limit"] = matrix_json(law.p_limit);
    write_report(out_dir, out);
    return 0;
}

int cmd_mfg(const json& config, const std::string& out_dir) {
    reject_unknown(config, {"family", "b", "params", "tol", "damping", "max_iter"}, "mfg config");
    if (!config.contains("family")) throw plq::ConfigError("mfg config: missing family");
    const std::string family_name = config["family"].get<std::string>();
    const double b = get_num(config, "b", 5.5);
    plq::MfgOptions opts;
    opts.tol = get_num(config, "tol", opts.tol);
    opts.damping = get_num(config, "damping", opts.damping);
    opts.max_iter = static_cast<int>(get_num(config, "max_iter", opts.max_iter));

    plq::MfgFamily family;
    plq::Vector init_m;
    plq::Matrix init_w;
    if (family_name == "smart-meter") {
        plq::SmartMeterParams p =
            smart_meter_params(config.contains("params") ? config["params"] : json::object());
        family = p.mfg_family(b);
        init_m = plq::Vector::Constant(1, p.ell);
        init_w = plq::Matrix::Identity(2, 2) * (1.0 / (2.0 * p.kappa));
    } else if (family_name == "carbon") {
        plq::CarbonParams p =
            carbon_params(config.contains("params") ? config["params"] : json::object());
        family = p.mfg_family(b);
        init_m = plq::Vector::Constant(1, p.a);
        init_w = plq::Matrix::Identity(2, 2) * (1.0 / (2.0 * p.kappa));
    } else {
        throw plq::ConfigError("mfg family must be smart-meter or carbon");
    }

    const plq::MfgEquilibrium eq = plq::mfg_solve(family, init_m, init_w, opts);
    std::cout << "m_star = " << plq::format12(eq.m_star(0)) << "\nVar(X*) = "
              << plq::format12(eq.law.var_x()(0, 0)) << "\niterations = " << eq.iterations
              << "\nresidual = " << plq::format12(eq.residual) << "\n";

    json out;
    out["command"] = "mfg";
    out["m_star"] = vector_json(eq.m_star);
    out["w_star"] = matrix_json(eq.w_star);
    out["iterations"] = eq.iterations;
    out["residual"] = num(eq.residual);
    write_report(out_dir, out);
    return 0;
}

int cmd_sender(const json& config, const std::string& out_dir) {
    reject_unknown(config, {"scenario", "params", "b_max", "tol", "epsilon"}, "sender config");
    if (!config.contains("scenario")) throw plq::ConfigError("sender config: missing scenario");
    const std::string which = config["scenario"].get<std::string>();
    const double b_max = get_num(config, "b_max", 100.0);
    const double tol = get_num(config, "tol", 1e-8);

    plq::SenderScenario scenario;
    if (which == "smart-meter") {
        scenario = plq::smart_meter_sender_scenario(
            smart_meter_params(config.contains("params") ? config["params"] : json::object()));
    } else if (which == "carbon") {
        plq::CarbonParams p =
            carbon_params(config.contains("params") ? config["params"] : json::object());
        scenario = plq::carbon_sender_scenario(p, get_num(config, "epsilon", p.epsilon));
    } else {
        throw plq::ConfigError("sender scenario must be smart-meter or carbon");
    }

    const plq::SenderResult res = plq::optimize_precision(scenario, b_max, tol);
    const char* flag = res.flag == plq::BoundaryFlag::interior ? "interior"
                       : res.flag == plq::BoundaryFlag::no_information ? "no-information"
                                                                       : "cap";
    std::cout << "b_star = " << plq::format12(res.b_star)
              << "\nobjective = " << plq::format12(res.objective_star) << "\nflag = " << flag
              << "\n";
    if (res.multimodal_warning) std::cout << "warning: objective appears multimodal\n";

    json out;
    out["command"] = "sender";
    out["b_star"] = num(res.b_star);
    out["objective_star"] = num(res.objective_star);
    out["flag"] = flag;
    out["multimodal_warning"] = res.multimodal_warning;
    write_report(out_dir, out);
    return 0;
}

int cmd_simulate(const json& config, const std::string& out_dir) {
    reject_unknown(config, {"model", "sim"}, "simulate config");
    if (!config.contains("model")) throw plq::ConfigError("simulate config: missing model");
    const plq::LQPersuasionModel model =
        plq::normalize_observation(plq::model_from_json_text(config["model"].dump()));
    const plq::SimConfig cfg =
        sim_config(config.contains("sim") ? config["sim"] : json::object());

    const plq::ReceiverSolution sol = plq::solve_receiver(model);
    const plq::StationaryLaw law = plq::stationary_law(model, sol);
    const plq::RiccatiPath riccati = riccati_for(model, cfg.horizon, cfg.dt);
    const plq::SimStats stats = plq::simulate(model, sol, riccati, cfg);
    const auto [est, se] = plq::ergodic_estimate(stats, plq::ErgodicTarget::receiver);
    const double analytic = plq::receiver_ergodic_value(model, sol);

    std::cout << "paths = " << stats.n_paths << ", steps = " << stats.n_steps << "\n"
              << "terminal mean X = " << plq::format12(stats.terminal_mean_x()(0))
              << " (analytic m_infinity = " << plq::format12(law.mean(0)) << ")\n"
              << "receiver time-average = " << plq::format12(est) << " +/- "
              << plq::format12(se) << " (analytic " << plq::format12(analytic) << ")\n";

    json out;
    out["command"] = "simulate";
    out["terminal_mean_x"] = vector_json(stats.terminal_mean_x());
    out["terminal_mean_xhat"] = vector_json(stats.terminal_mean_xhat());
    out["terminal_cov_joint"] = matrix_json(stats.terminal_cov_joint());
    out["receiver_estimate"] = num(est);
    out["receiver_stderr"] = num(se);
    out["receiver_analytic"] = num(analytic);
    out["m_infinity_analytic"] = vector_json(law.mean);
    write_report(out_dir, out);
    return 0;
}

int cmd_scenario(const std::string& which, const json& config, const std::string& out_dir) {
    plq::ScenarioReport rep;
    if (which == "smart-meter") {
        reject_unknown(config, {"params", "b"}, "scenario config");
        rep = plq::smart_meter_report(
            smart_meter_params(config.contains("params") ? config["params"] : json::object()),
            get_num(config, "b", 5.5));
    } else if (which == "carbon") {
        reject_unknown(config, {"params", "epsilon_grid"}, "scenario config");
        rep = plq::carbon_report(
            carbon_params(config.contains("params") ? config["params"] : json::object()),
            epsilon_grid_from(config));
    } else {
        throw plq::ConfigError("scenario must be smart-meter or carbon");
    }
    std::cout << rep.to_text();

    json out;
    out["command"] = "scenario";
    out["scenario"] = rep.scenario;
    json checks = json::array();
    for (const auto& c : rep.checks)
        checks.push_back({{"name", c.name},
                          {"pipeline", num(c.pipeline)},
                          {"published", num(c.published)},
                          {"consistent", c.consistent}});
    out["checks"] = checks;
    out["notes"] = rep.notes;
    write_report(out_dir, out);
    return 0;
}

int cmd_figure(const std::string& which, const json& config, const std::string& out_dir) {
    std::vector<std::string> files;
    if (which == "fig1") {
        reject_unknown(config, {"params"}, "figure config");
        files = plq::figure_data_fig1(
            smart_meter_params(config.contains("params") ? config["params"] : json::object()),
            out_dir);
    } else if (which == "fig2") {
        reject_unknown(config, {"params", "epsilon_grid"}, "figure config");
        files = plq::figure_data_fig2(
            carbon_params(config.contains("params") ? config["params"] : json::object()),
            epsilon_grid_from(config), out_dir);
    } else {
        throw plq::ConfigError("figure must be fig1 or fig2");
    }
    for (const auto& f : files) std::cout << "wrote " << f << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"solver and scenario toolkit for ergodic LQ information-design games"};
    app.require_subcommand(1);

    std::string config_path, out_dir, scenario_name, figure_name;
    std::vector<std::string> overrides;

    const auto add_common = [&](CLI::App* cmd, bool config_required) {
        auto* opt = cmd->add_option("config", config_path, "JSON config file");
        if (config_required) opt->required();
        cmd->add_option("--out", out_dir, "output directory for reports/CSVs");
        cmd->add_option("-O,--override", overrides,
                        "config override key=value (dotted paths allowed)");
    };

    auto* check = app.add_subcommand("check", "validate a model and print the assumption report");
    add_common(check, true);
    auto* receiver = app.add_subcommand("receiver", "solve the receiver problem");
    add_common(receiver, true);
    auto* stationary = app.add_subcommand("stationary", "stationary law of the optimal system");
    add_common(stationary, true);
    auto* mfg = app.add_subcommand("mfg", "solve a mean-field equilibrium");
    add_common(mfg, true);
    auto* sender = app.add_subcommand("sender", "optimize the device precision");
    add_common(sender, true);
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo validation run");
    add_common(simulate, true);
    auto* scenario = app.add_subcommand("scenario", "end-to-end application report");
    scenario->add_option("name", scenario_name, "smart-meter | carbon")->required();
    add_common(scenario, false);
    auto* figure = app.add_subcommand("figure", "emit figure CSV data");
    figure->add_option("name", figure_name, "fig1 | fig2")->required();
    add_common(figure, false);
    figure->get_option("--out")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 2;
    }

    try {
        json config = json::object();
        if (!config_path.empty()) config = load_json(config_path);
        apply_overrides(config, overrides);

        if (check->parsed()) return cmd_check(config, out_dir);
        if (receiver->parsed()) return cmd_receiver(config, out_dir);
        if (stationary->parsed()) return cmd_stationary(config, out_dir);
        if (mfg->parsed()) return cmd_mfg(config, out_dir);
        if (sender->parsed()) return cmd_sender(config, out_dir);
        if (simulate->parsed()) return cmd_simulate(config, out_dir);
        if (scenario->parsed()) return cmd_scenario(scenario_name, config, out_dir);
        if (figure->parsed()) return cmd_figure(figure_name, config, out_dir);
    } catch (const plq::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const plq::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
