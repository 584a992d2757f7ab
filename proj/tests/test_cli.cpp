#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#ifndef PLQ_CLI_PATH
#error "PLQ_CLI_PATH must be defined by the build"
#endif
#ifndef PLQ_CONFIG_DIR
#error "PLQ_CONFIG_DIR must be defined by the build"
#endif

namespace {

struct RunResult {
    int exit_code = -1;
    std::string output;
};

std::string temp_dir(const std::string& tag) {
    const auto dir = std::filesystem::temp_directory_path() / ("plq_cli_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

RunResult run_cli(const std::string& args, const std::string& env = "") {
    const std::string out_file =
        (std::filesystem::temp_directory_path() / "plq_cli_out.txt").string();
    const std::string cmd =
        env + " " + std::string(PLQ_CLI_PATH) + " " + args + " > " + out_file + " 2>&1";
    const int status = std::system(cmd.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(out_file, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    result.output = buf.str();
    return result;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const std::string kConfigs = PLQ_CONFIG_DIR;

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("check on the shipped model passes with exit 0") {
    const RunResult res = run_cli("check " + kConfigs + "/fig1.json");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("all checks pass") != std::string::npos);
}

TEST_CASE("check on a failing model exits 1 and names the check") {
    const RunResult res = run_cli("check " + kConfigs +
                                  "/fig1.json -O a_x=[[1.0]] -O obs_b=[[0.0]]");
    CHECK(res.exit_code == 1);
    CHECK(res.output.find("stabilisable_filter") != std::string::npos);
}

TEST_CASE("unknown command exits 2") {
    const RunResult res = run_cli("frobnicate");
    CHECK(res.exit_code == 2);
}

TEST_CASE("bad config exits 2") {
    const std::string dir = temp_dir("badcfg");
    std::ofstream(dir + "/bad.json") << "{\"d_w\": 1, \"unknown_key\": true}";
    const RunResult res = run_cli("check " + dir + "/bad.json");
    CHECK(res.exit_code == 2);
}

TEST_CASE("figure fig1 writes the four documented files") {
    const std::string dir = temp_dir("fig");
    const RunResult res = run_cli("figure fig1 --out " + dir);
    CHECK(res.exit_code == 0);
    CHECK(std::filesystem::exists(dir + "/fig1_variance.csv"));
    CHECK(std::filesystem::exists(dir + "/fig1_traj_b0.csv"));
    CHECK(std::filesystem::exists(dir + "/fig1_traj_b5.5.csv"));
    CHECK(std::filesystem::exists(dir + "/fig1_traj_b55.csv"));
}

TEST_CASE("override to the current value changes nothing") {
    const std::string dir_a = temp_dir("ovr_a");
    const std::string dir_b = temp_dir("ovr_b");
    const RunResult a = run_cli("receiver " + kConfigs + "/fig1.json --out " + dir_a);
    const RunResult b =
        run_cli("receiver " + kConfigs + "/fig1.json --out " + dir_b + " -O obs_b=[[5.5]]");
    CHECK(a.exit_code == 0);
    CHECK(b.exit_code == 0);
    CHECK(a.output == b.output);
    CHECK(slurp(dir_a + "/report.json") == slurp(dir_b + "/report.json"));
}

TEST_CASE("solver outputs match across repeated runs and thread counts") {
    const std::string dir_a = temp_dir("det_a");
    const std::string dir_b = temp_dir("det_b");
    const std::string args = "simulate " + kConfigs + "/simulate_fig1.json -O sim.n_paths=32"
                             " -O sim.horizon=2.0 --out ";
    const RunResult a = run_cli(args + dir_a, "PERSUASION_LQ_THREADS=1");
    const RunResult b = run_cli(args + dir_b, "PERSUASION_LQ_THREADS=2");
    CHECK(a.exit_code == 0);
    CHECK(b.exit_code == 0);
    CHECK(a.output == b.output);
    CHECK(slurp(dir_a + "/report.json") == slurp(dir_b + "/report.json"));
}

TEST_CASE("mfg and sender commands run on the shipped configs") {
    const RunResult mfg = run_cli("mfg " + kConfigs + "/mfg_smart_meter.json");
    CHECK(mfg.exit_code == 0);
    CHECK(mfg.output.find("m_star = 0.500416") != std::string::npos);

    const RunResult sender = run_cli("sender " + kConfigs + "/sender_smart_meter.json");
    CHECK(sender.exit_code == 0);
    CHECK(sender.output.find("flag = interior") != std::string::npos);
}

TEST_CASE("scenario smart-meter prints a consistency table") {
    const RunResult res = run_cli("scenario smart-meter " + kConfigs + "/smart_meter.json");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("m_infinity") != std::string::npos);
    CHECK(res.output.find("DISCREPANT") == std::string::npos);
}

}  // TEST_SUITE
