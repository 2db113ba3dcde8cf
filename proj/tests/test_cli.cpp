// End-to-end checks of the installed binary: subcommands, flags, exit codes.

#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

namespace {

#ifndef DIAD_CLI_PATH
#error "DIAD_CLI_PATH must point at the CLI binary"
#endif

struct RunResult {
    int exit_code = -1;
    std::string stdout_text;
};

std::string temp_path(const std::string& name) {
    return std::string("/tmp/diad_cli_test_") + name;
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

RunResult run_cli(const std::string& args) {
    const std::string out_path = temp_path("stdout.txt");
    const std::string command =
        std::string(DIAD_CLI_PATH) + " " + args + " > " + out_path + " 2>/dev/null";
    const int status = std::system(command.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.stdout_text = read_file(out_path);
    return result;
}

const char* kConfig = R"({
  "model": {"variant": "landau_zener", "x": 1.0, "control_range": [-10.0, 10.0]},
  "diad": {"alpha": 2.0, "beta": 2.0},
  "pulse": {"grid_points": 256, "t_f": 2.0},
  "evolution": {"initial": 0, "target": 0}
})";

}  // namespace

TEST_CASE("spectrum subcommand writes CSV to stdout") {
    const std::string config = temp_path("spectrum.json");
    write_file(config, kConfig);
    const RunResult r = run_cli("spectrum --config " + config);
    REQUIRE(r.exit_code == 0);
    CHECK(r.stdout_text.find("# model=landau_zener") != std::string::npos);
    CHECK(r.stdout_text.find("columns: control,E_0,E_1") != std::string::npos);
}

TEST_CASE("pulse subcommand respects --out and is deterministic") {
    const std::string config = temp_path("pulse.json");
    write_file(config, kConfig);
    const std::string out1 = temp_path("pulse1.csv");
    const std::string out2 = temp_path("pulse2.csv");
    REQUIRE(run_cli("pulse --config " + config + " --out " + out1).exit_code == 0);
    REQUIRE(run_cli("pulse --config " + config + " --out " + out2).exit_code == 0);
    const std::string a = read_file(out1);
    REQUIRE_FALSE(a.empty());
    CHECK(a == read_file(out2));
    CHECK(a.rfind("# model=landau_zener alpha=2", 0) == 0);
    CHECK(a.find("\r") == std::string::npos);  // LF endings only
}

TEST_CASE("evolve subcommand prints a JSON summary") {
    const std::string config = temp_path("evolve.json");
    write_file(config, kConfig);
    const RunResult r = run_cli("evolve --config " + config);
    REQUIRE(r.exit_code == 0);
    CHECK(r.stdout_text.find("\"fidelity\"") != std::string::npos);
    CHECK(r.stdout_text.find("\"unitarity_residual\"") != std::string::npos);
}

TEST_CASE("sweep subcommand writes the table and summary") {
    const std::string config = temp_path("sweep.json");
    write_file(config, R"({
      "model": {"variant": "landau_zener", "x": 1.0, "control_range": [-10.0, 10.0]},
      "diad": {"alpha": 2.0, "beta": 2.0},
      "pulse": {"grid_points": 128, "t_f_grid": {"min": 1.0, "max": 10.0, "count": 3,
                "spacing": "log"}},
      "evolution": {"initial": 0, "target": 0},
      "optimize": {"method": "grid_sweep", "axes": ["alpha"], "bounds": {"alpha": [1.0, 3.0]},
                   "resolution": 3}
    })");
    const std::string out = temp_path("sweep.csv");
    const RunResult r = run_cli("sweep --config " + config + " --out " + out + " --threads 2");
    REQUIRE(r.exit_code == 0);
    CHECK(r.stdout_text.find("\"min_infidelity\"") != std::string::npos);
    const std::string csv = read_file(out);
    CHECK(csv.find("columns: alpha,beta,alpha_hat,beta_hat,t_f,fidelity") != std::string::npos);
}

TEST_CASE("missing config is a usage error") {
    const RunResult r = run_cli("spectrum");
    CHECK(r.exit_code == 2);
}

TEST_CASE("bad config file exits with the config error code") {
    const std::string config = temp_path("bad.json");
    write_file(config, R"({"model": {"variant": "landau_zener", "x": 1.0,
        "control_range": [-10.0, 10.0], "bogus": 1}})");
    CHECK(run_cli("spectrum --config " + config).exit_code == 2);

    write_file(config, "{");
    CHECK(run_cli("spectrum --config " + config).exit_code == 2);

    CHECK(run_cli("spectrum --config /nonexistent/path.json").exit_code == 2);
}

TEST_CASE("commands that need a pulse time reject configs without one") {
    const std::string config = temp_path("no_tf.json");
    write_file(config, R"({
      "model": {"variant": "landau_zener", "x": 1.0, "control_range": [-10.0, 10.0]},
      "pulse": {"grid_points": 128}
    })");
    CHECK(run_cli("pulse --config " + config).exit_code == 2);
    CHECK(run_cli("evolve --config " + config).exit_code == 2);
}

TEST_CASE("config output path is the --out fallback") {
    const std::string out = temp_path("config_out.csv");
    std::remove(out.c_str());
    const std::string config = temp_path("with_output.json");
    write_file(config, R"({
      "model": {"variant": "landau_zener", "x": 1.0, "control_range": [-10.0, 10.0]},
      "diad": {"alpha": 2.0, "beta": 2.0},
      "pulse": {"grid_points": 128, "t_f": 2.0},
      "output": ")" + out + R"("
    })");
    const RunResult r = run_cli("pulse --config " + config);
    REQUIRE(r.exit_code == 0);
    CHECK_FALSE(read_file(out).empty());
}

TEST_CASE("help exits cleanly") {
    CHECK(run_cli("--help").exit_code == 0);
}
