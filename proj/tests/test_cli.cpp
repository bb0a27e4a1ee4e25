#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args) {
    const std::string tmp = std::filesystem::temp_directory_path() / "guderley_cli_out.txt";
    const std::string cmd = std::string(GUDERLEY_CLI_PATH) + " " + args + " > " + tmp + " 2>&1";
    const int rc = std::system(cmd.c_str());
    RunResult r;
    r.exit_code = WEXITSTATUS(rc);
    std::ifstream in(tmp);
    std::stringstream ss;
    ss << in.rdbuf();
    r.out = ss.str();
    return r;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("solve emits the result schema and is deterministic") {
    const RunResult a = run("solve --gamma 1.4 --m 2");
    REQUIRE(a.exit_code == 0);
    CHECK(a.out.find("\"triple_point\":\"P6\"") != std::string::npos);
    CHECK(a.out.find("\"z_std\":0.14084313") != std::string::npos);
    const RunResult b = run("solve --gamma 1.4 --m 2");
    CHECK(a.out == b.out);  // byte-identical across repeated runs
}

TEST_CASE("domain errors exit 2 with machine-readable JSON") {
    const RunResult r = run("solve --gamma 5 --m 2");
    CHECK(r.exit_code == 2);
    CHECK(r.out.find("\"kind\":\"domain\"") != std::string::npos);

    const RunResult bad_m = run("solve --gamma 1.4 --m 3");
    CHECK(bad_m.exit_code == 2);
}

TEST_CASE("cache hit replays the result byte-for-byte") {
    const auto dir = std::filesystem::temp_directory_path() / "guderley_cache_test";
    std::filesystem::remove_all(dir);
    const std::string flags = "solve --gamma 2.2 --m 1 --cache " + dir.string();
    const RunResult miss = run(flags);
    REQUIRE(miss.exit_code == 0);
    REQUIRE(std::filesystem::exists(dir));
    const RunResult hit = run(flags);
    CHECK(hit.exit_code == 0);
    CHECK(hit.out == miss.out);
}

TEST_CASE("sweep writes a converged CSV table") {
    const auto out = std::filesystem::temp_directory_path() / "guderley_sweep.csv";
    const RunResult r = run("sweep --gamma-from 1.3 --gamma-to 1.6 --step 0.1 --m 2 --out " +
                            out.string());
    REQUIRE(r.exit_code == 0);
    const std::string csv = slurp(out.string());
    CHECK(csv.rfind("gamma,m,z_std,lambda,triple,residual\r\n", 0) == 0);
    int rows = 0;
    for (std::size_t pos = 0; (pos = csv.find("\r\n", pos)) != std::string::npos; pos += 2)
        ++rows;
    CHECK(rows == 5);  // header + 4 gammas
    CHECK(csv.find("P6") != std::string::npos);
}

TEST_CASE("profile emits CSV, metadata, and the trajectory export") {
    namespace fs = std::filesystem;
    const auto csv_path = fs::temp_directory_path() / "guderley_profile.csv";
    const auto meta_path = fs::temp_directory_path() / "guderley_profile_meta.json";
    const auto traj_path = fs::temp_directory_path() / "guderley_traj.csv";
    const RunResult r = run("profile --gamma 1.4 --m 2 --xmin 1e-5 --grid-n 128 --out " +
                            csv_path.string() + " --meta-out " + meta_path.string() +
                            " --traj-out " + traj_path.string());
    REQUIRE(r.exit_code == 0);

    const std::string csv = slurp(csv_path.string());
    CHECK(csv.rfind("x,V,C,R,u_coeff,c_coeff\r\n", 0) == 0);
    CHECK(csv.find("-1,") == csv.find("\r\n") + 2);  // first row at x = -1

    const std::string meta = slurp(meta_path.string());
    for (const char* key : {"\"z_std\"", "\"lambda\"", "\"x_sonic\"", "\"entropy_const\"",
                            "\"collapse_limits\"", "\"uhat\""})
        CHECK(meta.find(key) != std::string::npos);

    const std::string traj = slurp(traj_path.string());
    CHECK(traj.rfind("V,C,x,F,G,D\r\n", 0) == 0);
}

TEST_CASE("verify reports all barriers passed for a large-gamma gas") {
    const RunResult r = run("verify --gamma 2.5 --m 1 --samples 200");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("\"passed\":true") != std::string::npos);
    CHECK(r.out.find("\"passed\":false") == std::string::npos);
}

TEST_CASE("verify --dump-series prints coefficient strings") {
    const RunResult r = run("verify --gamma 2.5 --m 1 --samples 64 --dump-series");
    REQUIRE(r.exit_code == 0);
    CHECK(r.out.find("\"coefficients\":[\"") != std::string::npos);
}

TEST_CASE("portrait reproduces the figure layer set") {
    const RunResult r = run("portrait --gamma 1.5 --m 1 --z 0.14");
    REQUIRE(r.exit_code == 0);
    for (const char* layer : {"sonic_line", "F_nullcline", "G_nullcline", "critical:P1",
                              "critical:P6", "critical:P8", "trajectory:P6:left",
                              "trajectory:P8:right"})
        CHECK(r.out.find(layer) != std::string::npos);
}

TEST_CASE("config file mirrors the flags") {
    namespace fs = std::filesystem;
    const auto cfg_path = fs::temp_directory_path() / "guderley_config.json";
    std::ofstream(cfg_path.string()) << "{\"gamma\": 1.4, \"m\": 2, \"tol\": 1e-11}\n";
    const RunResult from_cfg = run("solve --config " + cfg_path.string());
    REQUIRE(from_cfg.exit_code == 0);
    const RunResult from_flags = run("solve --gamma 1.4 --m 2");
    CHECK(from_cfg.out == from_flags.out);

    // flags override the config file
    const RunResult overridden = run("solve --config " + cfg_path.string() + " --gamma 2.0");
    REQUIRE(overridden.exit_code == 0);
    CHECK(overridden.out.find("\"gamma\":2") != std::string::npos);
}

TEST_CASE("unknown flags are config errors") {
    const RunResult r = run("solve --gamma 1.4 --m 2 --frobnicate");
    CHECK(r.exit_code == 2);
}
