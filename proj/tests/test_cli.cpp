#include <catch2/catch_amalgamated.hpp>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef ISOPAR_CLI_PATH
#error "ISOPAR_CLI_PATH must point at the isopar executable"
#endif

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
};

RunResult run(const std::string& args, const std::string& env = "") {
    const std::string cmd = env + (env.empty() ? "" : " ") + "'" ISOPAR_CLI_PATH "' " + args + " 2>/dev/null";
    RunResult r;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    char buf[4096];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) r.out.append(buf, n);
    const int status = pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

fs::path scratch_dir() {
    const fs::path d = fs::temp_directory_path() / ("isopar_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("verify-cm on the Cartan family passes", "[cli]") {
    const RunResult r = run("verify-cm --family cartan --m 1 --samples 20");
    CHECK(r.exit_code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["schema"] == "isopar-report/1");
    CHECK(j["pass"] == true);
    CHECK(j["command"] == "verify-cm");
    CHECK(j["samples"] == 20);
}

TEST_CASE("output is byte-identical across runs", "[cli]") {
    for (const std::string args : {"verify-cm --family fkm --m 2 --r 4 --samples 30 --seed 9",
                                   "alpha-scan --family fkm --m 2 --r 4 --J block --samples 20",
                                   "spectrum --family fkm --m 1 --r 4 --level 0.2 --samples 10"}) {
        const RunResult a = run(args), b = run(args);
        CHECK(a.exit_code == b.exit_code);
        CHECK(a.out == b.out);
        CHECK_FALSE(a.out.empty());
    }
}

TEST_CASE("exit codes", "[cli]") {
    CHECK(run("riccati --kappa 0 --mu0 1 --t0 0 --t1 2").exit_code == 1);
    CHECK(run("verify-hidden --family fkm --m 2 --r 3").exit_code == 2);
    CHECK(run("verify-hidden --family cartan --m 1 --k 9").exit_code == 2);
    CHECK(run("verify-cm --no-such-option").exit_code == 2);
    CHECK(run("no-such-command").exit_code == 2);
    CHECK(run("--help").exit_code == 0);
    CHECK(run("riccati --help").exit_code == 0);
}

TEST_CASE("failures still produce a JSON report", "[cli]") {
    const RunResult r = run("verify-hidden --family fkm --m 2 --r 3");
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["pass"] == false);
    CHECK(j.contains("error"));

    const RunResult blow = run("riccati --kappa 0 --mu0 1 --t0 0 --t1 2");
    CHECK(nlohmann::json::parse(blow.out)["pass"] == false);
}

TEST_CASE("ISOPAR_SEED overrides --seed", "[cli]") {
    const RunResult r = run("verify-cm --family cartan --samples 5 --seed 3", "ISOPAR_SEED=42");
    REQUIRE(r.exit_code == 0);
    CHECK(nlohmann::json::parse(r.out)["seed"] == 42);
    const RunResult plain = run("verify-cm --family cartan --samples 5 --seed 3");
    CHECK(nlohmann::json::parse(plain.out)["seed"] == 3);
}

TEST_CASE("--out and --csv write files", "[cli]") {
    const fs::path dir = scratch_dir();
    const fs::path report = dir / "report.json";
    const fs::path prefix = dir / "run";
    const RunResult r = run("riccati --kappa 1 --mu0 0.1,-0.2,0.3 --t0 -0.3 --t1 0.3 --steps 10 --out '" +
                            report.string() + "' --csv '" + prefix.string() + "'");
    CHECK(r.exit_code == 0);
    REQUIRE(fs::exists(report));
    CHECK(nlohmann::json::parse(slurp(report))["pass"] == true);

    const fs::path csv = dir / "run_trajectory.csv";
    REQUIRE(fs::exists(csv));
    std::istringstream lines(slurp(csv));
    std::string header;
    std::getline(lines, header);
    CHECK(header.rfind("t,mu1,mu2,mu3,Q1", 0) == 0);
    int rows = 0;
    for (std::string line; std::getline(lines, line);) ++rows;
    CHECK(rows == 11);

    const RunResult a = run("alpha-scan --family fkm --m 1 --r 4 --J block --samples 5 --csv '" + prefix.string() + "'");
    CHECK(a.exit_code == 0);
    CHECK(fs::exists(dir / "run_alpha.csv"));
    fs::remove_all(dir);
}
