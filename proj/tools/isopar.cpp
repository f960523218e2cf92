// isopar: command-line verification suites for isoparametric polynomials.

#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "isopar/isopar.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

constexpr const char* kCsvHelp = R"(CSV side files (--csv PREFIX, doubles at 17 significant digits):
  alpha-scan  PREFIX_alpha.csv       index,level,alpha,omega,l
  riccati     PREFIX_trajectory.csv  t,mu1..mun,Q1..Qk,H
  spectrum    PREFIX_recurrence.csv  t,Q1..Q6,rhobar0..rhobar6
Exit status: 0 all checks pass, 1 a check failed, 2 usage or construction error.
ISOPAR_SEED overrides --seed when set.)";

struct CommonOptions {
    isopar::FamilySpec family{"cartan", 1, 0};
    std::size_t samples = 100;
    std::uint64_t seed = 1;
    double tol = 1e-8;
    std::string out;
    std::string csv;
};

std::uint64_t effective_seed(std::uint64_t seed) {
    if (const char* env = std::getenv("ISOPAR_SEED"); env != nullptr && *env != '\0') {
        try {
            return std::stoull(env);
        } catch (const std::exception&) {
            throw isopar::RangeError(std::string("ISOPAR_SEED is not an unsigned integer: ") + env);
        }
    }
    return seed;
}

void emit(const nlohmann::ordered_json& j, const std::string& out) {
    const std::string body = j.dump(2) + "\n";
    if (out.empty()) {
        std::cout << body;
        return;
    }
    std::ofstream f(out);
    if (!f) throw isopar::RangeError("cannot write " + out);
    f << body;
}

void write_csv(const isopar::SuiteResult& res, const std::string& prefix, const std::string& table) {
    if (prefix.empty() || !res.csv) return;
    const std::string path = prefix + "_" + table + ".csv";
    std::ofstream f(path);
    if (!f) throw isopar::RangeError("cannot write " + path);
    res.csv->write(f);
}

int error_report(const std::string& command, const std::string& message, const std::string& out) {
    nlohmann::ordered_json j;
    j["schema"] = isopar::kReportSchema;
    j["command"] = command;
    j["pass"] = false;
    j["error"] = message;
    try {
        emit(j, out);
    } catch (const std::exception&) {
        std::cout << j.dump(2) << "\n";
    }
    std::cerr << "isopar " << command << ": " << message << "\n";
    return kExitUsage;
}

void add_family_options(CLI::App* cmd, CommonOptions& o) {
    cmd->add_option("--family", o.family.family, "Polynomial family")
        ->check(CLI::IsMember({"cartan", "fkm", "ot"}))
        ->capture_default_str();
    cmd->add_option("--m", o.family.m, "Clifford index m (fkm) or algebra dimension (cartan)")->capture_default_str();
    cmd->add_option("--r", o.family.r, "Half the ambient dimension (fkm) or block parameter (ot)")
        ->capture_default_str();
}

void add_run_options(CLI::App* cmd, CommonOptions& o, bool with_tol) {
    cmd->add_option("--samples", o.samples, "Number of random samples")->capture_default_str();
    cmd->add_option("--seed", o.seed, "Random seed")->capture_default_str();
    if (with_tol) cmd->add_option("--tol", o.tol, "Residual tolerance")->capture_default_str();
    cmd->add_option("--out", o.out, "Write the JSON report to FILE instead of stdout");
    cmd->add_option("--csv", o.csv, "Prefix for CSV side files");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Numerical verification of isoparametric polynomials and their level sets"};
    app.footer(kCsvHelp);
    app.require_subcommand(1);

    CommonOptions opt;
    std::vector<int> ks{2, 3};
    std::string j_tag = "block";
    double level = 0.0;
    isopar::RiccatiSpec ric;
    ric.kappas = {1.0};
    ric.mu0 = {0.5};

    auto* cm = app.add_subcommand("verify-cm", "Cartan-Muenzner and transnormality residuals");
    add_family_options(cm, opt);
    add_run_options(cm, opt, true);

    auto* hidden = app.add_subcommand("verify-hidden", "Higher Laplacians and Hessian power sums");
    add_family_options(hidden, opt);
    add_run_options(hidden, opt, true);
    hidden->add_option("--k", ks, "Orders to check (1..5)")->delimiter(',')->capture_default_str();

    auto* alpha = app.add_subcommand("alpha-scan", "Omega_F and alpha over a level set");
    add_family_options(alpha, opt);
    add_run_options(alpha, opt, false);
    alpha->add_option("--J", j_tag, "Complex structure")
        ->check(CLI::IsMember({"block", "right-i", "left-i"}))
        ->capture_default_str();
    alpha->add_option("--level", level, "Level value in (-1, 1)")->capture_default_str();

    auto* riccati = app.add_subcommand("riccati", "Riccati evolution of principal curvatures");
    riccati->add_option("--kappa", ric.kappas, "One value (space form) or two (rank one)")->delimiter(',');
    riccati->add_option("--mult", ric.mult, "Multiplicity of the second kappa (1, 3 or 7)")->capture_default_str();
    riccati->add_option("--mu0", ric.mu0, "Initial principal curvatures")->delimiter(',');
    riccati->add_option("--t0", ric.t0, "Start of the time interval")->capture_default_str();
    riccati->add_option("--t1", ric.t1, "End of the time interval")->capture_default_str();
    riccati->add_option("--steps", ric.steps, "Number of time steps")->capture_default_str();
    riccati->add_option("--out", opt.out, "Write the JSON report to FILE instead of stdout");
    riccati->add_option("--csv", opt.csv, "Prefix for CSV side files");

    auto* spectrum = app.add_subcommand("spectrum", "Shape operator spectra and recurrences on a level");
    add_family_options(spectrum, opt);
    add_run_options(spectrum, opt, false);
    spectrum->add_option("--level", level, "Level value in (-1, 1)")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return kExitUsage;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        opt.seed = effective_seed(opt.seed);
        isopar::SuiteResult res;
        std::string table;
        if (command == "verify-cm") {
            res = isopar::run_verify_cm(opt.family, opt.samples, opt.seed, opt.tol);
        } else if (command == "verify-hidden") {
            res = isopar::run_verify_hidden(opt.family, ks, opt.samples, opt.seed, opt.tol);
        } else if (command == "alpha-scan") {
            res = isopar::run_alpha_scan(opt.family, j_tag, level, opt.samples, opt.seed);
            table = "alpha";
        } else if (command == "riccati") {
            res = isopar::run_riccati(ric);
            table = "trajectory";
        } else {
            res = isopar::run_spectrum(opt.family, level, opt.samples, opt.seed);
            table = "recurrence";
        }
        emit(res.report.to_json(), opt.out);
        write_csv(res, opt.csv, table);
        return res.report.pass() ? kExitPass : kExitFail;
    } catch (const isopar::Error& e) {
        return error_report(command, e.what(), opt.out);
    } catch (const std::exception& e) {
        return error_report(command, e.what(), opt.out);
    }
}
