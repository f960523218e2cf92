#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "isopar/sampling.hpp"

namespace isopar {

inline constexpr std::string_view kReportSchema = "isopar-report/1";

struct CheckDetail {
    std::string name;
    double residual = 0.0;
    double tolerance = 0.0;
    /// Which identity or property the check exercises.
    std::string reference;

    bool pass() const { return std::isfinite(residual) && residual <= tolerance; }
};

struct SuiteReport {
    std::string command;
    nlohmann::ordered_json params = nlohmann::ordered_json::object();
    std::uint64_t seed = 0;
    std::string generator{kGeneratorName};
    std::size_t samples = 0;
    std::vector<CheckDetail> details;
    /// Free-form extra output (statistics, diagnostics).
    nlohmann::ordered_json extra = nlohmann::ordered_json::object();

    void add(std::string name, double residual, double tolerance, std::string reference) {
        details.push_back({std::move(name), residual, tolerance, std::move(reference)});
    }

    bool pass() const {
        return std::all_of(details.begin(), details.end(), [](const CheckDetail& d) { return d.pass(); });
    }

    double max_residual() const {
        double m = 0.0;
        for (const auto& d : details) m = std::max(m, std::isfinite(d.residual) ? d.residual : HUGE_VAL);
        return m;
    }

    nlohmann::ordered_json to_json() const {
        nlohmann::ordered_json j;
        j["schema"] = kReportSchema;
        j["command"] = command;
        j["params"] = params;
        j["seed"] = seed;
        j["generator"] = generator;
        j["samples"] = samples;
        const double mr = max_residual();
        j["max_residual"] = std::isfinite(mr) ? nlohmann::ordered_json(mr) : nlohmann::ordered_json(nullptr);
        j["pass"] = pass();
        j["details"] = nlohmann::ordered_json::array();
        for (const auto& d : details) {
            nlohmann::ordered_json e;
            e["name"] = d.name;
            e["residual"] = std::isfinite(d.residual) ? nlohmann::ordered_json(d.residual) : nlohmann::ordered_json(nullptr);
            e["tolerance"] = d.tolerance;
            e["reference"] = d.reference;
            e["pass"] = d.pass();
            j["details"].push_back(std::move(e));
        }
        if (!extra.empty()) j["extra"] = extra;
        return j;
    }
};

/// Comma-separated table with doubles at 17 significant digits.
class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    void add_row(const std::vector<double>& row) { rows_.push_back(row); }
    std::size_t size() const noexcept { return rows_.size(); }

    void write(std::ostream& os) const {
        for (std::size_t i = 0; i < header_.size(); ++i) os << (i ? "," : "") << header_[i];
        os << '\n';
        std::ostringstream cell;
        cell << std::setprecision(17);
        for (const auto& r : rows_) {
            for (std::size_t i = 0; i < r.size(); ++i) {
                cell.str("");
                cell << r[i];
                os << (i ? "," : "") << cell.str();
            }
            os << '\n';
        }
    }

    std::string str() const {
        std::ostringstream os;
        write(os);
        return os.str();
    }

private:
    std::vector<std::string> header_;
    std::vector<std::vector<double>> rows_;
};

}  // namespace isopar
