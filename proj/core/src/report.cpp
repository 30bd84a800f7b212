#include "bayeslab/report.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <string>

#include <json.hpp>

#include "bayeslab/errors.hpp"

namespace bayeslab {

namespace {

using ojson = nlohmann::ordered_json;

// Shortest decimal string that parses back to the same double.
std::string format_double(double v) {
    std::array<char, 32> buf;
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

std::string csv_field(const std::string& raw) {
    if (raw.find_first_of(",\"\n") == std::string::npos) return raw;
    std::string quoted = "\"";
    for (char c : raw) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

void require_finite(const ExperimentReport& report) {
    auto check = [](const char* where, double v) {
        if (!std::isfinite(v))
            throw parameter_error(std::string("report: non-finite value in ") + where +
                                  "; encode it as a flag entry instead");
    };
    for (const auto& [name, value] : report.estimates) check("estimates", value);
    for (const auto& [name, value] : report.diagnostics) check("diagnostics", value);
    check("wall_ms", report.wall_ms);
    if (report.has_trace() && !report.trace.allFinite())
        throw parameter_error("report: non-finite value in trace");
}

}  // namespace

bool operator==(const ExperimentReport& a, const ExperimentReport& b) {
    if (a.id != b.id || a.seed != b.seed || a.wall_ms != b.wall_ms) return false;
    if (a.params != b.params || a.estimates != b.estimates ||
        a.diagnostics != b.diagnostics)
        return false;
    if (a.trace.rows() != b.trace.rows() || a.trace.cols() != b.trace.cols()) return false;
    return a.trace == b.trace;
}

std::string report_to_csv(const ExperimentReport& report) {
    require_finite(report);
    std::string out = "key,value\n";
    out += "id," + csv_field(report.id) + "\n";
    out += "seed," + std::to_string(report.seed) + "\n";
    for (const auto& [name, value] : report.params)
        out += "param." + csv_field(name) + "," + csv_field(value) + "\n";
    for (const auto& [name, value] : report.estimates)
        out += "estimate." + csv_field(name) + "," + format_double(value) + "\n";
    for (const auto& [name, value] : report.diagnostics)
        out += "diagnostic." + csv_field(name) + "," + format_double(value) + "\n";
    out += "wall_ms," + format_double(report.wall_ms) + "\n";
    if (report.has_trace()) {
        out += "iteration,dim,value\n";
        for (Eigen::Index i = 0; i < report.trace.rows(); ++i)
            for (Eigen::Index d = 0; d < report.trace.cols(); ++d)
                out += std::to_string(i) + "," + std::to_string(d) + "," +
                       format_double(report.trace(i, d)) + "\n";
    }
    return out;
}

std::string report_to_json(const ExperimentReport& report) {
    require_finite(report);
    ojson j;
    j["id"] = report.id;
    j["seed"] = report.seed;
    ojson params = ojson::object();
    for (const auto& [name, value] : report.params) params[name] = value;
    j["params"] = params;
    ojson estimates = ojson::object();
    for (const auto& [name, value] : report.estimates) estimates[name] = value;
    j["estimates"] = estimates;
    ojson diagnostics = ojson::object();
    for (const auto& [name, value] : report.diagnostics) diagnostics[name] = value;
    j["diagnostics"] = diagnostics;
    j["wall_ms"] = report.wall_ms;
    if (report.has_trace()) {
        ojson rows = ojson::array();
        for (Eigen::Index i = 0; i < report.trace.rows(); ++i) {
            ojson row = ojson::array();
            for (Eigen::Index d = 0; d < report.trace.cols(); ++d)
                row.push_back(report.trace(i, d));
            rows.push_back(row);
        }
        j["trace"] = rows;
    }
    return j.dump() + "\n";
}

ExperimentReport report_from_json(const std::string& text) {
    ojson j = ojson::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object())
        throw parameter_error("report_from_json: input is not a JSON object");
    ExperimentReport report;
    try {
        report.id = j.at("id").get<std::string>();
        report.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& [name, value] : j.at("params").items())
            report.params.emplace_back(name, value.get<std::string>());
        for (const auto& [name, value] : j.at("estimates").items())
            report.estimates.emplace_back(name, value.get<double>());
        for (const auto& [name, value] : j.at("diagnostics").items())
            report.diagnostics.emplace_back(name, value.get<double>());
        report.wall_ms = j.at("wall_ms").get<double>();
        if (j.contains("trace")) {
            const auto& rows = j.at("trace");
            auto n = static_cast<Eigen::Index>(rows.size());
            if (n > 0) {
                auto d = static_cast<Eigen::Index>(rows.at(0).size());
                report.trace.resize(n, d);
                for (Eigen::Index i = 0; i < n; ++i) {
                    const auto& row = rows.at(static_cast<std::size_t>(i));
                    if (static_cast<Eigen::Index>(row.size()) != d)
                        throw parameter_error("report_from_json: ragged trace rows");
                    for (Eigen::Index c = 0; c < d; ++c)
                        report.trace(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
                }
            }
        }
    } catch (const ojson::exception& e) {
        throw parameter_error(std::string("report_from_json: ") + e.what());
    }
    return report;
}

void write_report(const ExperimentReport& report, ReportFormat format,
                  const std::string& path) {
    std::string body =
        format == ReportFormat::csv ? report_to_csv(report) : report_to_json(report);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw parameter_error("write_report: cannot open " + path);
    out << body;
    if (!out) throw parameter_error("write_report: write failed for " + path);
}

}  // namespace bayeslab
