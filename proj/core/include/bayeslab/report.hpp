#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bayeslab/linalg.hpp"

namespace bayeslab {

// Machine-readable record of one experiment run.  Key/value sections keep
// insertion order so that serialization is reproducible; all numeric values
// must be finite (encode infinities through explicit flag entries instead).
struct ExperimentReport {
    std::string id;
    std::vector<std::pair<std::string, std::string>> params;
    std::uint64_t seed = 0;
    std::vector<std::pair<std::string, double>> estimates;
    std::vector<std::pair<std::string, double>> diagnostics;
    double wall_ms = 0.0;
    // Optional draw matrix (iterations x dims), 0x0 when absent.
    Matrix trace;

    bool has_trace() const { return trace.rows() > 0 && trace.cols() > 0; }

    void add_param(std::string name, std::string value) {
        params.emplace_back(std::move(name), std::move(value));
    }
    void add_estimate(std::string name, double value) {
        estimates.emplace_back(std::move(name), value);
    }
    void add_diagnostic(std::string name, double value) {
        diagnostics.emplace_back(std::move(name), value);
    }
};

bool operator==(const ExperimentReport& a, const ExperimentReport& b);

enum class ReportFormat { csv, json };

// key,value table with dotted prefixes (param., estimate., diagnostic.);
// a trace, if present, follows as a long-format iteration,dim,value block.
// Doubles use the shortest round-trip decimal form; lines end with LF.
std::string report_to_csv(const ExperimentReport& report);

// Single JSON object, keys in struct order, LF-terminated.
std::string report_to_json(const ExperimentReport& report);

// Inverse of report_to_json; round-trips to an equal in-memory report.
ExperimentReport report_from_json(const std::string& text);

void write_report(const ExperimentReport& report, ReportFormat format,
                  const std::string& path);

}  // namespace bayeslab
