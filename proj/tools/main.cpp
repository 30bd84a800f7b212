// bayeslab command line: `bayeslab list` names the registered experiments,
// `bayeslab run <id> [flags]` executes one and emits its report.
//
// Reports are deterministic: the same seed and flags produce byte-identical
// output, so the measured wall time goes to stderr rather than into the
// report (whose wall_ms field stays zero).

#include <chrono>
#include <cstdint>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bayeslab/errors.hpp"
#include "bayeslab/experiments.hpp"
#include "bayeslab/report.hpp"

namespace {

// Leftover tokens after the common flags are experiment-specific settings,
// accepted as `--key value` or `--key=value`.
std::map<std::string, std::string> parse_extra_flags(const std::vector<std::string>& tokens) {
    std::map<std::string, std::string> extra;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string& tok = tokens[i];
        if (tok.rfind("--", 0) != 0 || tok.size() == 2)
            throw bayeslab::parameter_error("expected an experiment flag, got '" + tok + "'");
        std::string key, value;
        auto eq = tok.find('=');
        if (eq != std::string::npos) {
            key = tok.substr(2, eq - 2);
            value = tok.substr(eq + 1);
        } else {
            key = tok.substr(2);
            if (i + 1 >= tokens.size() || tokens[i + 1].rfind("--", 0) == 0)
                throw bayeslab::parameter_error("flag --" + key + " needs a value");
            value = tokens[++i];
        }
        if (key.empty())
            throw bayeslab::parameter_error("expected an experiment flag, got '" + tok + "'");
        if (!extra.emplace(key, value).second)
            throw bayeslab::parameter_error("flag --" + key + " given twice");
    }
    return extra;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Desk-scale Bayesian computation experiments"};
    app.require_subcommand(1);

    CLI::App* list_cmd = app.add_subcommand("list", "List the registered experiment ids");

    CLI::App* run_cmd = app.add_subcommand("run", "Run one experiment and emit its report");
    std::string id;
    std::uint64_t seed = 20090516;
    long long iters = -1;
    std::string out_path;
    std::string format = "csv";
    run_cmd->add_option("id", id, "experiment id, see `list`")->required();
    run_cmd->add_option("--seed", seed, "RNG seed (default 20090516)");
    run_cmd->add_option("--iters", iters, "iteration count, where the experiment has one");
    run_cmd->add_option("--out", out_path, "write the report to this file instead of stdout");
    run_cmd->add_option("--format", format, "report format")
        ->check(CLI::IsMember({"csv", "json"}));
    run_cmd->allow_extras();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 64;
    }

    if (list_cmd->parsed()) {
        for (const auto& known : bayeslab::experiment_ids()) std::cout << known << "\n";
        return 0;
    }

    if (!bayeslab::is_experiment(id)) {
        std::cerr << "unknown experiment id '" << id << "'; `bayeslab list` names them\n";
        return 64;
    }

    try {
        bayeslab::ExperimentArgs args;
        args.seed = seed;
        args.iters = iters;
        args.extra = parse_extra_flags(run_cmd->remaining());

        auto start = std::chrono::steady_clock::now();
        bayeslab::ExperimentReport report = bayeslab::run_experiment(id, args);
        std::chrono::duration<double, std::milli> elapsed =
            std::chrono::steady_clock::now() - start;
        std::cerr << id << ": " << elapsed.count() << " ms\n";

        bayeslab::ReportFormat fmt = format == "json" ? bayeslab::ReportFormat::json
                                                      : bayeslab::ReportFormat::csv;
        if (out_path.empty()) {
            std::cout << (fmt == bayeslab::ReportFormat::json
                              ? bayeslab::report_to_json(report)
                              : bayeslab::report_to_csv(report));
        } else {
            bayeslab::write_report(report, fmt, out_path);
            std::cerr << "wrote " << out_path << "\n";
        }
        return 0;
    } catch (const bayeslab::parameter_error& e) {
        std::cerr << "parameter error: " << e.what() << "\n";
        return 2;
    } catch (const bayeslab::numeric_guard_error& e) {
        std::cerr << "numeric guard: " << e.what() << "\n";
        return 3;
    }
}
