#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "bayeslab/report.hpp"

namespace bayeslab {

// Shared knobs of every experiment; `extra` carries the experiment-specific
// flags as bare key -> value strings (e.g. "nplus" -> "45").
struct ExperimentArgs {
    std::uint64_t seed = 20090516;
    // Iteration count where it applies; -1 keeps the experiment's default.
    long long iters = -1;
    std::map<std::string, std::string> extra;
};

std::vector<std::string> experiment_ids();
bool is_experiment(const std::string& id);

// Runs one registered experiment.  Unknown keys in args.extra raise
// parameter_error listing what the experiment accepts; wall_ms is left at
// zero so reports stay byte-identical across runs (callers that want the
// timing measure it around this call).
ExperimentReport run_experiment(const std::string& id, const ExperimentArgs& args);

}  // namespace bayeslab
