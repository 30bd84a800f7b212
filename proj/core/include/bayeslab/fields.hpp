#pragma once

#include <functional>
#include <string>
#include <vector>

#include "bayeslab/linalg.hpp"
#include "bayeslab/rng.hpp"

namespace bayeslab {

enum class Neighborhood { four, eight };

// Rectangular lattice of integer labels in 0..G-1, row-major storage.
// Adjacency is the true grid structure: no wrap-around at boundaries.
struct Lattice {
    int rows = 0;
    int cols = 0;
    std::vector<int> labels;
    Neighborhood neighborhood = Neighborhood::four;

    int& at(int r, int c) { return labels[static_cast<std::size_t>(r * cols + c)]; }
    int at(int r, int c) const { return labels[static_cast<std::size_t>(r * cols + c)]; }
    int sites() const { return rows * cols; }
};

Lattice make_lattice(int rows, int cols, Neighborhood neighborhood = Neighborhood::four,
                     int fill = 0);
Lattice random_lattice(int rows, int cols, int G, RngState& rng,
                       Neighborhood neighborhood = Neighborhood::four);

// Number of neighbor pairs sharing a label (each unordered pair once).
// Flipping all colors of a two-color lattice leaves this count unchanged.
int lattice_agreements(const Lattice& l);

enum class SweepSchedule {
    // rows*cols single-site updates at uniformly random positions.
    random_scan,
    // Even-parity sites then odd-parity sites, in raster order.  Valid for
    // the four-neighbor graph only, where parity classes are independent.
    two_color,
};

// One Gibbs sweep for the G-color Potts density proportional to
// exp(beta * agreements): each visited site is redrawn from the conditional
// proportional to exp(beta * n_{site,g}).
Lattice gibbs_sweep(Lattice l, double beta, int G, RngState& rng,
                    SweepSchedule schedule = SweepSchedule::random_scan);

// log of the partition sum Z = sum over all G^(rows*cols) configurations of
// exp(beta * agreements), by exact enumeration (guarded to 2^26 states).
// The per-agreement-level configuration counts make the sum overflow-proof
// for any beta.
double exact_partition_log(int rows, int cols, int G, double beta,
                           Neighborhood neighborhood = Neighborhood::four);

// The reciprocal 1/Z, the convention some references report; exposed under
// its own name so the two cannot be confused.
double exact_partition_reciprocal(int rows, int cols, int G, double beta,
                                  Neighborhood neighborhood = Neighborhood::four);

// Maximal cliques of the eight-neighbor lattice graph are its 2x2 blocks:
// (rows-1)*(cols-1) of them.
long long clique_count_eight(int rows, int cols);

// Integral over [a0, a1] of the piecewise-linear interpolant through
// (betas[i], values[i]); exact on each segment, partial end segments
// included.
double piecewise_linear_integral(const std::vector<double>& betas,
                                 const std::vector<double>& values, double a0, double a1);

struct FieldPosteriorSample {
    std::vector<Lattice> states;
    double beta = 0.0;
    int G = 0;
};

// Marginal posterior mode estimate: per-site most frequent label across the
// samples, ties resolved to the smallest label.
Lattice mpm_estimate(const FieldPosteriorSample& samples);

// Highest-density visited state: the sample maximizing beta * agreements.
// An estimator of the MAP configuration, not an exact argmax.
Lattice map_estimate(const FieldPosteriorSample& samples, double beta);

struct L4Result {
    std::vector<int> labels;
    double risk = 0.0;
};

// Pairwise-coincidence risk of a labeling under P(x_i = x_j) estimates:
// sum over pairs of (1-P_ij) when co-clustered and P_ij when split.
double l4_risk(const Matrix& pair_prob, const std::vector<int>& labels);

// Greedy reallocation clustering minimizing l4_risk: each pass reassigns
// every site to its locally best label until a fixed configuration, repeated
// from `starts` random initializations keeping the best risk.  Local scheme;
// global optimality is not guaranteed.
L4Result l4_clustering(const Matrix& pair_prob, int G, RngState& rng, int starts = 10);

enum class ThresholdDirection {
    // Raise beta from 0 by `precision` steps until the lattice is unicolor.
    unicolor,
    // Lower beta from 0 by `precision` steps until a perfect checkerboard.
    checkerboard,
};

// Annealing experiment on a two-color lattice: per replication, runs
// `sweeps` random-scan sweeps at each successive beta step and records the
// first beta whose sweeps end in the target pattern.
std::vector<double> beta_threshold_experiment(
    int rows, int cols, double precision, int sweeps, int reps, RngState& rng,
    ThresholdDirection direction = ThresholdDirection::unicolor);

struct AbcResult {
    std::vector<double> accepted;
    double acceptance_rate = 0.0;
};

using AbcPriorSampler = std::function<double(RngState&)>;
using AbcForwardSampler = std::function<std::vector<double>(double theta, RngState&)>;
using AbcSummaryFn = std::function<std::vector<double>(const std::vector<double>&)>;
using AbcDistanceFn =
    std::function<double(const std::vector<double>&, const std::vector<double>&)>;

// Rejection ABC: draw theta from the prior, simulate data, keep theta when
// the summary distance to the observed data is at most epsilon.  With
// epsilon = 0 and a sufficient summary the kept draws follow the exact
// posterior.  Zero acceptances raise a numeric guard reporting the budget.
AbcResult abc_posterior(const AbcPriorSampler& prior, const AbcForwardSampler& model,
                        const AbcSummaryFn& stat, const std::vector<double>& observed,
                        double epsilon, const AbcDistanceFn& distance, int n_props,
                        RngState& rng);

// P(x_site = label | all other sites of config).
using SiteConditional = std::function<double(const Lattice& config, int site, int label)>;

// Reconstructs the full joint table from single-site conditionals by the
// telescoping ratio against a reference configuration, then normalizes.
// Entry index is the odometer rank of the configuration: site s (row-major)
// contributes labels[s] * G^s.  A zero conditional anywhere on the product
// support means the conditionals are incompatible with a positive joint.
std::vector<double> hc_joint_reconstruction(const SiteConditional& conditional,
                                            const Lattice& reference, int G);

// One row per line, space-separated labels.
std::string lattice_to_text(const Lattice& l);
Lattice lattice_from_text(const std::string& text,
                          Neighborhood neighborhood = Neighborhood::four);

}  // namespace bayeslab
