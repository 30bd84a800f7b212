#pragma once

#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "bayeslab/dist.hpp"
#include "bayeslab/rng.hpp"

namespace bayeslab {

using ScalarFn = std::function<double(double)>;

struct WeightedSample {
    std::vector<double> points;
    std::vector<double> log_weights;
};

struct ImportanceEstimate {
    double estimate;
    double ess;               // (sum w)^2 / sum w^2
    double max_weight_share;  // largest normalized weight
};

struct ArReport {
    std::vector<double> draws;
    long long trials = 0;
    double m_tilde = 1.0;
};

struct HpdRegion {
    double level;  // threshold on the normalized density
    double mass;   // trapezoid mass of the region
    std::vector<std::pair<double, double>> intervals;
};

// Attach self-normalized importance weights log f(x) - log g(x) to points.
WeightedSample weight_points(const ScalarFn& log_target_unnorm, const ScalarFn& log_proposal,
                             std::span<const double> points);

ImportanceEstimate importance_estimate(const ScalarFn& h, const WeightedSample& sample);
ImportanceEstimate importance_estimate(const ScalarFn& h, const ScalarFn& log_target_unnorm,
                                       const ScalarFn& log_proposal,
                                       std::span<const double> points);

// N / sum exp(-log l_j); the infamous harmonic mean of likelihoods.
double harmonic_mean_evidence(std::span<const double> log_likelihoods);

// Closed-form evidence of the zero-mean normal model with gamma prior on the
// precision; the quantity the harmonic mean keeps missing.
double exact_precision_evidence(std::span<const double> data, double prior_shape,
                                double prior_rate);

// Rejection sampling under exp(log_target_unnorm) <= m_tilde * proposal pdf.
// A trial whose density ratio exceeds the bound aborts with the offending x.
ArReport accept_reject(const ScalarFn& log_target_unnorm, const ScalarDistribution& proposal,
                       double m_tilde, long long count, RngState& rng);

// 1 / (acceptance rate * m_tilde): recovers the target's normalizing constant.
double estimate_normalizing_constant(const ArReport& report);

// One slice-sampling transition: draw a level under the density at x, then
// sample the level set uniformly by shrinking [lo, hi] toward x.
double slice_sampler_step(const ScalarFn& log_target_unnorm, double x, RngState& rng,
                          double lo, double hi);

// Highest-density region from a density evaluated on an ascending grid.
// Scans thresholds downward through the grid's density values and stops at
// the first whose super-level set (ties included) reaches mass alpha.
HpdRegion hpd_from_grid(const ScalarFn& log_target_unnorm, std::span<const double> grid,
                        double alpha);

// Monte Carlo Bayes factor for the two-sample mean-shift problem, averaging
// over xi ~ N(0, tau^2) draws of the shift.
double bayes_factor_mc_two_sample(double xbar, double ybar, double s2_xy, int n, double tau,
                                  long long n_sims, RngState& rng);

}  // namespace bayeslab
