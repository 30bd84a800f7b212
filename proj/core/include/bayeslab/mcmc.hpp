#pragma once

#include <functional>
#include <span>
#include <vector>

#include "bayeslab/dist.hpp"
#include "bayeslab/linalg.hpp"
#include "bayeslab/rng.hpp"

namespace bayeslab {

struct Trace {
    Matrix draws;                 // iterations x dims
    std::vector<char> accepted;   // per-iteration accept flag, MH kernels only
    int warmup = 0;               // default 10% of iterations
    std::vector<int> sidecar;     // kernel-specific per-iteration tag; empty unless the
                                  // sampler documents one (mixture RW: scale picked,
                                  // two-component mixture Gibbs: allocation bitmask)
    bool flagged = false;         // degenerate-input warning (e.g. probit separation)

    int iterations() const { return static_cast<int>(draws.rows()); }
    int dims() const { return static_cast<int>(draws.cols()); }
};

enum class KernelKind {
    independence,
    random_walk,
    random_walk_mixture,
    transformed_rw_log,    // RW on log x; Jacobian folded into the ratio
    transformed_rw_logit,  // RW on logit x; Jacobian folded into the ratio
};

enum class StepFamily { normal, cauchy };

struct KernelSpec {
    KernelKind kind = KernelKind::random_walk;
    ScalarDistribution proposal = ScalarDistribution::normal(0.0, 1.0);  // independence only
    std::vector<double> scales = {1.0};  // step scale(s) for the walk variants
    StepFamily step = StepFamily::normal;

    static KernelSpec independence(ScalarDistribution proposal);
    static KernelSpec random_walk(double scale, StepFamily step = StepFamily::normal);
    static KernelSpec random_walk_mixture(std::vector<double> scales,
                                          StepFamily step = StepFamily::normal);
    static KernelSpec transformed_rw_log(double scale);
    static KernelSpec transformed_rw_logit(double scale);
};

using ScalarTarget = std::function<double(double)>;

// Log acceptance ratio for a move current -> proposed, given the unnormalized
// log target at both points.  Folds in the proposal density (independence
// kernel) or the change-of-variable terms (log / logit walks); the symmetric
// walks reduce to the log target difference.
double mh_log_ratio(const KernelSpec& kernel, double current, double current_log_target,
                    double proposed, double proposed_log_target);

Trace mh_chain(const ScalarTarget& log_target_unnorm, const KernelSpec& kernel, double x0,
               int iters, RngState& rng);

// Two-block sampler for x_i ~ N(theta, sigma2), theta ~ N(theta0, tau2),
// sigma2 ~ IG(a, b). Trace columns: (theta, sigma2).
Trace gibbs_normal_model(std::span<const double> data, double theta0, double tau2, double a,
                         double b, int iters, RngState& rng);

// eta | theta ~ Bin(n, theta), theta | eta ~ Be(a + eta, b + n - eta).
// Trace columns: (theta, eta); theta's long-run law is Be(a, b).
Trace gibbs_beta_binomial(int n, double a, double b, int iters, RngState& rng);

// Data augmentation for binary regression with probit link: latent z from
// half-line truncated normals (sign follows y), then
// beta | z ~ N((X'X)^{-1}X'z, (X'X)^{-1}). Trace columns: beta.
// All-0 or all-1 responses set trace.flagged (posterior may be improper).
Trace gibbs_probit(const std::vector<int>& y, const Matrix& X, int iters, RngState& rng);

struct ChainSummary {
    Vector means;
    Vector sds;
    Matrix acf;               // (max_lag + 1) x dims, row 0 is lag 0
    double acceptance_rate;   // NaN for samplers without accept flags
};

ChainSummary chain_summary(const Trace& trace, int warmup);
ChainSummary chain_summary(const Trace& trace);  // uses trace.warmup

}  // namespace bayeslab
