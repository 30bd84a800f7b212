#pragma once

#include <vector>

#include "bayeslab/mcmc.hpp"
#include "bayeslab/rng.hpp"

namespace bayeslab {

// Posterior over a population size N, stored as normalized log-probabilities
// on a contiguous integer window [support_min, support_min + log_mass.size() - 1].
//
// `normalizer` is the constant the raw mass was divided by.  For posteriors
// built by summation it holds the log of the raw-mass sum; for the closed-form
// uniform-prior posterior it holds the exact linear constant (n+ or 1).
//
// `tail_bound` is an upper bound on the probability mass beyond the stored
// window.  Summation-built posteriors keep it below 1e-8 (growing the window
// as needed); the 1/(N(N+1)) posterior has so heavy a tail that any finite
// window leaves visible mass, so its bound is simply reported as-is.
struct DiscretePosterior {
    long long support_min = 1;
    std::vector<double> log_mass;
    double normalizer = 0.0;
    double tail_bound = 0.0;

    long long support_max() const {
        return support_min + static_cast<long long>(log_mass.size()) - 1;
    }
};

double posterior_mean(const DiscretePosterior& post);
// Smallest m with P(N <= m) >= 1/2.
long long posterior_median(const DiscretePosterior& post);
long long posterior_mode(const DiscretePosterior& post);
// P(N <= m) over the stored window.
double posterior_cdf(const DiscretePosterior& post, long long m);

struct PosteriorSummary {
    DiscretePosterior posterior;
    double mean = 0.0;
    long long median = 0;
    // False when the exact posterior mean diverges (uniform-prior case);
    // `mean` is then +infinity.
    bool mean_finite = true;
};

// Posterior for N under prior 1/N and likelihood 1/(N+1), i.e. mass
// proportional to 1/(N(N+1)) on N >= max(n+, 1).  The telescoping sum gives
// the normalizing constant max(n+, 1) and median 2 max(n+, 1) - 1 exactly;
// the mean diverges.  `window` controls how much of the support is
// materialized (capped representation; summaries use the closed forms).
PosteriorSummary uniform_prior_posterior(long long n_plus, long long window = -1);

// Tag-recovery posterior over N from a release of n1_plus animals followed by
// recapture counts in later seasons (k = 1 + recaptures.size() seasons total).
// Mass proportional to
//   (N-1)!/(N-n1+)! * (N + k n1+ - n.+)!/(N + k n1+ + 1)!
// where n.+ is the total capture count.  support_max < 0 grows the window
// geometrically from 4 n1+ until the tail bound drops below 1e-8; an explicit
// support_max that leaves more tail mass than that raises a numeric guard.
PosteriorSummary tag_recovery_posterior(long long n1_plus,
                                        const std::vector<long long>& recaptures,
                                        long long support_max = -1);

// Crude moment estimate n1+ / p_hat with p_hat the per-season recovery rate,
// for side-by-side reporting with the posterior summaries.
double tag_recovery_moment_estimate(long long n1_plus,
                                    const std::vector<long long>& recaptures);

struct TwoStageData {
    long long n1 = 0;
    long long n2 = 0;
    long long m2 = 0;

    long long n_plus() const { return n1 + n2 - m2; }
    long long n_c() const { return n1 + n2; }
};

// Distribution of the second-stage recapture count m2 when n1 of N animals
// are marked and n2 are drawn without replacement: hypergeometric, with mean
// n1 n2 / N independent of the capture probability.
struct HypergeometricRecapture {
    long long m2_min = 0;
    std::vector<double> pmf;
    double expectation = 0.0;
};

HypergeometricRecapture hypergeometric_recapture(long long N, long long n1, long long n2);

// Two-stage capture-recapture posterior under prior 1/N:
// mass proportional to (N-1)!/(N-n+)! * (2N-n^c)!/(2N+1)!.
PosteriorSummary darroch_posterior(const TwoStageData& data, long long support_max = -1);

struct DarrochMle {
    long long estimate = 0;
    // m2 = 0 leaves the likelihood increasing in N without bound.
    bool defined = false;
};

// Integer maximizer of the hypergeometric likelihood, the floor/ceil
// neighbor of n1 n2 / m2 (ties resolved toward the ratio itself).
DarrochMle darroch_mle(const TwoStageData& data);

enum class CapturePrior {
    one_over_n,
    poisson,
};

// Two-block sampler for (N, p) in the two-stage model.  Under the Poisson(λ)
// prior both conditionals are exact: p | N ~ Be(n^c+1, 2N-n^c+1) and
// N - n+ | p ~ P(λ(1-p)^2).  Under the 1/N prior the N-step is the
// shifted-Poisson Metropolis-Hastings move of tstage_mh_posterior with T=2.
// Trace columns: (N, p).  `lambda` is only read for the Poisson prior.
Trace twostage_gibbs(const TwoStageData& data, CapturePrior prior, double lambda,
                     int iters, RngState& rng);

// T-stage generalization targeting pi(N) proportional to
// (N-1)!/(N-n+)! * (TN-n^c)!/(TN+1)!.  Each sweep draws
// p ~ Be(n^c+1, TN-n^c+1), proposes N' = n+ + P(N(1-p)^T) and accepts on the
// log-factorial ratio with the Poisson proposal correction.
// Trace columns: (N, p).
Trace tstage_mh_posterior(int T, long long n_plus, long long n_c, int iters,
                          RngState& rng);

struct TStageStats {
    long long n1 = 0;
    long long n_plus = 0;
    long long n_star = 0;
    long long m_plus = 0;
};

// Sufficient statistics of the T-stage model where a first capture (prob p)
// switches an animal to recapture probability q.  The stage-by-stage binomial
// product collapses to p^{n+} (1-p)^{TN-n*} q^{m+} (1-q)^{n*-n+-m+}.
// captures holds n_1..n_T, recaptures holds m_2..m_T.
TStageStats tstage_sufficient_stats(const std::vector<long long>& captures,
                                    const std::vector<long long>& recaptures, int T);

// Observed-data log-likelihood for the two-stage model with mark loss:
// of the n1 marked animals, z lose their mark (prob q each), k of the
// lost-mark animals are nevertheless identified (prob r each), and m2 marked
// recaptures are counted among the mark keepers.  The latent z is summed out
// over its feasible range; an empty range yields -infinity.
double markloss_log_likelihood(long long N, double p, double q, double r,
                               long long n1, long long n2, long long m2, long long k);

struct OpenPopData {
    long long n1 = 0;
    long long c2 = 0;
    long long c3 = 0;
    long long r2 = 0;
};

enum class R1Method {
    // Exact categorical over the feasible range, weights
    // C(n1-c2, r1) C(n1-r1, r2+c3) [q/((1-q)^2(1-p)^2)]^{r1}.
    full_conditional,
    // r2 summed out of the joint: weights
    // (n1-r1)! / (r1! (n1-r1-c2)! (n1-r1-c3)!) * b^{r1} with
    // b = q / ((1-p)(1-q)[q + (1-p)(1-q)]).
    marginalized,
    // Rejection from a Binomial(barr, q) envelope over the same support as
    // full_conditional, barr = min(n1-c2, n1-r2-c3); the envelope constant is
    // recomputed as the exact maximum of target/proposal over the support.
    accept_reject,
};

struct R1Draw {
    long long r1 = 0;
    // 1/trials for the rejection method, 1.0 for the exact ones.
    double acceptance_rate = 1.0;
};

// One draw of r1, the number of first-season captures that die before the
// second season, in the three-season open-population model.
R1Draw openpop_r1_sampler(const OpenPopData& data, double p, double q,
                          R1Method method, RngState& rng);

// Normalized pmf over r1 = 0..support_max for the two exact methods
// (accept_reject has no closed pmf of its own and is rejected here).
std::vector<double> openpop_r1_pmf(const OpenPopData& data, double p, double q,
                                   R1Method method);

struct BetaFit {
    double alpha_scale = 0.0;
    double a = 0.0;
    double b = 0.0;
    double achieved = 0.0;
};

// Finds Be(alpha m, alpha(1-m)) whose mass on (lo, hi) equals `coverage`,
// by bisection in alpha: the interval mass increases continuously from 0
// (mass escaping to the endpoints) to 1 (concentration at the mean), so a
// unique scale exists whenever lo < m < hi.  Stops at |achieved - coverage|
// < 1e-6.
BetaFit beta_from_mean_ci(double mean, double lo, double hi, double coverage);

}  // namespace bayeslab
