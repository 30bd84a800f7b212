#include "bayeslab/capture.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "bayeslab/dist.hpp"
#include "bayeslab/errors.hpp"
#include "bayeslab/special.hpp"

namespace bayeslab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
constexpr double kTailTol = 1e-8;

double xlogy(double x, double y) {
    if (x == 0.0) return 0.0;
    return x * std::log(y);
}

double log_poisson_pmf(long long k, double mu) {
    if (k < 0) return kNegInf;
    if (mu == 0.0) return k == 0 ? 0.0 : kNegInf;
    return xlogy(static_cast<double>(k), mu) - mu - log_factorial(k);
}

// Normalized mean/median/cdf helpers assume log_mass is already normalized.
double window_mean(const DiscretePosterior& post) {
    double mean = 0.0;
    for (std::size_t i = 0; i < post.log_mass.size(); ++i) {
        mean += std::exp(post.log_mass[i]) *
                static_cast<double>(post.support_min + static_cast<long long>(i));
    }
    return mean;
}

long long window_median(const DiscretePosterior& post) {
    double cdf = 0.0;
    for (std::size_t i = 0; i < post.log_mass.size(); ++i) {
        cdf += std::exp(post.log_mass[i]);
        if (cdf >= 0.5) return post.support_min + static_cast<long long>(i);
    }
    return post.support_max();
}

// Builds a normalized posterior by exact log-space summation of `log_raw`
// over [support_min, hi].  The tail beyond hi is estimated by fitting the
// local power-law exponent at the window end and integrating it out; a factor
// of two keeps the estimate honest against slowly drifting exponents.  With
// support_max < 0 the window doubles until the estimate clears kTailTol.
DiscretePosterior summed_posterior(long long support_min,
                                   const std::function<double(long long)>& log_raw,
                                   long long support_max) {
    bool automatic = support_max < 0;
    long long hi = automatic ? std::max(4 * support_min, support_min + 32) : support_max;
    if (hi < support_min) throw parameter_error("support_max below the posterior support");

    for (;;) {
        std::vector<double> lm;
        lm.reserve(static_cast<std::size_t>(hi - support_min + 1));
        for (long long N = support_min; N <= hi; ++N) lm.push_back(log_raw(N));
        double lse = log_sum_exp(lm);
        if (!std::isfinite(lse)) {
            throw numeric_guard_error("posterior mass vanished over the requested support");
        }

        double tail = std::numeric_limits<double>::infinity();
        std::size_t M = lm.size();
        if (M >= 2 && lm[M - 1] < lm[M - 2]) {
            double nlast = static_cast<double>(hi);
            double slope = (lm[M - 1] - lm[M - 2]) / (std::log(nlast) - std::log(nlast - 1.0));
            double a = -slope;
            if (a > 1.0) {
                tail = 2.0 * std::exp(lm[M - 1] - lse) * nlast / (a - 1.0);
            }
        }

        if (tail < kTailTol) {
            DiscretePosterior post;
            post.support_min = support_min;
            post.log_mass = std::move(lm);
            for (double& v : post.log_mass) v -= lse;
            post.normalizer = lse;
            post.tail_bound = tail;
            return post;
        }
        if (!automatic) {
            throw numeric_guard_error(
                "support_max leaves estimated tail mass above 1e-8; increase it", tail);
        }
        if (hi >= (1LL << 24)) {
            throw numeric_guard_error("posterior window exceeded 2^24 before meeting the tail tolerance");
        }
        hi *= 2;
    }
}

}  // namespace

double posterior_mean(const DiscretePosterior& post) { return window_mean(post); }

long long posterior_median(const DiscretePosterior& post) { return window_median(post); }

long long posterior_mode(const DiscretePosterior& post) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < post.log_mass.size(); ++i) {
        if (post.log_mass[i] > post.log_mass[best]) best = i;
    }
    return post.support_min + static_cast<long long>(best);
}

double posterior_cdf(const DiscretePosterior& post, long long m) {
    if (m < post.support_min) return 0.0;
    double cdf = 0.0;
    long long stop = std::min(m, post.support_max());
    for (long long N = post.support_min; N <= stop; ++N) {
        cdf += std::exp(post.log_mass[static_cast<std::size_t>(N - post.support_min)]);
    }
    return cdf;
}

PosteriorSummary uniform_prior_posterior(long long n_plus, long long window) {
    if (n_plus < 0) throw parameter_error("n_plus must be nonnegative");
    long long n0 = std::max(n_plus, 1LL);
    long long hi = window > 0 ? n0 + window - 1 : std::max(10 * n0, 2 * n0 + 8);

    DiscretePosterior post;
    post.support_min = n0;
    post.log_mass.reserve(static_cast<std::size_t>(hi - n0 + 1));
    double log_n0 = std::log(static_cast<double>(n0));
    for (long long N = n0; N <= hi; ++N) {
        double dn = static_cast<double>(N);
        post.log_mass.push_back(log_n0 - std::log(dn) - std::log1p(dn));
    }
    post.normalizer = static_cast<double>(n0);
    // Telescoping: mass beyond hi is exactly n0/(hi+1).  Far above 1e-8 for
    // any storable window; summaries below use the closed forms instead.
    post.tail_bound = static_cast<double>(n0) / static_cast<double>(hi + 1);

    PosteriorSummary out;
    out.posterior = std::move(post);
    out.mean = std::numeric_limits<double>::infinity();
    out.mean_finite = false;
    out.median = 2 * n0 - 1;
    return out;
}

PosteriorSummary tag_recovery_posterior(long long n1_plus,
                                        const std::vector<long long>& recaptures,
                                        long long support_max) {
    if (n1_plus < 0) throw parameter_error("n1_plus must be nonnegative");
    long long n_dot = n1_plus;
    for (long long m : recaptures) {
        if (m < 0 || m > n1_plus) throw parameter_error("recapture counts must lie in [0, n1_plus]");
        n_dot += m;
    }
    long long k = 1 + static_cast<long long>(recaptures.size());
    long long offset = k * n1_plus;
    long long support_min = std::max(n1_plus, 1LL);

    auto log_raw = [=](long long N) {
        return log_factorial(N - 1) - log_factorial(N - n1_plus) +
               log_factorial(N + offset - n_dot) - log_factorial(N + offset + 1);
    };

    PosteriorSummary out;
    out.posterior = summed_posterior(support_min, log_raw, support_max);
    out.mean = window_mean(out.posterior);
    out.median = window_median(out.posterior);
    return out;
}

double tag_recovery_moment_estimate(long long n1_plus,
                                    const std::vector<long long>& recaptures) {
    if (n1_plus <= 0 || recaptures.empty()) {
        throw parameter_error("moment estimate needs a release and at least one recovery season");
    }
    long long total = 0;
    for (long long m : recaptures) total += m;
    if (total == 0) throw parameter_error("moment estimate undefined with no recoveries");
    double p_hat = static_cast<double>(total) /
                   static_cast<double>(static_cast<long long>(recaptures.size()) * n1_plus);
    return static_cast<double>(n1_plus) / p_hat;
}

HypergeometricRecapture hypergeometric_recapture(long long N, long long n1, long long n2) {
    if (N < 0 || n1 < 0 || n2 < 0 || n1 > N || n2 > N) {
        throw parameter_error("need 0 <= n1, n2 <= N");
    }
    HypergeometricRecapture out;
    out.m2_min = std::max(0LL, n1 + n2 - N);
    long long m2_max = std::min(n1, n2);
    double denom = log_choose(N, n2);
    out.pmf.reserve(static_cast<std::size_t>(m2_max - out.m2_min + 1));
    for (long long m2 = out.m2_min; m2 <= m2_max; ++m2) {
        out.pmf.push_back(std::exp(log_choose(n1, m2) + log_choose(N - n1, n2 - m2) - denom));
    }
    out.expectation = N == 0 ? 0.0
                             : static_cast<double>(n1) * static_cast<double>(n2) /
                                   static_cast<double>(N);
    return out;
}

namespace {

void validate_two_stage(const TwoStageData& d) {
    if (d.n1 < 0 || d.n2 < 0 || d.m2 < 0 || d.m2 > std::min(d.n1, d.n2)) {
        throw parameter_error("two-stage counts need 0 <= m2 <= min(n1, n2)");
    }
}

}  // namespace

PosteriorSummary darroch_posterior(const TwoStageData& data, long long support_max) {
    validate_two_stage(data);
    long long n_plus = data.n_plus();
    long long n_c = data.n_c();
    long long support_min = std::max(n_plus, 1LL);

    auto log_raw = [=](long long N) {
        return log_factorial(N - 1) - log_factorial(N - n_plus) +
               log_factorial(2 * N - n_c) - log_factorial(2 * N + 1);
    };

    PosteriorSummary out;
    out.posterior = summed_posterior(support_min, log_raw, support_max);
    out.mean = window_mean(out.posterior);
    out.median = window_median(out.posterior);
    return out;
}

DarrochMle darroch_mle(const TwoStageData& data) {
    validate_two_stage(data);
    DarrochMle out;
    if (data.m2 == 0) return out;

    double ratio = static_cast<double>(data.n1) * static_cast<double>(data.n2) /
                   static_cast<double>(data.m2);
    long long floor_n = static_cast<long long>(std::floor(ratio));
    long long lo = std::max({data.n_plus(), data.n1, data.n2});

    auto log_lik = [&](long long N) {
        return log_choose(N - data.n1, data.n2 - data.m2) - log_choose(N, data.n2);
    };

    long long best = lo;
    double best_ll = log_lik(lo);
    for (long long cand : {floor_n - 1, floor_n, floor_n + 1}) {
        if (cand < lo) continue;
        double ll = log_lik(cand);
        bool better = ll > best_ll + 1e-12;
        bool tie = std::abs(ll - best_ll) <= 1e-12 &&
                   std::abs(static_cast<double>(cand) - ratio) <
                       std::abs(static_cast<double>(best) - ratio);
        if (better || tie) {
            best = cand;
            best_ll = ll;
        }
    }
    out.estimate = best;
    out.defined = true;
    return out;
}

Trace tstage_mh_posterior(int T, long long n_plus, long long n_c, int iters,
                          RngState& rng) {
    if (T < 1) throw parameter_error("need T >= 1");
    if (n_plus < 0 || n_c < n_plus || n_c > T * n_plus) {
        throw parameter_error("need n_plus <= n_c <= T * n_plus");
    }
    if (iters < 1) throw parameter_error("need iters >= 1");

    auto rati = [&](long long N) {
        return log_factorial(N - 1) + log_factorial(T * N - n_c) -
               log_factorial(N - n_plus) - log_factorial(T * N + 1);
    };

    Trace trace;
    trace.draws = Matrix::Zero(iters, 2);
    trace.accepted.assign(static_cast<std::size_t>(iters), 0);
    trace.warmup = iters / 10;

    long long N = std::max(2 * n_plus, 1LL);
    long long floor_n = std::max(n_plus, 1LL);
    for (int i = 0; i < iters; ++i) {
        double p = sample_beta(static_cast<double>(n_c + 1),
                               static_cast<double>(T * N - n_c + 1), rng);
        double miss = std::pow(1.0 - p, T);
        long long prop = n_plus + sample_poisson(static_cast<double>(N) * miss, rng);
        if (prop >= floor_n) {
            double log_r = rati(prop) - rati(N) +
                           log_poisson_pmf(N - n_plus, static_cast<double>(prop) * miss) -
                           log_poisson_pmf(prop - n_plus, static_cast<double>(N) * miss);
            if (std::log(rng.next_double()) < log_r) {
                N = prop;
                trace.accepted[static_cast<std::size_t>(i)] = 1;
            }
        }
        trace.draws(i, 0) = static_cast<double>(N);
        trace.draws(i, 1) = p;
    }
    return trace;
}

Trace twostage_gibbs(const TwoStageData& data, CapturePrior prior, double lambda,
                     int iters, RngState& rng) {
    validate_two_stage(data);
    if (iters < 1) throw parameter_error("need iters >= 1");
    long long n_plus = data.n_plus();
    long long n_c = data.n_c();

    if (prior == CapturePrior::one_over_n) {
        return tstage_mh_posterior(2, n_plus, n_c, iters, rng);
    }

    if (!(lambda > 0.0)) throw parameter_error("Poisson prior needs lambda > 0");
    Trace trace;
    trace.draws = Matrix::Zero(iters, 2);
    trace.warmup = iters / 10;

    long long N = 2 * n_plus;
    for (int i = 0; i < iters; ++i) {
        double p = sample_beta(static_cast<double>(n_c + 1),
                               static_cast<double>(2 * N - n_c + 1), rng);
        double unseen = (1.0 - p) * (1.0 - p);
        N = n_plus + sample_poisson(lambda * unseen, rng);
        trace.draws(i, 0) = static_cast<double>(N);
        trace.draws(i, 1) = p;
    }
    return trace;
}

TStageStats tstage_sufficient_stats(const std::vector<long long>& captures,
                                    const std::vector<long long>& recaptures, int T) {
    if (T < 1) throw parameter_error("need T >= 1");
    if (static_cast<int>(captures.size()) != T ||
        static_cast<int>(recaptures.size()) != T - 1) {
        throw parameter_error("need T capture counts and T-1 recapture counts");
    }
    for (long long n : captures) {
        if (n < 0) throw parameter_error("capture counts must be nonnegative");
    }
    TStageStats out;
    out.n1 = captures[0];
    out.n_plus = captures[0];
    out.n_star = static_cast<long long>(T) * captures[0];
    for (int j = 2; j <= T; ++j) {
        long long nj = captures[static_cast<std::size_t>(j - 1)];
        long long mj = recaptures[static_cast<std::size_t>(j - 2)];
        if (mj < 0 || mj > nj) throw parameter_error("need 0 <= m_j <= n_j");
        out.n_plus += nj - mj;
        out.n_star += static_cast<long long>(T - j + 1) * (nj - mj);
        out.m_plus += mj;
    }
    return out;
}

double markloss_log_likelihood(long long N, double p, double q, double r,
                               long long n1, long long n2, long long m2, long long k) {
    if (N < 0 || n1 < 0 || n2 < 0 || m2 < 0 || k < 0 || n1 > N || m2 > n1 || m2 > n2) {
        throw parameter_error("infeasible mark-loss counts");
    }
    for (double prob : {p, q, r}) {
        if (!(prob >= 0.0 && prob <= 1.0)) {
            throw parameter_error("probabilities must lie in [0, 1]");
        }
    }

    long long z_lo = std::max({k, n1 + n2 - m2 - N, 0LL});
    long long z_hi = n1 - m2;
    if (z_lo > z_hi) return kNegInf;

    double base = log_choose(N, n1) + xlogy(static_cast<double>(n1), p) +
                  xlogy(static_cast<double>(N - n1), 1.0 - p);
    std::vector<double> terms;
    terms.reserve(static_cast<std::size_t>(z_hi - z_lo + 1));
    for (long long z = z_lo; z <= z_hi; ++z) {
        double t = base;
        t += log_choose(n1, z) + xlogy(static_cast<double>(z), q) +
             xlogy(static_cast<double>(n1 - z), 1.0 - q);
        t += log_choose(z, k) + xlogy(static_cast<double>(k), r) +
             xlogy(static_cast<double>(z - k), 1.0 - r);
        t += log_choose(n1 - z, m2) + xlogy(static_cast<double>(m2), p) +
             xlogy(static_cast<double>(n1 - z - m2), 1.0 - p);
        t += log_choose(N - n1 + z, n2 - m2) + xlogy(static_cast<double>(n2 - m2), p) +
             xlogy(static_cast<double>(N - n1 + z - (n2 - m2)), 1.0 - p);
        terms.push_back(t);
    }
    return log_sum_exp(terms);
}

namespace {

std::vector<double> openpop_r1_log_weights(const OpenPopData& d, double p, double q,
                                           R1Method method) {
    if (d.n1 < 0 || d.c2 < 0 || d.c3 < 0 || d.r2 < 0) {
        throw parameter_error("open-population counts must be nonnegative");
    }
    if (!(p >= 0.0 && p < 1.0) || !(q >= 0.0 && q < 1.0)) {
        throw parameter_error("need capture and death probabilities in [0, 1)");
    }

    long long hi;
    double log_base;
    if (method == R1Method::marginalized) {
        hi = std::min(d.n1 - d.c2, d.n1 - d.c3);
        double stay = (1.0 - p) * (1.0 - q);
        log_base = q == 0.0 ? kNegInf : std::log(q) - std::log(1.0 - p) -
                                            std::log(1.0 - q) - std::log(q + stay);
    } else {
        hi = std::min(d.n1 - d.r2 - d.c3, d.n1 - d.c2);
        log_base = q == 0.0 ? kNegInf
                            : std::log(q) - 2.0 * std::log(1.0 - q) - 2.0 * std::log(1.0 - p);
    }
    if (hi < 0) throw parameter_error("empty r1 support for these counts");

    std::vector<double> lw(static_cast<std::size_t>(hi + 1));
    for (long long r1 = 0; r1 <= hi; ++r1) {
        double geom = r1 == 0 ? 0.0 : static_cast<double>(r1) * log_base;
        if (method == R1Method::marginalized) {
            lw[static_cast<std::size_t>(r1)] =
                log_factorial(d.n1 - r1) - log_factorial(r1) -
                log_factorial(d.n1 - r1 - d.c2) - log_factorial(d.n1 - r1 - d.c3) + geom;
        } else {
            lw[static_cast<std::size_t>(r1)] =
                log_choose(d.n1 - d.c2, r1) + log_choose(d.n1 - r1, d.r2 + d.c3) + geom;
        }
    }
    return lw;
}

}  // namespace

std::vector<double> openpop_r1_pmf(const OpenPopData& data, double p, double q,
                                   R1Method method) {
    if (method == R1Method::accept_reject) {
        throw parameter_error("accept_reject has no closed pmf; use full_conditional");
    }
    std::vector<double> lw = openpop_r1_log_weights(data, p, q, method);
    double lse = log_sum_exp(lw);
    if (!std::isfinite(lse)) throw numeric_guard_error("r1 weights vanished");
    std::vector<double> pmf(lw.size());
    for (std::size_t i = 0; i < lw.size(); ++i) pmf[i] = std::exp(lw[i] - lse);
    return pmf;
}

R1Draw openpop_r1_sampler(const OpenPopData& data, double p, double q,
                          R1Method method, RngState& rng) {
    R1Draw out;
    if (method != R1Method::accept_reject) {
        std::vector<double> pmf = openpop_r1_pmf(data, p, q, method);
        out.r1 = sample_categorical(pmf, rng);
        return out;
    }

    std::vector<double> lw = openpop_r1_log_weights(data, p, q, R1Method::full_conditional);
    long long barr = static_cast<long long>(lw.size()) - 1;

    // Exact envelope constant over the finite support; anywhere the binomial
    // proposal has zero mass the target must vanish too.
    double log_m = kNegInf;
    std::vector<double> log_prop(lw.size());
    for (long long y = 0; y <= barr; ++y) {
        auto i = static_cast<std::size_t>(y);
        log_prop[i] = log_choose(barr, y) + xlogy(static_cast<double>(y), q) +
                      xlogy(static_cast<double>(barr - y), 1.0 - q);
        if (log_prop[i] == kNegInf) {
            if (lw[i] != kNegInf) {
                throw numeric_guard_error("binomial envelope misses target support", lw[i]);
            }
            continue;
        }
        log_m = std::max(log_m, lw[i] - log_prop[i]);
    }
    if (!std::isfinite(log_m)) throw numeric_guard_error("r1 weights vanished");

    constexpr long long kMaxTrials = 10'000'000;
    for (long long trials = 1; trials <= kMaxTrials; ++trials) {
        long long y = sample_binomial(static_cast<int>(barr), q, rng);
        auto i = static_cast<std::size_t>(y);
        double log_acc = lw[i] == kNegInf ? kNegInf : lw[i] - log_prop[i] - log_m;
        if (std::log(rng.next_double()) < log_acc) {
            out.r1 = y;
            out.acceptance_rate = 1.0 / static_cast<double>(trials);
            return out;
        }
    }
    throw numeric_guard_error("rejection sampler exceeded its trial budget");
}

BetaFit beta_from_mean_ci(double mean, double lo, double hi, double coverage) {
    if (!(0.0 < lo && lo < mean && mean < hi && hi < 1.0)) {
        throw parameter_error("need 0 < lo < mean < hi < 1");
    }
    if (!(coverage > 0.0 && coverage < 1.0)) {
        throw parameter_error("need coverage in (0, 1)");
    }

    auto mass = [&](double alpha) {
        return inc_beta(alpha * mean, alpha * (1.0 - mean), hi) -
               inc_beta(alpha * mean, alpha * (1.0 - mean), lo);
    };

    double a_lo = 1e-6;
    while (mass(a_lo) > coverage && a_lo > 1e-290) a_lo *= 0.25;
    double a_hi = 1.0;
    while (mass(a_hi) < coverage) {
        a_hi *= 2.0;
        if (a_hi > 1e15) throw numeric_guard_error("coverage not attainable by any beta scale");
    }

    BetaFit out;
    for (int it = 0; it < 400; ++it) {
        double mid = 0.5 * (a_lo + a_hi);
        double m = mass(mid);
        out.alpha_scale = mid;
        out.achieved = m;
        if (std::abs(m - coverage) < 1e-6) break;
        if (m < coverage) {
            a_lo = mid;
        } else {
            a_hi = mid;
        }
    }
    out.a = out.alpha_scale * mean;
    out.b = out.alpha_scale * (1.0 - mean);
    return out;
}

}  // namespace bayeslab
