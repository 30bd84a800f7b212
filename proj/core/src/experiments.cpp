#include "bayeslab/experiments.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <string>
#include <vector>

#include "bayeslab/capture.hpp"
#include "bayeslab/conjugate.hpp"
#include "bayeslab/dist.hpp"
#include "bayeslab/errors.hpp"
#include "bayeslab/fields.hpp"
#include "bayeslab/mcmc.hpp"
#include "bayeslab/mixtures.hpp"
#include "bayeslab/montecarlo.hpp"
#include "bayeslab/timeseries.hpp"

namespace bayeslab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmt(double v) {
    std::array<char, 32> buf;
    auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), res.ptr);
}

long long parse_int(const std::string& raw, const std::string& key) {
    long long v = 0;
    auto res = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (res.ec != std::errc{} || res.ptr != raw.data() + raw.size())
        throw parameter_error("--" + key + ": cannot parse integer from '" + raw + "'");
    return v;
}

double parse_real(const std::string& raw, const std::string& key) {
    double v = 0.0;
    auto res = std::from_chars(raw.data(), raw.data() + raw.size(), v);
    if (res.ec != std::errc{} || res.ptr != raw.data() + raw.size())
        throw parameter_error("--" + key + ": cannot parse number from '" + raw + "'");
    return v;
}

std::vector<std::string> split_csv(const std::string& raw) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = raw.find(',', start);
        parts.push_back(raw.substr(start, comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return parts;
}

// Reads experiment flags out of args.extra, falling back to per-experiment
// defaults, and records every effective value in the report's parameter
// section (canonically formatted, so spelled-out defaults and explicit flags
// serialize identically).
class Flags {
public:
    Flags(const ExperimentArgs& args, ExperimentReport& rep)
        : extra_(args.extra), rep_(rep) {}

    long long integer(const std::string& key, long long fallback) {
        const std::string* raw = lookup(key);
        long long v = raw ? parse_int(*raw, key) : fallback;
        rep_.add_param(key, std::to_string(v));
        return v;
    }

    double real(const std::string& key, double fallback) {
        const std::string* raw = lookup(key);
        double v = raw ? parse_real(*raw, key) : fallback;
        rep_.add_param(key, fmt(v));
        return v;
    }

    std::string text(const std::string& key, const std::string& fallback) {
        const std::string* raw = lookup(key);
        std::string v = raw ? *raw : fallback;
        rep_.add_param(key, v);
        return v;
    }

    std::vector<long long> integer_list(const std::string& key,
                                        const std::string& fallback_csv) {
        const std::string* raw = lookup(key);
        std::vector<long long> out;
        std::string joined;
        for (const auto& part : split_csv(raw ? *raw : fallback_csv)) {
            out.push_back(parse_int(part, key));
            joined += (joined.empty() ? "" : ",") + std::to_string(out.back());
        }
        rep_.add_param(key, joined);
        return out;
    }

    std::vector<double> real_list(const std::string& key, const std::string& fallback_csv) {
        const std::string* raw = lookup(key);
        std::vector<double> out;
        std::string joined;
        for (const auto& part : split_csv(raw ? *raw : fallback_csv)) {
            out.push_back(parse_real(part, key));
            joined += (joined.empty() ? "" : ",") + fmt(out.back());
        }
        rep_.add_param(key, joined);
        return out;
    }

    void done() const {
        for (const auto& [key, value] : extra_) {
            if (seen_.count(key)) continue;
            std::string known;
            for (const auto& k : seen_) known += (known.empty() ? "" : ", ") + k;
            throw parameter_error(rep_.id + " does not take --" + key +
                                  (known.empty() ? "" : " (accepted: " + known + ")"));
        }
    }

private:
    const std::string* lookup(const std::string& key) {
        seen_.insert(key);
        auto it = extra_.find(key);
        return it == extra_.end() ? nullptr : &it->second;
    }

    const std::map<std::string, std::string>& extra_;
    ExperimentReport& rep_;
    std::set<std::string> seen_;
};

ExperimentReport base_report(const char* id, const ExperimentArgs& args) {
    ExperimentReport rep;
    rep.id = id;
    rep.seed = args.seed;
    return rep;
}

long long effective_iters(const ExperimentArgs& args, long long fallback,
                          ExperimentReport& rep) {
    long long iters = args.iters < 0 ? fallback : args.iters;
    if (iters < 1) throw parameter_error(rep.id + ": --iters must be at least 1");
    rep.add_param("iters", std::to_string(iters));
    return iters;
}

void reject_iters(const ExperimentArgs& args, const char* id) {
    if (args.iters >= 0)
        throw parameter_error(std::string(id) + " does not take --iters");
}

double normal_logpdf(double x, double mean, double variance) {
    double r = x - mean;
    return -0.5 * std::log(2.0 * std::numbers::pi * variance) - 0.5 * r * r / variance;
}

Matrix column_trace(const std::vector<double>& values) {
    Matrix m(static_cast<Eigen::Index>(values.size()), 1);
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        m(i, 0) = values[static_cast<std::size_t>(i)];
    return m;
}

// Shared synthetic two-component dataset: weights (.4, .6), means (0, 3.5),
// variances (1.1, 0.8).  Used by both the EM study and the mixture Gibbs
// run so their reports describe the same data.
std::vector<double> simulate_mixture_data(long long n, RngState& rng) {
    std::vector<double> x(static_cast<std::size_t>(n));
    for (auto& xi : x) {
        bool first = rng.next_double() < 0.4;
        double mean = first ? 0.0 : 3.5;
        double sd = std::sqrt(first ? 1.1 : 0.8);
        xi = mean + sd * sample_standard_normal(rng);
    }
    return x;
}

// ---------------------------------------------------------------------------
// capture experiments

ExperimentReport run_darroch(const ExperimentArgs& args) {
    auto rep = base_report("darroch", args);
    reject_iters(args, "darroch");
    Flags f(args, rep);
    long long nplus = f.integer("nplus", 45);
    long long nc = f.integer("nc", 50);
    f.done();
    if (nplus < 1 || nc < nplus || nc > 2 * nplus)
        throw parameter_error("darroch: need 1 <= nplus <= nc <= 2*nplus");

    // Two capture rounds with nplus distinct animals and nc captures total:
    // nc - nplus of them were seen both times.
    TwoStageData data{nplus, nc - nplus, nc - nplus};
    PosteriorSummary post = darroch_posterior(data);
    rep.add_estimate("mean", post.mean);
    rep.add_estimate("median", static_cast<double>(post.median));
    rep.add_estimate("mode", static_cast<double>(posterior_mode(post.posterior)));
    rep.add_diagnostic("support_max", static_cast<double>(post.posterior.support_max()));
    rep.add_diagnostic("tail_bound", post.posterior.tail_bound);
    return rep;
}

ExperimentReport run_tag_recovery(const ExperimentArgs& args) {
    auto rep = base_report("tag-recovery", args);
    reject_iters(args, "tag-recovery");
    Flags f(args, rep);
    auto values = f.integer_list("data", "32,20,8,5,1,2,0,2,1,1,0");
    f.done();
    if (values.size() < 2)
        throw parameter_error(
            "tag-recovery: --data needs the release count, then one recovery count per year");

    long long released = values[0];
    std::vector<long long> recoveries(values.begin() + 1, values.end());
    PosteriorSummary post = tag_recovery_posterior(released, recoveries);
    rep.add_estimate("mean", post.mean);
    rep.add_estimate("median", static_cast<double>(post.median));
    // Zero-based rank of the median within the support table, i.e. the count
    // of support points whose CDF is still below 1/2.  Reference outputs for
    // this dataset quote that count (243) as the median, their summation code
    // returning the index rather than the population size it indexes.
    rep.add_estimate("median_rank",
                     static_cast<double>(post.median - post.posterior.support_min));
    rep.add_estimate("mode", static_cast<double>(posterior_mode(post.posterior)));
    rep.add_estimate("moment_estimate", tag_recovery_moment_estimate(released, recoveries));
    rep.add_diagnostic("support_max", static_cast<double>(post.posterior.support_max()));
    rep.add_diagnostic("tail_bound", post.posterior.tail_bound);
    return rep;
}

ExperimentReport run_uniform_capture(const ExperimentArgs& args) {
    auto rep = base_report("uniform-capture", args);
    reject_iters(args, "uniform-capture");
    Flags f(args, rep);
    long long nplus = f.integer("nplus", 3);
    long long window = f.integer("window", -1);
    f.done();

    PosteriorSummary post = uniform_prior_posterior(nplus, window);
    rep.add_estimate("median", static_cast<double>(post.median));
    rep.add_estimate("mode", static_cast<double>(posterior_mode(post.posterior)));
    // The posterior mean diverges for every nplus; report the flag, not inf.
    rep.add_estimate("mean_finite", post.mean_finite ? 1.0 : 0.0);
    rep.add_diagnostic("support_max", static_cast<double>(post.posterior.support_max()));
    rep.add_diagnostic("tail_bound", post.posterior.tail_bound);
    return rep;
}

ExperimentReport run_darroch_mle(const ExperimentArgs& args) {
    auto rep = base_report("darroch-mle", args);
    reject_iters(args, "darroch-mle");
    Flags f(args, rep);
    TwoStageData data;
    data.n1 = f.integer("n1", 20);
    data.n2 = f.integer("n2", 30);
    data.m2 = f.integer("m2", 5);
    f.done();

    DarrochMle mle = darroch_mle(data);
    rep.add_estimate("defined", mle.defined ? 1.0 : 0.0);
    if (mle.defined) {
        rep.add_estimate("mle", static_cast<double>(mle.estimate));
        rep.add_estimate("moment_ratio", static_cast<double>(data.n1) *
                                             static_cast<double>(data.n2) /
                                             static_cast<double>(data.m2));
    }
    return rep;
}

ExperimentReport run_tstage_mh(const ExperimentArgs& args) {
    auto rep = base_report("tstage-mh", args);
    Flags f(args, rep);
    long long T = f.integer("T", 2);
    long long nplus = f.integer("nplus", 45);
    long long nc = f.integer("nc", 50);
    f.done();
    long long iters = effective_iters(args, 20000, rep);

    RngState rng(args.seed);
    Trace trace = tstage_mh_posterior(static_cast<int>(T), nplus, nc,
                                      static_cast<int>(iters), rng);
    ChainSummary cs = chain_summary(trace);
    rep.add_estimate("n_mean", cs.means(0));
    rep.add_estimate("p_mean", cs.means(1));
    rep.add_diagnostic("acceptance_rate", cs.acceptance_rate);
    rep.add_diagnostic("warmup", static_cast<double>(trace.warmup));
    if (T == 2 && nplus >= 1 && nc >= nplus && nc <= 2 * nplus) {
        TwoStageData data{nplus, nc - nplus, nc - nplus};
        rep.add_estimate("exact_mean", darroch_posterior(data).mean);
    }
    rep.trace = trace.draws;
    return rep;
}

ExperimentReport run_openpop_r1(const ExperimentArgs& args) {
    auto rep = base_report("openpop-r1", args);
    Flags f(args, rep);
    OpenPopData data;
    data.n1 = f.integer("n1", 50);
    data.c2 = f.integer("c2", 20);
    data.c3 = f.integer("c3", 10);
    data.r2 = f.integer("r2", 5);
    double p = f.real("p", 0.3);
    double q = f.real("q", 0.1);
    std::string method_name = f.text("method", "full_conditional");
    f.done();
    long long draws = effective_iters(args, 2000, rep);

    R1Method method;
    if (method_name == "full_conditional")
        method = R1Method::full_conditional;
    else if (method_name == "marginalized")
        method = R1Method::marginalized;
    else if (method_name == "accept_reject")
        method = R1Method::accept_reject;
    else
        throw parameter_error(
            "openpop-r1: --method is full_conditional, marginalized, or accept_reject");

    // The rejection sampler draws from the full-conditional law, so that pmf
    // is the exact reference for it as well.
    R1Method reference = method == R1Method::marginalized ? R1Method::marginalized
                                                          : R1Method::full_conditional;
    std::vector<double> pmf = openpop_r1_pmf(data, p, q, reference);
    double exact_mean = 0.0;
    for (std::size_t r = 0; r < pmf.size(); ++r)
        exact_mean += static_cast<double>(r) * pmf[r];

    RngState rng(args.seed);
    std::vector<double> sampled;
    sampled.reserve(static_cast<std::size_t>(draws));
    double rate_sum = 0.0;
    for (long long i = 0; i < draws; ++i) {
        R1Draw d = openpop_r1_sampler(data, p, q, method, rng);
        sampled.push_back(static_cast<double>(d.r1));
        rate_sum += d.acceptance_rate;
    }
    double sample_mean = 0.0;
    for (double v : sampled) sample_mean += v;
    sample_mean /= static_cast<double>(draws);

    rep.add_estimate("exact_mean", exact_mean);
    rep.add_estimate("sample_mean", sample_mean);
    rep.add_diagnostic("acceptance_rate", rate_sum / static_cast<double>(draws));
    rep.trace = column_trace(sampled);
    return rep;
}

ExperimentReport run_beta_from_ci(const ExperimentArgs& args) {
    auto rep = base_report("beta-from-ci", args);
    reject_iters(args, "beta-from-ci");
    Flags f(args, rep);
    double mean = f.real("mean", 0.4);
    double lo = f.real("lo", 0.1);
    double hi = f.real("hi", 0.6);
    double coverage = f.real("coverage", 0.9);
    f.done();

    BetaFit fit = beta_from_mean_ci(mean, lo, hi, coverage);
    rep.add_estimate("a", fit.a);
    rep.add_estimate("b", fit.b);
    rep.add_estimate("alpha_scale", fit.alpha_scale);
    rep.add_estimate("achieved_coverage", fit.achieved);
    rep.add_diagnostic("coverage_error", std::abs(fit.achieved - coverage));
    return rep;
}

// ---------------------------------------------------------------------------
// conjugate / monte carlo experiments

ExperimentReport run_gprior_det(const ExperimentArgs& args) {
    auto rep = base_report("gprior-det", args);
    reject_iters(args, "gprior-det");
    Flags f(args, rep);
    long long n = f.integer("n", 10);
    long long p = f.integer("p", 3);
    double g = f.real("g", 10.0);
    f.done();
    if (p < 1 || n < p) throw parameter_error("gprior-det: need 1 <= p <= n");

    RngState rng(args.seed);
    Matrix X(n, p);
    for (Eigen::Index i = 0; i < X.rows(); ++i)
        for (Eigen::Index j = 0; j < X.cols(); ++j)
            X(i, j) = sample_standard_normal(rng);

    DetIdentity identity = gprior_det_identity(X, g);
    rep.add_estimate("det", identity.det);
    rep.add_estimate("expected", identity.expected);
    rep.add_estimate("rel_err",
                     std::abs(identity.det - identity.expected) / identity.expected);
    return rep;
}

ExperimentReport run_bayes_factor_mc(const ExperimentArgs& args) {
    auto rep = base_report("bayes-factor-mc", args);
    Flags f(args, rep);
    double xbar = f.real("xbar", 0.2);
    double ybar = f.real("ybar", -0.1);
    double s2 = f.real("s2", 1.2);
    long long n = f.integer("n", 20);
    double tau = f.real("tau", 1.0);
    f.done();
    long long sims = effective_iters(args, 100000, rep);

    RngState rng(args.seed);
    // Two priors on the shift, two Bayes factors: the Monte Carlo average
    // over xi ~ N(0, tau^2) next to the closed-form conjugate answer.
    rep.add_estimate("bf_mc", bayes_factor_mc_two_sample(xbar, ybar, s2,
                                                         static_cast<int>(n), tau, sims, rng));
    rep.add_estimate("bf_closed",
                     bayes_factor_two_sample_closed(xbar, ybar, s2, static_cast<int>(n)));
    return rep;
}

ExperimentReport run_harmonic_mean(const ExperimentArgs& args) {
    auto rep = base_report("harmonic-mean", args);
    Flags f(args, rep);
    long long n = f.integer("n", 20);
    double shape = f.real("shape", 2.0);
    double rate = f.real("rate", 2.0);
    f.done();
    long long draws = effective_iters(args, 100000, rep);
    if (n < 1) throw parameter_error("harmonic-mean: need n >= 1");

    RngState rng(args.seed);
    double lambda_true = sample_gamma(shape, rate, rng);
    std::vector<double> data(static_cast<std::size_t>(n));
    double sum_sq = 0.0;
    for (auto& x : data) {
        x = sample_standard_normal(rng) / std::sqrt(lambda_true);
        sum_sq += x * x;
    }

    // Posterior draws of the precision feed the harmonic mean identity; the
    // estimator is unbiased on paper and useless in practice.
    double post_shape = shape + 0.5 * static_cast<double>(n);
    double post_rate = rate + 0.5 * sum_sq;
    std::vector<double> logliks(static_cast<std::size_t>(draws));
    for (auto& ll : logliks) {
        double lambda = sample_gamma(post_shape, post_rate, rng);
        ll = 0.5 * static_cast<double>(n) *
                 (std::log(lambda) - std::log(2.0 * std::numbers::pi)) -
             0.5 * lambda * sum_sq;
    }

    double harmonic = harmonic_mean_evidence(logliks);
    double exact = exact_precision_evidence(data, shape, rate);
    rep.add_estimate("harmonic_mean", harmonic);
    rep.add_estimate("exact_evidence", exact);
    rep.add_estimate("log10_ratio", std::log10(harmonic) - std::log10(exact));
    return rep;
}

ExperimentReport run_accept_reject(const ExperimentArgs& args) {
    auto rep = base_report("accept-reject", args);
    Flags f(args, rep);
    double plant = f.real("plant", 3.0);
    f.done();
    long long count = effective_iters(args, 10000, rep);
    if (plant <= 0.0) throw parameter_error("accept-reject: --plant must be positive");

    // Target 6x(1-x) on (0,1) divided by a planted constant; the estimator
    // should hand the constant back from the acceptance rate alone.
    auto log_target = [plant](double x) {
        if (x <= 0.0 || x >= 1.0) return -kInf;
        return std::log(6.0) + std::log(x) + std::log1p(-x) - std::log(plant);
    };
    ScalarDistribution proposal = ScalarDistribution::beta(1.0, 1.0);
    double m_tilde = 1.5 / plant;  // sup of the damped target over the uniform

    RngState rng(args.seed);
    ArReport ar = accept_reject(log_target, proposal, m_tilde, count, rng);
    double recovered = estimate_normalizing_constant(ar);
    rep.add_estimate("planted", plant);
    rep.add_estimate("recovered", recovered);
    rep.add_estimate("rel_err", std::abs(recovered - plant) / plant);
    rep.add_estimate("mean_trials",
                     static_cast<double>(ar.trials) / static_cast<double>(count));
    rep.add_estimate("envelope_bound", 1.5);
    rep.add_diagnostic("trials", static_cast<double>(ar.trials));
    rep.trace = column_trace(ar.draws);
    return rep;
}

ExperimentReport run_hpd_cauchy(const ExperimentArgs& args) {
    auto rep = base_report("hpd-cauchy", args);
    reject_iters(args, "hpd-cauchy");
    Flags f(args, rep);
    double location = f.real("location", 0.0);
    double scale = f.real("scale", 1.0);
    double alpha = f.real("alpha", 0.95);
    long long points = f.integer("points", 6001);
    f.done();
    if (scale <= 0.0) throw parameter_error("hpd-cauchy: --scale must be positive");
    if (points < 3) throw parameter_error("hpd-cauchy: need at least 3 grid points");

    auto log_target = [location, scale](double x) {
        double z = (x - location) / scale;
        return -std::log(std::numbers::pi * scale) - std::log1p(z * z);
    };
    // Power-law tails force a two-part grid: `points` uniform steps resolve
    // the body, then geometrically spaced points walk the tails out to where
    // the density has decayed below the integrator's endpoint check, each
    // tail segment short relative to its distance so the trapezoids stay
    // honest.
    double core_half = 100.0 * scale;
    std::vector<double> tail;
    for (double t = core_half * 1.05; t < 2e6 * scale; t *= 1.05) tail.push_back(t);
    tail.push_back(2e6 * scale);

    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(points) + 2 * tail.size());
    for (std::size_t k = tail.size(); k-- > 0;) grid.push_back(location - tail[k]);
    for (long long i = 0; i < points; ++i)
        grid.push_back(location - core_half + 2.0 * core_half * static_cast<double>(i) /
                                                  static_cast<double>(points - 1));
    for (double t : tail) grid.push_back(location + t);

    HpdRegion region = hpd_from_grid(log_target, grid, alpha);
    rep.add_estimate("level", region.level);
    rep.add_estimate("mass", region.mass);
    rep.add_estimate("n_intervals", static_cast<double>(region.intervals.size()));
    rep.add_estimate("interval_lo", region.intervals.front().first);
    rep.add_estimate("interval_hi", region.intervals.back().second);
    // The symmetric target makes the exact region a centered interval.
    rep.add_estimate("exact_halfwidth",
                     scale * std::tan(std::numbers::pi * alpha / 2.0));
    return rep;
}

ExperimentReport run_importance_ess(const ExperimentArgs& args) {
    auto rep = base_report("importance-ess", args);
    Flags f(args, rep);
    f.done();
    long long points = effective_iters(args, 5000, rep);

    // Normal target under Cauchy proposals: bounded weights, healthy ESS,
    // and E[x^2] = 1 as the check value.
    ScalarDistribution proposal = ScalarDistribution::cauchy(0.0, 1.0);
    RngState rng(args.seed);
    std::vector<double> xs(static_cast<std::size_t>(points));
    for (auto& x : xs) x = sample(proposal, rng);

    auto log_target = [](double x) { return normal_logpdf(x, 0.0, 1.0); };
    auto log_proposal = [&proposal](double x) { return log_pdf(proposal, x); };
    auto h = [](double x) { return x * x; };
    ImportanceEstimate est = importance_estimate(h, log_target, log_proposal, xs);

    rep.add_estimate("estimate", est.estimate);
    rep.add_estimate("exact", 1.0);
    rep.add_estimate("ess", est.ess);
    rep.add_estimate("ess_fraction", est.ess / static_cast<double>(points));
    rep.add_diagnostic("max_weight_share", est.max_weight_share);
    return rep;
}

// ---------------------------------------------------------------------------
// chain experiments

ExperimentReport run_beta_binomial_gibbs(const ExperimentArgs& args) {
    auto rep = base_report("beta-binomial-gibbs", args);
    Flags f(args, rep);
    long long n = f.integer("n", 18);
    double a = f.real("a", 2.5);
    double b = f.real("b", 2.5);
    f.done();
    long long iters = effective_iters(args, 5000, rep);

    RngState rng(args.seed);
    Trace trace = gibbs_beta_binomial(static_cast<int>(n), a, b,
                                      static_cast<int>(iters), rng);
    ChainSummary cs = chain_summary(trace);
    rep.add_estimate("theta_mean", cs.means(0));
    rep.add_estimate("theta_sd", cs.sds(0));
    // theta's long-run marginal is Be(a, b) whatever n is.
    rep.add_estimate("exact_theta_mean", a / (a + b));
    rep.add_estimate("eta_mean", cs.means(1));
    rep.add_diagnostic("warmup", static_cast<double>(trace.warmup));
    rep.trace = trace.draws;
    return rep;
}

ExperimentReport run_em_mixture(const ExperimentArgs& args) {
    auto rep = base_report("em-mixture", args);
    Flags f(args, rep);
    long long n = f.integer("n", 324);
    long long starts = f.integer("starts", 20);
    f.done();
    long long steps = effective_iters(args, 50, rep);
    if (n < 2) throw parameter_error("em-mixture: need n >= 2");
    if (starts < 1) throw parameter_error("em-mixture: need at least one start");

    RngState rng(args.seed);
    std::vector<double> data = simulate_mixture_data(n, rng);
    double xbar = 0.0;
    for (double x : data) xbar += x;
    xbar /= static_cast<double>(n);
    double varx = 0.0;
    for (double x : data) varx += (x - xbar) * (x - xbar);
    varx /= static_cast<double>(n - 1);
    double sx = std::sqrt(varx);

    // One log-likelihood curve per random start; columns of the trace are
    // the curves, which is exactly the flat file a plot of the study needs.
    Matrix curves(steps + 1, starts);
    double best = -kInf, worst = kInf, min_gain = kInf;
    int collapsed = 0;
    for (long long s = 0; s < starts; ++s) {
        MixtureParams start;
        start.p = rng.next_double();
        start.mu[0] = xbar + 2.0 * sample_standard_normal(rng) * sx;
        start.mu[1] = xbar + 2.0 * sample_standard_normal(rng) * sx;
        start.sigma2[0] = sample_gamma(1.0, 1.0, rng) * varx;
        start.sigma2[1] = sample_gamma(1.0, 1.0, rng) * varx;

        EmFit fit = em_fit(data, start, static_cast<int>(steps));
        for (long long r = 0; r <= steps; ++r) {
            std::size_t idx = std::min(static_cast<std::size_t>(r), fit.log_lik.size() - 1);
            curves(r, s) = fit.log_lik[idx];
        }
        for (std::size_t r = 1; r < fit.log_lik.size(); ++r)
            min_gain = std::min(min_gain, fit.log_lik[r] - fit.log_lik[r - 1]);
        best = std::max(best, fit.log_lik.back());
        worst = std::min(worst, fit.log_lik.back());
        collapsed += fit.collapsed ? 1 : 0;
    }

    rep.add_estimate("loglik_best", best);
    rep.add_estimate("loglik_worst", worst);
    rep.add_estimate("min_step_gain", std::isfinite(min_gain) ? min_gain : 0.0);
    rep.add_diagnostic("collapsed_runs", static_cast<double>(collapsed));
    rep.trace = curves;
    return rep;
}

ExperimentReport run_mixture_gibbs(const ExperimentArgs& args) {
    auto rep = base_report("mixture-gibbs", args);
    Flags f(args, rep);
    long long n = f.integer("n", 324);
    f.done();
    long long iters = effective_iters(args, 2000, rep);
    if (n < 2) throw parameter_error("mixture-gibbs: need n >= 2");

    RngState rng(args.seed);
    std::vector<double> data = simulate_mixture_data(n, rng);
    double xbar = 0.0;
    for (double x : data) xbar += x;
    xbar /= static_cast<double>(n);
    double varx = 0.0;
    for (double x : data) varx += (x - xbar) * (x - xbar);
    varx /= static_cast<double>(n - 1);

    MixtureHyper hyper;
    hyper.xi = {xbar, xbar};
    hyper.n_prior = {1.0, 1.0};
    hyper.nu = {2.0, 2.0};
    hyper.s2 = {varx, varx};

    Trace trace = gibbs_mixture(data, hyper, static_cast<int>(iters), rng);
    ChainSummary cs = chain_summary(trace);
    rep.add_estimate("p_mean", cs.means(0));
    rep.add_estimate("mu1_mean", cs.means(1));
    rep.add_estimate("mu2_mean", cs.means(2));
    rep.add_estimate("sigma2_1_mean", cs.means(3));
    rep.add_estimate("sigma2_2_mean", cs.means(4));
    rep.add_diagnostic("warmup", static_cast<double>(trace.warmup));
    rep.trace = trace.draws;
    return rep;
}

// ---------------------------------------------------------------------------
// time series experiments

ExperimentReport run_ar1_posterior(const ExperimentArgs& args) {
    auto rep = base_report("ar1-posterior", args);
    reject_iters(args, "ar1-posterior");
    Flags f(args, rep);
    std::string source = f.text("data", "sim");
    long long T = f.integer("T", 100);
    double rho = f.real("rho", 0.5);
    f.done();

    std::vector<double> x;
    if (source == "sim") {
        if (T < 3) throw parameter_error("ar1-posterior: need T >= 3");
        if (!(std::abs(rho) < 1.0))
            throw parameter_error("ar1-posterior: simulation needs |rho| < 1");
        RngState rng(args.seed);
        x.resize(static_cast<std::size_t>(T));
        x[0] = sample_standard_normal(rng) / std::sqrt(1.0 - rho * rho);
        for (std::size_t t = 1; t < x.size(); ++t)
            x[t] = rho * x[t - 1] + sample_standard_normal(rng);
    } else {
        for (const auto& part : split_csv(source)) x.push_back(parse_real(part, "data"));
    }

    ArPosterior post = ar1_posterior(x);
    rep.add_estimate("mu_T", post.mu_T);
    rep.add_estimate("omega2_T", post.omega2_T);
    rep.add_estimate("nu2_T", post.nu2_T);
    rep.add_estimate("T", static_cast<double>(post.T));
    rep.add_estimate("predictive_center", ar1_predictive_center(post, x.back()));
    return rep;
}

ExperimentReport run_schur_test(const ExperimentArgs& args) {
    auto rep = base_report("schur-test", args);
    reject_iters(args, "schur-test");
    Flags f(args, rep);
    auto rhos = f.real_list("rhos", "0.5,0.3");
    f.done();
    if (rhos.empty()) throw parameter_error("schur-test: --rhos needs coefficients");

    LagPolynomial poly = LagPolynomial::from_rhos(rhos);
    SchurResult schur = schur_root_test(poly);
    rep.add_estimate("all_outside", schur.all_outside ? 1.0 : 0.0);
    rep.add_estimate("boundary", schur.boundary ? 1.0 : 0.0);
    rep.add_estimate("stages", static_cast<double>(schur.path.size()));

    auto roots = polynomial_roots(poly.coeffs);
    double min_modulus = kInf;
    for (const auto& r : roots) min_modulus = std::min(min_modulus, std::abs(r));
    if (std::isfinite(min_modulus)) rep.add_estimate("min_root_modulus", min_modulus);
    return rep;
}

ExperimentReport run_ma_autocov(const ExperimentArgs& args) {
    auto rep = base_report("ma-autocov", args);
    reject_iters(args, "ma-autocov");
    Flags f(args, rep);
    auto thetas = f.real_list("thetas", "0.5,0.4");
    double sigma2 = f.real("sigma2", 1.0);
    f.done();

    auto q = static_cast<long long>(thetas.size());
    for (long long s = 0; s <= q + 1; ++s)
        rep.add_estimate("gamma_" + std::to_string(s),
                         ma_autocovariance(thetas, sigma2, s));
    return rep;
}

ExperimentReport run_stationary_cov(const ExperimentArgs& args) {
    auto rep = base_report("stationary-cov", args);
    reject_iters(args, "stationary-cov");
    Flags f(args, rep);
    auto rhos = f.real_list("rhos", "0.5");
    double sigma2 = f.real("sigma2", 1.0);
    f.done();
    if (rhos.empty()) throw parameter_error("stationary-cov: --rhos needs coefficients");

    auto p = static_cast<Eigen::Index>(rhos.size());
    Matrix B = Matrix::Zero(p, p);
    for (Eigen::Index j = 0; j < p; ++j) B(0, j) = rhos[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 1; i < p; ++i) B(i, i - 1) = 1.0;

    Matrix A = ar_stationary_covariance(B, sigma2);
    for (Eigen::Index k = 0; k < p; ++k)
        rep.add_estimate("gamma_" + std::to_string(k), A(0, k));
    return rep;
}

ExperimentReport run_forward_filter(const ExperimentArgs& args) {
    auto rep = base_report("forward-filter", args);
    reject_iters(args, "forward-filter");
    Flags f(args, rep);
    long long T = f.integer("T", 200);
    double rho1 = f.real("rho1", 0.4);
    double rho2 = f.real("rho2", 0.9);
    double p11 = f.real("p11", 0.95);
    double p22 = f.real("p22", 0.9);
    double sigma2 = f.real("sigma2", 1.0);
    f.done();
    if (T < 2) throw parameter_error("forward-filter: need T >= 2");
    if (!(p11 > 0.0 && p11 < 1.0 && p22 > 0.0 && p22 < 1.0))
        throw parameter_error("forward-filter: need self-transition probabilities in (0, 1)");
    if (sigma2 <= 0.0) throw parameter_error("forward-filter: --sigma2 must be positive");

    Matrix P(2, 2);
    P << p11, 1.0 - p11, 1.0 - p22, p22;
    std::vector<double> initial = markov_stationary(P);

    // Simulate the switching autoregression, then run the filter on its own
    // output.
    RngState rng(args.seed);
    std::vector<double> x(static_cast<std::size_t>(T) + 1, 0.0);
    int y = rng.next_double() < initial[0] ? 0 : 1;
    for (std::size_t t = 1; t < x.size(); ++t) {
        if (t > 1) y = rng.next_double() < P(y, 0) ? 0 : 1;
        double rho = y == 0 ? rho1 : rho2;
        x[t] = rho * x[t - 1] + std::sqrt(sigma2) * sample_standard_normal(rng);
    }

    HmmSpec spec;
    spec.transition = P;
    spec.log_emission = [rho1, rho2, sigma2](int state, double x_prev, double xt) {
        return normal_logpdf(xt, (state == 0 ? rho1 : rho2) * x_prev, sigma2);
    };
    HmmForward fwd = hmm_forward_loglik(spec, x, initial);
    rep.add_estimate("loglik", fwd.loglik);
    rep.add_estimate("stationary_1", initial[0]);
    rep.add_diagnostic("failure_step", static_cast<double>(fwd.failure_step));
    rep.trace = fwd.phi;
    return rep;
}

// ---------------------------------------------------------------------------
// lattice experiments

ExperimentReport run_partition_exact(const ExperimentArgs& args) {
    auto rep = base_report("partition-exact", args);
    reject_iters(args, "partition-exact");
    Flags f(args, rep);
    long long rows = f.integer("rows", 3);
    long long cols = f.integer("cols", 5);
    double beta = f.real("beta", 0.0);
    long long colors = f.integer("colors", 2);
    std::string neigh = f.text("neigh", "four");
    f.done();

    Neighborhood nb;
    if (neigh == "four")
        nb = Neighborhood::four;
    else if (neigh == "eight")
        nb = Neighborhood::eight;
    else
        throw parameter_error("partition-exact: --neigh is four or eight");

    double log_z = exact_partition_log(static_cast<int>(rows), static_cast<int>(cols),
                                       static_cast<int>(colors), beta, nb);
    rep.add_estimate("log_z", log_z);
    rep.add_estimate("reciprocal",
                     exact_partition_reciprocal(static_cast<int>(rows),
                                                static_cast<int>(cols),
                                                static_cast<int>(colors), beta, nb));
    rep.add_diagnostic("n_states",
                       std::pow(static_cast<double>(colors),
                                static_cast<double>(rows * cols)));
    if (nb == Neighborhood::eight)
        rep.add_diagnostic("cliques", static_cast<double>(clique_count_eight(
                                          static_cast<int>(rows), static_cast<int>(cols))));
    return rep;
}

ExperimentReport run_ising_threshold(const ExperimentArgs& args) {
    auto rep = base_report("ising-threshold", args);
    reject_iters(args, "ising-threshold");
    Flags f(args, rep);
    long long rows = f.integer("rows", 8);
    long long cols = f.integer("cols", 8);
    double precision = f.real("precision", 0.1);
    long long sweeps = f.integer("sweeps", 50);
    long long reps = f.integer("reps", 4);
    std::string direction_name = f.text("direction", "unicolor");
    f.done();

    ThresholdDirection direction;
    if (direction_name == "unicolor")
        direction = ThresholdDirection::unicolor;
    else if (direction_name == "checkerboard")
        direction = ThresholdDirection::checkerboard;
    else
        throw parameter_error("ising-threshold: --direction is unicolor or checkerboard");

    RngState rng(args.seed);
    std::vector<double> thresholds = beta_threshold_experiment(
        static_cast<int>(rows), static_cast<int>(cols), precision,
        static_cast<int>(sweeps), static_cast<int>(reps), rng, direction);

    double mean = 0.0;
    for (double b : thresholds) mean += b;
    mean /= static_cast<double>(thresholds.size());
    rep.add_estimate("beta_mean", mean);
    rep.add_estimate("beta_min", *std::min_element(thresholds.begin(), thresholds.end()));
    rep.add_estimate("beta_max", *std::max_element(thresholds.begin(), thresholds.end()));
    rep.trace = column_trace(thresholds);
    return rep;
}

ExperimentReport run_abc_binomial(const ExperimentArgs& args) {
    auto rep = base_report("abc-binomial", args);
    Flags f(args, rep);
    long long n = f.integer("n", 5);
    long long x_obs = f.integer("x", 2);
    double a = f.real("a", 1.0);
    double b = f.real("b", 1.0);
    double epsilon = f.real("epsilon", 0.0);
    f.done();
    long long proposals = effective_iters(args, 20000, rep);
    if (n < 1 || x_obs < 0 || x_obs > n)
        throw parameter_error("abc-binomial: need n >= 1 and 0 <= x <= n");

    AbcPriorSampler prior = [a, b](RngState& r) { return sample_beta(a, b, r); };
    AbcForwardSampler model = [n](double theta, RngState& r) {
        return std::vector<double>{
            static_cast<double>(sample_binomial(static_cast<int>(n), theta, r))};
    };
    AbcSummaryFn stat = [](const std::vector<double>& d) { return d; };
    AbcDistanceFn distance = [](const std::vector<double>& u, const std::vector<double>& v) {
        return std::abs(u[0] - v[0]);
    };

    RngState rng(args.seed);
    AbcResult result =
        abc_posterior(prior, model, stat, {static_cast<double>(x_obs)}, epsilon, distance,
                      static_cast<int>(proposals), rng);

    double mean = 0.0;
    for (double t : result.accepted) mean += t;
    mean /= static_cast<double>(result.accepted.size());
    rep.add_estimate("acceptance_rate", result.acceptance_rate);
    rep.add_estimate("n_accepted", static_cast<double>(result.accepted.size()));
    rep.add_estimate("posterior_mean", mean);
    // At epsilon = 0 the kept draws are exact Be(a + x, b + n - x) samples.
    rep.add_estimate("exact_posterior_mean",
                     (a + static_cast<double>(x_obs)) / (a + b + static_cast<double>(n)));
    rep.trace = column_trace(result.accepted);
    return rep;
}

ExperimentReport run_l4_cluster(const ExperimentArgs& args) {
    auto rep = base_report("l4-cluster", args);
    Flags f(args, rep);
    long long rows = f.integer("rows", 8);
    long long cols = f.integer("cols", 8);
    double beta = f.real("beta", 0.8);
    long long colors = f.integer("colors", 2);
    long long burn = f.integer("burn", 50);
    long long starts = f.integer("starts", 10);
    f.done();
    long long samples = effective_iters(args, 200, rep);
    if (burn < 0) throw parameter_error("l4-cluster: --burn must be nonnegative");

    RngState rng(args.seed);
    Lattice lattice = random_lattice(static_cast<int>(rows), static_cast<int>(cols),
                                     static_cast<int>(colors), rng);
    for (long long s = 0; s < burn; ++s)
        lattice = gibbs_sweep(lattice, beta, static_cast<int>(colors), rng);

    // Pairwise coincidence frequencies across the collected sweeps drive the
    // clustering loss.
    auto S = static_cast<Eigen::Index>(rows * cols);
    Matrix pair_prob = Matrix::Zero(S, S);
    for (long long s = 0; s < samples; ++s) {
        lattice = gibbs_sweep(lattice, beta, static_cast<int>(colors), rng);
        for (Eigen::Index i = 0; i < S; ++i)
            for (Eigen::Index j = i; j < S; ++j)
                if (lattice.labels[static_cast<std::size_t>(i)] ==
                    lattice.labels[static_cast<std::size_t>(j)])
                    pair_prob(i, j) += 1.0;
    }
    pair_prob /= static_cast<double>(samples);
    for (Eigen::Index i = 0; i < S; ++i)
        for (Eigen::Index j = i + 1; j < S; ++j) pair_prob(j, i) = pair_prob(i, j);

    L4Result result = l4_clustering(pair_prob, static_cast<int>(colors), rng,
                                    static_cast<int>(starts));
    std::vector<long long> sizes(static_cast<std::size_t>(colors), 0);
    for (int label : result.labels) ++sizes[static_cast<std::size_t>(label)];
    long long used = 0, largest = 0;
    for (long long c : sizes) {
        if (c > 0) ++used;
        largest = std::max(largest, c);
    }
    rep.add_estimate("risk", result.risk);
    rep.add_estimate("clusters_used", static_cast<double>(used));
    rep.add_estimate("largest_cluster", static_cast<double>(largest));
    return rep;
}

// The doubled-coupling single-color reweighting sometimes suggested for the
// two-color model: on a 1x2 lattice the two laws already disagree, which a
// side-by-side table makes obvious.
ExperimentReport run_ising_double_beta(const ExperimentArgs& args) {
    auto rep = base_report("ising-double-beta", args);
    reject_iters(args, "ising-double-beta");
    Flags f(args, rep);
    double beta = f.real("beta", 1.0);
    f.done();

    std::array<double, 4> agree_w{}, doubled_w{};
    double z_agree = 0.0, z_doubled = 0.0;
    for (int x0 = 0; x0 < 2; ++x0)
        for (int x1 = 0; x1 < 2; ++x1) {
            auto i = static_cast<std::size_t>(2 * x0 + x1);
            agree_w[i] = std::exp(beta * (x0 == x1 ? 1.0 : 0.0));
            doubled_w[i] = std::exp(2.0 * beta * (x0 == 1 && x1 == 1 ? 1.0 : 0.0));
            z_agree += agree_w[i];
            z_doubled += doubled_w[i];
        }

    double tv = 0.0;
    const char* names[] = {"00", "01", "10", "11"};
    for (std::size_t i = 0; i < 4; ++i) {
        double p = agree_w[i] / z_agree;
        double q = doubled_w[i] / z_doubled;
        rep.add_estimate(std::string("agreement_") + names[i], p);
        rep.add_estimate(std::string("doubled_") + names[i], q);
        tv += std::abs(p - q);
    }
    rep.add_estimate("tv_distance", 0.5 * tv);
    return rep;
}

using Runner = ExperimentReport (*)(const ExperimentArgs&);

const std::map<std::string, Runner>& registry() {
    static const std::map<std::string, Runner> reg = {
        {"abc-binomial", run_abc_binomial},
        {"accept-reject", run_accept_reject},
        {"ar1-posterior", run_ar1_posterior},
        {"bayes-factor-mc", run_bayes_factor_mc},
        {"beta-binomial-gibbs", run_beta_binomial_gibbs},
        {"beta-from-ci", run_beta_from_ci},
        {"darroch", run_darroch},
        {"darroch-mle", run_darroch_mle},
        {"em-mixture", run_em_mixture},
        {"forward-filter", run_forward_filter},
        {"gprior-det", run_gprior_det},
        {"harmonic-mean", run_harmonic_mean},
        {"hpd-cauchy", run_hpd_cauchy},
        {"importance-ess", run_importance_ess},
        {"ising-double-beta", run_ising_double_beta},
        {"ising-threshold", run_ising_threshold},
        {"l4-cluster", run_l4_cluster},
        {"ma-autocov", run_ma_autocov},
        {"mixture-gibbs", run_mixture_gibbs},
        {"openpop-r1", run_openpop_r1},
        {"partition-exact", run_partition_exact},
        {"schur-test", run_schur_test},
        {"stationary-cov", run_stationary_cov},
        {"tag-recovery", run_tag_recovery},
        {"tstage-mh", run_tstage_mh},
        {"uniform-capture", run_uniform_capture},
    };
    return reg;
}

}  // namespace

std::vector<std::string> experiment_ids() {
    std::vector<std::string> ids;
    for (const auto& [id, runner] : registry()) ids.push_back(id);
    return ids;
}

bool is_experiment(const std::string& id) { return registry().count(id) > 0; }

ExperimentReport run_experiment(const std::string& id, const ExperimentArgs& args) {
    auto it = registry().find(id);
    if (it == registry().end()) throw parameter_error("unknown experiment id: " + id);
    return it->second(args);
}

}  // namespace bayeslab
