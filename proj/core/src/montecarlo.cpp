#include "bayeslab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "bayeslab/errors.hpp"
#include "bayeslab/special.hpp"

namespace bayeslab {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();

void require(bool ok, const char* what) {
    if (!ok) throw parameter_error(what);
}

}  // namespace

WeightedSample weight_points(const ScalarFn& log_target_unnorm, const ScalarFn& log_proposal,
                             std::span<const double> points) {
    WeightedSample s;
    s.points.assign(points.begin(), points.end());
    s.log_weights.resize(s.points.size());
    for (std::size_t i = 0; i < s.points.size(); ++i)
        s.log_weights[i] = log_target_unnorm(s.points[i]) - log_proposal(s.points[i]);
    return s;
}

ImportanceEstimate importance_estimate(const ScalarFn& h, const WeightedSample& sample) {
    require(sample.points.size() == sample.log_weights.size(), "importance: length mismatch");
    require(!sample.points.empty(), "importance: empty sample");
    double lw_max = neg_inf;
    for (double lw : sample.log_weights) lw_max = std::max(lw_max, lw);
    if (lw_max == neg_inf) throw numeric_guard_error("importance: all weights are zero");

    double sum_w = 0.0, sum_w2 = 0.0, sum_wh = 0.0, w_top = 0.0;
    for (std::size_t i = 0; i < sample.points.size(); ++i) {
        double w = std::exp(sample.log_weights[i] - lw_max);
        sum_w += w;
        sum_w2 += w * w;
        sum_wh += w * h(sample.points[i]);
        w_top = std::max(w_top, w);
    }
    return {sum_wh / sum_w, sum_w * sum_w / sum_w2, w_top / sum_w};
}

ImportanceEstimate importance_estimate(const ScalarFn& h, const ScalarFn& log_target_unnorm,
                                       const ScalarFn& log_proposal,
                                       std::span<const double> points) {
    return importance_estimate(h, weight_points(log_target_unnorm, log_proposal, points));
}

double harmonic_mean_evidence(std::span<const double> log_likelihoods) {
    require(!log_likelihoods.empty(), "harmonic_mean_evidence: empty input");
    std::vector<double> neg(log_likelihoods.size());
    for (std::size_t i = 0; i < neg.size(); ++i) neg[i] = -log_likelihoods[i];
    double log_sum_inv = log_sum_exp(neg);
    return std::exp(std::log(static_cast<double>(neg.size())) - log_sum_inv);
}

double exact_precision_evidence(std::span<const double> data, double prior_shape,
                                double prior_rate) {
    require(prior_shape > 0.0 && prior_rate > 0.0,
            "exact_precision_evidence: hyperparameters must be positive");
    double n = static_cast<double>(data.size());
    double ssq = 0.0;
    for (double x : data) ssq += x * x;
    double shape_post = prior_shape + 0.5 * n;
    double rate_post = prior_rate + 0.5 * ssq;
    double log_ev = -0.5 * n * std::log(2.0 * M_PI)
                  + std::lgamma(shape_post) - shape_post * std::log(rate_post)
                  + prior_shape * std::log(prior_rate) - std::lgamma(prior_shape);
    return std::exp(log_ev);
}

ArReport accept_reject(const ScalarFn& log_target_unnorm, const ScalarDistribution& proposal,
                       double m_tilde, long long count, RngState& rng) {
    require(m_tilde > 0.0, "accept_reject: bound must be positive");
    require(count >= 1, "accept_reject: need at least one draw");
    ArReport rep;
    rep.m_tilde = m_tilde;
    rep.draws.reserve(static_cast<std::size_t>(count));
    double log_m = std::log(m_tilde);
    while (static_cast<long long>(rep.draws.size()) < count) {
        double x = sample(proposal, rng);
        ++rep.trials;
        double log_ratio = log_target_unnorm(x) - log_m - log_pdf(proposal, x);
        // a whisker of slack for round-off in caller-supplied densities
        if (log_ratio > 1e-9)
            throw numeric_guard_error("accept_reject: envelope bound violated", x);
        if (std::log(rng.next_double()) < log_ratio) rep.draws.push_back(x);
    }
    return rep;
}

double estimate_normalizing_constant(const ArReport& report) {
    require(report.trials > 0, "estimate_normalizing_constant: no trials");
    if (report.draws.empty())
        throw numeric_guard_error("estimate_normalizing_constant: zero accepted draws");
    double rate = static_cast<double>(report.draws.size()) / static_cast<double>(report.trials);
    return 1.0 / (rate * report.m_tilde);
}

double slice_sampler_step(const ScalarFn& log_target_unnorm, double x, RngState& rng,
                          double lo, double hi) {
    require(lo < hi, "slice: empty bracket");
    require(x >= lo && x <= hi, "slice: current point outside bracket");
    double lt = log_target_unnorm(x);
    require(std::isfinite(lt), "slice: log target not finite at current point");
    double log_u = lt + std::log(rng.next_double());
    double left = lo, right = hi;
    for (int iter = 0; iter < 10000; ++iter) {
        double y = left + rng.next_double() * (right - left);
        if (log_target_unnorm(y) >= log_u) return y;
        if (y < x)
            left = y;
        else
            right = y;
    }
    throw numeric_guard_error("slice: bracket does not intersect the level set");
}

HpdRegion hpd_from_grid(const ScalarFn& log_target_unnorm, std::span<const double> grid,
                        double alpha) {
    require(alpha > 0.0 && alpha < 1.0, "hpd_from_grid: alpha must lie in (0,1)");
    require(grid.size() >= 3, "hpd_from_grid: grid too small");
    const std::size_t n = grid.size();
    std::vector<double> logf(n);
    double lf_max = neg_inf;
    for (std::size_t i = 0; i < n; ++i) {
        require(i == 0 || grid[i] > grid[i - 1], "hpd_from_grid: grid must ascend");
        logf[i] = log_target_unnorm(grid[i]);
        lf_max = std::max(lf_max, logf[i]);
    }
    if (lf_max == neg_inf) throw numeric_guard_error("hpd_from_grid: density vanishes on grid");
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) f[i] = std::exp(logf[i] - lf_max);
    if (f.front() > 1e-12 || f.back() > 1e-12)
        throw numeric_guard_error("hpd_from_grid: grid does not cover the mass");

    double total = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i)
        total += 0.5 * (f[i] + f[i + 1]) * (grid[i + 1] - grid[i]);

    auto region_mass = [&](double level) {
        double m = 0.0;
        for (std::size_t i = 0; i + 1 < n; ++i)
            if (f[i] >= level && f[i + 1] >= level)
                m += 0.5 * (f[i] + f[i + 1]) * (grid[i + 1] - grid[i]);
        return m / total;
    };

    std::vector<double> levels = f;
    std::sort(levels.begin(), levels.end(), std::greater<>());
    levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

    double chosen = 0.0, mass = 1.0;
    for (double level : levels) {
        double m = region_mass(level);
        if (m >= alpha) {
            chosen = level;
            mass = m;
            break;
        }
    }

    HpdRegion out;
    out.level = chosen / total;  // threshold in normalized-density units
    out.mass = mass;
    bool open = false;
    double start = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        bool in = f[i] >= chosen;
        if (in && !open) {
            open = true;
            start = grid[i];
        } else if (!in && open) {
            open = false;
            out.intervals.emplace_back(start, grid[i - 1]);
        }
    }
    if (open) out.intervals.emplace_back(start, grid[n - 1]);
    return out;
}

double bayes_factor_mc_two_sample(double xbar, double ybar, double s2_xy, int n, double tau,
                                  long long n_sims, RngState& rng) {
    require(tau > 0.0, "bayes_factor_mc_two_sample: tau must be positive");
    require(n >= 1, "bayes_factor_mc_two_sample: n must be at least 1");
    require(s2_xy > 0.0, "bayes_factor_mc_two_sample: s2 must be positive");
    require(n_sims >= 1, "bayes_factor_mc_two_sample: need at least one draw");
    double d = xbar - ybar;
    double expo = -static_cast<double>(n) + 0.5;
    std::vector<double> log_terms(static_cast<std::size_t>(n_sims));
    for (auto& t : log_terms) {
        double xi = tau * sample_standard_normal(rng);
        double base = (2.0 * xi + d) * (2.0 * xi + d) + 2.0 * s2_xy;
        t = expo * std::log(base);
    }
    double log_num = log_sum_exp(log_terms) - std::log(static_cast<double>(n_sims));
    double log_den = expo * std::log(d * d + 2.0 * s2_xy);
    return std::exp(log_num - log_den);
}

}  // namespace bayeslab
