#include "bayeslab/mcmc.hpp"

#include <cmath>
#include <limits>

#include "bayeslab/errors.hpp"
#include "bayeslab/special.hpp"

namespace bayeslab {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw parameter_error(what);
}

double draw_step(StepFamily family, RngState& rng) {
    if (family == StepFamily::cauchy)
        return std::tan(M_PI * (rng.next_double() - 0.5));
    return sample_standard_normal(rng);
}

void check_scales(const std::vector<double>& scales) {
    require(!scales.empty(), "kernel: scale set must be nonempty");
    for (double s : scales) require(s > 0.0, "kernel: scales must be positive");
}

}  // namespace

KernelSpec KernelSpec::independence(ScalarDistribution proposal) {
    KernelSpec k;
    k.kind = KernelKind::independence;
    k.proposal = std::move(proposal);
    return k;
}

KernelSpec KernelSpec::random_walk(double scale, StepFamily step) {
    KernelSpec k;
    k.kind = KernelKind::random_walk;
    k.scales = {scale};
    k.step = step;
    check_scales(k.scales);
    return k;
}

KernelSpec KernelSpec::random_walk_mixture(std::vector<double> scales, StepFamily step) {
    KernelSpec k;
    k.kind = KernelKind::random_walk_mixture;
    k.scales = std::move(scales);
    k.step = step;
    check_scales(k.scales);
    return k;
}

KernelSpec KernelSpec::transformed_rw_log(double scale) {
    KernelSpec k;
    k.kind = KernelKind::transformed_rw_log;
    k.scales = {scale};
    check_scales(k.scales);
    return k;
}

KernelSpec KernelSpec::transformed_rw_logit(double scale) {
    KernelSpec k;
    k.kind = KernelKind::transformed_rw_logit;
    k.scales = {scale};
    check_scales(k.scales);
    return k;
}

double mh_log_ratio(const KernelSpec& kernel, double current, double current_log_target,
                    double proposed, double proposed_log_target) {
    double log_ratio = proposed_log_target - current_log_target;
    switch (kernel.kind) {
        case KernelKind::independence:
            log_ratio += log_pdf(kernel.proposal, current) - log_pdf(kernel.proposal, proposed);
            break;
        case KernelKind::random_walk:
        case KernelKind::random_walk_mixture:
            break;  // symmetric step
        case KernelKind::transformed_rw_log:
            // symmetric walk on log x, so the ratio gains y/x
            log_ratio += std::log(proposed) - std::log(current);
            break;
        case KernelKind::transformed_rw_logit:
            // Jacobian of the logit map: proposals gain theta(1-theta)
            log_ratio += std::log(proposed * (1.0 - proposed))
                       - std::log(current * (1.0 - current));
            break;
    }
    return log_ratio;
}

Trace mh_chain(const ScalarTarget& log_target_unnorm, const KernelSpec& kernel, double x0,
               int iters, RngState& rng) {
    require(iters >= 1, "mh_chain: need at least one iteration");
    check_scales(kernel.scales);
    double current = x0;
    double current_lt = log_target_unnorm(current);
    require(std::isfinite(current_lt), "mh_chain: log target not finite at start");
    if (kernel.kind == KernelKind::transformed_rw_log)
        require(x0 > 0.0, "mh_chain: log-walk needs a positive start");
    if (kernel.kind == KernelKind::transformed_rw_logit)
        require(x0 > 0.0 && x0 < 1.0, "mh_chain: logit-walk needs a start in (0,1)");

    Trace trace;
    trace.draws.resize(iters, 1);
    trace.accepted.resize(iters, 0);
    trace.warmup = iters / 10;
    bool mixture = kernel.kind == KernelKind::random_walk_mixture;
    if (mixture) trace.sidecar.resize(iters, 0);

    for (int t = 0; t < iters; ++t) {
        double proposed = 0.0;
        switch (kernel.kind) {
            case KernelKind::independence:
                proposed = sample(kernel.proposal, rng);
                break;
            case KernelKind::random_walk:
                proposed = current + kernel.scales[0] * draw_step(kernel.step, rng);
                break;
            case KernelKind::random_walk_mixture: {
                int pick = static_cast<int>(rng.next_double() * kernel.scales.size());
                if (pick >= static_cast<int>(kernel.scales.size()))
                    pick = static_cast<int>(kernel.scales.size()) - 1;
                trace.sidecar[t] = pick;
                proposed = current + kernel.scales[pick] * draw_step(kernel.step, rng);
                break;
            }
            case KernelKind::transformed_rw_log:
                proposed = current * std::exp(kernel.scales[0] * draw_step(kernel.step, rng));
                break;
            case KernelKind::transformed_rw_logit: {
                double logit = std::log(current / (1.0 - current))
                             + kernel.scales[0] * draw_step(kernel.step, rng);
                proposed = 1.0 / (1.0 + std::exp(-logit));
                break;
            }
        }
        double proposed_lt = log_target_unnorm(proposed);
        double log_ratio = mh_log_ratio(kernel, current, current_lt, proposed, proposed_lt);
        if (std::log(rng.next_double()) < log_ratio) {
            current = proposed;
            current_lt = proposed_lt;
            trace.accepted[t] = 1;
        }
        trace.draws(t, 0) = current;
    }
    return trace;
}

Trace gibbs_normal_model(std::span<const double> data, double theta0, double tau2, double a,
                         double b, int iters, RngState& rng) {
    require(!data.empty(), "gibbs_normal_model: empty data");
    require(tau2 > 0.0 && a > 0.0 && b > 0.0, "gibbs_normal_model: invalid hyperparameters");
    require(iters >= 1, "gibbs_normal_model: need at least one iteration");
    const double n = static_cast<double>(data.size());
    double xbar = 0.0;
    for (double x : data) xbar += x;
    xbar /= n;
    double var = 0.0;
    for (double x : data) var += (x - xbar) * (x - xbar);
    var /= n;
    double sigma2 = var > 0.0 ? var : 1.0;

    Trace trace;
    trace.draws.resize(iters, 2);
    trace.warmup = iters / 10;
    for (int t = 0; t < iters; ++t) {
        double denom = sigma2 + n * tau2;
        double mean = (sigma2 * theta0 + n * tau2 * xbar) / denom;
        double var_theta = sigma2 * tau2 / denom;
        double theta = mean + std::sqrt(var_theta) * sample_standard_normal(rng);
        double ss = 0.0;
        for (double x : data) ss += (x - theta) * (x - theta);
        sigma2 = 1.0 / sample_gamma(0.5 * n + a, 0.5 * ss + b, rng);
        trace.draws(t, 0) = theta;
        trace.draws(t, 1) = sigma2;
    }
    return trace;
}

Trace gibbs_beta_binomial(int n, double a, double b, int iters, RngState& rng) {
    require(n >= 1, "gibbs_beta_binomial: n must be at least 1");
    require(a > 0.0 && b > 0.0, "gibbs_beta_binomial: a and b must be positive");
    require(iters >= 1, "gibbs_beta_binomial: need at least one iteration");
    Trace trace;
    trace.draws.resize(iters, 2);
    trace.warmup = iters / 10;
    double theta = 0.5;
    for (int t = 0; t < iters; ++t) {
        int eta = sample_binomial(n, theta, rng);
        theta = sample_beta(a + eta, b + n - eta, rng);
        trace.draws(t, 0) = theta;
        trace.draws(t, 1) = eta;
    }
    return trace;
}

Trace gibbs_probit(const std::vector<int>& y, const Matrix& X, int iters, RngState& rng) {
    const auto n = X.rows();
    const auto p = X.cols();
    require(static_cast<Eigen::Index>(y.size()) == n && n >= 1 && p >= 1,
            "gibbs_probit: dimension mismatch");
    require(iters >= 1, "gibbs_probit: need at least one iteration");
    int ones = 0;
    for (int v : y) {
        require(v == 0 || v == 1, "gibbs_probit: responses must be 0/1");
        ones += v;
    }
    Matrix xtx = X.transpose() * X;
    Matrix xtx_inv;
    try {
        xtx_inv = inverse_spd(xtx);
    } catch (const numeric_guard_error&) {
        throw parameter_error("gibbs_probit: design matrix is rank deficient");
    }
    Matrix chol = cholesky_lower(xtx_inv);

    Trace trace;
    trace.draws.resize(iters, p);
    trace.warmup = iters / 10;
    trace.flagged = (ones == 0 || ones == static_cast<int>(n));

    Vector beta = Vector::Zero(p);
    Vector z(n);
    for (int t = 0; t < iters; ++t) {
        for (Eigen::Index i = 0; i < n; ++i) {
            double mu = X.row(i).dot(beta);
            z(i) = sample_truncated_normal(mu, y[i] == 1 ? Side::positive : Side::negative, rng);
        }
        Vector mean = xtx_inv * (X.transpose() * z);
        Vector noise(p);
        for (Eigen::Index j = 0; j < p; ++j) noise(j) = sample_standard_normal(rng);
        beta = mean + chol * noise;
        trace.draws.row(t) = beta.transpose();
    }
    return trace;
}

ChainSummary chain_summary(const Trace& trace, int warmup) {
    const int iters = trace.iterations();
    const int dims = trace.dims();
    require(warmup >= 0 && warmup < iters, "chain_summary: warmup must be below iterations");
    const int n = iters - warmup;
    const int max_lag = std::min(1000, n / 10);

    ChainSummary s;
    s.means.resize(dims);
    s.sds.resize(dims);
    s.acf.resize(max_lag + 1, dims);
    for (int d = 0; d < dims; ++d) {
        double mean = 0.0;
        for (int t = warmup; t < iters; ++t) mean += trace.draws(t, d);
        mean /= n;
        double c0 = 0.0;
        for (int t = warmup; t < iters; ++t) {
            double e = trace.draws(t, d) - mean;
            c0 += e * e;
        }
        s.means(d) = mean;
        s.sds(d) = n > 1 ? std::sqrt(c0 / (n - 1)) : 0.0;
        for (int lag = 0; lag <= max_lag; ++lag) {
            if (c0 <= 0.0) {
                s.acf(lag, d) = 1.0;  // constant chain convention
                continue;
            }
            double ck = 0.0;
            for (int t = warmup; t + lag < iters; ++t)
                ck += (trace.draws(t, d) - mean) * (trace.draws(t + lag, d) - mean);
            s.acf(lag, d) = ck / c0;
        }
    }
    if (trace.accepted.empty()) {
        s.acceptance_rate = std::numeric_limits<double>::quiet_NaN();
    } else {
        long long acc = 0;
        for (int t = warmup; t < iters; ++t) acc += trace.accepted[t] ? 1 : 0;
        s.acceptance_rate = static_cast<double>(acc) / n;
    }
    return s;
}

ChainSummary chain_summary(const Trace& trace) { return chain_summary(trace, trace.warmup); }

}  // namespace bayeslab
