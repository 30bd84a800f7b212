#include "bayeslab/mixtures.hpp"

#include <cmath>

#include "bayeslab/errors.hpp"
#include "bayeslab/special.hpp"

namespace bayeslab {

namespace {

constexpr double collapse_threshold = 1e-12;

void require(bool ok, const char* what) {
    if (!ok) throw parameter_error(what);
}

double log_normal_density(double x, double mu, double sigma2) {
    return -0.5 * std::log(2.0 * M_PI * sigma2) - (x - mu) * (x - mu) / (2.0 * sigma2);
}

double mixture_log_lik(std::span<const double> data, const MixtureParams& par) {
    double ll = 0.0;
    for (double x : data) {
        double l1 = std::log(par.p) + log_normal_density(x, par.mu[0], par.sigma2[0]);
        double l2 = std::log1p(-par.p) + log_normal_density(x, par.mu[1], par.sigma2[1]);
        ll += log_sum_exp(l1, l2);
    }
    return ll;
}

void validate_hyper(const MixtureHyper& h) {
    for (int j = 0; j < 2; ++j)
        require(h.n_prior[j] > 0.0 && h.nu[j] > 0.0 && h.s2[j] > 0.0,
                "mixture hyperparameters must be positive");
    require(h.alpha > 0.0 && h.beta > 0.0, "mixture hyperparameters must be positive");
}

struct GroupStats {
    int count = 0;
    double sum = 0.0;
    double sumsq = 0.0;  // about the group mean
};

// per-component count, mean and within-group sum of squares
std::array<GroupStats, 2> group_stats(std::span<const double> data, const std::vector<int>& z) {
    std::array<GroupStats, 2> g;
    for (std::size_t i = 0; i < data.size(); ++i) {
        auto& gj = g[z[i] - 1];
        ++gj.count;
        gj.sum += data[i];
    }
    std::array<double, 2> mean{0.0, 0.0};
    for (int j = 0; j < 2; ++j)
        if (g[j].count > 0) mean[j] = g[j].sum / g[j].count;
    for (std::size_t i = 0; i < data.size(); ++i) {
        int j = z[i] - 1;
        g[j].sumsq += (data[i] - mean[j]) * (data[i] - mean[j]);
    }
    return g;
}

// xi_j(z) and s_j(z) of the conjugate update for component j
std::pair<double, double> posterior_location_scale(const MixtureHyper& h, int j,
                                                   const GroupStats& g) {
    double nj = h.n_prior[j];
    double lj = static_cast<double>(g.count);
    double xbar = g.count > 0 ? g.sum / g.count : 0.0;
    double xi_post = (nj * h.xi[j] + lj * xbar) / (nj + lj);
    double s_post = h.s2[j] + g.sumsq;
    if (g.count > 0) {
        double gap = h.xi[j] - xbar;
        s_post += (nj * lj / (nj + lj)) * gap * gap;
    }
    return {xi_post, s_post};
}

}  // namespace

EmFit em_fit(std::span<const double> data, const MixtureParams& start, int steps) {
    require(!data.empty(), "em_fit: empty data");
    require(steps >= 1, "em_fit: need at least one step");
    require(start.p > 0.0 && start.p < 1.0, "em_fit: start weight must lie in (0,1)");
    require(start.sigma2[0] > 0.0 && start.sigma2[1] > 0.0, "em_fit: start variances must be positive");

    const std::size_t n = data.size();
    EmFit fit;
    fit.path.push_back(start);
    fit.log_lik.push_back(mixture_log_lik(data, start));

    std::vector<double> resp(n);
    MixtureParams par = start;
    for (int step = 0; step < steps; ++step) {
        for (std::size_t i = 0; i < n; ++i) {
            double l1 = std::log(par.p) + log_normal_density(data[i], par.mu[0], par.sigma2[0]);
            double l2 = std::log1p(-par.p) + log_normal_density(data[i], par.mu[1], par.sigma2[1]);
            resp[i] = std::exp(l1 - log_sum_exp(l1, l2));
        }
        double w1 = 0.0, wx1 = 0.0, wx2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            w1 += resp[i];
            wx1 += resp[i] * data[i];
            wx2 += (1.0 - resp[i]) * data[i];
        }
        double w2 = static_cast<double>(n) - w1;
        MixtureParams next = par;
        next.p = w1 / static_cast<double>(n);
        if (w1 > 0.0) next.mu[0] = wx1 / w1;
        if (w2 > 0.0) next.mu[1] = wx2 / w2;
        double v1 = 0.0, v2 = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            v1 += resp[i] * (data[i] - next.mu[0]) * (data[i] - next.mu[0]);
            v2 += (1.0 - resp[i]) * (data[i] - next.mu[1]) * (data[i] - next.mu[1]);
        }
        if (w1 > 0.0) next.sigma2[0] = v1 / w1;
        if (w2 > 0.0) next.sigma2[1] = v2 / w2;

        if (next.sigma2[0] < collapse_threshold || next.sigma2[1] < collapse_threshold) {
            fit.collapsed = true;
            break;
        }
        par = next;
        fit.path.push_back(par);
        fit.log_lik.push_back(mixture_log_lik(data, par));
    }
    return fit;
}

Trace gibbs_mixture(std::span<const double> data, const MixtureHyper& hyper, int iters,
                    RngState& rng) {
    require(!data.empty(), "gibbs_mixture: empty data");
    require(iters >= 1, "gibbs_mixture: need at least one iteration");
    validate_hyper(hyper);

    const std::size_t n = data.size();
    MixtureParams par;
    par.p = hyper.alpha / (hyper.alpha + hyper.beta);
    for (int j = 0; j < 2; ++j) {
        par.mu[j] = hyper.xi[j];
        par.sigma2[j] = hyper.s2[j] / hyper.nu[j];
    }
    std::vector<int> z(n, 1);

    Trace trace;
    trace.draws.resize(iters, 5);
    trace.warmup = iters / 10;
    // For small samples keep the allocation vector itself: bit i of the
    // sidecar word is set when observation i sits in the second component.
    if (n <= 31) trace.sidecar.resize(iters, 0);
    for (int t = 0; t < iters; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> lw = {
                std::log(par.p) + log_normal_density(data[i], par.mu[0], par.sigma2[0]),
                std::log1p(-par.p) + log_normal_density(data[i], par.mu[1], par.sigma2[1])};
            z[i] = 1 + sample_categorical_log(lw, rng);
        }
        if (!trace.sidecar.empty()) {
            int mask = 0;
            for (std::size_t i = 0; i < n; ++i)
                if (z[i] == 2) mask |= 1 << i;
            trace.sidecar[t] = mask;
        }
        auto g = group_stats(data, z);
        par.p = sample_beta(hyper.alpha + g[0].count, hyper.beta + g[1].count, rng);
        for (int j = 0; j < 2; ++j) {
            auto [xi_post, s_post] = posterior_location_scale(hyper, j, g[j]);
            double lj = static_cast<double>(g[j].count);
            par.sigma2[j] = 1.0 / sample_gamma(0.5 * (hyper.nu[j] + lj), 0.5 * s_post, rng);
            par.mu[j] = xi_post + std::sqrt(par.sigma2[j] / (hyper.n_prior[j] + lj))
                                 * sample_standard_normal(rng);
        }
        trace.draws(t, 0) = par.p;
        trace.draws(t, 1) = par.mu[0];
        trace.draws(t, 2) = par.mu[1];
        trace.draws(t, 3) = par.sigma2[0];
        trace.draws(t, 4) = par.sigma2[1];
    }
    return trace;
}

double allocation_log_weight(std::span<const double> data, const Allocation& alloc,
                             const MixtureHyper& hyper) {
    require(alloc.z.size() == data.size(), "allocation_log_weight: length mismatch");
    for (int v : alloc.z) require(v == 1 || v == 2, "allocation_log_weight: labels must be 1 or 2");
    validate_hyper(hyper);
    const double n = static_cast<double>(data.size());
    auto g = group_stats(data, alloc.z);

    double lw = std::lgamma(hyper.alpha + g[0].count) + std::lgamma(hyper.beta + g[1].count)
              - std::lgamma(hyper.alpha + hyper.beta + n);
    for (int j = 0; j < 2; ++j) {
        double lj = static_cast<double>(g[j].count);
        auto [xi_post, s_post] = posterior_location_scale(hyper, j, g[j]);
        (void)xi_post;
        // integrating sigma_j^2 out leaves a NEGATIVE power of s_j(z)/2
        lw += std::lgamma(0.5 * (lj + hyper.nu[j]))
            - 0.5 * (hyper.nu[j] + lj) * std::log(0.5 * s_post)
            - 0.5 * std::log(hyper.n_prior[j] + lj);
    }
    return lw;
}

Trace gibbs_mixture_annealed(std::span<const double> data, double lambda, double delta,
                             int gamma, int iters, RngState& rng, double weight1) {
    require(!data.empty(), "gibbs_mixture_annealed: empty data");
    require(lambda > 0.0, "gibbs_mixture_annealed: lambda must be positive");
    require(gamma >= 1, "gibbs_mixture_annealed: gamma must be a positive integer");
    require(iters >= 1, "gibbs_mixture_annealed: need at least one iteration");
    require(weight1 > 0.0 && weight1 < 1.0, "gibbs_mixture_annealed: weight must lie in (0,1)");

    const std::size_t n = data.size();
    double total = 0.0;
    for (double x : data) total += x;
    const double lw1 = std::log(weight1), lw2 = std::log1p(-weight1);

    // start from the tempered prior N(delta, 1/(gamma lambda))
    double glam = static_cast<double>(gamma) * lambda;
    double mu1 = delta + sample_standard_normal(rng) / std::sqrt(glam);
    double mu2 = delta + sample_standard_normal(rng) / std::sqrt(glam);

    Trace trace;
    trace.draws.resize(iters, 2);
    trace.warmup = iters / 10;
    for (int t = 0; t < iters; ++t) {
        long long ell = 0;
        double sum1 = 0.0;
        for (int rep = 0; rep < gamma; ++rep) {
            for (std::size_t i = 0; i < n; ++i) {
                std::vector<double> lw = {lw1 + log_normal_density(data[i], mu1, 1.0),
                                          lw2 + log_normal_density(data[i], mu2, 1.0)};
                if (sample_categorical_log(lw, rng) == 0) {
                    ++ell;
                    sum1 += data[i];
                }
            }
        }
        double sum2 = static_cast<double>(gamma) * total - sum1;
        double denom1 = glam + static_cast<double>(ell);
        double denom2 = glam + static_cast<double>(gamma) * n - static_cast<double>(ell);
        mu1 = (glam * delta + sum1) / denom1 + sample_standard_normal(rng) / std::sqrt(denom1);
        mu2 = (glam * delta + sum2) / denom2 + sample_standard_normal(rng) / std::sqrt(denom2);
        trace.draws(t, 0) = mu1;
        trace.draws(t, 1) = mu2;
    }
    return trace;
}

Trace gibbs_mixture_location(std::span<const double> data, double xi0, double lambda,
                             int iters, RngState& rng, LocationParameterization param,
                             double weight1) {
    if (param == LocationParameterization::mu1mu2)
        return gibbs_mixture_annealed(data, lambda, xi0, 1, iters, rng, weight1);

    require(!data.empty(), "gibbs_mixture_location: empty data");
    require(iters >= 1, "gibbs_mixture_location: need at least one iteration");
    require(weight1 > 0.0 && weight1 < 1.0, "gibbs_mixture_location: weight must lie in (0,1)");
    const std::size_t n = data.size();
    const double nd = static_cast<double>(n);
    double xbar = 0.0;
    for (double x : data) xbar += x;
    xbar /= nd;
    const double lw1 = std::log(weight1), lw2 = std::log1p(-weight1);

    double mu0 = xbar + sample_standard_normal(rng) / std::sqrt(nd);
    double xi = sample_standard_normal(rng);
    std::vector<int> z(n, 1);

    Trace trace;
    trace.draws.resize(iters, 2);
    trace.warmup = iters / 10;
    for (int t = 0; t < iters; ++t) {
        double mu1 = mu0 - xi, mu2 = mu0 + xi;
        long long ell1 = 0;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<double> lw = {lw1 + log_normal_density(data[i], mu1, 1.0),
                                      lw2 + log_normal_density(data[i], mu2, 1.0)};
            z[i] = 1 + sample_categorical_log(lw, rng);
            if (z[i] == 1) ++ell1;
        }
        double ell2 = nd - static_cast<double>(ell1);
        mu0 = (nd * xbar + (static_cast<double>(ell1) - ell2) * xi) / nd
            + sample_standard_normal(rng) / std::sqrt(nd);
        // xi's conditional centers the groups on the fresh mu0
        double sum_centered_1 = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (z[i] == 1) sum_centered_1 += data[i] - mu0;
        double sum_centered_2 = nd * (xbar - mu0) - sum_centered_1;
        xi = (sum_centered_2 - sum_centered_1) / nd
           + sample_standard_normal(rng) / std::sqrt(nd);
        trace.draws(t, 0) = mu0;
        trace.draws(t, 1) = xi;
    }
    return trace;
}

Matrix likelihood_surface(std::span<const double> data, std::span<const double> mu_grid,
                          std::span<const double> sigma2_grid) {
    require(!data.empty(), "likelihood_surface: empty data");
    require(!mu_grid.empty() && !sigma2_grid.empty(), "likelihood_surface: empty grid");
    for (double s2 : sigma2_grid) require(s2 > 0.0, "likelihood_surface: variances must be positive");
    Matrix surface(mu_grid.size(), sigma2_grid.size());
    const double lhalf = std::log(0.5);
    for (std::size_t r = 0; r < mu_grid.size(); ++r) {
        for (std::size_t c = 0; c < sigma2_grid.size(); ++c) {
            double ll = 0.0;
            for (double x : data) {
                double l1 = lhalf + log_normal_density(x, 0.0, 1.0);
                double l2 = lhalf + log_normal_density(x, mu_grid[r], sigma2_grid[c]);
                ll += log_sum_exp(l1, l2);
            }
            surface(r, c) = ll;
        }
    }
    return surface;
}

boost::multiprecision::cpp_int partitions_count(long long n, long long k) {
    require(n >= 0, "partitions_count: n must be nonnegative");
    require(k >= 1, "partitions_count: k must be positive");
    // C(n + k - 1, n) accumulated as exact binomials C(n + i, i)
    boost::multiprecision::cpp_int result = 1;
    for (long long i = 1; i <= k - 1; ++i) {
        result *= (n + i);
        result /= i;
    }
    return result;
}

}  // namespace bayeslab
