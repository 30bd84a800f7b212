#include "bayeslab/dist.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "bayeslab/errors.hpp"
#include "bayeslab/special.hpp"

namespace bayeslab {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();
constexpr double half_log_2pi = 0.9189385332046727;

void require(bool ok, const char* what) {
    if (!ok) throw parameter_error(what);
}

// log Phi(z), usable deep into the left tail where cdf underflows.
double log_normal_cdf(double z) {
    if (z >= -36.0) return std::log(normal_cdf(z));
    double z2 = z * z;
    return -half_log_2pi - 0.5 * z2 - std::log(-z) + std::log1p(-1.0 / z2 + 3.0 / (z2 * z2));
}

double side_sign(double raw) { return raw > 0 ? 1.0 : -1.0; }

bool is_integer(double x) { return x == std::floor(x); }

double xlogy(double x, double y) { return x == 0.0 ? 0.0 : x * std::log(y); }

}  // namespace

ScalarDistribution ScalarDistribution::normal(double mean, double variance) {
    require(variance > 0.0, "normal: variance must be positive");
    return {Family::normal, {mean, variance}};
}

ScalarDistribution ScalarDistribution::gamma(double shape, double rate) {
    require(shape > 0.0 && rate > 0.0, "gamma: shape and rate must be positive");
    return {Family::gamma, {shape, rate}};
}

ScalarDistribution ScalarDistribution::inverse_gamma(double shape, double scale) {
    require(shape > 0.0 && scale > 0.0, "inverse_gamma: shape and scale must be positive");
    return {Family::inverse_gamma, {shape, scale}};
}

ScalarDistribution ScalarDistribution::beta(double a, double b) {
    require(a > 0.0 && b > 0.0, "beta: parameters must be positive");
    return {Family::beta, {a, b}};
}

ScalarDistribution ScalarDistribution::student_t(double nu, double location, double scale2) {
    require(nu > 0.0, "student_t: nu must be positive");
    require(scale2 > 0.0, "student_t: squared scale must be positive");
    return {Family::student_t, {nu, location, scale2}};
}

ScalarDistribution ScalarDistribution::cauchy(double location, double scale) {
    require(scale > 0.0, "cauchy: scale must be positive");
    return {Family::cauchy, {location, scale}};
}

ScalarDistribution ScalarDistribution::binomial(int n, double p) {
    require(n >= 0, "binomial: n must be nonnegative");
    require(p >= 0.0 && p <= 1.0, "binomial: p must lie in [0,1]");
    return {Family::binomial, {static_cast<double>(n), p}};
}

ScalarDistribution ScalarDistribution::poisson(double rate) {
    require(rate >= 0.0, "poisson: rate must be nonnegative");
    return {Family::poisson, {rate}};
}

ScalarDistribution ScalarDistribution::truncated_normal(double mu, Side side) {
    return {Family::truncated_normal, {mu, side == Side::positive ? 1.0 : -1.0}};
}

ScalarDistribution ScalarDistribution::dirichlet(std::vector<double> alpha) {
    require(!alpha.empty(), "dirichlet: empty parameter vector");
    for (double a : alpha) require(a > 0.0, "dirichlet: parameters must be positive");
    return {Family::dirichlet, std::move(alpha)};
}

double log_pdf(const ScalarDistribution& d, double x) {
    const auto& p = d.params;
    switch (d.family) {
        case Family::normal: {
            double m = p[0], v = p[1];
            return -half_log_2pi - 0.5 * std::log(v) - (x - m) * (x - m) / (2.0 * v);
        }
        case Family::gamma: {
            double a = p[0], r = p[1];
            if (x <= 0.0) return neg_inf;
            return a * std::log(r) - std::lgamma(a) + (a - 1.0) * std::log(x) - r * x;
        }
        case Family::inverse_gamma: {
            double a = p[0], b = p[1];
            if (x <= 0.0) return neg_inf;
            return a * std::log(b) - std::lgamma(a) - (a + 1.0) * std::log(x) - b / x;
        }
        case Family::beta: {
            double a = p[0], b = p[1];
            if (x <= 0.0 || x >= 1.0) return neg_inf;
            return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta_fn(a, b);
        }
        case Family::student_t: {
            double nu = p[0], loc = p[1], s2 = p[2];
            double z2 = (x - loc) * (x - loc) / s2;
            return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu)
                 - 0.5 * std::log(nu * M_PI) - 0.5 * std::log(s2)
                 - 0.5 * (nu + 1.0) * std::log1p(z2 / nu);
        }
        case Family::cauchy: {
            double loc = p[0], g = p[1];
            double z = (x - loc) / g;
            return -std::log(M_PI * g) - std::log1p(z * z);
        }
        case Family::binomial: {
            double n = p[0], pr = p[1];
            if (!is_integer(x) || x < 0.0 || x > n) return neg_inf;
            double lp = log_choose(static_cast<long long>(n), static_cast<long long>(x));
            lp += xlogy(x, pr) + xlogy(n - x, 1.0 - pr);
            return lp;
        }
        case Family::poisson: {
            double rate = p[0];
            if (!is_integer(x) || x < 0.0) return neg_inf;
            return xlogy(x, rate) - rate - log_factorial(static_cast<long long>(x));
        }
        case Family::truncated_normal: {
            double mu = p[0], s = side_sign(p[1]);
            if (s * x <= 0.0) return neg_inf;
            return -half_log_2pi - 0.5 * (x - mu) * (x - mu) - log_normal_cdf(s * mu);
        }
        case Family::dirichlet:
            throw parameter_error("dirichlet is vector-valued; use log_dirichlet_pdf");
    }
    return neg_inf;
}

double sample_standard_normal(RngState& rng) {
    return normal_quantile(rng.next_double());
}

double sample_gamma(double shape, double rate, RngState& rng) {
    require(shape > 0.0 && rate > 0.0, "gamma: shape and rate must be positive");
    if (shape < 1.0) {
        // boost a la Stuart: G(a) = G(a+1) U^{1/a}
        double u = rng.next_double();
        return sample_gamma(shape + 1.0, rate, rng) * std::pow(u, 1.0 / shape);
    }
    // Marsaglia-Tsang squeeze
    double d = shape - 1.0 / 3.0;
    double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double z = sample_standard_normal(rng);
        double v = 1.0 + c * z;
        if (v <= 0.0) continue;
        v = v * v * v;
        double u = rng.next_double();
        if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) return d * v / rate;
    }
}

double sample_beta(double a, double b, RngState& rng) {
    double x = sample_gamma(a, 1.0, rng);
    double y = sample_gamma(b, 1.0, rng);
    return x / (x + y);
}

int sample_poisson(double rate, RngState& rng) {
    require(rate >= 0.0, "poisson: rate must be nonnegative");
    if (rate == 0.0) return 0;
    if (rate > 600.0) {
        // infinite divisibility keeps the pmf recurrence away from underflow
        return sample_poisson(0.5 * rate, rng) + sample_poisson(rate - 0.5 * rate, rng);
    }
    double u = rng.next_double();
    double pmf = std::exp(-rate);
    double cdf = pmf;
    int k = 0;
    int limit = static_cast<int>(rate + 1000.0 * std::sqrt(rate) + 1000.0);
    while (u > cdf) {
        ++k;
        pmf *= rate / k;
        cdf += pmf;
        if (k > limit) throw numeric_guard_error("poisson inversion failed to terminate");
    }
    return k;
}

int sample_binomial(int n, double p, RngState& rng) {
    require(n >= 0, "binomial: n must be nonnegative");
    require(p >= 0.0 && p <= 1.0, "binomial: p must lie in [0,1]");
    if (n == 0 || p == 0.0) return 0;
    if (p == 1.0) return n;
    if (p > 0.5) return n - sample_binomial(n, 1.0 - p, rng);
    if (n * std::log1p(-p) < -700.0) {
        int half = n / 2;
        return sample_binomial(half, p, rng) + sample_binomial(n - half, p, rng);
    }
    double u = rng.next_double();
    double pmf = std::pow(1.0 - p, n);
    double cdf = pmf;
    double odds = p / (1.0 - p);
    int k = 0;
    while (u > cdf && k < n) {
        pmf *= odds * static_cast<double>(n - k) / static_cast<double>(k + 1);
        ++k;
        cdf += pmf;
    }
    return k;
}

double sample_truncated_normal(double mu, Side side, RngState& rng) {
    if (side == Side::negative) return -sample_truncated_normal(-mu, Side::positive, rng);
    // keep x > 0 from N(mu, 1)
    if (mu >= -6.0) {
        double u = rng.next_double();
        return mu + normal_quantile(normal_cdf(-mu) + u * normal_cdf(mu));
    }
    // kept mass below Phi(-6): shifted-exponential rejection on z > a = -mu
    double a = -mu;
    double alpha = 0.5 * (a + std::sqrt(a * a + 4.0));
    for (;;) {
        double z = a - std::log(rng.next_double()) / alpha;
        if (std::log(rng.next_double()) < -0.5 * (z - alpha) * (z - alpha)) return mu + z;
    }
}

double sample(const ScalarDistribution& d, RngState& rng) {
    const auto& p = d.params;
    switch (d.family) {
        case Family::normal:
            return p[0] + std::sqrt(p[1]) * sample_standard_normal(rng);
        case Family::gamma:
            return sample_gamma(p[0], p[1], rng);
        case Family::inverse_gamma:
            return 1.0 / sample_gamma(p[0], p[1], rng);
        case Family::beta:
            return sample_beta(p[0], p[1], rng);
        case Family::student_t: {
            double nu = p[0];
            double z = sample_standard_normal(rng);
            double chi2 = 2.0 * sample_gamma(0.5 * nu, 1.0, rng);
            return p[1] + std::sqrt(p[2]) * z / std::sqrt(chi2 / nu);
        }
        case Family::cauchy:
            return p[0] + p[1] * std::tan(M_PI * (rng.next_double() - 0.5));
        case Family::binomial:
            return sample_binomial(static_cast<int>(p[0]), p[1], rng);
        case Family::poisson:
            return sample_poisson(p[0], rng);
        case Family::truncated_normal:
            return sample_truncated_normal(p[0], side_sign(p[1]) > 0 ? Side::positive : Side::negative, rng);
        case Family::dirichlet:
            throw parameter_error("dirichlet is vector-valued; use sample_dirichlet");
    }
    throw parameter_error("unknown family");
}

int sample_categorical_log(const std::vector<double>& log_weights, RngState& rng) {
    require(!log_weights.empty(), "categorical: empty weight vector");
    int best = 0;
    double best_val = neg_inf;
    for (std::size_t i = 0; i < log_weights.size(); ++i) {
        double g = -std::log(-std::log(rng.next_double()));
        double v = log_weights[i] + g;
        if (v > best_val) {
            best_val = v;
            best = static_cast<int>(i);
        }
    }
    return best;
}

int sample_categorical(const std::vector<double>& probs, RngState& rng) {
    require(!probs.empty(), "categorical: empty probability vector");
    double u = rng.next_double();
    double cdf = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        cdf += probs[i];
        if (u <= cdf) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
}

std::vector<double> sample_dirichlet(const std::vector<double>& alpha, RngState& rng) {
    require(!alpha.empty(), "dirichlet: empty parameter vector");
    std::vector<double> out(alpha.size());
    double total = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        require(alpha[i] > 0.0, "dirichlet: parameters must be positive");
        out[i] = sample_gamma(alpha[i], 1.0, rng);
        total += out[i];
    }
    for (double& v : out) v /= total;
    return out;
}

double log_dirichlet_pdf(const std::vector<double>& alpha, const std::vector<double>& x) {
    require(alpha.size() == x.size() && !alpha.empty(), "dirichlet: dimension mismatch");
    double sum = std::accumulate(x.begin(), x.end(), 0.0);
    require(std::abs(sum - 1.0) <= 1e-12, "dirichlet: point must sum to 1");
    double lp = 0.0, alpha_sum = 0.0;
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        require(alpha[i] > 0.0, "dirichlet: parameters must be positive");
        if (x[i] <= 0.0 || x[i] >= 1.0) return neg_inf;
        lp += (alpha[i] - 1.0) * std::log(x[i]) - std::lgamma(alpha[i]);
        alpha_sum += alpha[i];
    }
    return lp + std::lgamma(alpha_sum);
}

std::vector<int> sample_multinomial(int n, const std::vector<double>& probs, RngState& rng) {
    require(n >= 0, "multinomial: n must be nonnegative");
    require(!probs.empty(), "multinomial: empty probability vector");
    double sum = std::accumulate(probs.begin(), probs.end(), 0.0);
    require(std::abs(sum - 1.0) <= 1e-12, "multinomial: probabilities must sum to 1");
    std::vector<int> counts(probs.size(), 0);
    int remaining = n;
    double mass_left = 1.0;
    for (std::size_t i = 0; i + 1 < probs.size() && remaining > 0; ++i) {
        double cond = std::min(1.0, std::max(0.0, probs[i] / mass_left));
        counts[i] = sample_binomial(remaining, cond, rng);
        remaining -= counts[i];
        mass_left -= probs[i];
    }
    counts.back() += remaining;
    return counts;
}

double log_multinomial_pmf(const std::vector<double>& probs, const std::vector<int>& counts) {
    require(probs.size() == counts.size() && !probs.empty(), "multinomial: dimension mismatch");
    long long n = 0;
    for (int c : counts) {
        require(c >= 0, "multinomial: negative count");
        n += c;
    }
    double lp = log_factorial(n);
    for (std::size_t i = 0; i < probs.size(); ++i) {
        if (counts[i] > 0 && probs[i] == 0.0) return neg_inf;
        lp += xlogy(counts[i], probs[i]) - log_factorial(counts[i]);
    }
    return lp;
}

InverseGammaMoments inverse_gamma_moments(double a, double b) {
    require(a > 0.0 && b > 0.0, "inverse_gamma_moments: parameters must be positive");
    InverseGammaMoments m;
    m.mode = b / (a + 1.0);
    if (a > 1.0) {
        m.mean = b / (a - 1.0);
        m.mean_defined = true;
    }
    return m;
}

Matrix fisher_info_normal(double sigma2) {
    require(sigma2 > 0.0, "fisher_info_normal: sigma2 must be positive");
    Matrix info = Matrix::Zero(2, 2);
    info(0, 0) = 1.0 / sigma2;
    info(1, 1) = 1.0 / (2.0 * sigma2 * sigma2);
    return info;
}

}  // namespace bayeslab
