#pragma once

#include <cstdint>
#include <vector>

#include "bayeslab/linalg.hpp"
#include "bayeslab/rng.hpp"

namespace bayeslab {

enum class Family {
    normal,            // params: mean, variance
    gamma,             // params: shape, rate
    inverse_gamma,     // params: shape a, scale b; density b^a/Γ(a) x^{-a-1} e^{-b/x}
    beta,              // params: a, b
    student_t,         // params: nu, location, squared scale
    cauchy,            // params: location, scale
    binomial,          // params: n, p
    poisson,           // params: rate
    truncated_normal,  // params: mu, side (+1 keeps x>0, -1 keeps x<0); unit variance
    dirichlet,         // params: concentration vector; vector-valued, so the
                       // scalar log_pdf/sample entry points reject it
};

enum class Side { positive, negative };

struct ScalarDistribution {
    Family family;
    std::vector<double> params;

    static ScalarDistribution normal(double mean, double variance);
    static ScalarDistribution gamma(double shape, double rate);
    static ScalarDistribution inverse_gamma(double shape, double scale);
    static ScalarDistribution beta(double a, double b);
    static ScalarDistribution student_t(double nu, double location, double scale2);
    static ScalarDistribution cauchy(double location, double scale);
    static ScalarDistribution binomial(int n, double p);
    static ScalarDistribution poisson(double rate);
    static ScalarDistribution truncated_normal(double mu, Side side);
    static ScalarDistribution dirichlet(std::vector<double> alpha);
};

double log_pdf(const ScalarDistribution& d, double x);
double sample(const ScalarDistribution& d, RngState& rng);

// N(mu,1) restricted to the requested half-line. Inverse-CDF construction
// while the kept side holds non-negligible mass; when the half-line sits more
// than 6 sigma into the tail the inverse CDF runs out of precision and a
// shifted-exponential rejection sampler takes over.
double sample_truncated_normal(double mu, Side side, RngState& rng);

// Raw building blocks shared by the families above; exposed because samplers
// elsewhere want them without wrapping a ScalarDistribution.
double sample_standard_normal(RngState& rng);
double sample_gamma(double shape, double rate, RngState& rng);
double sample_beta(double a, double b, RngState& rng);
int sample_poisson(double rate, RngState& rng);
int sample_binomial(int n, double p, RngState& rng);

// Index draw from unnormalized log weights via the Gumbel-max trick.
int sample_categorical_log(const std::vector<double>& log_weights, RngState& rng);
// Index draw from normalized probabilities by CDF inversion.
int sample_categorical(const std::vector<double>& probs, RngState& rng);

// Dirichlet / multinomial live outside ScalarDistribution (vector-valued).
std::vector<double> sample_dirichlet(const std::vector<double>& alpha, RngState& rng);
double log_dirichlet_pdf(const std::vector<double>& alpha, const std::vector<double>& x);
std::vector<int> sample_multinomial(int n, const std::vector<double>& probs, RngState& rng);
double log_multinomial_pmf(const std::vector<double>& probs, const std::vector<int>& counts);

struct InverseGammaMoments {
    double mean = 0.0;  // b/(a-1), meaningful only when mean_defined
    double mode = 0.0;  // b/(a+1)
    bool mean_defined = false;
};

InverseGammaMoments inverse_gamma_moments(double a, double b);

// Fisher information of N(mu, sigma2) in (mu, sigma2): diag(1/s2, 1/(2 s2^2)).
Matrix fisher_info_normal(double sigma2);

}  // namespace bayeslab
