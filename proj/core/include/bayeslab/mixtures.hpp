#pragma once

#include <array>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "bayeslab/mcmc.hpp"
#include "bayeslab/rng.hpp"

namespace bayeslab {

// Two-component normal mixture p N(mu1, s1^2) + (1-p) N(mu2, s2^2).
struct MixtureParams {
    double p = 0.5;
    std::array<double, 2> mu{0.0, 0.0};
    std::array<double, 2> sigma2{1.0, 1.0};
};

// Conjugate hyperparameters: mu_j | s_j^2 ~ N(xi_j, s_j^2 / n_prior_j),
// s_j^2 ~ IG(nu_j / 2, s2_j / 2), p ~ Be(alpha, beta).
struct MixtureHyper {
    std::array<double, 2> xi{0.0, 0.0};
    std::array<double, 2> n_prior{1.0, 1.0};
    std::array<double, 2> nu{1.0, 1.0};
    std::array<double, 2> s2{1.0, 1.0};
    double alpha = 1.0;
    double beta = 1.0;
};

struct Allocation {
    std::vector<int> z;  // component labels, 1 or 2
};

struct EmFit {
    std::vector<MixtureParams> path;  // path[0] is the start
    std::vector<double> log_lik;      // matching length
    bool collapsed = false;           // a variance fell below 1e-12; iteration stopped
};

EmFit em_fit(std::span<const double> data, const MixtureParams& start, int steps);

// Full conjugate Gibbs sweep over (z, p, sigma2_j, mu_j).
// Trace columns: (p, mu1, mu2, sigma2_1, sigma2_2).  For n <= 31 the sidecar
// keeps each sweep's allocation as a bitmask (bit i set = second component).
Trace gibbs_mixture(std::span<const double> data, const MixtureHyper& hyper, int iters,
                    RngState& rng);

// Unnormalized log omega(z): the marginal weight of one allocation after
// integrating out (p, mu_j, sigma_j^2).
double allocation_log_weight(std::span<const double> data, const Allocation& z,
                             const MixtureHyper& hyper);

enum class LocationParameterization { mu1mu2, mu0xi };

// Known-variance location mixture weight1 N(.,1) + (1-weight1) N(.,1).
// mu1mu2: conjugate conditionals under mu_j ~ N(xi0, 1/lambda);
//         trace columns (mu1, mu2).
// mu0xi:  flat-prior conditionals in the centered coordinates
//         mu1 = mu0 - xi, mu2 = mu0 + xi; trace columns (mu0, xi).
Trace gibbs_mixture_location(std::span<const double> data, double xi0, double lambda,
                             int iters, RngState& rng, LocationParameterization param,
                             double weight1 = 0.7);

// Tempered variant targeting [likelihood x prior]^gamma via gamma replicated
// allocation vectors; gamma = 1 is the plain sampler, same stream, same trace.
Trace gibbs_mixture_annealed(std::span<const double> data, double lambda, double delta,
                             int gamma, int iters, RngState& rng, double weight1 = 0.7);

// log-likelihood of 0.5 N(0,1) + 0.5 N(mu, sigma2) over a parameter grid;
// rows follow mu_grid, columns sigma2_grid.
Matrix likelihood_surface(std::span<const double> data, std::span<const double> mu_grid,
                          std::span<const double> sigma2_grid);

// Number of nonnegative integer k-vectors summing to n: C(n+k-1, n).
boost::multiprecision::cpp_int partitions_count(long long n, long long k);

}  // namespace bayeslab
