#pragma once

#include <span>
#include <vector>

#include "bayeslab/dist.hpp"
#include "bayeslab/linalg.hpp"
#include "bayeslab/rng.hpp"

namespace bayeslab {

// Normal-inverse-gamma hyperparameters:
//   sigma2 ~ IG(lambda_sigma, alpha), mu | sigma2 ~ N(xi, sigma2 / lambda_mu).
// Marginally mu ~ t(2 lambda_sigma, xi, alpha / (lambda_sigma lambda_mu)).
// An equivalent parameterization halves (lambda_sigma, alpha), putting
// sigma2 ~ IG(ls/2, al/2) and mu ~ t(ls, xi, al/(lambda_mu ls)); construct
// NigParams{xi, lambda_mu, ls/2, al/2} to work in that convention.
struct NigParams {
    double xi = 0.0;
    double lambda_mu = 1.0;
    double lambda_sigma = 1.0;
    double alpha = 1.0;
};

// Conjugate prior for y = X beta + eps, eps ~ N(0, sigma2 I):
//   beta | sigma2 ~ N(beta_tilde, sigma2 M^{-1}), sigma2 ~ IG(a, b).
// a may be nonpositive and b zero to express improper limits, as long as the
// posterior (n/2 + a, scale) comes out proper.
struct RegressionConjugate {
    Vector beta_tilde;
    Matrix M;
    double a = 1.0;
    double b = 1.0;
};

struct RegressionPosterior {
    Vector mean;       // E[beta | y]
    Matrix cov_scale;  // (M + X'X)^{-1}; Cov(beta | sigma2, y) = sigma2 * cov_scale
    double ig_shape;   // n/2 + a
    double ig_scale;   // b + s^2/2 + quadratic penalty / 2
    double t_dof;      // n + 2a, degrees of the marginal Student on beta
    Matrix t_scale;    // (2 ig_scale / t_dof) * cov_scale, marginal Student scale
};

struct MultivariateStudent {
    double dof;
    Vector location;
    Matrix scale;
};

struct ContingencyTable2x2 {
    long long n11 = 0, n12 = 0, n21 = 0, n22 = 0;
};

enum class Likelihood {
    normal_mean,        // x ~ N(theta, known variance); prior normal on theta
    poisson,            // x ~ P(theta); prior gamma
    gamma_known_shape,  // x ~ G(known shape, theta); prior gamma on the rate
    binomial,           // x successes in known n trials; prior beta
    negative_binomial,  // x failures before known m successes; prior beta
    multinomial,        // count vector; prior dirichlet
    normal_precision,   // x ~ N(known mean, 1/theta); prior gamma on theta
};

struct ConjugateDatum {
    double x = 0.0;           // scalar observation (or count)
    double known = 0.0;       // the known constant of the likelihood, see tags above
    std::vector<int> counts;  // multinomial cells
};

// One observation step through the conjugate table; posterior keeps the
// prior's family.
ScalarDistribution conjugate_update(Likelihood family, const ScalarDistribution& prior,
                                    const ConjugateDatum& datum);

NigParams nig_posterior(const NigParams& prior, std::span<const double> data);
// Same update from sufficient statistics; s2_sum = sum (x_i - xbar)^2.
NigParams nig_posterior(const NigParams& prior, int n, double xbar, double s2_sum);

// Marginal density of mu under the prior (Student t, see NigParams).
double nig_marginal_mu_logpdf(const NigParams& prior, double mu);
// Marginal law of sigma2: IG(lambda_sigma, alpha).
ScalarDistribution nig_sigma2_marginal(const NigParams& prior);

RegressionPosterior regression_posterior(const RegressionConjugate& prior,
                                         const Matrix& X, const Vector& y);
MultivariateStudent regression_predictive(const RegressionPosterior& posterior,
                                          const Matrix& X_new);
double marginal_y_logpdf(const RegressionConjugate& prior, const Matrix& X, const Vector& y);

double log_mv_student_pdf(const MultivariateStudent& t, const Vector& x);
Vector sample_mv_normal(const Vector& mean, const Matrix& cov, RngState& rng);
Vector sample_mv_student(const MultivariateStudent& t, RngState& rng);

// det(I + g X(X'X)^{-1}X') alongside its closed form (g+1)^p.
struct DetIdentity {
    double det;
    double expected;
};
DetIdentity gprior_det_identity(const Matrix& X, double g);

// Radius k such that the ellipsoid (beta-mean)' t_scale^{-1} (beta-mean) <= k
// holds posterior mass alpha; k = p * F_quantile(alpha; p, t_dof).
double hpd_beta_radius(const RegressionPosterior& posterior, double alpha);

// Point-null Bayes factor for a normal mean shift, as a function of the
// standardized observation z and the prior-to-sampling variance ratio.
double bayes_factor_shift(double z, double rat);

// Closed-form two-sample Bayes factor from (xbar, ybar, pooled s^2, n per arm).
double bayes_factor_two_sample_closed(double xbar, double ybar, double s2_xy, int n);

// Independence Bayes factor m0/m for a 2x2 table with fixed total.
double contingency_bayes_factor(const ContingencyTable2x2& table);
double contingency_log_m(const ContingencyTable2x2& table);
double contingency_log_m0(const ContingencyTable2x2& table);

}  // namespace bayeslab
