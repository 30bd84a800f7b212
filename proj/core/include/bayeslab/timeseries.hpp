#pragma once

#include <complex>
#include <functional>
#include <vector>

#include "bayeslab/linalg.hpp"

namespace bayeslab {

// Closed-form posterior for the AR(1) coefficient under the flat-in-rho,
// 1/sigma prior, from observations x_0..x_T.  Conditional on sigma the
// coefficient is N(mu_T, sigma^2 * omega2_T); marginally it is Student
// T(T-1, mu_T, nu2_T).  omega2_T stores the unit-sigma factor
// 1 / sum x_{t-1}^2.
struct ArPosterior {
    double mu_T = 0.0;
    double omega2_T = 0.0;
    double nu2_T = 0.0;
    int T = 0;
};

ArPosterior ar1_posterior(const std::vector<double>& x);

// Log density of the marginal Student T(T-1, mu_T, nu2_T) at rho.
double ar1_marginal_logpdf(const ArPosterior& post, double rho);

// Point prediction for the next observation: mu_T * x_last.
double ar1_predictive_center(const ArPosterior& post, double x_last);

// 1 - rho_1 u - ... - rho_p u^p, stored as coeffs (1, -rho_1, ..., -rho_p).
struct LagPolynomial {
    std::vector<double> coeffs{1.0};

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
    std::vector<double> rhos() const;

    static LagPolynomial from_rhos(const std::vector<double>& rhos);
};

// Coefficients of prod_i (1 - lambda_i u) by the one-root-at-a-time
// recursion; complex roots must come in conjugate pairs so the result is
// real.  The inverse roots lambda_i are the reciprocals of the polynomial's
// roots, so |lambda_i| < 1 for all i means a causal AR model.
LagPolynomial ar_coeffs_from_roots(const std::vector<std::complex<double>>& lambdas);
LagPolynomial ar_coeffs_from_roots(const std::vector<double>& lambdas);

struct SchurResult {
    // True when every reduction stage had |P*(0)| < 1, which holds iff all
    // roots lie strictly outside the unit circle.
    bool all_outside = false;
    // A stage hit |P*(0)| = 1 (within 1e-8): root on the unit circle, no
    // verdict possible.
    bool boundary = false;
    // The successive transforms, starting with the input polynomial.
    std::vector<LagPolynomial> path;
};

// Schur reduction: with a = P*(0) the leading coefficient, replace P by
// (P - a P*) / (1 - a^2) where P*(u) = u^p P(1/u), dropping the degree by at
// least one, until only the constant 1 remains.
SchurResult schur_root_test(const LagPolynomial& poly);

// Roots of the polynomial via companion-matrix eigenvalues; the reference
// oracle for schur_root_test.
std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs);

// AR(2) causality through the triangle conditions
// rho1 + rho2 < 1, rho2 - rho1 < 1, |rho2| < 1 (all strict).
bool ar2_causality(double rho1, double rho2);

// Autocovariance gamma(s) of an MA(q) process with coefficients theta_1..q
// (theta_0 = 1): sigma2 * sum_i theta_i theta_{i+|s|}, zero beyond lag q.
double ma_autocovariance(const std::vector<double>& thetas, double sigma2, long long s);

// Affine decomposition eps_hat_t = delta_t + beta_t * eps_target of the
// residual recursion eps_hat_t = x_t - mu + sum_j theta_j eps_hat_{t-j},
// seen as a function of one initial innovation eps_{-target_index}.
// initial_eps holds (eps_0, eps_{-1}, ..., eps_{-q+1}).
struct MaEpsilonPath {
    std::vector<double> delta;
    std::vector<double> beta;
};

MaEpsilonPath ma_epsilon_recursion(const std::vector<double>& x, double mu,
                                   const std::vector<double>& thetas,
                                   const std::vector<double>& initial_eps,
                                   int target_index);

// Stationary covariance of the state-space form: the fixed point of
// A = B A B' + V with V = diag(sigma2, 0, ..., 0), found by iteration from
// A = V.  B must be a companion matrix with spectral radius < 1.
Matrix ar_stationary_covariance(const Matrix& B, double sigma2);

struct HmmSpec {
    // kappa x kappa, rows sum to 1.
    Matrix transition;
    // log f(x_r | x_{r-1}, y_r = state).
    std::function<double(int state, double x_prev, double x)> log_emission;
};

struct HmmForward {
    double loglik = 0.0;
    // Row r holds the predictive state weights phi_{r+1} used for
    // observation x_{r+1}; rows sum to 1.
    Matrix phi;
    // Step index (1-based) where the filter died, or 0.
    int failure_step = 0;
};

// Forward filter for a Markov-switching model: x holds (x_0, ..., x_t) with
// x_0 the conditioning start, hidden states y_1..y_t, initial the law of
// y_1.  Each step adds log sum_i f(x_r | x_{r-1}, y_r=i) phi_r(i) to the
// log-likelihood and renormalizes; a zero-mass step returns -infinity with
// its location.
HmmForward hmm_forward_loglik(const HmmSpec& spec, const std::vector<double>& x,
                              const std::vector<double>& initial);

// Stationary distribution of a row-stochastic matrix (unique for
// irreducible chains), via the linear system (P' - I) pi = 0, sum pi = 1.
std::vector<double> markov_stationary(const Matrix& transition);

}  // namespace bayeslab
