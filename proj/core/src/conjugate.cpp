#include "bayeslab/conjugate.hpp"

#include <cmath>

#include "bayeslab/errors.hpp"
#include "bayeslab/special.hpp"

namespace bayeslab {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw parameter_error(what);
}

void expect_prior(const ScalarDistribution& prior, Family f) {
    if (prior.family != f)
        throw parameter_error("conjugate_update: prior family does not pair with this likelihood");
}

bool is_count(double x) { return x >= 0.0 && x == std::floor(x); }

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

void check_symmetric(const Matrix& m, const char* what) {
    double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) throw parameter_error(what);
}

Matrix checked_spd_inverse(const Matrix& m, const char* what) {
    try {
        return inverse_spd(symmetrized(m));
    } catch (const numeric_guard_error&) {
        throw parameter_error(what);
    }
}

}  // namespace

ScalarDistribution conjugate_update(Likelihood family, const ScalarDistribution& prior,
                                    const ConjugateDatum& d) {
    switch (family) {
        case Likelihood::normal_mean: {
            expect_prior(prior, Family::normal);
            double m = prior.params[0], tau2 = prior.params[1], s2 = d.known;
            require(s2 > 0.0, "normal_mean: known variance must be positive");
            return ScalarDistribution::normal((s2 * m + tau2 * d.x) / (s2 + tau2),
                                              s2 * tau2 / (s2 + tau2));
        }
        case Likelihood::poisson: {
            expect_prior(prior, Family::gamma);
            require(is_count(d.x), "poisson: observation must be a nonnegative integer");
            return ScalarDistribution::gamma(prior.params[0] + d.x, prior.params[1] + 1.0);
        }
        case Likelihood::gamma_known_shape: {
            expect_prior(prior, Family::gamma);
            require(d.known > 0.0, "gamma_known_shape: shape must be positive");
            require(d.x > 0.0, "gamma_known_shape: observation must be positive");
            return ScalarDistribution::gamma(prior.params[0] + d.known, prior.params[1] + d.x);
        }
        case Likelihood::binomial: {
            expect_prior(prior, Family::beta);
            require(d.known >= 1.0 && is_count(d.known), "binomial: trial count must be a positive integer");
            require(is_count(d.x) && d.x <= d.known, "binomial: successes must lie in 0..n");
            return ScalarDistribution::beta(prior.params[0] + d.x,
                                            prior.params[1] + d.known - d.x);
        }
        case Likelihood::negative_binomial: {
            expect_prior(prior, Family::beta);
            require(d.known > 0.0, "negative_binomial: success target must be positive");
            require(is_count(d.x), "negative_binomial: failures must be a nonnegative integer");
            return ScalarDistribution::beta(prior.params[0] + d.known, prior.params[1] + d.x);
        }
        case Likelihood::multinomial: {
            expect_prior(prior, Family::dirichlet);
            require(d.counts.size() == prior.params.size(),
                    "multinomial: cell count does not match dirichlet dimension");
            std::vector<double> alpha = prior.params;
            for (std::size_t i = 0; i < alpha.size(); ++i) {
                require(d.counts[i] >= 0, "multinomial: negative cell");
                alpha[i] += d.counts[i];
            }
            return ScalarDistribution::dirichlet(std::move(alpha));
        }
        case Likelihood::normal_precision: {
            expect_prior(prior, Family::gamma);
            double delta = d.known - d.x;
            return ScalarDistribution::gamma(prior.params[0] + 0.5,
                                             prior.params[1] + 0.5 * delta * delta);
        }
    }
    throw parameter_error("conjugate_update: unknown likelihood tag");
}

NigParams nig_posterior(const NigParams& prior, int n, double xbar, double s2_sum) {
    require(n >= 1, "nig_posterior: need at least one observation");
    require(prior.lambda_mu > 0.0 && prior.lambda_sigma > 0.0 && prior.alpha > 0.0,
            "nig_posterior: hyperparameters must be positive");
    require(s2_sum >= 0.0, "nig_posterior: negative sum of squares");
    NigParams post;
    post.lambda_mu = prior.lambda_mu + n;
    post.xi = (prior.lambda_mu * prior.xi + n * xbar) / post.lambda_mu;
    post.lambda_sigma = prior.lambda_sigma + 0.5 * n;
    double shrink = n * prior.lambda_mu / post.lambda_mu;
    double gap = xbar - prior.xi;
    post.alpha = prior.alpha + 0.5 * (s2_sum + shrink * gap * gap);
    return post;
}

NigParams nig_posterior(const NigParams& prior, std::span<const double> data) {
    require(!data.empty(), "nig_posterior: empty data");
    int n = static_cast<int>(data.size());
    double xbar = 0.0;
    for (double x : data) xbar += x;
    xbar /= n;
    double s2 = 0.0;
    for (double x : data) s2 += (x - xbar) * (x - xbar);
    return nig_posterior(prior, n, xbar, s2);
}

double nig_marginal_mu_logpdf(const NigParams& prior, double mu) {
    auto t = ScalarDistribution::student_t(
        2.0 * prior.lambda_sigma, prior.xi,
        prior.alpha / (prior.lambda_sigma * prior.lambda_mu));
    return log_pdf(t, mu);
}

ScalarDistribution nig_sigma2_marginal(const NigParams& prior) {
    return ScalarDistribution::inverse_gamma(prior.lambda_sigma, prior.alpha);
}

RegressionPosterior regression_posterior(const RegressionConjugate& prior,
                                         const Matrix& X, const Vector& y) {
    const auto n = X.rows();
    const auto p = X.cols();
    require(n >= 1 && p >= 1, "regression_posterior: empty design");
    require(y.size() == n, "regression_posterior: y length mismatch");
    require(prior.beta_tilde.size() == p, "regression_posterior: beta_tilde length mismatch");
    require(prior.M.rows() == p && prior.M.cols() == p, "regression_posterior: M dimension mismatch");
    check_symmetric(prior.M, "regression_posterior: M must be symmetric");

    Matrix xtx = X.transpose() * X;
    Vector xty = X.transpose() * y;
    Vector beta_hat;
    try {
        beta_hat = solve_spd(xtx, xty);
    } catch (const numeric_guard_error&) {
        throw parameter_error("regression_posterior: design matrix is rank deficient");
    }
    Matrix m = symmetrized(prior.M);
    Matrix precision = m + xtx;
    Matrix cov_scale = checked_spd_inverse(precision, "regression_posterior: M + X'X not positive definite");

    RegressionPosterior post;
    post.mean = cov_scale * (xty + m * prior.beta_tilde);
    post.cov_scale = symmetrized(cov_scale);

    Vector resid = y - X * beta_hat;
    double s2 = resid.squaredNorm();
    Vector delta = prior.beta_tilde - beta_hat;
    // (M^{-1} + (X'X)^{-1})^{-1} shrinks toward zero as M -> 0, so the
    // penalty vanishes in the flat-prior limit.
    Matrix quad_prec_inv = checked_spd_inverse(m, "regression_posterior: M must be positive definite")
                         + checked_spd_inverse(xtx, "regression_posterior: X'X not invertible");
    double quad = delta.dot(solve_spd(symmetrized(quad_prec_inv), delta));

    post.ig_shape = 0.5 * n + prior.a;
    post.ig_scale = prior.b + 0.5 * s2 + 0.5 * quad;
    require(post.ig_shape > 0.0, "regression_posterior: posterior shape not positive");
    require(post.ig_scale > 0.0, "regression_posterior: posterior scale not positive");
    post.t_dof = n + 2.0 * prior.a;
    post.t_scale = symmetrized((2.0 * post.ig_scale / post.t_dof) * cov_scale);
    return post;
}

MultivariateStudent regression_predictive(const RegressionPosterior& posterior,
                                          const Matrix& X_new) {
    require(X_new.cols() == posterior.mean.size(), "regression_predictive: dimension mismatch");
    require(X_new.rows() >= 1, "regression_predictive: empty X_new");
    const auto m = X_new.rows();
    double factor = 2.0 * posterior.ig_scale / posterior.t_dof;
    Matrix scale = factor * (Matrix::Identity(m, m)
                             + X_new * posterior.cov_scale * X_new.transpose());
    return {posterior.t_dof, X_new * posterior.mean, symmetrized(scale)};
}

double marginal_y_logpdf(const RegressionConjugate& prior, const Matrix& X, const Vector& y) {
    const auto n = X.rows();
    require(n >= 1 && y.size() == n, "marginal_y_logpdf: dimension mismatch");
    require(prior.beta_tilde.size() == X.cols(), "marginal_y_logpdf: beta_tilde length mismatch");
    require(prior.a > 0.0 && prior.b > 0.0, "marginal_y_logpdf: needs a proper prior (a, b > 0)");
    check_symmetric(prior.M, "marginal_y_logpdf: M must be symmetric");
    Matrix minv = checked_spd_inverse(prior.M, "marginal_y_logpdf: M must be positive definite");
    Matrix scale = (prior.b / prior.a)
                 * (Matrix::Identity(n, n) + X * minv * X.transpose());
    MultivariateStudent t{2.0 * prior.a, X * prior.beta_tilde, symmetrized(scale)};
    return log_mv_student_pdf(t, y);
}

double log_mv_student_pdf(const MultivariateStudent& t, const Vector& x) {
    const auto p = t.location.size();
    require(x.size() == p && p >= 1, "mv_student: dimension mismatch");
    require(t.dof > 0.0, "mv_student: dof must be positive");
    double ld = log_det_spd(t.scale);
    Vector d = x - t.location;
    double q = d.dot(solve_spd(t.scale, d));
    return std::lgamma(0.5 * (t.dof + p)) - std::lgamma(0.5 * t.dof)
         - 0.5 * p * std::log(t.dof * M_PI) - 0.5 * ld
         - 0.5 * (t.dof + p) * std::log1p(q / t.dof);
}

Vector sample_mv_normal(const Vector& mean, const Matrix& cov, RngState& rng) {
    Matrix l = cholesky_lower(symmetrized(cov));
    Vector z(mean.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) z(i) = sample_standard_normal(rng);
    return mean + l * z;
}

Vector sample_mv_student(const MultivariateStudent& t, RngState& rng) {
    Vector z = sample_mv_normal(Vector::Zero(t.location.size()), t.scale, rng);
    double chi2 = 2.0 * sample_gamma(0.5 * t.dof, 1.0, rng);
    return t.location + z * std::sqrt(t.dof / chi2);
}

DetIdentity gprior_det_identity(const Matrix& X, double g) {
    require(g >= 0.0, "gprior_det_identity: g must be nonnegative");
    const auto n = X.rows();
    const auto p = X.cols();
    require(n >= p && p >= 1, "gprior_det_identity: need n >= p >= 1");
    Matrix xtx = X.transpose() * X;
    Matrix proj;
    try {
        proj = X * solve_spd(xtx, Matrix(X.transpose()));
    } catch (const numeric_guard_error&) {
        throw parameter_error("gprior_det_identity: design matrix is rank deficient");
    }
    Matrix a = Matrix::Identity(n, n) + g * proj;
    return {a.determinant(), std::pow(g + 1.0, static_cast<double>(p))};
}

double hpd_beta_radius(const RegressionPosterior& posterior, double alpha) {
    require(alpha > 0.0 && alpha < 1.0, "hpd_beta_radius: alpha must lie in (0,1)");
    double p = static_cast<double>(posterior.mean.size());
    return p * f_quantile(p, posterior.t_dof, alpha);
}

double bayes_factor_shift(double z, double rat) {
    require(rat >= 0.0, "bayes_factor_shift: variance ratio must be nonnegative");
    if (rat == 0.0) return 1.0;
    return std::sqrt(1.0 / (1.0 + rat)) * std::exp(0.5 * z * z / (1.0 + 1.0 / rat));
}

double bayes_factor_two_sample_closed(double xbar, double ybar, double s2_xy, int n) {
    require(n >= 1, "bayes_factor_two_sample_closed: n must be at least 1");
    require(s2_xy > 0.0, "bayes_factor_two_sample_closed: s2 must be positive");
    double d2 = (xbar - ybar) * (xbar - ybar);
    double m = 2.0 * n;
    double log_num = std::log(2.0) - n * std::log((m - 1.0) * d2 / (2.0 * (m + 1.0)) + s2_xy);
    double log_den = 0.5 * std::log(m + 1.0) - n * std::log(0.5 * d2 + s2_xy);
    return std::exp(log_num - log_den);
}

double contingency_log_m(const ContingencyTable2x2& t) {
    long long cells[4] = {t.n11, t.n12, t.n21, t.n22};
    long long n = 0;
    for (long long c : cells) {
        require(c >= 0, "contingency: negative cell");
        n += c;
    }
    require(n >= 1, "contingency: empty table");
    double lp = -std::log(static_cast<double>(n + 1)) - 2.0 * std::log(M_PI);
    for (long long c : cells)
        lp += std::lgamma(c + 0.5) - log_factorial(c);
    return lp;
}

double contingency_log_m0(const ContingencyTable2x2& t) {
    long long n = t.n11 + t.n12 + t.n21 + t.n22;
    require(n >= 1 && t.n11 >= 0 && t.n12 >= 0 && t.n21 >= 0 && t.n22 >= 0,
            "contingency: invalid table");
    long long row1 = t.n11 + t.n12;
    long long col1 = t.n11 + t.n21;
    auto margin_term = [n](long long m) {
        return std::log(static_cast<double>(m + 1)) + std::log(static_cast<double>(n - m + 1))
             - std::log(static_cast<double>(n + 2)) - std::log(static_cast<double>(n + 1));
    };
    return margin_term(row1) + margin_term(col1);
}

double contingency_bayes_factor(const ContingencyTable2x2& table) {
    return std::exp(contingency_log_m0(table) - contingency_log_m(table));
}

}  // namespace bayeslab
