#include "bayeslab/timeseries.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>

#include "bayeslab/dist.hpp"
#include "bayeslab/errors.hpp"
#include "bayeslab/special.hpp"

namespace bayeslab {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void trim_trailing(std::vector<double>& coeffs) {
    while (coeffs.size() > 1 && std::abs(coeffs.back()) < 1e-12) coeffs.pop_back();
}

}  // namespace

ArPosterior ar1_posterior(const std::vector<double>& x) {
    if (x.size() < 3) throw parameter_error("need x_0..x_T with T >= 2");
    int T = static_cast<int>(x.size()) - 1;

    double sum_lag = 0.0;    // sum of x_{t-1}^2
    double sum_cross = 0.0;  // sum of x_{t-1} x_t
    double sum_cur = 0.0;    // sum of x_t^2
    for (int t = 1; t <= T; ++t) {
        sum_lag += x[t - 1] * x[t - 1];
        sum_cross += x[t - 1] * x[t];
        sum_cur += x[t] * x[t];
    }
    if (!(sum_lag > 0.0)) throw parameter_error("regressor x_0..x_{T-1} is all zero");

    ArPosterior post;
    post.T = T;
    post.mu_T = sum_cross / sum_lag;
    post.omega2_T = 1.0 / sum_lag;
    post.nu2_T = (sum_cur / sum_lag - post.mu_T * post.mu_T) / (T - 1);
    return post;
}

double ar1_marginal_logpdf(const ArPosterior& post, double rho) {
    return log_pdf(ScalarDistribution::student_t(post.T - 1, post.mu_T, post.nu2_T), rho);
}

double ar1_predictive_center(const ArPosterior& post, double x_last) {
    return post.mu_T * x_last;
}

std::vector<double> LagPolynomial::rhos() const {
    std::vector<double> out;
    out.reserve(coeffs.size() - 1);
    for (std::size_t j = 1; j < coeffs.size(); ++j) out.push_back(-coeffs[j]);
    return out;
}

LagPolynomial LagPolynomial::from_rhos(const std::vector<double>& rhos) {
    LagPolynomial poly;
    poly.coeffs.reserve(rhos.size() + 1);
    for (double r : rhos) poly.coeffs.push_back(-r);
    return poly;
}

LagPolynomial ar_coeffs_from_roots(const std::vector<std::complex<double>>& lambdas) {
    std::vector<std::complex<double>> psi{1.0};
    for (const auto& lambda : lambdas) {
        std::vector<std::complex<double>> next(psi.size() + 1);
        for (std::size_t j = 0; j < psi.size(); ++j) {
            next[j] += psi[j];
            next[j + 1] -= lambda * psi[j];
        }
        psi = std::move(next);
    }

    LagPolynomial poly;
    poly.coeffs.clear();
    poly.coeffs.reserve(psi.size());
    for (const auto& c : psi) {
        if (std::abs(c.imag()) > 1e-8 * std::max(1.0, std::abs(c.real()))) {
            throw parameter_error("complex roots must be supplied in conjugate pairs");
        }
        poly.coeffs.push_back(c.real());
    }
    return poly;
}

LagPolynomial ar_coeffs_from_roots(const std::vector<double>& lambdas) {
    std::vector<std::complex<double>> roots(lambdas.begin(), lambdas.end());
    return ar_coeffs_from_roots(roots);
}

SchurResult schur_root_test(const LagPolynomial& poly) {
    if (poly.coeffs.empty() || std::abs(poly.coeffs[0] - 1.0) > 1e-12) {
        throw parameter_error("lag polynomial must have constant term 1");
    }

    SchurResult result;
    std::vector<double> c = poly.coeffs;
    trim_trailing(c);
    result.path.push_back(LagPolynomial{c});

    bool ok = true;
    while (c.size() > 1) {
        double a = c.back();
        if (std::abs(std::abs(a) - 1.0) <= 1e-8) {
            result.boundary = true;
            ok = false;
            break;
        }
        if (std::abs(a) > 1.0) {
            ok = false;
            break;
        }
        std::size_t p = c.size() - 1;
        std::vector<double> next(c.size());
        double denom = 1.0 - a * a;
        for (std::size_t j = 0; j <= p; ++j) {
            next[j] = (c[j] - a * c[p - j]) / denom;
        }
        trim_trailing(next);
        c = std::move(next);
        result.path.push_back(LagPolynomial{c});
    }
    result.all_outside = ok;
    return result;
}

std::vector<std::complex<double>> polynomial_roots(const std::vector<double>& coeffs) {
    std::vector<double> c = coeffs;
    trim_trailing(c);
    std::size_t p = c.size() - 1;
    if (p == 0) return {};

    Matrix companion = Matrix::Zero(static_cast<int>(p), static_cast<int>(p));
    for (std::size_t j = 0; j < p; ++j) {
        companion(0, static_cast<int>(j)) = -c[p - 1 - j] / c[p];
    }
    for (std::size_t i = 1; i < p; ++i) {
        companion(static_cast<int>(i), static_cast<int>(i - 1)) = 1.0;
    }

    Eigen::EigenSolver<Matrix> solver(companion, false);
    std::vector<std::complex<double>> roots(p);
    for (std::size_t i = 0; i < p; ++i) {
        roots[i] = solver.eigenvalues()(static_cast<int>(i));
    }
    return roots;
}

bool ar2_causality(double rho1, double rho2) {
    return rho1 + rho2 < 1.0 && rho2 - rho1 < 1.0 && std::abs(rho2) < 1.0;
}

double ma_autocovariance(const std::vector<double>& thetas, double sigma2, long long s) {
    if (!(sigma2 >= 0.0)) throw parameter_error("need sigma2 >= 0");
    long long q = static_cast<long long>(thetas.size());
    long long lag = std::llabs(s);
    if (lag > q) return 0.0;

    auto theta = [&](long long i) { return i == 0 ? 1.0 : thetas[static_cast<std::size_t>(i - 1)]; };
    double acc = 0.0;
    for (long long i = 0; i + lag <= q; ++i) acc += theta(i) * theta(i + lag);
    return sigma2 * acc;
}

MaEpsilonPath ma_epsilon_recursion(const std::vector<double>& x, double mu,
                                   const std::vector<double>& thetas,
                                   const std::vector<double>& initial_eps,
                                   int target_index) {
    int q = static_cast<int>(thetas.size());
    if (q < 1) throw parameter_error("need at least one MA coefficient");
    if (static_cast<int>(initial_eps.size()) != q) {
        throw parameter_error("initial_eps must hold eps_0..eps_{-q+1}");
    }
    if (target_index < 0 || target_index >= q) {
        throw parameter_error("target_index must select one of the initial innovations");
    }

    int T = static_cast<int>(x.size());
    // hist[t + q - 1] covers t = -q+1 .. T.
    std::vector<double> delta_hist(static_cast<std::size_t>(T + q));
    std::vector<double> beta_hist(static_cast<std::size_t>(T + q));
    for (int t = -q + 1; t <= 0; ++t) {
        int j = -t;  // eps_{-j} is initial_eps[j]
        auto idx = static_cast<std::size_t>(t + q - 1);
        delta_hist[idx] = j == target_index ? 0.0 : initial_eps[static_cast<std::size_t>(j)];
        beta_hist[idx] = j == target_index ? 1.0 : 0.0;
    }
    for (int t = 1; t <= T; ++t) {
        auto idx = static_cast<std::size_t>(t + q - 1);
        double d = x[static_cast<std::size_t>(t - 1)] - mu;
        double b = 0.0;
        for (int j = 1; j <= q; ++j) {
            auto prev = static_cast<std::size_t>(t - j + q - 1);
            d += thetas[static_cast<std::size_t>(j - 1)] * delta_hist[prev];
            b += thetas[static_cast<std::size_t>(j - 1)] * beta_hist[prev];
        }
        delta_hist[idx] = d;
        beta_hist[idx] = b;
    }

    MaEpsilonPath out;
    out.delta.assign(delta_hist.begin() + q, delta_hist.end());
    out.beta.assign(beta_hist.begin() + q, beta_hist.end());
    return out;
}

Matrix ar_stationary_covariance(const Matrix& B, double sigma2) {
    int p = static_cast<int>(B.rows());
    if (p < 1 || B.cols() != p) throw parameter_error("B must be square");
    if (!(sigma2 > 0.0)) throw parameter_error("need sigma2 > 0");
    for (int i = 1; i < p; ++i) {
        for (int j = 0; j < p; ++j) {
            double expected = j == i - 1 ? 1.0 : 0.0;
            if (std::abs(B(i, j) - expected) > 1e-12) {
                throw parameter_error("B must be a companion matrix");
            }
        }
    }

    std::vector<double> rhos(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) rhos[static_cast<std::size_t>(j)] = B(0, j);
    SchurResult stat = schur_root_test(LagPolynomial::from_rhos(rhos));
    if (!stat.all_outside) {
        throw numeric_guard_error("companion matrix is not stationary; fixed-point iteration diverges");
    }

    Matrix V = Matrix::Zero(p, p);
    V(0, 0) = sigma2;
    Matrix A = V;
    for (int it = 0; it < 200000; ++it) {
        Matrix next = B * A * B.transpose() + V;
        double delta = (next - A).cwiseAbs().maxCoeff();
        A = next;
        if (delta < 1e-12) return A;
    }
    throw numeric_guard_error("covariance fixed point failed to converge");
}

HmmForward hmm_forward_loglik(const HmmSpec& spec, const std::vector<double>& x,
                              const std::vector<double>& initial) {
    int kappa = static_cast<int>(spec.transition.rows());
    if (kappa < 1 || spec.transition.cols() != kappa) {
        throw parameter_error("transition matrix must be square");
    }
    for (int i = 0; i < kappa; ++i) {
        double row = 0.0;
        for (int j = 0; j < kappa; ++j) {
            if (spec.transition(i, j) < 0.0) throw parameter_error("transition entries must be nonnegative");
            row += spec.transition(i, j);
        }
        if (std::abs(row - 1.0) > 1e-12) throw parameter_error("transition rows must sum to 1");
    }
    if (static_cast<int>(initial.size()) != kappa) {
        throw parameter_error("initial distribution size must match the state count");
    }
    double total = 0.0;
    for (double v : initial) {
        if (v < 0.0) throw parameter_error("initial distribution must be nonnegative");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-8) throw parameter_error("initial distribution must sum to 1");
    if (x.size() < 2) throw parameter_error("need x_0 and at least one observation");

    int t = static_cast<int>(x.size()) - 1;
    HmmForward out;
    out.phi = Matrix::Zero(t, kappa);

    std::vector<double> phi(initial);
    for (int r = 1; r <= t; ++r) {
        for (int i = 0; i < kappa; ++i) out.phi(r - 1, i) = phi[static_cast<std::size_t>(i)];

        // c_r = sum_i f(x_r | x_{r-1}, y_r = i) phi_r(i), accumulated in log
        // space so tiny emissions cannot underflow the filter.
        std::vector<double> log_terms(static_cast<std::size_t>(kappa), kNegInf);
        for (int i = 0; i < kappa; ++i) {
            double w = phi[static_cast<std::size_t>(i)];
            if (w <= 0.0) continue;
            double le = spec.log_emission(i, x[static_cast<std::size_t>(r - 1)],
                                          x[static_cast<std::size_t>(r)]);
            log_terms[static_cast<std::size_t>(i)] = std::log(w) + le;
        }
        double log_c = log_sum_exp(log_terms);
        if (log_c == kNegInf) {
            out.loglik = kNegInf;
            out.failure_step = r;
            return out;
        }
        out.loglik += log_c;

        // Posterior over y_r, then one transition step to get phi_{r+1}.
        std::vector<double> posterior(static_cast<std::size_t>(kappa));
        for (int i = 0; i < kappa; ++i) {
            posterior[static_cast<std::size_t>(i)] =
                std::exp(log_terms[static_cast<std::size_t>(i)] - log_c);
        }
        std::vector<double> next(static_cast<std::size_t>(kappa), 0.0);
        double norm = 0.0;
        for (int i = 0; i < kappa; ++i) {
            for (int j = 0; j < kappa; ++j) {
                next[static_cast<std::size_t>(i)] +=
                    spec.transition(j, i) * posterior[static_cast<std::size_t>(j)];
            }
            norm += next[static_cast<std::size_t>(i)];
        }
        for (double& v : next) v /= norm;
        phi = std::move(next);
    }
    return out;
}

std::vector<double> markov_stationary(const Matrix& transition) {
    int kappa = static_cast<int>(transition.rows());
    if (kappa < 1 || transition.cols() != kappa) {
        throw parameter_error("transition matrix must be square");
    }
    Matrix A = Matrix::Zero(kappa + 1, kappa);
    Vector b = Vector::Zero(kappa + 1);
    A.topRows(kappa) = transition.transpose() - Matrix::Identity(kappa, kappa);
    A.row(kappa).setOnes();
    b(kappa) = 1.0;

    Vector pi = A.colPivHouseholderQr().solve(b);
    std::vector<double> out(static_cast<std::size_t>(kappa));
    double total = 0.0;
    for (int i = 0; i < kappa; ++i) {
        double v = std::max(0.0, pi(i));
        out[static_cast<std::size_t>(i)] = v;
        total += v;
    }
    if (!(total > 0.0)) throw numeric_guard_error("stationary distribution solve failed");
    for (double& v : out) v /= total;
    return out;
}

}  // namespace bayeslab
