#include "bayeslab/special.hpp"

#include <algorithm>
#include <limits>

#include <boost/math/distributions/fisher_f.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace bayeslab {

double log_sum_exp(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    double m = std::max(a, b);
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

double log_sum_exp(std::span<const double> log_terms) {
    double m = -std::numeric_limits<double>::infinity();
    for (double t : log_terms) m = std::max(m, t);
    if (m == -std::numeric_limits<double>::infinity()) return m;
    double acc = 0.0;
    for (double t : log_terms) acc += std::exp(t - m);
    return m + std::log(acc);
}

double log_factorial(long long n) {
    return std::lgamma(static_cast<double>(n) + 1.0);
}

double log_choose(long long n, long long k) {
    if (k < 0 || k > n) return -std::numeric_limits<double>::infinity();
    return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
}

double log_beta_fn(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double normal_cdf(double x) {
    static const boost::math::normal_distribution<double> unit(0.0, 1.0);
    return boost::math::cdf(unit, x);
}

double normal_quantile(double p) {
    static const boost::math::normal_distribution<double> unit(0.0, 1.0);
    return boost::math::quantile(unit, p);
}

double inc_beta(double a, double b, double x) {
    return boost::math::ibeta(a, b, x);
}

double inc_beta_inv(double a, double b, double p) {
    return boost::math::ibeta_inv(a, b, p);
}

double inc_gamma_lower(double a, double x) {
    return boost::math::gamma_p(a, x);
}

double f_quantile(double d1, double d2, double p) {
    boost::math::fisher_f_distribution<double> f(d1, d2);
    return boost::math::quantile(f, p);
}

double student_t_quantile(double nu, double p) {
    boost::math::students_t_distribution<double> t(nu);
    return boost::math::quantile(t, p);
}

}  // namespace bayeslab
