#pragma once

#include <cmath>
#include <span>
#include <vector>

namespace bayeslab {

// log(exp(a) + exp(b)) without overflow.
double log_sum_exp(double a, double b);
// log sum of exp over a range; empty range gives -inf.
double log_sum_exp(std::span<const double> log_terms);

double log_factorial(long long n);          // log n!
double log_choose(long long n, long long k);  // -inf outside 0 <= k <= n
double log_beta_fn(double a, double b);

// Standard normal.
double normal_cdf(double x);
double normal_quantile(double p);

// Regularized incomplete beta I_x(a,b) and its inverse in x.
double inc_beta(double a, double b, double x);
double inc_beta_inv(double a, double b, double p);

// Regularized lower incomplete gamma P(a,x).
double inc_gamma_lower(double a, double x);

// Quantile of the F(d1, d2) distribution.
double f_quantile(double d1, double d2, double p);

// Quantile of Student's t with nu degrees of freedom.
double student_t_quantile(double nu, double p);

}  // namespace bayeslab
