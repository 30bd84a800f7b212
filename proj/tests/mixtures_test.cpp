#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/distributions/inverse_gamma.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <limits>
#include <vector>

#include "bayeslab/dist.hpp"
#include "bayeslab/errors.hpp"
#include "bayeslab/mixtures.hpp"
#include "bayeslab/rng.hpp"
#include "bayeslab/special.hpp"
#include "support/stats.hpp"

using namespace bayeslab;
using testutil::kSeeds;

namespace {

std::vector<double> column(const Trace& trace, int dim, int warmup) {
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(trace.iterations() - warmup));
    for (int t = warmup; t < trace.iterations(); ++t) out.push_back(trace.draws(t, dim));
    return out;
}

std::vector<double> thin(const std::vector<double>& xs, std::size_t every) {
    std::vector<double> out;
    for (std::size_t i = 0; i < xs.size(); i += every) out.push_back(xs[i]);
    return out;
}

// Marginal allocation probability of z = 1 for a lone observation: each
// component's predictive is a scaled Student t, and the prior weight
// contributes alpha : beta.
double student_split(double x, const MixtureHyper& h) {
    double dens[2];
    for (int j = 0; j < 2; ++j) {
        double scale = std::sqrt(h.s2[j] * (h.n_prior[j] + 1.0) / (h.nu[j] * h.n_prior[j]));
        boost::math::students_t_distribution<> t(h.nu[j]);
        dens[j] = boost::math::pdf(t, (x - h.xi[j]) / scale) / scale;
    }
    return h.alpha * dens[0] / (h.alpha * dens[0] + h.beta * dens[1]);
}

// Normalized weight of every allocation of n <= 16 points, indexed by the
// same bitmask convention the sampler's sidecar uses (bit i = second
// component).
std::vector<double> enumerate_weights(std::span<const double> data, const MixtureHyper& h) {
    const std::size_t n = data.size();
    std::vector<double> lw(1u << n);
    Allocation alloc;
    alloc.z.resize(n);
    for (std::size_t mask = 0; mask < lw.size(); ++mask) {
        for (std::size_t i = 0; i < n; ++i) alloc.z[i] = (mask >> i) & 1u ? 2 : 1;
        lw[mask] = allocation_log_weight(data, alloc, h);
    }
    double total = log_sum_exp(lw);
    for (auto& w : lw) w = std::exp(w - total);
    return lw;
}

}  // namespace

TEST_CASE("em hands the dominant component the sample mean") {
    // With both components identical at the start, the responsibilities are a
    // constant that cancels out of the weighted mean.
    std::vector<double> data = {0.3, 1.2, -0.7, 2.1, 0.5};
    MixtureParams start;
    start.p = 1.0 - 1e-12;
    auto fit = em_fit(data, start, 1);
    REQUIRE(fit.path.size() == 2);
    CHECK(fit.path[1].mu[0] == doctest::Approx(testutil::mean_of(data)).epsilon(1e-12));
    CHECK(fit.path[1].p == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(!fit.collapsed);
}

TEST_CASE("em keeps a symmetric configuration symmetric") {
    std::vector<double> data = {-1.0, 1.0};
    MixtureParams start;
    start.mu = {-0.5, 0.5};
    auto fit = em_fit(data, start, 4);
    for (const auto& par : fit.path) {
        CHECK(std::fabs(par.p - 0.5) < 1e-13);
        CHECK(std::fabs(par.mu[0] + par.mu[1]) < 1e-12);
        CHECK(std::fabs(par.sigma2[0] - par.sigma2[1]) < 1e-12);
    }
}

TEST_CASE("em climbs the likelihood from every random start") {
    // Synthetic two-component sample: weights .4/.6, means 0/3.5,
    // variances 1.1/0.8, n = 324.
    const int n = 324;
    RngState gen(kSeeds[0]);
    std::vector<double> data(n);
    for (auto& x : data) {
        if (gen.next_double() < 0.4)
            x = 0.0 + std::sqrt(1.1) * sample_standard_normal(gen);
        else
            x = 3.5 + std::sqrt(0.8) * sample_standard_normal(gen);
    }

    RngState srng(kSeeds[1]);
    for (int rep = 0; rep < 20; ++rep) {
        MixtureParams start;
        start.p = 0.15 + 0.7 * srng.next_double();
        start.mu = {-2.0 + 7.5 * srng.next_double(), -2.0 + 7.5 * srng.next_double()};
        start.sigma2 = {0.3 + 2.7 * srng.next_double(), 0.3 + 2.7 * srng.next_double()};
        auto fit = em_fit(data, start, 40);
        REQUIRE(fit.path.size() >= 2);
        for (std::size_t k = 0; k + 1 < fit.log_lik.size(); ++k)
            CHECK(fit.log_lik[k + 1] - fit.log_lik[k] >= -1e-9);
    }
}

TEST_CASE("em flags a collapsing component and stops") {
    // Component one starts glued to the isolated point with a tiny variance;
    // its first M-step variance is numerically zero.
    std::vector<double> data = {0.0, 3.0, 3.4, 2.6, 3.8};
    MixtureParams start;
    start.mu = {0.0, 3.2};
    start.sigma2 = {1e-8, 1.0};
    auto fit = em_fit(data, start, 10);
    CHECK(fit.collapsed);
    CHECK(fit.path.size() == 1);
    CHECK(fit.log_lik.size() == 1);
}

TEST_CASE("em input validation") {
    std::vector<double> data = {1.0, 2.0};
    std::vector<double> empty;
    MixtureParams ok;
    CHECK_THROWS_AS(em_fit(empty, ok, 5), parameter_error);
    CHECK_THROWS_AS(em_fit(data, ok, 0), parameter_error);
    MixtureParams bad = ok;
    bad.p = 0.0;
    CHECK_THROWS_AS(em_fit(data, bad, 5), parameter_error);
    bad.p = 1.0;
    CHECK_THROWS_AS(em_fit(data, bad, 5), parameter_error);
    bad = ok;
    bad.sigma2[1] = 0.0;
    CHECK_THROWS_AS(em_fit(data, bad, 5), parameter_error);
}

TEST_CASE("single-observation allocation weights match the student predictive split") {
    // Independent oracle for the integrated weight formula: for one data
    // point, omega(z=1)/omega(z=2) must reduce to the ratio of prior-weighted
    // Student t predictive densities.
    auto check = [](double x, const MixtureHyper& h) {
        std::vector<double> data = {x};
        Allocation z1, z2;
        z1.z = {1};
        z2.z = {2};
        double l1 = allocation_log_weight(data, z1, h);
        double l2 = allocation_log_weight(data, z2, h);
        double p1 = std::exp(l1 - log_sum_exp(l1, l2));
        CHECK(std::fabs(p1 - student_split(x, h)) < 1e-10);
    };

    MixtureHyper a;
    a.xi = {0.0, 1.5};
    a.n_prior = {2.0, 3.0};
    a.nu = {5.0, 7.0};
    a.s2 = {4.0, 6.0};
    a.alpha = 1.5;
    a.beta = 2.5;
    check(0.7, a);

    MixtureHyper b;
    b.xi = {-2.0, 0.5};
    b.nu = {3.0, 3.0};
    b.s2 = {0.5, 1.5};
    b.alpha = 1.0;
    b.beta = 3.0;
    check(-0.5, b);

    MixtureHyper c;
    c.xi = {1.0, 1.0};
    c.n_prior = {4.0, 2.0};
    c.nu = {8.0, 2.0};
    c.s2 = {2.0, 2.0};
    c.alpha = 2.0;
    c.beta = 2.0;
    check(2.0, c);
}

TEST_CASE("integrated weight evaluates the hand-computed posterior scale") {
    // One point at xi_1 + 2 with unit prior weight n_1 = 1: the posterior
    // scale term is s2_1 + (1*1/2) * 4 = s2_1 + 2, here 5.
    MixtureHyper h;
    h.xi = {0.5, 0.0};
    h.n_prior = {1.0, 4.0};
    h.nu = {3.0, 5.0};
    h.s2 = {3.0, 2.0};
    h.alpha = 1.2;
    h.beta = 0.8;
    std::vector<double> data = {2.5};
    Allocation z;
    z.z = {1};
    double hand = std::lgamma(h.alpha + 1.0) + std::lgamma(h.beta)
                - std::lgamma(h.alpha + h.beta + 1.0)
                + std::lgamma(0.5 * (1.0 + h.nu[0])) - 0.5 * (h.nu[0] + 1.0) * std::log(5.0 / 2.0)
                - 0.5 * std::log(2.0)
                + std::lgamma(0.5 * h.nu[1]) - 0.5 * h.nu[1] * std::log(h.s2[1] / 2.0)
                - 0.5 * std::log(h.n_prior[1]);
    CHECK(allocation_log_weight(data, z, h) == doctest::Approx(hand).epsilon(1e-12));
}

TEST_CASE("first-sweep allocation probability is the posterior component split") {
    // The sampler starts from the prior point estimates (p = a/(a+b),
    // mu = xi, sigma2 = s2/nu); check the induced z probability two ways at
    // machine precision, then against the sampler's first-sweep frequency.
    auto split = [](double x, const MixtureHyper& h) {
        double p0 = h.alpha / (h.alpha + h.beta);
        double f[2];
        for (int j = 0; j < 2; ++j) {
            boost::math::normal_distribution<> nd(h.xi[j], std::sqrt(h.s2[j] / h.nu[j]));
            f[j] = boost::math::pdf(nd, x);
        }
        return p0 * f[0] / (p0 * f[0] + (1.0 - p0) * f[1]);
    };
    auto split_log = [](double x, const MixtureHyper& h) {
        double p0 = h.alpha / (h.alpha + h.beta);
        double l[2];
        for (int j = 0; j < 2; ++j) {
            double s2 = h.s2[j] / h.nu[j];
            l[j] = -0.5 * std::log(2.0 * M_PI * s2) - (x - h.xi[j]) * (x - h.xi[j]) / (2.0 * s2);
        }
        double l1 = std::log(p0) + l[0];
        double l2 = std::log1p(-p0) + l[1];
        return std::exp(l1 - log_sum_exp(l1, l2));
    };

    MixtureHyper hs[3];
    hs[0].xi = {-1.0, 1.0};
    hs[0].nu = {3.0, 3.0};
    hs[0].s2 = {3.0, 3.0};
    hs[1].xi = {0.0, 2.0};
    hs[1].nu = {2.0, 4.0};
    hs[1].s2 = {2.0, 8.0};
    hs[1].alpha = 2.0;
    hs[2].xi = {-2.0, 0.5};
    hs[2].nu = {1.0, 1.0};
    hs[2].s2 = {0.5, 1.5};
    hs[2].beta = 3.0;
    double xs[3] = {0.3, 1.0, -0.5};
    for (int k = 0; k < 3; ++k)
        CHECK(std::fabs(split(xs[k], hs[k]) - split_log(xs[k], hs[k])) < 1e-12);

    const int reps = 20000;
    std::vector<double> point = {xs[0]};
    int ones = 0;
    for (int r = 0; r < reps; ++r) {
        RngState rng(kSeeds[1], 1000 + static_cast<std::uint64_t>(r));
        auto trace = gibbs_mixture(point, hs[0], 1, rng);
        if (!(trace.sidecar[0] & 1)) ++ones;
    }
    double want = split(xs[0], hs[0]);
    double se = std::sqrt(want * (1.0 - want) / reps);
    CHECK(std::fabs(static_cast<double>(ones) / reps - want) < 3.0 * se);
}

TEST_CASE("long-run single-point allocation frequency matches the integrated weight") {
    MixtureHyper h;
    h.xi = {0.0, 1.5};
    h.n_prior = {2.0, 3.0};
    h.nu = {5.0, 7.0};
    h.s2 = {4.0, 6.0};
    h.alpha = 1.5;
    h.beta = 2.5;
    std::vector<double> point = {0.7};
    RngState rng(kSeeds[2]);
    auto trace = gibbs_mixture(point, h, 20000, rng);
    std::vector<double> indicator;
    for (int t = trace.warmup; t < trace.iterations(); ++t)
        indicator.push_back(trace.sidecar[t] & 1 ? 0.0 : 1.0);
    double want = student_split(0.7, h);
    CHECK(std::fabs(testutil::mean_of(indicator) - want) < 3.0 * testutil::batch_se(indicator));
}

TEST_CASE("an empty component draws its parameters from the prior") {
    // Data sit on top of xi_2 = 10 while component one is pinned at -10, so
    // every sweep leaves component one empty and its (mu, sigma2) draws are
    // iid prior draws: sigma2 ~ IG(nu/2, s2/2), mu ~ xi + sqrt(s2/(nu n0)) t_nu.
    MixtureHyper h;
    h.xi = {-10.0, 10.0};
    h.n_prior = {5.0, 5.0};
    h.nu = {6.0, 6.0};
    h.s2 = {6.0, 6.0};
    std::vector<double> data = {10.0, 10.4, 9.8};
    RngState rng(kSeeds[0]);
    auto trace = gibbs_mixture(data, h, 3000, rng);
    int full_mask = 0;
    for (int t = 0; t < trace.iterations(); ++t)
        if (trace.sidecar[t] == 7) ++full_mask;
    CHECK(full_mask == trace.iterations());

    auto mu1 = column(trace, 1, trace.warmup);
    auto s21 = column(trace, 3, trace.warmup);
    boost::math::students_t_distribution<> t6(6.0);
    double scale = std::sqrt(6.0 / (6.0 * 5.0));
    double ks_mu = testutil::ks_statistic(
        mu1, [&](double m) { return boost::math::cdf(t6, (m + 10.0) / scale); });
    CHECK(ks_mu < testutil::ks_critical_1pct(mu1.size()));
    boost::math::inverse_gamma_distribution<> ig(3.0, 3.0);
    double ks_s2 =
        testutil::ks_statistic(s21, [&](double v) { return boost::math::cdf(ig, v); });
    CHECK(ks_s2 < testutil::ks_critical_1pct(s21.size()));
}

TEST_CASE("allocation weights normalize and respect label exchange") {
    RngState gen(kSeeds[1]);
    std::vector<double> data(8);
    for (auto& x : data) x = 2.5 * (gen.next_double() - 0.5);
    MixtureHyper h;
    h.xi = {0.3, 0.3};
    h.nu = {4.0, 4.0};
    h.s2 = {4.0, 4.0};

    auto weights = enumerate_weights(data, h);
    double total = 0.0;
    for (double w : weights) total += w;
    CHECK(total == doctest::Approx(1.0).epsilon(1e-10));

    Allocation z, swapped;
    z.z.resize(8);
    swapped.z.resize(8);
    for (std::size_t mask = 0; mask < 256; mask += 7) {
        for (std::size_t i = 0; i < 8; ++i) {
            z.z[i] = (mask >> i) & 1u ? 2 : 1;
            swapped.z[i] = 3 - z.z[i];
        }
        CHECK(allocation_log_weight(data, z, h) ==
              doctest::Approx(allocation_log_weight(data, swapped, h)).epsilon(1e-12));
    }
}

TEST_CASE("exchangeable prior pins the posterior mean of the weight at one half") {
    MixtureHyper h;
    h.xi = {0.3, 0.3};
    h.nu = {4.0, 4.0};
    h.s2 = {4.0, 4.0};
    auto posterior_mean_p = [&](std::span<const double> data) {
        auto weights = enumerate_weights(data, h);
        const std::size_t n = data.size();
        double mean = 0.0;
        for (std::size_t mask = 0; mask < weights.size(); ++mask) {
            int ell2 = 0;
            for (std::size_t i = 0; i < n; ++i) ell2 += (mask >> i) & 1u;
            double ell1 = static_cast<double>(n - ell2);
            mean += weights[mask] * (h.alpha + ell1) / (h.alpha + h.beta + n);
        }
        return mean;
    };
    std::vector<double> two = {-0.3, 1.7};
    CHECK(posterior_mean_p(two) == doctest::Approx(0.5).epsilon(1e-10));
    std::vector<double> six = {-1.4, -0.8, 0.1, 0.6, 1.2, 2.0};
    CHECK(posterior_mean_p(six) == doctest::Approx(0.5).epsilon(1e-10));
}

TEST_CASE("gibbs allocation law matches exact enumeration") {
    // Dual route for the collapsed weight formula: the sampler never sees
    // omega(z), yet its long-run allocation frequencies must reproduce it.
    std::vector<double> data = {-1.6, -1.1, -0.7, -0.2, 0.3, 0.8, 1.3, 1.8};
    MixtureHyper h;
    h.xi = {-1.0, 1.0};
    h.nu = {4.0, 4.0};
    h.s2 = {4.0, 4.0};
    auto exact = enumerate_weights(data, h);

    const int iters = 1000000;
    RngState rng(kSeeds[0]);
    auto trace = gibbs_mixture(data, h, iters, rng);
    std::vector<double> empirical(256, 0.0);
    for (int t = trace.warmup; t < iters; ++t)
        empirical[static_cast<std::size_t>(trace.sidecar[t])] += 1.0;
    for (auto& e : empirical) e /= static_cast<double>(iters - trace.warmup);

    CHECK(testutil::tv_distance(exact, empirical) < 0.02);
}

TEST_CASE("allocation weight validation") {
    std::vector<double> data = {1.0, 2.0};
    MixtureHyper h;
    Allocation z;
    z.z = {1};
    CHECK_THROWS_AS(allocation_log_weight(data, z, h), parameter_error);
    z.z = {1, 3};
    CHECK_THROWS_AS(allocation_log_weight(data, z, h), parameter_error);
    z.z = {1, 2};
    MixtureHyper bad = h;
    bad.nu[0] = 0.0;
    CHECK_THROWS_AS(allocation_log_weight(data, z, bad), parameter_error);
}

TEST_CASE("sidecar keeps the allocation only for small samples") {
    MixtureHyper h;
    RngState rng(kSeeds[2]);
    std::vector<double> small = {0.1, -0.4};
    auto tr = gibbs_mixture(small, h, 5, rng);
    REQUIRE(tr.sidecar.size() == 5);
    for (int m : tr.sidecar) {
        CHECK(m >= 0);
        CHECK(m <= 3);
    }
    std::vector<double> big(33, 0.0);
    for (std::size_t i = 0; i < big.size(); ++i) big[i] = 0.1 * static_cast<double>(i);
    auto tr2 = gibbs_mixture(big, h, 5, rng);
    CHECK(tr2.sidecar.empty());
    CHECK(tr2.dims() == 5);
}

TEST_CASE("gibbs mixture input validation") {
    MixtureHyper h;
    RngState rng(kSeeds[0]);
    std::vector<double> data = {1.0};
    std::vector<double> empty;
    CHECK_THROWS_AS(gibbs_mixture(empty, h, 5, rng), parameter_error);
    CHECK_THROWS_AS(gibbs_mixture(data, h, 0, rng), parameter_error);
    MixtureHyper bad = h;
    bad.alpha = 0.0;
    CHECK_THROWS_AS(gibbs_mixture(data, bad, 5, rng), parameter_error);
    bad = h;
    bad.s2[1] = -1.0;
    CHECK_THROWS_AS(gibbs_mixture(data, bad, 5, rng), parameter_error);
    bad = h;
    bad.n_prior[0] = 0.0;
    CHECK_THROWS_AS(gibbs_mixture(data, bad, 5, rng), parameter_error);
}

TEST_CASE("location gibbs replay pins the centered conditionals") {
    // Replicate the (mu0, xi) recursion draw for draw.  Whenever the sweep
    // splits the four points evenly, the mu0 conditional mean must collapse
    // to the sample mean exactly; the data are chosen dyadic so xbar = 1.25
    // without rounding.
    std::vector<double> data = {0.25, 0.75, 1.25, 2.75};
    const int iters = 60;
    RngState rng(kSeeds[2]);
    RngState replay = rng;
    auto trace = gibbs_mixture_location(data, 0.0, 1.0, iters, rng,
                                        LocationParameterization::mu0xi, 0.5);

    auto dens1 = [](double x, double mu) {
        return -0.5 * std::log(2.0 * M_PI * 1.0) - (x - mu) * (x - mu) / (2.0 * 1.0);
    };
    const double nd = 4.0;
    double xbar = 0.0;
    for (double x : data) xbar += x;
    xbar /= nd;
    const double lw1 = std::log(0.5), lw2 = std::log1p(-0.5);

    double mu0 = xbar + sample_standard_normal(replay) / std::sqrt(nd);
    double xi = sample_standard_normal(replay);
    std::vector<int> z(4, 1);
    int even_splits = 0;
    for (int t = 0; t < iters; ++t) {
        double mu1 = mu0 - xi, mu2 = mu0 + xi;
        long long ell1 = 0;
        for (std::size_t i = 0; i < 4; ++i) {
            std::vector<double> lw = {lw1 + dens1(data[i], mu1), lw2 + dens1(data[i], mu2)};
            z[i] = 1 + sample_categorical_log(lw, replay);
            if (z[i] == 1) ++ell1;
        }
        double ell2 = nd - static_cast<double>(ell1);
        double center = (nd * xbar + (static_cast<double>(ell1) - ell2) * xi) / nd;
        if (ell1 == 2) {
            ++even_splits;
            CHECK(center == 1.25);
        }
        mu0 = center + sample_standard_normal(replay) / std::sqrt(nd);
        double s1 = 0.0;
        for (std::size_t i = 0; i < 4; ++i)
            if (z[i] == 1) s1 += data[i] - mu0;
        double s2 = nd * (xbar - mu0) - s1;
        xi = (s2 - s1) / nd + sample_standard_normal(replay) / std::sqrt(nd);
        CHECK(trace.draws(t, 0) == mu0);
        CHECK(trace.draws(t, 1) == xi);
    }
    CHECK(even_splits > 0);
}

TEST_CASE("both location parameterizations target the same posterior") {
    // mu1mu2 runs under a nearly flat prior (lambda = 1e-3) so its posterior
    // coincides with the flat-prior centered chain.  With weight 1/2 and
    // balanced clusters the posterior is exactly label-symmetric, so the
    // component midpoint and half-gap are swap-invariant statistics: their
    // laws agree across parameterizations no matter which labeling either
    // chain happens to occupy, and the comparison is immune to how rarely
    // the samplers cross the relabeling barrier.
    RngState gen(kSeeds[0], 9);
    std::vector<double> data;
    for (int i = 0; i < 15; ++i) data.push_back(-1.0 + sample_standard_normal(gen));
    for (int i = 0; i < 15; ++i) data.push_back(1.0 + sample_standard_normal(gen));

    const int iters = 100000;
    RngState ra(kSeeds[1]);
    auto direct = gibbs_mixture_location(data, 0.0, 1e-3, iters, ra,
                                         LocationParameterization::mu1mu2, 0.5);
    RngState rb(kSeeds[2]);
    auto centered = gibbs_mixture_location(data, 0.0, 1e-3, iters, rb,
                                           LocationParameterization::mu0xi, 0.5);

    std::vector<double> mid_direct, gap_direct, mid_centered, gap_centered;
    for (int t = direct.warmup; t < direct.iterations(); ++t) {
        mid_direct.push_back(0.5 * (direct.draws(t, 0) + direct.draws(t, 1)));
        gap_direct.push_back(0.5 * std::fabs(direct.draws(t, 1) - direct.draws(t, 0)));
    }
    for (int t = centered.warmup; t < centered.iterations(); ++t) {
        mid_centered.push_back(centered.draws(t, 0));
        gap_centered.push_back(std::fabs(centered.draws(t, 1)));
    }

    CHECK(std::fabs(testutil::mean_of(mid_direct) - testutil::mean_of(mid_centered)) <
          3.0 * std::sqrt(std::pow(testutil::batch_se(mid_direct), 2) +
                          std::pow(testutil::batch_se(mid_centered), 2)));

    auto a1 = thin(mid_direct, 10);
    auto b1 = thin(mid_centered, 10);
    auto a2 = thin(gap_direct, 10);
    auto b2 = thin(gap_centered, 10);
    double crit5 = 1.3581 * std::sqrt(static_cast<double>(a1.size() + b1.size()) /
                                      (static_cast<double>(a1.size()) * b1.size()));
    CHECK(testutil::ks_two_sample(a1, b1) < crit5);
    CHECK(testutil::ks_two_sample(a2, b2) < crit5);
}

TEST_CASE("mirrored data flips the separation coordinate") {
    // Under weights 0.7/0.3 the map x -> -x sends (mu0, xi) -> (-mu0, -xi),
    // so the xi chain on negated data must match the negated xi chain in law.
    // The relation holds whether the chains sit in the dominant labeling or
    // both in the minor one; it only needs the two runs to occupy mirrored
    // basins, which these streams do.
    RngState gen(kSeeds[0], 11);
    std::vector<double> data;
    for (int i = 0; i < 21; ++i) data.push_back(-1.2 + sample_standard_normal(gen));
    for (int i = 0; i < 9; ++i) data.push_back(1.8 + sample_standard_normal(gen));
    std::vector<double> mirrored(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) mirrored[i] = -data[i];

    const int iters = 40000;
    RngState r1(kSeeds[1], 3);
    auto tr = gibbs_mixture_location(data, 0.0, 1.0, iters, r1,
                                     LocationParameterization::mu0xi);
    RngState r2(kSeeds[2], 3);
    auto tm = gibbs_mixture_location(mirrored, 0.0, 1.0, iters, r2,
                                     LocationParameterization::mu0xi);

    auto xi = column(tr, 1, tr.warmup);
    auto xi_m = column(tm, 1, tm.warmup);
    auto mu0 = column(tr, 0, tr.warmup);
    auto mu0_m = column(tm, 0, tm.warmup);
    double tol_xi = 3.0 * std::sqrt(std::pow(testutil::batch_se(xi), 2) +
                                    std::pow(testutil::batch_se(xi_m), 2));
    CHECK(std::fabs(testutil::mean_of(xi_m) + testutil::mean_of(xi)) < tol_xi);
    double tol_mu = 3.0 * std::sqrt(std::pow(testutil::batch_se(mu0), 2) +
                                    std::pow(testutil::batch_se(mu0_m), 2));
    CHECK(std::fabs(testutil::mean_of(mu0_m) + testutil::mean_of(mu0)) < tol_mu);

    auto xa = thin(xi, 10);
    auto xb = thin(xi_m, 10);
    for (auto& v : xb) v = -v;
    CHECK(testutil::ks_two_sample(xa, xb) <
          testutil::ks_critical_1pct_two_sample(xa.size(), xb.size()));
}

TEST_CASE("location gibbs input validation") {
    RngState rng(kSeeds[0]);
    std::vector<double> data = {1.0};
    std::vector<double> empty;
    for (auto param : {LocationParameterization::mu1mu2, LocationParameterization::mu0xi}) {
        CHECK_THROWS_AS(gibbs_mixture_location(empty, 0.0, 1.0, 5, rng, param),
                        parameter_error);
        CHECK_THROWS_AS(gibbs_mixture_location(data, 0.0, 1.0, 0, rng, param),
                        parameter_error);
        CHECK_THROWS_AS(gibbs_mixture_location(data, 0.0, 1.0, 5, rng, param, 1.0),
                        parameter_error);
        CHECK_THROWS_AS(gibbs_mixture_location(data, 0.0, 1.0, 5, rng, param, 0.0),
                        parameter_error);
    }
    CHECK_THROWS_AS(
        gibbs_mixture_location(data, 0.0, 0.0, 5, rng, LocationParameterization::mu1mu2),
        parameter_error);
}

TEST_CASE("annealing exponent one reduces to the plain sampler") {
    RngState gen(kSeeds[0], 13);
    std::vector<double> data(10);
    for (auto& x : data) x = sample_standard_normal(gen);

    RngState r1(kSeeds[1]);
    RngState r2(kSeeds[1]);
    auto annealed = gibbs_mixture_annealed(data, 0.5, 0.3, 1, 500, r1);
    auto plain = gibbs_mixture_location(data, 0.3, 0.5, 500, r2,
                                        LocationParameterization::mu1mu2);
    CHECK((annealed.draws - plain.draws).cwiseAbs().maxCoeff() == 0.0);
    CHECK(r1.next_u64() == r2.next_u64());
}

TEST_CASE("a large annealing exponent pins the chain to the posterior mode") {
    RngState gen(kSeeds[0], 15);
    std::vector<double> data;
    for (int i = 0; i < 42; ++i) data.push_back(-3.0 + sample_standard_normal(gen));
    for (int i = 0; i < 18; ++i) data.push_back(3.0 + sample_standard_normal(gen));

    const double lambda = 0.1, delta = 0.0;
    auto log_post = [&](double m1, double m2) {
        double lp = -0.5 * lambda * (m1 - delta) * (m1 - delta)
                  - 0.5 * lambda * (m2 - delta) * (m2 - delta);
        for (double x : data) {
            double l1 = std::log(0.7) - 0.5 * (x - m1) * (x - m1);
            double l2 = std::log(0.3) - 0.5 * (x - m2) * (x - m2);
            lp += log_sum_exp(l1, l2);
        }
        return lp;
    };
    // Two-stage grid search; the posterior is unimodal within the searched
    // windows around the cluster means.
    auto grid_max = [&](double c1, double c2, double half, double step) {
        double best1 = c1, best2 = c2, best = log_post(c1, c2);
        for (double m1 = c1 - half; m1 <= c1 + half; m1 += step)
            for (double m2 = c2 - half; m2 <= c2 + half; m2 += step)
                if (double v = log_post(m1, m2); v > best) {
                    best = v;
                    best1 = m1;
                    best2 = m2;
                }
        return std::pair{best1, best2};
    };
    auto coarse = grid_max(-3.0, 3.0, 1.5, 0.05);
    auto fine = grid_max(coarse.first, coarse.second, 0.08, 0.002);

    RngState rng(kSeeds[2]);
    auto trace = gibbs_mixture_annealed(data, lambda, delta, 64, 400, rng);
    CHECK(std::fabs(trace.draws(399, 0) - fine.first) < 0.05);
    CHECK(std::fabs(trace.draws(399, 1) - fine.second) < 0.05);
}

TEST_CASE("tempered prior variance follows one over gamma lambda") {
    // Weight 1e-12 keeps component one empty almost surely, so its mean is an
    // iid draw from the tempered prior N(delta, 1/(gamma lambda)) each sweep.
    std::vector<double> data = {10.0, 10.3, 10.6};
    const double lambda = 0.5, delta = 10.3;
    auto chain = [&](int gamma, std::uint64_t stream) {
        RngState rng(kSeeds[0], stream);
        auto tr = gibbs_mixture_annealed(data, lambda, delta, gamma, 4000, rng, 1e-12);
        return column(tr, 0, tr.warmup);
    };
    auto g1 = chain(1, 21);
    auto g2 = chain(2, 22);
    double ratio = testutil::variance_of(g2) / testutil::variance_of(g1);
    CHECK(std::fabs(ratio - 0.5) < 0.06);

    auto g4 = chain(4, 23);
    boost::math::normal_distribution<> ref(delta, 1.0 / std::sqrt(4.0 * lambda));
    double ks = testutil::ks_statistic(g4, [&](double m) { return boost::math::cdf(ref, m); });
    CHECK(ks < testutil::ks_critical_1pct(g4.size()));
}

TEST_CASE("annealed sampler input validation") {
    RngState rng(kSeeds[0]);
    std::vector<double> data = {1.0};
    std::vector<double> empty;
    CHECK_THROWS_AS(gibbs_mixture_annealed(empty, 1.0, 0.0, 1, 5, rng), parameter_error);
    CHECK_THROWS_AS(gibbs_mixture_annealed(data, 0.0, 0.0, 1, 5, rng), parameter_error);
    CHECK_THROWS_AS(gibbs_mixture_annealed(data, 1.0, 0.0, 0, 5, rng), parameter_error);
    CHECK_THROWS_AS(gibbs_mixture_annealed(data, 1.0, 0.0, 1, 0, rng), parameter_error);
    CHECK_THROWS_AS(gibbs_mixture_annealed(data, 1.0, 0.0, 1, 5, rng, 1.0), parameter_error);
}

TEST_CASE("likelihood surface grows without bound along the collapse ridge") {
    std::vector<double> data = {0.8, -0.3, 1.5};
    std::vector<double> mu = {0.8};  // parked on the first observation
    std::vector<double> s2 = {1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
    auto surface = likelihood_surface(data, mu, s2);
    for (int k = 0; k + 1 < 5; ++k) CHECK(surface(0, k + 1) > surface(0, k));
}

TEST_CASE("likelihood surface merged components and reflection symmetry") {
    std::vector<double> data = {0.4, -1.1, 2.2, 0.9};
    std::vector<double> zero = {0.0};
    std::vector<double> unit = {1.0};
    double hand = 0.0;
    for (double x : data) hand += -0.5 * std::log(2.0 * M_PI) - 0.5 * x * x;
    CHECK(likelihood_surface(data, zero, unit)(0, 0) == doctest::Approx(hand).epsilon(1e-13));

    // Reflecting the data mirrors the surface in mu, bit for bit: the fixed
    // N(0,1) component is even and every squared deviation is unchanged.
    std::vector<double> mu = {-1.5, -0.5, 0.0, 0.5, 1.5};
    std::vector<double> s2 = {0.5, 1.0, 2.0};
    std::vector<double> neg(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) neg[i] = -data[i];
    auto orig = likelihood_surface(data, mu, s2);
    auto refl = likelihood_surface(neg, mu, s2);
    for (int r = 0; r < 5; ++r)
        for (int c = 0; c < 3; ++c) CHECK(refl(r, c) == orig(4 - r, c));
}

TEST_CASE("likelihood surface input validation") {
    std::vector<double> data = {1.0};
    std::vector<double> empty;
    std::vector<double> mu = {0.0};
    std::vector<double> s2 = {1.0};
    std::vector<double> bad_s2 = {1.0, 0.0};
    CHECK_THROWS_AS(likelihood_surface(empty, mu, s2), parameter_error);
    CHECK_THROWS_AS(likelihood_surface(data, empty, s2), parameter_error);
    CHECK_THROWS_AS(likelihood_surface(data, mu, empty), parameter_error);
    CHECK_THROWS_AS(likelihood_surface(data, mu, bad_s2), parameter_error);
}

TEST_CASE("partition counts by stars and bars") {
    using boost::multiprecision::cpp_int;
    CHECK(partitions_count(3, 2) == 4);
    for (long long n : {0LL, 1LL, 7LL, 50LL}) CHECK(partitions_count(n, 1) == 1);
    CHECK(partitions_count(0, 5) == 1);

    int brute = 0;
    for (int a = 0; a <= 5; ++a)
        for (int b = 0; b <= 5; ++b)
            for (int c = 0; c <= 5; ++c)
                if (a + b + c == 5) ++brute;
    CHECK(brute == 21);
    CHECK(partitions_count(5, 3) == brute);

    // Stars-and-bars Pascal recurrence on random cells.
    RngState rng(kSeeds[1]);
    for (int rep = 0; rep < 150; ++rep) {
        long long n = 1 + static_cast<long long>(rng.next_double() * 40.0);
        long long k = 2 + static_cast<long long>(rng.next_double() * 38.0);
        CHECK(partitions_count(n, k) ==
              partitions_count(n - 1, k) + partitions_count(n, k - 1));
    }

    // C(199, 100) overflows 64-bit; pin it against an exact Pascal triangle.
    std::vector<cpp_int> row = {1};
    for (int m = 1; m <= 199; ++m) {
        std::vector<cpp_int> next(m + 1, 1);
        for (int j = 1; j < m; ++j) next[j] = row[j - 1] + row[j];
        row = std::move(next);
    }
    auto big = partitions_count(100, 100);
    CHECK(big == row[100]);
    CHECK(big > cpp_int(std::numeric_limits<unsigned long long>::max()));

    CHECK_THROWS_AS(partitions_count(-1, 2), parameter_error);
    CHECK_THROWS_AS(partitions_count(3, 0), parameter_error);
}
