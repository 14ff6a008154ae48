#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <vector>

#include "lpconc/mc.hpp"
#include "lpconc/specfun.hpp"
#include "lpconc/theory.hpp"

using namespace lpconc;

TEST_CASE("wilson_interval shapes") {
    auto z0 = mc::wilson_interval(0, 1000, 1.96);
    CHECK(z0.value == 0.0);
    CHECK(z0.ci_low == 0.0);
    CHECK(z0.ci_high > 0.0);
    CHECK(z0.ci_high < 0.01);

    auto full = mc::wilson_interval(1000, 1000, 1.96);
    CHECK(full.value == 1.0);
    CHECK(full.ci_high == 1.0);
    CHECK(full.ci_low < 1.0);

    auto half = mc::wilson_interval(500, 1000, 1.96);
    CHECK(half.value == doctest::Approx(0.5));
    CHECK(half.ci_low < 0.5);
    CHECK(half.ci_high > 0.5);
    CHECK(half.ci_high - half.ci_low < 0.07);
}

TEST_CASE("run_chunks partitions every sample exactly once") {
    for (unsigned workers : {1u, 4u}) {
        std::vector<std::uint64_t> counts(7, 0);
        std::vector<std::uint64_t> firsts(7, 0);
        mc::run_chunks(25000, 4096, workers,
                       [&](std::uint64_t c, std::uint64_t first, std::uint64_t count) {
                           counts[c] = count;
                           firsts[c] = first;
                       });
        std::uint64_t total = 0;
        for (std::uint64_t c = 0; c < 7; ++c) {
            CHECK(firsts[c] == c * 4096);
            total += counts[c];
        }
        CHECK(total == 25000);
        CHECK(counts[6] == 25000 - 6 * 4096);
    }
}

TEST_CASE("norm moments: n=1 mean is the first absolute Gaussian moment") {
    for (double p : {1.0, 2.0, 3.0}) {
        auto res = mc::estimate_norm_moments(1, PExponent::finite(p), 200000, 11, {});
        const double sigma1 = std::sqrt(2.0 / M_PI);  // E|g| regardless of p at n=1
        CHECK(std::fabs(res.mean.value - sigma1) <= 4.0 * res.mean.std_error);
    }
}

TEST_CASE("norm moments: exact Euclidean mean at n=16") {
    auto res = mc::estimate_norm_moments(16, PExponent::finite(2), 200000, 12, {});
    const double exact = 3.9380256218897384;  // sqrt(2) Gamma(17/2)/Gamma(8)
    CHECK(std::fabs(res.mean.value - exact) <= 4.0 * res.mean.std_error);
    CHECK(res.variance.value > 0.0);
    CHECK(res.variance.value < 1.0);
}

TEST_CASE("moment profile is nondecreasing in r and flags unstable orders") {
    std::vector<double> r_grid{-2.0, 1.0, 2.0, 4.0, 8.0};
    auto res = mc::estimate_norm_moments(32, PExponent::finite(3), 20000, 13, r_grid);
    REQUIRE(res.profile.rows.size() == r_grid.size());
    for (size_t i = 1; i < res.profile.rows.size(); ++i)
        CHECK(res.profile.rows[i].moment.value >=
              res.profile.rows[i - 1].moment.value * (1.0 - 1e-12));
    for (const auto& row : res.profile.rows) CHECK_FALSE(row.unstable);

    std::vector<double> deep{-3.0};
    auto small = mc::estimate_norm_moments(8, PExponent::finite(2), 1000, 14, deep);
    CHECK(small.profile.rows[0].unstable);  // r <= -n/4

    std::vector<double> bad{0.0};
    CHECK_THROWS_AS(mc::estimate_norm_moments(8, PExponent::finite(2), 1000, 1, bad),
                    std::domain_error);
}

TEST_CASE("estimates are byte-identical across worker counts") {
    mc::McOptions one, eight;
    one.workers = 1;
    eight.workers = 8;
    std::vector<double> r_grid{1.0, 2.0};
    auto a = mc::estimate_norm_moments(64, PExponent::finite(4), 50000, 99, r_grid, one);
    auto b = mc::estimate_norm_moments(64, PExponent::finite(4), 50000, 99, r_grid, eight);
    CHECK(a.mean.value == b.mean.value);
    CHECK(a.variance.value == b.variance.value);
    for (size_t i = 0; i < a.profile.rows.size(); ++i)
        CHECK(a.profile.rows[i].moment.value == b.profile.rows[i].moment.value);

    std::vector<double> eps{0.02, 0.05, 0.1};
    auto ta = mc::tail_curve(64, PExponent::finite(4), eps, 50000, 99, "empirical_mean", 0.0, one);
    auto tb =
        mc::tail_curve(64, PExponent::finite(4), eps, 50000, 99, "empirical_mean", 0.0, eight);
    CHECK(ta.center == tb.center);
    for (size_t i = 0; i < ta.rows.size(); ++i) CHECK(ta.rows[i].hits == tb.rows[i].hits);
}

TEST_CASE("tail_curve monotone decreasing in eps with both centerings") {
    std::vector<double> eps{0.01, 0.05, 0.1, 0.2};
    auto emp = mc::tail_curve(100, PExponent::finite(2), eps, 50000, 21);
    for (size_t i = 1; i < emp.rows.size(); ++i)
        CHECK(emp.rows[i].hits <= emp.rows[i - 1].hits);
    CHECK(emp.rows[0].prob.value > emp.rows.back().prob.value);

    const double mean2 = theory::gaussian_to_spherical_factor(100, 1.0);
    auto th = mc::tail_curve(100, PExponent::finite(2), eps, 50000, 21, "theory_mean", mean2);
    CHECK(th.center == mean2);
    // the two centers are close, so the curves should roughly agree
    for (size_t i = 0; i < eps.size(); ++i)
        CHECK(std::fabs(th.rows[i].prob.value - emp.rows[i].prob.value) < 0.05);
}

TEST_CASE("levy_concentration on uniform samples") {
    RngStream s(31, 0);
    std::vector<double> u(200000);
    for (auto& v : u) v = s.next_uniform();
    std::sort(u.begin(), u.end());
    auto q = mc::levy_concentration(u, 0.05);
    CHECK(q.value == doctest::Approx(0.1).epsilon(0.05));
}

TEST_CASE("levy_concentration matches the quadratic scan on small inputs") {
    RngStream s(32, 0);
    std::vector<double> x(1000);
    for (auto& v : x) v = s.next_normal();
    std::sort(x.begin(), x.end());
    for (double t : {0.01, 0.1, 0.5}) {
        auto fast = mc::levy_concentration(x, t);
        std::uint64_t best = 0;
        for (double c : x) {
            std::uint64_t cnt = 0;
            for (double v : x)
                if (v >= c && v <= c + 2.0 * t) ++cnt;
            best = std::max(best, cnt);
        }
        CHECK(fast.value == doctest::Approx(static_cast<double>(best) / x.size()));
    }
}

TEST_CASE("pair moment quadrature closed forms at p=2") {
    // |g1^2 - g2^2|: E = 4/pi, E of square = 4
    CHECK(mc::pair_moment_quadrature(2.0, 2.0) == doctest::Approx(4.0).epsilon(1e-8));
    CHECK(mc::pair_moment_quadrature(2.0, 1.0) == doctest::Approx(4.0 / M_PI).epsilon(1e-8));
}

TEST_CASE("pair moment quadrature is finite and monotone for large pr") {
    double prev = -1e300;
    for (double r : {1.0, 2.0, 4.0, 8.0}) {
        double lv = mc::pair_moment_quadrature_log(20.0, r) / r;
        CHECK(std::isfinite(lv));
        CHECK(lv >= prev);  // Lyapunov monotonicity of (E D^r)^{1/r}
        prev = lv;
    }
}

TEST_CASE("pair power moment MC agrees with quadrature at n=1") {
    for (double r : {2.0, 3.0}) {
        auto est = mc::pair_power_moment_mc(1, 3.0, r, 200000, 41);
        const double exact = std::exp(mc::pair_moment_quadrature_log(3.0, r) / r);
        CHECK(std::fabs(est.value - exact) <= 4.0 * est.std_error);
    }
}

TEST_CASE("anticoncentration experiment smoke run") {
    const std::int64_t n = 100;
    const double p = 56.0;  // >= 12 ln n
    auto rep = mc::anticoncentration_experiment(n, p, 0.5, 4000, 51);
    CHECK(rep.prob_q1.value > 0.0);
    CHECK(rep.prob_q1.value < 1.0);
    CHECK(rep.q1_count > 0);
    for (const auto& row : rep.top_order_tail) {
        CHECK(row.prob.value >= 0.0);
        CHECK(row.prob.value <= 1.0);
    }
    CHECK(rep.levy_q.value > 0.0);
    CHECK(rep.levy_q.value <= 1.0);
    CHECK_THROWS_AS(mc::anticoncentration_experiment(n, 10.0, 0.5, 4000, 51),
                    std::domain_error);
}

TEST_CASE("reverse concentration fit has a negative slope") {
    std::vector<double> eps{0.2, 0.4, 0.6, 0.8, 1.0};
    auto res = mc::reverse_concentration_check(50, 16.0, eps, 50000, 61);
    CHECK(res.fitted_slope < 0.0);
    CHECK(res.r_squared > 0.5);
}
