#include "lpconc/theory.hpp"

#include <cmath>

#include "lpconc/specfun.hpp"

namespace lpconc::theory {

using specfun::gaussian_abs_moment;
using specfun::gaussian_abs_moment_root;
using specfun::ln_gamma;

namespace {

void require_n(int64_t n, int64_t least) {
    if (n < least) throw std::domain_error("theory: n too small");
}

void require_eps(double eps) {
    if (!(eps > 0.0) || !(eps < 1.0)) throw std::domain_error("theory: requires eps in (0,1)");
}

// large-p branch of beta/variance evaluated at effective p; p = inf is
// read as p = log n (the norms are equivalent there up to constants)
double effective_p(PExponent p, double logn) { return p.is_inf ? logn : p.p; }

}  // namespace

TheoryPrediction mean_lp_prediction(int64_t n, PExponent p) {
    require_n(n, 2);
    TheoryPrediction out;
    const double logn = std::log(static_cast<double>(n));
    if (!p.is_inf && p.p == 1.0) {
        out.value = static_cast<double>(n) * std::sqrt(2.0 / M_PI);
        out.regime = "exact p=1";
    } else if (!p.is_inf && p.p == 2.0) {
        out.value = std::exp(0.5 * std::log(2.0) +
                             ln_gamma(0.5 * (n + 1.0)) - ln_gamma(0.5 * n));
        out.regime = "exact p=2";
    } else if (p.is_inf || p.p >= logn) {
        out.value = std::sqrt(logn);
        out.regime = "p >= log n";
    } else {
        out.value = std::pow(static_cast<double>(n), 1.0 / p.p) * std::sqrt(p.p);
        out.regime = "p < log n";
    }
    return out;
}

TheoryPrediction critical_dimension(int64_t n, PExponent p) {
    require_n(n, 2);
    TheoryPrediction out;
    const double logn = std::log(static_cast<double>(n));
    if (!p.is_inf && p.p <= 2.0) {
        out.value = static_cast<double>(n);
        out.regime = "1 <= p <= 2";
    } else if (!p.is_inf && p.p <= logn) {
        out.value = p.p * std::pow(static_cast<double>(n), 2.0 / p.p);
        out.regime = "2 <= p <= log n";
    } else {
        out.value = logn;
        out.regime = "p >= log n";
    }
    return out;
}

TheoryPrediction beta_exponent(int64_t n, PExponent p, double eps,
                               TheoryConstants constants) {
    require_n(n, 2);
    require_eps(eps);
    TheoryPrediction out;
    out.constants = constants;
    const double nn = static_cast<double>(n);
    const double logn = std::log(nn);
    if (!p.is_inf && p.p <= 2.0) {
        out.value = eps * eps * nn;
        out.regime = "1 <= p <= 2";
        return out;
    }
    const double pp = effective_p(p, logn);
    const double n2p = std::pow(nn, 2.0 / pp);
    if (!p.is_inf && pp <= constants.c0 * logn) {
        double sub = std::min(pp * pp * std::exp2(-pp) * eps * eps * nn,
                              std::pow(eps * nn, 2.0 / pp));
        out.value = std::max(sub, eps * pp * n2p);
        out.regime = "2 < p <= c0 log n";
    } else {
        out.value = eps * pp * n2p;
        out.regime = "p > c0 log n";
    }
    return out;
}

TheoryPrediction dvoretzky_dimension(int64_t n, PExponent p, double eps,
                                     TheoryConstants constants) {
    require_n(n, 2);
    require_eps(eps);
    TheoryPrediction out;
    out.constants = constants;
    const double nn = static_cast<double>(n);
    const double logn = std::log(nn);
    const double log1eps = std::log(1.0 / eps);
    if (!p.is_inf && p.p <= 2.0) {
        out.value = eps * eps * nn;
        out.regime = "1 <= p <= 2";
        return out;
    }
    const double pp = p.is_inf ? logn : p.p;
    if (p.is_inf || p.p >= constants.c0 * logn) {
        out.value = eps * logn / log1eps;
        out.regime = "p >= c0 log n";
        return out;
    }
    const double Cp = constants.C * pp;
    const double eps_break =
        std::pow(Cp, 0.5 * pp) * std::pow(nn, -(pp - 2.0) / (2.0 * (pp - 1.0)));
    double k;
    if (eps <= eps_break) {
        k = std::pow(Cp, -pp) * eps * eps * nn;
        out.regime = "2 < p < c0 log n, small eps";
    } else if (eps <= 1.0 / pp) {
        k = std::pow(eps * nn, 2.0 / pp) / pp;
        out.regime = "2 < p < c0 log n, middle eps";
    } else {
        k = eps * pp * std::pow(nn, 2.0 / pp) / log1eps;
        out.regime = "2 < p < c0 log n, large eps";
    }
    // floor lower bound for p < c0 log n
    double floor_k = logn / log1eps;
    if (floor_k > k) {
        k = floor_k;
        out.regime += " (log n floor)";
    }
    out.value = k;
    return out;
}

TheoryPrediction tau(int64_t n, double p, double t, TheoryConstants constants) {
    require_n(n, 2);
    if (!(t > 0.0)) throw std::domain_error("tau: requires t > 0");
    TheoryPrediction out;
    out.constants = constants;
    const double nn = static_cast<double>(n);
    const double n2p = std::pow(nn, 2.0 / p);
    const double a = t * t * p * n2p;
    const double b = std::min(t * t * nn / std::pow(constants.C, p),
                              std::pow(t * nn, 2.0 / p));
    out.value = std::max(a, b);
    out.regime = a >= b ? "net term t^2 p n^{2/p}" : "chain term min{t^2 n/C^p,(tn)^{2/p}}";
    return out;
}

TheoryPrediction psi(int64_t n, double p, double r) {
    require_n(n, 2);
    if (!(r >= 2.0)) throw std::domain_error("psi: requires r >= 2");
    TheoryPrediction out;
    const double nn = static_cast<double>(n);
    const double sigma_p = gaussian_abs_moment_root(p);
    const double log_sigma_p_p = gaussian_abs_moment(p).log_value;
    const double sigma_2p2 = gaussian_abs_moment_root(2.0 * p - 2.0);
    const double first = 1.0 / (sigma_p * std::pow(nn, 1.0 / p));
    const double log_second =
        (p - 1.0) * std::log(sigma_2p2) - 0.5 * std::log(nn) - log_sigma_p_p +
        0.5 * (p - 1.0) *
            std::log1p(p * r / (sigma_2p2 * sigma_2p2 * std::pow(nn, 1.0 / (p - 1.0))));
    const double second = std::exp(log_second);
    out.value = std::sqrt(r) * std::min(first, second);
    out.regime = first <= second ? "1/(sigma_p n^{1/p})" : "gradient-moment branch";
    return out;
}

TheoryPrediction theta_exponent(int64_t n, double p, double eps) {
    require_n(n, 2);
    if (!(p > 2.0)) throw std::domain_error("theta_exponent: requires p > 2");
    if (!(eps > 0.0) || !(eps < 1.0 / p))
        throw std::domain_error("theta_exponent: requires 0 < eps < 1/p");
    TheoryPrediction out;
    const double nn = static_cast<double>(n);
    const double a = p * p * eps * eps * nn * std::exp2(-p);
    const double b = std::pow(eps * nn, 2.0 / p);
    out.value = std::min(a, b);
    out.regime = a <= b ? "p^2 eps^2 n / 2^p" : "(eps n)^{2/p}";
    return out;
}

TheoryPrediction variance_prediction(int64_t n, PExponent p, TheoryConstants constants) {
    require_n(n, 3);
    TheoryPrediction out;
    out.constants = constants;
    const double nn = static_cast<double>(n);
    const double logn = std::log(nn);
    if (!p.is_inf && p.p <= constants.c0 * logn) {
        out.value = std::exp2(p.p) / p.p * std::pow(nn, 2.0 / p.p - 1.0);
        out.regime = "p <= c0 log n";
    } else {
        out.value = 1.0 / logn;
        out.regime = "p > c0 log n";
    }
    return out;
}

double delta_method_variance_limit(double p) {
    if (!(p >= 1.0)) throw std::domain_error("delta_method_variance_limit: requires p >= 1");
    const double l2p = gaussian_abs_moment(2.0 * p).log_value;  // ln sigma_{2p}^{2p}
    const double lp = gaussian_abs_moment(p).log_value;         // ln sigma_p^p
    // v_p^2 = sigma_{2p}^{2p} - sigma_p^{2p}; denominator p^2 sigma_p^{2(p-1)}
    const double log_den = 2.0 * std::log(p) + 2.0 * (p - 1.0) / p * lp;
    return std::exp(l2p - log_den) - std::exp(2.0 * lp - log_den);
}

double gumbel_a_n(int64_t n) {
    require_n(n, 2);
    return -specfun::std_normal_inv_cdf(0.5 / static_cast<double>(n));
}

TheoryPrediction gumbel_variance_prediction(int64_t n) {
    const double a = gumbel_a_n(n);
    TheoryPrediction out;
    out.value = M_PI * M_PI / (6.0 * a * a);
    out.regime = "gumbel limit";
    return out;
}

double gaussian_to_spherical_factor(int64_t n, double r) {
    require_n(n, 1);
    if (!(r > -static_cast<double>(n)) || r == 0.0)
        throw std::domain_error("gaussian_to_spherical_factor: requires r > -n, r != 0");
    const double lg = ln_gamma(0.5 * (n + r)) - ln_gamma(0.5 * n);
    return std::sqrt(2.0) * std::exp(lg / r);
}

PowerDiffBracket power_diff_bracket(double a, double b, double theta) {
    if (!(a > 0.0) || !(b > 0.0))
        throw std::domain_error("power_diff_bracket: requires a,b > 0");
    if (!(theta > 0.0) || !(theta <= 1.0))
        throw std::domain_error("power_diff_bracket: requires theta in (0,1]");
    const double diff = std::fabs(a - b);
    PowerDiffBracket out;
    out.lower = theta * diff * std::pow(2.0 / (a + b), 1.0 - theta);
    out.exact = std::fabs(std::pow(a, theta) - std::pow(b, theta));
    out.upper = theta * diff * 0.5 * (std::pow(a, theta - 1.0) + std::pow(b, theta - 1.0));
    return out;
}

QuantileVector quantile_vector(int64_t n) {
    if (n < 1) throw std::domain_error("quantile_vector: requires n >= 1");
    QuantileVector out;
    out.n = n;
    out.y.resize(static_cast<size_t>(n));
    const double nn = static_cast<double>(n);
    for (int64_t i = 1; i <= n; ++i)
        out.y[static_cast<size_t>(i - 1)] =
            specfun::abs_gauss_quantile(1.0 - (static_cast<double>(i) - 0.5) / nn);
    out.y0 = specfun::abs_gauss_quantile(1.0 - 0.25 / nn);
    return out;
}

ChainingSchedule dudley_fernique_schedule(double p, int j_max, int64_t k) {
    if (!(p > 2.0)) throw std::domain_error("dudley_fernique_schedule: requires p > 2");
    if (j_max < 1) throw std::domain_error("dudley_fernique_schedule: requires j_max >= 1");
    ChainingSchedule out;
    // s_p = sum_{j>=1} j^{p/2} e^{-j}, terms peak near j = p/2
    double s = 0.0;
    for (int j = 1;; ++j) {
        double term = std::exp(0.5 * p * std::log(static_cast<double>(j)) - j);
        s += term;
        if (j > p && term < 1e-16 * s) break;
    }
    out.s_p = s;
    out.levels.reserve(static_cast<size_t>(j_max));
    for (int j = 1; j <= j_max; ++j) {
        ChainingLevel lvl;
        lvl.delta = std::exp(-static_cast<double>(j));
        lvl.t = std::exp(0.5 * p * std::log(static_cast<double>(j)) - j) / s;
        lvl.log_net_cardinality_bound =
            static_cast<double>(k) * (std::log(3.0) + static_cast<double>(j));
        out.levels.push_back(lvl);
    }
    return out;
}

}  // namespace lpconc::theory
