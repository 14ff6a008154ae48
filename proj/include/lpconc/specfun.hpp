#pragma once

#include <stdexcept>

namespace lpconc::specfun {

// sigma_p^p = E|g|^p for standard normal g, kept in log space since the
// plain value overflows near p ~ 300.
struct MomentValue {
    double log_value;  // ln sigma_p^p, always finite for p >= 0
    double value;      // exp(log_value), +inf on overflow
};

struct Bracket {
    double lower;
    double upper;
};

// ln Gamma(x) for x > 0. Relative error below 1e-13 on [0.5, 1e6].
double ln_gamma(double x);

double std_normal_pdf(double x);
double std_normal_cdf(double x);

// Inverse of std_normal_cdf on (0,1): rational initial guess plus two
// Newton refinements on the CDF.
double std_normal_inv_cdf(double s);

// sigma_p^p = 2^{p/2} Gamma((p+1)/2) / sqrt(pi), p >= 0.
MomentValue gaussian_abs_moment(double p);

// sigma_p = (sigma_p^p)^{1/p}, p > 0.
double gaussian_abs_moment_root(double p);

// Bounds for e^{a^2/2} int_a^inf e^{-t^2/2} dt: [a/(1+a^2), 1/a].
Bracket mills_ratio_bracket(double a);

// xi_s with P(|g| <= xi_s) = s, i.e. Phi^{-1}((1+s)/2), 0 < s < 1.
double abs_gauss_quantile(double s);

}  // namespace lpconc::specfun
