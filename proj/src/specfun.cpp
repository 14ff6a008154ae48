#include "lpconc/specfun.hpp"

#include <cmath>

namespace lpconc::specfun {

namespace {

constexpr double kSqrt2 = 1.4142135623730950488;
constexpr double kLnSqrtPi = 0.57236494292470008707;  // ln sqrt(pi)
constexpr double kLn2 = 0.69314718055994530942;

// Lanczos approximation, g = 7, 9 terms.
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

// Acklam's rational approximation for the normal inverse CDF; absolute
// error ~1.15e-9, refined below by Newton.
double inv_cdf_initial(double s) {
    static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                -2.759285104469687e+02, 1.383577518672690e+02,
                                -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                -1.556989798598866e+02, 6.680131188771972e+01,
                                -1.328068155288572e+01};
    static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                -2.400758277161838e+00, -2.549732539343734e+00,
                                4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                                2.445134137142996e+00, 3.754408661907416e+00};
    constexpr double s_low = 0.02425;

    if (s < s_low) {
        double q = std::sqrt(-2.0 * std::log(s));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (s <= 1.0 - s_low) {
        double q = s - 0.5;
        double r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    double q = std::sqrt(-2.0 * std::log1p(-s));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

}  // namespace

double ln_gamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("ln_gamma: requires x > 0");
    if (x < 0.5) {
        // reflection, only reached for x in (0, 0.5)
        return std::log(M_PI / std::sin(M_PI * x)) - ln_gamma(1.0 - x);
    }
    double z = x - 1.0;
    double acc = kLanczos[0];
    for (int i = 1; i < 9; ++i) acc += kLanczos[i] / (z + i);
    double t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * M_PI) + (z + 0.5) * std::log(t) - t + std::log(acc);
}

double std_normal_pdf(double x) {
    return std::exp(-0.5 * x * x) * 0.39894228040143267794;
}

double std_normal_cdf(double x) {
    return 0.5 * std::erfc(-x / kSqrt2);
}

double std_normal_inv_cdf(double s) {
    if (!(s > 0.0) || !(s < 1.0))
        throw std::domain_error("std_normal_inv_cdf: requires s in (0,1)");
    double x = inv_cdf_initial(s);
    for (int i = 0; i < 2; ++i) {
        double err = std_normal_cdf(x) - s;
        x -= err / std_normal_pdf(x);
    }
    return x;
}

MomentValue gaussian_abs_moment(double p) {
    if (!(p >= 0.0)) throw std::domain_error("gaussian_abs_moment: requires p >= 0");
    double lg = 0.5 * p * kLn2 + ln_gamma(0.5 * (p + 1.0)) - kLnSqrtPi;
    return MomentValue{lg, std::exp(lg)};
}

double gaussian_abs_moment_root(double p) {
    if (!(p > 0.0)) throw std::domain_error("gaussian_abs_moment_root: requires p > 0");
    return std::exp(gaussian_abs_moment(p).log_value / p);
}

Bracket mills_ratio_bracket(double a) {
    if (!(a > 0.0)) throw std::domain_error("mills_ratio_bracket: requires a > 0");
    return Bracket{a / (1.0 + a * a), 1.0 / a};
}

double abs_gauss_quantile(double s) {
    if (!(s > 0.0) || !(s < 1.0))
        throw std::domain_error("abs_gauss_quantile: requires s in (0,1)");
    return std_normal_inv_cdf(0.5 * (1.0 + s));
}

}  // namespace lpconc::specfun
