#include "lpconc/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lpconc {

PExponent PExponent::parse(const std::string& s) {
    if (s == "inf" || s == "Inf" || s == "INF") return infinity();
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::domain_error("PExponent: cannot parse '" + s + "'");
    return finite(v);
}

std::string PExponent::to_string() const {
    if (is_inf) return "inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", p);
    return buf;
}

namespace {

// t in (0,1], t^p without pow() when p is a small integer
inline double pow_scaled(double t, double p, bool integer_p, int ip) {
    if (integer_p) {
        double acc = 1.0, base = t;
        int e = ip;
        while (e > 0) {
            if (e & 1) acc *= base;
            base *= base;
            e >>= 1;
        }
        return acc;
    }
    double lt = p * std::log(t);
    return lt < -745.0 ? 0.0 : std::exp(lt);
}

}  // namespace

double lp_norm(std::span<const double> x, PExponent pe) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::fabs(v));
    if (m == 0.0) return 0.0;
    if (pe.is_inf) return m;
    const double p = pe.p;
    const double inv_m = 1.0 / m;
    if (p == 1.0) {
        double s = 0.0;
        for (double v : x) s += std::fabs(v) * inv_m;
        return m * s;
    }
    if (p == 2.0) {
        double s = 0.0;
        const double inv = 1.0 / m;
        for (double v : x) {
            double t = v * inv;
            s += t * t;
        }
        return m * std::sqrt(s);
    }
    const int ip = static_cast<int>(p);
    const bool integer_p = (p == ip && ip <= 64);
    double s = 0.0;
    const double inv = 1.0 / m;
    for (double v : x) {
        double t = std::fabs(v) * inv;
        if (t == 0.0) continue;
        s += pow_scaled(t, p, integer_p, ip);
    }
    return m * std::exp(std::log(s) / p);
}

double lp_norm_p_log(std::span<const double> x, double p) {
    double m = 0.0;
    for (double v : x) m = std::max(m, std::fabs(v));
    if (m == 0.0) return -std::numeric_limits<double>::infinity();
    const int ip = static_cast<int>(p);
    const bool integer_p = (p == ip && ip <= 64);
    double s = 0.0;
    const double inv = 1.0 / m;
    for (double v : x) {
        double t = std::fabs(v) * inv;
        if (t == 0.0) continue;
        s += pow_scaled(t, p, integer_p, ip);
    }
    return p * std::log(m) + std::log(s);
}

std::vector<double> sorted_abs_desc(std::span<const double> x) {
    std::vector<double> out(x.size());
    std::transform(x.begin(), x.end(), out.begin(),
                   [](double v) { return std::fabs(v); });
    std::sort(out.begin(), out.end(), std::greater<double>());
    return out;
}

}  // namespace lpconc
