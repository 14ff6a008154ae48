#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lpconc {

// The norm index p in [1, inf], with an explicit infinity case.
struct PExponent {
    bool is_inf = false;
    double p = 2.0;  // meaningful only when !is_inf

    static PExponent finite(double p) {
        if (!(p >= 1.0)) throw std::domain_error("PExponent: requires p >= 1");
        return PExponent{false, p};
    }
    static PExponent infinity() { return PExponent{true, 0.0}; }

    // "inf" or a real >= 1
    static PExponent parse(const std::string& s);
    std::string to_string() const;
};

// ||x||_p, overflow-safe: scaled by max|x_i|, zero coordinates skipped.
double lp_norm(std::span<const double> x, PExponent p);

// ||x||_p^p in log space for finite p: returns (log of sum |x_i|^p), or
// -inf for the zero vector.
double lp_norm_p_log(std::span<const double> x, double p);

// Non-increasing rearrangement of |x|.
std::vector<double> sorted_abs_desc(std::span<const double> x);

}  // namespace lpconc
