#include "lpconc/fit.hpp"

#include <cmath>
#include <stdexcept>

namespace lpconc {

FitResult ols_fit(std::span<const double> x, std::span<const double> y,
                  const std::string& model) {
    if (x.size() != y.size() || x.size() < 3)
        throw std::domain_error("ols_fit: requires >= 3 matching rows");
    const size_t n = x.size();
    double sx = 0.0, sy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    const double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw std::domain_error("ols_fit: degenerate design (constant x)");
    FitResult out;
    out.model = model;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    out.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return out;
}

}  // namespace lpconc
