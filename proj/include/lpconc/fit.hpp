#pragma once

#include <span>
#include <string>

namespace lpconc {

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::string model;
};

// Ordinary least squares y ~ intercept + slope * x.
FitResult ols_fit(std::span<const double> x, std::span<const double> y,
                  const std::string& model = "");

}  // namespace lpconc
