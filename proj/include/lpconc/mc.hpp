#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "lpconc/lp.hpp"
#include "lpconc/moments.hpp"
#include "lpconc/rng.hpp"

namespace lpconc::mc {

struct EstimateWithCI {
    double value = 0.0;
    double std_error = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    std::uint64_t sample_count = 0;
    std::string ci_method = "normal";
};

struct McOptions {
    unsigned workers = 1;
    double ci_z = 1.96;
    std::uint64_t chunk_size = 4096;
};

EstimateWithCI wilson_interval(std::uint64_t hits, std::uint64_t n, double z);
EstimateWithCI normal_interval(const MomentAccumulator& acc, double z);

// Deterministic parallel chunk runner: fn(chunk_index, first_sample, count)
// is invoked once per chunk, possibly concurrently. Results must be stored
// per chunk by the caller and merged in chunk order.
void run_chunks(std::uint64_t total, std::uint64_t chunk_size, unsigned workers,
                const std::function<void(std::uint64_t, std::uint64_t, std::uint64_t)>& fn);

struct MomentProfileRow {
    double r;
    EstimateWithCI moment;  // I_r = (E ||X||_p^r)^{1/r}
    bool unstable = false;  // r <= -n/4
};

struct MomentProfile {
    std::int64_t n = 0;
    PExponent p;
    std::uint64_t sample_count = 0;
    std::vector<MomentProfileRow> rows;
};

struct NormMomentsResult {
    MomentAccumulator norm_acc;  // streaming moments of ||X||_p
    EstimateWithCI mean;
    EstimateWithCI variance;
    MomentProfile profile;
};

NormMomentsResult estimate_norm_moments(std::int64_t n, PExponent p, std::uint64_t N,
                                        std::uint64_t seed, std::span<const double> r_grid,
                                        McOptions opt = {});

struct TailPoint {
    double eps;
    std::uint64_t hits = 0;
    EstimateWithCI prob;  // zero-hit rows carry the Wilson upper bound only
};

struct TailCurve {
    std::int64_t n = 0;
    PExponent p;
    std::uint64_t sample_count = 0;
    std::uint64_t seed = 0;
    std::string centering = "empirical_mean";
    double center = 0.0;  // the centering value actually used
    std::vector<TailPoint> rows;
};

// Two-sided deviation probabilities P(| ||X||_p - center | > eps * center).
TailCurve tail_curve(std::int64_t n, PExponent p, std::span<const double> eps_grid,
                     std::uint64_t N, std::uint64_t seed,
                     const std::string& centering = "empirical_mean",
                     double theory_mean = 0.0, McOptions opt = {});

// Levy concentration function over sorted samples: max sliding-window
// fraction with window width 2t.
EstimateWithCI levy_concentration(std::span<const double> sorted_samples, double t,
                                  double z = 1.96);

// E | |g1|^p - |g2|^p |^r by adaptive quadrature; returns the log of the
// moment (the plain value overflows for large pr).
double pair_moment_quadrature_log(double p, double r);
double pair_moment_quadrature(double p, double r);

// (E | ||X||_p^p - ||Y||_p^p |^r)^{1/r} over N independent pairs.
EstimateWithCI pair_power_moment_mc(std::int64_t n, double p, double r, std::uint64_t N,
                                    std::uint64_t seed, McOptions opt = {});

struct TopOrderTailRow {
    int i;
    EstimateWithCI prob;  // P(x_i^* >= y_{[i/e^2]})
};

struct AnticoncReport {
    EstimateWithCI prob_q1;
    std::vector<TopOrderTailRow> top_order_tail;
    std::uint64_t q1_count = 0;
    std::uint64_t pnorm_violations = 0;
    std::uint64_t distance_violations = 0;
    EstimateWithCI levy_q;
};

AnticoncReport anticoncentration_experiment(std::int64_t n, double p, double eps,
                                            std::uint64_t N, std::uint64_t seed,
                                            McOptions opt = {});

struct ReverseConcentrationResult {
    TailCurve curve;
    double fitted_slope = 0.0;  // of log prob against eps * log n
    double r_squared = 0.0;
};

ReverseConcentrationResult reverse_concentration_check(std::int64_t n, double p,
                                                       std::span<const double> eps_grid,
                                                       std::uint64_t N, std::uint64_t seed,
                                                       McOptions opt = {});

}  // namespace lpconc::mc
