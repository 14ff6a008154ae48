#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lpconc/lp.hpp"
#include "lpconc/mc.hpp"
#include "lpconc/rng.hpp"

namespace lpconc::sections {

// n x k matrix with i.i.d. standard normal entries; its column span is a
// rotation-invariant random k-dimensional subspace.
Eigen::MatrixXd sample_gaussian_matrix(RngStream& stream, std::int64_t n, std::int64_t k);

// R(theta) = ||G theta||_p / ||G theta||_2, scale-invariant in theta.
double distortion_functional(const Eigen::MatrixXd& G, PExponent p,
                             const Eigen::VectorXd& theta);

struct DistortionReport {
    double max_ratio = 0.0;
    double min_ratio = 0.0;
    double distortion = 0.0;  // max/min
    std::string method;       // "net" | "optimizer"
    // certified intervals, net method only
    std::optional<std::pair<double, double>> max_bracket;
    std::optional<std::pair<double, double>> min_bracket;
    double tolerance = 0.0;
    int restarts_used = 0;
    bool converged = true;
    std::size_t net_size = 0;
};

struct NetOptions {
    double delta = 0.01;
    std::uint64_t packing_seed = 1;
    int max_consecutive_rejections = 10000;
    std::size_t budget = 100000000;  // (3/delta)^k cap
};

// Certified brackets from a greedy maximal delta-separated set on S^{k-1}.
DistortionReport distortion_net(const Eigen::MatrixXd& G, PExponent p,
                                const NetOptions& opt);

struct OptimizerOptions {
    int restarts = 32;
    double tol = 1e-10;
    int max_iterations = 10000;
    std::uint64_t restart_seed = 1;
    // basis vectors and the diagonal as extra starts; costs k local solves,
    // worth skipping for rotation-invariant success sweeps at large k
    bool include_deterministic_starts = true;
};

// Multi-start projected gradient on the sphere; heuristic, no certificate.
DistortionReport distortion_opt(const Eigen::MatrixXd& G, PExponent p,
                                const OptimizerOptions& opt);

struct SolverOptions {
    std::string solver = "opt";  // "net" | "opt"
    NetOptions net;
    OptimizerOptions optimizer;
};

struct SuccessPoint {
    std::int64_t k;
    mc::EstimateWithCI success;
};

struct SuccessCurve {
    std::int64_t n = 0;
    PExponent p;
    double eps = 0.0;
    std::uint64_t sample_count = 0;
    std::uint64_t seed = 0;
    std::vector<SuccessPoint> rows;
};

mc::EstimateWithCI section_success_probability(std::int64_t n, std::int64_t k, PExponent p,
                                               double eps, std::uint64_t N,
                                               std::uint64_t seed,
                                               const SolverOptions& solver,
                                               mc::McOptions opt = {});

struct CriticalDimensionResult {
    std::int64_t k_star = 0;
    SuccessCurve curve;
};

CriticalDimensionResult empirical_critical_dimension(std::int64_t n, PExponent p, double eps,
                                                     double target_prob, std::uint64_t N,
                                                     std::uint64_t seed,
                                                     std::span<const std::int64_t> k_grid,
                                                     const SolverOptions& solver,
                                                     mc::McOptions opt = {});

struct ProcessCheckResult {
    mc::EstimateWithCI lhs;  // (E | ||Ga||_p - ||Gb||_p |^r)^{1/r}
    double rhs = 0.0;        // pi sigma_r ||a-b||_2 (E ||grad||_2^r)^{1/r}
    double rhs_std_error = 0.0;
    double margin = 0.0;  // rhs - lhs
};

ProcessCheckResult schechtman_process_check(std::int64_t n, std::int64_t k, double p,
                                            const Eigen::VectorXd& a,
                                            const Eigen::VectorXd& b, double r,
                                            std::uint64_t N, std::uint64_t seed,
                                            mc::McOptions opt = {});

}  // namespace lpconc::sections
