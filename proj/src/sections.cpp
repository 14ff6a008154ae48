#include "lpconc/sections.hpp"

#include <cmath>
#include <limits>

#include "lpconc/specfun.hpp"

namespace lpconc::sections {

namespace {

enum StreamOp : std::uint64_t {
    kOpSectionMatrix = 8,
    kOpSectionSolver = 9,
    kOpProcessLhs = 10,
    kOpProcessRhs = 11,
    kOpNetPacking = 12,
};

Eigen::VectorXd sample_unit_sphere(RngStream& stream, std::int64_t k) {
    Eigen::VectorXd v(k);
    for (std::int64_t i = 0; i < k; ++i) v[i] = stream.next_normal();
    const double nrm = v.norm();
    return v / nrm;
}

double lp_of(const Eigen::VectorXd& x, PExponent p) {
    return lp_norm(std::span<const double>(x.data(), static_cast<size_t>(x.size())), p);
}

// Euclidean gradient of R(theta) = ||G theta||_p / ||G theta||_2 at a unit
// theta, using the a.e. formula d_i ||x||_p = sgn(x_i) (|x_i|/||x||_p)^{p-1}.
Eigen::VectorXd ratio_gradient(const Eigen::MatrixXd& G, double p,
                               const Eigen::VectorXd& theta, const Eigen::VectorXd& x,
                               double f, double g) {
    Eigen::VectorXd u(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double a = std::fabs(x[i]);
        if (a == 0.0 || f == 0.0) {
            u[i] = 0.0;
            continue;
        }
        const double t = a / f;  // in (0,1]
        u[i] = std::copysign(std::exp((p - 1.0) * std::log(t)), x[i]);
    }
    Eigen::VectorXd grad_f = G.transpose() * u;
    Eigen::VectorXd grad_g = G.transpose() * (x / g);
    return (grad_f * g - f * grad_g) / (g * g);
}

struct LocalOptResult {
    double value;
    Eigen::VectorXd theta;
    bool converged;
};

// Projected gradient with normalization retraction and step-halving line
// search; sign = +1 maximizes, -1 minimizes.
LocalOptResult local_opt(const Eigen::MatrixXd& G, double p, Eigen::VectorXd theta,
                         double sign, double tol, int max_iter) {
    auto eval = [&](const Eigen::VectorXd& th, Eigen::VectorXd& x, double& f,
                    double& g) -> double {
        x = G * th;
        g = x.norm();
        f = lp_of(x, PExponent::finite(p));
        return f / g;
    };
    Eigen::VectorXd x;
    double f, g;
    double val = eval(theta, x, f, g);
    double step = 0.1;
    bool converged = false;
    for (int it = 0; it < max_iter; ++it) {
        Eigen::VectorXd grad = ratio_gradient(G, p, theta, x, f, g);
        Eigen::VectorXd tang = grad - grad.dot(theta) * theta;
        const double tn = tang.norm();
        if (tn < 1e-15) {
            converged = true;
            break;
        }
        bool moved = false;
        double local = step;
        for (int h = 0; h < 60; ++h) {
            Eigen::VectorXd cand = (theta + sign * local * tang).normalized();
            Eigen::VectorXd cx;
            double cf, cg;
            const double cval = eval(cand, cx, cf, cg);
            if (sign * (cval - val) > 0.0) {
                const double rel = std::fabs(cval - val) / std::max(std::fabs(val), 1e-300);
                theta = cand;
                x = cx;
                f = cf;
                g = cg;
                val = cval;
                step = std::min(local * 2.0, 1e6);
                moved = true;
                if (rel < tol) {
                    converged = true;
                    it = max_iter;  // done
                }
                break;
            }
            local *= 0.5;
        }
        if (!moved) {
            converged = true;
            break;
        }
    }
    return LocalOptResult{val, theta, converged};
}

}  // namespace

Eigen::MatrixXd sample_gaussian_matrix(RngStream& stream, std::int64_t n, std::int64_t k) {
    if (k < 1 || k > n) throw std::domain_error("sample_gaussian_matrix: requires 1 <= k <= n");
    Eigen::MatrixXd G(n, k);
    for (std::int64_t j = 0; j < k; ++j)
        for (std::int64_t i = 0; i < n; ++i) G(i, j) = stream.next_normal();
    return G;
}

double distortion_functional(const Eigen::MatrixXd& G, PExponent p,
                             const Eigen::VectorXd& theta) {
    const double tn = theta.norm();
    if (tn == 0.0) throw std::domain_error("distortion_functional: theta must be nonzero");
    Eigen::VectorXd x = G * (theta / tn);
    const double g = x.norm();
    if (g == 0.0) throw std::domain_error("distortion_functional: G theta vanished");
    return lp_of(x, p) / g;
}

DistortionReport distortion_net(const Eigen::MatrixXd& G, PExponent p,
                                const NetOptions& opt) {
    const std::int64_t k = G.cols();
    const double delta = opt.delta;
    if (k > 4 || std::pow(3.0 / delta, static_cast<double>(k)) >
                     static_cast<double>(opt.budget))
        throw std::domain_error(
            "distortion_net: enumeration budget exceeded, use the optimizer");

    // randomized greedy packing; a maximal delta-separated set is a delta-net
    RngStream stream(opt.packing_seed, derive_stream_id(kOpNetPacking, 0));
    std::vector<Eigen::VectorXd> net;
    int rejections = 0;
    while (rejections < opt.max_consecutive_rejections) {
        Eigen::VectorXd cand = sample_unit_sphere(stream, k);
        bool separated = true;
        for (const auto& u : net) {
            if ((cand - u).norm() < delta) {
                separated = false;
                break;
            }
        }
        if (separated) {
            net.push_back(std::move(cand));
            rejections = 0;
        } else {
            ++rejections;
        }
    }

    double max_r = -std::numeric_limits<double>::infinity();
    double min_r = std::numeric_limits<double>::infinity();
    double max_fp = 0.0;
    double min_g2 = std::numeric_limits<double>::infinity();
    for (const auto& u : net) {
        Eigen::VectorXd x = G * u;
        const double g = x.norm();
        const double f = lp_of(x, p);
        max_r = std::max(max_r, f / g);
        min_r = std::min(min_r, f / g);
        max_fp = std::max(max_fp, f);
        min_g2 = std::min(min_g2, g);
    }
    const double kappa = max_fp / min_g2;  // local-variation bound, unit net points

    DistortionReport rep;
    rep.method = "net";
    rep.tolerance = delta;
    rep.net_size = net.size();
    rep.max_ratio = max_r;
    rep.min_ratio = min_r;
    rep.distortion = max_r / min_r;
    const double slack = 2.0 * delta * kappa;
    const double max_hi = slack < 1.0 ? max_r / (1.0 - slack)
                                      : std::numeric_limits<double>::infinity();
    rep.max_bracket = {max_r, max_hi};
    rep.min_bracket = {min_r - slack * max_r, min_r};
    rep.converged = slack < 1.0;
    return rep;
}

DistortionReport distortion_opt(const Eigen::MatrixXd& G, PExponent p,
                                const OptimizerOptions& opt) {
    if (opt.restarts < 1) throw std::domain_error("distortion_opt: requires restarts >= 1");
    const std::int64_t k = G.cols();
    const double pw = p.is_inf ? 1024.0 : p.p;  // smoothing for p = inf

    std::vector<Eigen::VectorXd> starts;
    if (opt.include_deterministic_starts) {
        for (std::int64_t i = 0; i < k; ++i) {
            Eigen::VectorXd e = Eigen::VectorXd::Zero(k);
            e[i] = 1.0;
            starts.push_back(e);
        }
        starts.push_back(
            Eigen::VectorXd::Constant(k, 1.0 / std::sqrt(static_cast<double>(k))));
    }
    RngStream stream(opt.restart_seed, derive_stream_id(kOpSectionSolver, 0));
    for (int r = 0; r < opt.restarts; ++r) starts.push_back(sample_unit_sphere(stream, k));
    if (p.is_inf) {
        // max side of ||G theta||_inf / ||G theta||_2 peaks near normalized rows
        std::vector<std::pair<double, Eigen::Index>> rows;
        for (Eigen::Index i = 0; i < G.rows(); ++i) rows.push_back({G.row(i).norm(), i});
        std::sort(rows.rbegin(), rows.rend());
        for (int i = 0; i < std::min<int>(3, static_cast<int>(rows.size())); ++i) {
            if (rows[static_cast<size_t>(i)].first <= 0.0) break;
            starts.push_back(G.row(rows[static_cast<size_t>(i)].second).transpose().normalized());
        }
    }

    auto exact = [&](const Eigen::VectorXd& th) { return distortion_functional(G, p, th); };

    DistortionReport rep;
    rep.method = "optimizer";
    rep.tolerance = opt.tol;
    rep.restarts_used = static_cast<int>(starts.size());
    double best_max = -std::numeric_limits<double>::infinity();
    double best_min = std::numeric_limits<double>::infinity();
    bool all_converged = true;
    for (const auto& s : starts) {
        auto up = local_opt(G, pw, s, +1.0, opt.tol, opt.max_iterations);
        auto dn = local_opt(G, pw, s, -1.0, opt.tol, opt.max_iterations);
        all_converged = all_converged && up.converged && dn.converged;
        best_max = std::max(best_max, exact(up.theta));
        best_min = std::min(best_min, exact(dn.theta));
        // the start itself, for the p = inf row shortcut
        best_max = std::max(best_max, exact(s));
        best_min = std::min(best_min, exact(s));
    }
    rep.max_ratio = best_max;
    rep.min_ratio = best_min;
    rep.distortion = best_max / best_min;
    rep.converged = all_converged;
    return rep;
}

mc::EstimateWithCI section_success_probability(std::int64_t n, std::int64_t k, PExponent p,
                                               double eps, std::uint64_t N,
                                               std::uint64_t seed,
                                               const SolverOptions& solver,
                                               mc::McOptions opt) {
    if (!(eps > 0.0)) throw std::domain_error("section_success_probability: requires eps > 0");
    const std::uint64_t n_chunks = (N + opt.chunk_size - 1) / opt.chunk_size;
    std::vector<std::uint64_t> hits(n_chunks, 0);
    mc::run_chunks(N, opt.chunk_size, opt.workers,
                   [&](std::uint64_t c, std::uint64_t first, std::uint64_t count) {
                       for (std::uint64_t i = 0; i < count; ++i) {
                           const std::uint64_t inst = first + i;
                           RngStream gs(seed, derive_stream_id(kOpSectionMatrix, inst));
                           Eigen::MatrixXd G = sample_gaussian_matrix(gs, n, k);
                           DistortionReport rep;
                           if (solver.solver == "net") {
                               NetOptions nopt = solver.net;
                               nopt.packing_seed = seed ^ (inst + 1);
                               rep = distortion_net(G, p, nopt);
                           } else {
                               OptimizerOptions oopt = solver.optimizer;
                               oopt.restart_seed = seed ^ (inst + 1);
                               rep = distortion_opt(G, p, oopt);
                           }
                           if (rep.distortion < 1.0 + eps) ++hits[c];
                       }
                   });
    std::uint64_t total = 0;
    for (auto h : hits) total += h;
    return mc::wilson_interval(total, N, opt.ci_z);
}

CriticalDimensionResult empirical_critical_dimension(std::int64_t n, PExponent p, double eps,
                                                     double target_prob, std::uint64_t N,
                                                     std::uint64_t seed,
                                                     std::span<const std::int64_t> k_grid,
                                                     const SolverOptions& solver,
                                                     mc::McOptions opt) {
    if (!(target_prob > 0.0) || !(target_prob < 1.0))
        throw std::domain_error("empirical_critical_dimension: target_prob in (0,1)");
    for (size_t i = 1; i < k_grid.size(); ++i)
        if (k_grid[i] <= k_grid[i - 1])
            throw std::domain_error("empirical_critical_dimension: k_grid must increase");
    CriticalDimensionResult out;
    out.curve.n = n;
    out.curve.p = p;
    out.curve.eps = eps;
    out.curve.sample_count = N;
    out.curve.seed = seed;
    for (std::int64_t k : k_grid) {
        SuccessPoint pt;
        pt.k = k;
        pt.success = section_success_probability(n, k, p, eps, N, seed, solver, opt);
        if (pt.success.ci_low >= target_prob) out.k_star = k;
        out.curve.rows.push_back(pt);
    }
    return out;
}

ProcessCheckResult schechtman_process_check(std::int64_t n, std::int64_t k, double p,
                                            const Eigen::VectorXd& a,
                                            const Eigen::VectorXd& b, double r,
                                            std::uint64_t N, std::uint64_t seed,
                                            mc::McOptions opt) {
    if (a.size() != k || b.size() != k)
        throw std::domain_error("schechtman_process_check: a,b must have length k");
    if (std::fabs(a.norm() - 1.0) > 1e-9 || std::fabs(b.norm() - 1.0) > 1e-9)
        throw std::domain_error("schechtman_process_check: a,b must be unit vectors");
    if (!(r >= 1.0)) throw std::domain_error("schechtman_process_check: requires r >= 1");
    if (!(p > 1.0)) throw std::domain_error("schechtman_process_check: requires p > 1");
    const PExponent pe = PExponent::finite(p);

    const std::uint64_t n_chunks = (N + opt.chunk_size - 1) / opt.chunk_size;
    std::vector<MomentAccumulator> lhs_accs(n_chunks), rhs_accs(n_chunks);
    mc::run_chunks(
        N, opt.chunk_size, opt.workers,
        [&](std::uint64_t c, std::uint64_t, std::uint64_t count) {
            RngStream ls(seed, derive_stream_id(kOpProcessLhs, c));
            RngStream rs(seed, derive_stream_id(kOpProcessRhs, c));
            std::vector<double> ga(static_cast<size_t>(n)), gb(static_cast<size_t>(n));
            std::vector<double> row(static_cast<size_t>(k));
            std::vector<double> w(static_cast<size_t>(n));
            for (std::uint64_t s = 0; s < count; ++s) {
                for (std::int64_t i = 0; i < n; ++i) {
                    double da = 0.0, db = 0.0;
                    for (std::int64_t j = 0; j < k; ++j) {
                        const double g = ls.next_normal();
                        da += g * a[j];
                        db += g * b[j];
                    }
                    ga[static_cast<size_t>(i)] = da;
                    gb[static_cast<size_t>(i)] = db;
                }
                const double d = std::fabs(lp_norm(ga, pe) - lp_norm(gb, pe));
                lhs_accs[c].add(d <= 0.0 ? 0.0 : std::exp(r * std::log(d)));

                // gradient-norm moment on an independent stream:
                // ||grad ||W||_p||_2^2 = ||W||_{2p-2}^{2p-2} / ||W||_p^{2p-2}
                for (auto& v : w) v = rs.next_normal();
                const double l2p2 = lp_norm(w, PExponent::finite(2.0 * p - 2.0));
                const double lp_ = lp_norm(w, pe);
                const double log_grad2 = (2.0 * p - 2.0) * (std::log(l2p2) - std::log(lp_));
                rhs_accs[c].add(std::exp(0.5 * r * log_grad2));
            }
        });

    MomentAccumulator lhs_acc, rhs_acc;
    for (std::uint64_t c = 0; c < n_chunks; ++c) {
        lhs_acc = MomentAccumulator::merge(lhs_acc, lhs_accs[c]);
        rhs_acc = MomentAccumulator::merge(rhs_acc, rhs_accs[c]);
    }
    ProcessCheckResult out;
    const double lm = lhs_acc.mean();
    const double lse = lhs_acc.mean_std_error();
    out.lhs.sample_count = N;
    out.lhs.ci_method = "normal";
    out.lhs.value = lm <= 0.0 ? 0.0 : std::pow(lm, 1.0 / r);
    out.lhs.std_error = lm <= 0.0 ? 0.0 : out.lhs.value * lse / (r * lm);
    out.lhs.ci_low = out.lhs.value - opt.ci_z * out.lhs.std_error;
    out.lhs.ci_high = out.lhs.value + opt.ci_z * out.lhs.std_error;

    const double sigma_r = specfun::gaussian_abs_moment_root(r);
    const double rm = rhs_acc.mean();
    const double grad_moment = std::pow(rm, 1.0 / r);
    out.rhs = M_PI * sigma_r * (a - b).norm() * grad_moment;
    out.rhs_std_error =
        out.rhs * rhs_acc.mean_std_error() / (r * rm);
    out.margin = out.rhs - out.lhs.value;
    return out;
}

}  // namespace lpconc::sections
