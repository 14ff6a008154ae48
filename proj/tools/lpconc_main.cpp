// Experiment driver: runs the sampling pipelines and writes CSV tables with
// a JSON sidecar. Output bytes depend only on the configuration and seed,
// never on the worker count.
#include <chrono>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "lpconc/csv.hpp"
#include "lpconc/fit.hpp"
#include "lpconc/lp.hpp"
#include "lpconc/mc.hpp"
#include "lpconc/sections.hpp"
#include "lpconc/theory.hpp"

namespace {

constexpr const char* kVersion = "lpconc 1.0.0";

using nlohmann::json;
using namespace lpconc;

struct Config {
    std::string experiment;
    std::vector<std::int64_t> n_list;
    std::string p_str = "2";
    std::vector<std::int64_t> k_list;
    std::vector<double> eps_list;
    std::vector<double> r_list;
    std::uint64_t samples = 100000;
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::string out = "out.csv";
    double c0 = 0.5;
    double bigC = 1.0;
    double ci_z = 1.96;
    std::string solver = "opt";
    double delta = 0.01;
    int restarts = 32;
    double tol = 1e-10;
    double target = 0.9;
    std::string centering = "empirical_mean";
    bool strict = false;
};

std::string fmt(double v) { return format_double(v); }
std::string fmt(std::uint64_t v) { return std::to_string(v); }
std::string fmt(std::int64_t v) { return std::to_string(v); }

std::int64_t single_n(const Config& cfg) {
    if (cfg.n_list.size() != 1)
        throw std::domain_error("this experiment takes exactly one --n value");
    return cfg.n_list[0];
}

json estimate_json(const mc::EstimateWithCI& e) {
    return json{{"value", e.value},   {"std_error", e.std_error},
                {"ci_low", e.ci_low}, {"ci_high", e.ci_high},
                {"samples", e.sample_count}, {"ci_method", e.ci_method}};
}

// Returns true when a numerical-instability flag was raised anywhere.
bool run_experiment(const Config& cfg, CsvTable& table, json& extra) {
    const PExponent p = PExponent::parse(cfg.p_str);
    mc::McOptions opt;
    opt.workers = cfg.workers;
    opt.ci_z = cfg.ci_z;
    bool unstable = false;

    if (cfg.experiment == "theory-table") {
        theory::TheoryConstants tc{cfg.c0, cfg.bigC, 1.0};
        const double eps = cfg.eps_list.empty() ? 0.1 : cfg.eps_list[0];
        table.columns = {"n",       "p",           "mean",        "critical_dim",
                         "beta",    "beta_regime", "dvoretzky_k", "dvoretzky_regime",
                         "variance", "variance_regime"};
        for (std::int64_t n : cfg.n_list) {
            auto mean = theory::mean_lp_prediction(n, p);
            auto crit = theory::critical_dimension(n, p);
            auto beta = theory::beta_exponent(n, p, eps, tc);
            auto dvo = theory::dvoretzky_dimension(n, p, eps, tc);
            auto var = theory::variance_prediction(n, p, tc);
            table.rows.push_back({fmt(n), p.to_string(), fmt(mean.value), fmt(crit.value),
                                  fmt(beta.value), beta.regime, fmt(dvo.value), dvo.regime,
                                  fmt(var.value), var.regime});
        }
    } else if (cfg.experiment == "variance") {
        table.columns = {"n",       "p",           "mean",     "mean_ci_low",
                         "mean_ci_high", "variance", "variance_ci_low", "variance_ci_high",
                         "samples"};
        std::vector<double> log_n, log_var;
        for (std::int64_t n : cfg.n_list) {
            auto res = mc::estimate_norm_moments(n, p, cfg.samples, cfg.seed, {}, opt);
            table.rows.push_back({fmt(n), p.to_string(), fmt(res.mean.value),
                                  fmt(res.mean.ci_low), fmt(res.mean.ci_high),
                                  fmt(res.variance.value), fmt(res.variance.ci_low),
                                  fmt(res.variance.ci_high), fmt(cfg.samples)});
            log_n.push_back(std::log(static_cast<double>(n)));
            log_var.push_back(std::log(res.variance.value));
        }
        if (log_n.size() >= 3) {
            auto fit = ols_fit(log_n, log_var, "log Var ~ log n");
            extra["fit"] = {{"model", fit.model},
                            {"slope", fit.slope},
                            {"intercept", fit.intercept},
                            {"r_squared", fit.r_squared}};
        }
    } else if (cfg.experiment == "tails") {
        if (cfg.eps_list.empty()) throw std::domain_error("tails requires --eps");
        auto curve = mc::tail_curve(single_n(cfg), p, cfg.eps_list, cfg.samples, cfg.seed,
                                    cfg.centering, 0.0, opt);
        table.columns = {"eps", "prob", "ci_low", "ci_high", "hits", "samples"};
        for (const auto& row : curve.rows)
            table.rows.push_back({fmt(row.eps), fmt(row.prob.value), fmt(row.prob.ci_low),
                                  fmt(row.prob.ci_high), fmt(row.hits), fmt(cfg.samples)});
        extra["center"] = curve.center;
        extra["centering"] = curve.centering;
    } else if (cfg.experiment == "moments") {
        if (cfg.r_list.empty()) throw std::domain_error("moments requires --r");
        auto res =
            mc::estimate_norm_moments(single_n(cfg), p, cfg.samples, cfg.seed, cfg.r_list, opt);
        table.columns = {"r", "moment", "ci_low", "ci_high", "unstable", "samples"};
        for (const auto& row : res.profile.rows) {
            table.rows.push_back({fmt(row.r), fmt(row.moment.value), fmt(row.moment.ci_low),
                                  fmt(row.moment.ci_high), row.unstable ? "1" : "0",
                                  fmt(cfg.samples)});
            unstable = unstable || row.unstable;
        }
        extra["mean"] = estimate_json(res.mean);
        extra["variance"] = estimate_json(res.variance);
    } else if (cfg.experiment == "pairmoments") {
        if (p.is_inf) throw std::domain_error("pairmoments requires finite p");
        if (cfg.r_list.empty()) throw std::domain_error("pairmoments requires --r");
        const std::int64_t n = single_n(cfg);
        table.columns = {"p", "r", "n", "mc", "ci_low", "ci_high", "samples"};
        for (double r : cfg.r_list) {
            auto est = mc::pair_power_moment_mc(n, p.p, r, cfg.samples, cfg.seed, opt);
            table.rows.push_back({fmt(p.p), fmt(r), fmt(n), fmt(est.value), fmt(est.ci_low),
                                  fmt(est.ci_high), fmt(cfg.samples)});
            if (n == 1)
                extra["quadrature"][fmt(r)] =
                    std::exp(mc::pair_moment_quadrature_log(p.p, r) / r);
        }
    } else if (cfg.experiment == "anticonc") {
        if (p.is_inf) throw std::domain_error("anticonc requires finite p");
        const double eps = cfg.eps_list.empty() ? 0.1 : cfg.eps_list[0];
        auto rep =
            mc::anticoncentration_experiment(single_n(cfg), p.p, eps, cfg.samples, cfg.seed, opt);
        table.columns = {"stat", "value", "ci_low", "ci_high"};
        table.rows.push_back({"prob_q1", fmt(rep.prob_q1.value), fmt(rep.prob_q1.ci_low),
                              fmt(rep.prob_q1.ci_high)});
        for (const auto& row : rep.top_order_tail)
            table.rows.push_back({"top_order_" + std::to_string(row.i), fmt(row.prob.value),
                                  fmt(row.prob.ci_low), fmt(row.prob.ci_high)});
        table.rows.push_back({"pnorm_violations", fmt(rep.pnorm_violations), "0", "0"});
        table.rows.push_back({"distance_violations", fmt(rep.distance_violations), "0", "0"});
        table.rows.push_back(
            {"levy_q", fmt(rep.levy_q.value), fmt(rep.levy_q.ci_low), fmt(rep.levy_q.ci_high)});
        extra["q1_count"] = rep.q1_count;
    } else if (cfg.experiment == "section" || cfg.experiment == "critdim") {
        if (cfg.k_list.empty()) throw std::domain_error("requires --k");
        const double eps = cfg.eps_list.empty() ? 0.2 : cfg.eps_list[0];
        sections::SolverOptions solver;
        solver.solver = cfg.solver;
        solver.net.delta = cfg.delta;
        solver.optimizer.restarts = cfg.restarts;
        solver.optimizer.tol = cfg.tol;
        const std::int64_t n = single_n(cfg);
        table.columns = {"k", "success", "ci_low", "ci_high", "samples", "solver", "tol"};
        const double tol_col = cfg.solver == "net" ? cfg.delta : cfg.tol;
        if (cfg.experiment == "section") {
            for (std::int64_t k : cfg.k_list) {
                auto est = sections::section_success_probability(n, k, p, eps, cfg.samples,
                                                                cfg.seed, solver, opt);
                table.rows.push_back({fmt(k), fmt(est.value), fmt(est.ci_low),
                                      fmt(est.ci_high), fmt(cfg.samples), cfg.solver,
                                      fmt(tol_col)});
            }
        } else {
            auto res = sections::empirical_critical_dimension(
                n, p, eps, cfg.target, cfg.samples, cfg.seed, cfg.k_list, solver, opt);
            for (const auto& pt : res.curve.rows)
                table.rows.push_back({fmt(pt.k), fmt(pt.success.value), fmt(pt.success.ci_low),
                                      fmt(pt.success.ci_high), fmt(cfg.samples), cfg.solver,
                                      fmt(tol_col)});
            extra["k_star"] = res.k_star;
            extra["target_prob"] = cfg.target;
        }
    } else if (cfg.experiment == "process") {
        if (p.is_inf) throw std::domain_error("process requires finite p");
        if (cfg.k_list.size() != 1) throw std::domain_error("process takes exactly one --k");
        const std::int64_t k = cfg.k_list[0];
        if (k < 2) throw std::domain_error("process requires k >= 2");
        const double r = cfg.r_list.empty() ? 2.0 : cfg.r_list[0];
        Eigen::VectorXd a = Eigen::VectorXd::Zero(k), b = Eigen::VectorXd::Zero(k);
        a[0] = 1.0;
        b[1] = 1.0;
        auto res = sections::schechtman_process_check(single_n(cfg), k, p.p, a, b, r,
                                                      cfg.samples, cfg.seed, opt);
        table.columns = {"lhs", "lhs_se", "rhs", "rhs_se", "margin", "samples"};
        table.rows.push_back({fmt(res.lhs.value), fmt(res.lhs.std_error), fmt(res.rhs),
                              fmt(res.rhs_std_error), fmt(res.margin), fmt(cfg.samples)});
        unstable = unstable || res.margin < 0.0;
    } else {
        throw std::domain_error("unknown experiment: " + cfg.experiment);
    }
    return unstable;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lp-norm concentration laboratory"};
    app.set_version_flag("--version", kVersion);
    Config cfg;
    app.add_option("experiment", cfg.experiment,
                   "one of: variance tails moments pairmoments anticonc section critdim "
                   "process theory-table")
        ->required();
    app.add_option("--n", cfg.n_list, "ambient dimension(s)")->required();
    app.add_option("--p", cfg.p_str, "norm exponent, a real >= 1 or 'inf'");
    app.add_option("--k", cfg.k_list, "subspace dimension(s)");
    app.add_option("--eps", cfg.eps_list, "deviation level(s)");
    app.add_option("--r", cfg.r_list, "moment order(s)");
    app.add_option("--samples", cfg.samples, "Monte Carlo sample count");
    app.add_option("--seed", cfg.seed, "root seed");
    app.add_option("--workers", cfg.workers, "worker thread count");
    app.add_option("--out", cfg.out, "output CSV path");
    app.add_option("--c0", cfg.c0, "regime threshold constant");
    app.add_option("--bigC", cfg.bigC, "absolute constant C");
    app.add_option("--ci-z", cfg.ci_z, "confidence interval z value");
    app.add_option("--solver", cfg.solver, "section solver")
        ->check(CLI::IsMember({"net", "opt"}));
    app.add_option("--delta", cfg.delta, "net separation");
    app.add_option("--restarts", cfg.restarts, "optimizer restarts");
    app.add_option("--tol", cfg.tol, "optimizer tolerance");
    app.add_option("--target", cfg.target, "critdim success target");
    app.add_option("--centering", cfg.centering, "tail centering")
        ->check(CLI::IsMember({"empirical_mean", "theory_mean"}));
    app.add_flag("--strict", cfg.strict, "exit 3 on numerical-instability flags");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    const auto t0 = std::chrono::steady_clock::now();
    CsvTable table;
    json extra;
    bool unstable = false;
    try {
        table.comments = {"experiment=" + cfg.experiment, "seed=" + std::to_string(cfg.seed),
                          "p=" + cfg.p_str};
        unstable = run_experiment(cfg, table, extra);
        write_csv(cfg.out, table);

        json sidecar;
        sidecar["version"] = kVersion;
        sidecar["config"] = {{"experiment", cfg.experiment},
                             {"n", cfg.n_list},
                             {"p", cfg.p_str},
                             {"k", cfg.k_list},
                             {"eps", cfg.eps_list},
                             {"r", cfg.r_list},
                             {"samples", cfg.samples},
                             {"seed", cfg.seed},
                             {"workers", cfg.workers},
                             {"c0", cfg.c0},
                             {"bigC", cfg.bigC},
                             {"ci_z", cfg.ci_z},
                             {"solver", cfg.solver},
                             {"delta", cfg.delta},
                             {"restarts", cfg.restarts},
                             {"tol", cfg.tol},
                             {"strict", cfg.strict}};
        const auto t1 = std::chrono::steady_clock::now();
        sidecar["wall_time_seconds"] =
            std::chrono::duration<double>(t1 - t0).count();
        sidecar["unstable"] = unstable;
        if (!extra.is_null()) sidecar["results"] = extra;
        write_json_sidecar(cfg.out + ".json", sidecar);
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    if (cfg.strict && unstable) {
        std::cerr << "numerical-instability flag raised\n";
        return 3;
    }
    return 0;
}
