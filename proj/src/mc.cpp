#include "lpconc/mc.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <thread>

#include "lpconc/fit.hpp"
#include "lpconc/specfun.hpp"
#include "lpconc/theory.hpp"

namespace lpconc::mc {

namespace {

// operation codes feeding derive_stream_id; keep stable, they pin output bytes
enum StreamOp : std::uint64_t {
    kOpNormMoments = 1,
    kOpTailMain = 2,
    kOpTailCenter = 3,
    kOpPairPower = 4,
    kOpAnticonc = 5,
};

RngStream chunk_stream(std::uint64_t seed, StreamOp op, std::uint64_t chunk) {
    return RngStream(seed, derive_stream_id(op, chunk));
}

}  // namespace

EstimateWithCI wilson_interval(std::uint64_t hits, std::uint64_t n, double z) {
    EstimateWithCI out;
    out.sample_count = n;
    out.ci_method = "wilson";
    if (n == 0) return out;
    const double nn = static_cast<double>(n);
    const double phat = static_cast<double>(hits) / nn;
    const double z2 = z * z;
    const double denom = 1.0 + z2 / nn;
    const double center = (phat + z2 / (2.0 * nn)) / denom;
    const double half =
        z * std::sqrt(phat * (1.0 - phat) / nn + z2 / (4.0 * nn * nn)) / denom;
    out.value = phat;
    out.std_error = std::sqrt(std::max(phat * (1.0 - phat) / nn, 0.25 / (nn * nn)));
    out.ci_low = std::max(0.0, center - half);
    out.ci_high = std::min(1.0, center + half);
    return out;
}

EstimateWithCI normal_interval(const MomentAccumulator& acc, double z) {
    EstimateWithCI out;
    out.sample_count = acc.count();
    out.ci_method = "normal";
    out.value = acc.mean();
    out.std_error = acc.mean_std_error();
    out.ci_low = out.value - z * out.std_error;
    out.ci_high = out.value + z * out.std_error;
    return out;
}

void run_chunks(std::uint64_t total, std::uint64_t chunk_size, unsigned workers,
                const std::function<void(std::uint64_t, std::uint64_t, std::uint64_t)>& fn) {
    if (chunk_size == 0) chunk_size = 4096;
    const std::uint64_t n_chunks = (total + chunk_size - 1) / chunk_size;
    if (workers <= 1 || n_chunks <= 1) {
        for (std::uint64_t c = 0; c < n_chunks; ++c) {
            const std::uint64_t first = c * chunk_size;
            fn(c, first, std::min(chunk_size, total - first));
        }
        return;
    }
    std::atomic<std::uint64_t> next{0};
    auto body = [&] {
        for (;;) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            const std::uint64_t first = c * chunk_size;
            fn(c, first, std::min(chunk_size, total - first));
        }
    };
    std::vector<std::thread> pool;
    const unsigned k = std::min<unsigned>(workers, static_cast<unsigned>(n_chunks));
    pool.reserve(k);
    for (unsigned i = 0; i < k; ++i) pool.emplace_back(body);
    for (auto& t : pool) t.join();
}

NormMomentsResult estimate_norm_moments(std::int64_t n, PExponent p, std::uint64_t N,
                                        std::uint64_t seed, std::span<const double> r_grid,
                                        McOptions opt) {
    if (n < 1) throw std::domain_error("estimate_norm_moments: requires n >= 1");
    if (N < 100) throw std::domain_error("estimate_norm_moments: requires N >= 100");
    for (double r : r_grid) {
        if (r == 0.0 || r <= -static_cast<double>(n))
            throw std::domain_error("estimate_norm_moments: r_grid must avoid 0 and (-inf,-n]");
    }
    const std::uint64_t n_chunks = (N + opt.chunk_size - 1) / opt.chunk_size;
    std::vector<MomentAccumulator> norm_accs(n_chunks), log_accs(n_chunks);
    std::vector<std::vector<double>> log_norms(n_chunks);

    run_chunks(N, opt.chunk_size, opt.workers,
               [&](std::uint64_t c, std::uint64_t, std::uint64_t count) {
                   RngStream stream = chunk_stream(seed, kOpNormMoments, c);
                   std::vector<double> x(static_cast<size_t>(n));
                   log_norms[c].reserve(count);
                   for (std::uint64_t i = 0; i < count; ++i) {
                       stream.fill_normal(x);
                       const double nrm = lp_norm(x, p);
                       norm_accs[c].add(nrm);
                       const double l = std::log(nrm);
                       log_accs[c].add(l);
                       log_norms[c].push_back(l);
                   }
               });

    NormMomentsResult out;
    MomentAccumulator log_acc;
    for (std::uint64_t c = 0; c < n_chunks; ++c) {
        out.norm_acc = MomentAccumulator::merge(out.norm_acc, norm_accs[c]);
        log_acc = MomentAccumulator::merge(log_acc, log_accs[c]);
    }
    out.mean = normal_interval(out.norm_acc, opt.ci_z);
    out.variance.value = out.norm_acc.sample_variance();
    out.variance.std_error = out.norm_acc.variance_std_error();
    out.variance.ci_low = out.variance.value - opt.ci_z * out.variance.std_error;
    out.variance.ci_high = out.variance.value + opt.ci_z * out.variance.std_error;
    out.variance.sample_count = N;

    // second pass for I_r, shifted in log space by the mean log norm
    const double shift = log_acc.mean();
    out.profile.n = n;
    out.profile.p = p;
    out.profile.sample_count = N;
    for (double r : r_grid) {
        MomentAccumulator acc;
        for (std::uint64_t c = 0; c < n_chunks; ++c)
            for (double l : log_norms[c]) acc.add(std::exp(r * (l - shift)));
        MomentProfileRow row;
        row.r = r;
        const double m = acc.mean();
        const double se = acc.mean_std_error();
        const double log_ir = shift + std::log(m) / r;
        row.moment.value = std::exp(log_ir);
        row.moment.std_error = row.moment.value * se / (std::fabs(r) * m);
        row.moment.ci_low = row.moment.value - opt.ci_z * row.moment.std_error;
        row.moment.ci_high = row.moment.value + opt.ci_z * row.moment.std_error;
        row.moment.sample_count = N;
        row.unstable = r <= -static_cast<double>(n) / 4.0;
        out.profile.rows.push_back(row);
    }
    return out;
}

TailCurve tail_curve(std::int64_t n, PExponent p, std::span<const double> eps_grid,
                     std::uint64_t N, std::uint64_t seed, const std::string& centering,
                     double theory_mean, McOptions opt) {
    if (n < 1) throw std::domain_error("tail_curve: requires n >= 1");
    TailCurve out;
    out.n = n;
    out.p = p;
    out.sample_count = N;
    out.seed = seed;
    out.centering = centering;

    if (centering == "theory_mean") {
        out.center = theory_mean;
    } else if (centering == "empirical_mean") {
        // independent substream, same sample count
        const std::uint64_t n_chunks = (N + opt.chunk_size - 1) / opt.chunk_size;
        std::vector<MomentAccumulator> accs(n_chunks);
        run_chunks(N, opt.chunk_size, opt.workers,
                   [&](std::uint64_t c, std::uint64_t, std::uint64_t count) {
                       RngStream stream = chunk_stream(seed, kOpTailCenter, c);
                       std::vector<double> x(static_cast<size_t>(n));
                       for (std::uint64_t i = 0; i < count; ++i) {
                           stream.fill_normal(x);
                           accs[c].add(lp_norm(x, p));
                       }
                   });
        MomentAccumulator acc;
        for (auto& a : accs) acc = MomentAccumulator::merge(acc, a);
        out.center = acc.mean();
    } else {
        throw std::domain_error("tail_curve: unknown centering '" + centering + "'");
    }

    const std::uint64_t n_chunks = (N + opt.chunk_size - 1) / opt.chunk_size;
    std::vector<std::vector<std::uint64_t>> hits(n_chunks,
                                                 std::vector<std::uint64_t>(eps_grid.size(), 0));
    const double center = out.center;
    run_chunks(N, opt.chunk_size, opt.workers,
               [&](std::uint64_t c, std::uint64_t, std::uint64_t count) {
                   RngStream stream = chunk_stream(seed, kOpTailMain, c);
                   std::vector<double> x(static_cast<size_t>(n));
                   for (std::uint64_t i = 0; i < count; ++i) {
                       stream.fill_normal(x);
                       const double dev = std::fabs(lp_norm(x, p) - center);
                       for (size_t e = 0; e < eps_grid.size(); ++e)
                           if (dev > eps_grid[e] * center) ++hits[c][e];
                   }
               });

    for (size_t e = 0; e < eps_grid.size(); ++e) {
        TailPoint pt;
        pt.eps = eps_grid[e];
        for (std::uint64_t c = 0; c < n_chunks; ++c) pt.hits += hits[c][e];
        pt.prob = wilson_interval(pt.hits, N, opt.ci_z);
        out.rows.push_back(pt);
    }
    return out;
}

EstimateWithCI levy_concentration(std::span<const double> sorted_samples, double t,
                                  double z) {
    if (sorted_samples.empty())
        throw std::domain_error("levy_concentration: requires non-empty samples");
    if (!(t >= 0.0)) throw std::domain_error("levy_concentration: requires t >= 0");
    const size_t N = sorted_samples.size();
    const double width = 2.0 * t;
    size_t best = 0;
    size_t j = 0;
    for (size_t i = 0; i < N; ++i) {
        if (j < i) j = i;
        while (j < N && sorted_samples[j] - sorted_samples[i] <= width) ++j;
        best = std::max(best, j - i);
    }
    return wilson_interval(best, N, z);
}

double pair_moment_quadrature_log(double p, double r) {
    if (!(p >= 2.0)) throw std::domain_error("pair_moment_quadrature: requires p >= 2");
    if (!(r >= 1.0)) throw std::domain_error("pair_moment_quadrature: requires r >= 1");
    if (p * r > 600.0)
        throw std::domain_error("pair_moment_quadrature: requires p*r <= 600");

    // integrand (cos^p t - sin^p t)^r on [0, pi/4], evaluated in log space
    auto f = [p, r](double th) -> double {
        if (th <= 0.0) return 1.0;
        if (th >= M_PI_4) return 0.0;
        const double lt = std::log(std::tan(th));
        const double inner = -std::expm1(p * lt);  // 1 - tan^p
        if (inner <= 0.0) return 0.0;
        return std::exp(r * (p * std::log(std::cos(th)) + std::log(inner)));
    };

    // Gauss-Kronrod 7-15 on [a,b]
    static const double xgk[8] = {0.991455371120813, 0.949107912342759,
                                  0.864864423359769, 0.741531185599394,
                                  0.586087235467691, 0.405845151377397,
                                  0.207784955007898, 0.0};
    static const double wgk[8] = {0.022935322010529, 0.063092092629979,
                                  0.104790010322250, 0.140653259715525,
                                  0.169004726639267, 0.190350578064785,
                                  0.204432940075298, 0.209482141084728};
    static const double wg[4] = {0.129484966168870, 0.279705391489277,
                                 0.381830050505119, 0.417959183673469};
    auto gk15 = [&f](double a, double b, double& err) -> double {
        const double h = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        const double fc = f(mid);
        double res_g = wg[3] * fc;
        double res_k = wgk[7] * fc;
        for (int i = 0; i < 7; ++i) {
            const double dx = h * xgk[i];
            const double fsum = f(mid - dx) + f(mid + dx);
            res_k += wgk[i] * fsum;
            if (i % 2 == 1) res_g += wg[i / 2] * fsum;
        }
        err = std::fabs((res_k - res_g) * h);
        return res_k * h;
    };

    struct Seg {
        double a, b;
    };
    std::vector<Seg> stack{{0.0, M_PI_4}};
    double total = 0.0, total_err = 0.0;
    const double tol = 1e-13;
    int evals = 0;
    while (!stack.empty()) {
        Seg s = stack.back();
        stack.pop_back();
        double err;
        double v = gk15(s.a, s.b, err);
        ++evals;
        const double scale = std::max(std::fabs(total) + std::fabs(v), 1e-300);
        if (err <= tol * scale || s.b - s.a < 1e-14 || evals > 20000) {
            total += v;
            total_err += err;
        } else {
            const double mid = 0.5 * (s.a + s.b);
            stack.push_back({s.a, mid});
            stack.push_back({mid, s.b});
        }
    }

    const double half_pr = 0.5 * p * r;
    return (half_pr + 2.0) * std::log(2.0) - std::log(M_PI) +
           specfun::ln_gamma(half_pr + 1.0) + std::log(total);
}

double pair_moment_quadrature(double p, double r) {
    return std::exp(pair_moment_quadrature_log(p, r));
}

EstimateWithCI pair_power_moment_mc(std::int64_t n, double p, double r, std::uint64_t N,
                                    std::uint64_t seed, McOptions opt) {
    if (n < 1) throw std::domain_error("pair_power_moment_mc: requires n >= 1");
    if (!(r >= 2.0)) throw std::domain_error("pair_power_moment_mc: requires r >= 2");
    if (N < 10000) throw std::domain_error("pair_power_moment_mc: requires N >= 1e4");
    const std::uint64_t n_chunks = (N + opt.chunk_size - 1) / opt.chunk_size;
    std::vector<MomentAccumulator> accs(n_chunks);
    run_chunks(N, opt.chunk_size, opt.workers,
               [&](std::uint64_t c, std::uint64_t, std::uint64_t count) {
                   RngStream stream = chunk_stream(seed, kOpPairPower, c);
                   std::vector<double> x(static_cast<size_t>(n)), y(static_cast<size_t>(n));
                   for (std::uint64_t i = 0; i < count; ++i) {
                       stream.fill_normal(x);
                       stream.fill_normal(y);
                       const double sx = std::exp(lp_norm_p_log(x, p));
                       const double sy = std::exp(lp_norm_p_log(y, p));
                       const double d = std::fabs(sx - sy);
                       accs[c].add(d <= 0.0 ? 0.0 : std::exp(r * std::log(d)));
                   }
               });
    MomentAccumulator acc;
    for (auto& a : accs) acc = MomentAccumulator::merge(acc, a);
    const double m = acc.mean();
    const double se = acc.mean_std_error();
    EstimateWithCI out;
    out.sample_count = N;
    out.ci_method = "normal";
    out.value = std::pow(m, 1.0 / r);
    out.std_error = out.value * se / (r * m);
    out.ci_low = out.value - opt.ci_z * out.std_error;
    out.ci_high = out.value + opt.ci_z * out.std_error;
    return out;
}

AnticoncReport anticoncentration_experiment(std::int64_t n, double p, double eps,
                                            std::uint64_t N, std::uint64_t seed,
                                            McOptions opt) {
    const double logn = std::log(static_cast<double>(n));
    if (!(p >= 12.0 * logn))
        throw std::domain_error("anticoncentration_experiment: requires p >= 12 log n");
    if (!(eps > 0.0) || !(eps <= 1.0))
        throw std::domain_error("anticoncentration_experiment: requires eps in (0,1]");

    const auto q = theory::quantile_vector(n);
    const double y1 = q.y[0];
    const double y0 = q.y0;
    const double e2 = std::exp(2.0);
    // y_{[i/e^2]} with index 0 meaning y0
    auto y_at = [&](std::int64_t idx) { return idx == 0 ? y0 : q.y[static_cast<size_t>(idx - 1)]; };
    // thresholds for the Q1 membership scan, i >= 8 (the first i with i >= e^2)
    std::vector<double> thr(static_cast<size_t>(n) + 1, 0.0);
    for (std::int64_t i = 8; i <= n; ++i)
        thr[static_cast<size_t>(i)] = y_at(static_cast<std::int64_t>(std::floor(i / e2)));

    const int i_lo = 3, i_hi = 12;
    const double add = 60.0 * eps * std::sqrt(logn);
    const double dist_gate = 2.0 * eps * std::sqrt(logn);
    const double log_pnorm_gate = std::log(3.0 * e2);
    const PExponent pe = PExponent::finite(p);

    const std::uint64_t n_chunks = (N + opt.chunk_size - 1) / opt.chunk_size;
    struct ChunkStats {
        std::uint64_t q1 = 0;
        std::uint64_t pnorm_viol = 0;
        std::uint64_t dist_viol = 0;
        std::array<std::uint64_t, 16> top{};
        std::vector<double> norms;
    };
    std::vector<ChunkStats> stats(n_chunks);

    run_chunks(N, opt.chunk_size, opt.workers,
               [&](std::uint64_t c, std::uint64_t, std::uint64_t count) {
                   RngStream stream = chunk_stream(seed, kOpAnticonc, c);
                   std::vector<double> x(static_cast<size_t>(n));
                   ChunkStats& st = stats[c];
                   st.norms.reserve(count);
                   for (std::uint64_t s = 0; s < count; ++s) {
                       stream.fill_normal(x);
                       auto z = sorted_abs_desc(x);
                       const double nrm = lp_norm(z, pe);
                       st.norms.push_back(nrm);
                       for (int i = i_lo; i <= i_hi; ++i) {
                           if (z[static_cast<size_t>(i - 1)] >=
                               y_at(static_cast<std::int64_t>(std::floor(i / e2))))
                               ++st.top[static_cast<size_t>(i - i_lo)];
                       }
                       // Q1 membership
                       if (z[0] < y1 || z[0] > y0) continue;
                       bool in_q1 = true;
                       for (std::int64_t i = 8; i <= n; ++i) {
                           if (z[static_cast<size_t>(i - 1)] > thr[static_cast<size_t>(i)]) {
                               in_q1 = false;
                               break;
                           }
                       }
                       if (!in_q1) continue;
                       ++st.q1;
                       // ||z||_p^p <= 3 e^2 (z_1^*)^p
                       if (lp_norm_p_log(z, p) > log_pnorm_gate + p * std::log(z[0]) + 1e-12)
                           ++st.pnorm_viol;
                       // ||Tz||_p - ||z||_p > 2 eps sqrt(log n); ties in T go to
                       // the smallest index, which in the sorted copy is z[0]
                       const double z0 = z[0];
                       z[0] = z0 + add;
                       const double tnrm = lp_norm(z, pe);
                       z[0] = z0;
                       if (!(tnrm - nrm > dist_gate)) ++st.dist_viol;
                   }
               });

    AnticoncReport out;
    std::vector<double> all_norms;
    all_norms.reserve(N);
    std::uint64_t q1 = 0, pv = 0, dv = 0;
    std::array<std::uint64_t, 16> top{};
    for (auto& st : stats) {
        q1 += st.q1;
        pv += st.pnorm_viol;
        dv += st.dist_viol;
        for (int i = i_lo; i <= i_hi; ++i)
            top[static_cast<size_t>(i - i_lo)] += st.top[static_cast<size_t>(i - i_lo)];
        all_norms.insert(all_norms.end(), st.norms.begin(), st.norms.end());
    }
    out.prob_q1 = wilson_interval(q1, N, opt.ci_z);
    out.q1_count = q1;
    out.pnorm_violations = pv;
    out.distance_violations = dv;
    for (int i = i_lo; i <= i_hi; ++i) {
        TopOrderTailRow row;
        row.i = i;
        row.prob = wilson_interval(top[static_cast<size_t>(i - i_lo)], N, opt.ci_z);
        out.top_order_tail.push_back(row);
    }
    std::sort(all_norms.begin(), all_norms.end());
    out.levy_q = levy_concentration(all_norms, eps * std::sqrt(logn), opt.ci_z);
    return out;
}

ReverseConcentrationResult reverse_concentration_check(std::int64_t n, double p,
                                                       std::span<const double> eps_grid,
                                                       std::uint64_t N, std::uint64_t seed,
                                                       McOptions opt) {
    const double logn = std::log(static_cast<double>(n));
    if (!(p >= logn * logn))
        throw std::domain_error("reverse_concentration_check: requires p >= (log n)^2");
    ReverseConcentrationResult out;
    out.curve = tail_curve(n, PExponent::finite(p), eps_grid, N, seed, "empirical_mean",
                           0.0, opt);
    std::vector<double> xs, ys;
    for (const auto& row : out.curve.rows) {
        if (row.hits == 0 || row.eps <= 0.0) continue;
        xs.push_back(row.eps * logn);
        ys.push_back(std::log(row.prob.value));
    }
    if (xs.size() >= 3) {
        auto fit = ols_fit(xs, ys, "log prob ~ eps log n");
        out.fitted_slope = fit.slope;
        out.r_squared = fit.r_squared;
    }
    return out;
}

}  // namespace lpconc::mc
