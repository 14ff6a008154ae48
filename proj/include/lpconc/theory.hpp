#pragma once

#include <string>
#include <vector>

#include "lpconc/lp.hpp"

namespace lpconc::theory {

// Absolute constants the asymptotic statements leave unspecified; defaults are the
// configuration baseline, experiments fit them empirically.
struct TheoryConstants {
    double c0 = 0.5;  // threshold "p <= c0 log n"
    double C = 1.0;
    double c = 1.0;
};

struct TheoryPrediction {
    double value = 0.0;
    std::string regime;
    TheoryConstants constants;
};

// Scale (or exact value for p in {1,2}) of E||Z||_p.
TheoryPrediction mean_lp_prediction(int64_t n, PExponent p);

// k_{p,n}: n for p<=2, p n^{2/p} for 2<p<=log n, log n beyond.
TheoryPrediction critical_dimension(int64_t n, PExponent p);

// Concentration exponent beta(n,p,eps).
TheoryPrediction beta_exponent(int64_t n, PExponent p, double eps,
                               TheoryConstants constants = {});

// Dvoretzky dimension k(n,p,eps) with its piecewise regimes.
TheoryPrediction dvoretzky_dimension(int64_t n, PExponent p, double eps,
                                     TheoryConstants constants = {});

// tau(n,p,t) = max{t^2 p n^{2/p}, min{t^2 n / C^p, (t n)^{2/p}}}
TheoryPrediction tau(int64_t n, double p, double t, TheoryConstants constants = {});

// psi(n,p,r) = sqrt(r) min{ 1/(sigma_p n^{1/p}),
//   sigma_{2p-2}^{p-1}/(n^{1/2} sigma_p^p) (1 + pr/(sigma_{2p-2}^2 n^{1/(p-1)}))^{(p-1)/2} }
TheoryPrediction psi(int64_t n, double p, double r);

// theta(n,p,eps) = min{p^2 eps^2 n / 2^p, (eps n)^{2/p}}, 2<p, 0<eps<1/p
TheoryPrediction theta_exponent(int64_t n, double p, double eps);

// Order-level variance prediction: (2^p/p) n^{2/p-1}, or 1/log n for large p.
TheoryPrediction variance_prediction(int64_t n, PExponent p, TheoryConstants constants = {});

// Exact limit of n^{1-2/p} Var||X||_p:
// (sigma_{2p}^{2p} - sigma_p^{2p}) / (p^2 sigma_p^{2(p-1)}).
double delta_method_variance_limit(double p);

// pi^2 / (6 a_n^2) with a_n = -Phi^{-1}(1/(2n)).
TheoryPrediction gumbel_variance_prediction(int64_t n);
double gumbel_a_n(int64_t n);

// c_{n,r} = sqrt(2) [Gamma((n+r)/2)/Gamma(n/2)]^{1/r}, r > -n, r != 0.
double gaussian_to_spherical_factor(int64_t n, double r);

struct PowerDiffBracket {
    double lower;
    double exact;
    double upper;
};
// Two-sided bracket for |a^theta - b^theta|.
PowerDiffBracket power_diff_bracket(double a, double b, double theta);

struct QuantileVector {
    int64_t n;
    std::vector<double> y;  // y[i-1] = xi_{1-(i-0.5)/n}, strictly decreasing
    double y0;              // xi_{1-1/(4n)}
};
QuantileVector quantile_vector(int64_t n);

struct ChainingLevel {
    double delta;                      // e^{-j}
    double t;                          // j^{p/2} e^{-j} / s_p
    double log_net_cardinality_bound;  // k log(3 e^j)
};
struct ChainingSchedule {
    double s_p;  // sum_{j>=1} j^{p/2} e^{-j}
    std::vector<ChainingLevel> levels;
};
ChainingSchedule dudley_fernique_schedule(double p, int j_max, int64_t k);

}  // namespace lpconc::theory
