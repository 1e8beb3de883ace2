#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "spinflip/lemma.hpp"
#include "spinflip/replica.hpp"
#include "spinflip/report.hpp"

namespace spinflip {

inline constexpr std::size_t kDefaultHermiteOrder = 64;
inline constexpr std::size_t kDefaultLegendreOrder = 32;

// Single-site Gaussian expectations in the random field model, with
// G(t) = cos(t) J + sin(t) J', (J, J') independent standard normals:
//   T    = Av[tanh(bG(t)) tanh(bG(s))]
//   S2t  = Av[tanh^2(bG(t))]           (the same for every angle)
//   T22  = Av[tanh^2(bG(t)) tanh^2(bG(s))]
struct SiteIntegrals {
  double t = 0.0;
  double s = 0.0;
  double rho = 1.0;
  double T = 0.0;
  double S2t = 0.0;
  double S2s = 0.0;
  double T22 = 0.0;
  std::size_t quad_order = 0;
};

SiteIntegrals site_integrals(double beta, double t, double s,
                             std::size_t m = kDefaultHermiteOrder);

// Site integrals for every pair of a fixed list of angles, sharing one
// tensor Gauss-Hermite grid.
class SiteIntegralGrid {
 public:
  SiteIntegralGrid(double beta, std::vector<double> angles, std::size_t m = kDefaultHermiteOrder);

  std::size_t size() const { return angles_.size(); }
  SiteIntegrals at(std::size_t i, std::size_t j) const;

 private:
  std::vector<double> angles_;
  std::vector<double> weights_;              // m*m tensor weights
  std::vector<std::vector<double>> tanh_;    // per angle, per tensor node
  std::size_t m_;
};

// Quenched overlap moments of the N-site random field at (t, s).
struct RfMomentSet {
  std::size_t N = 0;
  double c12 = 0.0;             // <C12>            = N T
  double c12_mean_sq = 0.0;     // <C12>^2          = N T^2 + Q
  double c12_sq = 0.0;          // <C12^2>          = N + Q
  double c12c23_sts = 0.0;      // <C12C23>_{s,t,s} = N S2s + Q
  double c12c23_tst = 0.0;      // <C12C23>_{t,s,t} = N S2t + Q
  double c12c34 = 0.0;          // <C12C34>         = N T22 + Q
  double Q = 0.0;               // N (N - 1) T^2
};

RfMomentSet rf_moments(std::size_t N, const SiteIntegrals& site);
RfMomentSet rf_moments(std::size_t N, double beta, double t, double s,
                       std::size_t m = kDefaultHermiteOrder);

NodeMoments rf_node_moments(const RfMomentSet& set);

// Normalised moments q = C / N.
struct RfOverlapMoments {
  double q_sq = 0.0;        // <q12^2>
  double q_mean_sq = 0.0;   // <q12>^2
  double q12q23 = 0.0;      // <q12 q23>_{s,t,s}
  double q12q34 = 0.0;      // <q12 q34>_{t,s,s,t}
};

RfOverlapMoments rf_overlap_moments(const RfMomentSet& set);

using Gamma = std::array<double, 4>;

// gamma . (<q^2>, <q>^2, <q12q23>, <q12q34>)
double gg_combination(const RfOverlapMoments& q, const Gamma& gamma);
// (|g2| + |g3| + |g4|) / N + |g1| / N^2
double gg_bound(std::size_t N, const Gamma& gamma);

inline constexpr double kQuadratureSlack = 1e-9;

// Rejects gamma with |sum| > 1e-12.
CheckReport gg_bound_check(std::size_t N, double beta, double t, double s, const Gamma& gamma,
                           std::size_t m = kDefaultHermiteOrder);

// [<q^2> - 2<q12q23> + <q12q34>] - (1/3)(<q^2> - <q>^2)
double roma_residual(std::size_t N, double beta, double t, double s,
                     std::size_t m = kDefaultHermiteOrder);
// The residual equals B - D/3 for the gamma = (1,1,-2,0) and (1,2,0,-3)
// combinations, so this is bounded by their Theorem-3 bounds.
double roma_bound(std::size_t N);

struct Lemma1Pair {
  double lhs = 0.0;
  double rhs = 0.0;
};

// Whole-volume flip. lhs = N Var[ln cosh bG(b) - ln cosh bG(a)] by 2-D
// Gauss-Hermite; rhs = Gauss-Legendre integral with closed-form moments.
Lemma1Pair rf_lemma1_closed(std::size_t N, double beta, double a, double b,
                            std::size_t legendre_order = kDefaultLegendreOrder,
                            std::size_t hermite_order = kDefaultHermiteOrder,
                            MiddleTerm middle = MiddleTerm::tst);

double rf_lemma1_lhs(std::size_t N, double beta, double a, double b,
                     std::size_t hermite_order = kDefaultHermiteOrder);
double rf_lemma1_rhs(std::size_t N, double beta, double a, double b,
                     std::size_t legendre_order = kDefaultLegendreOrder,
                     std::size_t hermite_order = kDefaultHermiteOrder,
                     MiddleTerm middle = MiddleTerm::tst);

// Stable ln cosh.
double log_cosh(double x);

inline constexpr double kPerSampleTolerance = 1e-10;

// Enumeration versus the tanh / cosh closed forms for one disorder sample of
// a random field ensemble with the whole volume as flip region.
std::vector<CheckReport> rf_per_sample_suite(const ReplicaEnsemble& ensemble, double t, double s,
                                             double tolerance = kPerSampleTolerance);

}  // namespace spinflip
