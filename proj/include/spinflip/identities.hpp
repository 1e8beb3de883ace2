#pragma once

#include <cstddef>
#include <vector>

#include "spinflip/lemma.hpp"
#include "spinflip/quench.hpp"
#include "spinflip/randomfield.hpp"
#include "spinflip/report.hpp"

namespace spinflip {

// ---------------------------------------------------------------- Lemma 1
//
// X(a, b) = P(b) - P(a), P(t) the pressure of the circle-interpolated
// Hamiltonian with the flip region's couplings rotated.

// Per-sample Gauss-Legendre sum of the Lemma-1 integrand over [a, b]^2.
double lemma1_rhs_sample(const ReplicaEnsemble& ensemble, const QuadratureRule& rule,
                         MiddleTerm middle = MiddleTerm::tst);

// Quenched lemma1 rhs with MC moments.
Estimate lemma1_rhs_mc(const ModelSpec& model, const FlipRegion& flip, double a, double b,
                       std::size_t quad_order, const McPlan& plan,
                       MiddleTerm middle = MiddleTerm::tst);

struct Lemma1Lhs {
  Estimate second_moment;  // Av[X^2]
  Estimate mean;           // Av[X]
};

Lemma1Lhs lemma1_lhs(const ModelSpec& model, const FlipRegion& flip, double a, double b,
                     const McPlan& plan);

// Both sides on one sample stream; z is computed from the paired difference.
struct TwoPath {
  Estimate lhs;
  Estimate rhs;
  Estimate difference;
  double z_score = 0.0;
  bool pass = false;
};

TwoPath lemma1_two_path(const ModelSpec& model, const FlipRegion& flip, double a, double b,
                        std::size_t quad_order, const McPlan& plan,
                        MiddleTerm middle = MiddleTerm::tst);

// Judges a paired difference against zero at the plan's z threshold.
TwoPath paired(const Accumulator& lhs, const Accumulator& rhs, const Accumulator& diff, double z);

// -------------------------------------------------------------- Theorem 1
//
// bracket = [<C12^2> - 2<C12C23> + <C12C34>] / |L'|^2 with C over the flip
// region's interactions.

double theorem1_bracket(const NodeMoments& m, std::size_t volume,
                        MiddleTerm middle = MiddleTerm::symmetric);

// One disorder sample, moments from covariance_moment.
double theorem1_bracket_sample(const ReplicaEnsemble& ensemble, double t, double s,
                               MiddleTerm middle = MiddleTerm::symmetric);
// sum_{X,Y} D_X D_Y [truncated_t][truncated_s] / |L'|^2 for one sample.
double theorem1_truncated_sample(const ReplicaEnsemble& ensemble, double t, double s);

Estimate theorem1_bracket_mc(const ModelSpec& model, const FlipRegion& flip, double t, double s,
                             const McPlan& plan, MiddleTerm middle = MiddleTerm::symmetric);
// Random field, whole-volume flip.
double theorem1_bracket_closed(std::size_t N, double beta, double t, double s,
                               std::size_t hermite_order = kDefaultHermiteOrder,
                               MiddleTerm middle = MiddleTerm::symmetric);

inline double theorem1_weight(double t, double s) {
  const double x = std::sin(s - t);
  return x * x;
}

struct Theorem1Integral {
  double value = 0.0;       // int int sin^2(s - t) bracket over [0, pi]^2
  double per_volume = 0.0;  // value / |L'|
};

Theorem1Integral theorem1_integral_closed(std::size_t N, double beta,
                                          std::size_t quad_order = kDefaultLegendreOrder,
                                          std::size_t hermite_order = kDefaultHermiteOrder,
                                          MiddleTerm middle = MiddleTerm::symmetric);

// int int cos(t - s) <C12> over [0, pi]^2 from closed forms.
double rf_cosine_term(std::size_t N, double beta, std::size_t quad_order = kDefaultLegendreOrder,
                      std::size_t hermite_order = kDefaultHermiteOrder);

Estimate theorem1_integral_mc(const ModelSpec& model, const FlipRegion& flip,
                              std::size_t quad_order, const McPlan& plan,
                              MiddleTerm middle = MiddleTerm::symmetric);

// ---------------------------------------------------------- Concentration
//
// X = P(J) - P(J reversed on the region) against
//   P(|X| >= x) <= 2 exp(-x^2 / (8 pi beta^2 cbar |L'|)),   Var X <= 16 pi cbar beta^2 |L'|.

double concentration_tail_bound(const ModelSpec& model, const FlipRegion& flip, double x);
double concentration_variance_bound(const ModelSpec& model, const FlipRegion& flip);

struct ConcentrationResult {
  std::vector<double> x;
  std::vector<double> tail;        // empirical P(|X| >= x)
  std::vector<double> bound;
  std::vector<double> slack;       // 3 binomial standard errors
  Estimate mean;
  double variance = 0.0;
  double variance_bound = 0.0;
  std::vector<CheckReport> reports;  // one per x, then the variance
  bool pass = false;
};

ConcentrationResult concentration_check(const ModelSpec& model, const FlipRegion& flip,
                                        const McPlan& plan, const std::vector<double>& x_grid);

// -------------------------------------------- internal energy, mixed states
//
// Whole-volume flip. Replica "+" has weight exp(-beta H), "-" exp(+beta H);
// base_sign = -1 exchanges the two.

struct MixedMoments {
  double c_pp = 0.0, c_pm = 0.0;
  double c2_pp = 0.0, c2_pm = 0.0;
  double c23_ppp = 0.0, c23_pmp = 0.0, c23_ppm = 0.0;
  double c34_pppp = 0.0, c34_pppm = 0.0, c34_ppmm = 0.0, c34_pmpm = 0.0;
  double u_plus = 0.0;   // omega_+(H)
  double u_minus = 0.0;  // omega_-(H)
};

MixedMoments mixed_moments(const ReplicaEnsemble& ensemble, int base_sign = +1);

// Right-hand sides of the three identities for one sample.
double energy_rhs(const MixedMoments& m, double beta, double n_var);
double energy_square_rhs(const MixedMoments& m, double beta, double n_var);
double xprime_square_rhs(const MixedMoments& m, double beta);

// (i) Av omega(H), (ii) Av omega(H)^2, (iii) Av X'^2, each by paired CRN MC.
std::vector<CheckReport> internal_energy_checks(const ModelSpec& model, const McPlan& plan);

// Av X'^2 and its mixed-moment right-hand side under a chosen base sign.
TwoPath xprime_two_path(const ModelSpec& model, const McPlan& plan, int base_sign = +1);

// Theorem-2 combination of normalised mixed moments.
double theorem2_sample(const MixedMoments& m, std::size_t volume);

struct Theorem2Result {
  Estimate combination;
  // (X'^2 - 2(<C12>_{++} + <C12>_{+-})) / (2 beta^2 |L|^2)
  Estimate rearranged;
  TwoPath paired;
};

Theorem2Result theorem2_combination(const ModelSpec& model, const McPlan& plan);

}  // namespace spinflip
