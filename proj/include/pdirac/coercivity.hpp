#pragma once

#include <random>
#include <string>
#include <vector>

#include "pdirac/functionals.hpp"
#include "pdirac/wiener.hpp"

namespace pdirac {

/// Constants of the coercivity argument built from empirical c1, c2 and the
/// potential profiles of V^(+) and V^(-):
///   c7' = max c7(V^(pm)),  c8' = c1^2 / (6 (c1 + 4 c7'^2)),
///   delta = min(c1 / 32, 3 c8' / 2),  J = smallest integer with c2^2 <= J delta^2,
///   a_1 < a_2 < ... < a_{J+1} with a_j tail_P(a_{j+1} - a_j) <= delta / (4 sqrt(6 pi))
///   for P in {G^2 + F^2, (G + iF) H, (G - iF) H, H^2},
///   tau* = 4 a_J^2 / pi,  theta = c1 / (3 * 64 * pi a_1^2 tau*).
/// J is capped at `J_cap`; `J_required` keeps the uncapped value.
struct CoercivityRecipe {
  double c1 = 0.0, c2 = 0.0;
  double c7_prime = 0.0, c8_prime = 0.0;
  double delta = 0.0;
  long long J_required = 0;
  int J = 0;
  bool J_capped = false;
  std::vector<double> a;  // a_1 .. a_{J+1}
  double a_J = 0.0;
  double tau_star = 0.0;
  double theta = 0.0;
  /// Smallest t on the profile grid with max h_{V^(pm)}(t)^2 <= c8' / 6; 0 if none.
  double a0_prime = 0.0;
};

CoercivityRecipe coercivity_recipe(const CoefficientSet& coeffs, const PeriodicScalarField& V_plus,
                                   const PeriodicScalarField& V_minus, double c1, double c2,
                                   double a1, int J_cap = 64);

/// sqrt(sum_{2 pi |N| > d} |P_N|^2), Euclidean |N|.
double spectral_tail(const PeriodicScalarField& P, double d);

struct CoercivityOptions {
  /// <= 0: estimated at (k, mu) on the trial window.
  double c1 = 0.0;
  /// <= 0: c8' from the recipe.
  double c8 = 0.0;
  double a0 = 4.0 * kPi;
  /// Admissibility test of mu / pi; theta <= 0 takes the recipe value with
  /// the tracked frequencies limited to pi |N| < a_track (<= 0: a).
  bool check_admissibility = true;
  double theta = 0.0;
  double a_track = 0.0;
  /// Radius of the truncated exponential factors e^{pm 2 i mu Psi} V^(pm); 0 selects 2M.
  int potential_radius = 0;
};

struct CoercivityReport {
  double mu = 0.0;
  double a = 0.0;
  double c1 = 0.0;
  double c8 = 0.0;
  double c7_prime = 0.0;
  std::vector<double> lhs, rhs, margins;
  double min_margin = 0.0;
  bool admissibility_checked = false;
  ScalingAdmissibility admissibility;
  std::vector<std::string> warnings;
  bool passed() const { return min_margin >= 0.0; }
};

/// For each spinor trial phi = (phi_+, phi_-) on the window, compares
///   ||(D(k) + i mu H sigma1 + e^{2 i mu sigma3 Psi}(Vt0 I + Vt3 sigma3)) phi||^2
/// with (c1/6) sum ||P^{T^pm(a)} phi_pm||_*^2 + c8 sum ||P^{complement} phi_pm||_{*,pm}^2.
/// Requires k1 = pi, mu / pi a positive integer, a >= 2 pi (InadmissibleParameters).
CoercivityReport verify_coercivity(const CoefficientSet& coeffs, const PeriodicScalarField& Vt0,
                                   const PeriodicScalarField& Vt3, const PeriodicScalarField& Psi,
                                   double mu, double a, const Eigen::Vector2d& k,
                                   const FourierGrid& window,
                                   const std::vector<Eigen::VectorXcd>& trials,
                                   const CoercivityOptions& opts = {});

/// Gaussian spinor vectors on the window with coefficients damped by 1 / (1 + |N|).
std::vector<Eigen::VectorXcd> random_spinor_trials(const FourierGrid& window, int count,
                                                   std::mt19937_64& rng);

}  // namespace pdirac
