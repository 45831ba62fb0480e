#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "pdirac/assembly.hpp"

namespace pdirac {

/// Empirical constants of the two-sided estimate
///   c1 ||phi||_{*,pm}^2 <= ||(d_pm(k) + i mu H) phi||^2 <= c2 ||phi||_{*,pm}^2
/// over the window: extreme eigenvalues of B^* B with B = A W^{-1}, where A is
/// the fiber applied to window modes with untruncated images (rows on the
/// doubled window) and W = diag(G^pm_N).
///
/// A finite window cannot hold the high-frequency wave packets that probe the
/// principal symbol, so the window values converge slowly from inside. They
/// are combined with the pointwise extremes of the symbol form
///   |(G + iF) xi1 + iH xi2|^2 / |xi|^2 = eigenvalues of [[G^2 + F^2, FH], [FH, H^2]]
/// over a fine sample grid: c1 = min(window, symbol), c2 = max(window, symbol).
struct EstimateConstants {
  double c1 = 0.0;
  double c2 = 0.0;
  double c1_plus = 0.0, c2_plus = 0.0;
  double c1_minus = 0.0, c2_minus = 0.0;
  double c1_symbol = 0.0, c2_symbol = 0.0;
};

/// Extreme eigenvalues of the symbol form over an s x s sample grid (0: max(64, 8 (2M + 1))).
std::pair<double, double> symbol_extremes(const CoefficientSet& coeffs, int resolution = 0);

/// Throws SingularWeight if some G^pm_N vanishes in the window.
EstimateConstants estimate_c1_c2(const CoefficientSet& coeffs, const Eigen::Vector2d& k, double mu,
                                 const FourierGrid& grid);

/// Largest eigenvalue of T_W^* T_W - eps^2 Lambda_k on the window (clamped at
/// zero), square-rooted: the smallest C with
///   ||W phi||^2 <= eps^2 ||(k - i grad) phi||^2 + C^2 ||phi||^2
/// for phi in the window. ||W phi|| is exact (rows on the enlarged window).
double relative_bound_constant(const PeriodicScalarField& W, double eps, const Eigen::Vector2d& k,
                               const FourierGrid& window);

struct ProfileOptions {
  std::vector<double> b_grid;
  std::vector<int> counts;
  std::vector<double> eps_grid;
  std::vector<double> t_grid;
  /// Quasimomenta over which C_eps is maximized.
  std::vector<Eigen::Vector2d> kpoints{{0.0, 0.0}, {kPi, 0.0}, {0.0, kPi}, {kPi, kPi}};
  /// Window for the C_eps eigenproblem; radius 0 selects the radius of W.
  int window_radius = 0;
  /// Sample resolution for the threshold norms; 0 selects 4 x side of W.
  int sample_resolution = 0;
};

/// Defaults: 33 levels in [0, 1.1 sup|W|], counts 1..4096 in powers of two,
/// eps in {0} u 10^[-3, 1], t in 2 pi x 2^[0, 10].
ProfileOptions default_profile_options(const PeriodicScalarField& W);

struct PotentialProfile {
  ProfileOptions options;
  PeriodicScalarField W;
  int resolution = 0;  // sample grid of the threshold norms
  std::vector<double> b_grid;
  std::vector<double> Wb_norm;      // ||W_b||_{L2(K)}, W_b = W on {|W| > b}
  std::vector<int> counts;
  std::vector<double> f_W;          // inf_b (b + sqrt(n) ||W_b||), exact over the samples
  std::vector<double> f_ratio;      // f_W(n) / sqrt(n)
  std::vector<double> eps_grid;
  std::vector<double> C_eps;        // max over options.kpoints
  std::vector<double> t_grid;
  std::vector<double> h_W;          // min_eps (eps + C_eps / t)
  std::vector<double> h_tilde;      // on b_grid
  double C_1 = 0.0;
  double c7 = 0.0;                  // 1 + C_1 / pi

  double h(double t) const;
  double h_tilde_at(double b) const;
};

/// Throws std::invalid_argument on empty grids or negative entries.
PotentialProfile potential_profile(const PeriodicScalarField& W, const ProfileOptions& opts);

/// ||W_b||_{L2(K)} on an s x s sample grid, and its infimum form for f_W.
double threshold_norm(const PeriodicScalarField& W, double b, int resolution);
double f_functional(const PeriodicScalarField& W, int count, int resolution);

/// Ratio checks of the relative-bound consequences on random trials:
///   phi in T^pm(mu/2)             : ||W phi|| <= c7 ||phi||_*
///   phi in T^pm(mu/2) \ T^pm(a)   : ||W phi|| <= h_W(a) ||phi||_*
///   phi off T^+(mu/2) u T^-(mu/2) : ||W phi|| <= 3 h_W(mu) ||phi||_*
/// Each ratio is lhs / rhs; values <= 1 pass. C_eps is taken at the reduced
/// quasimomenta k +- mu e2 on the trial window.
struct RelativeBoundReport {
  double c7 = 0.0;
  double h_a = 0.0;
  double h_mu = 0.0;
  double max_ratio_inner = 0.0;
  double max_ratio_shell = 0.0;
  double max_ratio_outer = 0.0;
  int trials = 0;
  bool passed() const {
    return max_ratio_inner <= 1.0 && max_ratio_shell <= 1.0 && max_ratio_outer <= 1.0;
  }
};

/// Requires k1 = pi, mu >= 4 pi and 2 pi <= a <= mu / 2 (InadmissibleParameters).
RelativeBoundReport relative_bound_checks(const PeriodicScalarField& W, const Eigen::Vector2d& k,
                                          double mu, double a, const FourierGrid& window,
                                          const std::vector<double>& eps_grid, int trials,
                                          std::mt19937_64& rng);

/// Random coefficient vector supported on the given mode mask.
Eigen::VectorXcd random_supported_vector(const std::vector<bool>& mask, std::mt19937_64& rng);

struct CrossTermReport {
  double tail = 0.0;   // (sum_{2 pi |N| > a' - a} |W_N|^2)^{1/2}
  double factor = 0.0; // sqrt(6 pi) a tail
  std::vector<double> ratios;
  double max_ratio = 0.0;
  int violations = 0;
};

/// Checks |(phi, W psi)| <= sqrt(6 pi) a tail ||phi|| ||psi|| for each pair
/// (phi off T(a'), psi on T(a)) with the sign's index sets. Requires
/// 2 pi <= a < a' <= mu / 2; support or parameter violations throw
/// SupportViolation. A pair with both sides zero has ratio 0.
CrossTermReport cross_term_check(const PeriodicScalarField& W, const ModeWeights& weights,
                                 double a, double a_prime, Sign sign,
                                 const std::vector<std::pair<Eigen::VectorXcd, Eigen::VectorXcd>>& trials);

/// Threshold parts V^(l)_b (l = 1, 2) and the hyperbolic rotation
///   Vt0 = V0 cosh 2Psi' + V3 sinh 2Psi',  Vt3 = V0 sinh 2Psi' + V3 cosh 2Psi'
/// evaluated on the potential's sample grid.
struct SplitPotential {
  PeriodicScalarField V1b, V2b, Vt0, Vt3;
};

SplitPotential split_potential(const MatrixPotential& V, double b,
                               const PeriodicScalarField& psi_prime);

/// Pointwise threshold W_b on the field's own sample grid.
PeriodicScalarField threshold_part(const PeriodicScalarField& W, double b);

}  // namespace pdirac
