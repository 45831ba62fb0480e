#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pdirac/assembly.hpp"
#include "pdirac/linalg.hpp"

namespace pdirac {

enum class BandMode { automatic, self_adjoint, singular_values };

/// Uniform n1 x n2 grid over the Brillouin zone 2 pi [0,1)^2.
std::vector<Eigen::Vector2d> brillouin_grid(int n1, int n2);

struct BandOptions {
  BandMode mode = BandMode::automatic;
  /// Number of values kept per fiber (smallest in modulus); 0 keeps all.
  int count = 0;
  int workers = 1;
  /// Relative asymmetry ||A - A^*|| / ||A|| tolerated in self-adjoint mode.
  double symmetry_tol = 1e-10;
};

/// Per-fiber spectral data over a list of real quasimomenta. In self-adjoint
/// mode the values are eigenvalues, otherwise singular values; each row is
/// sorted ascending.
struct BandTable {
  FourierGrid grid;
  std::vector<Eigen::Vector2d> kpoints;
  std::vector<Eigen::VectorXd> values;
  bool self_adjoint = false;
  /// Largest relative asymmetry of the assembled fibers.
  double max_asymmetry = 0.0;
};

/// Self-adjoint mode needs a Hermitian potential and a fiber that is
/// symmetric to `symmetry_tol`, which on a truncated window holds for constant
/// coefficients; violations throw InadmissibleParameters. Automatic mode
/// picks eigenvalues when both hold and singular values otherwise.
BandTable band_structure(const CoefficientSet& coeffs, const MatrixPotential& V,
                         const std::vector<Eigen::Vector2d>& kpoints, const FourierGrid& grid,
                         const BandOptions& opts = {});

/// Complex line z = (k1, k2) + k' + i(mu_tilde e + kappa') swept over mu_tilde
/// and k2.
struct SweepSpec {
  Eigen::Vector2d e{1.0, 0.0};
  Eigen::Vector2d k_shift = Eigen::Vector2d::Zero();
  Eigen::Vector2d kappa_shift = Eigen::Vector2d::Zero();
  double k1 = kPi;
  std::vector<double> mu_tilde;
  std::vector<double> k2{0.0};
  SvdMethod method = SvdMethod::automatic;
  int workers = 1;
};

/// log sigma ~ intercept - rate * mu_tilde, least squares over positive values.
struct FloorFit {
  double rate = 0.0;
  double intercept = 0.0;
  int points = 0;
};

struct SweepReport {
  SweepSpec spec;
  /// sigma(i, j): k2[i], mu_tilde[j].
  Eigen::MatrixXd sigma;
  /// Minimum over k2 for each mu_tilde.
  Eigen::VectorXd floor;
  FloorFit fit;
  /// (i, j) pairs with sigma below kFlagLevel.
  std::vector<std::pair<int, int>> flagged;
  static constexpr double kFlagLevel = 1e-12;
};

/// Smallest singular value of the shifted fiber along the sweep. Throws
/// std::invalid_argument unless e is a unit vector and the grids are nonempty.
SweepReport sigma_min_sweep(const CoefficientSet& coeffs, const MatrixPotential& V,
                            const SweepSpec& spec, const FourierGrid& grid);

FloorFit fit_floor(const std::vector<double>& mu_tilde, const Eigen::VectorXd& sigma);

/// n points from lo to hi inclusive.
std::vector<double> linspace(double lo, double hi, int n);

}  // namespace pdirac
