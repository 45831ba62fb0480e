#pragma once

#include <Eigen/Dense>
#include <vector>

#include "pdirac/fourier_grid.hpp"

namespace pdirac {

enum class Sign { plus, minus };
enum class NormVariant { star, star_plus, star_minus };

inline double sign_value(Sign s) { return s == Sign::plus ? 1.0 : -1.0; }

/// Per-mode distances
///   G^pm_N = |(k1 + 2 pi N1, k2 + 2 pi N2 pm mu)|,  G_N = min(G^+_N, G^-_N)
/// tabulated over the window of a grid.
class ModeWeights {
 public:
  ModeWeights(const FourierGrid& grid, Eigen::Vector2d k, double mu);

  static double value(const Eigen::Vector2d& k, double mu, const Mode& n, Sign s);

  const FourierGrid& grid() const { return grid_; }
  const Eigen::Vector2d& k() const { return k_; }
  double mu() const { return mu_; }

  const Eigen::VectorXd& plus() const { return plus_; }
  const Eigen::VectorXd& minus() const { return minus_; }
  const Eigen::VectorXd& min() const { return min_; }
  const Eigen::VectorXd& table(Sign s) const { return s == Sign::plus ? plus_ : minus_; }
  const Eigen::VectorXd& table(NormVariant v) const;

 private:
  FourierGrid grid_;
  Eigen::Vector2d k_;
  double mu_;
  Eigen::VectorXd plus_, minus_, min_;
};

/// (sum_N w_N^2 |phi_N|^2)^{1/2} with w = G, G^+ or G^- for star, star_plus, star_minus.
double weighted_norm(const Eigen::VectorXcd& phi, const ModeWeights& weights, NormVariant variant);

/// Modes of T^pm(a) = {N : G^pm_N <= a} lying in the window. `window_overflow`
/// is set when the unrestricted set has members outside the window, in which
/// case `modes` is incomplete and counting bounds do not apply.
struct IndexSet {
  std::vector<Mode> modes;
  bool window_overflow = false;
  std::size_t analytic_count = 0;
};

/// Requires a >= 2 pi (std::invalid_argument otherwise).
IndexSet index_set_T(const ModeWeights& weights, double a, Sign sign);

/// Zeroes all coefficients outside `modes`. Modes outside the grid are ignored.
Eigen::VectorXcd project(const Eigen::VectorXcd& phi, const FourierGrid& grid,
                         const std::vector<Mode>& modes);

/// Membership mask of `modes` over the grid window.
std::vector<bool> mode_mask(const FourierGrid& grid, const std::vector<Mode>& modes);

}  // namespace pdirac
