#include "pdirac/mode_weights.hpp"

#include <cmath>
#include <stdexcept>

#include "pdirac/errors.hpp"

namespace pdirac {

ModeWeights::ModeWeights(const FourierGrid& grid, Eigen::Vector2d k, double mu)
    : grid_(grid), k_(k), mu_(mu) {
  const int n = grid_.mode_count();
  plus_.resize(n);
  minus_.resize(n);
  min_.resize(n);
  for (int i = 0; i < n; ++i) {
    plus_[i] = value(k_, mu_, grid_.modes()[i], Sign::plus);
    minus_[i] = value(k_, mu_, grid_.modes()[i], Sign::minus);
    min_[i] = std::min(plus_[i], minus_[i]);
  }
}

double ModeWeights::value(const Eigen::Vector2d& k, double mu, const Mode& n, Sign s) {
  return std::hypot(k[0] + kTwoPi * n.n1, k[1] + kTwoPi * n.n2 + sign_value(s) * mu);
}

const Eigen::VectorXd& ModeWeights::table(NormVariant v) const {
  switch (v) {
    case NormVariant::star_plus: return plus_;
    case NormVariant::star_minus: return minus_;
    default: return min_;
  }
}

double weighted_norm(const Eigen::VectorXcd& phi, const ModeWeights& weights, NormVariant variant) {
  const Eigen::VectorXd& w = weights.table(variant);
  if (phi.size() != w.size()) throw GridMismatch("weighted_norm: vector does not match weights");
  return (w.cwiseProduct(phi.cwiseAbs())).norm();
}

IndexSet index_set_T(const ModeWeights& weights, double a, Sign sign) {
  if (!(a >= kTwoPi)) throw std::invalid_argument("index_set_T needs a >= 2 pi");
  const Eigen::Vector2d& k = weights.k();
  const double shift = k[1] + sign_value(sign) * weights.mu();
  // Bounding box of the disc |(k1 + 2 pi N1, shift + 2 pi N2)| <= a, padded by one.
  const int lo1 = int(std::floor((-a - k[0]) / kTwoPi)) - 1;
  const int hi1 = int(std::ceil((a - k[0]) / kTwoPi)) + 1;
  const int lo2 = int(std::floor((-a - shift) / kTwoPi)) - 1;
  const int hi2 = int(std::ceil((a - shift) / kTwoPi)) + 1;
  const FourierGrid& g = weights.grid();
  IndexSet out;
  for (int n1 = lo1; n1 <= hi1; ++n1)
    for (int n2 = lo2; n2 <= hi2; ++n2) {
      Mode n{n1, n2};
      if (ModeWeights::value(k, weights.mu(), n, sign) > a) continue;
      ++out.analytic_count;
      if (g.contains(n))
        out.modes.push_back(n);
      else
        out.window_overflow = true;
    }
  return out;
}

std::vector<bool> mode_mask(const FourierGrid& grid, const std::vector<Mode>& modes) {
  std::vector<bool> mask(grid.mode_count(), false);
  for (const Mode& n : modes)
    if (grid.contains(n)) mask[grid.index(n)] = true;
  return mask;
}

Eigen::VectorXcd project(const Eigen::VectorXcd& phi, const FourierGrid& grid,
                         const std::vector<Mode>& modes) {
  if (phi.size() != grid.mode_count()) throw GridMismatch("project: vector does not match grid");
  std::vector<bool> mask = mode_mask(grid, modes);
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(phi.size());
  for (int i = 0; i < phi.size(); ++i)
    if (mask[i]) out[i] = phi[i];
  return out;
}

}  // namespace pdirac
