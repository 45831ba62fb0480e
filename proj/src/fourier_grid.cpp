#include "pdirac/fourier_grid.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

#include "pdirac/errors.hpp"

namespace pdirac {

int Mode::sup_norm() const { return std::max(std::abs(n1), std::abs(n2)); }

double Mode::euclidean_norm() const { return std::hypot(double(n1), double(n2)); }

FourierGrid::FourierGrid(int truncation_radius, int sample_resolution)
    : radius_(truncation_radius), resolution_(sample_resolution) {
  if (radius_ < 0) throw std::invalid_argument("truncation radius must be nonnegative");
  if (resolution_ == 0) resolution_ = min_resolution(radius_);
  if (resolution_ < min_resolution(radius_))
    throw std::invalid_argument("sample resolution " + std::to_string(resolution_) +
                                " is below the alias-free minimum " +
                                std::to_string(min_resolution(radius_)));
  modes_.reserve(mode_count());
  for (int a = -radius_; a <= radius_; ++a)
    for (int b = -radius_; b <= radius_; ++b) modes_.push_back({a, b});
}

bool FourierGrid::contains(const Mode& n) const { return n.sup_norm() <= radius_; }

int FourierGrid::index(const Mode& n) const {
  if (!contains(n))
    throw std::out_of_range("mode (" + std::to_string(n.n1) + "," + std::to_string(n.n2) +
                            ") outside window of radius " + std::to_string(radius_));
  return (n.n1 + radius_) * side() + (n.n2 + radius_);
}

Mode FourierGrid::mode(int idx) const { return modes_.at(idx); }

std::vector<int> embed_indices(const FourierGrid& inner, const FourierGrid& outer) {
  if (inner.radius() > outer.radius()) throw GridMismatch("embed_indices: inner window is larger");
  std::vector<int> out;
  out.reserve(inner.mode_count());
  for (const Mode& n : inner.modes()) out.push_back(outer.index(n));
  return out;
}

void require_same_grid(const FourierGrid& a, const FourierGrid& b, const char* what) {
  if (!(a == b))
    throw GridMismatch(std::string(what) + ": grids differ (M=" + std::to_string(a.radius()) +
                       ",S=" + std::to_string(a.resolution()) + " vs M=" +
                       std::to_string(b.radius()) + ",S=" + std::to_string(b.resolution()) + ")");
}

}  // namespace pdirac
