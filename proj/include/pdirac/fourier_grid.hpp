#pragma once

#include <compare>
#include <complex>
#include <vector>

namespace pdirac {

using cplx = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Lattice point N = (n1, n2) of the dual lattice Z^2.
struct Mode {
  int n1 = 0;
  int n2 = 0;

  auto operator<=>(const Mode&) const = default;

  Mode operator-() const { return {-n1, -n2}; }
  Mode operator+(const Mode& o) const { return {n1 + o.n1, n2 + o.n2}; }
  Mode operator-(const Mode& o) const { return {n1 - o.n1, n2 - o.n2}; }

  int sup_norm() const;
  double euclidean_norm() const;
};

/// Square window of Fourier modes |N|_inf <= M together with the S x S
/// sampling grid on the unit cell used for pointwise products.
///
/// Modes are stored lexicographically by (n1, n2):
///   index(N) = (n1 + M) * (2M + 1) + (n2 + M).
/// With this order index(-N) = mode_count() - 1 - index(N), and the zero mode
/// sits at the centre index.
///
/// Samples are row-major with the first index along x1: sample (i, j) is the
/// point x = (i / S, j / S) and lives at offset i * S + j.
class FourierGrid {
 public:
  /// `sample_resolution == 0` selects the smallest alias-free value 2(2M+1).
  explicit FourierGrid(int truncation_radius, int sample_resolution = 0);

  int radius() const { return radius_; }
  int resolution() const { return resolution_; }
  int side() const { return 2 * radius_ + 1; }
  int mode_count() const { return side() * side(); }
  int sample_count() const { return resolution_ * resolution_; }
  int zero_index() const { return mode_count() / 2; }

  bool contains(const Mode& n) const;
  /// Throws std::out_of_range for modes outside the window.
  int index(const Mode& n) const;
  int reflected_index(int idx) const { return mode_count() - 1 - idx; }
  Mode mode(int idx) const;
  const std::vector<Mode>& modes() const { return modes_; }

  static int min_resolution(int truncation_radius) { return 2 * (2 * truncation_radius + 1); }

  bool operator==(const FourierGrid& o) const {
    return radius_ == o.radius_ && resolution_ == o.resolution_;
  }

 private:
  int radius_;
  int resolution_;
  std::vector<Mode> modes_;
};

/// Indices in `outer` of the modes of `inner` (inner radius must not exceed outer).
std::vector<int> embed_indices(const FourierGrid& inner, const FourierGrid& outer);

/// Throws GridMismatch unless both grids are identical.
void require_same_grid(const FourierGrid& a, const FourierGrid& b, const char* what);

}  // namespace pdirac
