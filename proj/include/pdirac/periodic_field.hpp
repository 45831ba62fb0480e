#pragma once

#include <Eigen/Dense>
#include <functional>
#include <span>
#include <vector>

#include "pdirac/fourier_grid.hpp"

namespace pdirac {

/// Z^2-periodic complex function on the unit cell K = [0,1)^2, stored as its
/// Fourier coefficients phi_N = int_K phi(x) e^{-2 pi i (N,x)} dx for N in the
/// grid window. Values outside the window are zero.
///
/// A field may carry a real-valued flag; flagged fields are guaranteed to
/// satisfy phi_{-N} = conj(phi_N) to 1e-12.
class PeriodicScalarField {
 public:
  /// Zero field on the single-mode grid (placeholder for aggregates).
  PeriodicScalarField() : PeriodicScalarField(FourierGrid(0)) {}
  explicit PeriodicScalarField(FourierGrid grid);
  PeriodicScalarField(FourierGrid grid, Eigen::VectorXcd coeffs);

  static PeriodicScalarField constant(const FourierGrid& grid, cplx value);
  /// Samples `f` on the grid and keeps the window coefficients.
  static PeriodicScalarField from_function(const FourierGrid& grid,
                                           const std::function<cplx(double, double)>& f);
  /// Builds a field from coefficients and certifies Hermitian symmetry.
  /// Throws std::invalid_argument when the symmetry defect exceeds `tol`.
  static PeriodicScalarField real(FourierGrid grid, Eigen::VectorXcd coeffs, double tol = 1e-12);

  const FourierGrid& grid() const { return grid_; }
  const Eigen::VectorXcd& coeffs() const { return coeffs_; }
  cplx coeff(const Mode& n) const;
  bool real_valued() const { return real_; }

  /// Largest |phi_{-N} - conj(phi_N)| over the window.
  double hermitian_defect() const;
  /// Re-certifies the field as real-valued (throws std::invalid_argument).
  PeriodicScalarField as_real(double tol = 1e-12) const;

  /// Values on the S x S sample grid (row-major, x1 major).
  std::vector<cplx> samples() const;
  /// Values on an anisotropic s1 x s2 grid, s_j >= 2M + 1.
  std::vector<cplx> samples(int s1, int s2) const;
  cplx evaluate(double x1, double x2) const;

  cplx mean() const { return coeffs_[grid_.zero_index()]; }
  /// L2(K) norm computed from the coefficients.
  double l2_norm() const { return coeffs_.norm(); }
  /// L2(K) norm computed by the trapezoid rule on the sample grid.
  double quadrature_l2_norm() const;
  /// Maximum modulus over the sample grid.
  double sup_norm() const;

  PeriodicScalarField conj() const;
  PeriodicScalarField derivative(int axis) const;
  PeriodicScalarField regrid(const FourierGrid& target) const;
  /// Applies `f` pointwise on the sample grid and truncates the result.
  PeriodicScalarField map_pointwise(const std::function<cplx(cplx)>& f) const;

  PeriodicScalarField operator-() const;
  PeriodicScalarField& operator+=(const PeriodicScalarField& o);
  PeriodicScalarField& operator-=(const PeriodicScalarField& o);
  PeriodicScalarField& operator*=(cplx s);

  friend PeriodicScalarField operator+(PeriodicScalarField a, const PeriodicScalarField& b) {
    return a += b;
  }
  friend PeriodicScalarField operator-(PeriodicScalarField a, const PeriodicScalarField& b) {
    return a -= b;
  }
  friend PeriodicScalarField operator*(cplx s, PeriodicScalarField a) { return a *= s; }
  friend PeriodicScalarField operator*(PeriodicScalarField a, cplx s) { return a *= s; }

 private:
  FourierGrid grid_;
  Eigen::VectorXcd coeffs_;
  bool real_ = false;
};

/// Low-level transforms for coefficient vectors on a grid's S x S samples.
std::vector<cplx> synthesize_samples(const FourierGrid& grid, const Eigen::VectorXcd& coeffs);
/// Consumes `samples` (used as FFT scratch).
Eigen::VectorXcd analyze_samples(const FourierGrid& grid, std::vector<cplx>& samples);

/// Window coefficients of the samples taken at x = (i/S, j/S).
PeriodicScalarField sample_to_fourier(std::span<const cplx> samples, const FourierGrid& grid);
std::vector<cplx> fourier_to_sample(const PeriodicScalarField& field);

/// Coefficients (|N|_inf <= M) of the pointwise product, alias-free.
PeriodicScalarField convolve(const PeriodicScalarField& a, const PeriodicScalarField& b);

/// Applies a binary pointwise map on the shared sample grid and truncates.
PeriodicScalarField combine_pointwise(const PeriodicScalarField& a, const PeriodicScalarField& b,
                                      const std::function<cplx(cplx, cplx)>& f);

/// Multiplication of a coefficient vector by a field, truncated to the window.
/// Equivalent to the Toeplitz product T(a) v.
Eigen::VectorXcd multiply_coefficients(const PeriodicScalarField& a, const Eigen::VectorXcd& v);

/// Dense Toeplitz matrix T(a)[N, N'] = a_{N - N'} (zero outside the window).
Eigen::MatrixXcd multiplication_matrix(const PeriodicScalarField& a);

/// Inner product linear in the second argument.
cplx inner(const PeriodicScalarField& a, const PeriodicScalarField& b);

}  // namespace pdirac
