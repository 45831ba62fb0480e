#pragma once

#include <Eigen/Dense>

#include "pdirac/coefficient_set.hpp"
#include "pdirac/mode_weights.hpp"
#include "pdirac/truncated_operator.hpp"

namespace pdirac {

/// Complex quasimomentum z = k + i kappa.
struct ComplexQuasimomentum {
  Eigen::Vector2d k = Eigen::Vector2d::Zero();
  Eigen::Vector2d kappa = Eigen::Vector2d::Zero();

  cplx z1() const { return {k[0], kappa[0]}; }
  cplx z2() const { return {k[1], kappa[1]}; }
  ComplexQuasimomentum scaled(double s) const { return {s * k, s * kappa}; }

  static ComplexQuasimomentum real(double k1, double k2) { return {{k1, k2}, {0.0, 0.0}}; }
};

/// V0 I + V1 sigma1 + V2 sigma2 + V3 sigma3 with
///   sigma1 = [[0,1],[1,0]], sigma2 = [[0,-i],[i,0]], sigma3 = [[1,0],[0,-1]].
struct MatrixPotential {
  PeriodicScalarField V0, V1, V2, V3;

  explicit MatrixPotential(const FourierGrid& grid) : V0(grid), V1(grid), V2(grid), V3(grid) {}
  MatrixPotential(PeriodicScalarField v0, PeriodicScalarField v1, PeriodicScalarField v2,
                  PeriodicScalarField v3);

  static MatrixPotential zero(const FourierGrid& grid) { return MatrixPotential(grid); }
  /// c0 I + c1 sigma1 + c2 sigma2 + c3 sigma3 with constant entries.
  static MatrixPotential constant(const FourierGrid& grid, double c0, double c1, double c2,
                                  double c3);

  const FourierGrid& grid() const { return V0.grid(); }
  const PeriodicScalarField& component(int l) const;
  /// Hermitian iff all four components carry the real-valued flag.
  bool hermitian() const;
  bool is_zero() const;
  MatrixPotential regrid(const FourierGrid& target) const;
};

/// Scalar fiber (G pm iF)(z1 + 2 pi N1) pm iH(z2 + 2 pi N2) + i mu H.
TruncatedOperator assemble_dpm(const CoefficientSet& coeffs, const ComplexQuasimomentum& z,
                               double mu, Sign sign, const FourierGrid& grid);

/// Spinor fiber [[0, d_-], [d_+, 0]] + V. A nonzero `mu` adds i mu H sigma1,
/// i.e. i mu H to both off-diagonal blocks.
TruncatedOperator assemble_dirac(const CoefficientSet& coeffs, const MatrixPotential& V,
                                 const ComplexQuasimomentum& z, const FourierGrid& grid,
                                 double mu = 0.0);

/// Spinor operator carrying only the potential V.
TruncatedOperator potential_operator(const MatrixPotential& V);

struct GaugeConjugation {
  TruncatedOperator op;
  /// Largest relative L2 tail of the four exponential factors beyond the
  /// window, estimated on a grid of twice the radius.
  double truncation_residual = 0.0;
};

/// e^{mu sigma3 Psi} e^{-i mu Phi} op e^{i mu Phi} e^{mu sigma3 Psi} for a
/// spinor operator; exponentials are evaluated on the sample grid and truncated.
/// Throws OverflowGuard when |mu| sup|Psi| or any exponent's real part exceeds 40.
GaugeConjugation gauge_conjugate(const TruncatedOperator& op, const PeriodicScalarField& Phi,
                                 const PeriodicScalarField& Psi, cplx mu);

/// Column indices of both spinor blocks for modes with |N|_inf <= probe_radius.
std::vector<int> probe_columns(const FourierGrid& grid, int probe_radius);

/// Frobenius norm of (a - b) restricted to the given columns, computed matrix-free.
double column_difference(const TruncatedOperator& a, const TruncatedOperator& b,
                         const std::vector<int>& columns);

}  // namespace pdirac
