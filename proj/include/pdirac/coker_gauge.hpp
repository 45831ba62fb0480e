#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "pdirac/assembly.hpp"

namespace pdirac {

/// Unit vectors spanning the orthogonal complements of the ranges of the
/// truncated d_+(0) and d_-(0), with their pairings against the coefficients.
struct CokernelPair {
  PeriodicScalarField chi_plus;
  PeriodicScalarField chi_minus;  // conj(chi_plus): coefficients conj(chi_plus_{-N})
  cplx mu1_plus = 0.0, mu1_minus = 0.0;  // (chi_pm, G pm iF)
  cplx mu2_plus = 0.0, mu2_minus = 0.0;  // (chi_pm, pm iH)
  double c0_lower = 0.0;          // |Im mu1_plus conj(mu2_plus)|
  /// Smallest eigenvalue of the real Gram matrix of (mu1_plus, mu2_plus),
  /// i.e. min over unit real t of |t1 mu1_plus + t2 mu2_plus|^2.
  double c0_variational = 0.0;
  double sigma_min = 0.0;  // smallest singular value of truncated d_+(0)
  double sigma_gap = 0.0;  // second smallest singular value
};

/// Throws DegenerateCokernel when the second smallest singular value of the
/// truncated d_+(0) is within `gap_tol` of the smallest.
CokernelPair cokernel_vectors(const CoefficientSet& coeffs, double gap_tol = 1e-8);

/// Quasimomentum k + i kappa that makes i d_pm Phi_pm = C'_pm solvable:
///   z1 = (mu2_- a - mu2_+ b) / det,  z2 = (-mu1_- a + mu1_+ b) / det,
/// with a = (chi_+, C_+), b = (chi_-, C_-), det = 2i Im(mu1_+ conj mu2_+).
/// Returns (z1, z2).
std::pair<cplx, cplx> solvability_quasimomentum(const CokernelPair& pair, cplx a, cplx b);

struct GaugeSolution {
  PeriodicScalarField Phi;
  PeriodicScalarField Psi;
  Eigen::Vector2d k = Eigen::Vector2d::Zero();
  Eigen::Vector2d kappa = Eigen::Vector2d::Zero();
  double residual_plus = 0.0;   // least-squares defect inside the window
  double residual_minus = 0.0;
  double defect_plus = 0.0;     // defect of i d_pm Phi_pm = C'_pm without truncating the image
  double defect_minus = 0.0;
  double condition = 0.0;       // estimated condition number of the zero-mean restriction
  double imag_Phi = 0.0;        // sup over samples of |Im Phi|
  double imag_Psi = 0.0;
  bool real_valued = false;     // imag_Phi, imag_Psi <= 1e-8
  CokernelPair pair;

  ComplexQuasimomentum z() const { return {k, kappa}; }
};

/// Solves i d_pm Phi_pm = C_pm - (G pm iF) z1 -+ iH z2 with C_pm = C1 pm i C2,
/// by least squares on zero-mean functions; Phi = (Phi_+ + Phi_-)/2 and
/// Psi = i(Phi_+ - Phi_-)/2. Throws IllConditioned above condition 1e12.
GaugeSolution solve_gauge(const CoefficientSet& coeffs, const PeriodicScalarField& C1,
                          const PeriodicScalarField& C2);

struct CanonicalGauge {
  PeriodicScalarField Phi;  // real, zero mean
  PeriodicScalarField Psi;  // real, zero mean
  Eigen::Vector2d kappa_tilde = Eigen::Vector2d::Zero();
  double c3_star = 0.0;       // sqrt(c0_lower) / (p + F_bound)
  double c3_variational = 0.0;  // sqrt(c0_variational) / (p + F_bound)
  double residual = 0.0;      // defect of i d_+(Phi - i Psi) = -(G+iF) kt1 - iH(kt2 + i)
  double real_part_k = 0.0;   // |k| returned by the underlying solve, expected ~0
  CokernelPair pair;
};

/// Gauge with C1 = iH, C2 = 0; the real solution is recovered by a factor -i.
CanonicalGauge solve_canonical_gauge(const CoefficientSet& coeffs);

/// Defect of the canonical equation, with the image evaluated without truncation.
double canonical_residual(const CoefficientSet& coeffs, const CanonicalGauge& gauge);

struct CokernelFormulaCheck {
  cplx c6;
  double residual = 0.0;  // || chi_+ - c6 (GH)^{-1}(d_+ Psi - H) ||
};

CokernelFormulaCheck verify_cokernel_formula(const CoefficientSet& coeffs,
                                             const CanonicalGauge& canonical,
                                             const CokernelPair& pair);

/// Z(x) = Phi - i Psi + kt1 x1 + (kt2 + i) x2.
std::vector<cplx> z_map(const CanonicalGauge& canonical,
                        const std::vector<Eigen::Vector2d>& points);

struct ZMapDiagnostics {
  double min_ratio = 0.0;              // min |Z(x) - Z(y)| / |x - y| over sample pairs
  double periodicity_residual = 0.0;   // max |Z(x + n) - Z(x) - kt1 n1 - (kt2 + i) n2|
};

ZMapDiagnostics z_map_diagnostics(const CanonicalGauge& canonical, int samples_per_axis = 16);

struct LevelSetReport {
  double delta = 0.0;
  std::vector<double> lambdas;
  /// Area of {x in K : |Psi(x) - x2 - lambda| < delta}, from a piecewise linear
  /// interpolation along x2 on a fine grid.
  std::vector<double> measure;
  double min_gradient_quantity = 0.0;  // min (d1 Psi)^2 + (d2 Psi - 1)^2 over samples
};

/// Throws std::invalid_argument unless Psi is real and has zero mean.
LevelSetReport level_set_diagnostics(const PeriodicScalarField& Psi,
                                     const std::vector<double>& lambdas, double delta = 1e-3,
                                     int fine_resolution = 0);

/// Defect of the conjugation identity on probe columns:
///   || e^{sigma3 Psi} e^{-i Phi} D(k + i kappa) e^{i Phi} e^{sigma3 Psi} - (D(0) + C1 sigma1 + C2 sigma2) ||
/// scaled by mu, restricted to spinor columns with |N|_inf <= probe_radius.
struct GaugeIdentityResidual {
  double residual = 0.0;
  double truncation_residual = 0.0;
};

GaugeIdentityResidual gauge_identity_residual(const CoefficientSet& coeffs,
                                              const PeriodicScalarField& C1,
                                              const PeriodicScalarField& C2,
                                              const GaugeSolution& solution, double mu = 1.0,
                                              int probe_radius = 2);

/// Versioned text record of a gauge solution (JSON).
void write_gauge_solution(std::ostream& out, const GaugeSolution& solution);

}  // namespace pdirac
