#pragma once

#include <vector>

#include "pdirac/coefficient_set.hpp"
#include "pdirac/periodic_field.hpp"

namespace pdirac {

struct WienerOptions {
  double theta = 0.5;
  /// Quadrature grid side; 0 picks the smallest admissible multiple of 8.
  int resolution = 0;
  double samples_per_oscillation = 8.0;
  /// Taylor terms of the binned exponential sum.
  int taylor_terms = 12;
};

/// Oscillatory integrals I^pm_nu = int_K e^{pm 2 pi i nu (Psi - x2)} W dx for
/// nu = 1..N_max by the trapezoid rule on an S x S grid. All nu are obtained
/// at once: t = Psi - x2 mod 1 is binned on L >= 8 N_max points and
/// e^{2 pi i nu t} is expanded around the bin centre, leaving one FFT of
/// length L per Taylor term.
struct WienerReport {
  int N_max = 0;
  double theta = 0.0;
  int resolution = 0;
  int bins = 0;
  /// max over samples of max(|d1 Psi|, |d2 Psi - 1|)
  double phase_gradient = 0.0;
  double samples_per_oscillation = 0.0;
  std::vector<cplx> I_plus, I_minus;  // entry nu - 1
  std::vector<double> A;              // A(N) = (1/N) sum_{nu <= N} |I^+_nu|^2, entry N - 1
  std::vector<double> density_plus;   // #{nu <= N : |I^pm_nu| >= theta} / N
  std::vector<double> density_minus;
};

/// Psi must be real. Throws ResolutionError when a fixed resolution gives
/// fewer than `samples_per_oscillation` samples per period of the phase at
/// nu = N_max, and std::invalid_argument for N_max < 1 or theta <= 0.
WienerReport wiener_average(const PeriodicScalarField& W, const PeriodicScalarField& Psi, int N_max,
                            const WienerOptions& opts = {});

/// Grid side needed to resolve the phase at frequency nu.
int required_resolution(const PeriodicScalarField& Psi, int nu, double samples_per_oscillation);
double phase_gradient(const PeriodicScalarField& Psi);

/// Admissibility of one scaling mu = pi nu: the twisted integrals
///   int e^{s 2 pi i nu (Psi - x2)} P e^{2 pi i (N, x)},  pi |N| < a_J,
/// for P = (G + s iF) V^(s) and P = H V^(s), s = +, -, must all be below theta.
struct ScalingAdmissibility {
  int nu = 0;
  double theta = 0.0;
  double max_plus = 0.0;
  double max_minus = 0.0;
  int tracked = 0;  // number of integrands per sign
  int resolution = 0;
  bool admissible() const { return max_plus < theta && max_minus < theta; }
};

ScalingAdmissibility scaling_admissibility(const CoefficientSet& coeffs,
                                           const PeriodicScalarField& V_plus,
                                           const PeriodicScalarField& V_minus,
                                           const PeriodicScalarField& Psi, int nu, double theta,
                                           double a_J, double samples_per_oscillation = 8.0);

}  // namespace pdirac
