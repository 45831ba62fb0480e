#include "random_instances.hpp"

namespace pdirac::testing {

PeriodicScalarField random_trig_poly(const FourierGrid& grid, std::mt19937_64& rng, int bandwidth,
                                     double amplitude, bool real) {
  std::normal_distribution<double> gauss;
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(grid.mode_count());
  for (int i = 0; i < grid.mode_count(); ++i) {
    const Mode& n = grid.modes()[i];
    if (n.sup_norm() > bandwidth || n == Mode{0, 0}) continue;
    // decay keeps the polynomial smooth-looking
    const double w = 1.0 / (1.0 + n.euclidean_norm());
    c[i] = w * cplx(gauss(rng), gauss(rng));
  }
  PeriodicScalarField f(grid, c);
  if (real) f = f.as_real(1e300);
  const double sup = f.sup_norm();
  if (sup > 0.0) f *= amplitude / sup;
  return f;
}

CoefficientSet random_gamma_instance(const FourierGrid& grid, std::mt19937_64& rng,
                                     GammaBounds b, int bandwidth) {
  std::uniform_real_distribution<double> frac(0.3, 0.8);
  const double centre = 0.5 * (b.p + b.q), half = 0.5 * (b.p - b.q);
  auto around = [&](double scale) {
    return PeriodicScalarField::constant(grid, centre) +
           random_trig_poly(grid, rng, bandwidth, scale * half);
  };
  PeriodicScalarField G = around(frac(rng));
  PeriodicScalarField H = around(frac(rng));
  PeriodicScalarField F = random_trig_poly(grid, rng, bandwidth, frac(rng) * b.F_bound) +
                          PeriodicScalarField::constant(grid, 0.0);
  return CoefficientSet(F, G, H, b);
}

Eigen::VectorXcd random_vector(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss;
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = cplx(gauss(rng), gauss(rng));
  return v;
}

}  // namespace pdirac::testing
