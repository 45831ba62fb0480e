#include "pdirac/bands.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pdirac/errors.hpp"
#include "pdirac/parallel.hpp"

namespace pdirac {

std::vector<Eigen::Vector2d> brillouin_grid(int n1, int n2) {
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("brillouin_grid: empty grid");
  std::vector<Eigen::Vector2d> out;
  out.reserve(std::size_t(n1) * n2);
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) out.emplace_back(kTwoPi * i / n1, kTwoPi * j / n2);
  return out;
}

std::vector<double> linspace(double lo, double hi, int n) {
  if (n < 1) return {};
  if (n == 1) return {lo};
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo + (hi - lo) * i / (n - 1);
  out.back() = hi;
  return out;
}

namespace {

Eigen::VectorXd keep_smallest(Eigen::VectorXd v, int count) {
  if (count <= 0 || count >= v.size()) {
    std::sort(v.data(), v.data() + v.size());
    return v;
  }
  std::vector<double> w(v.data(), v.data() + v.size());
  // ties in modulus go to the negative value so the selection is reproducible
  std::stable_sort(w.begin(), w.end(), [](double a, double b) {
    double fa = std::abs(a), fb = std::abs(b);
    return fa != fb ? fa < fb : a < b;
  });
  w.resize(count);
  std::sort(w.begin(), w.end());
  return Eigen::Map<Eigen::VectorXd>(w.data(), count);
}

}  // namespace

BandTable band_structure(const CoefficientSet& coeffs, const MatrixPotential& V,
                         const std::vector<Eigen::Vector2d>& kpoints, const FourierGrid& grid,
                         const BandOptions& opts) {
  if (kpoints.empty()) throw std::invalid_argument("band_structure: empty k-grid");
  const CoefficientSet c = coeffs.regrid(grid);
  const MatrixPotential v = V.regrid(grid);

  bool self_adjoint = false;
  switch (opts.mode) {
    case BandMode::self_adjoint:
      if (!V.hermitian())
        throw InadmissibleParameters("self-adjoint band mode needs a Hermitian potential");
      self_adjoint = true;
      break;
    case BandMode::automatic:
      self_adjoint = V.hermitian() && c.is_constant();
      break;
    case BandMode::singular_values:
      break;
  }

  BandTable out{grid, kpoints, std::vector<Eigen::VectorXd>(kpoints.size()), self_adjoint, 0.0};
  std::vector<double> asym(kpoints.size(), 0.0);
  parallel_for(int(kpoints.size()), opts.workers, [&](int i) {
    const auto& k = kpoints[i];
    Eigen::MatrixXcd a =
        assemble_dirac(c, v, ComplexQuasimomentum::real(k[0], k[1]), grid).dense();
    const double scale = std::max(a.norm(), 1e-300);
    asym[i] = (a - a.adjoint()).norm() / scale;
    if (self_adjoint) {
      if (asym[i] > opts.symmetry_tol)
        throw InadmissibleParameters("fiber is not symmetric on the truncated window (" +
                                     std::to_string(asym[i]) + ")");
      Eigen::MatrixXcd h = 0.5 * (a + a.adjoint());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
      out.values[i] = keep_smallest(es.eigenvalues(), opts.count);
    } else {
      out.values[i] = keep_smallest(singular_values(a), opts.count);
    }
  });
  out.max_asymmetry = *std::max_element(asym.begin(), asym.end());
  return out;
}

FloorFit fit_floor(const std::vector<double>& mu_tilde, const Eigen::VectorXd& sigma) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t j = 0; j < mu_tilde.size(); ++j) {
    if (!(sigma[j] > 0.0)) continue;
    const double x = mu_tilde[j], y = std::log(sigma[j]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  FloorFit f;
  f.points = n;
  if (n == 0) return f;
  const double den = n * sxx - sx * sx;
  const double slope = den > 0.0 ? (n * sxy - sx * sy) / den : 0.0;
  f.rate = -slope;
  f.intercept = (sy - slope * sx) / n;
  return f;
}

SweepReport sigma_min_sweep(const CoefficientSet& coeffs, const MatrixPotential& V,
                            const SweepSpec& spec, const FourierGrid& grid) {
  if (std::abs(spec.e.norm() - 1.0) > 1e-12)
    throw std::invalid_argument("sigma_min_sweep: direction must be a unit vector");
  if (spec.mu_tilde.empty() || spec.k2.empty())
    throw std::invalid_argument("sigma_min_sweep: empty sweep grid");
  const CoefficientSet c = coeffs.regrid(grid);
  const MatrixPotential v = V.regrid(grid);
  const int nk = int(spec.k2.size()), nm = int(spec.mu_tilde.size());

  SweepReport r;
  r.spec = spec;
  r.sigma.resize(nk, nm);
  parallel_for(nk * nm, spec.workers, [&](int idx) {
    const int i = idx / nm, j = idx % nm;
    ComplexQuasimomentum z;
    z.k = Eigen::Vector2d(spec.k1, spec.k2[i]) + spec.k_shift;
    z.kappa = spec.mu_tilde[j] * spec.e + spec.kappa_shift;
    r.sigma(i, j) = smallest_singular_value(assemble_dirac(c, v, z, grid), spec.method);
  });
  r.floor = r.sigma.colwise().minCoeff().transpose();
  r.fit = fit_floor(spec.mu_tilde, r.floor);
  for (int i = 0; i < nk; ++i)
    for (int j = 0; j < nm; ++j)
      if (r.sigma(i, j) < SweepReport::kFlagLevel) r.flagged.emplace_back(i, j);
  return r;
}

}  // namespace pdirac
