#include "pdirac/coker_gauge.hpp"

#include <Eigen/QR>
#include <cmath>
#include <limits>
#include <ostream>

#include "json.hpp"
#include "pdirac/errors.hpp"
#include "pdirac/linalg.hpp"

namespace pdirac {
namespace {

const cplx I(0.0, 1.0);

// QR factorization of the truncated d_pm(0) with the zero-mode column removed.
// The zero-mode column of d_pm(0) vanishes identically, so its range equals
// the range of this restriction.
struct RestrictedFactor {
  Eigen::MatrixXcd restricted;
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr;
  ExtremeSingularValues sv;
  Eigen::VectorXcd complement;  // unit vector orthogonal to the range
};

RestrictedFactor factor(const CoefficientSet& coeffs, Sign sign) {
  const FourierGrid& g = coeffs.grid();
  const int n = g.mode_count(), z = g.zero_index();
  Eigen::MatrixXcd a = assemble_dpm(coeffs, {}, 0.0, sign, g).dense();
  RestrictedFactor f;
  f.restricted.resize(n, n - 1);
  f.restricted.leftCols(z) = a.leftCols(z);
  f.restricted.rightCols(n - 1 - z) = a.rightCols(n - 1 - z);
  f.complement = Eigen::VectorXcd::Zero(n);
  if (n == 1) {
    f.complement[0] = 1.0;
    f.sv = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    return f;
  }
  f.qr.compute(f.restricted);
  Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
  e[n - 1] = 1.0;
  f.complement = f.qr.householderQ() * e;
  Eigen::MatrixXcd r = f.qr.matrixQR().topRows(n - 1).triangularView<Eigen::Upper>();
  f.sv = triangular_extreme_singular_values(r);
  return f;
}

// Zero-mean least-squares solution of d_pm(0) phi = rhs.
Eigen::VectorXcd solve_zero_mean(const RestrictedFactor& f, const Eigen::VectorXcd& rhs, int zero,
                                 double& residual) {
  const Eigen::Index n = rhs.size();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(n);
  if (n == 1) {
    residual = std::abs(rhs[0]);
    return out;
  }
  Eigen::VectorXcd y = f.qr.solve(rhs);
  residual = (f.restricted * y - rhs).norm();
  out.head(zero) = y.head(zero);
  out.tail(n - 1 - zero) = y.tail(n - 1 - zero);
  return out;
}

double sup_imag(const PeriodicScalarField& f) {
  double m = 0.0;
  for (const cplx& v : f.samples()) m = std::max(m, std::abs(v.imag()));
  return m;
}

FourierGrid extended(const FourierGrid& g) { return FourierGrid(std::max(1, 2 * g.radius())); }

// || i d_pm(0) phi - rhs || with the image taken on the doubled window, where
// products of window-limited factors are exact.
double untruncated_defect(const CoefficientSet& coeffs, Sign sign, const PeriodicScalarField& phi,
                          const PeriodicScalarField& rhs) {
  FourierGrid ext = extended(coeffs.grid());
  TruncatedOperator d = assemble_dpm(coeffs.regrid(ext), {}, 0.0, sign, ext);
  Eigen::VectorXcd img = I * d.apply(phi.regrid(ext).coeffs());
  return (img - rhs.regrid(ext).coeffs()).norm();
}

PeriodicScalarField certify_real(const PeriodicScalarField& f, const char* name) {
  const double tol = 1e-8 * std::max(1.0, f.l2_norm());
  if (f.hermitian_defect() > tol)
    throw NumericalError(std::string("canonical gauge: ") + name + " is not real-valued (defect " +
                         std::to_string(f.hermitian_defect()) + ")");
  return f.as_real(std::numeric_limits<double>::infinity());
}

nlohmann::json coefficient_list(const PeriodicScalarField& f) {
  nlohmann::json out = nlohmann::json::array();
  const auto& g = f.grid();
  for (int i = 0; i < g.mode_count(); ++i) {
    cplx c = f.coeffs()[i];
    if (c == cplx(0.0)) continue;
    out.push_back({g.modes()[i].n1, g.modes()[i].n2, c.real(), c.imag()});
  }
  return out;
}

CokernelPair pair_from_factor(const CoefficientSet& coeffs, const RestrictedFactor& plus,
                              double gap_tol) {
  const FourierGrid& g = coeffs.grid();
  CokernelPair p;
  Eigen::VectorXcd chi = plus.complement;
  Eigen::Index big = 0;
  chi.cwiseAbs().maxCoeff(&big);
  chi *= std::conj(chi[big]) / std::abs(chi[big]);
  chi[big] = std::abs(chi[big]);
  chi.normalize();

  Eigen::MatrixXcd a_adj_chi = plus.restricted.adjoint() * chi;
  p.sigma_min = a_adj_chi.norm();
  p.sigma_gap = plus.sv.min;
  if (p.sigma_gap - p.sigma_min < gap_tol)
    throw DegenerateCokernel("cokernel is not numerically one-dimensional: singular values " +
                             std::to_string(p.sigma_min) + " and " + std::to_string(p.sigma_gap));

  p.chi_plus = PeriodicScalarField(g, chi);
  p.chi_minus = p.chi_plus.conj();
  p.mu1_plus = inner(p.chi_plus, coeffs.G() + I * coeffs.F());
  p.mu1_minus = inner(p.chi_minus, coeffs.G() - I * coeffs.F());
  p.mu2_plus = inner(p.chi_plus, I * coeffs.H());
  p.mu2_minus = inner(p.chi_minus, -I * coeffs.H());
  p.c0_lower = std::abs((p.mu1_plus * std::conj(p.mu2_plus)).imag());
  Eigen::Matrix2d gram;
  gram << std::norm(p.mu1_plus), (p.mu1_plus * std::conj(p.mu2_plus)).real(),
      (p.mu1_plus * std::conj(p.mu2_plus)).real(), std::norm(p.mu2_plus);
  p.c0_variational = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(gram).eigenvalues()[0];
  return p;
}

}  // namespace

CokernelPair cokernel_vectors(const CoefficientSet& coeffs, double gap_tol) {
  return pair_from_factor(coeffs, factor(coeffs, Sign::plus), gap_tol);
}

std::pair<cplx, cplx> solvability_quasimomentum(const CokernelPair& p, cplx a, cplx b) {
  const cplx det = 2.0 * I * (p.mu1_plus * std::conj(p.mu2_plus)).imag();
  if (det == cplx(0.0)) throw DegenerateCokernel("pairing determinant vanishes");
  return {(p.mu2_minus * a - p.mu2_plus * b) / det, (-p.mu1_minus * a + p.mu1_plus * b) / det};
}

GaugeSolution solve_gauge(const CoefficientSet& coeffs, const PeriodicScalarField& C1,
                          const PeriodicScalarField& C2) {
  const FourierGrid& g = coeffs.grid();
  require_same_grid(g, C1.grid(), "solve_gauge C1");
  require_same_grid(g, C2.grid(), "solve_gauge C2");
  RestrictedFactor fp = factor(coeffs, Sign::plus);
  RestrictedFactor fm = factor(coeffs, Sign::minus);

  GaugeSolution sol;
  sol.pair = pair_from_factor(coeffs, fp, 1e-8);
  sol.condition = std::max(fp.sv.max / fp.sv.min, fm.sv.max / fm.sv.min);
  if (!(sol.condition <= 1e12))
    throw IllConditioned("zero-mean restriction of the fiber has condition number " +
                         std::to_string(sol.condition));

  const PeriodicScalarField Cp = C1 + I * C2, Cm = C1 - I * C2;
  auto [z1, z2] =
      solvability_quasimomentum(sol.pair, inner(sol.pair.chi_plus, Cp), inner(sol.pair.chi_minus, Cm));
  sol.k = {z1.real(), z2.real()};
  sol.kappa = {z1.imag(), z2.imag()};

  const PeriodicScalarField rp = Cp - z1 * (coeffs.G() + I * coeffs.F()) - (I * z2) * coeffs.H();
  const PeriodicScalarField rm = Cm - z1 * (coeffs.G() - I * coeffs.F()) + (I * z2) * coeffs.H();
  const int zero = g.zero_index();
  PeriodicScalarField phi_p(g, solve_zero_mean(fp, -I * rp.coeffs(), zero, sol.residual_plus));
  PeriodicScalarField phi_m(g, solve_zero_mean(fm, -I * rm.coeffs(), zero, sol.residual_minus));
  sol.defect_plus = untruncated_defect(coeffs, Sign::plus, phi_p, rp);
  sol.defect_minus = untruncated_defect(coeffs, Sign::minus, phi_m, rm);

  sol.Phi = 0.5 * (phi_p + phi_m);
  sol.Psi = (0.5 * I) * (phi_p - phi_m);
  sol.imag_Phi = sup_imag(sol.Phi);
  sol.imag_Psi = sup_imag(sol.Psi);
  sol.real_valued = sol.imag_Phi <= 1e-8 && sol.imag_Psi <= 1e-8;
  return sol;
}

CanonicalGauge solve_canonical_gauge(const CoefficientSet& coeffs) {
  const FourierGrid& g = coeffs.grid();
  GaugeSolution s = solve_gauge(coeffs, I * coeffs.H(), PeriodicScalarField(g));
  CanonicalGauge c;
  c.Phi = certify_real(-I * s.Phi, "Phi");
  c.Psi = certify_real(-I * s.Psi, "Psi");
  c.kappa_tilde = s.kappa;
  c.real_part_k = s.k.norm();
  c.pair = s.pair;
  const double pf = coeffs.bounds().p + coeffs.bounds().F_bound;
  c.c3_star = std::sqrt(c.pair.c0_lower) / pf;
  c.c3_variational = std::sqrt(c.pair.c0_variational) / pf;
  c.residual = canonical_residual(coeffs, c);
  return c;
}

double canonical_residual(const CoefficientSet& coeffs, const CanonicalGauge& c) {
  const double k1 = c.kappa_tilde[0], k2 = c.kappa_tilde[1];
  PeriodicScalarField rhs = -k1 * (coeffs.G() + I * coeffs.F()) - (I * (k2 + I)) * coeffs.H();
  return untruncated_defect(coeffs, Sign::plus, c.Phi - I * c.Psi, rhs);
}

CokernelFormulaCheck verify_cokernel_formula(const CoefficientSet& coeffs,
                                             const CanonicalGauge& canonical,
                                             const CokernelPair& pair) {
  const FourierGrid& g = coeffs.grid();
  require_same_grid(g, canonical.Psi.grid(), "verify_cokernel_formula");
  require_same_grid(g, pair.chi_plus.grid(), "verify_cokernel_formula");
  FourierGrid ext = extended(g);
  CoefficientSet ce = coeffs.regrid(ext);
  TruncatedOperator d = assemble_dpm(ce, {}, 0.0, Sign::plus, ext);
  PeriodicScalarField dpsi(ext, d.apply(canonical.Psi.regrid(ext).coeffs()));
  PeriodicScalarField num = dpsi - ce.H();
  PeriodicScalarField gh = combine_pointwise(ce.G(), ce.H(), [](cplx a, cplx b) { return a * b; });
  PeriodicScalarField f =
      combine_pointwise(num, gh, [](cplx a, cplx b) { return a / b; }).regrid(g);
  CokernelFormulaCheck out;
  const double ff = f.coeffs().squaredNorm();
  out.c6 = ff > 0.0 ? inner(f, pair.chi_plus) / ff : cplx(0.0);
  out.residual = (pair.chi_plus.coeffs() - out.c6 * f.coeffs()).norm();
  return out;
}

std::vector<cplx> z_map(const CanonicalGauge& c, const std::vector<Eigen::Vector2d>& points) {
  std::vector<cplx> out;
  out.reserve(points.size());
  for (const auto& x : points)
    out.push_back(c.Phi.evaluate(x[0], x[1]) - I * c.Psi.evaluate(x[0], x[1]) +
                  c.kappa_tilde[0] * x[0] + (c.kappa_tilde[1] + I) * x[1]);
  return out;
}

ZMapDiagnostics z_map_diagnostics(const CanonicalGauge& c, int s) {
  if (s < 2) throw std::invalid_argument("z_map_diagnostics needs at least 2 samples per axis");
  std::vector<Eigen::Vector2d> pts, e1, e2;
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      Eigen::Vector2d x(double(i) / s, double(j) / s);
      pts.push_back(x);
      e1.push_back(x + Eigen::Vector2d(1.0, 0.0));
      e2.push_back(x + Eigen::Vector2d(0.0, 1.0));
    }
  std::vector<cplx> z = z_map(c, pts), z1 = z_map(c, e1), z2 = z_map(c, e2);
  ZMapDiagnostics d;
  d.min_ratio = std::numeric_limits<double>::infinity();
  for (std::size_t a = 0; a < pts.size(); ++a)
    for (std::size_t b = a + 1; b < pts.size(); ++b)
      d.min_ratio = std::min(d.min_ratio, std::abs(z[a] - z[b]) / (pts[a] - pts[b]).norm());
  for (std::size_t a = 0; a < pts.size(); ++a) {
    d.periodicity_residual =
        std::max({d.periodicity_residual, std::abs(z1[a] - z[a] - c.kappa_tilde[0]),
                  std::abs(z2[a] - z[a] - (c.kappa_tilde[1] + I))});
  }
  return d;
}

LevelSetReport level_set_diagnostics(const PeriodicScalarField& Psi,
                                     const std::vector<double>& lambdas, double delta,
                                     int fine_resolution) {
  if (std::abs(Psi.mean()) > 1e-12)
    throw std::invalid_argument("level_set_diagnostics: Psi must have zero mean");
  if (Psi.hermitian_defect() > 1e-10 * std::max(1.0, Psi.l2_norm()))
    throw std::invalid_argument("level_set_diagnostics: Psi must be real-valued");
  if (!(delta > 0.0)) throw std::invalid_argument("level_set_diagnostics: delta must be positive");
  const int s = fine_resolution > 0 ? fine_resolution
                                    : std::max(512, 8 * Psi.grid().side());
  if (s < Psi.grid().side()) throw std::invalid_argument("fine resolution below the window size");

  std::vector<cplx> v = Psi.samples(s, s);
  std::vector<cplx> d1 = Psi.derivative(0).samples(s, s), d2 = Psi.derivative(1).samples(s, s);
  LevelSetReport r;
  r.delta = delta;
  r.lambdas = lambdas;
  r.min_gradient_quantity = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < v.size(); ++i)
    r.min_gradient_quantity =
        std::min(r.min_gradient_quantity, std::norm(d1[i].real()) + std::norm(d2[i].real() - 1.0));

  const double h = 1.0 / s;
  for (double lambda : lambdas) {
    double area = 0.0;
    for (int i = 0; i < s; ++i) {
      double len = 0.0;
      for (int j = 0; j < s; ++j) {
        // g(x2) = Psi - x2 - lambda is linear between consecutive samples;
        // Psi at x2 = 1 equals Psi at x2 = 0.
        const double g0 = v[std::size_t(i) * s + j].real() - j * h - lambda;
        const double g1 = v[std::size_t(i) * s + (j + 1) % s].real() - (j + 1) * h - lambda;
        if (g0 == g1) {
          if (std::abs(g0) < delta) len += h;
          continue;
        }
        double ta = (-delta - g0) / (g1 - g0), tb = (delta - g0) / (g1 - g0);
        if (ta > tb) std::swap(ta, tb);
        len += h * std::max(0.0, std::min(1.0, tb) - std::max(0.0, ta));
      }
      area += len * h;
    }
    r.measure.push_back(area);
  }
  return r;
}

GaugeIdentityResidual gauge_identity_residual(const CoefficientSet& coeffs,
                                              const PeriodicScalarField& C1,
                                              const PeriodicScalarField& C2,
                                              const GaugeSolution& sol, double mu,
                                              int probe_radius) {
  const FourierGrid& g = coeffs.grid();
  TruncatedOperator shifted =
      assemble_dirac(coeffs, MatrixPotential::zero(g), sol.z().scaled(mu), g);
  GaugeConjugation conj = gauge_conjugate(shifted, sol.Phi, sol.Psi, mu);
  MatrixPotential target_v(PeriodicScalarField(g), mu * C1, mu * C2, PeriodicScalarField(g));
  TruncatedOperator target = assemble_dirac(coeffs, target_v, {}, g);
  return {column_difference(conj.op, target, probe_columns(g, probe_radius)),
          conj.truncation_residual};
}

void write_gauge_solution(std::ostream& out, const GaugeSolution& s) {
  nlohmann::json j;
  j["format"] = "pdirac-gauge-solution";
  j["version"] = 1;
  j["truncation_radius"] = s.Phi.grid().radius();
  j["k"] = {s.k[0], s.k[1]};
  j["kappa"] = {s.kappa[0], s.kappa[1]};
  j["residual_plus"] = s.residual_plus;
  j["residual_minus"] = s.residual_minus;
  j["defect_plus"] = s.defect_plus;
  j["defect_minus"] = s.defect_minus;
  j["condition"] = s.condition;
  j["real_valued"] = s.real_valued;
  j["Phi"] = coefficient_list(s.Phi);
  j["Psi"] = coefficient_list(s.Psi);
  out << j.dump(2) << "\n";
}

}  // namespace pdirac
