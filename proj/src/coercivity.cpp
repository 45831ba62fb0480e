#include "pdirac/coercivity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pdirac/errors.hpp"

namespace pdirac {

namespace {

const cplx I(0.0, 1.0);

PeriodicScalarField product(const PeriodicScalarField& a, const PeriodicScalarField& b) {
  const FourierGrid g(a.grid().radius() + b.grid().radius());
  return combine_pointwise(a.regrid(g), b.regrid(g), [](cplx x, cplx y) { return x * y; });
}

double max_c7(const PeriodicScalarField& Vp, const PeriodicScalarField& Vm,
              std::vector<double>* t_grid, std::vector<double>* h2) {
  const auto pp = potential_profile(Vp, default_profile_options(Vp));
  const auto pm = potential_profile(Vm, default_profile_options(Vm));
  if (t_grid) {
    *t_grid = pp.t_grid;
    h2->clear();
    for (std::size_t i = 0; i < pp.t_grid.size(); ++i)
      h2->push_back(std::pow(std::max(pp.h_W[i], pm.h(pp.t_grid[i])), 2));
  }
  return std::max(pp.c7, pm.c7);
}

}  // namespace

double spectral_tail(const PeriodicScalarField& P, double d) {
  double s = 0.0;
  const FourierGrid& g = P.grid();
  for (int i = 0; i < g.mode_count(); ++i)
    if (kTwoPi * g.modes()[i].euclidean_norm() > d) s += std::norm(P.coeffs()[i]);
  return std::sqrt(s);
}

CoercivityRecipe coercivity_recipe(const CoefficientSet& coeffs, const PeriodicScalarField& V_plus,
                                   const PeriodicScalarField& V_minus, double c1, double c2,
                                   double a1, int J_cap) {
  if (!(c1 > 0.0) || c2 < c1) throw std::invalid_argument("coercivity_recipe: need 0 < c1 <= c2");
  if (!(a1 >= kTwoPi)) throw std::invalid_argument("coercivity_recipe: need a1 >= 2 pi");
  CoercivityRecipe r;
  r.c1 = c1;
  r.c2 = c2;
  std::vector<double> t_grid, h2;
  r.c7_prime = max_c7(V_plus, V_minus, &t_grid, &h2);
  r.c8_prime = c1 * c1 / (6.0 * (c1 + 4.0 * r.c7_prime * r.c7_prime));
  r.delta = std::min(c1 / 32.0, 1.5 * r.c8_prime);
  r.J_required = (long long)std::ceil(c2 * c2 / (r.delta * r.delta));
  r.J = int(std::min<long long>(r.J_required, J_cap));
  r.J_capped = r.J_required > J_cap;
  for (std::size_t i = 0; i < t_grid.size(); ++i)
    if (h2[i] <= r.c8_prime / 6.0) {
      r.a0_prime = t_grid[i];
      break;
    }

  const auto& G = coeffs.G();
  const auto& F = coeffs.F();
  const auto& H = coeffs.H();
  const std::vector<PeriodicScalarField> P{product(G, G) + product(F, F), product(G + I * F, H),
                                           product(G - I * F, H), product(H, H)};
  // candidate gaps: the tails only change when d crosses some 2 pi |N|
  std::vector<double> gaps{0.0};
  for (const auto& p : P)
    for (int i = 0; i < p.grid().mode_count(); ++i)
      if (p.coeffs()[i] != cplx(0.0)) gaps.push_back(kTwoPi * p.grid().modes()[i].euclidean_norm());
  std::sort(gaps.begin(), gaps.end());
  gaps.erase(std::unique(gaps.begin(), gaps.end()), gaps.end());
  const double bound = r.delta / (4.0 * std::sqrt(6.0 * kPi));

  r.a.push_back(a1);
  for (int j = 0; j < r.J; ++j) {
    const double aj = r.a.back();
    double gap = gaps.back();
    for (double d : gaps) {
      bool ok = true;
      for (const auto& p : P) ok = ok && aj * spectral_tail(p, d) <= bound;
      if (ok) {
        gap = d;
        break;
      }
    }
    r.a.push_back(aj + (gap > 0.0 ? gap : kTwoPi));
  }
  r.a_J = r.a[std::size_t(r.J) - (r.J > 0 ? 1 : 0)];
  r.tau_star = 4.0 * r.a_J * r.a_J / kPi;
  r.theta = c1 / (3.0 * 64.0 * kPi * a1 * a1 * r.tau_star);
  return r;
}

std::vector<Eigen::VectorXcd> random_spinor_trials(const FourierGrid& window, int count,
                                                   std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  const int n = window.mode_count();
  std::vector<Eigen::VectorXcd> out;
  for (int t = 0; t < count; ++t) {
    Eigen::VectorXcd v(2 * n);
    for (int b = 0; b < 2; ++b)
      for (int i = 0; i < n; ++i)
        v[b * n + i] = cplx(nd(rng), nd(rng)) / (1.0 + window.modes()[i].euclidean_norm());
    out.push_back(std::move(v));
  }
  return out;
}

CoercivityReport verify_coercivity(const CoefficientSet& coeffs, const PeriodicScalarField& Vt0,
                                   const PeriodicScalarField& Vt3, const PeriodicScalarField& Psi,
                                   double mu, double a, const Eigen::Vector2d& k,
                                   const FourierGrid& window,
                                   const std::vector<Eigen::VectorXcd>& trials,
                                   const CoercivityOptions& opts) {
  if (std::abs(k[0] - kPi) > 1e-12) throw InadmissibleParameters("coercivity needs k1 = pi");
  const double nu_real = mu / kPi;
  const int nu = int(std::lround(nu_real));
  if (nu < 1 || std::abs(nu_real - nu) > 1e-9)
    throw InadmissibleParameters("coercivity needs mu in pi N");
  if (!(a >= kTwoPi)) throw InadmissibleParameters("coercivity needs a >= 2 pi");
  if (!Psi.real_valued() && Psi.hermitian_defect() > 1e-12)
    throw std::invalid_argument("verify_coercivity: Psi must be real-valued");

  CoercivityReport r;
  r.mu = mu;
  r.a = a;
  if (a < opts.a0) r.warnings.push_back("a below the configured a0");

  const PeriodicScalarField Vp = Vt0 + Vt3.regrid(Vt0.grid());
  const PeriodicScalarField Vm = Vt0 - Vt3.regrid(Vt0.grid());
  const bool vanishing = Vp.coeffs().isZero(0.0) && Vm.coeffs().isZero(0.0);

  r.c1 = opts.c1 > 0.0 ? opts.c1 : estimate_c1_c2(coeffs, k, mu, window).c1;
  if (opts.c8 > 0.0) {
    r.c8 = opts.c8;
    r.c7_prime = 0.0;
  } else {
    r.c7_prime = max_c7(Vp, Vm, nullptr, nullptr);
    r.c8 = r.c1 * r.c1 / (6.0 * (r.c1 + 4.0 * r.c7_prime * r.c7_prime));
  }

  if (opts.check_admissibility && !vanishing) {
    const double a_track = opts.a_track > 0.0 ? opts.a_track : a;
    double theta = opts.theta;
    if (!(theta > 0.0)) {
      const double tau = 4.0 * a_track * a_track / kPi;
      theta = r.c1 / (3.0 * 64.0 * kPi * a * a * tau);
    }
    r.admissibility = scaling_admissibility(coeffs, Vp, Vm, Psi, nu, theta, a_track);
    r.admissibility_checked = true;
    if (!r.admissibility.admissible())
      r.warnings.push_back("mu / pi = " + std::to_string(nu) +
                           " lies in the estimated exceptional set");
  }

  // operator on a row window wide enough that every image of a window vector is exact
  const int re = opts.potential_radius > 0 ? opts.potential_radius : 2 * window.radius();
  const int rc = coeffs.grid().radius();
  const FourierGrid rows(window.radius() + std::max(re, rc));
  const FourierGrid eg(re);
  const auto ps = Psi.regrid(eg).samples();
  const auto vp = Vp.regrid(eg).samples();
  const auto vm = Vm.regrid(eg).samples();
  std::vector<cplx> ep(ps.size()), em(ps.size());
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const cplx ph = std::polar(1.0, 2.0 * mu * ps[i].real());
    ep[i] = ph * vp[i];
    em[i] = std::conj(ph) * vm[i];
  }
  const PeriodicScalarField Ep = sample_to_fourier(ep, eg), Em = sample_to_fourier(em, eg);
  const MatrixPotential pot((0.5 * (Ep + Em)).regrid(rows), PeriodicScalarField(rows),
                            PeriodicScalarField(rows), (0.5 * (Ep - Em)).regrid(rows));
  const TruncatedOperator op = assemble_dirac(coeffs.regrid(rows), pot,
                                              ComplexQuasimomentum::real(k[0], k[1]), rows, mu);

  const ModeWeights w(window, k, mu);
  const std::vector<int> embed = embed_indices(window, rows);
  const int n = window.mode_count(), nr = rows.mode_count();
  for (const auto& phi : trials) {
    if (phi.size() != 2 * n) throw GridMismatch("verify_coercivity: trial has the wrong size");
    Eigen::VectorXcd x = Eigen::VectorXcd::Zero(2 * nr);
    for (int b = 0; b < 2; ++b)
      for (int i = 0; i < n; ++i) x[b * nr + embed[i]] = phi[b * n + i];
    const double lhs = op.apply(x).squaredNorm();
    double inner = 0.0, outer = 0.0;
    for (int b = 0; b < 2; ++b) {
      const Eigen::VectorXd& gs = b == 0 ? w.plus() : w.minus();
      for (int i = 0; i < n; ++i) {
        const double m2 = std::norm(phi[b * n + i]);
        if (gs[i] <= a)
          inner += w.min()[i] * w.min()[i] * m2;
        else
          outer += gs[i] * gs[i] * m2;
      }
    }
    const double rhs = r.c1 / 6.0 * inner + r.c8 * outer;
    r.lhs.push_back(lhs);
    r.rhs.push_back(rhs);
    r.margins.push_back(lhs - rhs);
  }
  r.min_margin = r.margins.empty() ? 0.0 : *std::min_element(r.margins.begin(), r.margins.end());
  return r;
}

}  // namespace pdirac
