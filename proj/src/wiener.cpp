#include "pdirac/wiener.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pdirac/errors.hpp"
#include "pdirac/fft.hpp"

namespace pdirac {

namespace {

int round_up(int v, int m) { return (v + m - 1) / m * m; }

int next_pow2(int v) {
  int p = 1;
  while (p < v) p *= 2;
  return p;
}

// Row-by-row synthesis on an s x s grid without holding all samples:
// row(i) returns the values at x = (i / s, j / s), j = 0..s-1.
class RowSynthesizer {
 public:
  RowSynthesizer(const PeriodicScalarField& f, int s) : f_(f), s_(s), row_(s) {
    const int m = f.grid().radius();
    e1_.resize(2 * m + 1);
  }

  const std::vector<cplx>& row(int i) {
    const FourierGrid& g = f_.grid();
    const int m = g.radius();
    const double x1 = double(i) / s_;
    for (int a = -m; a <= m; ++a) e1_[a + m] = std::polar(1.0, kTwoPi * a * x1);
    std::fill(row_.begin(), row_.end(), cplx(0.0));
    for (int idx = 0; idx < g.mode_count(); ++idx) {
      const cplx c = f_.coeffs()[idx];
      if (c == cplx(0.0)) continue;
      const Mode& n = g.modes()[idx];
      row_[((n.n2 % s_) + s_) % s_] += c * e1_[n.n1 + m];
    }
    fft::transform_1d(row_.data(), s_, +1);
    return row_;
  }

 private:
  const PeriodicScalarField& f_;
  int s_;
  std::vector<cplx> row_;
  std::vector<cplx> e1_;
};

void require_real_psi(const PeriodicScalarField& Psi) {
  if (!Psi.real_valued() && Psi.hermitian_defect() > 1e-12)
    throw std::invalid_argument("Psi must be real-valued");
}

}  // namespace

double phase_gradient(const PeriodicScalarField& Psi) {
  const int s = std::max(64, 8 * Psi.grid().side());
  const auto d1 = Psi.derivative(0).samples(s, s);
  const auto d2 = Psi.derivative(1).samples(s, s);
  double g = 0.0;
  for (std::size_t i = 0; i < d1.size(); ++i)
    g = std::max({g, std::abs(d1[i].real()), std::abs(d2[i].real() - 1.0)});
  return g;
}

int required_resolution(const PeriodicScalarField& Psi, int nu, double samples_per_oscillation) {
  return int(std::ceil(samples_per_oscillation * nu * phase_gradient(Psi)));
}

WienerReport wiener_average(const PeriodicScalarField& W, const PeriodicScalarField& Psi, int N_max,
                            const WienerOptions& opts) {
  if (N_max < 1) throw std::invalid_argument("wiener_average: N_max must be positive");
  if (!(opts.theta > 0.0)) throw std::invalid_argument("wiener_average: theta must be positive");
  if (opts.taylor_terms < 1) throw std::invalid_argument("wiener_average: no Taylor terms");
  require_real_psi(Psi);

  WienerReport r;
  r.N_max = N_max;
  r.theta = opts.theta;
  r.phase_gradient = phase_gradient(Psi);
  const int floor_side = std::max(W.grid().side(), Psi.grid().side());
  const int needed = std::max(
      int(std::ceil(opts.samples_per_oscillation * N_max * r.phase_gradient)), floor_side);
  int s = opts.resolution;
  if (s > 0) {
    if (s < needed)
      throw ResolutionError("quadrature side " + std::to_string(s) + " below required " +
                            std::to_string(needed));
  } else {
    s = round_up(needed, 8);
  }
  r.resolution = s;
  r.samples_per_oscillation =
      r.phase_gradient > 0.0 ? s / (N_max * r.phase_gradient) : std::numeric_limits<double>::infinity();

  const int L = next_pow2(std::max(16, 8 * N_max));
  const int P = opts.taylor_terms;
  r.bins = L;
  // bins[m * P + p] = sum over samples in bin m of w * d^p, d = L t - m in [-1/2, 1/2]
  std::vector<cplx> bins(std::size_t(L) * P, cplx(0.0));
  RowSynthesizer psi_rows(Psi, s), w_rows(W, s);
  const double weight = 1.0 / (double(s) * s);
  for (int i = 0; i < s; ++i) {
    const auto psi = psi_rows.row(i);
    const auto& w = w_rows.row(i);
    for (int j = 0; j < s; ++j) {
      double t = psi[j].real() - double(j) / s;
      t -= std::floor(t);
      const double u = t * L;
      const double m = std::nearbyint(u);
      const double d = u - m;
      const int bin = int(m) % L;
      cplx* b = &bins[std::size_t(bin) * P];
      cplx term = w[j] * weight;
      for (int p = 0; p < P; ++p) {
        b[p] += term;
        term *= d;
      }
    }
  }

  std::vector<std::vector<cplx>> fp(P, std::vector<cplx>(L)), fm(P, std::vector<cplx>(L));
  for (int p = 0; p < P; ++p) {
    for (int m = 0; m < L; ++m) fp[p][m] = bins[std::size_t(m) * P + p];
    fm[p] = fp[p];
    fft::transform_1d(fp[p].data(), L, +1);
    fft::transform_1d(fm[p].data(), L, -1);
  }
  std::vector<double> inv_fact(P, 1.0);
  for (int p = 1; p < P; ++p) inv_fact[p] = inv_fact[p - 1] / p;

  r.I_plus.resize(N_max);
  r.I_minus.resize(N_max);
  for (int nu = 1; nu <= N_max; ++nu) {
    const cplx x(0.0, kTwoPi * nu / L);
    cplx sp = 0.0, sm = 0.0;
    for (int p = P - 1; p >= 0; --p) {
      sp = sp * x + inv_fact[p] * fp[p][nu % L];
      sm = sm * (-x) + inv_fact[p] * fm[p][nu % L];
    }
    r.I_plus[nu - 1] = sp;
    r.I_minus[nu - 1] = sm;
  }

  double acc = 0.0;
  int cp = 0, cm = 0;
  for (int n = 1; n <= N_max; ++n) {
    acc += std::norm(r.I_plus[n - 1]);
    if (std::abs(r.I_plus[n - 1]) >= opts.theta) ++cp;
    if (std::abs(r.I_minus[n - 1]) >= opts.theta) ++cm;
    r.A.push_back(acc / n);
    r.density_plus.push_back(double(cp) / n);
    r.density_minus.push_back(double(cm) / n);
  }
  return r;
}

ScalingAdmissibility scaling_admissibility(const CoefficientSet& coeffs,
                                           const PeriodicScalarField& V_plus,
                                           const PeriodicScalarField& V_minus,
                                           const PeriodicScalarField& Psi, int nu, double theta,
                                           double a_J, double samples_per_oscillation) {
  if (nu < 1) throw std::invalid_argument("scaling_admissibility: nu must be positive");
  require_real_psi(Psi);
  const int nmax = int(std::ceil(a_J / kPi));
  const int band = std::max({coeffs.grid().radius() * 2 + V_plus.grid().radius(),
                             coeffs.grid().radius() * 2 + V_minus.grid().radius(), 1});
  const int s = round_up(std::max(required_resolution(Psi, nu, samples_per_oscillation),
                                  2 * (2 * (band + nmax) + 1)),
                         8);

  ScalingAdmissibility out;
  out.nu = nu;
  out.theta = theta;
  out.resolution = s;
  const auto G = coeffs.G().samples(s, s), F = coeffs.F().samples(s, s), H = coeffs.H().samples(s, s);
  const auto ps = Psi.samples(s, s);
  for (int sg : {+1, -1}) {
    const auto V = (sg > 0 ? V_plus : V_minus).samples(s, s);
    double& worst = sg > 0 ? out.max_plus : out.max_minus;
    for (int kind = 0; kind < 2; ++kind) {
      std::vector<cplx> f(std::size_t(s) * s);
      for (int i = 0; i < s; ++i)
        for (int j = 0; j < s; ++j) {
          const std::size_t o = std::size_t(i) * s + j;
          const cplx P = kind == 0 ? (G[o] + double(sg) * cplx(0.0, 1.0) * F[o]) * V[o] : H[o] * V[o];
          const double phase = sg * kTwoPi * nu * (ps[o].real() - double(j) / s);
          f[o] = P * std::polar(1.0, phase) / (double(s) * s);
        }
      // entry at -N of the forward transform is int f e^{2 pi i (N, x)}
      fft::transform_2d(f.data(), s, s, -1);
      int count = 0;
      for (int n1 = -nmax; n1 <= nmax; ++n1)
        for (int n2 = -nmax; n2 <= nmax; ++n2) {
          if (!(kPi * std::hypot(n1, n2) < a_J)) continue;
          ++count;
          const int r1 = ((-n1) % s + s) % s, r2 = ((-n2) % s + s) % s;
          worst = std::max(worst, std::abs(f[std::size_t(r1) * s + r2]));
        }
      out.tracked = 2 * count;
    }
  }
  return out;
}

}  // namespace pdirac
