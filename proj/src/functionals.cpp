#include "pdirac/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

#include "pdirac/bands.hpp"
#include "pdirac/errors.hpp"

namespace pdirac {

namespace {

int effective_radius(const PeriodicScalarField& f) {
  int r = 0;
  const auto& g = f.grid();
  for (int i = 0; i < g.mode_count(); ++i)
    if (f.coeffs()[i] != cplx(0.0)) r = std::max(r, g.modes()[i].sup_norm());
  return r;
}

// Rows: modes of the window enlarged by the radius of W; columns: window modes.
// Multiplication by W maps the window into the row set exactly.
Eigen::MatrixXcd extended_multiplication(const PeriodicScalarField& W, const FourierGrid& window) {
  const FourierGrid rows(window.radius() + effective_radius(W));
  Eigen::MatrixXcd t(rows.mode_count(), window.mode_count());
  for (int c = 0; c < window.mode_count(); ++c) {
    const Mode& nc = window.modes()[c];
    for (int r = 0; r < rows.mode_count(); ++r) t(r, c) = W.coeff(rows.modes()[r] - nc);
  }
  return t;
}

double largest_shifted_eigenvalue(const Eigen::MatrixXcd& gram, double eps,
                                  const Eigen::Vector2d& k, const FourierGrid& window) {
  Eigen::MatrixXcd q = gram;
  for (int i = 0; i < window.mode_count(); ++i) {
    const Mode& n = window.modes()[i];
    q(i, i) -= eps * eps * (std::pow(k[0] + kTwoPi * n.n1, 2) + std::pow(k[1] + kTwoPi * n.n2, 2));
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(q, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

Eigen::MatrixXcd window_gram(const PeriodicScalarField& W, const FourierGrid& window) {
  Eigen::MatrixXcd t = extended_multiplication(W, window);
  Eigen::MatrixXcd g = t.adjoint() * t;
  return 0.5 * (g + g.adjoint());
}

Eigen::Vector2d reduce(const Eigen::Vector2d& k) {
  Eigen::Vector2d r;
  for (int i = 0; i < 2; ++i) r[i] = k[i] - kTwoPi * std::floor((k[i] + kPi) / kTwoPi);
  return r;
}

// Moduli of W on an s x s grid sorted descending with running sums of squares,
// so that ||W_b||^2 = prefix[count(|W| > b)] / s^2.
struct SortedModuli {
  std::vector<double> v;
  std::vector<double> prefix;
  double scale = 1.0;

  SortedModuli(const PeriodicScalarField& W, int s) {
    auto samples = W.samples(s, s);
    v.resize(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) v[i] = std::abs(samples[i]);
    std::sort(v.begin(), v.end(), std::greater<>());
    prefix.assign(v.size() + 1, 0.0);
    for (std::size_t i = 0; i < v.size(); ++i) prefix[i + 1] = prefix[i] + v[i] * v[i];
    scale = 1.0 / (double(s) * s);
  }

  double norm_above(double b) const {
    // number of entries strictly greater than b
    auto it = std::lower_bound(v.begin(), v.end(), b, std::greater<>());
    const std::size_t n = std::size_t(it - v.begin());
    return std::sqrt(prefix[n] * scale);
  }

  double f(int count) const {
    // candidates b = 0 and b = each sample modulus; between them b + sqrt(n)||W_b|| increases
    const double r = std::sqrt(double(std::max(count, 0)));
    double best = r * norm_above(0.0);
    // ascending, so the first candidate above the running best ends the search
    for (std::size_t i = v.size(); i-- > 0;) {
      if (i + 1 < v.size() && v[i] == v[i + 1]) continue;
      if (v[i] >= best) break;
      best = std::min(best, v[i] + r * norm_above(v[i]));
    }
    return best;
  }
};

int profile_resolution(const PeriodicScalarField& W, int requested) {
  const int s = requested > 0 ? requested : 4 * W.grid().side();
  if (s < W.grid().side())
    throw std::invalid_argument("profile sample resolution below 2M + 1");
  return s;
}

double min_over_eps(const std::vector<double>& eps, const std::vector<double>& C, double t) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < eps.size(); ++i) best = std::min(best, eps[i] + C[i] / t);
  return best;
}

double h_tilde_value(double wb, const std::vector<double>& eps, const std::vector<double>& C) {
  const double alpha = std::sqrt(6.0 / kPi) * wb;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < eps.size(); ++i) {
    double v;
    if (alpha == 0.0) {
      v = eps[i];  // a -> infinity
    } else {
      const double a = std::max(kTwoPi, std::sqrt(C[i] / alpha));
      v = alpha * a + eps[i] + C[i] / a;
    }
    best = std::min(best, v);
  }
  return best;
}

}  // namespace

EstimateConstants estimate_c1_c2(const CoefficientSet& coeffs, const Eigen::Vector2d& k, double mu,
                                 const FourierGrid& grid) {
  const int rc = std::max({effective_radius(coeffs.F()), effective_radius(coeffs.G()),
                           effective_radius(coeffs.H())});
  const FourierGrid ext(grid.radius() + rc);
  const CoefficientSet c = coeffs.regrid(ext);
  const std::vector<int> cols = embed_indices(grid, ext);
  const ModeWeights w(grid, k, mu);

  EstimateConstants out;
  for (Sign s : {Sign::plus, Sign::minus}) {
    const Eigen::VectorXd& g = w.table(s);
    if (g.minCoeff() == 0.0)
      throw SingularWeight("estimate_c1_c2: weight G^" + std::string(s == Sign::plus ? "+" : "-") +
                           "_N vanishes in the window");
    Eigen::MatrixXcd b = assemble_dpm(c, ComplexQuasimomentum::real(k[0], k[1]), mu, s, ext)
                             .dense_columns(cols);
    b = b * g.cwiseInverse().asDiagonal();
    Eigen::MatrixXcd gram = b.adjoint() * b;
    gram = 0.5 * (gram + gram.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(gram, Eigen::EigenvaluesOnly);
    const double lo = std::max(0.0, es.eigenvalues().minCoeff());
    const double hi = es.eigenvalues().maxCoeff();
    if (s == Sign::plus) {
      out.c1_plus = lo;
      out.c2_plus = hi;
    } else {
      out.c1_minus = lo;
      out.c2_minus = hi;
    }
  }
  std::tie(out.c1_symbol, out.c2_symbol) = symbol_extremes(coeffs);
  out.c1 = std::min({out.c1_plus, out.c1_minus, out.c1_symbol});
  out.c2 = std::max({out.c2_plus, out.c2_minus, out.c2_symbol});
  return out;
}

std::pair<double, double> symbol_extremes(const CoefficientSet& coeffs, int resolution) {
  const int s = resolution > 0 ? resolution : std::max(64, 8 * coeffs.grid().side());
  const auto G = coeffs.G().samples(s, s), F = coeffs.F().samples(s, s),
             H = coeffs.H().samples(s, s);
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < G.size(); ++i) {
    const double g = G[i].real(), f = F[i].real(), h = H[i].real();
    const double a = g * g + f * f, b = f * h, d = h * h;
    const double mid = 0.5 * (a + d), rad = std::hypot(0.5 * (a - d), b);
    lo = std::min(lo, mid - rad);
    hi = std::max(hi, mid + rad);
  }
  return {std::max(lo, 0.0), hi};
}

double relative_bound_constant(const PeriodicScalarField& W, double eps, const Eigen::Vector2d& k,
                               const FourierGrid& window) {
  return largest_shifted_eigenvalue(window_gram(W, window), eps, k, window);
}

ProfileOptions default_profile_options(const PeriodicScalarField& W) {
  ProfileOptions o;
  const double top = 1.1 * W.sup_norm();
  o.b_grid = linspace(0.0, top, 33);
  for (int n = 1; n <= 4096; n *= 2) o.counts.push_back(n);
  o.eps_grid.push_back(0.0);
  for (int e = -12; e <= 4; ++e) o.eps_grid.push_back(std::pow(10.0, e / 4.0));
  for (int p = 0; p <= 10; ++p) o.t_grid.push_back(kTwoPi * std::pow(2.0, p));
  return o;
}

double PotentialProfile::h(double t) const { return min_over_eps(eps_grid, C_eps, t); }

double PotentialProfile::h_tilde_at(double b) const {
  const SortedModuli m(W, resolution);
  return h_tilde_value(m.norm_above(b), eps_grid, C_eps);
}

PotentialProfile potential_profile(const PeriodicScalarField& W, const ProfileOptions& opts) {
  if (opts.b_grid.empty() || opts.counts.empty() || opts.eps_grid.empty() || opts.t_grid.empty() ||
      opts.kpoints.empty())
    throw std::invalid_argument("potential_profile: empty grid");
  for (double b : opts.b_grid)
    if (b < 0.0) throw std::invalid_argument("potential_profile: negative level");
  for (double e : opts.eps_grid)
    if (e < 0.0) throw std::invalid_argument("potential_profile: negative eps");
  for (double t : opts.t_grid)
    if (!(t > 0.0)) throw std::invalid_argument("potential_profile: t must be positive");
  for (int n : opts.counts)
    if (n < 0) throw std::invalid_argument("potential_profile: negative count");

  PotentialProfile p;
  p.options = opts;
  p.W = W;
  p.resolution = profile_resolution(W, opts.sample_resolution);
  const SortedModuli m(W, p.resolution);

  p.b_grid = opts.b_grid;
  std::sort(p.b_grid.begin(), p.b_grid.end());
  for (double b : p.b_grid) p.Wb_norm.push_back(m.norm_above(b));

  p.counts = opts.counts;
  std::sort(p.counts.begin(), p.counts.end());
  for (int n : p.counts) {
    p.f_W.push_back(m.f(n));
    p.f_ratio.push_back(n > 0 ? p.f_W.back() / std::sqrt(double(n)) : 0.0);
  }

  const FourierGrid window(opts.window_radius > 0 ? opts.window_radius
                                                  : std::max(4, effective_radius(W)));
  const Eigen::MatrixXcd gram = window_gram(W, window);
  auto C_at = [&](double eps) {
    double c = 0.0;
    for (const auto& k : opts.kpoints)
      c = std::max(c, largest_shifted_eigenvalue(gram, eps, k, window));
    return c;
  };
  p.eps_grid = opts.eps_grid;
  std::sort(p.eps_grid.begin(), p.eps_grid.end());
  for (double e : p.eps_grid) p.C_eps.push_back(C_at(e));
  // nonincreasing in eps; guard against rounding in the eigensolver
  for (std::size_t i = 1; i < p.C_eps.size(); ++i)
    p.C_eps[i] = std::min(p.C_eps[i], p.C_eps[i - 1]);

  p.t_grid = opts.t_grid;
  std::sort(p.t_grid.begin(), p.t_grid.end());
  for (double t : p.t_grid) p.h_W.push_back(p.h(t));
  for (double wb : p.Wb_norm) p.h_tilde.push_back(h_tilde_value(wb, p.eps_grid, p.C_eps));

  p.C_1 = C_at(1.0);
  p.c7 = 1.0 + p.C_1 / kPi;
  return p;
}

double threshold_norm(const PeriodicScalarField& W, double b, int resolution) {
  return SortedModuli(W, profile_resolution(W, resolution)).norm_above(b);
}

double f_functional(const PeriodicScalarField& W, int count, int resolution) {
  return SortedModuli(W, profile_resolution(W, resolution)).f(count);
}

Eigen::VectorXcd random_supported_vector(const std::vector<bool>& mask, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(Eigen::Index(mask.size()));
  for (std::size_t i = 0; i < mask.size(); ++i)
    if (mask[i]) v[Eigen::Index(i)] = cplx(nd(rng), nd(rng));
  return v;
}

RelativeBoundReport relative_bound_checks(const PeriodicScalarField& W, const Eigen::Vector2d& k,
                                          double mu, double a, const FourierGrid& window,
                                          const std::vector<double>& eps_grid, int trials,
                                          std::mt19937_64& rng) {
  if (std::abs(k[0] - kPi) > 1e-12) throw InadmissibleParameters("relative bounds need k1 = pi");
  if (!(mu >= 4.0 * kPi)) throw InadmissibleParameters("relative bounds need mu >= 4 pi");
  if (!(a >= kTwoPi && a <= mu / 2))
    throw InadmissibleParameters("relative bounds need 2 pi <= a <= mu / 2");
  if (eps_grid.empty()) throw std::invalid_argument("relative_bound_checks: empty eps grid");

  const Eigen::MatrixXcd gram = window_gram(W, window);
  const Eigen::Vector2d e2(0.0, 1.0);
  // both the literal and the lattice-reduced quasimomentum; the larger C is still valid
  auto C_over = [&](double eps, const std::vector<Eigen::Vector2d>& ks) {
    double c = 0.0;
    for (const auto& q : ks) {
      c = std::max(c, largest_shifted_eigenvalue(gram, eps, q, window));
      c = std::max(c, largest_shifted_eigenvalue(gram, eps, reduce(q), window));
    }
    return c;
  };
  const std::vector<Eigen::Vector2d> shifted{k + mu * e2, k - mu * e2};
  const std::vector<Eigen::Vector2d> plain{k};
  std::vector<double> C_shift, C_plain;
  for (double e : eps_grid) {
    C_shift.push_back(C_over(e, shifted));
    C_plain.push_back(C_over(e, plain));
  }

  RelativeBoundReport r;
  r.c7 = 1.0 + C_over(1.0, shifted) / kPi;
  r.h_a = min_over_eps(eps_grid, C_shift, a);
  r.h_mu = min_over_eps(eps_grid, C_plain, mu);
  r.trials = trials;

  const ModeWeights w(window, k, mu);
  const Eigen::MatrixXcd t = extended_multiplication(W, window);
  const int n = window.mode_count();
  std::vector<bool> inner_p(n), inner_m(n), shell_p(n), shell_m(n), outer(n);
  for (int i = 0; i < n; ++i) {
    inner_p[i] = w.plus()[i] <= mu / 2;
    inner_m[i] = w.minus()[i] <= mu / 2;
    shell_p[i] = inner_p[i] && w.plus()[i] > a;
    shell_m[i] = inner_m[i] && w.minus()[i] > a;
    outer[i] = !inner_p[i] && !inner_m[i];
  }
  auto ratio = [&](const std::vector<bool>& mask, double constant) {
    Eigen::VectorXcd phi = random_supported_vector(mask, rng);
    const double rhs = constant * weighted_norm(phi, w, NormVariant::star);
    const double lhs = (t * phi).norm();
    if (rhs == 0.0) return lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return lhs / rhs;
  };
  for (int i = 0; i < trials; ++i) {
    const bool plus = i % 2 == 0;
    r.max_ratio_inner = std::max(r.max_ratio_inner, ratio(plus ? inner_p : inner_m, r.c7));
    r.max_ratio_shell = std::max(r.max_ratio_shell, ratio(plus ? shell_p : shell_m, r.h_a));
    r.max_ratio_outer = std::max(r.max_ratio_outer, ratio(outer, 3.0 * r.h_mu));
  }
  return r;
}

CrossTermReport cross_term_check(
    const PeriodicScalarField& W, const ModeWeights& weights, double a, double a_prime, Sign sign,
    const std::vector<std::pair<Eigen::VectorXcd, Eigen::VectorXcd>>& trials) {
  const double mu = weights.mu();
  if (!(kTwoPi <= a && a < a_prime && a_prime <= mu / 2))
    throw SupportViolation("cross-term check needs 2 pi <= a < a' <= mu / 2");
  const FourierGrid& g = weights.grid();
  const Eigen::VectorXd& G = weights.table(sign);
  const int n = g.mode_count();

  CrossTermReport r;
  double tail2 = 0.0;
  for (int i = 0; i < W.grid().mode_count(); ++i)
    if (kTwoPi * W.grid().modes()[i].euclidean_norm() > a_prime - a)
      tail2 += std::norm(W.coeffs()[i]);
  r.tail = std::sqrt(tail2);
  r.factor = std::sqrt(6.0 * kPi) * a * r.tail;

  for (const auto& [phi, psi] : trials) {
    if (phi.size() != n || psi.size() != n)
      throw GridMismatch("cross_term_check: trial vectors do not match the weights grid");
    for (int i = 0; i < n; ++i) {
      if (G[i] <= a_prime && phi[i] != cplx(0.0))
        throw SupportViolation("phi has a coefficient inside T(a')");
      if (G[i] > a && psi[i] != cplx(0.0))
        throw SupportViolation("psi has a coefficient outside T(a)");
    }
    cplx ip = 0.0;
    for (int c = 0; c < n; ++c) {
      if (psi[c] == cplx(0.0)) continue;
      const Mode& nc = g.modes()[c];
      for (int rr = 0; rr < n; ++rr)
        if (phi[rr] != cplx(0.0)) ip += std::conj(phi[rr]) * W.coeff(g.modes()[rr] - nc) * psi[c];
    }
    const double lhs = std::abs(ip);
    const double rhs = r.factor * phi.norm() * psi.norm();
    double q;
    if (rhs > 0.0)
      q = lhs / rhs;
    else
      q = lhs <= 1e-13 * W.l2_norm() * phi.norm() * psi.norm() ? 0.0
                                                                : std::numeric_limits<double>::infinity();
    r.ratios.push_back(q);
    r.max_ratio = std::max(r.max_ratio, q);
    if (q > 1.0 + 1e-12) ++r.violations;
  }
  return r;
}

PeriodicScalarField threshold_part(const PeriodicScalarField& W, double b) {
  auto s = W.samples();
  for (auto& v : s)
    if (!(std::abs(v) > b)) v = 0.0;
  auto out = sample_to_fourier(s, W.grid());
  return W.real_valued() ? out.as_real(1e-10) : out;
}

SplitPotential split_potential(const MatrixPotential& V, double b,
                               const PeriodicScalarField& psi_prime) {
  const FourierGrid& g = V.grid();
  const auto v0 = V.V0.samples(), v3 = V.V3.samples();
  const auto ps = psi_prime.regrid(g).samples();
  std::vector<cplx> t0(v0.size()), t3(v0.size());
  for (std::size_t i = 0; i < v0.size(); ++i) {
    const cplx c = std::cosh(2.0 * ps[i]), s = std::sinh(2.0 * ps[i]);
    t0[i] = v0[i] * c + v3[i] * s;
    t3[i] = v0[i] * s + v3[i] * c;
  }
  SplitPotential out;
  out.V1b = threshold_part(V.V1, b);
  out.V2b = threshold_part(V.V2, b);
  out.Vt0 = sample_to_fourier(t0, g);
  out.Vt3 = sample_to_fourier(t3, g);
  if (V.V0.real_valued() && V.V3.real_valued() && psi_prime.real_valued()) {
    out.Vt0 = out.Vt0.as_real(1e-10);
    out.Vt3 = out.Vt3.as_real(1e-10);
  }
  return out;
}

}  // namespace pdirac
