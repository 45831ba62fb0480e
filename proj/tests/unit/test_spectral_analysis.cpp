#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "pdirac/bands.hpp"
#include "pdirac/coercivity.hpp"
#include "pdirac/coker_gauge.hpp"
#include "pdirac/errors.hpp"
#include "pdirac/functionals.hpp"
#include "pdirac/wiener.hpp"
#include "random_instances.hpp"

using namespace pdirac;

namespace {

const cplx I(0.0, 1.0);

// Eigenvalues of the per-mode 2x2 blocks [[m, d_-], [d_+, -m]] of the
// constant-coefficient fiber, computed by a 2x2 Hermitian solver.
std::vector<double> per_mode_eigenvalues(const FourierGrid& g, const Eigen::Vector2d& k, double m) {
  std::vector<double> out;
  for (const Mode& n : g.modes()) {
    const double x = k[0] + kTwoPi * n.n1, y = k[1] + kTwoPi * n.n2;
    Eigen::Matrix2cd b;
    b << m, cplx(x, -y), cplx(x, y), -m;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(b);
    out.push_back(es.eigenvalues()[0]);
    out.push_back(es.eigenvalues()[1]);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// sum_N |W_N|^2 over 2 pi |N| > d, by brute force over a square.
double brute_tail(const PeriodicScalarField& W, double d) {
  double s = 0.0;
  const int m = W.grid().radius();
  for (int a = -m; a <= m; ++a)
    for (int b = -m; b <= m; ++b)
      if (kTwoPi * std::sqrt(double(a * a + b * b)) > d) s += std::norm(W.coeff({a, b}));
  return std::sqrt(s);
}

// ||W phi|| by quadrature on a fine grid (independent of the Toeplitz route).
double product_norm_quadrature(const PeriodicScalarField& W, const FourierGrid& window,
                               const Eigen::VectorXcd& phi) {
  const int s = 4 * (window.radius() + W.grid().radius()) + 8;
  const auto w = W.samples(s, s);
  const auto p = PeriodicScalarField(window, phi).samples(s, s);
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += std::norm(w[i] * p[i]);
  return std::sqrt(acc / (double(s) * s));
}

}  // namespace

TEST_CASE("free bands match +-|k + 2 pi N|") {
  FourierGrid g(4);
  auto c = CoefficientSet::constant(g);
  auto ks = brillouin_grid(4, 4);
  auto t = band_structure(c, MatrixPotential::zero(g), ks, g);
  CHECK(t.self_adjoint);
  CHECK(t.max_asymmetry < 1e-14);
  for (std::size_t i = 0; i < ks.size(); ++i) {
    auto ref = per_mode_eigenvalues(g, ks[i], 0.0);
    REQUIRE(t.values[i].size() == Eigen::Index(ref.size()));
    double err = 0.0;
    for (std::size_t j = 0; j < ref.size(); ++j) err = std::max(err, std::abs(t.values[i][j] - ref[j]));
    CHECK(err < 1e-10);
    // closed form as well
    std::vector<double> closed;
    for (const Mode& n : g.modes()) {
      const double r = std::hypot(ks[i][0] + kTwoPi * n.n1, ks[i][1] + kTwoPi * n.n2);
      closed.push_back(r);
      closed.push_back(-r);
    }
    std::sort(closed.begin(), closed.end());
    for (std::size_t j = 0; j < ref.size(); ++j) CHECK(std::abs(closed[j] - ref[j]) < 1e-12);
  }
}

TEST_CASE("mass term opens a gap") {
  FourierGrid g(3);
  auto c = CoefficientSet::constant(g);
  const double m = 0.7;
  // generic k: no ties in modulus at the selection cut
  std::vector<Eigen::Vector2d> ks{{0.3, 1.1}, {2.9, 0.2}, {0.01, 0.02}};
  BandOptions o;
  o.count = 6;
  auto t = band_structure(c, MatrixPotential::constant(g, 0, 0, 0, m), ks, g, o);
  for (std::size_t i = 0; i < ks.size(); ++i) {
    auto ref = per_mode_eigenvalues(g, ks[i], m);
    std::stable_sort(ref.begin(), ref.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
    ref.resize(6);
    std::sort(ref.begin(), ref.end());
    for (int j = 0; j < 6; ++j) CHECK(std::abs(t.values[i][j] - ref[j]) < 1e-10);
    for (int j = 0; j < 6; ++j) CHECK(std::abs(t.values[i][j]) >= m - 1e-12);
  }
  // closed form sqrt(|k|^2 + m^2) at the lowest mode
  CHECK(std::abs(t.values[2].cwiseAbs().minCoeff() - std::hypot(std::hypot(0.01, 0.02), m)) < 1e-12);
}

TEST_CASE("constants span the kernel at k = 0") {
  FourierGrid g(2);
  auto t = band_structure(CoefficientSet::constant(g), MatrixPotential::zero(g), {{0.0, 0.0}}, g);
  int zeros = 0;
  for (Eigen::Index j = 0; j < t.values[0].size(); ++j) zeros += std::abs(t.values[0][j]) < 1e-14;
  CHECK(zeros == 2);
}

TEST_CASE("band mode selection") {
  std::mt19937_64 rng(1);
  FourierGrid g(3);
  auto c = testing::random_gamma_instance(g, rng);
  auto t = band_structure(c, MatrixPotential::zero(g), {{1.0, 2.0}}, g);
  CHECK_FALSE(t.self_adjoint);
  CHECK(t.values[0].minCoeff() >= 0.0);
  CHECK(t.max_asymmetry > 1e-6);
  BandOptions sa;
  sa.mode = BandMode::self_adjoint;
  CHECK_THROWS_AS(band_structure(c, MatrixPotential::zero(g), {{1.0, 2.0}}, g, sa),
                  InadmissibleParameters);
  MatrixPotential complex_v(g);
  complex_v.V0 = PeriodicScalarField::constant(g, cplx(0.0, 1.0));
  CHECK_THROWS_AS(
      band_structure(CoefficientSet::constant(g), complex_v, {{1.0, 2.0}}, g, sa),
      InadmissibleParameters);
  CHECK_THROWS_AS(band_structure(c, MatrixPotential::zero(g), {}, g), std::invalid_argument);
}

TEST_CASE("band continuity is bounded by the fiber difference") {
  FourierGrid g(3);
  auto c = CoefficientSet::constant(g, 1.3, 0.8, 0.2);
  auto V = MatrixPotential::constant(g, 0.1, 0.2, -0.3, 0.4);
  auto ks = brillouin_grid(6, 1);
  auto t = band_structure(c, V, ks, g);
  REQUIRE(t.self_adjoint);
  for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
    Eigen::MatrixXcd a = assemble_dirac(c, V, ComplexQuasimomentum::real(ks[i][0], ks[i][1]), g).dense();
    Eigen::MatrixXcd b =
        assemble_dirac(c, V, ComplexQuasimomentum::real(ks[i + 1][0], ks[i + 1][1]), g).dense();
    const double gap = singular_values(a - b).maxCoeff();
    CHECK((t.values[i] - t.values[i + 1]).cwiseAbs().maxCoeff() <= gap + 1e-10);
  }
}

TEST_CASE("band tables do not depend on the worker count") {
  std::mt19937_64 rng(2);
  FourierGrid g(3);
  auto c = testing::random_gamma_instance(g, rng);
  auto ks = brillouin_grid(3, 3);
  BandOptions one, many;
  many.workers = 3;
  auto a = band_structure(c, MatrixPotential::zero(g), ks, g, one);
  auto b = band_structure(c, MatrixPotential::zero(g), ks, g, many);
  for (std::size_t i = 0; i < ks.size(); ++i) CHECK(a.values[i] == b.values[i]);
}

TEST_CASE("free sweep matches the diagonal symbol minimum") {
  FourierGrid g(4);
  auto c = CoefficientSet::constant(g);
  SweepSpec s;
  s.mu_tilde = linspace(0.0, 6 * kPi, 7);
  s.k2 = {0.0, 0.9, kPi};
  auto r = sigma_min_sweep(c, MatrixPotential::zero(g), s, g);
  for (std::size_t i = 0; i < s.k2.size(); ++i)
    for (std::size_t j = 0; j < s.mu_tilde.size(); ++j) {
      double best = 1e300;
      for (const Mode& n : g.modes()) {
        const double x = kPi + kTwoPi * n.n1, y = s.k2[i] + kTwoPi * n.n2;
        best = std::min({best, std::abs(cplx(x, s.mu_tilde[j] + y)),
                         std::abs(cplx(x, s.mu_tilde[j] - y))});
      }
      CHECK(std::abs(r.sigma(i, j) - best) < 1e-10);
      CHECK(r.sigma(i, j) >= kPi - 1e-10);
    }
  CHECK(r.flagged.empty());
  CHECK(r.floor.size() == 7);
  CHECK(std::abs(r.floor.minCoeff() - r.sigma.minCoeff()) == 0.0);
}

TEST_CASE("sweep positivity and kernel flags on the real axis") {
  FourierGrid g(3);
  auto c = CoefficientSet::constant(g);
  SweepSpec s;
  s.mu_tilde = {0.0};
  s.k2 = {0.4};
  s.k1 = 1.2;
  CHECK(sigma_min_sweep(c, MatrixPotential::zero(g), s, g).sigma(0, 0) > 0.1);
  s.k1 = 0.0;
  s.k2 = {0.0};
  auto r = sigma_min_sweep(c, MatrixPotential::zero(g), s, g);
  CHECK(r.sigma(0, 0) < 1e-12);
  CHECK(r.flagged.size() == 1);
  s.e = {1.0, 1.0};
  CHECK_THROWS_AS(sigma_min_sweep(c, MatrixPotential::zero(g), s, g), std::invalid_argument);
}

TEST_CASE("dense and iterative singular values agree at the crossover") {
  std::mt19937_64 rng(4);
  FourierGrid g(6);
  auto c = testing::random_gamma_instance(g, rng);
  ComplexQuasimomentum z{{kPi, 0.3}, {1.5, 0.0}};
  auto op = assemble_dirac(c, MatrixPotential::constant(g, 0, 0, 0, 0.3), z, g);
  const double d = smallest_singular_value(op, SvdMethod::dense);
  const double it = smallest_singular_value(op, SvdMethod::iterative);
  CHECK(std::abs(d - it) < 1e-8 * std::max(1.0, d));
}

TEST_CASE("floor fit recovers an exponential") {
  std::vector<double> mu = linspace(0.0, 10.0, 11);
  Eigen::VectorXd s(11);
  for (int i = 0; i < 11; ++i) s[i] = 2.0 * std::exp(-0.5 * mu[i]);
  auto f = fit_floor(mu, s);
  CHECK(f.rate == doctest::Approx(0.5));
  CHECK(f.intercept == doctest::Approx(std::log(2.0)));
  CHECK(f.points == 11);
}

TEST_CASE("c1 and c2: constant and scaled coefficients") {
  FourierGrid g(4);
  auto e = estimate_c1_c2(CoefficientSet::constant(g), {kPi, 0.3}, 0.0, g);
  CHECK(std::abs(e.c1 - 1.0) < 1e-10);
  CHECK(std::abs(e.c2 - 1.0) < 1e-10);
  auto e2 = estimate_c1_c2(CoefficientSet::constant(g), {0.7, 2.0}, 5.0, g);
  CHECK(std::abs(e2.c1 - 1.0) < 1e-10);
  CHECK(std::abs(e2.c2 - 1.0) < 1e-10);
  const double s = 1.7;
  auto e3 = estimate_c1_c2(CoefficientSet::constant(g, s, s), {kPi, 0.3}, 2.0, g);
  CHECK(std::abs(e3.c1 - s * s) < 1e-10);
  CHECK(std::abs(e3.c2 - s * s) < 1e-10);
  CHECK_THROWS_AS(estimate_c1_c2(CoefficientSet::constant(g), {0.0, 0.0}, 0.0, g), SingularWeight);
}

TEST_CASE("c1 and c2 bracket Rayleigh quotients on random instances") {
  std::mt19937_64 rng(5);
  FourierGrid g(4), big(10);
  for (int t = 0; t < 4; ++t) {
    auto c = testing::random_gamma_instance(g, rng);
    const Eigen::Vector2d k(kPi, 0.4);
    const double mu = 3.0;
    auto e = estimate_c1_c2(c, k, mu, g);
    CHECK(e.c1 > 0.0);
    CHECK(e.c1 <= e.c2);
    CHECK(e.c1_symbol <= e.c2_symbol);
    ModeWeights w(g, k, mu);
    auto embed = embed_indices(g, big);
    for (Sign sg : {Sign::plus, Sign::minus}) {
      auto op = assemble_dpm(c.regrid(big), ComplexQuasimomentum::real(k[0], k[1]), mu, sg, big);
      for (int r = 0; r < 5; ++r) {
        Eigen::VectorXcd phi = testing::random_vector(g.mode_count(), rng);
        Eigen::VectorXcd x = Eigen::VectorXcd::Zero(big.mode_count());
        for (int i = 0; i < g.mode_count(); ++i) x[embed[i]] = phi[i];
        const double q = op.apply(x).squaredNorm() /
                         std::pow(weighted_norm(phi, w, sg == Sign::plus ? NormVariant::star_plus
                                                                          : NormVariant::star_minus),
                                  2);
        CHECK(q >= e.c1 - 1e-10);
        CHECK(q <= e.c2 + 1e-10);
      }
    }
  }
}

TEST_CASE("c1 and c2 are stable when the window doubles") {
  std::mt19937_64 rng(6);
  for (int t = 0; t < 3; ++t) {
    auto c = testing::random_gamma_instance(FourierGrid(4), rng);
    auto a = estimate_c1_c2(c, {kPi, 0.3}, 0.0, FourierGrid(4));
    auto b = estimate_c1_c2(c, {kPi, 0.3}, 0.0, FourierGrid(8));
    CHECK(std::abs(b.c1 - a.c1) < 0.1 * a.c1);
    CHECK(std::abs(b.c2 - a.c2) < 0.1 * a.c2);
  }
}

TEST_CASE("profile of a constant potential") {
  FourierGrid g(2);
  const double c = 0.8;
  auto W = PeriodicScalarField::constant(g, c);
  auto o = default_profile_options(W);
  o.b_grid = {0.0, 0.5, 0.79, 0.81, 1.0};
  o.counts = {0, 1, 4, 100};
  auto p = potential_profile(W, o);
  CHECK(p.Wb_norm[0] == doctest::Approx(c));
  CHECK(p.Wb_norm[2] == doctest::Approx(c));
  CHECK(p.Wb_norm[3] == 0.0);
  CHECK(p.Wb_norm[4] == 0.0);
  CHECK(p.f_W[0] == 0.0);
  for (int i = 1; i < 4; ++i) CHECK(p.f_W[i] == doctest::Approx(c));
  for (double C : p.C_eps) CHECK(C == doctest::Approx(c).epsilon(1e-10));
  for (std::size_t i = 0; i < p.t_grid.size(); ++i)
    CHECK(p.h_W[i] == doctest::Approx(c / p.t_grid[i]).epsilon(1e-10));
  CHECK(p.c7 == doctest::Approx(1.0 + c / kPi));
}

TEST_CASE("profile of the zero potential") {
  FourierGrid g(2);
  PeriodicScalarField W(g);
  auto p = potential_profile(W, default_profile_options(W));
  for (double v : p.Wb_norm) CHECK(v == 0.0);
  for (double v : p.f_W) CHECK(v == 0.0);
  for (double v : p.C_eps) CHECK(v == 0.0);
  for (double v : p.h_W) CHECK(v == 0.0);
  for (double v : p.h_tilde) CHECK(v == 0.0);
  CHECK(p.c7 == 1.0);
}

TEST_CASE("profile monotonicity on random potentials") {
  std::mt19937_64 rng(7);
  for (int t = 0; t < 4; ++t) {
    FourierGrid g(3);
    auto W = testing::random_trig_poly(g, rng, 3, 1.0) + PeriodicScalarField::constant(g, 0.3);
    auto p = potential_profile(W, default_profile_options(W));
    for (std::size_t i = 1; i < p.Wb_norm.size(); ++i) CHECK(p.Wb_norm[i] <= p.Wb_norm[i - 1]);
    for (std::size_t i = 1; i < p.f_W.size(); ++i) CHECK(p.f_W[i] >= p.f_W[i - 1]);
    for (std::size_t i = 1; i < p.f_ratio.size(); ++i) CHECK(p.f_ratio[i] <= p.f_ratio[i - 1] + 1e-15);
    for (std::size_t i = 1; i < p.C_eps.size(); ++i) CHECK(p.C_eps[i] <= p.C_eps[i - 1]);
    for (std::size_t i = 1; i < p.h_W.size(); ++i) CHECK(p.h_W[i] <= p.h_W[i - 1]);
    for (std::size_t i = 1; i < p.h_tilde.size(); ++i) CHECK(p.h_tilde[i] <= p.h_tilde[i - 1]);
    CHECK(p.h_tilde.back() == 0.0);  // last level exceeds sup |W|
  }
}

TEST_CASE("threshold norms and f_W against brute force") {
  std::mt19937_64 rng(8);
  FourierGrid g(3);
  auto W = testing::random_trig_poly(g, rng, 3, 1.0);
  const int s = 28;
  auto samples = W.samples(s, s);
  for (double b : {0.0, 0.2, 0.5, 0.9}) {
    double acc = 0.0;
    for (auto v : samples)
      if (std::abs(v) > b) acc += std::norm(v);
    CHECK(threshold_norm(W, b, s) == doctest::Approx(std::sqrt(acc / (s * s))).epsilon(1e-12));
  }
  for (int n : {1, 10, 1000}) {
    const double exact = f_functional(W, n, s);
    double brute = 1e300;
    for (int i = 0; i <= 2000; ++i) {
      const double b = 1.01 * i / 2000;
      brute = std::min(brute, b + std::sqrt(double(n)) * threshold_norm(W, b, s));
    }
    CHECK(exact <= brute + 1e-14);
    CHECK(exact >= brute - 2e-3);
  }
}

TEST_CASE("C_eps makes the relative bound hold on the window") {
  std::mt19937_64 rng(9);
  FourierGrid wg(3), window(5);
  auto W = testing::random_trig_poly(wg, rng, 3, 1.0);
  for (double eps : {0.0, 0.05, 0.3, 1.0}) {
    const Eigen::Vector2d k(kPi, 0.0);
    const double C = relative_bound_constant(W, eps, k, window);
    for (int t = 0; t < 10; ++t) {
      Eigen::VectorXcd phi = testing::random_vector(window.mode_count(), rng);
      double grad2 = 0.0;
      for (int i = 0; i < window.mode_count(); ++i) {
        const Mode& n = window.modes()[i];
        grad2 += (std::pow(k[0] + kTwoPi * n.n1, 2) + std::pow(k[1] + kTwoPi * n.n2, 2)) *
                 std::norm(phi[i]);
      }
      const double lhs = std::pow(product_norm_quadrature(W, window, phi), 2);
      CHECK(lhs <= eps * eps * grad2 + C * C * phi.squaredNorm() + 1e-10);
    }
  }
}

TEST_CASE("relative bound consequences on random trials") {
  std::mt19937_64 rng(10);
  FourierGrid wg(2), window(6);
  auto W = testing::random_trig_poly(wg, rng, 2, 1.0);
  std::vector<double> eps{0.0, 0.01, 0.03, 0.1, 0.3, 1.0, 3.0};
  auto r = relative_bound_checks(W, {kPi, 0.2}, 4 * kPi, kTwoPi, window, eps, 40, rng);
  CHECK(r.passed());
  CHECK(r.max_ratio_inner > 0.0);
  CHECK(r.max_ratio_outer > 0.0);
  CHECK(r.c7 >= 1.0);
  CHECK_THROWS_AS(relative_bound_checks(W, {0.0, 0.2}, 4 * kPi, kTwoPi, window, eps, 1, rng),
                  InadmissibleParameters);
  CHECK_THROWS_AS(relative_bound_checks(W, {kPi, 0.2}, 2 * kPi, kTwoPi, window, eps, 1, rng),
                  InadmissibleParameters);
}

TEST_CASE("profile input validation") {
  FourierGrid g(1);
  PeriodicScalarField W(g);
  auto o = default_profile_options(W);
  o.eps_grid.clear();
  CHECK_THROWS_AS(potential_profile(W, o), std::invalid_argument);
  o = default_profile_options(W);
  o.t_grid = {0.0};
  CHECK_THROWS_AS(potential_profile(W, o), std::invalid_argument);
}

namespace {

std::vector<std::pair<Eigen::VectorXcd, Eigen::VectorXcd>> cross_trials(
    const ModeWeights& w, double a, double ap, Sign s, int count, std::mt19937_64& rng) {
  std::vector<bool> in(w.grid().mode_count()), out(w.grid().mode_count());
  for (int i = 0; i < w.grid().mode_count(); ++i) {
    in[i] = w.table(s)[i] <= a;
    out[i] = w.table(s)[i] > ap;
  }
  std::vector<std::pair<Eigen::VectorXcd, Eigen::VectorXcd>> t;
  for (int i = 0; i < count; ++i)
    t.emplace_back(random_supported_vector(out, rng), random_supported_vector(in, rng));
  return t;
}

}  // namespace

TEST_CASE("cross-term bound") {
  std::mt19937_64 rng(11);
  FourierGrid window(7);
  const double mu = 8 * kPi, a = kTwoPi, ap = 3 * kPi;
  ModeWeights w(window, {kPi, 0.3}, mu);

  SUBCASE("low-frequency W gives zero on both sides") {
    // modes with 2 pi |N| <= a' - a = pi only: the constant
    auto W = PeriodicScalarField::constant(FourierGrid(2), 0.7);
    auto r = cross_term_check(W, w, a, ap, Sign::plus, cross_trials(w, a, ap, Sign::plus, 5, rng));
    CHECK(r.tail == 0.0);
    CHECK(r.max_ratio == 0.0);
  }
  SUBCASE("zero W") {
    auto r = cross_term_check(PeriodicScalarField(FourierGrid(2)), w, a, ap, Sign::minus,
                              cross_trials(w, a, ap, Sign::minus, 5, rng));
    CHECK(r.max_ratio == 0.0);
    CHECK(r.violations == 0);
  }
  SUBCASE("random W, 100 trials") {
    auto W = testing::random_trig_poly(FourierGrid(4), rng, 4, 1.0, false);
    CHECK(brute_tail(W, ap - a) > 0.0);
    auto trials = cross_trials(w, a, ap, Sign::plus, 50, rng);
    auto more = cross_trials(w, a, ap, Sign::minus, 50, rng);
    auto rp = cross_term_check(W, w, a, ap, Sign::plus, trials);
    auto rm = cross_term_check(W, w, a, ap, Sign::minus, more);
    CHECK(rp.violations + rm.violations == 0);
    CHECK(rp.max_ratio <= 1.0);
    CHECK(rm.max_ratio <= 1.0);
    CHECK(rp.tail == doctest::Approx(brute_tail(W, ap - a)).epsilon(1e-12));
    // inner product oracle by quadrature
    const auto& [phi, psi] = trials[0];
    const int s = 2 * (window.radius() * 2 + 4) + 4;
    auto fp = PeriodicScalarField(window, phi).samples(s, s);
    auto fs = PeriodicScalarField(window, psi).samples(s, s);
    auto fw = W.samples(s, s);
    cplx q = 0.0;
    for (std::size_t i = 0; i < fp.size(); ++i) q += std::conj(fp[i]) * fw[i] * fs[i];
    q /= double(s) * s;
    CHECK(rp.ratios[0] ==
          doctest::Approx(std::abs(q) / (rp.factor * phi.norm() * psi.norm())).epsilon(1e-10));
  }
  SUBCASE("support violations") {
    auto W = testing::random_trig_poly(FourierGrid(2), rng, 2, 1.0);
    auto trials = cross_trials(w, a, ap, Sign::plus, 1, rng);
    auto bad = trials;
    std::swap(bad[0].first, bad[0].second);
    CHECK_THROWS_AS(cross_term_check(W, w, a, ap, Sign::plus, bad), SupportViolation);
    CHECK_THROWS_AS(cross_term_check(W, w, ap, a, Sign::plus, trials), SupportViolation);
    CHECK_THROWS_AS(cross_term_check(W, w, a, mu, Sign::plus, trials), SupportViolation);
  }
}

TEST_CASE("potential split") {
  std::mt19937_64 rng(12);
  FourierGrid g(3);
  MatrixPotential V(testing::random_trig_poly(g, rng, 2, 1.0), testing::random_trig_poly(g, rng, 2, 1.0),
                    testing::random_trig_poly(g, rng, 2, 1.0), testing::random_trig_poly(g, rng, 2, 1.0));
  SUBCASE("no rotation") {
    auto s = split_potential(V, 0.0, PeriodicScalarField(g));
    CHECK((s.Vt0.coeffs() - V.V0.coeffs()).norm() < 1e-13);
    CHECK((s.Vt3.coeffs() - V.V3.coeffs()).norm() < 1e-13);
    CHECK((s.V1b.coeffs() - V.V1.coeffs()).norm() < 1e-13);
    CHECK(s.Vt0.real_valued());
  }
  SUBCASE("threshold above the range") {
    auto s = split_potential(V, 1.5, PeriodicScalarField(g));
    CHECK(s.V1b.coeffs().norm() == 0.0);
    CHECK(s.V2b.coeffs().norm() == 0.0);
  }
  SUBCASE("hyperbolic identity") {
    const double c = 0.35;
    MatrixPotential one = MatrixPotential::constant(g, 1.0, 0.0, 0.0, 0.0);
    auto s = split_potential(one, 0.0, PeriodicScalarField::constant(g, c));
    CHECK(std::abs(s.Vt0.mean() - std::cosh(2 * c)) < 1e-13);
    CHECK(std::abs(s.Vt3.mean() - std::sinh(2 * c)) < 1e-13);
    auto v0 = s.Vt0.samples(), v3 = s.Vt3.samples();
    for (std::size_t i = 0; i < v0.size(); ++i) CHECK(std::abs(v0[i] * v0[i] - v3[i] * v3[i] - 1.0) < 1e-12);
  }
}

TEST_CASE("Wiener sums: orthogonality and a single resonance") {
  FourierGrid g(2);
  PeriodicScalarField zero(g);
  auto one = wiener_average(PeriodicScalarField::constant(g, 1.0), zero, 64);
  for (double a : one.A) CHECK(a < 1e-24);
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(g.mode_count());
  c[g.index({0, 1})] = 1.0;
  auto r = wiener_average(PeriodicScalarField(g, c), zero, 64);
  CHECK(std::abs(r.I_plus[0] - 1.0) < 1e-13);
  for (int n = 1; n <= 64; ++n) {
    CHECK(std::abs(r.A[n - 1] - 1.0 / n) < 1e-12);
    CHECK(std::abs(r.density_plus[n - 1] - 1.0 / n) < 1e-15);
    CHECK(r.density_minus[n - 1] == 0.0);
  }
  for (int nu = 2; nu <= 64; ++nu) CHECK(std::abs(r.I_plus[nu - 1]) < 1e-13);
}

TEST_CASE("Wiener sums agree with direct quadrature") {
  std::mt19937_64 rng(13);
  FourierGrid g(3);
  auto W = testing::random_trig_poly(g, rng, 3, 1.0, false) + PeriodicScalarField::constant(g, 0.4);
  auto Psi = testing::random_trig_poly(g, rng, 2, 0.15);
  const int N = 24;
  auto r = wiener_average(W, Psi, N);
  const int s = r.resolution;
  CHECK(r.samples_per_oscillation >= 8.0);
  auto ws = W.samples(s, s), ps = Psi.samples(s, s);
  for (int nu : {1, 2, 7, 13, 24}) {
    cplx ip = 0.0, im = 0.0;
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) {
        const std::size_t o = std::size_t(i) * s + j;
        const double ph = kTwoPi * nu * (ps[o].real() - double(j) / s);
        ip += std::polar(1.0, ph) * ws[o];
        im += std::polar(1.0, -ph) * ws[o];
      }
    ip /= double(s) * s;
    im /= double(s) * s;
    CHECK(std::abs(r.I_plus[nu - 1] - ip) < 1e-12);
    CHECK(std::abs(r.I_minus[nu - 1] - im) < 1e-12);
  }
  for (int n = 1; n <= N; ++n) {
    CHECK(r.A[n - 1] >= 0.0);
    CHECK(r.density_plus[n - 1] >= 0.0);
    CHECK(r.density_plus[n - 1] <= 1.0);
  }
}

TEST_CASE("Wiener preconditions") {
  std::mt19937_64 rng(14);
  FourierGrid g(2);
  auto W = testing::random_trig_poly(g, rng, 2, 1.0);
  PeriodicScalarField zero(g);
  WienerOptions o;
  o.resolution = 64;
  CHECK_NOTHROW(wiener_average(W, zero, 8, o));
  CHECK_THROWS_AS(wiener_average(W, zero, 9, o), ResolutionError);
  CHECK_THROWS_AS(wiener_average(W, PeriodicScalarField::constant(g, cplx(0, 1)), 4),
                  std::invalid_argument);
  CHECK_THROWS_AS(wiener_average(W, zero, 0), std::invalid_argument);
}

TEST_CASE("Wiener averages decay for a gauge-produced Psi") {
  std::mt19937_64 rng(15);
  FourierGrid g(5);
  auto can = solve_canonical_gauge(testing::random_gamma_instance(g, rng));
  auto lv = level_set_diagnostics(can.Psi, {0.0}, 1e-3);
  REQUIRE(lv.min_gradient_quantity > 0.0);
  auto W = testing::random_trig_poly(FourierGrid(3), rng, 3, 1.0);
  auto r = wiener_average(W, can.Psi, 256);
  MESSAGE("A(64) = " << r.A[63] << ", A(256) = " << r.A[255]);
  CHECK(r.A[255] < r.A[63]);
}

TEST_CASE("scaling admissibility") {
  FourierGrid g(2);
  auto c = CoefficientSet::constant(g);
  PeriodicScalarField zero(g);
  auto ok = scaling_admissibility(c, zero, zero, zero, 3, 0.1, 4 * kPi);
  CHECK(ok.admissible());
  CHECK(ok.max_plus == 0.0);
  CHECK(ok.tracked > 0);
  // V^(+) = e^{2 pi i 3 x2} resonates with e^{2 pi i 3 (Psi - x2)} at N = 0
  FourierGrid g3(3);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(g3.mode_count());
  v[g3.index({0, 3})] = 1.0;
  auto bad = scaling_admissibility(CoefficientSet::constant(g3), PeriodicScalarField(g3, v),
                                   PeriodicScalarField(g3), PeriodicScalarField(g3), 3, 0.5, 4 * kPi);
  CHECK(std::abs(bad.max_plus - 1.0) < 1e-12);
  CHECK(bad.max_minus == 0.0);
  CHECK_FALSE(bad.admissible());
}

TEST_CASE("coercivity with vanishing potentials") {
  FourierGrid window(6);
  auto c = CoefficientSet::constant(window);
  PeriodicScalarField zero(window);
  std::mt19937_64 rng(16);
  const double mu = 16 * kPi, a = 4 * kPi;
  const Eigen::Vector2d k(kPi, 0.4);
  // window must contain T^pm(a): N2 near -/+ 8
  FourierGrid big(11);
  auto trials = random_spinor_trials(big, 20, rng);
  auto r = verify_coercivity(CoefficientSet::constant(big), PeriodicScalarField(big),
                             PeriodicScalarField(big), PeriodicScalarField(big), mu, a, k, big, trials);
  CHECK(std::abs(r.c1 - 1.0) < 1e-10);
  CHECK(r.c8 == doctest::Approx(1.0 / 30.0));
  CHECK(r.passed());
  CHECK(r.min_margin >= 0.0);
  CHECK(r.warnings.empty());

  SUBCASE("single mode in T^+(a)") {
    ModeWeights w(big, k, mu);
    int idx = -1;
    for (int i = 0; i < big.mode_count(); ++i)
      if (w.plus()[i] <= a) idx = i;
    REQUIRE(idx >= 0);
    Eigen::VectorXcd phi = Eigen::VectorXcd::Zero(2 * big.mode_count());
    phi[idx] = cplx(0.6, -0.8);
    CoercivityOptions o;
    o.c1 = 1.0;
    auto s = verify_coercivity(CoefficientSet::constant(big), PeriodicScalarField(big),
                               PeriodicScalarField(big), PeriodicScalarField(big), mu, a, k, big,
                               {phi}, o);
    const double wt = w.min()[idx];
    CHECK(s.margins[0] == doctest::Approx((1.0 - 1.0 / 6.0) * wt * wt));
  }
  SUBCASE("zero trial") {
    auto s = verify_coercivity(c, zero, zero, zero, mu, a, k, window,
                               {Eigen::VectorXcd::Zero(2 * window.mode_count())});
    CHECK(s.margins[0] == 0.0);
  }
  SUBCASE("preconditions") {
    CHECK_THROWS_AS(verify_coercivity(c, zero, zero, zero, mu, a, {0.0, 0.4}, window, {}),
                    InadmissibleParameters);
    CHECK_THROWS_AS(verify_coercivity(c, zero, zero, zero, 3.5 * kPi, a, k, window, {}),
                    InadmissibleParameters);
    CHECK_THROWS_AS(verify_coercivity(c, zero, zero, zero, mu, 1.0, k, window, {}),
                    InadmissibleParameters);
  }
}

TEST_CASE("coercivity left-hand side against per-mode blocks") {
  FourierGrid window(3);
  auto c = CoefficientSet::constant(window);
  const double v0 = 0.3, v3 = 0.1, mu = 2 * kPi;
  const Eigen::Vector2d k(kPi, 0.25);
  std::mt19937_64 rng(17);
  auto trials = random_spinor_trials(window, 3, rng);
  CoercivityOptions o;
  o.c1 = 1.0;
  o.c8 = 0.1;
  o.check_admissibility = false;
  auto r = verify_coercivity(c, PeriodicScalarField::constant(window, v0),
                             PeriodicScalarField::constant(window, v3), PeriodicScalarField(window),
                             mu, kTwoPi, k, window, trials, o);
  const int n = window.mode_count();
  for (std::size_t t = 0; t < trials.size(); ++t) {
    double lhs = 0.0;
    for (int i = 0; i < n; ++i) {
      const Mode& m = window.modes()[i];
      const double x = k[0] + kTwoPi * m.n1, y = k[1] + kTwoPi * m.n2;
      const cplx dp = cplx(x, y) + I * mu, dm = cplx(x, -y) + I * mu;
      const cplx p = trials[t][i], q = trials[t][n + i];
      lhs += std::norm((v0 + v3) * p + dm * q) + std::norm(dp * p + (v0 - v3) * q);
    }
    CHECK(r.lhs[t] == doctest::Approx(lhs).epsilon(1e-12));
  }
}

TEST_CASE("coercivity recipe in the constant case") {
  FourierGrid g(2);
  auto c = CoefficientSet::constant(g);
  PeriodicScalarField zero(g);
  auto r = coercivity_recipe(c, zero, zero, 1.0, 1.0, 4 * kPi, 16);
  CHECK(r.c7_prime == 1.0);
  CHECK(r.c8_prime == doctest::Approx(1.0 / 30.0));
  CHECK(r.delta == doctest::Approx(1.0 / 32.0));
  CHECK(r.J_required == 1024);
  CHECK(r.J == 16);
  CHECK(r.J_capped);
  REQUIRE(r.a.size() == 17);
  for (std::size_t j = 1; j < r.a.size(); ++j) CHECK(r.a[j] - r.a[j - 1] == doctest::Approx(kTwoPi));
  CHECK(r.a_J == doctest::Approx(r.a[15]));
  CHECK(r.tau_star == doctest::Approx(4 * r.a_J * r.a_J / kPi));
  CHECK(r.theta == doctest::Approx(1.0 / (192 * kPi * 16 * kPi * kPi * r.tau_star)));
  CHECK(r.a0_prime > 0.0);
}

TEST_CASE("spacing of the recipe radii respects the tail condition") {
  std::mt19937_64 rng(18);
  FourierGrid g(3);
  auto c = testing::random_gamma_instance(g, rng);
  PeriodicScalarField zero(g);
  auto e = estimate_c1_c2(c, {kPi, 0.3}, 0.0, g);
  auto r = coercivity_recipe(c, zero, zero, e.c1, e.c2, 4 * kPi, 8);
  const double bound = r.delta / (4 * std::sqrt(6 * kPi));
  const FourierGrid pg(2 * g.radius());
  auto G = c.G().regrid(pg), F = c.F().regrid(pg), H = c.H().regrid(pg);
  auto prod = [&](const PeriodicScalarField& x, const PeriodicScalarField& y) {
    return combine_pointwise(x, y, [](cplx p, cplx q) { return p * q; });
  };
  std::vector<PeriodicScalarField> P{prod(G, G) + prod(F, F), prod(G + I * F, H), prod(G - I * F, H),
                                     prod(H, H)};
  for (int j = 0; j + 1 < int(r.a.size()); ++j) {
    CHECK(r.a[j + 1] > r.a[j]);
    // the gap is some 2 pi |N|; the subtraction may round just below it
    const double gap = (r.a[j + 1] - r.a[j]) * (1 + 1e-12);
    for (const auto& p : P) CHECK(r.a[j] * brute_tail(p, gap) <= bound * (1 + 1e-12));
  }
}
