#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "pdirac/coefficient_set.hpp"
#include "pdirac/errors.hpp"
#include "pdirac/field_io.hpp"
#include "pdirac/mode_weights.hpp"
#include "random_instances.hpp"

using namespace pdirac;

namespace {

// Naive DFT coefficient, independent of the FFT path.
cplx direct_coefficient(const std::function<cplx(double, double)>& f, int s, Mode n) {
  cplx sum = 0.0;
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) {
      double x1 = double(i) / s, x2 = double(j) / s;
      sum += f(x1, x2) * std::polar(1.0, -kTwoPi * (n.n1 * x1 + n.n2 * x2));
    }
  return sum / double(s * s);
}

// Coefficients of the exact product of two window-limited fields, restricted
// to the window, by direct double summation.
Eigen::VectorXcd direct_product(const PeriodicScalarField& a, const PeriodicScalarField& b) {
  const FourierGrid& g = a.grid();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(g.mode_count());
  for (int i = 0; i < g.mode_count(); ++i)
    for (int j = 0; j < g.mode_count(); ++j) {
      Mode n = g.modes()[i] + g.modes()[j];
      if (g.contains(n)) out[g.index(n)] += a.coeffs()[i] * b.coeffs()[j];
    }
  return out;
}

}  // namespace

TEST_CASE("grid indexing is lexicographic and reflection-compatible") {
  FourierGrid g(3);
  CHECK(g.mode_count() == 49);
  CHECK(g.resolution() == 14);
  CHECK(g.mode(g.zero_index()) == Mode{0, 0});
  CHECK(g.index({-3, -3}) == 0);
  CHECK(g.index({-3, -2}) == 1);
  CHECK(g.index({-2, -3}) == 7);
  for (int i = 0; i < g.mode_count(); ++i) {
    CHECK(g.index(g.mode(i)) == i);
    CHECK(g.mode(g.reflected_index(i)) == -g.mode(i));
  }
  CHECK_THROWS_AS(g.index({4, 0}), std::out_of_range);
  CHECK_THROWS_AS(FourierGrid(3, 13), std::invalid_argument);
  CHECK_NOTHROW(FourierGrid(3, 32));
}

TEST_CASE("sample_to_fourier on trivial and quadrature oracles") {
  FourierGrid g(3, 16);
  SUBCASE("constant") {
    auto f = PeriodicScalarField::from_function(g, [](double, double) { return cplx(1.0); });
    for (int i = 0; i < g.mode_count(); ++i)
      CHECK(std::abs(f.coeffs()[i] - (i == g.zero_index() ? 1.0 : 0.0)) < 1e-15);
  }
  SUBCASE("single mode") {
    auto f = PeriodicScalarField::from_function(
        g, [](double x1, double) { return std::polar(1.0, kTwoPi * x1); });
    for (int i = 0; i < g.mode_count(); ++i)
      CHECK(std::abs(f.coeffs()[i] - (g.mode(i) == Mode{1, 0} ? 1.0 : 0.0)) < 1e-14);
  }
  SUBCASE("cos(2 pi x2) against direct quadrature") {
    auto fn = [](double, double x2) { return cplx(std::cos(kTwoPi * x2)); };
    auto f = PeriodicScalarField::from_function(g, fn);
    for (const Mode& n : g.modes()) {
      cplx oracle = direct_coefficient(fn, 16, n);
      CHECK(std::abs(f.coeff(n) - oracle) < 1e-14);
    }
    CHECK(std::abs(f.coeff({0, 1}) - 0.5) < 1e-14);
    CHECK(std::abs(f.coeff({0, -1}) - 0.5) < 1e-14);
  }
  SUBCASE("dimension mismatch") {
    std::vector<cplx> bad(15 * 15);
    CHECK_THROWS_AS(sample_to_fourier(bad, g), GridMismatch);
  }
}

TEST_CASE("sampling round trip and Parseval on random band-limited fields") {
  std::mt19937_64 rng(11);
  for (int m : {1, 4, 7}) {
    FourierGrid g(m);
    for (int t = 0; t < 5; ++t) {
      PeriodicScalarField f(g, testing::random_vector(g.mode_count(), rng));
      auto back = sample_to_fourier(fourier_to_sample(f), g);
      CHECK((back.coeffs() - f.coeffs()).norm() < 1e-12 * f.l2_norm());
      CHECK(std::abs(f.l2_norm() - f.quadrature_l2_norm()) < 1e-10 * f.l2_norm());
      auto x = Eigen::Vector2d(0.123, 0.77);
      cplx direct = 0.0;
      for (int i = 0; i < g.mode_count(); ++i)
        direct += f.coeffs()[i] *
                  std::polar(1.0, kTwoPi * (g.mode(i).n1 * x[0] + g.mode(i).n2 * x[1]));
      CHECK(std::abs(f.evaluate(x[0], x[1]) - direct) < 1e-12 * f.l2_norm());
    }
  }
}

TEST_CASE("anisotropic sampling agrees with evaluation") {
  std::mt19937_64 rng(3);
  FourierGrid g(2);
  PeriodicScalarField f(g, testing::random_vector(g.mode_count(), rng));
  auto v = f.samples(7, 12);
  CHECK(std::abs(v[3 * 12 + 5] - f.evaluate(3.0 / 7, 5.0 / 12)) < 1e-12);
  CHECK_THROWS(f.samples(4, 12));
}

TEST_CASE("convolve oracles") {
  FourierGrid g(3);
  std::mt19937_64 rng(5);
  PeriodicScalarField b(g, testing::random_vector(g.mode_count(), rng));
  SUBCASE("identity") {
    auto one = PeriodicScalarField::constant(g, 1.0);
    CHECK((convolve(one, b).coeffs() - b.coeffs()).norm() < 1e-13);
  }
  SUBCASE("inverse modes") {
    auto e = PeriodicScalarField::from_function(g, [](double x1, double) { return std::polar(1.0, kTwoPi * x1); });
    auto ei = e.conj();
    auto p = convolve(e, ei);
    CHECK((p.coeffs() - PeriodicScalarField::constant(g, 1.0).coeffs()).norm() < 1e-14);
  }
  SUBCASE("double angle, kept iff M >= 2") {
    for (int m : {1, 2, 3}) {
      FourierGrid gm(m);
      auto c = PeriodicScalarField::from_function(gm, [](double x1, double) { return cplx(std::cos(kTwoPi * x1)); })
                   .as_real();
      auto p = convolve(c, c);
      Eigen::VectorXcd oracle = direct_product(c, c);
      CHECK((p.coeffs() - oracle).norm() < 1e-14);
      CHECK(std::abs(p.coeff({0, 0}) - 0.5) < 1e-14);
      CHECK(std::abs(p.coeff({2, 0}) - (m >= 2 ? 0.25 : 0.0)) < 1e-14);
      CHECK(p.real_valued());
    }
  }
  SUBCASE("random factors against direct summation") {
    PeriodicScalarField a(g, testing::random_vector(g.mode_count(), rng));
    CHECK((convolve(a, b).coeffs() - direct_product(a, b)).norm() < 1e-12);
    CHECK((multiply_coefficients(a, b.coeffs()) - direct_product(a, b)).norm() < 1e-12);
    CHECK((multiplication_matrix(a) * b.coeffs() - direct_product(a, b)).norm() < 1e-12);
  }
  SUBCASE("grid mismatch") {
    PeriodicScalarField a(FourierGrid(2));
    CHECK_THROWS_AS(convolve(a, b), GridMismatch);
  }
}

TEST_CASE("convolve is bilinear and commutative; associativity defect vanishes with M") {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 5; ++trial) {
    FourierGrid g(4);
    PeriodicScalarField a(g, testing::random_vector(g.mode_count(), rng));
    PeriodicScalarField b(g, testing::random_vector(g.mode_count(), rng));
    PeriodicScalarField c(g, testing::random_vector(g.mode_count(), rng));
    cplx s(0.3, -1.2);
    CHECK((convolve(a, b).coeffs() - convolve(b, a).coeffs()).norm() < 1e-12);
    CHECK((convolve(a, s * b + c).coeffs() - (s * convolve(a, b) + convolve(a, c)).coeffs()).norm() <
          1e-11);
  }
  // trigonometric polynomials of bandwidth 2
  std::mt19937_64 rng2(23);
  FourierGrid small(2), big(4);
  auto a = testing::random_trig_poly(small, rng2, 2, 1.0, false);
  auto b = testing::random_trig_poly(small, rng2, 2, 1.0, false);
  auto c = testing::random_trig_poly(small, rng2, 2, 1.0, false);
  auto defect = [&](const FourierGrid& g) {
    auto ag = a.regrid(g), bg = b.regrid(g), cg = c.regrid(g);
    return (convolve(convolve(ag, bg), cg).coeffs() - convolve(ag, convolve(bg, cg)).coeffs()).norm();
  };
  double d2 = defect(small), d4 = defect(big);
  CHECK(d2 > 1e-6);
  CHECK(d4 <= 0.5 * d2);
  CHECK(d4 < 1e-12);
}

TEST_CASE("real-valued flag") {
  FourierGrid g(2);
  Eigen::VectorXcd c = Eigen::VectorXcd::Zero(g.mode_count());
  c[g.index({1, 0})] = cplx(1.0, 2.0);
  CHECK_THROWS_AS(PeriodicScalarField::real(g, c), std::invalid_argument);
  c[g.index({-1, 0})] = cplx(1.0, -2.0);
  auto f = PeriodicScalarField::real(g, c);
  CHECK(f.real_valued());
  for (const cplx& v : f.samples()) CHECK(std::abs(v.imag()) < 1e-14);
  CHECK(f.derivative(0).real_valued());
  CHECK(!(cplx(0, 1) * f).real_valued());
  CHECK((f.conj().coeffs() - f.coeffs()).norm() < 1e-15);
}

TEST_CASE("derivative symbol is 2 pi i N") {
  FourierGrid g(2);
  auto e = PeriodicScalarField::from_function(g, [](double x1, double x2) { return std::polar(1.0, kTwoPi * (x1 - 2 * x2)); });
  auto d1 = e.derivative(0), d2 = e.derivative(1);
  CHECK(std::abs(d1.coeff({1, -2}) - cplx(0, kTwoPi)) < 1e-12);
  CHECK(std::abs(d2.coeff({1, -2}) - cplx(0, -2 * kTwoPi)) < 1e-12);
  CHECK_THROWS(e.derivative(2));
}

TEST_CASE("weighted norms") {
  FourierGrid g(3);
  Eigen::VectorXcd e0 = Eigen::VectorXcd::Zero(g.mode_count());
  e0[g.zero_index()] = 1.0;
  ModeWeights w0(g, {kPi, 0.0}, 0.0);
  CHECK(std::abs(weighted_norm(e0, w0, NormVariant::star) - kPi) < 1e-14);
  CHECK(weighted_norm(Eigen::VectorXcd::Zero(g.mode_count()), w0, NormVariant::star) == 0.0);
  ModeWeights w1(g, {kPi, 0.0}, kTwoPi);
  CHECK(std::abs(weighted_norm(e0, w1, NormVariant::star_plus) - kPi * std::sqrt(5.0)) < 1e-13);
  CHECK_THROWS_AS(weighted_norm(Eigen::VectorXcd::Zero(3), w0, NormVariant::star), GridMismatch);
}

TEST_CASE("mode weight properties on random (k, mu)") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  FourierGrid g(4);
  for (int t = 0; t < 50; ++t) {
    ModeWeights w(g, {kPi, u(rng)}, u(rng));
    for (int i = 0; i < g.mode_count(); ++i) {
      CHECK(w.min()[i] == std::min(w.plus()[i], w.minus()[i]));
      CHECK(w.min()[i] >= kPi - 1e-12);
    }
    auto phi = testing::random_vector(g.mode_count(), rng);
    double s = weighted_norm(phi, w, NormVariant::star);
    CHECK(s <= weighted_norm(phi, w, NormVariant::star_plus) + 1e-12);
    CHECK(s <= weighted_norm(phi, w, NormVariant::star_minus) + 1e-12);
  }
}

TEST_CASE("index sets T(a)") {
  FourierGrid g(4);
  SUBCASE("k = (pi, 0), mu = 0, a = 2 pi") {
    auto t = index_set_T(ModeWeights(g, {kPi, 0.0}, 0.0), kTwoPi, Sign::plus);
    CHECK(t.modes == std::vector<Mode>{{-1, 0}, {0, 0}});
    CHECK(!t.window_overflow);
  }
  SUBCASE("k = (pi, 0), mu = 4 pi, a = 2 pi, plus") {
    auto t = index_set_T(ModeWeights(g, {kPi, 0.0}, 2 * kTwoPi), kTwoPi, Sign::plus);
    CHECK(t.modes == std::vector<Mode>{{-1, -2}, {0, -2}});
    auto m = index_set_T(ModeWeights(g, {kPi, 0.0}, 2 * kTwoPi), kTwoPi, Sign::minus);
    CHECK(m.modes == std::vector<Mode>{{-1, 2}, {0, 2}});
  }
  SUBCASE("errors and overflow") {
    CHECK_THROWS_AS(index_set_T(ModeWeights(g, {kPi, 0.0}, 0.0), 6.0, Sign::plus),
                    std::invalid_argument);
    auto t = index_set_T(ModeWeights(FourierGrid(1), {kPi, 0.0}, 0.0), 4 * kTwoPi, Sign::plus);
    CHECK(t.window_overflow);
    CHECK(t.analytic_count > t.modes.size());
  }
}

TEST_CASE("counting bound 1 <= #T < 6 pi a^2 over a (k, mu, a) grid") {
  FourierGrid g(30);
  int checked = 0;
  for (double k1 : {0.0, 1.0, kPi})
    for (double k2 : {0.0, 0.3, 2.0, kPi})
      for (double mu : {0.0, 1.7, 4 * kPi, 12 * kPi})
        for (double a : {kTwoPi, 2.5 * kPi, 4 * kPi, 8 * kPi, 16 * kPi})
          for (Sign s : {Sign::plus, Sign::minus}) {
            auto t = index_set_T(ModeWeights(g, {k1, k2}, mu), a, s);
            REQUIRE(!t.window_overflow);
            CHECK(t.modes.size() >= 1);
            CHECK(double(t.modes.size()) < 6 * kPi * a * a);
            ++checked;
          }
  CHECK(checked == 480);
}

TEST_CASE("projection") {
  FourierGrid g(2);
  std::mt19937_64 rng(31);
  auto phi = testing::random_vector(g.mode_count(), rng);
  CHECK(project(phi, g, g.modes()) == phi);
  CHECK(project(phi, g, {}).isZero(0.0));
  Eigen::VectorXcd two = Eigen::VectorXcd::Zero(g.mode_count());
  two[g.index({1, 1})] = 2.0;
  two[g.index({0, -1})] = 3.0;
  auto p = project(two, g, {{0, -1}});
  CHECK(p[g.index({0, -1})] == cplx(3.0));
  CHECK(p.norm() == doctest::Approx(3.0));
  std::vector<Mode> o{{0, 0}, {1, -2}, {2, 2}};
  auto once = project(phi, g, o);
  CHECK(project(once, g, o) == once);
  CHECK(once.norm() <= phi.norm());
}

TEST_CASE("field file format") {
  FourierGrid g(2);
  SUBCASE("coefficient records") {
    std::istringstream in("pdirac-field v1\n# comment\nformat coefficients\n0 0 1.5\n1 -1 0.25 -0.5\n");
    auto f = read_field(in, g);
    CHECK(f.coeff({0, 0}) == cplx(1.5));
    CHECK(f.coeff({1, -1}) == cplx(0.25, -0.5));
    std::ostringstream out;
    write_field(out, f);
    std::istringstream again(out.str());
    CHECK(read_field(again, g).coeffs() == f.coeffs());
  }
  SUBCASE("sample table at its own resolution") {
    const int s = 8;
    std::ostringstream doc;
    doc.precision(17);
    doc << "pdirac-field v1\nformat samples resolution " << s << "\n";
    for (int i = 0; i < s; ++i) {
      for (int j = 0; j < s; ++j) doc << std::cos(kTwoPi * j / s) << ' ';
      doc << '\n';
    }
    std::istringstream in(doc.str());
    auto f = read_field(in, g);
    CHECK(std::abs(f.coeff({0, 1}) - 0.5) < 1e-14);
    CHECK(std::abs(f.coeff({0, -1}) - 0.5) < 1e-14);
  }
  SUBCASE("malformed documents") {
    for (const char* bad : {"", "pdirac-field v2\nformat coefficients\n",
                            "pdirac-field v1\nformat coefficients\n0 x 1\n",
                            "pdirac-field v1\nformat samples resolution 5\n1 1 1 1 1\n",
                            "pdirac-field v1\nformat matrix\n"}) {
      std::istringstream in(bad);
      CHECK_THROWS_AS(read_field(in, g), FormatError);
    }
    std::istringstream out_of_window("pdirac-field v1\nformat coefficients\n3 0 1\n");
    CHECK_THROWS_AS(read_field(out_of_window, g), GridMismatch);
    CHECK_THROWS_AS(load_field("/nonexistent/field.txt", g), FormatError);
  }
}

TEST_CASE("coefficient set membership") {
  FourierGrid g(2);
  auto c = CoefficientSet::constant(g, 1.0, 1.0, 0.0);
  CHECK(c.check_membership().empty());
  CHECK(c.is_constant());
  CHECK(c.bounds().F_bound == 0.0);

  auto dip = PeriodicScalarField::from_function(g, [](double x1, double) { return cplx(1.0 + 0.8 * std::cos(kTwoPi * x1)); });
  CoefficientSet bad(PeriodicScalarField::constant(g, 0.0), dip, PeriodicScalarField::constant(g, 1.0),
                     {2.0, 0.5, 1.0});
  auto v = bad.check_membership();
  REQUIRE(!v.empty());
  CHECK(v.front().field == "G");
  auto worst = std::min_element(v.begin(), v.end(),
                                [](const auto& a, const auto& b) { return a.value < b.value; });
  CHECK(worst->x1 == doctest::Approx(0.5));
  CHECK(worst->value == doctest::Approx(0.2));
  CHECK(worst->bound == 0.5);
  CHECK_THROWS_AS(bad.require_membership(), InadmissibleParameters);

  Eigen::VectorXcd z = Eigen::VectorXcd::Zero(g.mode_count());
  z[g.index({1, 0})] = 1.0;
  CHECK_THROWS_AS(CoefficientSet(PeriodicScalarField(g, z), dip, dip, {2.0, 0.5, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(CoefficientSet(dip, dip, dip, {0.5, 2.0, 1.0}), std::invalid_argument);

  std::mt19937_64 rng(41);
  for (int t = 0; t < 20; ++t)
    CHECK(testing::random_gamma_instance(g, rng).check_membership().empty());
}
