#include "pdirac/periodic_field.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "pdirac/errors.hpp"
#include "pdirac/fft.hpp"

namespace pdirac {
namespace {

int wrap(int n, int s) { return ((n % s) + s) % s; }

std::vector<cplx> synthesize(const FourierGrid& grid, const Eigen::VectorXcd& c, int s1, int s2) {
  const int m = grid.radius();
  if (s1 < 2 * m + 1 || s2 < 2 * m + 1)
    throw std::invalid_argument("sample grid too coarse for the truncation window");
  std::vector<cplx> buf(std::size_t(s1) * s2, cplx(0.0));
  for (int i = 0; i < grid.mode_count(); ++i) {
    const Mode& n = grid.modes()[i];
    buf[std::size_t(wrap(n.n1, s1)) * s2 + wrap(n.n2, s2)] = c[i];
  }
  fft::transform_2d(buf.data(), s1, s2, +1);
  return buf;
}

}  // namespace

PeriodicScalarField::PeriodicScalarField(FourierGrid grid)
    : grid_(std::move(grid)), coeffs_(Eigen::VectorXcd::Zero(grid_.mode_count())), real_(true) {}

PeriodicScalarField::PeriodicScalarField(FourierGrid grid, Eigen::VectorXcd coeffs)
    : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.mode_count())
    throw GridMismatch("coefficient vector has " + std::to_string(coeffs_.size()) +
                       " entries, grid expects " + std::to_string(grid_.mode_count()));
}

PeriodicScalarField PeriodicScalarField::constant(const FourierGrid& grid, cplx value) {
  PeriodicScalarField f(grid);
  f.coeffs_[grid.zero_index()] = value;
  f.real_ = value.imag() == 0.0;
  return f;
}

PeriodicScalarField PeriodicScalarField::from_function(
    const FourierGrid& grid, const std::function<cplx(double, double)>& f) {
  const int s = grid.resolution();
  std::vector<cplx> values(grid.sample_count());
  for (int i = 0; i < s; ++i)
    for (int j = 0; j < s; ++j) values[std::size_t(i) * s + j] = f(double(i) / s, double(j) / s);
  return sample_to_fourier(values, grid);
}

PeriodicScalarField PeriodicScalarField::real(FourierGrid grid, Eigen::VectorXcd coeffs,
                                              double tol) {
  return PeriodicScalarField(std::move(grid), std::move(coeffs)).as_real(tol);
}

cplx PeriodicScalarField::coeff(const Mode& n) const {
  return grid_.contains(n) ? coeffs_[grid_.index(n)] : cplx(0.0);
}

double PeriodicScalarField::hermitian_defect() const {
  double d = 0.0;
  const int n = grid_.mode_count();
  for (int i = 0; i < n; ++i)
    d = std::max(d, std::abs(coeffs_[grid_.reflected_index(i)] - std::conj(coeffs_[i])));
  return d;
}

PeriodicScalarField PeriodicScalarField::as_real(double tol) const {
  const double d = hermitian_defect();
  if (d > tol)
    throw std::invalid_argument("field is not real-valued: Hermitian symmetry defect " +
                                std::to_string(d));
  PeriodicScalarField out(grid_);
  const int n = grid_.mode_count();
  for (int i = 0; i < n; ++i)
    out.coeffs_[i] = 0.5 * (coeffs_[i] + std::conj(coeffs_[grid_.reflected_index(i)]));
  out.real_ = true;
  return out;
}

std::vector<cplx> PeriodicScalarField::samples() const {
  return synthesize(grid_, coeffs_, grid_.resolution(), grid_.resolution());
}

std::vector<cplx> PeriodicScalarField::samples(int s1, int s2) const {
  return synthesize(grid_, coeffs_, s1, s2);
}

cplx PeriodicScalarField::evaluate(double x1, double x2) const {
  const int m = grid_.radius();
  std::vector<cplx> e1(2 * m + 1), e2(2 * m + 1);
  for (int a = -m; a <= m; ++a) {
    e1[a + m] = std::polar(1.0, kTwoPi * a * x1);
    e2[a + m] = std::polar(1.0, kTwoPi * a * x2);
  }
  cplx sum = 0.0;
  for (int i = 0; i < grid_.mode_count(); ++i) {
    const Mode& n = grid_.modes()[i];
    sum += coeffs_[i] * e1[n.n1 + m] * e2[n.n2 + m];
  }
  return sum;
}

double PeriodicScalarField::quadrature_l2_norm() const {
  double s = 0.0;
  for (const cplx& v : samples()) s += std::norm(v);
  return std::sqrt(s / grid_.sample_count());
}

double PeriodicScalarField::sup_norm() const {
  double s = 0.0;
  for (const cplx& v : samples()) s = std::max(s, std::abs(v));
  return s;
}

PeriodicScalarField PeriodicScalarField::conj() const {
  PeriodicScalarField out(grid_, coeffs_.conjugate().reverse());
  out.real_ = real_;
  return out;
}

PeriodicScalarField PeriodicScalarField::derivative(int axis) const {
  if (axis != 0 && axis != 1) throw std::invalid_argument("derivative axis must be 0 or 1");
  PeriodicScalarField out(grid_, coeffs_);
  for (int i = 0; i < grid_.mode_count(); ++i) {
    const Mode& n = grid_.modes()[i];
    out.coeffs_[i] *= cplx(0.0, kTwoPi * (axis == 0 ? n.n1 : n.n2));
  }
  out.real_ = real_;
  return out;
}

PeriodicScalarField PeriodicScalarField::regrid(const FourierGrid& target) const {
  PeriodicScalarField out(target);
  for (int i = 0; i < grid_.mode_count(); ++i) {
    const Mode& n = grid_.modes()[i];
    if (target.contains(n)) out.coeffs_[target.index(n)] = coeffs_[i];
  }
  out.real_ = real_;
  return out;
}

PeriodicScalarField PeriodicScalarField::map_pointwise(const std::function<cplx(cplx)>& f) const {
  std::vector<cplx> v = samples();
  for (cplx& x : v) x = f(x);
  return sample_to_fourier(v, grid_);
}

PeriodicScalarField PeriodicScalarField::operator-() const {
  PeriodicScalarField out(grid_, -coeffs_);
  out.real_ = real_;
  return out;
}

PeriodicScalarField& PeriodicScalarField::operator+=(const PeriodicScalarField& o) {
  require_same_grid(grid_, o.grid_, "field addition");
  coeffs_ += o.coeffs_;
  real_ = real_ && o.real_;
  return *this;
}

PeriodicScalarField& PeriodicScalarField::operator-=(const PeriodicScalarField& o) {
  require_same_grid(grid_, o.grid_, "field subtraction");
  coeffs_ -= o.coeffs_;
  real_ = real_ && o.real_;
  return *this;
}

PeriodicScalarField& PeriodicScalarField::operator*=(cplx s) {
  coeffs_ *= s;
  real_ = real_ && s.imag() == 0.0;
  return *this;
}

std::vector<cplx> synthesize_samples(const FourierGrid& grid, const Eigen::VectorXcd& coeffs) {
  return synthesize(grid, coeffs, grid.resolution(), grid.resolution());
}

Eigen::VectorXcd analyze_samples(const FourierGrid& grid, std::vector<cplx>& samples) {
  const int s = grid.resolution();
  if (samples.size() != std::size_t(grid.sample_count()))
    throw GridMismatch("sample table has " + std::to_string(samples.size()) +
                       " values, grid expects " + std::to_string(grid.sample_count()));
  fft::transform_2d(samples.data(), s, s, -1);
  Eigen::VectorXcd c(grid.mode_count());
  const double scale = 1.0 / grid.sample_count();
  for (int i = 0; i < grid.mode_count(); ++i) {
    const Mode& n = grid.modes()[i];
    c[i] = samples[std::size_t(wrap(n.n1, s)) * s + wrap(n.n2, s)] * scale;
  }
  return c;
}

PeriodicScalarField sample_to_fourier(std::span<const cplx> samples, const FourierGrid& grid) {
  std::vector<cplx> buf(samples.begin(), samples.end());
  return PeriodicScalarField(grid, analyze_samples(grid, buf));
}

std::vector<cplx> fourier_to_sample(const PeriodicScalarField& field) { return field.samples(); }

PeriodicScalarField combine_pointwise(const PeriodicScalarField& a, const PeriodicScalarField& b,
                                      const std::function<cplx(cplx, cplx)>& f) {
  require_same_grid(a.grid(), b.grid(), "pointwise combination");
  std::vector<cplx> va = a.samples();
  std::vector<cplx> vb = b.samples();
  for (std::size_t i = 0; i < va.size(); ++i) va[i] = f(va[i], vb[i]);
  return sample_to_fourier(va, a.grid());
}

PeriodicScalarField convolve(const PeriodicScalarField& a, const PeriodicScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "convolve");
  std::vector<cplx> va = a.samples();
  std::vector<cplx> vb = b.samples();
  for (std::size_t i = 0; i < va.size(); ++i) va[i] *= vb[i];
  PeriodicScalarField out = sample_to_fourier(va, a.grid());
  if (a.real_valued() && b.real_valued())
    out = out.as_real(std::numeric_limits<double>::infinity());
  return out;
}

Eigen::VectorXcd multiply_coefficients(const PeriodicScalarField& a, const Eigen::VectorXcd& v) {
  if (v.size() != a.grid().mode_count())
    throw GridMismatch("coefficient vector does not match multiplier grid");
  return convolve(a, PeriodicScalarField(a.grid(), v)).coeffs();
}

Eigen::MatrixXcd multiplication_matrix(const PeriodicScalarField& a) {
  const FourierGrid& g = a.grid();
  const int n = g.mode_count();
  Eigen::MatrixXcd t(n, n);
  for (int c = 0; c < n; ++c) {
    const Mode& nc = g.modes()[c];
    for (int r = 0; r < n; ++r) t(r, c) = a.coeff(g.modes()[r] - nc);
  }
  return t;
}

cplx inner(const PeriodicScalarField& a, const PeriodicScalarField& b) {
  require_same_grid(a.grid(), b.grid(), "inner product");
  return a.coeffs().dot(b.coeffs());
}

}  // namespace pdirac
