#include "pdirac/linalg.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <random>

#include "pdirac/errors.hpp"

namespace pdirac {

Eigen::VectorXd singular_values(const Eigen::MatrixXcd& a) {
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(a);
  Eigen::VectorXd s = svd.singularValues();
  return s.reverse();
}

double smallest_singular_value_iterative(const TruncatedOperator& op,
                                         const IterativeOptions& opts) {
  const int n = op.dim();
  auto normal = [&](const Eigen::VectorXcd& v) { return op.apply_adjoint(op.apply(v)); };
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> gauss;
  Eigen::VectorXcd x(n);
  for (int i = 0; i < n; ++i) x[i] = cplx(gauss(rng), gauss(rng));
  x.normalize();

  double sigma = op.apply(x).norm();
  for (int outer = 0; outer < opts.max_outer; ++outer) {
    // CG for (A^*A) y = x
    Eigen::VectorXcd y = Eigen::VectorXcd::Zero(n), r = x, p = x;
    double rr = r.squaredNorm();
    for (int it = 0; it < opts.max_inner && std::sqrt(rr) > 1e-14; ++it) {
      Eigen::VectorXcd ap = normal(p);
      const double pap = p.dot(ap).real();
      if (!(pap > 0.0)) break;  // exact null direction reached
      const double alpha = rr / pap;
      y += alpha * p;
      r -= alpha * ap;
      const double rr_new = r.squaredNorm();
      p = r + (rr_new / rr) * p;
      rr = rr_new;
    }
    if (y.norm() == 0.0) return 0.0;
    x = y.normalized();
    const double next = op.apply(x).norm();
    const bool done = std::abs(next - sigma) <= opts.tolerance * std::max(1.0, next);
    sigma = next;
    if (done) break;
  }
  return sigma;
}

ExtremeSingularValues triangular_extreme_singular_values(const Eigen::MatrixXcd& R,
                                                         int iterations) {
  const Eigen::Index n = R.rows();
  ExtremeSingularValues out;
  if (n == 0) return out;
  auto upper = R.triangularView<Eigen::Upper>();
  Eigen::VectorXcd start(n);
  for (Eigen::Index i = 0; i < n; ++i) start[i] = cplx(1.0 + 0.37 * i / n, 0.11 * (i % 7));
  for (Eigen::Index i = 0; i < n; ++i)
    if (R(i, i) == cplx(0.0)) return {0.0, 0.0};

  Eigen::VectorXcd x = start.normalized();
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXcd y = upper.adjoint() * (upper * x);
    out.max = std::sqrt(x.dot(y).real());
    x = y.normalized();
  }
  x = start.normalized();
  for (int it = 0; it < iterations; ++it) {
    Eigen::VectorXcd y = upper.adjoint().solve(x);
    y = upper.solve(y);
    const double ny = y.norm();
    if (!std::isfinite(ny) || ny == 0.0) return {0.0, out.max};
    x = y / ny;
    out.min = (upper * x).norm();
  }
  return out;
}

double smallest_singular_value(const TruncatedOperator& op, SvdMethod method) {
  if (method == SvdMethod::automatic)
    method = op.dim() <= kDenseLimit ? SvdMethod::dense : SvdMethod::iterative;
  if (method == SvdMethod::dense) return singular_values(op.dense())[0];
  return smallest_singular_value_iterative(op);
}

}  // namespace pdirac
