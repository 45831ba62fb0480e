#include "pdirac/assembly.hpp"

#include <cmath>
#include <stdexcept>

#include "pdirac/errors.hpp"

namespace pdirac {
namespace {

bool all_zero(const PeriodicScalarField& f) { return f.coeffs().isZero(0.0); }

// Relative L2 mass of exp(f) outside |N|_inf <= M, with exp(f) sampled on a
// grid of radius 2M.
double exponential_tail(const PeriodicScalarField& exponent) {
  const FourierGrid& g = exponent.grid();
  FourierGrid fine(std::max(1, 2 * g.radius()));
  PeriodicScalarField e = exponent.regrid(fine).map_pointwise([](cplx v) { return std::exp(v); });
  double total = e.coeffs().squaredNorm(), tail = 0.0;
  for (int i = 0; i < fine.mode_count(); ++i)
    if (!g.contains(fine.modes()[i])) tail += std::norm(e.coeffs()[i]);
  return total > 0.0 ? std::sqrt(tail / total) : 0.0;
}

}  // namespace

MatrixPotential::MatrixPotential(PeriodicScalarField v0, PeriodicScalarField v1,
                                 PeriodicScalarField v2, PeriodicScalarField v3)
    : V0(std::move(v0)), V1(std::move(v1)), V2(std::move(v2)), V3(std::move(v3)) {
  require_same_grid(V0.grid(), V1.grid(), "matrix potential");
  require_same_grid(V0.grid(), V2.grid(), "matrix potential");
  require_same_grid(V0.grid(), V3.grid(), "matrix potential");
}

MatrixPotential MatrixPotential::constant(const FourierGrid& grid, double c0, double c1, double c2,
                                          double c3) {
  return MatrixPotential(
      PeriodicScalarField::constant(grid, c0), PeriodicScalarField::constant(grid, c1),
      PeriodicScalarField::constant(grid, c2), PeriodicScalarField::constant(grid, c3));
}

const PeriodicScalarField& MatrixPotential::component(int l) const {
  switch (l) {
    case 0: return V0;
    case 1: return V1;
    case 2: return V2;
    case 3: return V3;
  }
  throw std::out_of_range("potential component index");
}

bool MatrixPotential::hermitian() const {
  return V0.real_valued() && V1.real_valued() && V2.real_valued() && V3.real_valued();
}

bool MatrixPotential::is_zero() const {
  return all_zero(V0) && all_zero(V1) && all_zero(V2) && all_zero(V3);
}

MatrixPotential MatrixPotential::regrid(const FourierGrid& target) const {
  return MatrixPotential(V0.regrid(target), V1.regrid(target), V2.regrid(target),
                         V3.regrid(target));
}

TruncatedOperator assemble_dpm(const CoefficientSet& coeffs, const ComplexQuasimomentum& z,
                               double mu, Sign sign, const FourierGrid& grid) {
  require_same_grid(coeffs.grid(), grid, "assemble_dpm");
  const double s = sign_value(sign);
  const cplx i(0.0, 1.0);
  TruncatedOperator op(grid, BlockStructure::scalar);
  op.add_term({0, 0, {coeffs.G() + cplx(0.0, s) * coeffs.F()}, Symbol{z.z1(), 1.0, 0.0}, {}});
  op.add_term({0, 0, {coeffs.H()}, Symbol{i * s * z.z2() + i * mu, 0.0, i * s}, {}});
  return op;
}

TruncatedOperator potential_operator(const MatrixPotential& V) {
  const cplx i(0.0, 1.0);
  TruncatedOperator op(V.grid(), BlockStructure::spinor);
  auto add = [&](int r, int c, const PeriodicScalarField& f) {
    if (!all_zero(f)) op.add_term({r, c, {f}, Symbol{}, {}});
  };
  add(0, 0, V.V0 + V.V3);
  add(0, 1, V.V1 - i * V.V2);
  add(1, 0, V.V1 + i * V.V2);
  add(1, 1, V.V0 - V.V3);
  return op;
}

TruncatedOperator assemble_dirac(const CoefficientSet& coeffs, const MatrixPotential& V,
                                 const ComplexQuasimomentum& z, const FourierGrid& grid,
                                 double mu) {
  require_same_grid(coeffs.grid(), grid, "assemble_dirac");
  require_same_grid(V.grid(), grid, "assemble_dirac potential");
  TruncatedOperator op(grid, BlockStructure::spinor);
  for (Sign sign : {Sign::minus, Sign::plus}) {
    const int row = sign == Sign::plus ? 1 : 0;
    const TruncatedOperator block = assemble_dpm(coeffs, z, mu, sign, grid);
    for (OperatorTerm t : block.terms()) {
      t.row = row;
      t.col = 1 - row;
      op.add_term(std::move(t));
    }
  }
  if (!V.is_zero()) op.add(potential_operator(V));
  return op;
}

GaugeConjugation gauge_conjugate(const TruncatedOperator& op, const PeriodicScalarField& Phi,
                                 const PeriodicScalarField& Psi, cplx mu) {
  if (op.blocks() != BlockStructure::spinor)
    throw std::invalid_argument("gauge_conjugate needs a spinor operator");
  require_same_grid(op.grid(), Phi.grid(), "gauge_conjugate");
  require_same_grid(op.grid(), Psi.grid(), "gauge_conjugate");
  const double guard = 40.0;
  if (std::abs(mu) * Psi.sup_norm() > guard)
    throw OverflowGuard("gauge exponent |mu| sup|Psi| exceeds " + std::to_string(guard));

  const cplx i(0.0, 1.0);
  // exponent of e^{sigma3-sign * mu Psi + phase * i mu Phi}
  auto exponent = [&](double s3, double phase) { return (s3 * mu) * Psi + (phase * i * mu) * Phi; };
  PeriodicScalarField eL[2] = {exponent(1.0, -1.0), exponent(-1.0, -1.0)};
  PeriodicScalarField eR[2] = {exponent(1.0, 1.0), exponent(-1.0, 1.0)};

  GaugeConjugation out{TruncatedOperator(op.grid(), BlockStructure::spinor), 0.0};
  PeriodicScalarField L[2] = {eL[0], eL[1]}, R[2] = {eR[0], eR[1]};
  for (int b = 0; b < 2; ++b) {
    for (const PeriodicScalarField* e : {&eL[b], &eR[b]}) {
      double worst = 0.0;
      for (const cplx& v : e->samples()) worst = std::max(worst, std::abs(v.real()));
      if (worst > guard)
        throw OverflowGuard("gauge exponent real part " + std::to_string(worst) + " exceeds " +
                            std::to_string(guard));
      out.truncation_residual = std::max(out.truncation_residual, exponential_tail(*e));
    }
    L[b] = eL[b].map_pointwise([](cplx v) { return std::exp(v); });
    R[b] = eR[b].map_pointwise([](cplx v) { return std::exp(v); });
  }
  for (OperatorTerm t : op.terms()) {
    t.left.insert(t.left.begin(), L[t.row]);
    t.right.push_back(R[t.col]);
    out.op.add_term(std::move(t));
  }
  return out;
}

std::vector<int> probe_columns(const FourierGrid& grid, int probe_radius) {
  std::vector<int> cols;
  for (int b = 0; b < 2; ++b)
    for (int i = 0; i < grid.mode_count(); ++i)
      if (grid.modes()[i].sup_norm() <= probe_radius) cols.push_back(b * grid.mode_count() + i);
  return cols;
}

double column_difference(const TruncatedOperator& a, const TruncatedOperator& b,
                         const std::vector<int>& columns) {
  require_same_grid(a.grid(), b.grid(), "column_difference");
  if (a.dim() != b.dim()) throw GridMismatch("column_difference: dimension mismatch");
  double sum = 0.0;
  for (int c : columns) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(a.dim());
    e[c] = 1.0;
    sum += (a.apply(e) - b.apply(e)).squaredNorm();
  }
  return std::sqrt(sum);
}

}  // namespace pdirac
