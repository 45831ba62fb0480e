#include "pdirac/truncated_operator.hpp"

#include <iomanip>
#include <ostream>

#include "pdirac/errors.hpp"

namespace pdirac {

TruncatedOperator::TruncatedOperator(FourierGrid grid, BlockStructure blocks)
    : grid_(std::move(grid)), blocks_(blocks) {}

TruncatedOperator::Factor TruncatedOperator::compile(const PeriodicScalarField& f) const {
  require_same_grid(grid_, f.grid(), "operator term");
  Factor out;
  const auto& c = f.coeffs();
  out.constant = true;
  for (int i = 0; i < c.size() && out.constant; ++i)
    if (i != grid_.zero_index() && c[i] != cplx(0.0)) out.constant = false;
  if (out.constant)
    out.scalar = f.mean();
  else
    out.samples = f.samples();
  return out;
}

void TruncatedOperator::add_term(OperatorTerm term) {
  if (term.row < 0 || term.col < 0 || term.row >= block_count() || term.col >= block_count())
    throw std::invalid_argument("operator term block index out of range");
  Compiled c;
  for (const auto& f : term.left) c.left.push_back(compile(f));
  for (const auto& f : term.right) c.right.push_back(compile(f));
  c.symbol.resize(grid_.mode_count());
  for (int i = 0; i < grid_.mode_count(); ++i) c.symbol[i] = term.symbol(grid_.modes()[i]);
  c.simple = term.left.size() <= 1 && term.right.empty();
  terms_.push_back(std::move(term));
  compiled_.push_back(std::move(c));
}

void TruncatedOperator::add(const TruncatedOperator& other, cplx scale) {
  require_same_grid(grid_, other.grid_, "operator sum");
  if (other.block_count() != block_count()) throw GridMismatch("operator sum: block structure");
  for (OperatorTerm t : other.terms_) {
    t.symbol.c0 *= scale;
    t.symbol.c1 *= scale;
    t.symbol.c2 *= scale;
    add_term(std::move(t));
  }
}

void TruncatedOperator::apply_factor(const Factor& f, Eigen::VectorXcd& x, bool adjoint) const {
  if (f.constant) {
    x *= adjoint ? std::conj(f.scalar) : f.scalar;
    return;
  }
  std::vector<cplx> buf = synthesize_samples(grid_, x);
  if (adjoint)
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= std::conj(f.samples[i]);
  else
    for (std::size_t i = 0; i < buf.size(); ++i) buf[i] *= f.samples[i];
  x = analyze_samples(grid_, buf);
}

Eigen::VectorXcd TruncatedOperator::apply_term(std::size_t t, const Eigen::VectorXcd& in) const {
  const Compiled& c = compiled_[t];
  Eigen::VectorXcd x = in;
  for (auto it = c.right.rbegin(); it != c.right.rend(); ++it) apply_factor(*it, x, false);
  x = x.cwiseProduct(c.symbol);
  for (auto it = c.left.rbegin(); it != c.left.rend(); ++it) apply_factor(*it, x, false);
  return x;
}

Eigen::VectorXcd TruncatedOperator::apply(const Eigen::VectorXcd& v) const {
  if (v.size() != dim())
    throw GridMismatch("apply: vector of size " + std::to_string(v.size()) + ", operator dim " +
                       std::to_string(dim()));
  const int n = grid_.mode_count();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim());
  for (std::size_t t = 0; t < terms_.size(); ++t)
    out.segment(terms_[t].row * n, n) += apply_term(t, v.segment(terms_[t].col * n, n));
  return out;
}

Eigen::VectorXcd TruncatedOperator::apply_adjoint(const Eigen::VectorXcd& v) const {
  if (v.size() != dim()) throw GridMismatch("apply_adjoint: dimension mismatch");
  const int n = grid_.mode_count();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(dim());
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    const Compiled& c = compiled_[t];
    Eigen::VectorXcd x = v.segment(terms_[t].row * n, n);
    for (const auto& f : c.left) apply_factor(f, x, true);
    x = x.cwiseProduct(c.symbol.conjugate());
    for (const auto& f : c.right) apply_factor(f, x, true);
    out.segment(terms_[t].col * n, n) += x;
  }
  return out;
}

Eigen::MatrixXcd TruncatedOperator::dense_columns(const std::vector<int>& cols) const {
  const int n = grid_.mode_count();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim(), Eigen::Index(cols.size()));
  for (std::size_t t = 0; t < terms_.size(); ++t) {
    const OperatorTerm& term = terms_[t];
    const Compiled& c = compiled_[t];
    for (std::size_t j = 0; j < cols.size(); ++j) {
      const int col = cols[j];
      if (col < 0 || col >= dim()) throw std::out_of_range("dense_columns: column index");
      if (col / n != term.col) continue;
      const int ci = col % n;
      auto dst = out.col(Eigen::Index(j)).segment(term.row * n, n);
      if (c.simple) {
        const cplx s = c.symbol[ci];
        if (c.left.empty()) {
          dst[ci] += s;
        } else if (c.left[0].constant) {
          dst[ci] += c.left[0].scalar * s;
        } else {
          const PeriodicScalarField& m = term.left[0];
          const Mode nc = grid_.modes()[ci];
          for (int r = 0; r < n; ++r) dst[r] += m.coeff(grid_.modes()[r] - nc) * s;
        }
      } else {
        Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
        e[ci] = 1.0;
        dst += apply_term(t, e);
      }
    }
  }
  return out;
}

Eigen::MatrixXcd TruncatedOperator::dense() const {
  std::vector<int> cols(dim());
  for (int i = 0; i < dim(); ++i) cols[i] = i;
  return dense_columns(cols);
}

Eigen::MatrixXcd TruncatedOperator::block(int row, int col) const {
  const int n = grid_.mode_count();
  if (row < 0 || col < 0 || row >= block_count() || col >= block_count())
    throw std::out_of_range("block index");
  std::vector<int> cols(n);
  for (int i = 0; i < n; ++i) cols[i] = col * n + i;
  return dense_columns(cols).middleRows(row * n, n);
}

TruncatedOperator TruncatedOperator::regrid(const FourierGrid& target) const {
  TruncatedOperator out(target, blocks_);
  for (const OperatorTerm& t : terms_) {
    OperatorTerm u{t.row, t.col, {}, t.symbol, {}};
    for (const auto& f : t.left) u.left.push_back(f.regrid(target));
    for (const auto& f : t.right) u.right.push_back(f.regrid(target));
    out.add_term(std::move(u));
  }
  return out;
}

void write_operator_records(std::ostream& out, const TruncatedOperator& op) {
  Eigen::MatrixXcd a = op.dense();
  out << std::setprecision(17);
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c)
      if (a(r, c) != cplx(0.0))
        out << r << ',' << c << ',' << a(r, c).real() << ',' << a(r, c).imag() << '\n';
}

}  // namespace pdirac
