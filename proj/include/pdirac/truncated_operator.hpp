#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <vector>

#include "pdirac/periodic_field.hpp"

namespace pdirac {

enum class BlockStructure { scalar, spinor };

/// Diagonal Fourier multiplier s(N) = c0 + c1 * 2 pi N1 + c2 * 2 pi N2.
struct Symbol {
  cplx c0 = 1.0;
  cplx c1 = 0.0;
  cplx c2 = 0.0;

  cplx operator()(const Mode& n) const { return c0 + c1 * (kTwoPi * n.n1) + c2 * (kTwoPi * n.n2); }
  bool is_identity() const { return c0 == cplx(1.0) && c1 == cplx(0.0) && c2 == cplx(0.0); }
};

/// One summand acting from block column `col` to block row `row`:
///   left[0] * ... * left[p-1] * diag(symbol) * right[0] * ... * right[q-1]
/// where each field acts as a multiplication operator compressed to the window.
struct OperatorTerm {
  int row = 0;
  int col = 0;
  std::vector<PeriodicScalarField> left;
  Symbol symbol;
  std::vector<PeriodicScalarField> right;
};

/// Linear map on (C or C^2) x window modes built from OperatorTerms. Block b
/// of a vector occupies entries [b * n, (b + 1) * n) with n = mode_count().
///
/// Multiplications are applied as transform-multiply-transform on the grid's
/// sample lattice, so each factor acts as the exact compression P a P.
class TruncatedOperator {
 public:
  TruncatedOperator(FourierGrid grid, BlockStructure blocks);

  void add_term(OperatorTerm term);
  /// Appends all terms of `other` scaled by `scale`.
  void add(const TruncatedOperator& other, cplx scale = 1.0);

  const FourierGrid& grid() const { return grid_; }
  BlockStructure blocks() const { return blocks_; }
  int block_count() const { return blocks_ == BlockStructure::scalar ? 1 : 2; }
  int dim() const { return block_count() * grid_.mode_count(); }
  const std::vector<OperatorTerm>& terms() const { return terms_; }

  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
  Eigen::VectorXcd apply_adjoint(const Eigen::VectorXcd& v) const;

  Eigen::MatrixXcd dense() const;
  Eigen::MatrixXcd dense_columns(const std::vector<int>& cols) const;
  /// Dense (row, col) block, n x n.
  Eigen::MatrixXcd block(int row, int col) const;

  /// Same operator with every field moved onto `target` (zero padded or truncated).
  TruncatedOperator regrid(const FourierGrid& target) const;

 private:
  struct Factor {
    bool constant = false;
    cplx scalar = 0.0;
    std::vector<cplx> samples;
  };
  struct Compiled {
    std::vector<Factor> left, right;
    Eigen::VectorXcd symbol;
    bool simple = false;  // single left factor, no right factors
  };

  Factor compile(const PeriodicScalarField& f) const;
  void apply_factor(const Factor& f, Eigen::VectorXcd& x, bool adjoint) const;
  Eigen::VectorXcd apply_term(std::size_t t, const Eigen::VectorXcd& x) const;

  FourierGrid grid_;
  BlockStructure blocks_;
  std::vector<OperatorTerm> terms_;
  std::vector<Compiled> compiled_;
};

/// Dense matrix as (row, col, re, im) records, one per line, nonzeros only.
void write_operator_records(std::ostream& out, const TruncatedOperator& op);

}  // namespace pdirac
