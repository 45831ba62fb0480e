#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "pdirac/truncated_operator.hpp"

namespace pdirac {

enum class SvdMethod { automatic, dense, iterative };

/// Operators with at most this many unknowns are factorized densely.
inline constexpr int kDenseLimit = 4096;

/// Singular values of a dense matrix in ascending order.
Eigen::VectorXd singular_values(const Eigen::MatrixXcd& a);

struct IterativeOptions {
  double tolerance = 1e-12;
  int max_outer = 300;
  int max_inner = 4000;
  std::uint64_t seed = 1;
};

/// Inverse iteration on A^* A with conjugate-gradient inner solves, using only
/// apply() and apply_adjoint().
double smallest_singular_value_iterative(const TruncatedOperator& op,
                                         const IterativeOptions& opts = {});

double smallest_singular_value(const TruncatedOperator& op, SvdMethod method = SvdMethod::automatic);

struct ExtremeSingularValues {
  double min = 0.0;
  double max = 0.0;
};

/// Power and inverse iteration estimates for a square upper-triangular R.
ExtremeSingularValues triangular_extreme_singular_values(const Eigen::MatrixXcd& R,
                                                         int iterations = 80);

}  // namespace pdirac
