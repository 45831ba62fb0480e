#pragma once

#include <string>
#include <vector>

#include "pdirac/periodic_field.hpp"

namespace pdirac {

/// Bounds of the admissible class: q <= G, H <= p and |F| <= F_bound.
struct GammaBounds {
  double p = 1.0;
  double q = 1.0;
  double F_bound = 0.0;
};

/// One sampled point where a coefficient leaves its admissible range.
struct MembershipViolation {
  std::string field;  // "F", "G" or "H"
  int i = 0;
  int j = 0;
  double x1 = 0.0;
  double x2 = 0.0;
  double value = 0.0;
  double bound = 0.0;
};

/// Real coefficient triple {F, G, H} of the operator together with its bounds.
/// Construction only checks structural requirements (real flags, common grid,
/// 0 < q <= p, F_bound >= 0); the pointwise bounds are checked on the sample
/// grid by check_membership().
class CoefficientSet {
 public:
  CoefficientSet(PeriodicScalarField F, PeriodicScalarField G, PeriodicScalarField H,
                 GammaBounds bounds);

  /// Constant coefficients; bounds default to the tightest admissible values.
  static CoefficientSet constant(const FourierGrid& grid, double G = 1.0, double H = 1.0,
                                 double F = 0.0);

  const PeriodicScalarField& F() const { return F_; }
  const PeriodicScalarField& G() const { return G_; }
  const PeriodicScalarField& H() const { return H_; }
  const GammaBounds& bounds() const { return bounds_; }
  const FourierGrid& grid() const { return G_.grid(); }

  /// Sampled check of q <= G, H <= p and |F| <= F_bound. Empty means admissible.
  std::vector<MembershipViolation> check_membership(double tol = 1e-12) const;
  /// Throws InadmissibleParameters on the first violation.
  void require_membership(double tol = 1e-12) const;

  /// True if all three fields have no nonzero non-constant coefficient.
  bool is_constant() const;

  CoefficientSet regrid(const FourierGrid& target) const;

 private:
  PeriodicScalarField F_, G_, H_;
  GammaBounds bounds_;
};

}  // namespace pdirac
