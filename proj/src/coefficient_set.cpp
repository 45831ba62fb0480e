#include "pdirac/coefficient_set.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "pdirac/errors.hpp"

namespace pdirac {
namespace {

PeriodicScalarField certify(const PeriodicScalarField& f, const char* name) {
  try {
    return f.real_valued() ? f : f.as_real();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(std::string("coefficient ") + name + ": " + e.what());
  }
}

bool is_const(const PeriodicScalarField& f) {
  const auto& c = f.coeffs();
  for (int i = 0; i < c.size(); ++i)
    if (i != f.grid().zero_index() && c[i] != cplx(0.0)) return false;
  return true;
}

}  // namespace

CoefficientSet::CoefficientSet(PeriodicScalarField F, PeriodicScalarField G, PeriodicScalarField H,
                               GammaBounds bounds)
    : F_(certify(F, "F")), G_(certify(G, "G")), H_(certify(H, "H")), bounds_(bounds) {
  require_same_grid(F_.grid(), G_.grid(), "coefficient set");
  require_same_grid(F_.grid(), H_.grid(), "coefficient set");
  if (!(bounds_.q > 0.0) || !(bounds_.q <= bounds_.p))
    throw std::invalid_argument("coefficient bounds need 0 < q <= p");
  if (!(bounds_.F_bound >= 0.0)) throw std::invalid_argument("F_bound must be nonnegative");
}

CoefficientSet CoefficientSet::constant(const FourierGrid& grid, double G, double H, double F) {
  GammaBounds b{std::max(G, H), std::min(G, H), std::abs(F)};
  return CoefficientSet(PeriodicScalarField::constant(grid, F),
                        PeriodicScalarField::constant(grid, G),
                        PeriodicScalarField::constant(grid, H), b);
}

std::vector<MembershipViolation> CoefficientSet::check_membership(double tol) const {
  std::vector<MembershipViolation> out;
  const int s = grid().resolution();
  auto scan = [&](const PeriodicScalarField& f, const char* name, auto&& test) {
    std::vector<cplx> v = f.samples();
    for (int i = 0; i < s; ++i)
      for (int j = 0; j < s; ++j) {
        double x = v[std::size_t(i) * s + j].real();
        double bound = 0.0;
        if (test(x, bound))
          out.push_back({name, i, j, double(i) / s, double(j) / s, x, bound});
      }
  };
  const auto& b = bounds_;
  auto two_sided = [&](double x, double& bound) {
    if (x < b.q - tol) return bound = b.q, true;
    if (x > b.p + tol) return bound = b.p, true;
    return false;
  };
  scan(F_, "F", [&](double x, double& bound) {
    bound = b.F_bound;
    return std::abs(x) > b.F_bound + tol;
  });
  scan(G_, "G", two_sided);
  scan(H_, "H", two_sided);
  return out;
}

void CoefficientSet::require_membership(double tol) const {
  auto v = check_membership(tol);
  if (v.empty()) return;
  std::ostringstream os;
  os << "coefficient " << v.front().field << " = " << v.front().value << " at x = ("
     << v.front().x1 << ", " << v.front().x2 << ") violates bound " << v.front().bound << " ("
     << v.size() << " violating samples)";
  throw InadmissibleParameters(os.str());
}

bool CoefficientSet::is_constant() const { return is_const(F_) && is_const(G_) && is_const(H_); }

CoefficientSet CoefficientSet::regrid(const FourierGrid& target) const {
  return CoefficientSet(F_.regrid(target), G_.regrid(target), H_.regrid(target), bounds_);
}

}  // namespace pdirac
