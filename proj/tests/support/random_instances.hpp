#pragma once

#include <random>

#include "pdirac/assembly.hpp"
#include "pdirac/coefficient_set.hpp"

namespace pdirac::testing {

/// Real (when `real`) zero-mean trigonometric polynomial with modes
/// |N|_inf <= bandwidth, scaled so that its sup over the samples equals
/// `amplitude`.
PeriodicScalarField random_trig_poly(const FourierGrid& grid, std::mt19937_64& rng, int bandwidth,
                                     double amplitude, bool real = true);

/// Random coefficient triple strictly inside the class with bounds
/// (p, q, F_bound): G, H oscillate around (p + q)/2, |F| stays below F_bound.
CoefficientSet random_gamma_instance(const FourierGrid& grid, std::mt19937_64& rng,
                                     GammaBounds bounds = {2.0, 0.5, 1.0}, int bandwidth = 2);

Eigen::VectorXcd random_vector(int n, std::mt19937_64& rng);

}  // namespace pdirac::testing
