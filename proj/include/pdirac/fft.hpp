#pragma once

#include <complex>

namespace pdirac::fft {

/// In-place unnormalised DFTs. `sign = -1` computes sum f e^{-2 pi i ...}
/// (forward), `sign = +1` the inverse kernel. Safe to call concurrently.
void transform_2d(std::complex<double>* data, int rows, int cols, int sign);
void transform_1d(std::complex<double>* data, int n, int sign);

}  // namespace pdirac::fft
