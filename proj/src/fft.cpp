#include "pdirac/fft.hpp"

#include <fftw3.h>

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>
#include <vector>

namespace pdirac::fft {
namespace {

// Plans are created once per shape; fftw_execute_dft on distinct buffers is
// thread-safe, plan creation is not.
std::mutex plan_mutex;
std::map<std::tuple<int, int, int>, fftw_plan> plans;

fftw_plan get_plan(int rows, int cols, int sign) {
  std::lock_guard<std::mutex> lock(plan_mutex);
  auto key = std::make_tuple(rows, cols, sign);
  auto it = plans.find(key);
  if (it != plans.end()) return it->second;
  std::vector<std::complex<double>> scratch(std::size_t(rows) * cols);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  int s = sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD;
  fftw_plan p = rows == 1 ? fftw_plan_dft_1d(cols, buf, buf, s, flags)
                          : fftw_plan_dft_2d(rows, cols, buf, buf, s, flags);
  if (!p) throw std::runtime_error("fftw plan creation failed");
  plans.emplace(key, p);
  return p;
}

}  // namespace

void transform_2d(std::complex<double>* data, int rows, int cols, int sign) {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(get_plan(rows, cols, sign), buf, buf);
}

void transform_1d(std::complex<double>* data, int n, int sign) {
  auto* buf = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(get_plan(1, n, sign), buf, buf);
}

}  // namespace pdirac::fft
