#include "fft.hpp"

#include <fftw3.h>

#include <map>
#include <memory>
#include <mutex>
#include <utility>

namespace choquard::detail {

namespace {

// FFTW's planner is not thread-safe; execution with the new-array interface is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

RealFft::RealFft(int dim, int n) : dim_(dim), n_(n) {
  real_size_ = 1;
  for (int a = 0; a < dim; ++a) real_size_ *= static_cast<std::size_t>(n);
  complex_size_ = real_size_ / static_cast<std::size_t>(n) * static_cast<std::size_t>(n / 2 + 1);

  int dims[3] = {n, n, n};
  std::vector<double> r(real_size_);
  std::vector<Complex> c(complex_size_);
  auto* cptr = reinterpret_cast<fftw_complex*>(c.data());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  forward_plan_ = fftw_plan_dft_r2c(dim, dims, r.data(), cptr, flags);
  inverse_plan_ = fftw_plan_dft_c2r(dim, dims, cptr, r.data(), flags);
}

RealFft::~RealFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
  fftw_destroy_plan(static_cast<fftw_plan>(inverse_plan_));
}

const RealFft& RealFft::get(int dim, int n) {
  // Mutex first so it outlives the cache during static destruction.
  std::mutex& m = planner_mutex();
  static std::map<std::pair<int, int>, std::unique_ptr<RealFft>> cache;
  std::lock_guard lock(m);
  auto& slot = cache[{dim, n}];
  if (!slot) slot.reset(new RealFft(dim, n));
  return *slot;
}

std::vector<Complex> RealFft::forward(std::span<const double> in) const {
  std::vector<double> work(in.begin(), in.end());
  std::vector<Complex> out(complex_size_);
  fftw_execute_dft_r2c(static_cast<fftw_plan>(forward_plan_), work.data(),
                       reinterpret_cast<fftw_complex*>(out.data()));
  return out;
}

std::vector<double> RealFft::inverse(std::span<const Complex> in) const {
  // c2r overwrites its input.
  std::vector<Complex> work(in.begin(), in.end());
  std::vector<double> out(real_size_);
  fftw_execute_dft_c2r(static_cast<fftw_plan>(inverse_plan_),
                       reinterpret_cast<fftw_complex*>(work.data()), out.data());
  return out;
}

}  // namespace choquard::detail
