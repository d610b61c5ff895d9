#pragma once

// Thin RAII layer over FFTW's real-to-complex transforms on cubic shapes.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace choquard::detail {

using Complex = std::complex<double>;

/// Real <-> half-complex transform of shape n^dim. Plans are created once per
/// shape (FFTW_ESTIMATE, so results are reproducible run to run) and shared.
class RealFft {
 public:
  static const RealFft& get(int dim, int n);

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  std::size_t real_size() const noexcept { return real_size_; }
  /// Complex layout is n^(dim-1) x (n/2+1), row-major.
  std::size_t complex_size() const noexcept { return complex_size_; }

  std::vector<Complex> forward(std::span<const double> in) const;
  /// Unnormalised inverse (FFTW convention); caller divides by n^dim.
  std::vector<double> inverse(std::span<const Complex> in) const;

  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  ~RealFft();

 private:
  RealFft(int dim, int n);

  int dim_;
  int n_;
  std::size_t real_size_;
  std::size_t complex_size_;
  void* forward_plan_;
  void* inverse_plan_;
};

/// Signed wavenumber of index k on an axis of length n.
inline int signed_mode(int k, int n) noexcept { return k <= n / 2 ? k : k - n; }

/// Calls f(flat_complex_index, kvec, weight) for every stored half-spectrum
/// coefficient; weight is 2 for modes standing in for a conjugate pair, else 1.
template <class F>
void for_each_mode(int dim, int n, F&& f) {
  const int half = n / 2 + 1;
  int k[3] = {0, 0, 0};
  const int outer = dim == 1 ? 1 : (dim == 2 ? n : n * n);
  std::size_t flat = 0;
  for (int o = 0; o < outer; ++o) {
    if (dim == 2) {
      k[0] = signed_mode(o, n);
    } else if (dim == 3) {
      k[0] = signed_mode(o / n, n);
      k[1] = signed_mode(o % n, n);
    }
    for (int last = 0; last < half; ++last, ++flat) {
      k[dim - 1] = last;
      const double weight = (last == 0 || last == n / 2) ? 1.0 : 2.0;
      f(flat, k, weight);
    }
  }
}

}  // namespace choquard::detail
