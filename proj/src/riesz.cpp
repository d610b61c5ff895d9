#include "choquard/riesz.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <numbers>
#include <string>

#include "choquard/errors.hpp"
#include "fft.hpp"

namespace choquard {

using detail::RealFft;

namespace {

// Gamma(a, x) x^{-a}
double scaled_upper_gamma(double a, double x) { return boost::math::tgamma(a, x) * std::pow(x, -a); }

}  // namespace

double epstein_zeta(int dim, double s) {
  if (dim < 1 || dim > 3) throw ParameterError("epstein_zeta: dim must be 1, 2 or 3");
  if (!(s > 0.0 && s < dim)) throw ParameterError("epstein_zeta: s must lie in (0, dim)");
  // pi^{-s/2} Gamma(s/2) Z(s)
  //   = sum_{m != 0} [G(s/2, pi m^2) + G((d-s)/2, pi m^2)] - 2/s - 2/(d-s),
  // with G(a, x) = Gamma(a, x) x^{-a}; terms decay like exp(-pi m^2).
  constexpr int reach = 5;
  const int lo[3] = {-reach, dim > 1 ? -reach : 0, dim > 2 ? -reach : 0};
  const int hi[3] = {reach, dim > 1 ? reach : 0, dim > 2 ? reach : 0};
  double sum = 0.0;
  for (int i = lo[0]; i <= hi[0]; ++i) {
    for (int j = lo[1]; j <= hi[1]; ++j) {
      for (int k = lo[2]; k <= hi[2]; ++k) {
        const int m2 = i * i + j * j + k * k;
        if (m2 == 0) continue;
        const double x = std::numbers::pi * m2;
        sum += scaled_upper_gamma(0.5 * s, x) + scaled_upper_gamma(0.5 * (dim - s), x);
      }
    }
  }
  sum -= 2.0 / s + 2.0 / (dim - s);
  return sum * std::pow(std::numbers::pi, 0.5 * s) / std::tgamma(0.5 * s);
}

RieszKernel::RieszKernel(const GridSpec& grid, double gamma) : grid_(grid), gamma_(gamma) {
  const int d = grid.dim();
  if (!(gamma > 0.0 && gamma < d)) {
    throw ParameterError("riesz: order gamma must lie in (0, dim) = (0, " + std::to_string(d) +
                         "), got " + std::to_string(gamma));
  }
  const double h = grid.spacing();
  const double expo = gamma - d;
  origin_value_ = -epstein_zeta(d, d - gamma) * std::pow(h, expo);

  const int m = 2 * grid.n();
  const auto& fft = RealFft::get(d, m);
  std::vector<double> kernel(fft.real_size());
  int idx[3] = {0, 0, 0};
  for (std::size_t flat = 0; flat < kernel.size(); ++flat) {
    std::size_t rest = flat;
    for (int a = d - 1; a >= 0; --a) {
      idx[a] = static_cast<int>(rest % m);
      rest /= m;
    }
    double r2 = 0.0;
    for (int a = 0; a < d; ++a) {
      const double x = detail::signed_mode(idx[a], m) * h;
      r2 += x * x;
    }
    kernel[flat] = r2 == 0.0 ? origin_value_ : std::pow(r2, 0.5 * expo);
  }
  spectrum_ = fft.forward(kernel);
}

Field RieszKernel::apply(const Field& f) const {
  if (!(f.grid() == grid_)) throw ParameterError("riesz: grid mismatch");
  const int d = grid_.dim();
  const int n = grid_.n();
  const int m = 2 * n;
  const auto& fft = RealFft::get(d, m);

  // Embed f in the low corner of the doubled box.
  std::vector<double> padded(fft.real_size(), 0.0);
  const std::size_t rows = f.size() / n;
  for (std::size_t row = 0; row < rows; ++row) {
    std::size_t prow = 0;
    std::size_t rest = row;
    std::size_t stride = 1;
    for (int a = d - 2; a >= 0; --a) {
      prow += (rest % n) * stride;
      rest /= n;
      stride *= m;
    }
    std::copy_n(f.values().begin() + row * n, n, padded.begin() + prow * m);
  }

  auto spec = fft.forward(padded);
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= spectrum_[i];
  const auto conv = fft.inverse(spec);

  const double scale = grid_.cell_volume() / static_cast<double>(fft.real_size());
  Field out(grid_);
  for (std::size_t row = 0; row < rows; ++row) {
    std::size_t prow = 0;
    std::size_t rest = row;
    std::size_t stride = 1;
    for (int a = d - 2; a >= 0; --a) {
      prow += (rest % n) * stride;
      rest /= n;
      stride *= m;
    }
    for (int j = 0; j < n; ++j) out[row * n + j] = conv[prow * m + j] * scale;
  }
  return out;
}

double RieszKernel::pair(const Field& f, const Field& g) const { return quad_dot(apply(f), g); }

Field riesz_convolve(const Field& u, double gamma) { return RieszKernel(u.grid(), gamma).apply(u); }

}  // namespace choquard
