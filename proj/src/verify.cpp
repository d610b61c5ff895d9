#include "choquard/verify.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "choquard/errors.hpp"
#include "choquard/random_fields.hpp"
#include "fft.hpp"

namespace choquard {

namespace {

void check_translations(const GridSpec& grid, const std::vector<double>& translations) {
  if (translations.size() < 3) throw ParameterError("decay curve: need at least 3 translations");
  for (std::size_t i = 0; i < translations.size(); ++i) {
    const double z = translations[i];
    if (!(z >= 0.0)) throw ParameterError("decay curve: translations must be non-negative");
    if (i > 0 && !(z > translations[i - 1])) throw ParameterError("decay curve: translations must increase strictly");
    if (!(z < 0.5 * grid.box_length())) {
      throw ParameterError("decay curve: translation " + format_real(z) + " exceeds the headroom L/2 = " +
                           format_real(0.5 * grid.box_length()));
    }
  }
}

double ratio(double error, double magnitude) { return error == 0.0 ? 0.0 : error / magnitude; }

template <class F>
DecayCurve curve(const std::vector<double>& translations, double magnitude, F&& defect) {
  DecayCurve out;
  out.distances = translations;
  out.magnitude = magnitude;
  for (double z : translations) out.errors.push_back(defect(z));
  out.terminal_ratio = ratio(out.errors.back(), magnitude);
  return out;
}

double power_integral(const Field& u, double r) { return integrate(abs_pow(u, r)); }

double pairing(const RieszKernel& kernel, const Field& v, const Field& h, double r) {
  return quad_dot(hadamard(kernel.apply(abs_pow(v, r)), odd_pow(v, r - 1.0)), h);
}

}  // namespace

Field translate(const Field& u, double z) {
  const GridSpec& g = u.grid();
  const int n = g.n();
  const double cells = z / g.spacing();
  const double whole = std::round(cells);
  if (std::abs(cells - whole) < 1e-12) {
    const int shift = static_cast<int>(((static_cast<long long>(whole) % n) + n) % n);
    Field out(g);
    const std::size_t stride = u.size() / static_cast<std::size_t>(n);
    for (int i = 0; i < n; ++i) {
      const std::size_t src = static_cast<std::size_t>((i - shift + n) % n) * stride;
      const std::size_t dst = static_cast<std::size_t>(i) * stride;
      for (std::size_t j = 0; j < stride; ++j) out[dst + j] = u[src + j];
    }
    return out;
  }
  const auto& fft = detail::RealFft::get(g.dim(), n);
  auto spec = fft.forward(u.values());
  const double base = 2.0 * std::numbers::pi / g.box_length();
  detail::for_each_mode(g.dim(), n, [&](std::size_t flat, const int* k, double) {
    const double arg = base * k[0] * z;
    spec[flat] *= std::abs(k[0]) == n / 2 ? detail::Complex(std::cos(arg), 0.0) : std::polar(1.0, -arg);
  });
  auto values = fft.inverse(spec);
  const double scale = 1.0 / static_cast<double>(u.size());
  for (double& v : values) v *= scale;
  return Field(g, std::move(values));
}

DecayCurve brezis_lieb_local(const Field& w, const Field& u, const std::vector<double>& translations,
                             double q_exp, double r_exp) {
  require_same_grid(w, u, "brezis_lieb_local");
  check_translations(u.grid(), translations);
  if (!(q_exp >= 1.0 && r_exp >= 1.0)) throw ParameterError("brezis_lieb_local: exponents must be >= 1");
  const Field uq = abs_pow(u, q_exp);
  const double magnitude = power_integral(u, r_exp) + power_integral(w, r_exp);
  return curve(translations, magnitude, [&](double z) {
    const Field wz = translate(w, z);
    const Field un = u + wz;
    double acc = 0.0;
    for (std::size_t i = 0; i < un.size(); ++i) {
      const double d = std::pow(std::abs(un[i]), q_exp) - std::pow(std::abs(wz[i]), q_exp) - uq[i];
      acc += std::pow(std::abs(d), r_exp / q_exp);
    }
    return acc * u.grid().cell_volume();
  });
}

DecayCurve brezis_lieb_nonlocal(const Field& u, const Field& w, const std::vector<double>& translations,
                                double gamma, double r_exp) {
  require_same_grid(u, w, "brezis_lieb_nonlocal");
  check_translations(u.grid(), translations);
  const RieszKernel kernel(u.grid(), gamma);
  const auto D = [&](const Field& v) {
    const Field d = abs_pow(v, r_exp);
    return kernel.pair(d, d);
  };
  const double Du = D(u);
  return curve(translations, Du + D(w), [&](double z) {
    const Field wz = translate(w, z);
    return std::abs(D(u + wz) - D(wz) - Du);
  });
}

DecayCurve brezis_lieb_pairing(const Field& u, const Field& w, const Field& h,
                               const std::vector<double>& translations, double gamma, double r_exp) {
  require_same_grid(u, w, "brezis_lieb_pairing");
  require_same_grid(u, h, "brezis_lieb_pairing");
  check_translations(u.grid(), translations);
  const RieszKernel kernel(u.grid(), gamma);
  const double Pu = pairing(kernel, u, h, r_exp);
  return curve(translations, std::abs(Pu), [&](double z) {
    return std::abs(pairing(kernel, u + translate(w, z), h, r_exp) - Pu);
  });
}

DecayCurve energy_splitting(const Field& u, const Field& w, const std::vector<double>& translations,
                            const Model& model) {
  require_same_grid(u, w, "energy_splitting");
  check_translations(u.grid(), translations);
  if (!model.constant_potential()) {
    throw UnsupportedRegime("energy_splitting: J is translation invariant only for a constant potential, got " +
                            model.params().potential.to_string());
  }
  const double Eu = energy(u, model).total;
  return curve(translations, std::abs(Eu) + std::abs(functional_J(w, model)), [&](double z) {
    const Field wz = translate(w, z);
    return std::abs(energy(u + wz, model).total - Eu - functional_J(wz, model));
  });
}

HlsSweep hls_sweep(const GridSpec& grid, double gamma, double r, double t, int count, std::uint64_t seed) {
  if (count < 1) throw ParameterError("hls_sweep: count must be >= 1");
  const RieszKernel kernel(grid, gamma);
  RandomFieldGenerator gen(seed);
  HlsSweep out;
  for (int i = 0; i < count; ++i) {
    const Field f = gen.next(grid);
    const Field g = gen.next(grid);
    const double ratio = hls_check(f, g, kernel, r, t).ratio();
    out.ratios.push_back(ratio);
    out.max_ratio = std::max(out.max_ratio, ratio);
  }
  return out;
}

FdSuite gradient_fd_suite(const Model& model, int count, std::uint64_t seed, double eps) {
  if (!(eps >= 1e-7 && eps <= 1e-3)) {
    throw ParameterError("gradient_fd_suite: eps must lie in [1e-7, 1e-3], got " + format_real(eps));
  }
  RandomFieldGenerator gen(seed);
  FdSuite out;
  for (int i = 0; i < count; ++i) {
    Field u = gen.next_positive(model.grid());
    for (double& x : u.values()) x += 0.2;
    const Field v = 10.0 * gen.next(model.grid());
    const double pair = first_variation_pair(u, v, model);
    const double fd = (energy(u + eps * v, model).total - energy(u - eps * v, model).total) / (2.0 * eps);
    const double err = std::abs(pair - fd) / (1.0 + std::abs(pair));
    out.rel_errors.push_back(err);
    out.max_rel_error = std::max(out.max_rel_error, err);
  }
  return out;
}

FdSlope gradient_fd_slope(const Model& model, int count, std::uint64_t seed, const std::vector<double>& eps) {
  if (eps.size() < 2) throw ParameterError("gradient_fd_slope: need at least two step sizes");
  FdSlope out;
  out.eps = eps;
  double mx = 0.0, my = 0.0;
  for (double e : eps) {
    const double err = gradient_fd_suite(model, count, seed, e).max_rel_error;
    out.max_rel_errors.push_back(err);
    mx += std::log(e);
    my += std::log(err);
  }
  mx /= static_cast<double>(eps.size());
  my /= static_cast<double>(eps.size());
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    const double dx = std::log(eps[i]) - mx;
    num += dx * (std::log(out.max_rel_errors[i]) - my);
    den += dx * dx;
  }
  out.slope = num / den;
  return out;
}

}  // namespace choquard
