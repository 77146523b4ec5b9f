#include "karlin/limit.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "karlin/math_util.hpp"
#include "karlin/moments.hpp"

namespace karlin {

namespace {

constexpr double kLog2 = 0.6931471805599453;
constexpr double kPi = std::numbers::pi;

// Cholesky with the documented jitter ladder; returns the jitter used or
// throws past the cap.
double cholesky_with_jitter(const std::vector<double>& cov, std::size_t n,
                            std::vector<double>& factor) {
  double jitter = 0.0;
  for (;;) {
    factor.assign(n * n, 0.0);
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      for (std::size_t j = 0; j <= i; ++j) {
        double sum = cov[i * n + j] + (i == j ? jitter : 0.0);
        for (std::size_t k = 0; k < j; ++k) sum -= factor[i * n + k] * factor[j * n + k];
        if (i == j) {
          if (sum <= 0.0) {
            ok = false;
            break;
          }
          factor[i * n + j] = std::sqrt(sum);
        } else {
          factor[i * n + j] = sum / factor[j * n + j];
        }
      }
    }
    if (ok) return jitter;
    if (jitter == 0.0) {
      jitter = 1e-12;
    } else if (jitter < 1e-6) {
      jitter *= 10.0;
    } else {
      throw std::runtime_error("cholesky: factorization failed at max jitter 1e-6");
    }
  }
}

double whitenoise_kernel(double x, double u) {
  return std::exp(-std::exp(-(x - u)));
}

}  // namespace

GaussGrid make_gauss_grid(std::vector<double> u_grid) {
  GaussGrid grid;
  grid.u_grid = std::move(u_grid);
  std::size_t n = grid.u_grid.size();
  grid.cov.resize(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      grid.cov[i * n + j] = limit_cov(grid.u_grid[i], grid.u_grid[j]);
    }
  }
  grid.jitter = cholesky_with_jitter(grid.cov, n, grid.factor);
  return grid;
}

std::vector<double> sample_Z_cholesky(const GaussGrid& grid, RngStream& rng) {
  std::size_t n = grid.u_grid.size();
  std::vector<double> z(n), out(n, 0.0);
  for (auto& v : z) v = rng.normal();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k <= i; ++k) s += grid.factor[i * n + k] * z[k];
    out[i] = s;
  }
  return out;
}

WhiteNoiseSampler make_whitenoise_sampler(const WhiteNoiseDiscretization& disc,
                                          std::vector<double> u_grid) {
  if (!u_grid.empty() &&
      (disc.x_lo > u_grid.front() - 20.0 || disc.x_hi < u_grid.back() + 20.0)) {
    throw std::domain_error("whitenoise: x_range must cover [u_min-20, u_max+20]");
  }
  WhiteNoiseSampler s;
  s.disc = disc;
  s.u_grid = std::move(u_grid);
  std::size_t nx = static_cast<std::size_t>(std::ceil((disc.x_hi - disc.x_lo) / disc.dx));
  std::size_t ny = static_cast<std::size_t>(std::ceil(1.0 / disc.dy));
  s.n_cells = nx * ny;
  double sqrt_area = std::sqrt(disc.dx * disc.dy);
  double scale = sqrt_area / std::sqrt(kLog2);
  s.weights.resize(s.u_grid.size());
  for (std::size_t ui = 0; ui < s.u_grid.size(); ++ui) {
    auto& w = s.weights[ui];
    w.resize(s.n_cells);
    double u = s.u_grid[ui];
    for (std::size_t ix = 0; ix < nx; ++ix) {
      double x = disc.x_lo + (ix + 0.5) * disc.dx;
      double a = whitenoise_kernel(x, u);
      for (std::size_t iy = 0; iy < ny; ++iy) {
        double y = (iy + 0.5) * disc.dy;
        w[ix * ny + iy] = ((y <= a ? 1.0 : 0.0) - a) * scale;
      }
    }
  }
  return s;
}

std::vector<double> sample_Z_whitenoise(const WhiteNoiseSampler& sampler, RngStream& rng) {
  std::vector<double> coeff(sampler.n_cells);
  for (auto& c : coeff) c = rng.normal();
  std::vector<double> out(sampler.u_grid.size(), 0.0);
  for (std::size_t ui = 0; ui < out.size(); ++ui) {
    const auto& w = sampler.weights[ui];
    double s = 0.0;
    for (std::size_t c = 0; c < w.size(); ++c) s += w[c] * coeff[c];
    out[ui] = s;
  }
  return out;
}

double spectral_f(double x) {
  double ax = std::abs(x);
  // crossover chosen so both branches agree to ~1e-12: the closed form loses
  // ~1.5 digits to cancellation below it, the series truncates above it
  constexpr double kCrossover = 0.2;
  if (ax >= kCrossover) {
    return (1.0 / (kPi * x * x) - 1.0 / (x * std::sinh(kPi * x))) / (2.0 * kLog2);
  }
  // even series of 1/(pi x^2) - 1/(x sinh(pi x)) = pi sum c_n (pi x)^{2n},
  // from the csch expansion 1/z - 1/sinh z = z/6 - 7z^3/360 + ...
  static constexpr double kCoeff[] = {
      1.0 / 6.0,
      -7.0 / 360.0,
      31.0 / 15120.0,
      -127.0 / 604800.0,
      2.1336045641601197e-05,
      -2.1633474427786597e-06,
      2.1923271344567641e-07,
      -2.2213930853920415e-08,
      2.2507674795567867e-09,
  };
  double z2 = (kPi * ax) * (kPi * ax);
  double acc = 0.0;
  double pw = 1.0;
  for (double c : kCoeff) {
    acc += c * pw;
    pw *= z2;
  }
  return kPi * acc / (2.0 * kLog2);
}

double fourier_r(double t) {
  t = std::abs(t);
  // Beyond x0 the sinh part of f is below 1e-20 and f(x) = 1/(2 pi log2 x^2);
  // that tail is integrated analytically. For t > 0 the closed-form tail
  // needs the sine-integral asymptotics, valid for t*x0 >= ~12.
  double x0 = 15.0;
  if (t > 0.0 && t * x0 < 12.0) x0 = 12.0 / t;
  double body = 2.0 * adaptive_simpson(
                          [t](double x) { return std::cos(t * x) * spectral_f(x); }, 0.0,
                          x0, 1e-11);
  double tail;
  if (t == 0.0) {
    tail = 1.0 / (kPi * kLog2 * x0);
  } else {
    // 2 int_{x0}^inf cos(tx)/(2 pi log2 x^2) dx, by parts
    tail = (std::cos(t * x0) / x0 - t * si_tail(t * x0)) / (kPi * kLog2);
  }
  return body + tail;
}

double fourier_check(double t) { return std::abs(fourier_r(t) - limit_cov(t, 0.0)); }

double increment_variance(double h) { return 2.0 * (1.0 - limit_cov(h, 0.0)); }

}  // namespace karlin
