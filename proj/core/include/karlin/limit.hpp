#ifndef KARLIN_LIMIT_HPP
#define KARLIN_LIMIT_HPP

#include <vector>

#include "karlin/rng.hpp"

namespace karlin {

// A u-grid with the closed-form covariance matrix of the limit process Z
// and its Cholesky factor for sampling. Jitter policy: start at 0, then from
// 1e-12 multiply by 10 up to the 1e-6 cap; the value used is recorded.
struct GaussGrid {
  std::vector<double> u_grid;
  std::vector<double> cov;     // dense n x n, row major
  std::vector<double> factor;  // lower triangular
  double jitter = 0.0;
};

GaussGrid make_gauss_grid(std::vector<double> u_grid);

// factor * standard-normal vector: exact finite-dimensional law up to jitter.
std::vector<double> sample_Z_cholesky(const GaussGrid& grid, RngStream& rng);

// Cell grid for the white-noise integral representation of Z over the strip
// R x [0,1]. x_range must cover [u_min - 20, u_max + 20] so the integrand
// tail outside is below 1e-9.
struct WhiteNoiseDiscretization {
  double x_lo = -20.0;
  double x_hi = 20.0;
  double dx = 0.05;
  double dy = 0.01;
};

// Precomputed per-u cell weights; sampling shares one normal coefficient
// vector across the whole u-grid, preserving the joint law.
struct WhiteNoiseSampler {
  WhiteNoiseDiscretization disc;
  std::vector<double> u_grid;
  std::size_t n_cells = 0;
  std::vector<std::vector<double>> weights;  // [u index][cell]
};

WhiteNoiseSampler make_whitenoise_sampler(const WhiteNoiseDiscretization& disc,
                                          std::vector<double> u_grid);

std::vector<double> sample_Z_whitenoise(const WhiteNoiseSampler& sampler, RngStream& rng);

// Spectral density of Z: (1/(2 log 2)) (1/(pi x^2) - 1/(x sinh(pi x))),
// with an even Taylor branch near 0 to avoid cancellation.
double spectral_f(double x);

// Covariance at lag t recovered by quadrature of the spectral density:
// 2 int_0^inf cos(tx) f(x) dx, with an analytic 1/x^2 tail.
double fourier_r(double t);

// |fourier_r(t) - limit_cov(t, 0)|.
double fourier_check(double t);

// E (Z(u+h) - Z(u))^2 = 2 (1 - log(1+e^{-|h|})/log 2); ~ |h|/log 2 for small h.
double increment_variance(double h);

}  // namespace karlin

#endif
