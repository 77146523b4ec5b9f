#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "karlin/limit.hpp"
#include "karlin/moments.hpp"
#include "karlin/rng.hpp"
#include "karlin/stats.hpp"

using namespace karlin;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kLog2 = 0.69314718055994530942;
}  // namespace

TEST_CASE("covariance grid is unit-diagonal and factorizes") {
  auto g = make_gauss_grid({-2.0, -0.5, 0.0, 1.0, 3.0});
  const std::size_t n = g.u_grid.size();
  for (std::size_t i = 0; i < n; ++i) {
    CHECK(g.cov[i * n + i] == doctest::Approx(1.0));
    for (std::size_t j = 0; j < n; ++j) {
      CHECK(g.cov[i * n + j] == g.cov[j * n + i]);
      // L L^T reproduces the covariance
      double rec = 0.0;
      for (std::size_t k = 0; k <= std::min(i, j); ++k)
        rec += g.factor[i * n + k] * g.factor[j * n + k];
      CHECK(std::abs(rec - g.cov[i * n + j]) <= 1e-10 + g.jitter);
    }
  }
}

TEST_CASE("covariance grid stays factorizable up to 200 points") {
  std::vector<double> grid;
  for (int i = 0; i < 200; ++i) grid.push_back(-4.0 + i * 0.04);
  auto g = make_gauss_grid(grid);
  CHECK(g.jitter <= 1e-10);
}

TEST_CASE("factorized sampler reproduces the covariance") {
  auto g = make_gauss_grid({0.0, 1.0});
  MomentAccumulator acc(2);
  for (int r = 0; r < 20000; ++r) {
    RngStream rng(3, r);
    acc.accumulate(sample_Z_cholesky(g, rng));
  }
  auto emp = acc.empirical_cov();
  CHECK(std::abs(emp.at(0, 0) - 1.0) < 3.0 * emp.se_at(0, 0));
  CHECK(std::abs(emp.at(0, 1) - limit_cov(0.0, 1.0)) < 3.0 * emp.se_at(0, 1));
}

TEST_CASE("white-noise sampler is centered with near-unit variance") {
  auto s = make_whitenoise_sampler(WhiteNoiseDiscretization{}, {0.0});
  MomentAccumulator acc(1);
  for (int r = 0; r < 1500; ++r) {
    RngStream rng(4, r);
    acc.accumulate(sample_Z_whitenoise(s, rng));
  }
  CHECK(std::abs(acc.mean()[0]) < 4.0 * acc.mean_se()[0]);
  auto emp = acc.empirical_cov();
  CHECK(std::abs(emp.at(0, 0) - 1.0) < 0.02 + 3.0 * emp.se_at(0, 0));
  CHECK_THROWS_AS(make_whitenoise_sampler(WhiteNoiseDiscretization{}, {-10.0, 10.0}),
                  std::domain_error);
}

TEST_CASE("spectral density values and shape") {
  CHECK(spectral_f(0.0) == doctest::Approx(kPi / (12.0 * kLog2)).epsilon(1e-14));
  CHECK(spectral_f(0.0) == doctest::Approx(0.377696678485599).epsilon(1e-13));
  CHECK(spectral_f(1.0) == doctest::Approx(0.167150898937909).epsilon(1e-13));
  // even, positive, decreasing on (0, inf), vanishing at infinity
  double prev = spectral_f(0.0);
  for (double x = 0.25; x <= 12.0; x += 0.25) {
    double fx = spectral_f(x);
    CHECK(fx > 0.0);
    CHECK(fx < prev);
    CHECK(spectral_f(-x) == fx);
    prev = fx;
  }
  CHECK(spectral_f(50.0) < 1e-4);
  // series branch (x < 0.2) and closed-form branch against frozen values
  CHECK(spectral_f(0.19) == doctest::Approx(0.362565824946524892).epsilon(1e-11));
  CHECK(spectral_f(0.21) == doctest::Approx(0.359360199187922293).epsilon(1e-13));
}

TEST_CASE("reciprocal-sinh partial fraction identity") {
  // 1/sinh z - 1/z = 2z sum_{n>=1} (-1)^n / (z^2 + pi^2 n^2), increasing N
  for (double z : {0.5, 1.0, 2.0}) {
    double target = 1.0 / std::sinh(z) - 1.0 / z;
    double prev_err = 1e9;
    for (int N : {10, 100, 1000}) {
      double s = 0.0;
      for (int n = N; n >= 1; --n)
        s += (n % 2 ? -1.0 : 1.0) / (z * z + kPi * kPi * n * n);
      double err = std::abs(2.0 * z * s - target);
      CHECK(err < prev_err);
      prev_err = err;
    }
    CHECK(prev_err < 1e-5);
  }
}

TEST_CASE("Fourier transform of the density recovers the covariance") {
  CHECK(std::abs(fourier_r(0.0) - 1.0) < 1e-8);
  CHECK(fourier_check(1.0) < 1e-6);
  CHECK(fourier_check(2.5) < 1e-6);
}

TEST_CASE("increment variance expansion") {
  CHECK(increment_variance(0.0) == 0.0);
  CHECK(increment_variance(0.01) == doctest::Approx(0.01 / kLog2).epsilon(0.01));
  CHECK(increment_variance(1.0) ==
        doctest::Approx(2.0 * (1.0 - limit_cov(0.0, 1.0))).epsilon(1e-14));
  // empirical mean-square increment from factorized paths
  auto g = make_gauss_grid({0.0, 0.5});
  double sum = 0.0, sum2 = 0.0;
  const int n = 10000;
  for (int r = 0; r < n; ++r) {
    RngStream rng(8, r);
    auto z = sample_Z_cholesky(g, rng);
    double d2 = (z[1] - z[0]) * (z[1] - z[0]);
    sum += d2;
    sum2 += d2 * d2;
  }
  double mean = sum / n;
  double se = std::sqrt((sum2 / n - mean * mean) / n);
  CHECK(std::abs(mean - increment_variance(0.5)) < 3.0 * se);
}
