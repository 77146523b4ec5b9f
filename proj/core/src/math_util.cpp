#include "karlin/math_util.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

namespace karlin {

namespace {

// series expansion of P(a,x), x < a+1
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int n = 0; n < 500; ++n) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// continued fraction for Q(a,x), x >= a+1
double gamma_q_cf(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_q(double a, double x) {
  if (x < 0.0 || a <= 0.0) throw std::domain_error("gamma_q: bad arguments");
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
  return gamma_q_cf(a, x);
}

double chi2_sf(double x, int k) { return gamma_q(0.5 * k, 0.5 * x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double kolmogorov_q(double lambda) {
  if (lambda < 1e-8) return 1.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 200; ++k) {
    double term = sign * std::exp(-2.0 * k * k * lambda * lambda);
    sum += term;
    if (std::abs(term) < 1e-16) break;
    sign = -sign;
  }
  double q = 2.0 * sum;
  if (q < 0.0) q = 0.0;
  if (q > 1.0) q = 1.0;
  return q;
}

double ks_p_value(double d, std::size_t n) {
  double sn = std::sqrt(static_cast<double>(n));
  return kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
}

double si_tail(double y) {
  // int_y^inf sin(x)/x dx = f(y) cos y + g(y) sin y with the standard
  // auxiliary asymptotic series; truncation error ~ 10!/y^11.
  double y2 = y * y;
  double f = (1.0 - 2.0 / y2 + 24.0 / (y2 * y2) - 720.0 / (y2 * y2 * y2) +
              40320.0 / (y2 * y2 * y2 * y2)) / y;
  double g = (1.0 - 6.0 / y2 + 120.0 / (y2 * y2) - 5040.0 / (y2 * y2 * y2) +
              362880.0 / (y2 * y2 * y2 * y2)) / y2;
  return f * std::cos(y) + g * std::sin(y);
}

namespace {

double simpson(const std::function<double(double)>& fn, double a, double fa, double b,
               double fb, double m, double fm) {
  return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adaptive_step(const std::function<double(double)>& fn, double a, double fa,
                     double b, double fb, double m, double fm, double whole, double tol,
                     int depth) {
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = fn(lm), frm = fn(rm);
  double left = simpson(fn, a, fa, m, fm, lm, flm);
  double right = simpson(fn, m, fm, b, fb, rm, frm);
  double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol) {
    return left + right + delta / 15.0;
  }
  return adaptive_step(fn, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
         adaptive_step(fn, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& fn, double a, double b,
                        double tol, int max_depth) {
  double fa = fn(a), fb = fn(b), m = 0.5 * (a + b), fm = fn(m);
  double whole = simpson(fn, a, fa, b, fb, m, fm);
  return adaptive_step(fn, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

}  // namespace karlin
