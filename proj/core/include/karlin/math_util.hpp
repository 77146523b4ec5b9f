#ifndef KARLIN_MATH_UTIL_HPP
#define KARLIN_MATH_UTIL_HPP

#include <cstddef>
#include <functional>

namespace karlin {

// Compensated (Kahan) accumulator for long sums.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

// Regularized upper incomplete gamma Q(a, x) = Gamma(a,x)/Gamma(a).
double gamma_q(double a, double x);

// Chi-square survival function with k degrees of freedom.
double chi2_sf(double x, int k);

// Standard normal CDF.
double normal_cdf(double x);

// Kolmogorov distribution tail Q(lambda) = 2 sum (-1)^{k-1} exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

// Asymptotic p-value for the one-sample KS statistic d at sample size n
// (Stephens' small-sample adjustment of the argument).
double ks_p_value(double d, std::size_t n);

// Tail sine integral int_y^inf sin(x)/x dx, asymptotic expansion; y >= 8.
double si_tail(double y);

// Adaptive Simpson quadrature of fn on [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& fn, double a, double b,
                        double tol, int max_depth = 60);

}  // namespace karlin

#endif
