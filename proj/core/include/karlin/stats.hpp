#ifndef KARLIN_STATS_HPP
#define KARLIN_STATS_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace karlin {

// Mergeable streaming estimator of means and cross-moments for a fixed
// coordinate layout. Single writer; cross-thread aggregation via merge only.
class MomentAccumulator {
 public:
  explicit MomentAccumulator(std::size_t dim);

  std::size_t dim() const { return dim_; }
  std::size_t count() const { return count_; }

  void accumulate(std::span<const double> coords);
  void merge(const MomentAccumulator& other);

  // Sample means; throws on an empty accumulator.
  std::vector<double> mean() const;
  std::vector<double> mean_se() const;

  struct CovMatrix {
    std::size_t dim = 0;
    std::vector<double> cov;  // dense, row major, unbiased
    std::vector<double> se;   // per entry, ~ sqrt((c_ii c_jj + c_ij^2)/N)
    double at(std::size_t i, std::size_t j) const { return cov[i * dim + j]; }
    double se_at(std::size_t i, std::size_t j) const { return se[i * dim + j]; }
  };

  CovMatrix empirical_cov() const;  // requires count >= 2

 private:
  std::size_t dim_;
  std::size_t count_ = 0;
  std::vector<double> sum_, sum_c_;    // compensated coordinate sums
  std::vector<double> cross_, cross_c_;  // upper-triangle cross sums
};

enum class RefCdf { StdNormal, StdGumbel, Exponential };

struct KsResult {
  double statistic = 0.0;
  double p_value = 1.0;
};

// Classical one-sample KS statistic with the asymptotic p-value.
// `rate` applies to the Exponential reference only.
KsResult ks_statistic(std::vector<double> sample, RefCdf cdf, double rate = 1.0);

// Two-sample chi-square on aligned histograms (cells pooled up to a minimum
// expected count); p-value from the chi-square tail.
struct Chi2Result {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
};

Chi2Result chi2_two_sample(const std::vector<std::int64_t>& counts_a,
                           const std::vector<std::int64_t>& counts_b,
                           double min_expected = 5.0);

// Operationalizes an asymptotic "~" claim: passes iff |deviation| is
// nonincreasing across increasing scales, with 10% slack per step to absorb
// Monte Carlo noise.
struct TrendResult {
  bool pass = false;
  std::string report;
};

TrendResult trend_diagnostic(const std::vector<std::pair<double, double>>& scale_deviation,
                             double slack = 0.10);

}  // namespace karlin

#endif
