#include "karlin/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>
#include <stdexcept>

#include "karlin/math_util.hpp"

namespace karlin {

namespace {

inline void kahan_add(double& sum, double& comp, double x) {
  double y = x - comp;
  double t = sum + y;
  comp = (t - sum) - y;
  sum = t;
}

}  // namespace

MomentAccumulator::MomentAccumulator(std::size_t dim)
    : dim_(dim),
      sum_(dim, 0.0),
      sum_c_(dim, 0.0),
      cross_(dim * (dim + 1) / 2, 0.0),
      cross_c_(dim * (dim + 1) / 2, 0.0) {
  if (dim == 0) throw std::invalid_argument("MomentAccumulator: dim must be positive");
}

void MomentAccumulator::accumulate(std::span<const double> coords) {
  if (coords.size() != dim_) {
    throw std::invalid_argument("MomentAccumulator: coordinate layout mismatch");
  }
  ++count_;
  std::size_t idx = 0;
  for (std::size_t i = 0; i < dim_; ++i) {
    kahan_add(sum_[i], sum_c_[i], coords[i]);
    for (std::size_t j = i; j < dim_; ++j, ++idx) {
      kahan_add(cross_[idx], cross_c_[idx], coords[i] * coords[j]);
    }
  }
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.dim_ != dim_) {
    throw std::invalid_argument("MomentAccumulator: merging mismatched layouts");
  }
  count_ += other.count_;
  for (std::size_t i = 0; i < dim_; ++i) kahan_add(sum_[i], sum_c_[i], other.sum_[i]);
  for (std::size_t i = 0; i < cross_.size(); ++i) {
    kahan_add(cross_[i], cross_c_[i], other.cross_[i]);
  }
}

std::vector<double> MomentAccumulator::mean() const {
  if (count_ == 0) throw std::logic_error("MomentAccumulator: mean of empty accumulator");
  std::vector<double> m(dim_);
  for (std::size_t i = 0; i < dim_; ++i) m[i] = sum_[i] / static_cast<double>(count_);
  return m;
}

std::vector<double> MomentAccumulator::mean_se() const {
  auto cov = empirical_cov();
  std::vector<double> se(dim_);
  for (std::size_t i = 0; i < dim_; ++i) {
    se[i] = std::sqrt(std::max(cov.at(i, i), 0.0) / static_cast<double>(count_));
  }
  return se;
}

MomentAccumulator::CovMatrix MomentAccumulator::empirical_cov() const {
  if (count_ < 2) throw std::logic_error("MomentAccumulator: covariance needs count >= 2");
  CovMatrix out;
  out.dim = dim_;
  out.cov.resize(dim_ * dim_);
  out.se.resize(dim_ * dim_);
  double n = static_cast<double>(count_);
  std::size_t idx = 0;
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = i; j < dim_; ++j, ++idx) {
      double c = (cross_[idx] - sum_[i] * sum_[j] / n) / (n - 1.0);
      out.cov[i * dim_ + j] = c;
      out.cov[j * dim_ + i] = c;
    }
  }
  for (std::size_t i = 0; i < dim_; ++i) {
    for (std::size_t j = 0; j < dim_; ++j) {
      double cii = std::max(out.at(i, i), 0.0), cjj = std::max(out.at(j, j), 0.0);
      double cij = out.at(i, j);
      out.se[i * dim_ + j] = std::sqrt((cii * cjj + cij * cij) / n);
    }
  }
  return out;
}

KsResult ks_statistic(std::vector<double> sample, RefCdf cdf, double rate) {
  if (sample.size() < 50) {
    throw std::invalid_argument("ks_statistic: sample size must be >= 50");
  }
  std::sort(sample.begin(), sample.end());
  double n = static_cast<double>(sample.size());
  double d = 0.0;
  for (std::size_t i = 0; i < sample.size(); ++i) {
    double f;
    switch (cdf) {
      case RefCdf::StdNormal:
        f = normal_cdf(sample[i]);
        break;
      case RefCdf::StdGumbel:
        f = std::exp(-std::exp(-sample[i]));
        break;
      case RefCdf::Exponential:
        f = sample[i] <= 0.0 ? 0.0 : -std::expm1(-rate * sample[i]);
        break;
    }
    d = std::max(d, (i + 1.0) / n - f);
    d = std::max(d, f - static_cast<double>(i) / n);
  }
  return {d, ks_p_value(d, sample.size())};
}

Chi2Result chi2_two_sample(const std::vector<std::int64_t>& counts_a,
                           const std::vector<std::int64_t>& counts_b,
                           double min_expected) {
  if (counts_a.size() != counts_b.size()) {
    throw std::invalid_argument("chi2_two_sample: histogram size mismatch");
  }
  double na = 0.0, nb = 0.0;
  for (auto c : counts_a) na += static_cast<double>(c);
  for (auto c : counts_b) nb += static_cast<double>(c);
  if (na == 0.0 || nb == 0.0) throw std::invalid_argument("chi2_two_sample: empty sample");
  double ra = std::sqrt(nb / na), rb = std::sqrt(na / nb);
  // pool adjacent cells until the combined count is large enough
  double stat = 0.0;
  int bins = 0;
  double a_pool = 0.0, b_pool = 0.0;
  for (std::size_t i = 0; i < counts_a.size(); ++i) {
    a_pool += static_cast<double>(counts_a[i]);
    b_pool += static_cast<double>(counts_b[i]);
    bool last = (i + 1 == counts_a.size());
    if (!last && a_pool + b_pool < 2.0 * min_expected) continue;
    if (a_pool + b_pool > 0.0) {
      double diff = ra * a_pool - rb * b_pool;
      stat += diff * diff / (a_pool + b_pool);
      ++bins;
    }
    a_pool = b_pool = 0.0;
  }
  Chi2Result out;
  out.statistic = stat;
  out.dof = std::max(bins - 1, 1);
  out.p_value = chi2_sf(stat, out.dof);
  return out;
}

TrendResult trend_diagnostic(const std::vector<std::pair<double, double>>& scale_deviation,
                             double slack) {
  if (scale_deviation.size() < 3) {
    throw std::invalid_argument("trend_diagnostic: need at least 3 scales");
  }
  for (std::size_t i = 1; i < scale_deviation.size(); ++i) {
    if (!(scale_deviation[i].first > scale_deviation[i - 1].first)) {
      throw std::invalid_argument("trend_diagnostic: scales must be strictly increasing");
    }
  }
  TrendResult out;
  out.pass = true;
  std::ostringstream os;
  for (std::size_t i = 0; i < scale_deviation.size(); ++i) {
    double dev = std::abs(scale_deviation[i].second);
    if (i > 0) {
      double prev = std::abs(scale_deviation[i - 1].second);
      if (dev > prev * (1.0 + slack)) out.pass = false;
    }
    os << (i ? "; " : "") << "scale " << scale_deviation[i].first << ": |dev| " << dev;
  }
  out.report = os.str();
  return out;
}

}  // namespace karlin
