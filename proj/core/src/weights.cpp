#include "karlin/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "karlin/math_util.hpp"

namespace karlin {

namespace {

constexpr double kCdfTail = 1e-18;

std::uint64_t fnv1a(const void* data, std::size_t n, std::uint64_t h = 0xcbf29ce484222325ULL) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t hash_double(double x, std::uint64_t h) {
  std::uint64_t bits;
  std::memcpy(&bits, &x, sizeof bits);
  return fnv1a(&bits, sizeof bits, h);
}

}  // namespace

WeightModel WeightModel::weibull(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::domain_error("weibull: alpha must lie in the open interval (0,1)");
  }
  WeightModel m;
  m.kind_ = WeightKind::WeibullLike;
  m.alpha_ = alpha;
  // Direct summation of sum_k exp(-k^alpha) with an integral tail bound:
  // sum_{k>K} exp(-k^alpha) <= int_K^inf exp(-x^alpha) dx, evaluated by the
  // substitution y = x^alpha as a crude upper rectangle bound.
  KahanSum s;
  std::size_t k = 1;
  for (;;) {
    double term = std::exp(-std::pow(static_cast<double>(k), alpha));
    s.add(term);
    // tail bound: terms decay faster than the geometric sequence with ratio
    // exp(-(k+1)^alpha + k^alpha); bound the remainder by term * r / (1 - r)
    double r = std::exp(-std::pow(static_cast<double>(k) + 1.0, alpha) +
                        std::pow(static_cast<double>(k), alpha));
    double tail = term * r / (1.0 - r);
    if (tail < 1e-16 && k > 8) break;
    ++k;
  }
  m.normalizer_ = 1.0 / s.value();
  m.de_haan_ = DeHaanParams{1.0 / alpha - 1.0, 1.0 / alpha};
  m.build_cdf();
  return m;
}

WeightModel WeightModel::geometric(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("geometric: p must lie in the open interval (0,1)");
  }
  WeightModel m;
  m.kind_ = WeightKind::Geometric;
  m.geom_p_ = p;
  // no (beta, ell): the geometric counting function is not de Haan regular
  m.build_cdf();
  return m;
}

WeightModel WeightModel::custom(std::vector<double> weights) {
  if (weights.empty()) throw std::domain_error("custom: empty weight list");
  KahanSum total;
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w)) {
      throw std::domain_error("custom: weights must be positive and finite");
    }
    total.add(w);
  }
  WeightModel m;
  m.kind_ = WeightKind::Custom;
  m.custom_log_weights_.reserve(weights.size());
  double log_total = std::log(total.value());
  for (double w : weights) m.custom_log_weights_.push_back(log_total - std::log(w));
  m.build_cdf();
  return m;
}

void WeightModel::build_cdf() {
  cdf_.clear();
  KahanSum acc;
  if (kind_ == WeightKind::Custom) {
    for (std::size_t k = 1; k <= custom_log_weights_.size(); ++k) {
      acc.add(weight(k));
      cdf_.push_back(acc.value());
    }
    cdf_.back() = 1.0;
    return;
  }
  std::size_t k = 1;
  while (acc.value() < 1.0 - kCdfTail) {
    acc.add(weight(k));
    cdf_.push_back(acc.value());
    ++k;
    if (k > (1u << 20)) break;  // cap the table; sample_index scans past it
  }
}

double WeightModel::log_weight(std::size_t k) const {
  if (k == 0) throw std::domain_error("log_weight: k must be >= 1");
  switch (kind_) {
    case WeightKind::WeibullLike:
      return std::pow(static_cast<double>(k), alpha_) - std::log(normalizer_);
    case WeightKind::Geometric:
      return -std::log(geom_p_) - static_cast<double>(k - 1) * std::log1p(-geom_p_);
    case WeightKind::Custom:
      if (k > custom_log_weights_.size()) {
        return std::numeric_limits<double>::infinity();
      }
      return custom_log_weights_[k - 1];
  }
  return std::numeric_limits<double>::infinity();
}

double WeightModel::weight(std::size_t k) const { return std::exp(-log_weight(k)); }

std::optional<std::size_t> WeightModel::finite_size() const {
  if (kind_ == WeightKind::Custom) return custom_log_weights_.size();
  return std::nullopt;
}

std::size_t WeightModel::rho(double x) const {
  if (!(x > 0.0)) throw std::domain_error("rho: x must be positive");
  double bound = std::log(x);  // count k with -log p_k <= log x
  if (kind_ == WeightKind::Custom) {
    std::size_t n = 0;
    for (double lw : custom_log_weights_) {
      if (lw <= bound) ++n;
    }
    return n;
  }
  if (log_weight(1) > bound) return 0;
  // galloping upper bracket, then binary search on the monotone sequence
  std::size_t lo = 1, hi = 2;
  while (log_weight(hi) <= bound) {
    lo = hi;
    if (hi > (std::numeric_limits<std::size_t>::max() >> 1)) break;
    hi *= 2;
  }
  while (lo + 1 < hi) {
    std::size_t mid = lo + (hi - lo) / 2;
    if (log_weight(mid) <= bound) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return lo;
}

std::size_t WeightModel::sample_index(double uniform) const {
  if (!(uniform > 0.0 && uniform < 1.0)) {
    throw std::domain_error("sample_index: uniform must lie in (0,1)");
  }
  auto it = std::lower_bound(cdf_.begin(), cdf_.end(), uniform);
  if (it != cdf_.end()) return static_cast<std::size_t>(it - cdf_.begin()) + 1;
  if (kind_ == WeightKind::Custom) return custom_log_weights_.size();
  // table was capped before the tail dropped below 1e-18; scan onward
  KahanSum acc;
  acc.add(cdf_.back());
  std::size_t k = cdf_.size();
  while (acc.value() < uniform) {
    ++k;
    acc.add(weight(k));
  }
  return k;
}

std::uint64_t WeightModel::hash() const {
  std::uint64_t h = fnv1a(&kind_, sizeof kind_);
  switch (kind_) {
    case WeightKind::WeibullLike:
      h = hash_double(alpha_, h);
      break;
    case WeightKind::Geometric:
      h = hash_double(geom_p_, h);
      break;
    case WeightKind::Custom:
      for (double lw : custom_log_weights_) h = hash_double(lw, h);
      break;
  }
  return h;
}

std::string WeightModel::describe() const {
  std::ostringstream os;
  switch (kind_) {
    case WeightKind::WeibullLike:
      os << "weibull(alpha=" << alpha_ << ")";
      break;
    case WeightKind::Geometric:
      os << "geometric(p=" << geom_p_ << ")";
      break;
    case WeightKind::Custom:
      os << "custom(n=" << custom_log_weights_.size() << ")";
      break;
  }
  return os.str();
}

}  // namespace karlin
