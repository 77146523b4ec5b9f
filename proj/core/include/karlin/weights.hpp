#ifndef KARLIN_WEIGHTS_HPP
#define KARLIN_WEIGHTS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace karlin {

enum class WeightKind { WeibullLike, Geometric, Custom };

// Regular-variation metadata attached to a base distribution: the de Haan
// exponent beta and the (constant) value of the slowly varying factor.
struct DeHaanParams {
  double beta;
  double ell;
};

// A base probability sequence (p_k)_{k>=1}. Immutable after construction,
// safe for shared concurrent reads. All logs are natural logs.
//
// WeibullLike(alpha): p_k = C exp(-k^alpha), beta = 1/alpha - 1, ell = 1/alpha.
// Geometric(p):       p_k = p (1-p)^{k-1}; carries no (beta, ell) because its
//                     counting function is not in the de Haan class.
// Custom:             a finite list, normalized on construction.
class WeightModel {
 public:
  static WeightModel weibull(double alpha);
  static WeightModel geometric(double p);
  static WeightModel custom(std::vector<double> weights);

  WeightKind kind() const { return kind_; }

  // -log p_k for k >= 1, nondecreasing in k for WeibullLike/Geometric.
  double log_weight(std::size_t k) const;
  double weight(std::size_t k) const;

  // Number of indices the model can produce (finite for Custom only).
  std::optional<std::size_t> finite_size() const;

  // rho(x) = #{k : p_k >= 1/x}. Binary search on the monotone log-weight
  // sequence; linear scan for Custom.
  std::size_t rho(double x) const;

  // Inverse-CDF sampling of a child index from a uniform in (0,1).
  std::size_t sample_index(double uniform) const;

  const std::optional<DeHaanParams>& de_haan() const { return de_haan_; }

  // Shape parameters (valid for the matching kind only).
  double alpha() const { return alpha_; }
  double geometric_p() const { return geom_p_; }
  double normalizer() const { return normalizer_; }

  // Stable identity of the distribution, used to key the enumeration cache.
  std::uint64_t hash() const;
  std::string describe() const;

 private:
  WeightModel() = default;
  void build_cdf();

  WeightKind kind_ = WeightKind::Custom;
  double alpha_ = 0.0;
  double geom_p_ = 0.0;
  double normalizer_ = 1.0;  // C for WeibullLike
  std::vector<double> custom_log_weights_;
  std::vector<double> cdf_;  // prefix sums of p_k, tail below 1e-18
  std::optional<DeHaanParams> de_haan_;
};

}  // namespace karlin

#endif
