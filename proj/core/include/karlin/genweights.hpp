#ifndef KARLIN_GENWEIGHTS_HPP
#define KARLIN_GENWEIGHTS_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "karlin/weights.hpp"

namespace karlin {

struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct TruncationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// All boxes r of one generation with p_r >= threshold, as log-weights
// -log p_r. Log-weights avoid underflow at deep generations where p_r can
// be far below the smallest positive double.
struct GenerationWeights {
  int generation = 1;
  double threshold = 0.0;           // epsilon
  std::vector<double> log_weights;  // sorted ascending (heaviest box first)
  double kept_mass = 0.0;           // sum of kept p_r
  double tail_mass = 0.0;           // 1 - kept_mass

  // Optional ancestry for the coupled simulator: boxes in enumeration order
  // (parents before children within a level chain) with parent indices into
  // the previous level's tree order. Empty unless requested.
  std::vector<double> tree_log_weights;
  std::vector<std::uint32_t> parent;

  std::size_t count() const { return log_weights.size(); }

  // rho_j(x) = #{r : |r|=j, p_r >= 1/x}; exact only while 1/x >= threshold.
  std::size_t rho_j(double x) const;
};

struct EnumerateOptions {
  std::size_t box_budget = 100000000;  // guards pathological configs
  bool parent_links = false;
};

// All generation-j boxes with p_r >= eps, built by breadth-first extension:
// a box r is extended by child i only while p_r * p_i >= eps (valid because
// p_i is nonincreasing in i).
GenerationWeights enumerate_generation(const WeightModel& model, int j, double eps,
                                       const EnumerateOptions& opts = {});

// Levels 1..j_max at a common threshold, with parent links; the levels are
// nested (a kept box's parent is always kept) and feed the coupled simulator.
std::vector<GenerationWeights> enumerate_forest(const WeightModel& model, int j_max,
                                                double eps,
                                                std::size_t box_budget = 100000000);

// Leading coefficient of rho_j(e^T) / T^{j(beta+1)}:
// (Gamma(beta+1))^j / Gamma(1 + j(beta+1)) * ell^j.
double rho_j_asymptotic_constant(double beta, double ell_value, int j);

// Plain CSV export, one log-weight per line under a `log_weight` header.
void export_log_weights_csv(const GenerationWeights& gw, const std::string& path);

// Binary cache keyed by (distribution hash, j, eps). load returns false on
// a missing or corrupt file (callers recompute and may rewrite).
bool load_generation_cache(const std::string& dir, const WeightModel& model, int j,
                           double eps, GenerationWeights& out);
void store_generation_cache(const std::string& dir, const WeightModel& model,
                            const GenerationWeights& gw);

}  // namespace karlin

#endif
