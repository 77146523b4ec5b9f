#ifndef KARLIN_SIMULATE_HPP
#define KARLIN_SIMULATE_HPP

#include <cstdint>
#include <vector>

#include "karlin/genweights.hpp"
#include "karlin/moments.hpp"
#include "karlin/rng.hpp"
#include "karlin/weights.hpp"

namespace karlin {

// Truncated box tree for the coupled hitting-time simulator: nested levels
// 1..j_max at a common threshold, per-box Poisson rates in tree order, and
// per-box residual rates accounting for truncated children. The joint law
// of kept-box hitting times is exact; only boxes below the threshold are
// missing, and that bias is reported, never silently ignored.
struct CoupledForest {
  int j_max = 1;
  double eps = 0.0;
  std::vector<GenerationWeights> levels;
  std::vector<std::vector<double>> rates;     // p_r, tree order per level
  std::vector<std::vector<double>> residual;  // p_r - sum of kept child rates
};

CoupledForest build_forest(const WeightModel& model, int j_max, double eps,
                           std::size_t box_budget = 100000000);

// First-hit times per kept box, tree order per level. T_r of an internal box
// is the minimum of its kept children's times and an Exp(residual) draw, so
// every marginal is Exp(p_r) and the joint law across levels is exact.
struct HittingTimes {
  std::vector<std::vector<double>> times;
};

HittingTimes simulate_hitting_times(const CoupledForest& forest, RngStream& rng);

// Occupancy counts K^{(j)}_{e^{T+u}} on a log-time grid, per replica.
struct OccupancyPath {
  double T_center = 0.0;
  std::vector<double> u_grid;
  std::vector<std::vector<std::int64_t>> counts;  // [generation-1][u index]
  std::uint64_t replica_seed = 0;
  double miss_bias_bound = 0.0;  // e^{T+u_max} * max level tail mass
};

OccupancyPath occupancy_counts(const CoupledForest& forest, const HittingTimes& times,
                               double T_center, const std::vector<double>& u_grid,
                               std::uint64_t replica_seed = 0);

// Deterministic-scheme simulator: throws balls one at a time, each drawing
// an iid index path, and counts distinct prefixes per generation. Exact, no
// truncation. Returns counts[generation-1][checkpoint index] at the given
// sorted ball-count checkpoints.
std::vector<std::vector<std::int64_t>> simulate_balls(
    const WeightModel& model, const std::vector<std::int64_t>& checkpoints, int j_max,
    RngStream& rng, std::size_t ball_op_budget = 10000000000ULL);

// G_r = -log p_r - log T_r over the kept boxes of one generation
// (standard Gumbel under the exact law); diagnostics only.
std::vector<double> gumbel_transform(const CoupledForest& forest,
                                     const HittingTimes& times, int generation);

// Exact centering/scaling for normalized paths: center[j-1][u] = phi_j(e^{T+u}),
// scale[j-1] = sqrt(Var K^{(j)}_{e^T}). Built from moment-grade enumerations
// (typically at a much smaller eps than the simulation forest).
struct NormalizationTable {
  double T_center = 0.0;
  std::vector<double> u_grid;
  std::vector<std::vector<double>> center;
  std::vector<double> scale;
};

NormalizationTable make_normalization(const std::vector<GenerationWeights>& levels,
                                      double T_center, const std::vector<double>& u_grid);

// (count - center) / scale per coordinate.
std::vector<std::vector<double>> normalize_path(const OccupancyPath& path,
                                                const NormalizationTable& table);

}  // namespace karlin

#endif
