#include "karlin/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

namespace karlin {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// 128-bit path hash for distinct-prefix counting. At desk scale (at most a
// few million distinct occupied boxes) the collision probability is below
// 1e-12 per run.
struct PathHash {
  std::uint64_t lo = 0x243f6a8885a308d3ULL;
  std::uint64_t hi = 0x13198a2e03707344ULL;

  void step(std::uint64_t k) {
    std::uint64_t x = lo ^ (k + 0x9e3779b97f4a7c15ULL);
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    lo = x ^ (x >> 31);
    std::uint64_t y = hi ^ (k * 0xc2b2ae3d27d4eb4fULL + 0x165667b19e3779f9ULL);
    y ^= y >> 29;
    y *= 0xff51afd7ed558ccdULL;
    y ^= y >> 32;
    hi = y + (lo << 1);
  }

  bool operator==(const PathHash& o) const { return lo == o.lo && hi == o.hi; }
};

struct PathHashHasher {
  std::size_t operator()(const PathHash& h) const { return h.lo ^ (h.hi * 0x9e3779b97f4a7c15ULL); }
};

}  // namespace

CoupledForest build_forest(const WeightModel& model, int j_max, double eps,
                           std::size_t box_budget) {
  CoupledForest forest;
  forest.j_max = j_max;
  forest.eps = eps;
  forest.levels = enumerate_forest(model, j_max, eps, box_budget);
  forest.rates.resize(j_max);
  forest.residual.resize(j_max);
  for (int j = 0; j < j_max; ++j) {
    const auto& tree = forest.levels[j].tree_log_weights;
    auto& rates = forest.rates[j];
    rates.resize(tree.size());
    for (std::size_t i = 0; i < tree.size(); ++i) rates[i] = std::exp(-tree[i]);
    forest.residual[j] = rates;  // leaves keep the full rate
  }
  // subtract kept-children mass from each internal box
  for (int j = 1; j < j_max; ++j) {
    const auto& parent = forest.levels[j].parent;
    const auto& child_rates = forest.rates[j];
    auto& res = forest.residual[j - 1];
    for (std::size_t i = 0; i < parent.size(); ++i) res[parent[i]] -= child_rates[i];
    for (std::size_t i = 0; i < res.size(); ++i) {
      double rate = forest.rates[j - 1][i];
      if (res[i] < -1e-9 * rate) {
        throw std::logic_error("build_forest: kept children mass exceeds parent rate");
      }
      if (res[i] < 0.0) res[i] = 0.0;
    }
  }
  return forest;
}

HittingTimes simulate_hitting_times(const CoupledForest& forest, RngStream& rng) {
  HittingTimes ht;
  int jm = forest.j_max;
  ht.times.resize(jm);
  // deepest level first: independent Exp(p_r) draws
  {
    const auto& rates = forest.rates[jm - 1];
    auto& t = ht.times[jm - 1];
    t.resize(rates.size());
    for (std::size_t i = 0; i < rates.size(); ++i) t[i] = rng.exponential(rates[i]);
  }
  for (int j = jm - 2; j >= 0; --j) {
    const auto& res = forest.residual[j];
    auto& t = ht.times[j];
    t.resize(res.size());
    for (std::size_t i = 0; i < res.size(); ++i) t[i] = rng.exponential(res[i]);
    const auto& parent = forest.levels[j + 1].parent;
    const auto& child_t = ht.times[j + 1];
    for (std::size_t i = 0; i < parent.size(); ++i) {
      double& pt = t[parent[i]];
      if (child_t[i] < pt) pt = child_t[i];
    }
  }
  return ht;
}

OccupancyPath occupancy_counts(const CoupledForest& forest, const HittingTimes& times,
                               double T_center, const std::vector<double>& u_grid,
                               std::uint64_t replica_seed) {
  if (!std::is_sorted(u_grid.begin(), u_grid.end())) {
    throw std::domain_error("occupancy_counts: u_grid must be sorted");
  }
  OccupancyPath path;
  path.T_center = T_center;
  path.u_grid = u_grid;
  path.replica_seed = replica_seed;
  path.counts.resize(forest.j_max);
  double max_tail = 0.0;
  for (const auto& lvl : forest.levels) max_tail = std::max(max_tail, lvl.tail_mass);
  path.miss_bias_bound =
      u_grid.empty() ? 0.0 : std::exp(T_center + u_grid.back()) * std::max(max_tail, 0.0);
  for (int j = 0; j < forest.j_max; ++j) {
    std::vector<double> sorted = times.times[j];
    std::sort(sorted.begin(), sorted.end());
    auto& row = path.counts[j];
    row.reserve(u_grid.size());
    for (double u : u_grid) {
      double t = std::exp(T_center + u);
      auto it = std::upper_bound(sorted.begin(), sorted.end(), t);
      row.push_back(static_cast<std::int64_t>(it - sorted.begin()));
    }
  }
  return path;
}

std::vector<std::vector<std::int64_t>> simulate_balls(
    const WeightModel& model, const std::vector<std::int64_t>& checkpoints, int j_max,
    RngStream& rng, std::size_t ball_op_budget) {
  if (j_max < 1) throw std::domain_error("simulate_balls: j_max must be >= 1");
  if (checkpoints.empty() || !std::is_sorted(checkpoints.begin(), checkpoints.end()) ||
      checkpoints.front() < 0) {
    throw std::domain_error("simulate_balls: checkpoints must be sorted and nonnegative");
  }
  std::int64_t n_max = checkpoints.back();
  if (static_cast<std::size_t>(n_max) * static_cast<std::size_t>(j_max) > ball_op_budget) {
    std::ostringstream os;
    os << "simulate_balls: ball-op budget " << ball_op_budget << " exceeded";
    throw ResourceError(os.str());
  }
  std::vector<std::unordered_set<PathHash, PathHashHasher>> occupied(j_max);
  std::vector<std::vector<std::int64_t>> counts(j_max);
  std::size_t next_cp = 0;
  for (std::int64_t ball = 0; ball <= n_max; ++ball) {
    while (next_cp < checkpoints.size() && checkpoints[next_cp] == ball) {
      for (int j = 0; j < j_max; ++j) {
        counts[j].push_back(static_cast<std::int64_t>(occupied[j].size()));
      }
      ++next_cp;
    }
    if (ball == n_max) break;
    PathHash h;
    for (int j = 0; j < j_max; ++j) {
      h.step(static_cast<std::uint64_t>(model.sample_index(rng.uniform_open())));
      occupied[j].insert(h);
    }
  }
  return counts;
}

std::vector<double> gumbel_transform(const CoupledForest& forest,
                                     const HittingTimes& times, int generation) {
  if (generation < 1 || generation > forest.j_max) {
    throw std::domain_error("gumbel_transform: generation out of range");
  }
  const auto& tree = forest.levels[generation - 1].tree_log_weights;
  const auto& t = times.times[generation - 1];
  std::vector<double> out;
  out.reserve(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (std::isfinite(t[i])) out.push_back(tree[i] - std::log(t[i]));
  }
  return out;
}

NormalizationTable make_normalization(const std::vector<GenerationWeights>& levels,
                                      double T_center, const std::vector<double>& u_grid) {
  NormalizationTable table;
  table.T_center = T_center;
  table.u_grid = u_grid;
  table.center.resize(levels.size());
  table.scale.resize(levels.size());
  double t0 = std::exp(T_center);
  for (std::size_t j = 0; j < levels.size(); ++j) {
    for (double u : u_grid) table.center[j].push_back(phi(levels[j], std::exp(T_center + u)));
    double v = var_same_gen(levels[j], t0);
    if (v < 1e-12) {
      throw std::domain_error("make_normalization: variance below 1e-12, degenerate");
    }
    table.scale[j] = std::sqrt(v);
  }
  return table;
}

std::vector<std::vector<double>> normalize_path(const OccupancyPath& path,
                                                const NormalizationTable& table) {
  if (path.u_grid != table.u_grid || path.counts.size() > table.center.size()) {
    throw std::invalid_argument("normalize_path: coordinate layout mismatch");
  }
  std::vector<std::vector<double>> out(path.counts.size());
  for (std::size_t j = 0; j < path.counts.size(); ++j) {
    out[j].reserve(path.u_grid.size());
    for (std::size_t k = 0; k < path.u_grid.size(); ++k) {
      out[j].push_back((static_cast<double>(path.counts[j][k]) - table.center[j][k]) /
                       table.scale[j]);
    }
  }
  return out;
}

}  // namespace karlin
