#include "karlin/genweights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "karlin/math_util.hpp"

namespace karlin {

namespace {

// Base-level factors -log p_i with p_i >= bound, ascending.
std::vector<double> base_factors(const WeightModel& model, double log_bound) {
  std::vector<double> out;
  if (auto n = model.finite_size()) {
    for (std::size_t k = 1; k <= *n; ++k) {
      double lw = model.log_weight(k);
      if (lw <= log_bound) out.push_back(lw);
    }
    std::sort(out.begin(), out.end());
    return out;
  }
  for (std::size_t k = 1;; ++k) {
    double lw = model.log_weight(k);
    if (lw > log_bound) break;
    out.push_back(lw);
  }
  return out;
}

void finalize(GenerationWeights& gw) {
  KahanSum mass;
  for (double lw : gw.log_weights) mass.add(std::exp(-lw));
  gw.kept_mass = mass.value();
  gw.tail_mass = 1.0 - gw.kept_mass;
  std::sort(gw.log_weights.begin(), gw.log_weights.end());
}

std::vector<GenerationWeights> enumerate_levels(const WeightModel& model, int j_max,
                                                double eps, std::size_t budget,
                                                bool links) {
  if (j_max < 1) throw std::domain_error("enumerate: generation must be >= 1");
  if (!(eps > 0.0)) throw std::domain_error("enumerate: eps must be positive");
  double limit = -std::log(eps);  // keep boxes with -log p_r <= limit
  if (model.log_weight(1) > limit) {
    throw std::domain_error("enumerate: eps exceeds the largest base weight");
  }
  std::vector<double> factors = base_factors(model, limit);

  std::vector<GenerationWeights> levels;
  std::size_t total_boxes = 0;
  std::vector<double> prev = factors;  // tree order of the previous level
  for (int j = 1; j <= j_max; ++j) {
    GenerationWeights gw;
    gw.generation = j;
    gw.threshold = eps;
    std::vector<double> tree;
    std::vector<std::uint32_t> parent;
    if (j == 1) {
      tree = factors;
      if (links) parent.assign(tree.size(), 0);
    } else {
      for (std::size_t pi = 0; pi < prev.size(); ++pi) {
        double base = prev[pi];
        for (double f : factors) {
          double lw = base + f;
          if (lw > limit) break;  // factors ascending, no deeper child fits
          tree.push_back(lw);
          if (links) parent.push_back(static_cast<std::uint32_t>(pi));
          if (tree.size() + total_boxes > budget) {
            std::ostringstream os;
            os << "enumerate: box budget " << budget << " exceeded at generation " << j;
            throw ResourceError(os.str());
          }
        }
      }
    }
    total_boxes += tree.size();
    if (total_boxes > budget) {
      std::ostringstream os;
      os << "enumerate: box budget " << budget << " exceeded at generation " << j;
      throw ResourceError(os.str());
    }
    gw.log_weights = tree;
    finalize(gw);
    if (links) {
      gw.tree_log_weights = std::move(tree);
      gw.parent = std::move(parent);
    }
    prev = links ? gw.tree_log_weights : gw.log_weights;
    levels.push_back(std::move(gw));
  }
  return levels;
}

}  // namespace

std::size_t GenerationWeights::rho_j(double x) const {
  if (!(x > 0.0)) throw std::domain_error("rho_j: x must be positive");
  if (1.0 / x < threshold) {
    throw TruncationError("rho_j: 1/x below the enumeration threshold, count not certified");
  }
  double bound = std::log(x);
  auto it = std::upper_bound(log_weights.begin(), log_weights.end(), bound);
  return static_cast<std::size_t>(it - log_weights.begin());
}

GenerationWeights enumerate_generation(const WeightModel& model, int j, double eps,
                                       const EnumerateOptions& opts) {
  auto levels = enumerate_levels(model, j, eps, opts.box_budget, opts.parent_links);
  return std::move(levels.back());
}

std::vector<GenerationWeights> enumerate_forest(const WeightModel& model, int j_max,
                                                double eps, std::size_t box_budget) {
  return enumerate_levels(model, j_max, eps, box_budget, true);
}

double rho_j_asymptotic_constant(double beta, double ell_value, int j) {
  if (beta < 0.0 || j < 1) throw std::domain_error("rho_j_asymptotic_constant: bad arguments");
  double log_c = static_cast<double>(j) * std::lgamma(beta + 1.0) -
                 std::lgamma(1.0 + j * (beta + 1.0));
  return std::exp(log_c) * std::pow(ell_value, j);
}

void export_log_weights_csv(const GenerationWeights& gw, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  out << "log_weight\n";
  char buf[64];
  for (double lw : gw.log_weights) {
    std::snprintf(buf, sizeof buf, "%.17g\n", lw);
    out << buf;
  }
}

namespace {

constexpr std::uint64_t kCacheMagic = 0x4b41524c494e4743ULL;

std::string cache_path(const std::string& dir, const WeightModel& model, int j,
                       double eps) {
  std::uint64_t eps_bits;
  std::memcpy(&eps_bits, &eps, sizeof eps_bits);
  std::ostringstream os;
  os << dir << "/gw_" << std::hex << model.hash() << "_j" << std::dec << j << "_"
     << std::hex << eps_bits << ".bin";
  return os.str();
}

}  // namespace

bool load_generation_cache(const std::string& dir, const WeightModel& model, int j,
                           double eps, GenerationWeights& out) {
  std::ifstream in(cache_path(dir, model, j, eps), std::ios::binary);
  if (!in) return false;
  std::uint64_t magic = 0, count = 0;
  GenerationWeights gw;
  gw.generation = j;
  gw.threshold = eps;
  in.read(reinterpret_cast<char*>(&magic), sizeof magic);
  in.read(reinterpret_cast<char*>(&count), sizeof count);
  if (!in || magic != kCacheMagic || count > (1ULL << 40)) return false;
  gw.log_weights.resize(count);
  in.read(reinterpret_cast<char*>(gw.log_weights.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  in.read(reinterpret_cast<char*>(&gw.kept_mass), sizeof gw.kept_mass);
  if (!in) return false;
  if (!std::is_sorted(gw.log_weights.begin(), gw.log_weights.end())) return false;
  gw.tail_mass = 1.0 - gw.kept_mass;
  out = std::move(gw);
  return true;
}

void store_generation_cache(const std::string& dir, const WeightModel& model,
                            const GenerationWeights& gw) {
  std::filesystem::create_directories(dir);
  std::ofstream out(cache_path(dir, model, gw.generation, gw.threshold),
                    std::ios::binary);
  if (!out) return;  // cache is best-effort
  std::uint64_t count = gw.log_weights.size();
  out.write(reinterpret_cast<const char*>(&kCacheMagic), sizeof kCacheMagic);
  out.write(reinterpret_cast<const char*>(&count), sizeof count);
  out.write(reinterpret_cast<const char*>(gw.log_weights.data()),
            static_cast<std::streamsize>(count * sizeof(double)));
  out.write(reinterpret_cast<const char*>(&gw.kept_mass), sizeof gw.kept_mass);
}

}  // namespace karlin
