// Batch front end: exact moments, simulation campaigns, limit-process
// sampling, spectral tables, and the verification suite. One experiment =
// one JSON config file + optional flag overrides (flags win).

#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "karlin/genweights.hpp"
#include "karlin/limit.hpp"
#include "karlin/moments.hpp"
#include "karlin/rng.hpp"
#include "karlin/simulate.hpp"
#include "karlin/stats.hpp"
#include "karlin/verify.hpp"
#include "karlin/weights.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Experiment {
  std::optional<karlin::WeightModel> model;
  int j_max = 1;
  std::vector<double> T_list;
  std::vector<double> u_grid;
  std::size_t replicas = 0;
  std::uint64_t seed = 1;
  unsigned workers = 0;
  double eps = 0.0;  // resolved from eps or tol
  std::string out_dir = "out";
  std::string sampler = "cholesky";
  std::vector<double> lags{0.0, 0.5, 1.0, 2.0};
  std::vector<std::string> only;
  json raw;  // effective config, hashed into every output
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::string config_hash(const json& j) {
  json key = j;  // where results land / how work is scheduled is not hashed
  key.erase("out");
  key.erase("workers");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, fnv1a(key.dump()));
  return buf;
}

std::string meta_comment(const Experiment& ex) {
  return std::string("tool_version=") + KARLIN_VERSION +
         " config_hash=" + config_hash(ex.raw);
}

json meta_json(const Experiment& ex) {
  return json{{"tool_version", KARLIN_VERSION},
              {"config_hash", config_hash(ex.raw)},
              {"seed", ex.seed}};
}

karlin::WeightModel model_from_json(const json& cfg) {
  if (!cfg.contains("distribution"))
    throw ConfigError("missing required field: distribution");
  const json& d = cfg.at("distribution");
  std::string kind = d.value("kind", "");
  if (kind == "weibull") {
    if (!d.contains("alpha")) throw ConfigError("missing field: distribution.alpha");
    return karlin::WeightModel::weibull(d.at("alpha").get<double>());
  }
  if (kind == "geometric") {
    if (!d.contains("p")) throw ConfigError("missing field: distribution.p");
    return karlin::WeightModel::geometric(d.at("p").get<double>());
  }
  if (kind == "custom") {
    if (!d.contains("weights")) throw ConfigError("missing field: distribution.weights");
    return karlin::WeightModel::custom(d.at("weights").get<std::vector<double>>());
  }
  throw ConfigError("distribution.kind must be weibull, geometric, or custom");
}

std::vector<double> grid_from_json(const json& g) {
  double lo = g.at("min").get<double>();
  double hi = g.at("max").get<double>();
  double step = g.at("step").get<double>();
  if (!(step > 0.0) || hi < lo) throw ConfigError("invalid u_grid: need step > 0, max >= min");
  std::vector<double> out;
  for (double u = lo; u <= hi + 1e-12; u += step) out.push_back(u);
  return out;
}

Experiment load_experiment(const std::string& path, bool need_model) {
  json cfg = json::object();
  if (!path.empty()) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    try {
      in >> cfg;
    } catch (const json::exception& e) {
      throw ConfigError(std::string("config parse error: ") + e.what());
    }
  }
  Experiment ex;
  if (need_model) ex.model = model_from_json(cfg);
  ex.j_max = cfg.value("j_max", 1);
  if (ex.j_max < 1) throw ConfigError("invalid field: j_max must be >= 1");
  if (cfg.contains("T")) ex.T_list = cfg.at("T").get<std::vector<double>>();
  if (cfg.contains("u_grid")) ex.u_grid = grid_from_json(cfg.at("u_grid"));
  ex.replicas = cfg.value("replicas", std::size_t{1000});
  ex.seed = cfg.value("seed", std::uint64_t{1});
  ex.workers = cfg.value("workers", 0u);
  ex.out_dir = cfg.value("out", std::string("out"));
  ex.sampler = cfg.value("sampler", std::string("cholesky"));
  if (cfg.contains("lags")) ex.lags = cfg.at("lags").get<std::vector<double>>();
  if (cfg.contains("only")) ex.only = cfg.at("only").get<std::vector<std::string>>();
  if (cfg.contains("eps")) {
    ex.eps = cfg.at("eps").get<double>();
  } else if (cfg.contains("tol")) {
    double t_max = 1.0;
    for (double T : ex.T_list) t_max = std::max(t_max, std::exp(T));
    ex.eps = cfg.at("tol").get<double>() / (t_max * 10.0);
  }
  ex.raw = cfg;
  return ex;
}

void apply_overrides(Experiment& ex, const std::optional<std::uint64_t>& seed,
                     const std::string& out, unsigned workers,
                     const std::vector<std::string>& only) {
  if (seed) {
    ex.seed = *seed;
    ex.raw["seed"] = *seed;
  }
  if (!out.empty()) {
    ex.out_dir = out;
    ex.raw["out"] = out;
  }
  if (workers) ex.workers = workers;  // scheduling only; not hashed
  if (!only.empty()) ex.only = only;
}

// Generation enumeration with the optional on-disk cache
// (NESTED_KARLIN_CACHE); a corrupt cache entry is ignored and recomputed.
karlin::GenerationWeights cached_enumeration(const karlin::WeightModel& model, int j,
                                             double eps) {
  const char* dir = std::getenv("NESTED_KARLIN_CACHE");
  karlin::GenerationWeights gw;
  if (dir && *dir) {
    if (karlin::load_generation_cache(dir, model, j, eps, gw)) return gw;
  }
  gw = karlin::enumerate_generation(model, j, eps);
  if (dir && *dir) karlin::store_generation_cache(dir, model, gw);
  return gw;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  out << j.dump(2) << "\n";
}

int cmd_moments(const Experiment& ex) {
  if (ex.T_list.empty()) throw ConfigError("missing required field: T");
  if (!(ex.eps > 0.0)) throw ConfigError("missing required field: eps or tol");
  fs::create_directories(ex.out_dir);
  json ratios = json::array();
  auto dh = ex.model->de_haan();
  for (int j = 1; j <= ex.j_max; ++j) {
    auto gw = cached_enumeration(*ex.model, j, ex.eps);
    std::vector<double> t_grid;
    for (double T : ex.T_list) t_grid.push_back(std::exp(T));
    auto table = karlin::make_moment_table(gw, t_grid);
    char name[64];
    std::snprintf(name, sizeof name, "moments_j%d.csv", j);
    karlin::export_moment_table_csv(table, (fs::path(ex.out_dir) / name).string(),
                                    meta_comment(ex));
    for (std::size_t i = 0; i < ex.T_list.size(); ++i) {
      double T = ex.T_list[i];
      json entry{{"generation", j}, {"T", T}, {"var", table.var[i]}};
      if (dh) {
        double asym = karlin::var_asymptotic(dh->beta, dh->ell, j, T);
        entry["var_asymptote"] = asym;
        entry["var_ratio"] = table.var[i] / asym;
        double c = karlin::rho_j_asymptotic_constant(dh->beta, dh->ell, j);
        double rho_asym = c * std::pow(T, j * (dh->beta + 1.0));
        entry["rho_ratio"] = (double)gw.rho_j(std::exp(T)) / rho_asym;
      } else {
        entry["hypothesis_violated"] = true;
      }
      ratios.push_back(std::move(entry));
    }
  }
  json report{{"meta", meta_json(ex)}, {"ratios", std::move(ratios)}};
  write_json(fs::path(ex.out_dir) / "asymptotic_ratios.json", report);
  return 0;
}

int cmd_simulate(const Experiment& ex) {
  if (ex.T_list.empty()) throw ConfigError("missing required field: T");
  if (ex.u_grid.empty()) throw ConfigError("missing required field: u_grid");
  if (!(ex.eps > 0.0)) throw ConfigError("missing required field: eps or tol");
  if (ex.replicas < 1) throw ConfigError("invalid field: replicas must be >= 1");
  fs::create_directories(ex.out_dir);
  double T = ex.T_list.front();
  auto forest = karlin::build_forest(*ex.model, ex.j_max, ex.eps);
  auto norm = karlin::make_normalization(forest.levels, T, ex.u_grid);
  const std::size_t dim = (std::size_t)ex.j_max * ex.u_grid.size();
  std::vector<std::vector<std::vector<std::int64_t>>> counts(ex.replicas);
  std::vector<std::vector<std::vector<double>>> normalized(ex.replicas);

  // Fixed-size replica blocks merged in order: aggregates are identical for
  // any worker count.
  const std::size_t block = 64;
  const std::size_t n_blocks = (ex.replicas + block - 1) / block;
  std::vector<karlin::MomentAccumulator> accs;
  accs.reserve(n_blocks);
  for (std::size_t b = 0; b < n_blocks; ++b) accs.emplace_back(dim);
  unsigned workers = ex.workers ? ex.workers : 1;
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    std::vector<double> coords(dim);
    for (;;) {
      std::size_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      for (std::size_t r = b * block; r < std::min(ex.replicas, (b + 1) * block); ++r) {
        karlin::RngStream rng(ex.seed, r);
        auto times = karlin::simulate_hitting_times(forest, rng);
        auto path = karlin::occupancy_counts(forest, times, T, ex.u_grid, r);
        normalized[r] = karlin::normalize_path(path, norm);
        counts[r] = std::move(path.counts);
        std::size_t c = 0;
        for (const auto& row : normalized[r])
          for (double z : row) coords[c++] = z;
        accs[b].accumulate(coords);
      }
    }
  };
  {
    std::vector<std::thread> pool;
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
  }
  karlin::MomentAccumulator total(dim);
  for (auto& a : accs) total.merge(a);

  std::ofstream csv(fs::path(ex.out_dir) / "paths.csv");
  csv << "# " << meta_comment(ex) << "\n";
  csv << "replica,j,u,count,normalized\n";
  char buf[96];
  for (std::size_t r = 0; r < ex.replicas; ++r)
    for (int j = 1; j <= ex.j_max; ++j)
      for (std::size_t ui = 0; ui < ex.u_grid.size(); ++ui) {
        std::snprintf(buf, sizeof buf, "%zu,%d,%.17g,%" PRId64 ",%.17g\n", r, j,
                      ex.u_grid[ui], counts[r][j - 1][ui], normalized[r][j - 1][ui]);
        csv << buf;
      }

  auto emp = total.empirical_cov();
  json agg{{"meta", meta_json(ex)},
           {"T_center", T},
           {"u_grid", ex.u_grid},
           {"j_max", ex.j_max},
           {"replicas", ex.replicas},
           {"normalized_mean", total.mean()},
           {"normalized_mean_se", total.mean_se()},
           {"normalized_cov", emp.cov},
           {"normalized_cov_se", emp.se},
           {"scale", norm.scale},
           {"truncation_eps", ex.eps}};
  write_json(fs::path(ex.out_dir) / "aggregate.json", agg);
  return 0;
}

int cmd_limit_sample(const Experiment& ex) {
  if (ex.u_grid.empty()) throw ConfigError("missing required field: u_grid");
  if (ex.replicas < 1) throw ConfigError("invalid field: replicas must be >= 1");
  fs::create_directories(ex.out_dir);
  std::ofstream csv(fs::path(ex.out_dir) / "limit_paths.csv");
  csv << "# " << meta_comment(ex) << "\n";
  csv << "replica,u,z\n";
  char buf[80];
  json meta = meta_json(ex);
  auto emit = [&](std::size_t r, const std::vector<double>& z) {
    for (std::size_t i = 0; i < z.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", r, ex.u_grid[i], z[i]);
      csv << buf;
    }
  };
  if (ex.sampler == "cholesky") {
    auto grid = karlin::make_gauss_grid(ex.u_grid);
    meta["jitter"] = grid.jitter;
    for (std::size_t r = 0; r < ex.replicas; ++r) {
      karlin::RngStream rng(ex.seed, r);
      emit(r, karlin::sample_Z_cholesky(grid, rng));
    }
  } else if (ex.sampler == "whitenoise") {
    karlin::WhiteNoiseDiscretization disc;
    disc.x_lo = ex.u_grid.front() - 20.0;
    disc.x_hi = ex.u_grid.back() + 20.0;
    auto sampler = karlin::make_whitenoise_sampler(disc, ex.u_grid);
    meta["n_cells"] = sampler.n_cells;
    for (std::size_t r = 0; r < ex.replicas; ++r) {
      karlin::RngStream rng(ex.seed, r);
      emit(r, karlin::sample_Z_whitenoise(sampler, rng));
    }
  } else {
    throw ConfigError("sampler must be cholesky or whitenoise");
  }
  write_json(fs::path(ex.out_dir) / "limit_meta.json", json{{"meta", std::move(meta)}});
  return 0;
}

int cmd_spectral(const Experiment& ex) {
  fs::create_directories(ex.out_dir);
  std::ofstream csv(fs::path(ex.out_dir) / "spectral_density.csv");
  csv << "# " << meta_comment(ex) << "\n";
  csv << "x,f\n";
  char buf[80];
  for (double x = -5.0; x <= 5.0 + 1e-12; x += 0.05) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g\n", x, karlin::spectral_f(x));
    csv << buf;
  }
  json checks = json::array();
  for (double t : ex.lags) {
    double closed = karlin::limit_cov(0.0, t);
    double quad = karlin::fourier_r(t);
    checks.push_back(json{{"t", t},
                          {"r_closed", closed},
                          {"r_quadrature", quad},
                          {"deviation", std::abs(quad - closed)}});
  }
  write_json(fs::path(ex.out_dir) / "spectral_check.json",
             json{{"meta", meta_json(ex)}, {"lags", std::move(checks)}});
  return 0;
}

int cmd_verify(const Experiment& ex) {
  karlin::VerifyOptions opts;
  opts.seed = ex.seed;
  opts.workers = ex.workers;
  opts.only = ex.only;
  auto claims = karlin::run_verification(opts);
  json entries = json::array();
  std::vector<std::string> failing;
  for (const auto& c : claims) {
    std::printf("[%s] %-28s observed=%.10g target=%.10g tol=%.3g\n",
                c.pass ? "PASS" : "FAIL", c.id.c_str(), c.observed, c.target,
                c.tolerance);
    if (!c.pass) failing.push_back(c.id);
    entries.push_back(json{{"id", c.id},
                           {"description", c.description},
                           {"observed", c.observed},
                           {"target", c.target},
                           {"tolerance", c.tolerance},
                           {"pass", c.pass},
                           {"detail", c.detail}});
  }
  fs::create_directories(ex.out_dir);
  write_json(fs::path(ex.out_dir) / "verify_report.json",
             json{{"meta", meta_json(ex)},
                  {"claims", std::move(entries)},
                  {"all_pass", failing.empty()}});
  if (!failing.empty()) {
    std::fprintf(stderr, "verification failed:");
    for (const auto& id : failing) std::fprintf(stderr, " %s", id.c_str());
    std::fprintf(stderr, "\n");
    return 1;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nested occupancy scheme toolkit"};
  app.require_subcommand(1);
  std::string config_path, out_dir, only_csv;
  std::optional<std::uint64_t> seed;
  unsigned workers = 0;
  app.add_option("--config", config_path, "JSON experiment config");
  app.add_option("--seed", seed, "master RNG seed (overrides config)");
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app.add_option("--workers", workers, "worker thread count");
  app.add_option("--only", only_csv, "comma-separated claim id prefixes (verify)");
  auto* c_moments = app.add_subcommand("moments", "exact moment tables + asymptotic ratios");
  auto* c_simulate = app.add_subcommand("simulate", "hitting-time simulation campaign");
  auto* c_limit = app.add_subcommand("limit-sample", "sample the limit Gaussian process");
  auto* c_spectral = app.add_subcommand("spectral", "spectral density table + Fourier check");
  auto* c_verify = app.add_subcommand("verify", "run the verification suite");
  for (auto* sub : {c_moments, c_simulate, c_limit, c_spectral, c_verify})
    sub->fallthrough();  // global flags may follow the subcommand name
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  try {
    bool need_model = !c_verify->parsed() && !c_limit->parsed() && !c_spectral->parsed();
    if (config_path.empty() && need_model)
      throw ConfigError("--config is required for this subcommand");
    Experiment ex = load_experiment(config_path, need_model);
    std::vector<std::string> only;
    if (!only_csv.empty()) {
      std::size_t pos = 0;
      while (pos != std::string::npos) {
        std::size_t comma = only_csv.find(',', pos);
        only.push_back(only_csv.substr(pos, comma - pos));
        pos = comma == std::string::npos ? comma : comma + 1;
      }
    }
    apply_overrides(ex, seed, out_dir, workers, only);
    if (c_moments->parsed()) return cmd_moments(ex);
    if (c_simulate->parsed()) return cmd_simulate(ex);
    if (c_limit->parsed()) return cmd_limit_sample(ex);
    if (c_spectral->parsed()) return cmd_spectral(ex);
    return cmd_verify(ex);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const karlin::ResourceError& e) {
    std::fprintf(stderr, "resource budget exceeded: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
