#include "karlin/verify.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <optional>
#include <thread>
#include <utility>

#include "karlin/genweights.hpp"
#include "karlin/limit.hpp"
#include "karlin/math_util.hpp"
#include "karlin/moments.hpp"
#include "karlin/rng.hpp"
#include "karlin/simulate.hpp"
#include "karlin/stats.hpp"
#include "karlin/weights.hpp"

namespace karlin {
namespace {

constexpr double kLog2 = 0.69314718055994530942;

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

bool selected(const VerifyOptions& opts, const std::string& id) {
  if (opts.only.empty()) return true;
  for (const auto& p : opts.only)
    if (id.compare(0, p.size(), p) == 0) return true;
  return false;
}

bool group_selected(const VerifyOptions& opts, const std::string& group) {
  if (opts.only.empty()) return true;
  for (const auto& p : opts.only) {
    // prefix match in either direction: --only fclt or --only fclt.var.j1
    if (group.compare(0, p.size(), p) == 0 || p.compare(0, group.size(), group) == 0)
      return true;
  }
  return false;
}

ClaimResult claim(std::string id, std::string desc, double observed, double target,
                  double tolerance, std::string detail = "") {
  ClaimResult r;
  r.id = std::move(id);
  r.description = std::move(desc);
  r.observed = observed;
  r.target = target;
  r.tolerance = tolerance;
  r.pass = std::abs(observed - target) <= tolerance;
  r.detail = std::move(detail);
  return r;
}

unsigned resolve_workers(unsigned requested) {
  if (requested) return requested;
  unsigned h = std::thread::hardware_concurrency();
  return h ? std::min(h, 16u) : 1u;
}

// Replicas are processed in fixed-size blocks, one state per block; the
// caller merges block states in block order, so results do not depend on the
// worker count or thread scheduling.
template <class State, class MakeState, class PerReplica>
std::vector<State> run_replica_blocks(std::size_t n, std::size_t block_size,
                                      unsigned workers, MakeState make_state,
                                      PerReplica per_replica) {
  const std::size_t n_blocks = (n + block_size - 1) / block_size;
  std::vector<State> states;
  states.reserve(n_blocks);
  for (std::size_t b = 0; b < n_blocks; ++b) states.push_back(make_state());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (;;) {
      std::size_t b = next.fetch_add(1);
      if (b >= n_blocks) return;
      std::size_t lo = b * block_size;
      std::size_t hi = std::min(n, lo + block_size);
      for (std::size_t r = lo; r < hi; ++r) per_replica(states[b], r);
    }
  };
  unsigned nw = std::min<std::size_t>(workers, n_blocks ? n_blocks : 1);
  if (nw <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nw);
    for (unsigned w = 0; w < nw; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  return states;
}

// ---------------------------------------------------------------- exact ----

// Brute-force geometric(1/2) covariance sums, written independently of the
// library accumulation path (plain descending loop, no compensation).
double brute_cov_gen1(double s, double t) {
  double m = std::max(s, t);
  double acc = 0.0;
  for (int k = 200; k >= 1; --k) {
    double p = std::ldexp(1.0, -k);
    acc += std::exp(-m * p) - std::exp(-(s + t) * p);
  }
  return acc;
}

double brute_cov_gen2(double s, double t) {
  double m = std::max(s, t);
  double acc = 0.0;
  for (int sum = 200; sum >= 2; --sum) {
    double p = std::ldexp(1.0, -sum);
    acc += (sum - 1) * (std::exp(-m * p) - std::exp(-(s + t) * p));
  }
  return acc;
}

double brute_cov_cross(double s, double t) {
  double dt = std::max(t - s, 0.0);
  double acc = 0.0;
  for (int k1 = 80; k1 >= 1; --k1) {
    double p1 = std::ldexp(1.0, -k1);
    double inner = 0.0;
    for (int k2 = 80; k2 >= 1; --k2) {
      double p = p1 * std::ldexp(1.0, -k2);
      inner += std::exp(-dt * p) - std::exp(-t * p);
    }
    acc += std::exp(-s * p1) * inner;
  }
  return acc;
}

void claims_exact(const VerifyOptions& opts, std::vector<ClaimResult>& out) {
  auto model = WeightModel::geometric(0.5);
  auto g1 = enumerate_generation(model, 1, std::ldexp(1.0, -60));
  auto g2 = enumerate_generation(model, 2, std::ldexp(1.0, -60));

  {
    double worst = 0.0;
    for (double t : {0.5, 3.0, 40.0}) {
      worst = std::max(worst, std::abs(cov_same_gen(g1, t, t) - var_same_gen(g1, t)));
      worst = std::max(worst, std::abs(cov_same_gen(g2, t, t) - var_same_gen(g2, t)));
    }
    out.push_back(claim("exact.var_identity",
                        "Cov(K_t, K_t) reproduces Var(K_t) exactly as computed",
                        worst, 0.0, 0.0));
  }
  {
    double worst1 = 0.0, worst2 = 0.0;
    const std::pair<double, double> pairs[] = {{1.0, 2.0}, {0.7, 5.3}, {10.0, 10.0}};
    for (auto [s, t] : pairs) {
      worst1 = std::max(worst1, std::abs(cov_same_gen(g1, s, t) - brute_cov_gen1(s, t)));
      worst2 = std::max(worst2, std::abs(cov_same_gen(g2, s, t) - brute_cov_gen2(s, t)));
    }
    out.push_back(claim("exact.cov_brute.j1",
                        "generation-1 covariance vs direct geometric sum",
                        worst1, 0.0, 1e-10));
    out.push_back(claim("exact.cov_brute.j2",
                        "generation-2 covariance vs direct geometric sum",
                        worst2, 0.0, 1e-10));
  }
  {
    double worst = 0.0, worst_bound = -1.0;
    const std::pair<double, double> pairs[] = {{2.0, 3.0}, {5.0, 1.0}};
    for (auto [s, t] : pairs) {
      auto c = cov_cross_gen(g1, g1, s, t);
      worst = std::max(worst, std::abs(c.value - brute_cov_cross(s, t)));
      worst_bound = std::max(worst_bound, c.value - c.upper_bound);
    }
    out.push_back(claim("exact.crossgen_brute",
                        "cross-generation covariance vs direct double sum",
                        worst, 0.0, 1e-10));
    out.push_back(claim("exact.crossgen_bound",
                        "cross-generation covariance respects t*phi'_i(s) bound",
                        worst_bound, -1.0, 1.0,
                        "observed = max(value - bound); must be <= 0"));
  }
  (void)opts;
}

// --------------------------------------------------------------- oracle ----

void claims_oracle(const VerifyOptions& opts, unsigned workers,
                   std::vector<ClaimResult>& out) {
  auto model = WeightModel::geometric(0.5);
  {
    // Generation enumeration vs brute-force Cartesian products, j <= 3.
    double worst = 0.0;
    bool sizes_ok = true;
    for (int j = 1; j <= 3; ++j) {
      auto gw = enumerate_generation(model, j, std::ldexp(1.0, -10));
      std::vector<double> ref;
      int cap = 10;  // p = 2^-(k1+..+kj) kept iff sum <= 10
      std::vector<int> ks(j, 1);
      // odometer over index tuples
      for (;;) {
        int sum = 0;
        for (int v : ks) sum += v;
        if (sum <= cap) ref.push_back(sum * kLog2);
        int i = j - 1;
        while (i >= 0 && ++ks[i] > cap) ks[i--] = 1;
        if (i < 0) break;
      }
      std::sort(ref.begin(), ref.end());
      if (ref.size() != gw.count()) {
        sizes_ok = false;
        continue;
      }
      for (std::size_t i = 0; i < ref.size(); ++i)
        worst = std::max(worst, std::abs(ref[i] - gw.log_weights[i]));
    }
    out.push_back(claim("oracle.sumset",
                        "nested enumeration matches brute-force Cartesian products",
                        sizes_ok ? worst : 1.0, 0.0, 1e-12,
                        sizes_ok ? "" : "box count mismatch"));
  }
  {
    // Coupling oracle: joint (K1, K2) law at t = 5 from the hitting-time
    // simulator vs the exact ball-throwing scheme with Poisson(5) balls.
    const std::size_t n_rep = 100000;
    const double t0 = 5.0;
    const int side = 64;
    auto forest = build_forest(model, 2, 1e-9);
    auto hist_hit = run_replica_blocks<std::vector<std::int64_t>>(
        n_rep, 2048, workers, [&] { return std::vector<std::int64_t>(side * side, 0); },
        [&](std::vector<std::int64_t>& h, std::size_t r) {
          RngStream rng(opts.seed, r);
          auto times = simulate_hitting_times(forest, rng);
          int k1 = 0, k2 = 0;
          for (double x : times.times[0]) k1 += x <= t0;
          for (double x : times.times[1]) k2 += x <= t0;
          ++h[std::min(k1, side - 1) * side + std::min(k2, side - 1)];
        });
    auto hist_ball = run_replica_blocks<std::vector<std::int64_t>>(
        n_rep, 2048, workers, [&] { return std::vector<std::int64_t>(side * side, 0); },
        [&](std::vector<std::int64_t>& h, std::size_t r) {
          RngStream rng(opts.seed, 1u << 20 | r);
          std::int64_t n_balls = rng.poisson(t0);
          auto counts = simulate_balls(model, {n_balls}, 2, rng);
          int k1 = std::min<std::int64_t>(counts[0][0], side - 1);
          int k2 = std::min<std::int64_t>(counts[1][0], side - 1);
          ++h[k1 * side + k2];
        });
    std::vector<std::int64_t> a(side * side, 0), b(side * side, 0);
    for (auto& h : hist_hit)
      for (int i = 0; i < side * side; ++i) a[i] += h[i];
    for (auto& h : hist_ball)
      for (int i = 0; i < side * side; ++i) b[i] += h[i];
    auto r = chi2_two_sample(a, b);
    auto c = claim("oracle.coupling_chi2",
                   "joint (K1, K2) law: hitting-time simulator vs ball throwing",
                   r.p_value, 1.0, 1.0,
                   fmt("chi2 = %.4g, dof = %d, p = %.4g, replicas = %zu", r.statistic,
                       r.dof, r.p_value, n_rep));
    c.pass = r.p_value > 0.01;
    out.push_back(std::move(c));
  }
}

// ------------------------------------------------------------- spectral ----

void claims_spectral(std::vector<ClaimResult>& out) {
  out.push_back(claim("spectral.value0", "spectral density at 0 equals pi/(12 log 2)",
                      spectral_f(0.0), 0.377696678485599, 1e-12));
  out.push_back(claim("spectral.value1", "spectral density at 1 (closed-form branch)",
                      spectral_f(1.0), 0.167150898937909, 1e-12));
  out.push_back(claim("spectral.branch_continuity",
                      "series branch agrees with the reference value near the crossover",
                      spectral_f(0.19), 0.362565824946524892, 1e-11));
  out.push_back(claim("spectral.normalization",
                      "integral of the spectral density equals the lag-0 covariance",
                      fourier_r(0.0), 1.0, 1e-8));
  {
    double worst = 0.0, worst_t = 0.0;
    for (double t : {0.25, 0.5, 1.0, 2.0, 5.0}) {
      double d = fourier_check(t);
      if (d > worst) {
        worst = d;
        worst_t = t;
      }
    }
    out.push_back(claim("spectral.fourier_inversion",
                        "Fourier transform of the density recovers the covariance",
                        worst, 0.0, 1e-6, fmt("worst lag t = %g", worst_t)));
  }
}

// ---------------------------------------------------------------- limit ----

void claims_limit(const VerifyOptions& opts, unsigned workers,
                  std::vector<ClaimResult>& out) {
  out.push_back(claim("limit.cov_value", "limit covariance at lag 1",
                      limit_cov(0.0, 1.0), 0.451941083083048, 1e-12));
  const std::vector<double> grid{-2.0, -1.0, 0.0, 1.0, 2.0};
  const std::size_t dim = grid.size();
  auto max_norm_dev = [&](const MomentAccumulator::CovMatrix& emp, double extra) {
    double worst = 0.0;
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = i; j < dim; ++j) {
        double target = limit_cov(grid[i], grid[j]);
        double band = 3.0 * emp.se_at(i, j) + extra;
        worst = std::max(worst, std::abs(emp.at(i, j) - target) / band);
      }
    return worst;
  };
  {
    auto gg = make_gauss_grid(grid);
    const std::size_t n = 10000;
    auto blocks = run_replica_blocks<MomentAccumulator>(
        n, 1024, workers, [&] { return MomentAccumulator(dim); },
        [&](MomentAccumulator& acc, std::size_t r) {
          RngStream rng(opts.seed, (2u << 20) | r);
          acc.accumulate(sample_Z_cholesky(gg, rng));
        });
    MomentAccumulator acc(dim);
    for (auto& b : blocks) acc.merge(b);
    auto emp = acc.empirical_cov();
    out.push_back(claim("limit.cholesky_cov",
                        "Cholesky sampler matches limit covariance entrywise",
                        max_norm_dev(emp, 0.0), 0.0, 1.0,
                        fmt("max |dev|/(3 SE) over %zu grid pairs, %zu paths; jitter = %g",
                            dim * (dim + 1) / 2, n, gg.jitter)));
  }
  {
    WhiteNoiseDiscretization disc;
    disc.x_lo = grid.front() - 20.0;
    disc.x_hi = grid.back() + 20.0;
    auto sampler = make_whitenoise_sampler(disc, grid);
    const std::size_t n = 4000;
    auto blocks = run_replica_blocks<MomentAccumulator>(
        n, 256, workers, [&] { return MomentAccumulator(dim); },
        [&](MomentAccumulator& acc, std::size_t r) {
          RngStream rng(opts.seed, (3u << 20) | r);
          acc.accumulate(sample_Z_whitenoise(sampler, rng));
        });
    MomentAccumulator acc(dim);
    for (auto& b : blocks) acc.merge(b);
    auto emp = acc.empirical_cov();
    out.push_back(claim("limit.whitenoise_cov",
                        "white-noise integral sampler matches limit covariance "
                        "within discretization band",
                        max_norm_dev(emp, 0.02), 0.0, 1.0,
                        fmt("max |dev|/(3 SE + 0.02), %zu paths, %zu cells", n,
                            sampler.n_cells)));
  }
  {
    double h = 0.01;
    double iv = increment_variance(h);
    out.push_back(claim("limit.increment_var",
                        "small-increment variance matches h/log 2 within 1%",
                        iv * kLog2 / h, 1.0, 0.01,
                        fmt("E(Z(u+h)-Z(u))^2 = %.12g at h = %g", iv, h)));
  }
}

// ----------------------------------------------------------------- fclt ----

struct FcltRun {
  MomentAccumulator acc{6};  // coords (j, u), j in {1,2}, u in {-1,0,1}
  double corr12 = 0.0;       // corr of (j=1,u=0) with (j=2,u=0)
};

FcltRun run_fclt(const WeightModel& model, const CoupledForest& forest,
                 const std::vector<GenerationWeights>& mom, double T, std::size_t n_rep,
                 std::uint64_t seed, std::uint64_t stream_base, unsigned workers,
                 std::vector<double>* plain_j1u0, std::vector<double>* jitter_j1u0) {
  const std::vector<double> u_grid{-1.0, 0.0, 1.0};
  auto norm = make_normalization(mom, T, u_grid);
  auto blocks = run_replica_blocks<MomentAccumulator>(
      n_rep, 64, workers, [&] { return MomentAccumulator(6); },
      [&](MomentAccumulator& acc, std::size_t r) {
        RngStream rng(seed, stream_base | r);
        auto times = simulate_hitting_times(forest, rng);
        auto path = occupancy_counts(forest, times, T, u_grid, r);
        auto z = normalize_path(path, norm);
        double coords[6] = {z[0][0], z[0][1], z[0][2], z[1][0], z[1][1], z[1][2]};
        acc.accumulate(coords);
        if (plain_j1u0) {
          (*plain_j1u0)[r] = z[0][1];
          (*jitter_j1u0)[r] = z[0][1] + (rng.uniform_open() - 0.5) / norm.scale[0];
        }
      });
  FcltRun run;
  for (auto& b : blocks) run.acc.merge(b);
  auto emp = run.acc.empirical_cov();
  run.corr12 = emp.at(1, 4) / std::sqrt(emp.at(1, 1) * emp.at(4, 4));
  (void)model;
  return run;
}

void cov_ratio_claims(std::vector<ClaimResult>& out, const std::string& prefix,
                      const MomentAccumulator::CovMatrix& emp,
                      const std::vector<GenerationWeights>& mom, double T,
                      double tol_factor, const char* scheme) {
  // grid order: u = -1, 0, 1 at offsets 0,1,2 within each generation block
  const struct {
    double u, v;
    int iu, iv;
  } pairs[] = {{0.0, 1.0, 1, 2}, {0.0, -1.0, 1, 0}, {-1.0, 1.0, 0, 2}};
  for (int j = 1; j <= 2; ++j) {
    const auto& g = mom[j - 1];
    double var0 = var_same_gen(g, std::exp(T));
    for (auto& pr : pairs) {
      double target = limit_cov(pr.u, pr.v);
      double finite =
          cov_same_gen(g, std::exp(T + pr.u), std::exp(T + pr.v)) / var0;
      double bias = std::abs(finite - target);
      int a = (j - 1) * 3 + pr.iu, b = (j - 1) * 3 + pr.iv;
      double se = emp.se_at(a, b);
      out.push_back(claim(
          fmt("%s.cov.j%d.u%gv%g", prefix.c_str(), j, pr.u, pr.v),
          fmt("%s covariance ratio vs limit covariance, generation %d", scheme, j),
          emp.at(a, b), target, tol_factor * (3.0 * se + bias),
          fmt("finite-scale exact ratio = %.6g, limit = %.6g, bias = %.3g, SE = %.3g",
              finite, target, bias, se)));
    }
  }
}

void var_one_claim(std::vector<ClaimResult>& out, const std::string& id,
                   const char* scheme, double v, std::size_t n, int j,
                   double tol_factor) {
  double se = v * std::sqrt(2.0 / (double)(n - 1));
  out.push_back(claim(id,
                      fmt("%s normalized variance is 1, generation %d", scheme, j), v,
                      1.0, tol_factor * 3.0 * se,
                      fmt("%zu replicas, SE = %.3g", n, se)));
}

void claims_fclt(const VerifyOptions& opts, unsigned workers,
                 const std::vector<GenerationWeights>& mom,
                 std::vector<ClaimResult>& out) {
  auto model = WeightModel::weibull(0.5);
  auto forest = build_forest(model, 2, std::exp(-40.0));
  const std::size_t n_rep = 2000;
  std::vector<double> plain(n_rep), jitter(n_rep);
  double corr[3];
  const double Ts[3] = {8.0, 10.0, 12.0};
  MomentAccumulator acc12{6};
  for (int i = 0; i < 3; ++i) {
    bool last = i == 2;
    auto run = run_fclt(model, forest, mom, Ts[i], n_rep, opts.seed,
                        (std::uint64_t)(4 + i) << 20, workers,
                        last ? &plain : nullptr, last ? &jitter : nullptr);
    corr[i] = run.corr12;
    if (last) acc12 = std::move(run.acc);
  }
  auto emp = acc12.empirical_cov();
  var_one_claim(out, "fclt.var.j1", "Poissonized scheme", emp.at(1, 1), n_rep, 1, 1.0);
  var_one_claim(out, "fclt.var.j2", "Poissonized scheme", emp.at(4, 4), n_rep, 2, 1.0);
  cov_ratio_claims(out, "fclt", emp, mom, 12.0, 1.0, "Poissonized scheme");
  {
    auto ks = ks_statistic(plain, RefCdf::StdNormal);
    auto ksj = ks_statistic(jitter, RefCdf::StdNormal);
    auto c = claim("fclt.ks_normal",
                   "normalized generation-1 count is standard normal (KS, p > 0.01)",
                   ks.p_value, 1.0, 1.0,
                   fmt("D = %.4g, p = %.3g; counts live on a lattice of spacing "
                       "1/sigma = %.3g, which alone forces D >= ~0.05 at T = 12, so "
                       "this check cannot pass at this scale; with the lattice "
                       "smoothed by uniform jitter: D = %.4g, p = %.3g",
                       ks.statistic, ks.p_value,
                       1.0 / std::sqrt(var_same_gen(mom[0], std::exp(12.0))),
                       ksj.statistic, ksj.p_value));
    c.pass = ks.p_value > 0.01;
    out.push_back(std::move(c));
  }
  {
    std::vector<std::pair<double, double>> sd;
    for (int i = 0; i < 3; ++i) sd.emplace_back(Ts[i], std::abs(corr[i]));
    auto tr = trend_diagnostic(sd);
    auto c = claim("fclt.crossgen_trend",
                   "cross-generation correlation decays toward independence",
                   std::abs(corr[2]), 0.0, std::abs(corr[0]), tr.report);
    c.pass = tr.pass;
    out.push_back(std::move(c));
  }
}

// ---------------------------------------------------------------- trend ----

void claims_trend(std::vector<ClaimResult>& out) {
  auto model = WeightModel::weibull(0.5);
  const double eps = std::exp(-110.0);
  auto g1 = enumerate_generation(model, 1, eps);
  auto g2 = enumerate_generation(model, 2, eps);
  auto dh = model.de_haan();
  const double Ts[3] = {20.0, 40.0, 80.0};
  double var1[3], var2[3];
  for (int i = 0; i < 3; ++i) {
    var1[i] = var_same_gen(g1, std::exp(Ts[i]));
    var2[i] = var_same_gen(g2, std::exp(Ts[i]));
  }
  auto add_trend = [&](const std::string& id, const std::string& desc, auto dev_fn) {
    std::vector<std::pair<double, double>> sd;
    for (int i = 0; i < 3; ++i) sd.emplace_back(Ts[i], std::abs(dev_fn(i)));
    auto tr = trend_diagnostic(sd);
    auto c = claim(id, desc, sd.back().second, 0.0, sd.front().second, tr.report);
    c.pass = tr.pass;
    out.push_back(std::move(c));
  };
  add_trend("trend.var.j1", "Var K at scale e^T approaches its leading asymptote, j = 1",
            [&](int i) {
              return var1[i] / var_asymptotic(dh->beta, dh->ell, 1, Ts[i]) - 1.0;
            });
  add_trend("trend.var.j2", "Var K at scale e^T approaches its leading asymptote, j = 2",
            [&](int i) {
              return var2[i] / var_asymptotic(dh->beta, dh->ell, 2, Ts[i]) - 1.0;
            });
  add_trend("trend.rho.j2", "generation-2 box-counting function matches its asymptote",
            [&](int i) {
              double c2 = rho_j_asymptotic_constant(dh->beta, dh->ell, 2);
              return (double)g2.rho_j(std::exp(Ts[i])) /
                         (c2 * std::pow(Ts[i], 2.0 * (dh->beta + 1.0))) -
                     1.0;
            });
  add_trend("trend.expsum.j1",
            "exponential-absolute sum tracks 2/(a log 2) times the variance, j = 1",
            [&](int i) {
              return exp_abs_sum(g1, 1.0, Ts[i]).value / (2.0 / kLog2 * var1[i]) - 1.0;
            });
  add_trend("trend.expsum.j2",
            "exponential-absolute sum tracks 2/(a log 2) times the variance, j = 2",
            [&](int i) {
              return exp_abs_sum(g2, 1.0, Ts[i]).value / (2.0 / kLog2 * var2[i]) - 1.0;
            });
}

// ------------------------------------------------------------ depoisson ----

void claims_depoisson(const VerifyOptions& opts, unsigned workers,
                      const std::vector<GenerationWeights>& mom,
                      std::vector<ClaimResult>& out) {
  auto model = WeightModel::weibull(0.5);
  const double T = 10.0;
  const double us[3] = {-1.0, 0.0, 1.0};
  std::vector<std::int64_t> checkpoints;
  for (double u : us) checkpoints.push_back((std::int64_t)std::floor(std::exp(T + u)));
  double center[2][3], scale[2];
  for (int j = 0; j < 2; ++j) {
    scale[j] = std::sqrt(var_same_gen(mom[j], std::exp(T)));
    for (int c = 0; c < 3; ++c) center[j][c] = phi(mom[j], (double)checkpoints[c]);
  }
  const std::size_t n_rep = 2000;
  auto blocks = run_replica_blocks<MomentAccumulator>(
      n_rep, 64, workers, [&] { return MomentAccumulator(6); },
      [&](MomentAccumulator& acc, std::size_t r) {
        RngStream rng(opts.seed, (8ull << 20) | r);
        auto counts = simulate_balls(model, checkpoints, 2, rng);
        double coords[6];
        for (int j = 0; j < 2; ++j)
          for (int c = 0; c < 3; ++c)
            coords[j * 3 + c] = ((double)counts[j][c] - center[j][c]) / scale[j];
        acc.accumulate(coords);
      });
  MomentAccumulator acc(6);
  for (auto& b : blocks) acc.merge(b);
  auto emp = acc.empirical_cov();
  // Fixed ball counts instead of Poisson arrivals: same limit, slower finite-
  // size convergence, hence doubled bands.
  var_one_claim(out, "depoisson.var.j1", "fixed-ball-count scheme", emp.at(1, 1), n_rep,
                1, 2.0);
  var_one_claim(out, "depoisson.var.j2", "fixed-ball-count scheme", emp.at(4, 4), n_rep,
                2, 2.0);
  cov_ratio_claims(out, "depoisson", emp, mom, T, 2.0, "fixed-ball-count scheme");
}

}  // namespace

const std::vector<std::string>& claim_groups() {
  static const std::vector<std::string> groups{
      "exact", "oracle", "spectral", "limit", "fclt", "trend", "depoisson"};
  return groups;
}

std::vector<ClaimResult> run_verification(const VerifyOptions& opts) {
  unsigned workers = resolve_workers(opts.workers);
  std::vector<ClaimResult> all;
  if (group_selected(opts, "exact")) claims_exact(opts, all);
  if (group_selected(opts, "oracle")) claims_oracle(opts, workers, all);
  if (group_selected(opts, "spectral")) claims_spectral(all);
  if (group_selected(opts, "limit")) claims_limit(opts, workers, all);
  std::vector<GenerationWeights> mom;  // moment-grade weibull(1/2) levels
  if (group_selected(opts, "fclt") || group_selected(opts, "depoisson")) {
    auto model = WeightModel::weibull(0.5);
    mom.push_back(enumerate_generation(model, 1, std::exp(-60.0)));
    mom.push_back(enumerate_generation(model, 2, std::exp(-60.0)));
  }
  if (group_selected(opts, "fclt")) claims_fclt(opts, workers, mom, all);
  if (group_selected(opts, "trend")) claims_trend(all);
  if (group_selected(opts, "depoisson")) claims_depoisson(opts, workers, mom, all);
  // fine-grained --only filtering on individual claim ids
  if (!opts.only.empty()) {
    std::vector<ClaimResult> kept;
    for (auto& c : all)
      if (selected(opts, c.id)) kept.push_back(std::move(c));
    // if prefixes matched only at group level, keep the whole group output
    if (!kept.empty()) return kept;
  }
  return all;
}

}  // namespace karlin
