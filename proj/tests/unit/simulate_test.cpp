#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "karlin/simulate.hpp"
#include "karlin/stats.hpp"

using namespace karlin;

TEST_CASE("coupled forest bookkeeping") {
  auto m = WeightModel::weibull(0.5);
  auto f = build_forest(m, 2, std::exp(-10.0));
  REQUIRE(f.levels.size() == 2);
  REQUIRE(f.rates[0].size() == f.levels[0].count());
  REQUIRE(f.rates[1].size() == f.levels[1].count());
  for (int lvl = 0; lvl < 2; ++lvl)
    for (std::size_t i = 0; i < f.rates[lvl].size(); ++i) {
      CHECK(f.rates[lvl][i] ==
            doctest::Approx(std::exp(-f.levels[lvl].tree_log_weights[i])).epsilon(1e-13));
      CHECK(f.residual[lvl][i] >= 0.0);
      CHECK(f.residual[lvl][i] <= f.rates[lvl][i]);
    }
  // deepest level has no kept children: residual equals the full rate
  for (std::size_t i = 0; i < f.rates[1].size(); ++i)
    CHECK(f.residual[1][i] == f.rates[1][i]);
}

TEST_CASE("hitting times have the exact exponential marginals") {
  auto m = WeightModel::geometric(0.5);
  auto f = build_forest(m, 2, 1e-6);
  const int n = 4000;
  double sum0 = 0.0, sum_child = 0.0;
  int violations = 0;
  std::size_t child = 0;  // a generation-2 box and its parent
  std::size_t par = f.levels[1].parent[child];
  for (int r = 0; r < n; ++r) {
    RngStream rng(99, r);
    auto ht = simulate_hitting_times(f, rng);
    sum0 += ht.times[0][par];
    sum_child += ht.times[1][child];
    // a parent is hit no later than any of its children
    violations += ht.times[1][child] < ht.times[0][par];
  }
  CHECK(violations == 0);
  double rate_par = f.rates[0][par], rate_child = f.rates[1][child];
  // sample mean of Exp(rate) within 5 sigma of 1/rate
  CHECK(std::abs(sum0 / n - 1.0 / rate_par) < 5.0 / (rate_par * std::sqrt((double)n)));
  CHECK(std::abs(sum_child / n - 1.0 / rate_child) <
        5.0 / (rate_child * std::sqrt((double)n)));
}

TEST_CASE("occupancy paths are monotone in time and bounded by the tree") {
  auto m = WeightModel::weibull(0.5);
  auto f = build_forest(m, 2, std::exp(-12.0));
  RngStream rng(5, 17);
  auto ht = simulate_hitting_times(f, rng);
  auto path = occupancy_counts(f, ht, 2.0, {-1.0, 0.0, 1.0}, 17);
  REQUIRE(path.counts.size() == 2);
  for (int j = 0; j < 2; ++j) {
    for (std::size_t u = 1; u < 3; ++u)
      CHECK(path.counts[j][u] >= path.counts[j][u - 1]);
    CHECK(path.counts[j][2] <= (std::int64_t)f.levels[j].count());
  }
  CHECK(path.miss_bias_bound == doctest::Approx(std::exp(3.0) * f.levels[1].tail_mass));
  CHECK_THROWS_AS(occupancy_counts(f, ht, 2.0, {1.0, 0.0}, 17), std::domain_error);
}

TEST_CASE("ball throwing counts distinct prefixes") {
  auto m = WeightModel::geometric(0.5);
  RngStream rng(11, 3);
  auto counts = simulate_balls(m, {0, 1, 100, 1000}, 2, rng);
  REQUIRE(counts.size() == 2);
  CHECK(counts[0][0] == 0);  // zero balls
  CHECK(counts[0][1] == 1);  // one ball occupies exactly one box per generation
  CHECK(counts[1][1] == 1);
  for (int j = 0; j < 2; ++j)
    for (std::size_t c = 1; c < 4; ++c) CHECK(counts[j][c] >= counts[j][c - 1]);
  // a generation-2 box determines its generation-1 prefix
  CHECK(counts[1][3] >= counts[0][3]);
  CHECK(counts[0][3] <= 1000);
  CHECK_THROWS_AS(simulate_balls(m, {5, 2}, 1, rng), std::domain_error);
  CHECK_THROWS_AS(simulate_balls(m, {100}, 1, rng, 10), ResourceError);
}

TEST_CASE("ball-throwing mean occupancy matches the exact Poissonized mean") {
  // E K_n for fixed n is within [phi(n) - n p_max^2 .. phi(n)]-ish; at n=300
  // the Poissonized mean is a good oracle within Monte Carlo error.
  auto m = WeightModel::geometric(0.5);
  auto g1 = enumerate_generation(m, 1, 1e-9);
  const int n = 2000;
  double sum = 0.0;
  for (int r = 0; r < n; ++r) {
    RngStream rng(123, r);
    sum += (double)simulate_balls(m, {300}, 1, rng)[0][0];
  }
  double mean = sum / n;
  // exact fixed-n mean: sum_k (1 - (1-p_k)^300)
  double exact = 0.0;
  for (double lw : g1.log_weights) exact += 1.0 - std::pow(1.0 - std::exp(-lw), 300.0);
  CHECK(std::abs(mean - exact) < 5.0 * 1.5 / std::sqrt((double)n));
}

TEST_CASE("log-weight/hitting-time transform is standard Gumbel per box") {
  auto m = WeightModel::geometric(0.5);
  auto f = build_forest(m, 1, 1e-6);
  const int n = 3000;
  std::vector<double> g;
  g.reserve(n);
  for (int r = 0; r < n; ++r) {
    RngStream rng(77, r);
    auto ht = simulate_hitting_times(f, rng);
    g.push_back(gumbel_transform(f, ht, 1)[2]);  // one fixed box across replicas
  }
  auto ks = ks_statistic(g, RefCdf::StdGumbel);
  CHECK(ks.p_value > 1e-3);
}

TEST_CASE("normalization tables center and scale simulated paths") {
  auto m = WeightModel::weibull(0.5);
  auto levels = enumerate_forest(m, 2, std::exp(-25.0));
  auto norm = make_normalization(levels, 6.0, {-1.0, 0.0, 1.0});
  REQUIRE(norm.center.size() == 2);
  CHECK(norm.center[0][1] == doctest::Approx(phi(levels[0], std::exp(6.0))));
  CHECK(norm.scale[0] == doctest::Approx(std::sqrt(var_same_gen(levels[0], std::exp(6.0)))));
  auto f = build_forest(m, 2, std::exp(-25.0));
  RngStream rng(1, 0);
  auto ht = simulate_hitting_times(f, rng);
  auto path = occupancy_counts(f, ht, 6.0, {-1.0, 0.0, 1.0}, 0);
  auto z = normalize_path(path, norm);
  for (int j = 0; j < 2; ++j)
    for (int u = 0; u < 3; ++u)
      CHECK(z[j][u] ==
            doctest::Approx(((double)path.counts[j][u] - norm.center[j][u]) / norm.scale[j]));
}
