#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "karlin/rng.hpp"
#include "karlin/stats.hpp"

using namespace karlin;

TEST_CASE("moment accumulator matches direct formulas") {
  std::vector<std::vector<double>> data{
      {1.0, 2.0}, {-1.0, 0.5}, {0.25, -3.0}, {2.0, 2.0}, {-0.5, 1.0}};
  MomentAccumulator acc(2);
  for (auto& row : data) acc.accumulate(row);
  REQUIRE(acc.count() == data.size());
  double m0 = 0.0, m1 = 0.0;
  for (auto& row : data) {
    m0 += row[0];
    m1 += row[1];
  }
  m0 /= data.size();
  m1 /= data.size();
  auto mean = acc.mean();
  CHECK(mean[0] == doctest::Approx(m0).epsilon(1e-14));
  CHECK(mean[1] == doctest::Approx(m1).epsilon(1e-14));
  double c01 = 0.0;
  for (auto& row : data) c01 += (row[0] - m0) * (row[1] - m1);
  c01 /= data.size() - 1;
  auto emp = acc.empirical_cov();
  CHECK(emp.at(0, 1) == doctest::Approx(c01).epsilon(1e-13));
  CHECK(emp.at(0, 1) == emp.at(1, 0));
}

TEST_CASE("merging accumulators equals one pass over all data") {
  RngStream rng(42, 0);
  MomentAccumulator whole(3), part_a(3), part_b(3);
  for (int i = 0; i < 500; ++i) {
    std::vector<double> row{rng.normal(), rng.normal() * 2.0, rng.uniform_open()};
    whole.accumulate(row);
    (i < 230 ? part_a : part_b).accumulate(row);
  }
  part_a.merge(part_b);
  REQUIRE(part_a.count() == whole.count());
  auto ma = part_a.mean(), mw = whole.mean();
  auto ca = part_a.empirical_cov(), cw = whole.empirical_cov();
  for (int i = 0; i < 3; ++i) {
    CHECK(ma[i] == doctest::Approx(mw[i]).epsilon(1e-13));
    for (int j = 0; j < 3; ++j)
      CHECK(ca.at(i, j) == doctest::Approx(cw.at(i, j)).epsilon(1e-12));
  }
  MomentAccumulator wrong(2);
  CHECK_THROWS_AS(wrong.merge(whole), std::invalid_argument);
  CHECK_THROWS_AS(wrong.accumulate(std::vector<double>{1.0}), std::invalid_argument);
}

TEST_CASE("KS test accepts the true law and rejects a wrong one") {
  std::vector<double> normal, expo;
  RngStream rng(9, 1);
  for (int i = 0; i < 800; ++i) {
    normal.push_back(rng.normal());
    expo.push_back(rng.exponential(1.0));
  }
  CHECK(ks_statistic(normal, RefCdf::StdNormal).p_value > 1e-3);
  CHECK(ks_statistic(expo, RefCdf::Exponential, 1.0).p_value > 1e-3);
  CHECK(ks_statistic(expo, RefCdf::StdNormal).p_value < 1e-6);
  CHECK(ks_statistic(normal, RefCdf::StdGumbel).p_value < 1e-6);
  std::vector<double> tiny(10, 0.0);
  CHECK_THROWS_AS(ks_statistic(tiny, RefCdf::StdNormal), std::invalid_argument);
}

TEST_CASE("two-sample chi-square with bin pooling") {
  std::vector<std::int64_t> a{50, 100, 200, 100, 50, 2, 1, 0, 0, 1};
  SUBCASE("identical histograms are a perfect fit") {
    auto r = chi2_two_sample(a, a);
    CHECK(r.statistic == doctest::Approx(0.0));
    CHECK(r.p_value == doctest::Approx(1.0));
    CHECK(r.dof >= 1);
  }
  SUBCASE("same law, independent draws") {
    // two multinomial draws from one distribution
    RngStream rng(31, 0);
    std::vector<std::int64_t> h1(8, 0), h2(8, 0);
    for (int i = 0; i < 4000; ++i) {
      h1[std::min<std::size_t>(7, (std::size_t)(rng.exponential(1.0) * 2))]++;
      h2[std::min<std::size_t>(7, (std::size_t)(rng.exponential(1.0) * 2))]++;
    }
    CHECK(chi2_two_sample(h1, h2).p_value > 1e-3);
  }
  SUBCASE("different laws are rejected") {
    std::vector<std::int64_t> b{200, 100, 50, 100, 50, 2, 1, 0, 0, 1};
    CHECK(chi2_two_sample(a, b).p_value < 1e-6);
  }
  SUBCASE("argument validation") {
    std::vector<std::int64_t> short_h{1, 2};
    CHECK_THROWS_AS(chi2_two_sample(a, short_h), std::invalid_argument);
  }
}

TEST_CASE("trend diagnostic certifies nonincreasing deviations") {
  CHECK(trend_diagnostic({{10, 0.30}, {20, 0.18}, {40, 0.11}}).pass);
  CHECK_FALSE(trend_diagnostic({{10, 0.10}, {20, 0.18}, {40, 0.30}}).pass);
  // 10% slack absorbs a small bump
  CHECK(trend_diagnostic({{10, 0.30}, {20, 0.305}, {40, 0.20}}).pass);
  CHECK_FALSE(trend_diagnostic({{10, 0.30}, {20, 0.40}, {40, 0.20}}).pass);
  CHECK_THROWS_AS(trend_diagnostic({{10, 0.1}, {20, 0.2}}), std::invalid_argument);
  CHECK_THROWS_AS(trend_diagnostic({{10, 0.1}, {10, 0.2}, {20, 0.1}}),
                  std::invalid_argument);
  CHECK_FALSE(trend_diagnostic({{10, 0.30}, {20, 0.18}, {40, 0.11}}).report.empty());
}
