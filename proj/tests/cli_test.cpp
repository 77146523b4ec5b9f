// End-to-end tests of the command-line tool: exit codes, determinism,
// worker independence, cache behavior, embedded metadata.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kWork = fs::temp_directory_path() / "karlin_cli_test";

int run(const std::string& args) {
  std::string cmd = std::string(KARLIN_CLI_PATH) + " " + args + " > " +
                    (kWork / "stdout.txt").string() + " 2> " +
                    (kWork / "stderr.txt").string();
  int rc = std::system(cmd.c_str());
  return rc == -1 ? -1 : WEXITSTATUS(rc);
}

void write_config(const fs::path& p, const json& j) {
  std::ofstream(p) << j.dump(2);
}

std::string slurp(const fs::path& p) {
  std::ostringstream os;
  os << std::ifstream(p).rdbuf();
  return os.str();
}

json base_config() {
  return json{{"distribution", {{"kind", "weibull"}, {"alpha", 0.5}}},
              {"j_max", 2},
              {"T", {3.0}},
              {"u_grid", {{"min", -1.0}, {"max", 1.0}, {"step", 1.0}}},
              {"replicas", 50},
              {"seed", 11},
              {"eps", 1e-8}};
}

struct Fixture {
  Fixture() {
    fs::remove_all(kWork);
    fs::create_directories(kWork);
  }
};

}  // namespace

TEST_CASE_FIXTURE(Fixture, "usage and config errors exit with code 2") {
  CHECK(run("") == 2);                      // missing subcommand
  CHECK(run("frobnicate") == 2);            // unknown subcommand
  CHECK(run("moments") == 2);               // missing --config
  auto cfg = kWork / "bad.json";
  write_config(cfg, json{{"j_max", 2}});    // missing distribution
  CHECK(run("moments --config " + cfg.string()) == 2);
  CHECK(slurp(kWork / "stderr.txt").find("distribution") != std::string::npos);
  auto cfg2 = kWork / "bad2.json";
  auto j = base_config();
  j["j_max"] = 0;
  write_config(cfg2, j);
  CHECK(run("simulate --config " + cfg2.string()) == 2);
  CHECK(run("moments --config " + (kWork / "missing.json").string()) == 2);
}

TEST_CASE_FIXTURE(Fixture, "moment tables embed metadata; asymptote marking") {
  auto cfg = kWork / "m.json";
  write_config(cfg, base_config());
  auto out = (kWork / "m_out").string();
  REQUIRE(run("moments --config " + cfg.string() + " --out " + out) == 0);
  auto csv = slurp(fs::path(out) / "moments_j2.csv");
  CHECK(csv.find("tool_version=") != std::string::npos);
  CHECK(csv.find("config_hash=") != std::string::npos);
  auto report = json::parse(slurp(fs::path(out) / "asymptotic_ratios.json"));
  CHECK(report["meta"]["tool_version"].is_string());
  CHECK(report["ratios"][0].contains("var_ratio"));

  // geometric weights: no regular-variation parameters, marker instead
  auto gcfg = base_config();
  gcfg["distribution"] = {{"kind", "geometric"}, {"p", 0.5}};
  auto cfg_g = kWork / "g.json";
  write_config(cfg_g, gcfg);
  auto gout = (kWork / "g_out").string();
  REQUIRE(run("moments --config " + cfg_g.string() + " --out " + gout) == 0);
  auto greport = json::parse(slurp(fs::path(gout) / "asymptotic_ratios.json"));
  CHECK(greport["ratios"][0]["hypothesis_violated"] == true);
}

TEST_CASE_FIXTURE(Fixture, "simulation reruns are byte-identical; workers do not matter") {
  auto cfg = kWork / "s.json";
  write_config(cfg, base_config());
  REQUIRE(run("simulate --config " + cfg.string() + " --out " + (kWork / "a").string()) == 0);
  REQUIRE(run("simulate --config " + cfg.string() + " --out " + (kWork / "b").string()) == 0);
  CHECK(slurp(kWork / "a" / "paths.csv") == slurp(kWork / "b" / "paths.csv"));
  CHECK(slurp(kWork / "a" / "aggregate.json") == slurp(kWork / "b" / "aggregate.json"));

  REQUIRE(run("simulate --config " + cfg.string() + " --workers 8 --out " +
              (kWork / "c").string()) == 0);
  auto ja = json::parse(slurp(kWork / "a" / "aggregate.json"));
  auto jc = json::parse(slurp(kWork / "c" / "aggregate.json"));
  auto ca = ja["normalized_cov"].get<std::vector<double>>();
  auto cc = jc["normalized_cov"].get<std::vector<double>>();
  REQUIRE(ca.size() == cc.size());
  for (std::size_t i = 0; i < ca.size(); ++i) CHECK(std::abs(ca[i] - cc[i]) < 1e-12);
  CHECK(slurp(kWork / "a" / "paths.csv") == slurp(kWork / "c" / "paths.csv"));

  // different seed changes the outputs
  REQUIRE(run("simulate --config " + cfg.string() + " --seed 99 --out " +
              (kWork / "d").string()) == 0);
  CHECK(slurp(kWork / "a" / "paths.csv") != slurp(kWork / "d" / "paths.csv"));
}

TEST_CASE_FIXTURE(Fixture, "limit sampler and spectral outputs") {
  auto cfg = kWork / "l.json";
  auto j = base_config();
  j["replicas"] = 20;
  j["sampler"] = "whitenoise";
  write_config(cfg, j);
  auto out = (kWork / "l_out").string();
  REQUIRE(run("limit-sample --config " + cfg.string() + " --out " + out) == 0);
  auto csv = slurp(fs::path(out) / "limit_paths.csv");
  CHECK(csv.find("replica,u,z") != std::string::npos);
  CHECK(csv.find("config_hash=") != std::string::npos);

  REQUIRE(run("spectral --config " + cfg.string() + " --out " + out) == 0);
  auto spec = json::parse(slurp(fs::path(out) / "spectral_check.json"));
  for (const auto& lag : spec["lags"]) CHECK(lag["deviation"].get<double>() < 1e-6);
}

TEST_CASE_FIXTURE(Fixture, "verify subcommand: subset filtering and report") {
  auto out = (kWork / "v_out").string();
  REQUIRE(run("verify --only spectral --out " + out) == 0);
  auto report = json::parse(slurp(fs::path(out) / "verify_report.json"));
  CHECK(report["all_pass"] == true);
  CHECK(report["claims"].size() >= 4);
  for (const auto& c : report["claims"])
    CHECK(c["id"].get<std::string>().rfind("spectral", 0) == 0);
  CHECK(slurp(kWork / "stdout.txt").find("PASS") != std::string::npos);
}

TEST_CASE_FIXTURE(Fixture, "generation cache is used and survives corruption") {
  auto cache = kWork / "cache";
  fs::create_directories(cache);
  setenv("NESTED_KARLIN_CACHE", cache.string().c_str(), 1);
  auto cfg = kWork / "mc.json";
  write_config(cfg, base_config());
  auto out1 = (kWork / "mc1").string();
  REQUIRE(run("moments --config " + cfg.string() + " --out " + out1) == 0);
  std::size_t entries = 0;
  for (auto& p : fs::directory_iterator(cache)) (void)p, ++entries;
  CHECK(entries >= 2);
  // corrupt every cache entry; results must be identical (recomputed)
  for (auto& p : fs::directory_iterator(cache))
    std::ofstream(p.path(), std::ios::trunc) << "not a cache";
  auto out2 = (kWork / "mc2").string();
  REQUIRE(run("moments --config " + cfg.string() + " --out " + out2) == 0);
  CHECK(slurp(fs::path(out1) / "moments_j1.csv") == slurp(fs::path(out2) / "moments_j1.csv"));
  unsetenv("NESTED_KARLIN_CACHE");
}
