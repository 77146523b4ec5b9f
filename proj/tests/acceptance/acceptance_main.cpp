// Acceptance gate: runs every verification claim group end-to-end and prints
// one pass/fail line per criterion. Exit code = number of failed criteria.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#include "karlin/verify.hpp"

namespace {

const char* kCriterionTitle[] = {
    "exact covariance identities (brute-force cross-check)",
    "enumeration + simulator-coupling oracles",
    "spectral density suite",
    "limit-process sampler suite",
    "finite-scale Gaussian-limit Monte Carlo",
    "asymptotic-constant convergence trends",
    "fixed-ball-count scheme check",
};

}  // namespace

int main(int argc, char** argv) {
  karlin::VerifyOptions opts;
  if (argc > 1) opts.seed = std::strtoull(argv[1], nullptr, 10);
  int failed = 0;
  const auto& groups = karlin::claim_groups();
  for (std::size_t i = 0; i < groups.size(); ++i) {
    karlin::VerifyOptions one = opts;
    one.only = {groups[i]};
    auto start = std::chrono::steady_clock::now();
    auto claims = karlin::run_verification(one);
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
                      .count();
    bool pass = !claims.empty();
    std::string failing;
    for (const auto& c : claims)
      if (!c.pass) {
        pass = false;
        failing += " " + c.id;
      }
    std::printf("criterion %zu [%s]: %s (%zu claims, %.1f s)%s%s\n", i + 1,
                kCriterionTitle[i], pass ? "PASS" : "FAIL", claims.size(), secs,
                failing.empty() ? "" : " failing:", failing.c_str());
    for (const auto& c : claims)
      if (!c.pass && !c.detail.empty())
        std::printf("    %s: observed=%.10g target=%.10g tol=%.3g\n      %s\n",
                    c.id.c_str(), c.observed, c.target, c.tolerance, c.detail.c_str());
    failed += !pass;
  }
  return failed;
}
