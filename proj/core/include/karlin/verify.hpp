#ifndef KARLIN_VERIFY_HPP
#define KARLIN_VERIFY_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace karlin {

// One verified claim. `observed` is compared against `target` within
// `tolerance` unless the claim is a pass/fail diagnostic, in which case the
// fields carry the diagnostic's primary number.
struct ClaimResult {
  std::string id;
  std::string description;
  double observed = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct VerifyOptions {
  std::uint64_t seed = 20260826ULL;
  unsigned workers = 0;            // 0 = hardware concurrency
  std::vector<std::string> only;   // claim id prefixes; empty = all
};

// Claim groups, one per acceptance area:
//   exact      covariance/variance identities against brute-force sums
//   oracle     enumeration and simulator-coupling oracles
//   spectral   spectral density values and Fourier inversion
//   limit      limit-process samplers and increments
//   fclt       finite-T Monte Carlo against the Gaussian limit
//   trend      asymptotic-constant convergence trends
//   depoisson  deterministic-scheme (fixed ball count) checks
const std::vector<std::string>& claim_groups();

std::vector<ClaimResult> run_verification(const VerifyOptions& opts);

}  // namespace karlin

#endif
