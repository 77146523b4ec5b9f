#ifndef KARLIN_RNG_HPP
#define KARLIN_RNG_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>

namespace karlin {

// splitmix64 mixing step, used to derive independent replica streams
// from (master seed, replica index) without any shared state.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Per-replica random stream. Stream i is a pure function of
// (master_seed, i), so results do not depend on thread scheduling.
class RngStream {
 public:
  explicit RngStream(std::uint64_t master_seed, std::uint64_t replica = 0) {
    std::uint64_t s = master_seed ^ (0x6a09e667f3bcc909ULL + replica * 0x9e3779b97f4a7c15ULL);
    std::uint64_t seeds[4];
    for (auto& v : seeds) v = splitmix64(s);
    std::seed_seq seq{seeds[0], seeds[1], seeds[2], seeds[3]};
    engine_.seed(seq);
  }

  std::uint64_t next_u64() { return engine_(); }

  // uniform on the open interval (0,1)
  double uniform_open() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // inverse-CDF exponential with the given rate; rate <= 0 maps to +inf
  double exponential(double rate) {
    if (!(rate > 0.0)) return std::numeric_limits<double>::infinity();
    return -std::log(uniform_open()) / rate;
  }

  double normal() { return normal_(engine_); }

  // Exact Poisson draw. Inversion for small means; larger means are
  // split into independent chunks of mean <= 32 and summed.
  std::int64_t poisson(double mean);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::int64_t poisson_inversion(double mean);

  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

inline std::int64_t RngStream::poisson_inversion(double mean) {
  const double L = std::exp(-mean);
  std::int64_t k = 0;
  double prod = uniform_open();
  while (prod > L) {
    prod *= uniform_open();
    ++k;
  }
  return k;
}

inline std::int64_t RngStream::poisson(double mean) {
  std::int64_t total = 0;
  while (mean > 32.0) {
    total += poisson_inversion(32.0);
    mean -= 32.0;
  }
  return total + poisson_inversion(mean);
}

}  // namespace karlin

#endif
