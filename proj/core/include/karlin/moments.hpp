#ifndef KARLIN_MOMENTS_HPP
#define KARLIN_MOMENTS_HPP

#include <optional>
#include <string>
#include <vector>

#include "karlin/genweights.hpp"
#include "karlin/weights.hpp"

namespace karlin {

// Expected number of occupied generation-j boxes under Poissonized arrivals:
// phi(t) = sum over kept boxes of (1 - e^{-t p_r}). Truncation error is
// bounded by t * tail_mass (1 - e^{-tp} <= tp). Accumulated in descending
// weight order with compensated summation.
double phi(const GenerationWeights& gw, double t);
double phi_trunc_bound(const GenerationWeights& gw, double t);

// phi'(t) = sum p_r e^{-t p_r}; truncation error bounded by tail_mass.
double phi_prime(const GenerationWeights& gw, double t);

// Cov(K_s, K_t) within one generation: phi(s+t) - phi(max(s,t)).
double cov_same_gen(const GenerationWeights& gw, double s, double t);

// Variance at time t: phi(2t) - phi(t).
double var_same_gen(const GenerationWeights& gw, double t);

struct CrossGenCov {
  double value = 0.0;
  double upper_bound = 0.0;  // t * phi'_i(s)
  double trunc_bound = 0.0;
};

// Cov(K_s^{(i)}, K_t^{(j)}) for i < j via the truncated double sum over
// generation-i boxes r1 and generation-(j-i) suffixes r2:
//   sum_{r1} e^{-s p_r1} sum_{r2} (e^{-(t-s)_+ p_r1 p_r2} - e^{-t p_r1 p_r2}).
// gw_diff must hold generation j - i.
CrossGenCov cov_cross_gen(const GenerationWeights& gw_i,
                          const GenerationWeights& gw_diff, double s, double t);

struct ExpAbsSum {
  double value = 0.0;
  double trunc_bound = 0.0;  // finite for a >= 1 only
};

// sum over kept boxes of e^{-a |t + log p_r|}.
ExpAbsSum exp_abs_sum(const GenerationWeights& gw, double a, double t);

// Closed-form leading asymptote of Var K^{(j)}_{e^T}:
// (log 2) (Gamma(beta+1))^j / Gamma(j(beta+1)) * T^{j beta + j - 1} * ell^j.
double var_asymptotic(double beta, double ell_value, int j, double T);

// Model-aware variant: empty when the model carries no (beta, ell), i.e.
// the regular-variation hypothesis is violated (geometric, custom).
std::optional<double> var_asymptotic(const WeightModel& model, int j, double T);

// Covariance of the limit process: log(1 + e^{-|u-v|}) / log 2.
double limit_cov(double u, double v);

// Exact moment values on a time grid, with certified truncation bounds.
struct MomentTable {
  int generation = 1;
  std::vector<double> time_grid;
  std::vector<double> phi;
  std::vector<double> var;
  std::vector<double> trunc_error_bound;
};

MomentTable make_moment_table(const GenerationWeights& gw,
                              const std::vector<double>& time_grid);

// CSV columns: t, phi, var, trunc_bound (17 significant digits).
void export_moment_table_csv(const MomentTable& table, const std::string& path,
                             const std::string& header_comment = "");

}  // namespace karlin

#endif
