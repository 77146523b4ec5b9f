#include "karlin/moments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>

#include "karlin/math_util.hpp"

namespace karlin {

double phi(const GenerationWeights& gw, double t) {
  if (!(t >= 0.0)) throw std::domain_error("phi: t must be >= 0");
  KahanSum s;
  // log_weights ascending = weights descending
  for (double lw : gw.log_weights) {
    double x = t * std::exp(-lw);
    s.add(-std::expm1(-x));
  }
  return s.value();
}

double phi_trunc_bound(const GenerationWeights& gw, double t) {
  return t * std::max(gw.tail_mass, 0.0);
}

double phi_prime(const GenerationWeights& gw, double t) {
  if (!(t >= 0.0)) throw std::domain_error("phi_prime: t must be >= 0");
  KahanSum s;
  for (double lw : gw.log_weights) {
    double p = std::exp(-lw);
    s.add(p * std::exp(-t * p));
  }
  return s.value();
}

double cov_same_gen(const GenerationWeights& gw, double s, double t) {
  if (!(s >= 0.0 && t >= 0.0)) throw std::domain_error("cov_same_gen: s,t must be >= 0");
  return phi(gw, s + t) - phi(gw, std::max(s, t));
}

double var_same_gen(const GenerationWeights& gw, double t) {
  return phi(gw, 2.0 * t) - phi(gw, t);
}

CrossGenCov cov_cross_gen(const GenerationWeights& gw_i,
                          const GenerationWeights& gw_diff, double s, double t) {
  if (!(s >= 0.0 && t >= 0.0)) throw std::domain_error("cov_cross_gen: s,t must be >= 0");
  CrossGenCov out;
  out.upper_bound = t * phi_prime(gw_i, s);
  if (s == 0.0 || t == 0.0) return out;
  double dt = std::max(t - s, 0.0);
  KahanSum total;
  for (double lw1 : gw_i.log_weights) {
    double p1 = std::exp(-lw1);
    KahanSum inner;
    for (double lw2 : gw_diff.log_weights) {
      double p = p1 * std::exp(-lw2);
      inner.add(std::exp(-dt * p) - std::exp(-t * p));
    }
    total.add(std::exp(-s * p1) * inner.value());
  }
  out.value = total.value();
  // dropped suffixes contribute at most t p_r1 p_r2 per pair; dropped
  // generation-i prefixes at most t * tail_mass_i
  out.trunc_bound = t * (gw_i.kept_mass * gw_diff.tail_mass + gw_i.tail_mass);
  return out;
}

ExpAbsSum exp_abs_sum(const GenerationWeights& gw, double a, double t) {
  if (!(a > 0.0)) throw std::domain_error("exp_abs_sum: a must be positive");
  ExpAbsSum out;
  KahanSum s;
  for (double lw : gw.log_weights) {
    s.add(std::exp(-a * std::abs(t - lw)));
  }
  out.value = s.value();
  // dropped boxes all have -log p_r > -log eps; each contributes
  // e^{a t} p_r^a, and for a >= 1, p_r^a <= eps^{a-1} p_r
  if (a >= 1.0) {
    out.trunc_bound =
        std::exp(a * t) * std::pow(gw.threshold, a - 1.0) * std::max(gw.tail_mass, 0.0);
  } else {
    out.trunc_bound = std::numeric_limits<double>::infinity();
  }
  return out;
}

double var_asymptotic(double beta, double ell_value, int j, double T) {
  if (beta < 0.0 || j < 1) throw std::domain_error("var_asymptotic: bad arguments");
  double log_c = static_cast<double>(j) * std::lgamma(beta + 1.0) -
                 std::lgamma(static_cast<double>(j) * (beta + 1.0));
  return std::log(2.0) * std::exp(log_c) * std::pow(T, j * beta + j - 1.0) *
         std::pow(ell_value, j);
}

std::optional<double> var_asymptotic(const WeightModel& model, int j, double T) {
  const auto& dh = model.de_haan();
  if (!dh) return std::nullopt;  // hypothesis violated: no (beta, ell) attached
  return var_asymptotic(dh->beta, dh->ell, j, T);
}

double limit_cov(double u, double v) {
  return std::log1p(std::exp(-std::abs(u - v))) / std::log(2.0);
}

MomentTable make_moment_table(const GenerationWeights& gw,
                              const std::vector<double>& time_grid) {
  MomentTable table;
  table.generation = gw.generation;
  table.time_grid = time_grid;
  table.phi.reserve(time_grid.size());
  table.var.reserve(time_grid.size());
  table.trunc_error_bound.reserve(time_grid.size());
  for (double t : time_grid) {
    table.phi.push_back(phi(gw, t));
    table.var.push_back(var_same_gen(gw, t));
    table.trunc_error_bound.push_back(phi_trunc_bound(gw, t));
  }
  return table;
}

void export_moment_table_csv(const MomentTable& table, const std::string& path,
                             const std::string& header_comment) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path);
  if (!header_comment.empty()) out << "# " << header_comment << "\n";
  out << "t,phi,var,trunc_bound\n";
  char buf[160];
  for (std::size_t i = 0; i < table.time_grid.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g\n", table.time_grid[i],
                  table.phi[i], table.var[i], table.trunc_error_bound[i]);
    out << buf;
  }
}

}  // namespace karlin
