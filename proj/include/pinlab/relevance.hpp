#pragma once

// Disorder-relevance diagnostics: critical-temperature bounds, the replica
// (pair-chain) moment, the Monte Carlo estimator of the truncated specific
// relative entropy with its upper and lower bounds, and the annealed
// variational check over tilted product measures.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <json.hpp>

#include "pinlab/disorder_laws.hpp"
#include "pinlab/renewal_kernels.hpp"

namespace pinlab {

enum class BoundKind { finite, infinite, degenerate_zero, undecided };

struct CriticalBound {
  BoundKind kind;
  double value;        // +inf for infinite, 0 for degenerate_zero, NaN for undecided
  double target;       // right-hand side of the defining equation
  double residual;     // |lhs(value) - target| for finite roots
  double limit_value;  // beta -> infinity limit of the lhs (from the atom at w)
  double lhs_at_50;    // lhs evaluated at beta = 50
};

// sup{beta : Xi(beta) < 1 + 1/chi}.
CriticalBound beta_c_star(const ChiResult& chi_result, const DisorderLaw& disorder,
                          double tol = 1e-13);
CriticalBound beta_c_star(const RenewalKernel& kernel, const DisorderLaw& disorder,
                          double tol = 1e-13);
// inf{beta : h(mu_beta | mu0) > h(K)}.
CriticalBound beta_c_star_star(double kernel_entropy_value, const DisorderLaw& disorder,
                               double tol = 1e-13);
CriticalBound beta_c_star_star(const RenewalKernel& kernel, const DisorderLaw& disorder,
                               double tol = 1e-13);

struct CriticalTemperatureBounds {
  double chi;
  double kernel_entropy;
  CriticalBound beta_c_star;
  CriticalBound beta_c_star_star;
};

CriticalTemperatureBounds critical_temperature_bounds(const RenewalKernel& kernel,
                                                      const DisorderLaw& disorder);

// log E_{S,S'}[Xi(beta)^{#{k < n : S_k = S'_k = 0}}] for two independent chains
// with finitely supported return law `kernel_tr`, by exact DP over the pair of
// residual times.
double replica_moment_log(const RenewalKernel& kernel_tr, const DisorderLaw& disorder,
                          double beta, std::size_t n);
double replica_moment(const RenewalKernel& kernel_tr, const DisorderLaw& disorder, double beta,
                      std::size_t n);

struct ReplicaCheck {
  double pair_chain;        // replica_moment
  double pair_enumeration;  // sum over renewal-set pairs of Xi^{overlap}
  double disorder_average;  // E over the size-biased letters of Theta_n, enumerated
  double max_relative_error;
};

// Brute-force check of the replica identity for finitely supported disorder, n <= 10.
ReplicaCheck replica_identity_check(const RenewalKernel& kernel_tr, const DisorderLaw& disorder,
                                    double beta, std::size_t n);

// Letters x_0..x_{n-1}: words with lengths drawn from `kernel_tr`, first letter
// from mu_beta, remaining letters from mu0.
std::vector<double> sample_word_letters(const RenewalKernel& kernel_tr,
                                        const DisorderLaw& disorder, double beta,
                                        RngStream& stream, std::size_t n);

struct RelevanceReport {
  double beta;
  std::size_t tr;
  std::size_t n;
  std::size_t replicas;
  double m_tr;
  double entropy_estimate;  // mean of (1/n) log f_n
  double stderr_;
  double lower_bound;       // (h(mu_beta|mu0) - H(K^tr)), bounds m_tr * entropy from below
  double upper_bound;       // f_2^tr(log Xi(beta)), bounds entropy from above
  double limit_lower_bound; // h(mu_beta|mu0) - h(K), the tr -> infinity value of lower_bound
  bool excludes_zero;       // m_tr (estimate - 3 stderr) > 0
  bool sandwich_ok;
  std::vector<double> per_replica;
};

RelevanceReport entropy_estimator(const RenewalKernel& kernel, const DisorderLaw& disorder,
                                  double beta, std::size_t tr, std::size_t n, std::size_t replicas,
                                  std::uint64_t seed, unsigned threads = 1);

struct MonotonicityScan {
  std::vector<RelevanceReport> reports;
  std::vector<double> step_differences;  // mean paired difference to the previous grid point
  std::vector<double> step_stderr;
  std::vector<bool> decrease_flags;      // decrease beyond 3 paired stderr
  bool monotone;
};

// Every grid point reuses `seed`, so letters are coupled across beta.
MonotonicityScan entropy_monotonicity_scan(const RenewalKernel& kernel,
                                           const DisorderLaw& disorder,
                                           std::span<const double> beta_grid, std::size_t tr,
                                           std::size_t n, std::size_t replicas,
                                           std::uint64_t seed, unsigned threads = 1);

enum class RelevanceVerdict { relevant, irrelevant_consistent, undecided };

// Reports ordered by increasing tr; v = m_tr * entropy_estimate. Relevant when
// limit_lower_bound > 0, or when the interval for v excludes 0 at every tr and v does not fall significantly
// (3 stderr) from the middle to the last tr. Irrelevant-consistent when
// m_tr * f_2^tr does not increase over the upper half of the scan and v either
// falls significantly or its interval contains 0 at the largest tr.
RelevanceVerdict relevance_verdict(std::span<const RelevanceReport> reports_by_tr);
const char* to_string(RelevanceVerdict v);

struct VariationalResult {
  double argmax;
  double max_value;
  double log_mgf;          // log M(beta)
  double grid_resolution;  // largest spacing of the tilt grid
};

// Maximizes beta * mean(mu_l) - h(mu_l | mu0) over l in tilt_grid.
VariationalResult annealed_variational_check(const DisorderLaw& disorder, double beta,
                                             std::span<const double> tilt_grid);

nlohmann::json to_json(const CriticalBound& b);
nlohmann::json to_json(const CriticalTemperatureBounds& b);
nlohmann::json to_json(const RelevanceReport& r);

}  // namespace pinlab
