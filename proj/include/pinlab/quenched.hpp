#pragma once

// Quenched partition functions by log-domain dynamic programming over renewal
// configurations, Monte Carlo free-energy estimates and the quenched critical point.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pinlab/disorder_laws.hpp"
#include "pinlab/renewal_kernels.hpp"

namespace pinlab {

struct PolymerParams {
  RenewalKernel kernel;
  DisorderLaw disorder;
  double beta = 0.0;
  double h = 0.0;
  std::size_t n = 1;
  std::size_t replicas = 1;
  std::uint64_t base_seed = 0;
};

void validate(const PolymerParams& params);

// Entries 0..n of log Z_m for the path pinned at 0 and m, with reward
// beta * omega_j - h at each renewal j < m. Entry 0 is 0.
std::vector<double> pinned_log_partitions(const RenewalKernel& kernel,
                                          std::span<const double> omega, double beta, double h,
                                          std::size_t n);

// log Z_n of the pinned polymer; omega must hold at least n charges.
double partition_function_log(const PolymerParams& params, std::span<const double> omega);

// Exponential-time reference for log Z_n: sums over every renewal set in
// {1, ..., n-1} explicitly. n <= 20.
double enumerate_partition_log(const RenewalKernel& kernel, std::span<const double> omega,
                               double beta, double h, std::size_t n);

// log E_K[prod_{k<n} exp((beta omega_k - h) 1{k renewal})], no constraint at n.
double free_endpoint_partition_log(const RenewalKernel& kernel, std::span<const double> omega,
                                   double beta, double h, std::size_t n);

// log Z_n at beta = 0, h = -lambda.
double homopolymer_partition_log(const RenewalKernel& kernel, double lambda, std::size_t n);

struct FreeEnergyEstimate {
  double mean;    // average of (1/n) log Z_n over replicas
  double stderr_;
  std::size_t n;
  std::size_t replicas;
  std::string seeds_digest;          // FNV-1a over (seed, replica index, draws consumed)
  std::vector<double> per_replica;   // (1/n) log Z_n
  bool lower_bound_ok;               // log Z_n >= beta omega_0 - h + log K(n) on every replica
};

// Replica r uses derive_stream(base_seed, r); the result does not depend on `threads`.
FreeEnergyEstimate quenched_free_energy(const PolymerParams& params, unsigned threads = 1);

struct AnnealedCheck {
  double disorder_average;  // sum over charge patterns of P(omega) Z_n(omega)
  double homopolymer;       // Z_n of the homopolymer at log M(beta) - h
  double relative_error;
  bool pass;
};

// Enumerates every charge pattern of a finitely supported law (n <= 16).
AnnealedCheck annealed_partition_check(const RenewalKernel& kernel, const DisorderLaw& disorder,
                                       double beta, double h, std::size_t n, double tol = 1e-10);

enum class Localization { localized, delocalized, undecided };

struct QuenchedSearchConfig {
  double h_lo = 0.0;  // initial bracket; both zero selects [-0.5, log M(beta) + 0.5]
  double h_hi = 0.0;
  double width = 0.01;  // target bracket width, finite-size widening included
  std::size_t n = 4096;
  std::size_t replicas = 64;
  std::uint64_t base_seed = 0;
  double c_fs = 5.0;
  int max_iterations = 60;
  unsigned threads = 1;
  bool doubled_n_diagnostic = true;
};

struct SearchStep {
  double h;
  std::size_t n;
  double mean;
  double stderr_;
  Localization verdict;
};

struct QuenchedBracket {
  double h_lo;
  double h_hi;
  bool undecided;
  double finite_size_shift;  // widening added to the delocalized end
  std::vector<SearchStep> steps;
  std::vector<SearchStep> diagnostics;  // bracket ends re-estimated at n and 2n
};

Localization classify(const FreeEnergyEstimate& estimate, double c_fs);

QuenchedBracket quenched_critical_point(const RenewalKernel& kernel, const DisorderLaw& disorder,
                                        double beta, const QuenchedSearchConfig& config);

// Runs body(i) for i in [0, count) on up to `threads` threads.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

}  // namespace pinlab
