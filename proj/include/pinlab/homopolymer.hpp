#pragma once

// Homogeneous pinning: the free-energy fixed point e^{-lambda} = sum_n K(n) e^{-n f},
// its annealed specialization and the joint-renewal (overlap) variants.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "pinlab/disorder_laws.hpp"
#include "pinlab/renewal_kernels.hpp"

namespace pinlab {

enum class PhaseStatus { pinned, unpinned };

struct HomopolymerResult {
  double lambda;
  double f;
  double residual;  // |e^{-lambda} - sum K(n) e^{-n f}|
  PhaseStatus status;
};

// Free energy of the homopolymer with pinning reward lambda. For recurrent K
// the result is unpinned (f = 0) exactly when lambda <= 0.
HomopolymerResult homopolymer_free_energy(const RenewalKernel& kernel, double lambda,
                                          double tol = 1e-12);

// Homopolymer at parameter log M(beta) - h.
HomopolymerResult annealed_free_energy(const RenewalKernel& kernel, const DisorderLaw& disorder,
                                       double beta, double h, double tol = 1e-12);

struct AnnealedCurvePoint {
  double beta;
  double h_c_ann;      // log M(beta)
  double bisection_h;  // zero of h -> f^ann(beta, h) located by bisection
};

// (beta, log M(beta)) on the grid, each point cross-checked by bisection on
// the annealed free energy; disagreement beyond 1e-8 raises InvariantViolation.
std::vector<AnnealedCurvePoint> annealed_critical_curve(const RenewalKernel& kernel,
                                                        const DisorderLaw& disorder,
                                                        std::span<const double> beta_grid);

struct LambdaZero {
  ChiStatus status;
  double value;  // log(1 + 1/chi); 0 when chi is infinite; NaN when undecided
};

LambdaZero lambda0(const ChiResult& chi_result);
LambdaZero lambda0(const RenewalKernel& kernel, double chi_tolerance = 1e-5);

struct JointFreeEnergy {
  double lambda;
  double f2;                       // f_2 or f_2^tr
  std::optional<std::size_t> tr;   // set for the truncated variant
  std::optional<double> lambda0;   // set for the untruncated variant
  PhaseStatus status;
  std::size_t horizon;             // overlap-kernel horizon used
  double tail_bound;               // bound on the neglected part of the series
};

struct JointOptions {
  double tol = 1e-10;
  std::size_t initial_horizon = 0;  // 0 selects a default from tr
  std::size_t max_horizon = 1u << 18;
  std::optional<ChiResult> chi;     // reused for the untruncated variant when given
};

// Solves the fixed point with K replaced by K_2 (or K_2^tr built from
// truncate_kernel(kernel, tr)). The horizon grows until the series tail is
// below tol * e^{-lambda} / 10; PrecisionError otherwise.
JointFreeEnergy joint_free_energy(const RenewalKernel& kernel, double lambda,
                                  std::optional<std::size_t> tr, const JointOptions& options = {});

// Fixed point for an overlap kernel known up to its horizon, with the missing
// mass total_mass - L_2(N) bounding the neglected tail.
JointFreeEnergy joint_free_energy_from_overlap(const OverlapKernel& overlap, double total_mass,
                                               double lambda, double tol);

// log[(1 - L_2(tr-1)) / (e^{-lambda} - L_2(tr-1))], which dominates tr f_2^tr(lambda)
// for lambda < lambda0. `overlap` must reach horizon tr - 1.
double lemma_a1_bound(const OverlapKernel& overlap, double lambda0_value, std::size_t tr,
                      double lambda);
double lemma_a1_bound(const RenewalKernel& kernel, std::size_t tr, double lambda);
// tr -> infinity value log[(1 - e^{-lambda0}) / (e^{-lambda} - e^{-lambda0})].
double lemma_a1_limit(double lambda0_value, double lambda);

}  // namespace pinlab
