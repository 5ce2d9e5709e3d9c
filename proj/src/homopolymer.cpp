#include "pinlab/homopolymer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include "pinlab/errors.hpp"
#include "pinlab/numerics.hpp"

namespace pinlab {
namespace {

constexpr double kSmallestBracket = 1e-300;

// Root of the increasing map f -> deficit(f) - target on (0, hi]; target > 0.
double solve_deficit(const std::function<double(double)>& deficit,
                     const std::function<double(double)>& moment, double target, double hi) {
  auto g = [&](double f) { return deficit(f) - target; };
  while (g(hi) < 0.0) {
    hi *= 2.0;
    if (!std::isfinite(hi)) throw PrecisionError("fixed point: no upper bracket");
  }
  double lo = hi * 1e-4;
  while (g(lo) > 0.0) {
    lo *= 1e-4;
    if (lo < kSmallestBracket) throw PrecisionError("fixed point: free energy below double range");
  }
  return numerics::solve_increasing(g, moment, lo, hi, 0.0).x;
}

}  // namespace

HomopolymerResult homopolymer_free_energy(const RenewalKernel& kernel, double lambda, double tol) {
  if (!(tol > 0.0)) throw InvalidParameter("homopolymer_free_energy: tol must be positive");
  if (std::isnan(lambda)) throw InvalidParameter("homopolymer_free_energy: lambda is NaN");
  if (lambda <= 0.0) {
    return {lambda, 0.0, std::fabs(std::exp(-lambda) - 1.0), PhaseStatus::unpinned};
  }
  const double target = -std::expm1(-lambda);
  auto deficit = [&](double f) { return kernel.laplace_deficit(f); };
  auto moment = [&](double f) { return kernel.laplace_moment(f); };
  const double f = solve_deficit(deficit, moment, target, lambda);
  const double residual = std::fabs(kernel.laplace_deficit(f) - target);
  if (residual > tol) {
    throw PrecisionError("homopolymer_free_energy: residual " + std::to_string(residual) +
                         " exceeds tolerance");
  }
  return {lambda, f, residual, PhaseStatus::pinned};
}

HomopolymerResult annealed_free_energy(const RenewalKernel& kernel, const DisorderLaw& disorder,
                                       double beta, double h, double tol) {
  return homopolymer_free_energy(kernel, disorder.log_mgf(beta) - h, tol);
}

std::vector<AnnealedCurvePoint> annealed_critical_curve(const RenewalKernel& kernel,
                                                        const DisorderLaw& disorder,
                                                        std::span<const double> beta_grid) {
  if (beta_grid.empty()) throw InvalidParameter("annealed_critical_curve: empty beta grid");
  std::vector<AnnealedCurvePoint> out;
  for (double beta : beta_grid) {
    const double hc = disorder.log_mgf(beta);
    double lo = hc - 1.0;
    double hi = hc + 1.0;
    auto pinned = [&](double h) { return annealed_free_energy(kernel, disorder, beta, h).f > 0.0; };
    if (!pinned(lo) || pinned(hi)) {
      throw InvariantViolation("annealed_critical_curve.bracket",
                               "annealed free energy does not change sign around log M(beta)");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::fabs(hc)); ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (pinned(mid) ? lo : hi) = mid;
    }
    const double located = 0.5 * (lo + hi);
    if (std::fabs(located - hc) > 1e-8) {
      throw InvariantViolation("annealed_critical_curve.bisection",
                               "bisection zero " + std::to_string(located) + " vs log M = " +
                                   std::to_string(hc));
    }
    out.push_back({beta, hc, located});
  }
  return out;
}

LambdaZero lambda0(const ChiResult& c) {
  switch (c.status) {
    case ChiStatus::finite:
      return {c.status, std::log1p(1.0 / c.value)};
    case ChiStatus::infinite:
      return {c.status, 0.0};
    case ChiStatus::undecided:
      return {c.status, std::numeric_limits<double>::quiet_NaN()};
  }
  return {c.status, std::numeric_limits<double>::quiet_NaN()};
}

LambdaZero lambda0(const RenewalKernel& kernel, double chi_tolerance) {
  return lambda0(chi(kernel, chi_tolerance));
}

JointFreeEnergy joint_free_energy_from_overlap(const OverlapKernel& overlap, double total_mass,
                                               double lambda, double tol) {
  const std::size_t N = overlap.horizon();
  const double L = overlap.total();
  const double target_mass = std::exp(-lambda);
  if (target_mass >= total_mass) {
    return {lambda, 0.0, std::nullopt, std::nullopt, PhaseStatus::unpinned, N, 0.0};
  }
  if (target_mass >= L) {
    throw PrecisionError("joint free energy: overlap horizon " + std::to_string(N) +
                             " holds too little mass for lambda = " + std::to_string(lambda),
                         4 * N);
  }
  const auto& K2 = overlap.masses;
  auto deficit = [&](double f) {
    double s = 0.0;
    for (std::size_t n = 1; n <= N; ++n) s += K2[n] * -std::expm1(-f * static_cast<double>(n));
    return s;
  };
  auto moment = [&](double f) {
    double s = 0.0;
    for (std::size_t n = 1; n <= N; ++n) {
      const double nd = static_cast<double>(n);
      s += nd * K2[n] * std::exp(-f * nd);
    }
    return s;
  };
  const double f = solve_deficit(deficit, moment, L - target_mass, std::max(lambda, 1e-300));
  const double missing = std::max(total_mass - L, 0.0);
  const double tail = missing * std::exp(-static_cast<double>(N + 1) * f);
  const double allowed = tol * target_mass / 10.0;
  if (tail > allowed) {
    const double need = std::log(missing / allowed) / f;
    throw PrecisionError("joint free energy: series tail " + std::to_string(tail) +
                             " above tolerance at horizon " + std::to_string(N),
                         static_cast<std::size_t>(std::ceil(need)) + 1);
  }
  return {lambda, f, std::nullopt, std::nullopt, PhaseStatus::pinned, N, tail};
}

JointFreeEnergy joint_free_energy(const RenewalKernel& kernel, double lambda,
                                  std::optional<std::size_t> tr, const JointOptions& options) {
  if (!(options.tol > 0.0)) throw InvalidParameter("joint_free_energy: tol must be positive");
  std::optional<RenewalKernel> truncated;
  double total_mass = 1.0;
  std::optional<double> l0;
  std::size_t N = options.initial_horizon;
  if (tr) {
    truncated = truncate_kernel(kernel, *tr);
    if (N == 0) N = std::max<std::size_t>(1024, 32 * *tr);
  } else {
    const ChiResult c = options.chi ? *options.chi : chi(kernel, 1e-5);
    const LambdaZero z = lambda0(c);
    if (z.status == ChiStatus::undecided) {
      throw DomainError("joint_free_energy: chi convergence undecided");
    }
    l0 = z.value;
    if (lambda <= z.value) {
      return {lambda, 0.0, std::nullopt, l0, PhaseStatus::unpinned, 0, 0.0};
    }
    total_mass = c.status == ChiStatus::finite ? c.value / (c.value + 1.0) : 1.0;
    if (N == 0) N = 4096;
  }
  const RenewalKernel& base = truncated ? *truncated : kernel;
  N = std::min(N, options.max_horizon);
  for (;;) {
    const OverlapKernel overlap = overlap_kernel(base, N);
    try {
      JointFreeEnergy r = joint_free_energy_from_overlap(overlap, total_mass, lambda, options.tol);
      r.tr = tr;
      r.lambda0 = l0;
      return r;
    } catch (const PrecisionError& e) {
      if (N >= options.max_horizon) throw;
      N = std::min(options.max_horizon, std::max(2 * N, e.required_horizon()));
    }
  }
}

double lemma_a1_bound(const OverlapKernel& overlap, double lambda0_value, std::size_t tr,
                      double lambda) {
  if (tr < 1) throw InvalidParameter("lemma_a1_bound: tr must be >= 1");
  if (!(lambda < lambda0_value)) throw DomainError("lemma_a1_bound: requires lambda < lambda0");
  if (tr - 1 > overlap.horizon()) throw InvalidParameter("lemma_a1_bound: overlap horizon too short");
  const double L = tr >= 2 ? overlap.partial_sums[tr - 1] : 0.0;
  return std::log((1.0 - L) / (std::exp(-lambda) - L));
}

double lemma_a1_bound(const RenewalKernel& kernel, std::size_t tr, double lambda) {
  const ChiResult c = chi(kernel, 1e-5);
  if (c.status != ChiStatus::finite) throw DomainError("lemma_a1_bound: requires finite chi");
  const OverlapKernel overlap = overlap_kernel(kernel, std::max<std::size_t>(tr, 2) - 1);
  return lemma_a1_bound(overlap, lambda0(c).value, tr, lambda);
}

double lemma_a1_limit(double lambda0_value, double lambda) {
  if (!(lambda < lambda0_value)) throw DomainError("lemma_a1_limit: requires lambda < lambda0");
  const double e0 = std::exp(-lambda0_value);
  return std::log((1.0 - e0) / (std::exp(-lambda) - e0));
}

}  // namespace pinlab
