#include "pinlab/relevance.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <limits>

#include "pinlab/errors.hpp"
#include "pinlab/homopolymer.hpp"
#include "pinlab/numerics.hpp"
#include "pinlab/quenched.hpp"
#include "pinlab/rng.hpp"

namespace pinlab {
namespace {

using numerics::kInf;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Root of an increasing g on [0, inf) with g(0) < 0, by doubling then bisection.
double increasing_root(const std::function<double(double)>& g, double tol) {
  double lo = 0.0;
  double hi = 1.0;
  while (g(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e6) throw PrecisionError("critical temperature: no bracket below 1e6");
  }
  for (int it = 0; it < 400 && hi - lo > tol; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (g(mid) < 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double log_xi(const DisorderLaw& d, double beta) {
  return d.log_mgf(2.0 * beta) - 2.0 * d.log_mgf(beta);
}

std::size_t support_of(const RenewalKernel& k, const char* who) {
  const auto s = k.max_support();
  if (!s) throw InvalidParameter(std::string(who) + ": kernel must have finite support");
  return *s;
}

// Renewal sets in {0..n-1} containing 0 as bit masks, with their probabilities
// under the chain without a constraint at n.
std::vector<std::pair<unsigned, double>> renewal_sets(const RenewalKernel& k, std::size_t n) {
  std::vector<std::pair<unsigned, double>> out;
  for (unsigned rest = 0; rest < (1u << (n - 1)); ++rest) {
    const unsigned mask = (rest << 1) | 1u;
    double p = 1.0;
    std::size_t last = 0;
    for (std::size_t k2 = 1; k2 < n; ++k2) {
      if (mask & (1u << k2)) {
        p *= k.mass(k2 - last);
        last = k2;
      }
    }
    p *= k.tail(n - last);
    if (p > 0.0) out.emplace_back(mask, p);
  }
  return out;
}

}  // namespace

CriticalBound beta_c_star(const ChiResult& c, const DisorderLaw& d, double tol) {
  const double atom = d.atom_at_w();
  const double limit = atom > 0.0 ? 1.0 / atom : kInf;
  const double at50 = std::exp(log_xi(d, 50.0));
  if (c.status == ChiStatus::undecided) return {BoundKind::undecided, kNaN, kNaN, kNaN, limit, at50};
  if (c.status == ChiStatus::infinite) return {BoundKind::degenerate_zero, 0.0, 1.0, 0.0, limit, at50};
  const double target = 1.0 + 1.0 / c.value;
  if (limit <= target) return {BoundKind::infinite, kInf, target, 0.0, limit, at50};
  const double log_target = std::log1p(1.0 / c.value);
  const double b = increasing_root([&](double x) { return log_xi(d, x) - log_target; }, tol);
  return {BoundKind::finite, b, target, std::fabs(std::exp(log_xi(d, b)) - target), limit, at50};
}

CriticalBound beta_c_star(const RenewalKernel& k, const DisorderLaw& d, double tol) {
  return beta_c_star(chi(k, 1e-6), d, tol);
}

CriticalBound beta_c_star_star(double hk, const DisorderLaw& d, double tol) {
  if (!std::isfinite(hk)) throw InvalidParameter("beta_c_star_star: h(K) must be finite");
  const double atom = d.atom_at_w();
  const double limit = atom > 0.0 ? -std::log(atom) : kInf;
  const double at50 = relative_entropy_tilt(d, 50.0);
  if (limit <= hk) return {BoundKind::infinite, kInf, hk, 0.0, limit, at50};
  const double b = increasing_root([&](double x) { return relative_entropy_tilt(d, x) - hk; }, tol);
  return {BoundKind::finite, b, hk, std::fabs(relative_entropy_tilt(d, b) - hk), limit, at50};
}

CriticalBound beta_c_star_star(const RenewalKernel& k, const DisorderLaw& d, double tol) {
  return beta_c_star_star(kernel_entropy(k).value, d, tol);
}

CriticalTemperatureBounds critical_temperature_bounds(const RenewalKernel& k,
                                                      const DisorderLaw& d) {
  const ChiResult c = chi(k, 1e-6);
  const double hk = kernel_entropy(k).value;
  return {c.value, hk, beta_c_star(c, d), beta_c_star_star(hk, d)};
}

double replica_moment_log(const RenewalKernel& k, const DisorderLaw& d, double beta,
                          std::size_t n) {
  if (n < 1) throw InvalidParameter("replica_moment: n must be >= 1");
  const std::size_t tr = support_of(k, "replica_moment");
  const double lx = log_xi(d, beta);
  const double xi_value = std::exp(lx);
  std::vector<double> K(tr + 1);
  for (std::size_t g = 1; g <= tr; ++g) K[g] = k.mass(g);
  // w[a * tr + b]: weight of residual times (a, b) until each chain's next renewal.
  std::vector<double> w(tr * tr, 0.0), next(tr * tr, 0.0);
  w[0] = 1.0;
  double log_scale = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    w[0] *= xi_value;
    if (t + 1 == n) break;
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t a = 0; a < tr; ++a) {
      for (std::size_t b = 0; b < tr; ++b) {
        const double v = w[a * tr + b];
        if (v == 0.0) continue;
        if (a > 0 && b > 0) {
          next[(a - 1) * tr + (b - 1)] += v;
        } else if (a > 0) {
          for (std::size_t g = 1; g <= tr; ++g) next[(a - 1) * tr + (g - 1)] += v * K[g];
        } else if (b > 0) {
          for (std::size_t g = 1; g <= tr; ++g) next[(g - 1) * tr + (b - 1)] += v * K[g];
        } else {
          for (std::size_t g = 1; g <= tr; ++g) {
            for (std::size_t g2 = 1; g2 <= tr; ++g2) {
              next[(g - 1) * tr + (g2 - 1)] += v * K[g] * K[g2];
            }
          }
        }
      }
    }
    double total = 0.0;
    for (double v : next) total += v;
    for (std::size_t i = 0; i < next.size(); ++i) w[i] = next[i] / total;
    log_scale += std::log(total);
  }
  double total = 0.0;
  for (double v : w) total += v;
  return log_scale + std::log(total);
}

double replica_moment(const RenewalKernel& k, const DisorderLaw& d, double beta, std::size_t n) {
  return std::exp(replica_moment_log(k, d, beta, n));
}

ReplicaCheck replica_identity_check(const RenewalKernel& k, const DisorderLaw& d, double beta,
                                    std::size_t n) {
  if (!d.finitely_supported()) {
    throw InvalidParameter("replica_identity_check: disorder must be finitely supported");
  }
  if (n < 1 || n > 10) throw InvalidParameter("replica_identity_check: need 1 <= n <= 10");
  support_of(k, "replica_identity_check");
  const auto sets = renewal_sets(k, n);
  const double xi_value = xi(d, beta);

  double pairs = 0.0;
  for (const auto& [a, pa] : sets) {
    for (const auto& [b, pb] : sets) pairs += pa * pb * std::pow(xi_value, std::popcount(a & b));
  }

  const auto& vals = d.values();
  const auto& probs = d.probs();
  const double M = d.mgf(beta);
  const std::size_t q = vals.size();
  std::size_t patterns = 1;
  for (std::size_t i = 0; i < n; ++i) patterns *= q;
  std::vector<std::size_t> idx(n);
  double average = 0.0;
  for (std::size_t code = 0; code < patterns; ++code) {
    std::size_t c = code;
    for (std::size_t i = 0; i < n; ++i) {
      idx[i] = c % q;
      c /= q;
    }
    double theta = 0.0;
    for (const auto& [a, pa] : sets) {
      double prod = pa;
      for (std::size_t i = 0; i < n; ++i) {
        if (a & (1u << i)) prod *= std::exp(beta * vals[idx[i]]) / M;
      }
      theta += prod;
    }
    double law = 0.0;
    for (const auto& [b, pb] : sets) {
      double prod = pb;
      for (std::size_t i = 0; i < n; ++i) {
        prod *= probs[idx[i]] * ((b & (1u << i)) ? std::exp(beta * vals[idx[i]]) / M : 1.0);
      }
      law += prod;
    }
    average += law * theta;
  }

  const double dp = replica_moment(k, d, beta, n);
  auto rel = [](double x, double y) { return std::fabs(x - y) / std::max(std::fabs(y), 1e-300); };
  return {dp, pairs, average, std::max({rel(dp, pairs), rel(average, pairs), rel(dp, average)})};
}

std::vector<double> sample_word_letters(const RenewalKernel& k, const DisorderLaw& d, double beta,
                                        RngStream& stream, std::size_t n) {
  const std::size_t tr = support_of(k, "sample_word_letters");
  std::vector<double> cdf(tr);
  double acc = 0.0;
  for (std::size_t g = 1; g <= tr; ++g) {
    acc += k.mass(g);
    cdf[g - 1] = acc;
  }
  const TiltedSampler first(d, beta);
  const TiltedSampler rest(d, 0.0);
  std::vector<double> x;
  x.reserve(n + tr);
  while (x.size() < n) {
    const double u = stream.uniform01() * acc;
    const std::size_t len =
        std::min<std::size_t>(std::upper_bound(cdf.begin(), cdf.end(), u) - cdf.begin(), tr - 1) + 1;
    x.push_back(first(stream));
    for (std::size_t i = 1; i < len; ++i) x.push_back(rest(stream));
  }
  x.resize(n);
  return x;
}

RelevanceReport entropy_estimator(const RenewalKernel& kernel, const DisorderLaw& d, double beta,
                                  std::size_t tr, std::size_t n, std::size_t replicas,
                                  std::uint64_t seed, unsigned threads) {
  if (tr < 1) throw InvalidParameter("entropy_estimator: tr must be >= 1");
  if (n < 1 || replicas < 1) throw InvalidParameter("entropy_estimator: n and replicas must be >= 1");
  if (!(beta >= 0.0)) throw InvalidParameter("entropy_estimator: beta must be >= 0");
  const RenewalKernel ktr = truncate_kernel(kernel, tr);
  const double m_tr = ktr.mean();
  double entropy_ktr = 0.0;
  for (std::size_t g = 1; g <= tr; ++g) {
    const double p = ktr.mass(g);
    if (p > 0.0) entropy_ktr -= p * std::log(p);
  }

  std::vector<double> values(replicas, 0.0);
  if (beta > 0.0) {
    const double h = d.log_mgf(beta);
    parallel_for(replicas, threads, [&](std::size_t r) {
      RngStream stream = derive_stream(seed, r);
      const std::vector<double> x = sample_word_letters(ktr, d, beta, stream, n);
      values[r] = free_endpoint_partition_log(ktr, x, beta, h, n) / static_cast<double>(n);
    });
  }
  const numerics::MeanStderr ms = numerics::mean_and_stderr(values);

  RelevanceReport r;
  r.beta = beta;
  r.tr = tr;
  r.n = n;
  r.replicas = replicas;
  r.m_tr = m_tr;
  r.entropy_estimate = beta > 0.0 ? ms.mean : 0.0;
  r.stderr_ = beta > 0.0 ? ms.stderr_ : 0.0;
  r.lower_bound = relative_entropy_tilt(d, beta) - entropy_ktr;
  r.upper_bound = joint_free_energy(kernel, log_xi(d, beta), tr).f2;
  r.limit_lower_bound = relative_entropy_tilt(d, beta) - kernel_entropy(kernel).value;
  const double sigma = m_tr * r.stderr_;
  const double scaled = m_tr * r.entropy_estimate;
  r.excludes_zero = scaled - 3.0 * sigma > 0.0;
  r.sandwich_ok = r.lower_bound - 3.0 * sigma <= scaled && scaled <= m_tr * r.upper_bound + 3.0 * sigma;
  r.per_replica = std::move(values);
  return r;
}

MonotonicityScan entropy_monotonicity_scan(const RenewalKernel& kernel, const DisorderLaw& d,
                                           std::span<const double> beta_grid, std::size_t tr,
                                           std::size_t n, std::size_t replicas,
                                           std::uint64_t seed, unsigned threads) {
  MonotonicityScan scan;
  scan.monotone = true;
  for (double beta : beta_grid) {
    scan.reports.push_back(entropy_estimator(kernel, d, beta, tr, n, replicas, seed, threads));
  }
  for (std::size_t i = 1; i < scan.reports.size(); ++i) {
    const auto& a = scan.reports[i - 1].per_replica;
    const auto& b = scan.reports[i].per_replica;
    std::vector<double> diff(a.size());
    for (std::size_t r = 0; r < a.size(); ++r) diff[r] = b[r] - a[r];
    const numerics::MeanStderr ms = numerics::mean_and_stderr(diff);
    const bool ascending = beta_grid[i] >= beta_grid[i - 1];
    const double signed_mean = ascending ? ms.mean : -ms.mean;
    const bool decrease = signed_mean < -3.0 * ms.stderr_ - 1e-12;
    scan.step_differences.push_back(ms.mean);
    scan.step_stderr.push_back(ms.stderr_);
    scan.decrease_flags.push_back(decrease);
    if (decrease) scan.monotone = false;
  }
  return scan;
}

RelevanceVerdict relevance_verdict(std::span<const RelevanceReport> reports) {
  if (reports.empty()) return RelevanceVerdict::undecided;
  if (reports.back().limit_lower_bound > 0.0) return RelevanceVerdict::relevant;
  const RelevanceReport& mid = reports[reports.size() / 2];
  const RelevanceReport& last = reports.back();
  const double v_mid = mid.m_tr * mid.entropy_estimate;
  const double v_last = last.m_tr * last.entropy_estimate;
  const double s_pair = std::hypot(mid.m_tr * mid.stderr_, last.m_tr * last.stderr_);
  const bool falling = v_last < v_mid - 3.0 * s_pair;
  if (!falling &&
      std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.excludes_zero; })) {
    return RelevanceVerdict::relevant;
  }
  bool upper_nonincreasing = true;
  for (std::size_t i = reports.size() / 2 + 1; i < reports.size(); ++i) {
    const double prev = reports[i - 1].m_tr * reports[i - 1].upper_bound;
    const double cur = reports[i].m_tr * reports[i].upper_bound;
    if (cur > prev * (1.0 + 1e-9)) upper_nonincreasing = false;
  }
  if (upper_nonincreasing && (falling || !last.excludes_zero)) {
    return RelevanceVerdict::irrelevant_consistent;
  }
  return RelevanceVerdict::undecided;
}

const char* to_string(RelevanceVerdict v) {
  switch (v) {
    case RelevanceVerdict::relevant:
      return "relevant";
    case RelevanceVerdict::irrelevant_consistent:
      return "irrelevant-consistent";
    case RelevanceVerdict::undecided:
      return "undecided";
  }
  return "undecided";
}

VariationalResult annealed_variational_check(const DisorderLaw& d, double beta,
                                             std::span<const double> grid) {
  if (grid.empty()) throw InvalidParameter("annealed_variational_check: empty tilt grid");
  const auto [mn, mx] = std::minmax_element(grid.begin(), grid.end());
  if (beta < *mn || beta > *mx) {
    throw InvalidParameter("annealed_variational_check: tilt grid must cover beta");
  }
  std::vector<double> sorted(grid.begin(), grid.end());
  std::sort(sorted.begin(), sorted.end());
  double resolution = 0.0;
  for (std::size_t i = 1; i < sorted.size(); ++i) {
    resolution = std::max(resolution, sorted[i] - sorted[i - 1]);
  }
  double best = -kInf;
  double arg = grid.front();
  for (double l : grid) {
    const double v = beta * d.tilted_mean(l) - relative_entropy_tilt(d, l);
    if (v > best) {
      best = v;
      arg = l;
    }
  }
  return {arg, best, d.log_mgf(beta), resolution};
}

namespace {
const char* kind_name(BoundKind k) {
  switch (k) {
    case BoundKind::finite:
      return "finite";
    case BoundKind::infinite:
      return "infinite";
    case BoundKind::degenerate_zero:
      return "degenerate-zero";
    case BoundKind::undecided:
      return "undecided";
  }
  return "undecided";
}

nlohmann::json number_or_string(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}
}  // namespace

nlohmann::json to_json(const CriticalBound& b) {
  return {{"kind", kind_name(b.kind)},
          {"value", number_or_string(b.value)},
          {"target", number_or_string(b.target)},
          {"residual", number_or_string(b.residual)},
          {"limit_value", number_or_string(b.limit_value)},
          {"lhs_at_50", number_or_string(b.lhs_at_50)}};
}

nlohmann::json to_json(const CriticalTemperatureBounds& b) {
  return {{"chi", number_or_string(b.chi)},
          {"kernel_entropy", b.kernel_entropy},
          {"beta_c_star", to_json(b.beta_c_star)},
          {"beta_c_star_star", to_json(b.beta_c_star_star)}};
}

nlohmann::json to_json(const RelevanceReport& r) {
  return {{"beta", r.beta},
          {"tr", r.tr},
          {"n", r.n},
          {"replicas", r.replicas},
          {"m_tr", r.m_tr},
          {"entropy_estimate", r.entropy_estimate},
          {"stderr", r.stderr_},
          {"lower_bound", r.lower_bound},
          {"upper_bound", r.upper_bound},
          {"limit_lower_bound", r.limit_lower_bound},
          {"excludes_zero", r.excludes_zero},
          {"sandwich_ok", r.sandwich_ok}};
}

}  // namespace pinlab
