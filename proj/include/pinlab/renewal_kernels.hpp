#pragma once

// Renewal return-time laws K on the positive integers, their return
// probabilities, truncations, overlap (joint-renewal) kernels and entropies.

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace pinlab {

enum class KernelFamily { power, geometric, table };

// Return-time law K. Power kernels use K(n) = n^{-(1+alpha)} / zeta(1+alpha) in
// closed form at every n; geometric kernels K(n) = p (1-p)^{n-1}; tables hold
// an explicit finite-support mass vector.
class RenewalKernel {
 public:
  static RenewalKernel power(double alpha, std::optional<std::size_t> n_cap = std::nullopt);
  static RenewalKernel geometric(double p);
  // masses[i] = K(i + 1). Validates normalization, sign and aperiodicity.
  static RenewalKernel table(std::vector<double> masses, std::string l_description = "table");

  KernelFamily family() const { return family_; }
  std::optional<double> alpha() const { return alpha_; }
  double p() const { return p_; }
  const std::string& l_description() const { return l_description_; }
  std::optional<std::size_t> n_cap() const { return n_cap_; }
  // Largest n with K(n) > 0, when finite.
  std::optional<std::size_t> max_support() const;

  double mass(std::size_t n) const;
  double log_mass(std::size_t n) const;
  // sum_{m >= n} K(m), n >= 1.
  double tail(std::size_t n) const;
  // Vector of size N + 1 with entry n equal to K(n); entry 0 is 0.
  std::vector<double> masses(std::size_t N) const;
  double mean() const;

  // sum_n K(n) e^{-n f}
  double laplace(double f) const;
  // sum_n K(n) (1 - e^{-n f}), computed without cancellation against 1 where possible.
  double laplace_deficit(double f) const;
  // sum_n n K(n) e^{-n f}
  double laplace_moment(double f) const;

 private:
  RenewalKernel() = default;

  KernelFamily family_ = KernelFamily::table;
  std::optional<double> alpha_;
  double p_ = 0.0;
  double zeta_ = 1.0;  // normalizer for power kernels
  std::vector<double> table_;
  std::string l_description_;
  std::optional<std::size_t> n_cap_;
};

nlohmann::json to_json(const RenewalKernel& kernel);
RenewalKernel kernel_from_json(const nlohmann::json& j);

struct ReturnProbabilities {
  std::vector<double> u;  // u[0] = 1, u[n] = P(n is a renewal time)
  std::size_t horizon() const { return u.empty() ? 0 : u.size() - 1; }
};

// Exact renewal recursion u_n = sum_{k=1}^n K(k) u_{n-k} up to N.
ReturnProbabilities return_probabilities(const RenewalKernel& kernel, std::size_t N);

enum class ChiStatus { finite, infinite, undecided };

struct ChiResult {
  ChiStatus status;
  double value;             // +inf when status == infinite, NaN when undecided
  double truncation_error;  // estimated error of the finite value
  double fitted_alpha;      // alpha_fit from the decay u_n ~ n^{alpha_fit - 1}
  double decay_exponent;    // 2 (1 - alpha_fit), the exponent of u_n^2
  std::size_t horizon;
};

// Overlap sum sum_{n >= 1} u_n^2. Convergence is decided from the decay of u_n
// on the last decade of the horizon; exponents in (0.95, 1.05) are undecided.
// The horizon doubles from `horizon` up to `max_horizon` until the estimated
// error is below `tolerance`; otherwise throws PrecisionError.
ChiResult chi(const RenewalKernel& kernel, double tolerance, std::size_t horizon = 1u << 16,
              std::size_t max_horizon = 1u << 17);

// K^tr: K below tr, all remaining mass collapsed onto tr.
RenewalKernel truncate_kernel(const RenewalKernel& kernel, std::size_t tr);

struct KernelEntropy {
  double value;       // -sum K log K
  double tail_bound;  // width of the certified enclosure of the tail beyond the horizon
};

// Entropy with the first `horizon` terms summed directly and the remaining
// tail enclosed by integral comparison.
KernelEntropy kernel_entropy(const RenewalKernel& kernel, std::size_t horizon = 4096);

// Return-time law K_2 of the joint renewal set of two independent copies.
struct OverlapKernel {
  std::vector<double> masses;        // entry n = K_2(n), entry 0 unused
  std::vector<double> partial_sums;  // entry n = L_2(n)
  std::size_t horizon() const { return masses.empty() ? 0 : masses.size() - 1; }
  double total() const { return partial_sums.empty() ? 0.0 : partial_sums.back(); }
};

// Inverts the renewal equation for v_n = u_n^2 up to N. Masses below -1e-10
// raise InvariantViolation; smaller negatives clamp to 0.
OverlapKernel overlap_kernel(const RenewalKernel& kernel, std::size_t N);
// Same, from precomputed return probabilities (horizon taken from `u`).
OverlapKernel overlap_kernel(const ReturnProbabilities& u);

}  // namespace pinlab
