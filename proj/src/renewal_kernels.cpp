#include "pinlab/renewal_kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pinlab/errors.hpp"
#include "pinlab/numerics.hpp"

namespace pinlab {
namespace {

constexpr double kNormalizationTol = 1e-12;

std::string family_name(KernelFamily f) {
  switch (f) {
    case KernelFamily::power:
      return "power";
    case KernelFamily::geometric:
      return "geometric";
    case KernelFamily::table:
      return "table";
  }
  return "table";
}

// Corrected overlap sum from u[1..N]: partial sum plus a fitted power tail.
struct ChiEstimate {
  double value;
  double slope;
};

ChiEstimate chi_estimate(const std::vector<double>& u, std::size_t N) {
  std::vector<double> lx, ly;
  const double lo = std::log(static_cast<double>(N) / 10.0);
  const double hi = std::log(static_cast<double>(N));
  constexpr int kPoints = 64;
  std::size_t last = 0;
  for (int i = 0; i < kPoints; ++i) {
    const auto n = static_cast<std::size_t>(std::llround(std::exp(lo + (hi - lo) * i / (kPoints - 1))));
    if (n == last || n < 1 || n > N) continue;
    last = n;
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(u[n]));
  }
  const double slope = numerics::fit_slope(lx, ly);
  double partial = 0.0;
  for (std::size_t n = 1; n <= N; ++n) partial += u[n] * u[n];
  const double e = -2.0 * slope;
  const double Nd = static_cast<double>(N);
  double tail = numerics::kInf;
  if (e > 1.0) {
    tail = u[N] * u[N] * std::pow(Nd, e) * std::pow(Nd + 0.5, 1.0 - e) / (e - 1.0);
  }
  return {partial + tail, slope};
}

}  // namespace

RenewalKernel RenewalKernel::power(double alpha, std::optional<std::size_t> n_cap) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidParameter("power kernel requires alpha > 0");
  }
  RenewalKernel k;
  k.family_ = KernelFamily::power;
  k.alpha_ = alpha;
  k.zeta_ = numerics::zeta(1.0 + alpha);
  k.l_description_ = "constant 1/zeta(1+alpha)";
  k.n_cap_ = n_cap;
  return k;
}

RenewalKernel RenewalKernel::geometric(double p) {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidParameter("geometric kernel requires p in (0, 1]");
  RenewalKernel k;
  k.family_ = KernelFamily::geometric;
  k.p_ = p;
  k.l_description_ = "geometric";
  return k;
}

RenewalKernel RenewalKernel::table(std::vector<double> masses, std::string l_description) {
  if (masses.empty()) throw InvariantViolation("kernel.nonempty", "mass table is empty");
  double total = 0.0;
  std::size_t g = 0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    if (!(masses[i] >= 0.0) || !std::isfinite(masses[i])) {
      throw InvariantViolation("kernel.nonnegative",
                               "K(" + std::to_string(i + 1) + ") = " + std::to_string(masses[i]));
    }
    total += masses[i];
    if (masses[i] > 0.0) g = std::gcd(g, i + 1);
  }
  if (std::fabs(total - 1.0) > kNormalizationTol) {
    throw InvariantViolation("kernel.normalization",
                             "sum of masses is " + std::to_string(total) + ", expected 1");
  }
  if (g != 1) {
    throw InvariantViolation("kernel.aperiodic", "gcd of support is " + std::to_string(g));
  }
  while (!masses.empty() && masses.back() == 0.0) masses.pop_back();
  RenewalKernel k;
  k.family_ = KernelFamily::table;
  k.table_ = std::move(masses);
  k.l_description_ = std::move(l_description);
  return k;
}

std::optional<std::size_t> RenewalKernel::max_support() const {
  if (family_ == KernelFamily::table) return table_.size();
  if (family_ == KernelFamily::geometric && p_ == 1.0) return 1;
  return std::nullopt;
}

double RenewalKernel::mass(std::size_t n) const {
  if (n == 0) return 0.0;
  switch (family_) {
    case KernelFamily::power:
      return std::exp(-(1.0 + *alpha_) * std::log(static_cast<double>(n))) / zeta_;
    case KernelFamily::geometric:
      return p_ * std::pow(1.0 - p_, static_cast<double>(n - 1));
    case KernelFamily::table:
      return n <= table_.size() ? table_[n - 1] : 0.0;
  }
  return 0.0;
}

double RenewalKernel::log_mass(std::size_t n) const {
  if (n == 0) return -numerics::kInf;
  switch (family_) {
    case KernelFamily::power:
      return -(1.0 + *alpha_) * std::log(static_cast<double>(n)) - std::log(zeta_);
    case KernelFamily::geometric:
      if (p_ == 1.0) return n == 1 ? 0.0 : -numerics::kInf;
      return std::log(p_) + static_cast<double>(n - 1) * std::log1p(-p_);
    case KernelFamily::table:
      return n <= table_.size() ? std::log(table_[n - 1]) : -numerics::kInf;
  }
  return -numerics::kInf;
}

double RenewalKernel::tail(std::size_t n) const {
  if (n <= 1) return 1.0;
  switch (family_) {
    case KernelFamily::power:
      return numerics::power_tail_sum(1.0 + *alpha_, n) / zeta_;
    case KernelFamily::geometric:
      return std::pow(1.0 - p_, static_cast<double>(n - 1));
    case KernelFamily::table: {
      double s = 0.0;
      for (std::size_t m = n; m <= table_.size(); ++m) s += table_[m - 1];
      return s;
    }
  }
  return 0.0;
}

std::vector<double> RenewalKernel::masses(std::size_t N) const {
  std::vector<double> out(N + 1, 0.0);
  for (std::size_t n = 1; n <= N; ++n) out[n] = mass(n);
  return out;
}

double RenewalKernel::mean() const {
  switch (family_) {
    case KernelFamily::power:
      return *alpha_ > 1.0 ? numerics::zeta(*alpha_) / zeta_ : numerics::kInf;
    case KernelFamily::geometric:
      return 1.0 / p_;
    case KernelFamily::table: {
      double m = 0.0;
      for (std::size_t i = 0; i < table_.size(); ++i) m += static_cast<double>(i + 1) * table_[i];
      return m;
    }
  }
  return numerics::kInf;
}

double RenewalKernel::laplace(double f) const {
  if (f < 0.0) throw InvalidParameter("laplace requires f >= 0");
  switch (family_) {
    case KernelFamily::power:
      return numerics::power_laplace_tail(1.0 + *alpha_, f, 1) / zeta_;
    case KernelFamily::geometric: {
      const double e = std::exp(-f);
      return p_ * e / (1.0 - (1.0 - p_) * e);
    }
    case KernelFamily::table: {
      double s = 0.0;
      for (std::size_t i = 0; i < table_.size(); ++i) s += table_[i] * std::exp(-f * static_cast<double>(i + 1));
      return s;
    }
  }
  return 0.0;
}

double RenewalKernel::laplace_deficit(double f) const {
  if (f < 0.0) throw InvalidParameter("laplace requires f >= 0");
  if (f == 0.0) return 0.0;
  switch (family_) {
    case KernelFamily::power:
      return numerics::power_laplace_deficit_tail(1.0 + *alpha_, f, 1) / zeta_;
    case KernelFamily::geometric:
      return -std::expm1(-f) / (1.0 - (1.0 - p_) * std::exp(-f));
    case KernelFamily::table: {
      double s = 0.0;
      for (std::size_t i = 0; i < table_.size(); ++i) {
        s += table_[i] * -std::expm1(-f * static_cast<double>(i + 1));
      }
      return s;
    }
  }
  return 0.0;
}

double RenewalKernel::laplace_moment(double f) const {
  if (f < 0.0) throw InvalidParameter("laplace requires f >= 0");
  switch (family_) {
    case KernelFamily::power:
      return numerics::power_laplace_tail(*alpha_, f, 1) / zeta_;
    case KernelFamily::geometric: {
      const double e = std::exp(-f);
      const double d = 1.0 - (1.0 - p_) * e;
      return p_ * e / (d * d);
    }
    case KernelFamily::table: {
      double s = 0.0;
      for (std::size_t i = 0; i < table_.size(); ++i) {
        const double n = static_cast<double>(i + 1);
        s += n * table_[i] * std::exp(-f * n);
      }
      return s;
    }
  }
  return 0.0;
}

nlohmann::json to_json(const RenewalKernel& kernel) {
  nlohmann::json j;
  j["family"] = family_name(kernel.family());
  switch (kernel.family()) {
    case KernelFamily::power:
      j["alpha"] = *kernel.alpha();
      break;
    case KernelFamily::geometric:
      j["p"] = kernel.p();
      break;
    case KernelFamily::table:
      j["masses"] = kernel.masses(*kernel.max_support());
      j["masses"].erase(0);
      break;
  }
  if (kernel.n_cap()) j["n_cap"] = *kernel.n_cap();
  return j;
}

RenewalKernel kernel_from_json(const nlohmann::json& j) {
  const auto family = j.at("family").get<std::string>();
  std::optional<std::size_t> n_cap;
  if (j.contains("n_cap") && !j.at("n_cap").is_null()) n_cap = j.at("n_cap").get<std::size_t>();
  if (family == "power") return RenewalKernel::power(j.at("alpha").get<double>(), n_cap);
  if (family == "geometric") return RenewalKernel::geometric(j.at("p").get<double>());
  if (family == "table") return RenewalKernel::table(j.at("masses").get<std::vector<double>>());
  throw InvalidParameter("unknown kernel family '" + family + "'");
}

ReturnProbabilities return_probabilities(const RenewalKernel& kernel, std::size_t N) {
  const std::size_t support = std::min(N, kernel.max_support().value_or(N));
  const std::vector<double> K = kernel.masses(support);
  // acc[n] collects sum_k K(k) u_{n-k} as each u_m becomes final.
  std::vector<double> acc(N + 1, 0.0);
  std::vector<double> u(N + 1, 0.0);
  u[0] = 1.0;
  for (std::size_t m = 0; m <= N; ++m) {
    if (m > 0) u[m] = acc[m];
    const double um = u[m];
    const std::size_t kmax = std::min(support, N - m);
    double* __restrict out = acc.data() + m;
    const double* __restrict k = K.data();
    for (std::size_t j = 1; j <= kmax; ++j) out[j] += um * k[j];
  }
  return {std::move(u)};
}

ChiResult chi(const RenewalKernel& kernel, double tolerance, std::size_t horizon,
              std::size_t max_horizon) {
  if (!(tolerance > 0.0)) throw InvalidParameter("chi: tolerance must be positive");
  if (horizon < 64) throw InvalidParameter("chi: horizon must be at least 64");
  std::size_t N = horizon;
  for (;;) {
    const auto u = return_probabilities(kernel, N).u;
    const ChiEstimate full = chi_estimate(u, N);
    const double fitted_alpha = 1.0 + full.slope;
    const double e = -2.0 * full.slope;
    ChiResult r{ChiStatus::finite, full.value, 0.0, fitted_alpha, e, N};
    if (e > 0.95 && e < 1.05) {
      r.status = ChiStatus::undecided;
      r.value = std::nan("");
      r.truncation_error = numerics::kInf;
      return r;
    }
    if (e <= 0.95) {
      r.status = ChiStatus::infinite;
      r.value = numerics::kInf;
      return r;
    }
    const ChiEstimate half = chi_estimate(u, N / 2);
    r.truncation_error = std::fabs(full.value - half.value);
    if (r.truncation_error <= tolerance) return r;
    if (N * 2 > max_horizon) {
      // Error shrinks roughly like the tail, N^{1 - e}.
      const double factor = std::pow(r.truncation_error / tolerance, 1.0 / (e - 1.0));
      throw PrecisionError("chi: truncation error " + std::to_string(r.truncation_error) +
                               " exceeds tolerance at horizon " + std::to_string(N),
                           static_cast<std::size_t>(std::ceil(static_cast<double>(N) * factor)));
    }
    N *= 2;
  }
}

RenewalKernel truncate_kernel(const RenewalKernel& kernel, std::size_t tr) {
  if (tr < 1) throw InvalidParameter("truncate_kernel: tr must be >= 1");
  std::vector<double> m(tr, 0.0);
  for (std::size_t n = 1; n < tr; ++n) m[n - 1] = kernel.mass(n);
  m[tr - 1] = kernel.tail(tr);
  return RenewalKernel::table(std::move(m), "truncated(" + kernel.l_description() + ", tr=" +
                                                std::to_string(tr) + ")");
}

KernelEntropy kernel_entropy(const RenewalKernel& kernel, std::size_t horizon) {
  switch (kernel.family()) {
    case KernelFamily::geometric: {
      const double p = kernel.p();
      if (p == 1.0) return {0.0, 0.0};
      return {-std::log(p) - (1.0 - p) / p * std::log1p(-p), 0.0};
    }
    case KernelFamily::table: {
      double h = 0.0;
      for (std::size_t n = 1; n <= *kernel.max_support(); ++n) {
        const double k = kernel.mass(n);
        if (k > 0.0) h -= k * std::log(k);
      }
      return {h, 0.0};
    }
    case KernelFamily::power: {
      const double s = 1.0 + *kernel.alpha();
      const double z = numerics::zeta(s);
      const double lz = std::log(z);
      double head = 0.0;
      for (std::size_t n = 1; n <= horizon; ++n) {
        const double lk = kernel.log_mass(n);
        head -= std::exp(lk) * lk;
      }
      // Terms g(n) = n^{-s} (log z + s log n) / z, decreasing for n beyond the horizon.
      const double tail = (lz * numerics::power_tail_sum(s, horizon + 1) +
                           s * numerics::power_log_tail_sum(s, horizon + 1)) /
                          z;
      const auto integral_from = [&](double a) {
        const double sm1 = s - 1.0;
        const double la = std::log(a);
        return (lz * std::pow(a, -sm1) / sm1 +
                s * std::pow(a, -sm1) * (la / sm1 + 1.0 / (sm1 * sm1))) /
               z;
      };
      const double H = static_cast<double>(horizon);
      const double width = integral_from(H) - integral_from(H + 1.0);
      return {head + tail, width};
    }
  }
  return {0.0, 0.0};
}

OverlapKernel overlap_kernel(const RenewalKernel& kernel, std::size_t N) {
  if (N < 1) throw InvalidParameter("overlap_kernel: horizon must be >= 1");
  return overlap_kernel(return_probabilities(kernel, N));
}

OverlapKernel overlap_kernel(const ReturnProbabilities& rp) {
  const std::size_t N = rp.horizon();
  std::vector<double> v(N + 1);
  for (std::size_t n = 0; n <= N; ++n) v[n] = rp.u[n] * rp.u[n];
  std::vector<double> acc(N + 1, 0.0);
  OverlapKernel out;
  out.masses.assign(N + 1, 0.0);
  out.partial_sums.assign(N + 1, 0.0);
  for (std::size_t n = 1; n <= N; ++n) {
    double k2 = v[n] - acc[n];
    if (k2 < 0.0) {
      if (k2 < -1e-10) {
        throw InvariantViolation("overlap_kernel.nonnegative",
                                 "K_2(" + std::to_string(n) + ") = " + std::to_string(k2));
      }
      k2 = 0.0;
    }
    out.masses[n] = k2;
    out.partial_sums[n] = out.partial_sums[n - 1] + k2;
    double* __restrict a = acc.data() + n;
    const double* __restrict vv = v.data();
    for (std::size_t j = 1; j <= N - n; ++j) a[j] += k2 * vv[j];
  }
  return out;
}

}  // namespace pinlab
