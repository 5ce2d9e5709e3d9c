#include <doctest.h>

#include <boost/math/special_functions/zeta.hpp>
#include <cmath>
#include <vector>

#include "pinlab/errors.hpp"
#include "pinlab/renewal_kernels.hpp"

using namespace pinlab;

namespace {

// P(n is a renewal time), summing over every set of intermediate renewals.
double brute_u(const RenewalKernel& k, std::size_t n) {
  if (n == 0) return 1.0;
  double total = 0.0;
  for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask) {
    double p = 1.0;
    std::size_t last = 0;
    for (std::size_t t = 1; t <= n; ++t) {
      if (t < n && !(mask & (1u << (t - 1)))) continue;
      p *= k.mass(t - last);
      last = t;
    }
    total += p;
  }
  return total;
}

// P(first common renewal after 0 is at n) for two independent chains.
double brute_k2(const RenewalKernel& k, std::size_t n) {
  std::vector<std::pair<unsigned, double>> sets;
  for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask) {
    double p = 1.0;
    std::size_t last = 0;
    for (std::size_t t = 1; t <= n; ++t) {
      if (t < n && !(mask & (1u << (t - 1)))) continue;
      p *= k.mass(t - last);
      last = t;
    }
    sets.emplace_back(mask, p);
  }
  double total = 0.0;
  for (const auto& [a, pa] : sets)
    for (const auto& [b, pb] : sets)
      if ((a & b) == 0) total += pa * pb;
  return total;
}

}  // namespace

TEST_CASE("power kernel masses and normalization") {
  const RenewalKernel k = RenewalKernel::power(0.5);
  CHECK(k.mass(1) == doctest::Approx(1.0 / boost::math::zeta(1.5)).epsilon(1e-14));
  CHECK(k.mass(10) == doctest::Approx(std::pow(10.0, -1.5) / boost::math::zeta(1.5)).epsilon(1e-14));
  CHECK(k.tail(1) == doctest::Approx(1.0).epsilon(1e-14));
  double head = 0.0;
  for (std::size_t n = 1; n < 50; ++n) head += k.mass(n);
  CHECK(k.tail(50) == doctest::Approx(1.0 - head).epsilon(1e-11));
  CHECK(k.laplace(0.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(k.mean() == std::numeric_limits<double>::infinity());
  CHECK(RenewalKernel::power(1.5).mean() ==
        doctest::Approx(boost::math::zeta(1.5) / boost::math::zeta(2.5)).epsilon(1e-12));
}

TEST_CASE("kernel laplace transforms agree with direct sums") {
  const RenewalKernel k = RenewalKernel::power(0.3);
  for (double f : {0.05, 0.3, 2.0}) {
    double lap = 0.0, mom = 0.0;
    for (std::size_t n = 1; n < 200000; ++n) {
      const double w = k.mass(n) * std::exp(-f * static_cast<double>(n));
      lap += w;
      mom += static_cast<double>(n) * w;
    }
    CHECK(k.laplace(f) == doctest::Approx(lap).epsilon(1e-12));
    CHECK(k.laplace_moment(f) == doctest::Approx(mom).epsilon(1e-11));
    CHECK(k.laplace_deficit(f) == doctest::Approx(1.0 - lap).epsilon(1e-11));
  }
}

TEST_CASE("table kernel invariants") {
  CHECK_NOTHROW(RenewalKernel::table({0.5, 0.25, 0.25}));
  try {
    RenewalKernel::table({0.5, 0.26, 0.25});
    FAIL("expected InvariantViolation");
  } catch (const InvariantViolation& e) {
    CHECK(e.invariant() == "kernel.normalization");
  }
  try {
    RenewalKernel::table({1.2, -0.2});
    FAIL("expected InvariantViolation");
  } catch (const InvariantViolation& e) {
    CHECK(e.invariant() == "kernel.nonnegative");
  }
  try {
    RenewalKernel::table({0.0, 0.5, 0.0, 0.5});
    FAIL("expected InvariantViolation");
  } catch (const InvariantViolation& e) {
    CHECK(e.invariant() == "kernel.aperiodic");
  }
  CHECK_THROWS_AS(RenewalKernel::power(-1.0), InvalidParameter);
  CHECK_THROWS_AS(RenewalKernel::geometric(0.0), InvalidParameter);
}

TEST_CASE("kernel json round trip") {
  for (const RenewalKernel& k : {RenewalKernel::power(0.7), RenewalKernel::geometric(0.3),
                                 RenewalKernel::table({0.2, 0.3, 0.5})}) {
    const RenewalKernel back = kernel_from_json(to_json(k));
    for (std::size_t n = 1; n <= 5; ++n) CHECK(back.mass(n) == k.mass(n));
  }
}

TEST_CASE("return probabilities match renewal enumeration") {
  for (const RenewalKernel& k : {RenewalKernel::power(0.4), RenewalKernel::geometric(0.35),
                                 RenewalKernel::table({0.1, 0.0, 0.6, 0.3})}) {
    const auto u = return_probabilities(k, 14).u;
    for (std::size_t n = 0; n <= 14; ++n) CHECK(u[n] == doctest::Approx(brute_u(k, n)).epsilon(1e-13));
  }
  const auto g = return_probabilities(RenewalKernel::geometric(0.35), 50).u;
  for (std::size_t n = 1; n <= 50; ++n) CHECK(g[n] == doctest::Approx(0.35).epsilon(1e-13));
}

TEST_CASE("chi convergence decisions") {
  CHECK(chi(RenewalKernel::geometric(0.5), 1e-6).status == ChiStatus::infinite);
  CHECK(chi(RenewalKernel::power(0.8), 1e-6).status == ChiStatus::infinite);
  CHECK(chi(RenewalKernel::power(0.5), 1e-6, 4096, 8192).status == ChiStatus::undecided);
}

TEST_CASE("chi for alpha = 0.3 against a head sum with the renewal-theorem tail") {
  const double alpha = 0.3;
  const RenewalKernel k = RenewalKernel::power(alpha);
  const ChiResult c = chi(k, 1e-5);
  REQUIRE(c.status == ChiStatus::finite);
  CHECK(c.truncation_error <= 1e-5);

  const std::size_t N = 20000;
  std::vector<double> K(N + 1), u(N + 1, 0.0);
  for (std::size_t n = 1; n <= N; ++n) K[n] = std::pow(static_cast<double>(n), -1.0 - alpha) / boost::math::zeta(1.0 + alpha);
  u[0] = 1.0;
  double head = 0.0;
  for (std::size_t n = 1; n <= N; ++n) {
    double s = 0.0;
    for (std::size_t j = 1; j <= n; ++j) s += K[j] * u[n - j];
    u[n] = s;
    head += s * s;
  }
  const double C = boost::math::zeta(1.0 + alpha) * alpha * std::sin(alpha * M_PI) / M_PI;
  const double tail = C * C * std::pow(static_cast<double>(N) + 0.5, 2.0 * alpha - 1.0) / (1.0 - 2.0 * alpha);
  CHECK(c.value == doctest::Approx(head + tail).epsilon(2e-3));
  CHECK(c.fitted_alpha == doctest::Approx(alpha).epsilon(0.1));
}

TEST_CASE("truncated kernel collapses the tail onto tr") {
  const RenewalKernel k = RenewalKernel::power(0.5);
  const RenewalKernel t = truncate_kernel(k, 5);
  for (std::size_t n = 1; n < 5; ++n) CHECK(t.mass(n) == doctest::Approx(k.mass(n)).epsilon(1e-15));
  CHECK(t.mass(5) == doctest::Approx(k.tail(5)).epsilon(1e-13));
  CHECK(t.mass(6) == 0.0);
  CHECK(t.max_support().value() == 5);
  CHECK(t.tail(1) == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("kernel entropy") {
  const double p = 0.3;
  double direct = 0.0;
  for (std::size_t n = 1; n < 2000; ++n) {
    const double k = p * std::pow(1.0 - p, static_cast<double>(n - 1));
    direct -= k * std::log(k);
  }
  CHECK(kernel_entropy(RenewalKernel::geometric(p)).value == doctest::Approx(direct).epsilon(1e-12));

  // log zeta(s) - s zeta'(s) / zeta(s), evaluated with mpmath at 30 digits.
  CHECK(kernel_entropy(RenewalKernel::power(0.3)).value ==
        doctest::Approx(5.01965801954513336).epsilon(1e-10));
  const KernelEntropy e = kernel_entropy(RenewalKernel::power(0.8));
  CHECK(e.value == doctest::Approx(2.06492661448779557).epsilon(1e-10));
  CHECK(e.tail_bound < 1e-5);
}

TEST_CASE("overlap kernel matches pair enumeration") {
  for (const RenewalKernel& k : {RenewalKernel::power(0.3), truncate_kernel(RenewalKernel::power(0.3), 3),
                                 RenewalKernel::geometric(0.6)}) {
    const OverlapKernel ov = overlap_kernel(k, 10);
    double partial = 0.0;
    for (std::size_t n = 1; n <= 10; ++n) {
      CHECK(ov.masses[n] == doctest::Approx(brute_k2(k, n)).epsilon(1e-12));
      partial += ov.masses[n];
      CHECK(ov.partial_sums[n] == doctest::Approx(partial).epsilon(1e-14));
    }
  }
}

TEST_CASE("overlap mass relates to chi") {
  const RenewalKernel k = RenewalKernel::power(0.3);
  const ChiResult c = chi(k, 1e-5);
  const OverlapKernel ov = overlap_kernel(k, 1u << 16);
  const double total = c.value / (c.value + 1.0);
  CHECK(ov.total() < total);
  CHECK(ov.total() > total - 0.01);
}
