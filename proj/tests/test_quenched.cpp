#include <doctest.h>

#include <cmath>
#include <functional>
#include <vector>

#include "pinlab/homopolymer.hpp"
#include "pinlab/quenched.hpp"
#include "pinlab/rng.hpp"

using namespace pinlab;

namespace {

// Z_n by recursion over the first renewal after each renewal point, in the
// probability domain (small n only).
double brute_z(const RenewalKernel& k, const std::vector<double>& w, double beta, double h,
               std::size_t n) {
  std::function<double(std::size_t)> from = [&](std::size_t j) -> double {
    if (j == n) return 1.0;
    double s = 0.0;
    for (std::size_t m = j + 1; m <= n; ++m) s += k.mass(m - j) * from(m);
    return std::exp(beta * w[j] - h) * s;
  };
  return from(0);
}

// E_K[prod_{k<n} exp((beta w_k - h) 1{k renewal})] with no constraint at n.
double brute_free(const RenewalKernel& k, const std::vector<double>& w, double beta, double h,
                  std::size_t n) {
  std::function<double(std::size_t)> from = [&](std::size_t j) -> double {
    double s = k.tail(n - j);
    for (std::size_t m = j + 1; m < n; ++m) s += k.mass(m - j) * from(m);
    return std::exp(beta * w[j] - h) * s;
  };
  return from(0);
}

PolymerParams params(double beta, double h, std::size_t n, std::size_t replicas) {
  return {RenewalKernel::power(0.5), DisorderLaw::gaussian(), beta, h, n, replicas, 1234};
}

}  // namespace

TEST_CASE("small partition functions") {
  const RenewalKernel k = RenewalKernel::power(0.5);
  const std::vector<double> w{0.3, -1.1, 0.4};
  const double b = 0.9, h = 0.2;
  PolymerParams p{k, DisorderLaw::gaussian(), b, h, 1, 1, 0};
  CHECK(partition_function_log(p, w) == doctest::Approx(b * w[0] - h + k.log_mass(1)).epsilon(1e-15));
  p.n = 2;
  const double z2 = k.mass(2) * std::exp(b * w[0] - h) +
                    k.mass(1) * k.mass(1) * std::exp(b * w[0] - h) * std::exp(b * w[1] - h);
  CHECK(partition_function_log(p, w) == doctest::Approx(std::log(z2)).epsilon(1e-14));
}

TEST_CASE("dynamic program matches enumeration") {
  RngStream s = derive_stream(99, 0);
  for (const RenewalKernel& k : {RenewalKernel::power(0.3), RenewalKernel::geometric(0.4),
                                 RenewalKernel::table({0.3, 0.0, 0.7})}) {
    for (int inst = 0; inst < 5; ++inst) {
      const double beta = 2 * s.uniform01(), h = 2 * s.uniform01() - 1;
      std::vector<double> w(12);
      for (double& x : w) x = s.normal();
      const auto logz = pinned_log_partitions(k, w, beta, h, 12);
      for (std::size_t n = 1; n <= 12; ++n) {
        const double bz = std::log(brute_z(k, w, beta, h, n));
        CHECK(logz[n] == doctest::Approx(bz).epsilon(1e-12));
        CHECK(enumerate_partition_log(k, w, beta, h, n) == doctest::Approx(bz).epsilon(1e-12));
        CHECK(free_endpoint_partition_log(k, w, beta, h, n) ==
              doctest::Approx(std::log(brute_free(k, w, beta, h, n))).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("log domain survives huge partition functions") {
  const std::vector<double> w(4096, 3.0);
  const double lz = pinned_log_partitions(RenewalKernel::power(0.5), w, 10.0, 0.0, 4096)[4096];
  CHECK(std::isfinite(lz));
  CHECK(lz > 4096 * 29.0);
}

TEST_CASE("beta = 0 gives the homopolymer exactly") {
  const FreeEnergyEstimate e = quenched_free_energy(params(0.0, -0.3, 200, 5));
  CHECK(e.stderr_ == 0.0);
  CHECK(e.mean == homopolymer_partition_log(RenewalKernel::power(0.5), 0.3, 200) / 200.0);
}

TEST_CASE("estimates are deterministic and independent of threads") {
  const PolymerParams p = params(1.0, 0.3, 300, 8);
  const FreeEnergyEstimate a = quenched_free_energy(p, 1);
  const FreeEnergyEstimate b = quenched_free_energy(p, 1);
  const FreeEnergyEstimate c = quenched_free_energy(p, 3);
  CHECK(a.mean == b.mean);
  CHECK(a.per_replica == c.per_replica);
  CHECK(a.seeds_digest == c.seeds_digest);
  CHECK(a.stderr_ > 0.0);
  CHECK(a.lower_bound_ok);
}

TEST_CASE("estimate is nonincreasing in h") {
  double prev = 1e300;
  for (double h : {-0.5, 0.0, 0.2, 0.5, 1.0}) {
    const double m = quenched_free_energy(params(0.8, h, 200, 6)).mean;
    CHECK(m <= prev);
    prev = m;
  }
}

TEST_CASE("annealed identity by enumeration") {
  const RenewalKernel k = RenewalKernel::power(0.5);
  const DisorderLaw r = DisorderLaw::rademacher();
  const AnnealedCheck one = annealed_partition_check(k, r, 0.7, 0.2, 1);
  CHECK(one.disorder_average ==
        doctest::Approx(k.mass(1) * std::exp(r.log_mgf(0.7) - 0.2)).epsilon(1e-14));
  for (std::size_t n = 1; n <= 10; ++n) CHECK(annealed_partition_check(k, r, 0.7, 0.2, n).pass);
  CHECK(annealed_partition_check(k, r, 0.0, 0.1, 6).pass);
  CHECK_THROWS(annealed_partition_check(k, DisorderLaw::gaussian(), 0.7, 0.2, 3));
}

TEST_CASE("sample mean of Z_n agrees with its expectation") {
  const RenewalKernel k = RenewalKernel::power(0.5);
  const DisorderLaw g = DisorderLaw::gaussian();
  const double beta = 0.4, h = 0.1;
  const std::size_t n = 32, R = 400;
  std::vector<double> z(R);
  for (std::size_t r = 0; r < R; ++r) {
    RngStream s = derive_stream(77, r);
    const auto w = sample(g, s, n);
    z[r] = std::exp(pinned_log_partitions(k, w, beta, h, n)[n]);
  }
  double m = 0.0, v = 0.0;
  for (double x : z) m += x;
  m /= R;
  for (double x : z) v += (x - m) * (x - m);
  const double se = std::sqrt(v / (R - 1) / R);
  const double expected = std::exp(homopolymer_partition_log(k, g.log_mgf(beta) - h, n));
  CHECK(std::abs(m - expected) <= 4 * se);
}

TEST_CASE("quenched critical point at beta = 0") {
  QuenchedSearchConfig c;
  c.n = 2048;
  c.replicas = 1;
  c.doubled_n_diagnostic = true;
  const QuenchedBracket b =
      quenched_critical_point(RenewalKernel::power(1.5), DisorderLaw::gaussian(), 0.0, c);
  CHECK_FALSE(b.undecided);
  CHECK(b.h_lo <= 0.0);
  CHECK(b.h_hi >= 0.0);
  CHECK(b.diagnostics.size() == 4);
}
