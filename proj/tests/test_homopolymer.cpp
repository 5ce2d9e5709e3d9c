#include <doctest.h>

#include <cmath>
#include <vector>

#include "pinlab/errors.hpp"
#include "pinlab/homopolymer.hpp"
#include "pinlab/numerics.hpp"

using namespace pinlab;

TEST_CASE("homopolymer basics") {
  const RenewalKernel geo = RenewalKernel::geometric(0.5);
  const HomopolymerResult z = homopolymer_free_energy(geo, 0.0);
  CHECK(z.f == 0.0);
  CHECK(z.status == PhaseStatus::unpinned);
  CHECK(homopolymer_free_energy(geo, -1.0).f == 0.0);
  // e^{-f} = 2 e^{-lambda} / (1 + e^{-lambda})
  const HomopolymerResult r = homopolymer_free_energy(geo, std::log(3.0));
  CHECK(r.f == doctest::Approx(std::log(2.0)).epsilon(1e-13));
  CHECK(r.status == PhaseStatus::pinned);
  CHECK(r.residual <= 1e-12);
  CHECK_THROWS_AS(homopolymer_free_energy(geo, 1.0, 0.0), InvalidParameter);
}

TEST_CASE("free energy is nondecreasing and convex in lambda") {
  for (const RenewalKernel& k : {RenewalKernel::power(0.3), RenewalKernel::power(1.5),
                                 RenewalKernel::table({0.2, 0.5, 0.3})}) {
    std::vector<double> f;
    for (int i = 0; i <= 60; ++i) f.push_back(homopolymer_free_energy(k, -0.5 + 0.05 * i).f);
    for (std::size_t i = 1; i < f.size(); ++i) CHECK(f[i] >= f[i - 1]);
    for (std::size_t i = 1; i + 1 < f.size(); ++i) CHECK(f[i + 1] - 2 * f[i] + f[i - 1] >= -1e-10);
  }
}

TEST_CASE("small-lambda slope") {
  const RenewalKernel k = RenewalKernel::power(0.5);
  std::vector<double> x, y;
  for (int i = 0; i <= 10; ++i) {
    const double l = std::pow(10.0, -3.0 + 0.1 * i);
    x.push_back(std::log(l));
    y.push_back(std::log(homopolymer_free_energy(k, l).f));
  }
  CHECK(numerics::fit_slope(x, y) == doctest::Approx(2.0).epsilon(0.1));
}

TEST_CASE("annealed free energy") {
  const RenewalKernel k = RenewalKernel::power(0.6);
  const DisorderLaw g = DisorderLaw::gaussian();
  CHECK(annealed_free_energy(k, g, 1.3, g.log_mgf(1.3)).f == 0.0);
  CHECK(annealed_free_energy(k, g, 0.0, -0.4).f == homopolymer_free_energy(k, 0.4).f);
  CHECK(annealed_free_energy(k, g, 1.0, 0.0).f ==
        doctest::Approx(homopolymer_free_energy(k, 0.5).f).epsilon(1e-14));
}

TEST_CASE("annealed critical curve") {
  const RenewalKernel k = RenewalKernel::power(0.5);
  const std::vector<double> betas{0.0, 1.0};
  const auto g = annealed_critical_curve(k, DisorderLaw::gaussian(), betas);
  CHECK(g[0].h_c_ann == 0.0);
  CHECK(g[1].h_c_ann == doctest::Approx(0.5).epsilon(1e-15));
  const auto r = annealed_critical_curve(k, DisorderLaw::rademacher(), betas);
  CHECK(r[1].h_c_ann == doctest::Approx(0.433781).epsilon(1e-6));
  for (const auto& p : r) CHECK(std::abs(p.bisection_h - p.h_c_ann) <= 1e-8);
  CHECK_THROWS_AS(annealed_critical_curve(k, DisorderLaw::gaussian(), std::vector<double>{}),
                  InvalidParameter);
}

TEST_CASE("lambda0") {
  ChiResult c{ChiStatus::infinite, numerics::kInf, 0.0, 0.9, 0.2, 1024};
  CHECK(lambda0(c).value == 0.0);
  c = {ChiStatus::finite, 1.0, 0.0, 0.3, 1.4, 1024};
  CHECK(lambda0(c).value == doctest::Approx(std::log(2.0)));
  c.status = ChiStatus::undecided;
  CHECK(lambda0(c).status == ChiStatus::undecided);
  CHECK(std::isnan(lambda0(c).value));
}

TEST_CASE("joint free energies for alpha = 0.3") {
  const RenewalKernel k = RenewalKernel::power(0.3);
  const ChiResult c = chi(k, 1e-6);
  const double l0 = lambda0(c).value;
  JointOptions opt;
  opt.chi = c;
  const JointFreeEnergy below = joint_free_energy(k, l0 / 2, std::nullopt, opt);
  CHECK(below.f2 == 0.0);
  CHECK(below.status == PhaseStatus::unpinned);
  for (std::size_t tr : {2u, 10u, 50u}) {
    CHECK(joint_free_energy(k, 0.05, tr).f2 > 0.0);
  }
  // Longer excursions only reduce pinning.
  double prev = numerics::kInf;
  for (std::size_t tr : {5u, 10u, 20u, 40u, 80u}) {
    const double f = joint_free_energy(k, l0 / 2, tr).f2;
    CHECK(f <= prev * (1.0 + 1e-9));
    prev = f;
  }
  // Convergence to the untruncated value above lambda0.
  const double lam = 1.5 * l0;
  const double f2 = joint_free_energy(k, lam, std::nullopt, opt).f2;
  CHECK(f2 > 0.0);
  CHECK(joint_free_energy(k, lam, 1000).f2 == doctest::Approx(f2).epsilon(0.01));
}

TEST_CASE("truncated joint renewal is recurrent") {
  const OverlapKernel ov = overlap_kernel(truncate_kernel(RenewalKernel::power(0.3), 6), 4000);
  CHECK(ov.total() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("joint free energy reports an insufficient horizon") {
  const RenewalKernel k = RenewalKernel::power(0.3);
  JointOptions opt;
  opt.initial_horizon = 64;
  opt.max_horizon = 64;
  try {
    joint_free_energy(k, 0.01, 200, opt);
    FAIL("expected PrecisionError");
  } catch (const PrecisionError& e) {
    CHECK(e.required_horizon() > 64);
  }
}

TEST_CASE("lemma bound") {
  const RenewalKernel k = RenewalKernel::power(0.3);
  const ChiResult c = chi(k, 1e-6);
  const double l0 = lambda0(c).value;
  const OverlapKernel ov = overlap_kernel(k, 100);
  for (std::size_t tr : {10u, 50u, 100u}) {
    const double bound = lemma_a1_bound(ov, l0, tr, l0 / 2);
    CHECK(bound > 0.0);
    CHECK(static_cast<double>(tr) * joint_free_energy(k, l0 / 2, tr).f2 <= bound);
    CHECK(bound < lemma_a1_limit(l0, l0 / 2));
  }
  CHECK(lemma_a1_bound(ov, l0, 20, 1e-6) > 0.0);
  CHECK_THROWS_AS(lemma_a1_bound(ov, l0, 10, l0), DomainError);
  CHECK_THROWS_AS(lemma_a1_limit(l0, 2 * l0), DomainError);
}
