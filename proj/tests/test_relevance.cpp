#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "pinlab/homopolymer.hpp"
#include "pinlab/relevance.hpp"

using namespace pinlab;

namespace {
ChiResult finite_chi(double v) { return {ChiStatus::finite, v, 0.0, 0.3, 1.4, 1024}; }
}  // namespace

TEST_CASE("beta_c_star") {
  const DisorderLaw g = DisorderLaw::gaussian();
  const DisorderLaw r = DisorderLaw::rademacher();
  const CriticalBound b = beta_c_star(finite_chi(0.7), g);
  CHECK(b.kind == BoundKind::finite);
  CHECK(b.value == doctest::Approx(std::sqrt(std::log(1.0 + 1.0 / 0.7))).epsilon(1e-12));
  CHECK(b.residual < 1e-10);
  CHECK(beta_c_star(finite_chi(0.5), r).kind == BoundKind::infinite);
  const CriticalBound two = beta_c_star(finite_chi(2.0), r);
  CHECK(two.kind == BoundKind::finite);
  // cosh(2b) / cosh(b)^2 = 3/2  <=>  cosh(b)^2 = 2
  CHECK(two.value == doctest::Approx(std::acosh(std::sqrt(2.0))).epsilon(1e-12));
  const CriticalBound inf = beta_c_star(finite_chi(1.0), r);
  CHECK(inf.kind == BoundKind::infinite);
  CHECK(std::abs(inf.lhs_at_50 - inf.limit_value) < 1e-6);
  ChiResult infinite{ChiStatus::infinite, std::numeric_limits<double>::infinity(), 0, 0.8, 0.4, 1024};
  CHECK(beta_c_star(infinite, g).kind == BoundKind::degenerate_zero);
}

TEST_CASE("beta_c_star_star") {
  const CriticalBound g = beta_c_star_star(1.7, DisorderLaw::gaussian());
  CHECK(g.value == doctest::Approx(std::sqrt(3.4)).epsilon(1e-12));
  const CriticalBound r = beta_c_star_star(std::log(2.0) + 0.01, DisorderLaw::rademacher());
  CHECK(r.kind == BoundKind::infinite);
  CHECK(std::abs(r.lhs_at_50 - r.limit_value) < 1e-6);
  const DisorderLaw c = DisorderLaw::continuous({0.0, 1.0, 3.0}, {1.0, 2.0, 0.0});
  CHECK(c.atom_at_w() == 0.0);
  CHECK(beta_c_star_star(5.0, c).kind == BoundKind::finite);
  CHECK(beta_c_star_star(0.4, DisorderLaw::rademacher()).kind == BoundKind::finite);
}

TEST_CASE("replica moment") {
  const RenewalKernel k = truncate_kernel(RenewalKernel::power(0.3), 3);
  const DisorderLaw r = DisorderLaw::rademacher();
  for (std::size_t n : {1u, 5u, 40u}) CHECK(replica_moment(k, r, 0.0, n) == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(replica_moment(k, r, 0.8, 1) == doctest::Approx(xi(r, 0.8)).epsilon(1e-14));
  const ReplicaCheck c = replica_identity_check(k, r, 0.8, 4);
  CHECK(c.max_relative_error <= 1e-12);
  for (std::size_t tr = 1; tr <= 4; ++tr) {
    for (std::size_t n = 1; n <= 6; ++n) {
      const RenewalKernel kt = truncate_kernel(RenewalKernel::power(0.6), tr);
      CHECK(replica_identity_check(kt, r, 1.3, n).max_relative_error <= 1e-12);
    }
  }
  CHECK(replica_identity_check(k, DisorderLaw::discrete({-1, 0, 2}, {0.3, 0.5, 0.2}), 0.6, 5)
            .max_relative_error <= 1e-12);
}

TEST_CASE("replica moment growth matches the truncated joint free energy") {
  const RenewalKernel k = RenewalKernel::power(0.3);
  const std::size_t tr = 4;
  const RenewalKernel kt = truncate_kernel(k, tr);
  const DisorderLaw g = DisorderLaw::gaussian();
  const double beta = 0.6;
  const double a = replica_moment_log(kt, g, beta, 4000);
  const double b = replica_moment_log(kt, g, beta, 8000);
  const double f2 = joint_free_energy(k, std::log(xi(g, beta)), tr).f2;
  CHECK((b - a) / 4000.0 == doctest::Approx(f2).epsilon(1e-6));
}

TEST_CASE("word letters follow the size-biased law") {
  const RenewalKernel kt = truncate_kernel(RenewalKernel::power(0.3), 1);
  RngStream s = derive_stream(3, 0);
  // With tr = 1 every letter starts a word, so all letters come from mu_beta.
  const auto x = sample_word_letters(kt, DisorderLaw::gaussian(), 2.0, s, 200000);
  double m = 0.0;
  for (double v : x) m += v;
  CHECK(std::abs(m / x.size() - 2.0) < 4.0 / std::sqrt(double(x.size())));
}

TEST_CASE("entropy estimator") {
  const RenewalKernel k = RenewalKernel::power(0.3);
  const DisorderLaw g = DisorderLaw::gaussian();
  const RelevanceReport zero = entropy_estimator(k, g, 0.0, 8, 2048, 8, 1);
  CHECK(zero.entropy_estimate == 0.0);
  CHECK(zero.stderr_ == 0.0);
  CHECK(zero.upper_bound == 0.0);
  const RelevanceReport r = entropy_estimator(k, g, 1.0, 8, 2048, 16, 1);
  CHECK(r.sandwich_ok);
  CHECK(r.entropy_estimate > -3 * r.stderr_);
  CHECK(r.m_tr == doctest::Approx(truncate_kernel(k, 8).mean()));
  const RelevanceReport again = entropy_estimator(k, g, 1.0, 8, 2048, 16, 1, 2);
  CHECK(again.per_replica == r.per_replica);
}

TEST_CASE("monotonicity scan with shared seeds") {
  const std::vector<double> grid{0.0, 0.5, 1.0, 1.0};
  const MonotonicityScan s = entropy_monotonicity_scan(RenewalKernel::power(0.3),
                                                       DisorderLaw::rademacher(), grid, 8, 2048, 16, 5);
  CHECK(s.monotone);
  CHECK(s.reports[0].entropy_estimate == 0.0);
  CHECK(s.reports[2].entropy_estimate == s.reports[3].entropy_estimate);
}

TEST_CASE("relevance verdict") {
  auto report = [](double m, double est, double se, double upper) {
    RelevanceReport r{};
    r.m_tr = m;
    r.entropy_estimate = est;
    r.stderr_ = se;
    r.upper_bound = upper;
    r.limit_lower_bound = -1.0;
    r.excludes_zero = m * (est - 3 * se) > 0;
    return r;
  };
  // stable positive m_tr * H
  std::vector<RelevanceReport> v{report(2, 0.5, 0.01, 1.0), report(4, 0.25, 0.005, 0.6),
                                 report(8, 0.125, 0.003, 0.4)};
  CHECK(relevance_verdict(v) == RelevanceVerdict::relevant);
  // m_tr * H falling towards 0 under a shrinking upper bound
  v = {report(2, 0.1, 0.001, 0.2), report(4, 0.02, 0.001, 0.05), report(8, 0.004, 0.0005, 0.01)};
  CHECK(relevance_verdict(v) == RelevanceVerdict::irrelevant_consistent);
  // falling estimate but growing upper bound
  v[2].upper_bound = 0.5;
  CHECK(relevance_verdict(v) == RelevanceVerdict::undecided);
  CHECK(relevance_verdict({}) == RelevanceVerdict::undecided);
  v[2].limit_lower_bound = 0.1;
  CHECK(relevance_verdict(v) == RelevanceVerdict::relevant);
}

TEST_CASE("annealed variational check") {
  std::vector<double> grid;
  for (int i = 0; i <= 300; ++i) grid.push_back(0.01 * i);
  const VariationalResult g = annealed_variational_check(DisorderLaw::gaussian(), 1.0, grid);
  CHECK(g.argmax == doctest::Approx(1.0));
  CHECK(g.max_value == doctest::Approx(0.5).epsilon(1e-12));
  // beta * l - l^2 / 2 at l = 0.5
  CHECK(1.0 * DisorderLaw::gaussian().tilted_mean(0.5) -
            relative_entropy_tilt(DisorderLaw::gaussian(), 0.5) ==
        doctest::Approx(0.375));
  const VariationalResult z = annealed_variational_check(DisorderLaw::rademacher(), 0.0, grid);
  CHECK(z.argmax == 0.0);
  CHECK(z.max_value == 0.0);
  CHECK_THROWS(annealed_variational_check(DisorderLaw::gaussian(), 5.0, grid));
}
