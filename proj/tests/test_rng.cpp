#include <doctest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <vector>

#include "pinlab/rng.hpp"

using namespace pinlab;

TEST_CASE("philox known-answer vectors") {
  // Random123 reference values for Philox4x32-10.
  const PhiloxBlock zero = philox4x32_10({0, 0, 0, 0}, {0, 0});
  CHECK(zero == PhiloxBlock{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  const PhiloxBlock ones = philox4x32_10({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                         {0xffffffffu, 0xffffffffu});
  CHECK(ones == PhiloxBlock{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  const PhiloxBlock pi = philox4x32_10({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u},
                                       {0xa4093822u, 0x299f31d0u});
  CHECK(pi == PhiloxBlock{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("same inputs give the same stream, distinct indices differ") {
  RngStream a = derive_stream(42, 0), b = derive_stream(42, 0), c = derive_stream(42, 1);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a(), y = b(), z = c();
    CHECK(x == y);
    differs = differs || x != z;
  }
  CHECK(differs);
}

TEST_CASE("stream resumes from a serialized position") {
  RngStream a(7, 3);
  for (int i = 0; i < 13; ++i) a();
  RngStream b = rng_stream_from_json(to_json(a));
  CHECK(b.position() == 13);
  for (int i = 0; i < 20; ++i) CHECK(a() == b());
  CHECK(to_json(a)["algorithm_id"] == "philox4x32-10");
}

TEST_CASE("first outputs of 1000 streams pass a uniformity chi-square at 1%") {
  const int bins = 20;
  std::vector<int> counts(bins, 0);
  for (std::uint64_t s = 0; s < 1000; ++s) {
    RngStream r = derive_stream(2024, s);
    counts[static_cast<int>(r.uniform01() * bins)]++;
  }
  double stat = 0.0;
  const double expected = 1000.0 / bins;
  for (int c : counts) stat += (c - expected) * (c - expected) / expected;
  const boost::math::chi_squared dist(bins - 1);
  CHECK(stat < boost::math::quantile(dist, 0.99));
}

TEST_CASE("uniform01 lies in the open unit interval and normals have unit variance") {
  RngStream r(1, 0);
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform01();
    CHECK_UNARY(u > 0.0);
    CHECK_UNARY(u < 1.0);
    const double z = r.normal();
    sum += z;
    sq += z * z;
  }
  CHECK(std::abs(sum / n) < 4.0 / std::sqrt(n));
  CHECK(sq / n == doctest::Approx(1.0).epsilon(0.02));
}
