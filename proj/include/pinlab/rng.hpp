#pragma once

// Counter-based random streams (Philox4x32-10). A stream is fully described by
// (seed, stream_index, position), so replicas can be derived, checkpointed and
// replayed independently of thread scheduling.

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

#include <json.hpp>

namespace pinlab {

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

// One Philox4x32-10 block: 10 rounds over a 128-bit counter under a 64-bit key.
PhiloxBlock philox4x32_10(PhiloxBlock counter, PhiloxKey key);

class RngStream {
 public:
  using result_type = std::uint32_t;
  static constexpr std::string_view kAlgorithmId = "philox4x32-10";

  RngStream(std::uint64_t seed, std::uint64_t stream_index, std::uint64_t position = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  // Uniform on the open interval (0, 1) with 53 random bits.
  double uniform01();
  // Standard normal via the polar method; the spare variate is discarded.
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_index() const { return stream_index_; }
  // Number of 32-bit words consumed so far.
  std::uint64_t position() const { return position_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_index_;
  std::uint64_t position_;
  std::uint64_t cached_block_ = std::numeric_limits<std::uint64_t>::max();
  PhiloxBlock buffer_{};
};

// Stream for replica `replica_index` under `base_seed`. The map is injective and
// fixed: key = base_seed, counter high word = replica_index.
RngStream derive_stream(std::uint64_t base_seed, std::uint64_t replica_index);

nlohmann::json to_json(const RngStream& stream);
RngStream rng_stream_from_json(const nlohmann::json& j);

}  // namespace pinlab
