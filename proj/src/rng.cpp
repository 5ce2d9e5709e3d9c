#include "pinlab/rng.hpp"

#include <cmath>
#include <string>

#include "pinlab/errors.hpp"

namespace pinlab {
namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

PhiloxBlock philox4x32_10(PhiloxBlock ctr, PhiloxKey key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, ctr[0], hi0, lo0);
    mulhilo(kM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream_index, std::uint64_t position)
    : seed_(seed), stream_index_(stream_index), position_(position) {}

void RngStream::refill() {
  const std::uint64_t block = position_ / 4;
  const PhiloxBlock ctr = {static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
                           static_cast<std::uint32_t>(stream_index_),
                           static_cast<std::uint32_t>(stream_index_ >> 32)};
  const PhiloxKey key = {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)};
  buffer_ = philox4x32_10(ctr, key);
  cached_block_ = block;
}

RngStream::result_type RngStream::operator()() {
  if (position_ / 4 != cached_block_) refill();
  const auto word = buffer_[position_ % 4];
  ++position_;
  return word;
}

double RngStream::uniform01() {
  const std::uint64_t a = (*this)() >> 5;
  const std::uint64_t b = (*this)() >> 6;
  return (static_cast<double>(a * 67108864ull + b) + 0.5) / 9007199254740992.0;
}

double RngStream::normal() {
  for (;;) {
    const double v1 = 2.0 * uniform01() - 1.0;
    const double v2 = 2.0 * uniform01() - 1.0;
    const double s = v1 * v1 + v2 * v2;
    if (s > 0.0 && s < 1.0) return v1 * std::sqrt(-2.0 * std::log(s) / s);
  }
}

RngStream derive_stream(std::uint64_t base_seed, std::uint64_t replica_index) {
  return RngStream(base_seed, replica_index, 0);
}

nlohmann::json to_json(const RngStream& stream) {
  return {{"algorithm_id", std::string(RngStream::kAlgorithmId)},
          {"seed", stream.seed()},
          {"stream_index", stream.stream_index()},
          {"position", stream.position()}};
}

RngStream rng_stream_from_json(const nlohmann::json& j) {
  if (j.at("algorithm_id").get<std::string>() != RngStream::kAlgorithmId) {
    throw InvalidParameter("unsupported rng algorithm: " + j.at("algorithm_id").dump());
  }
  return RngStream(j.at("seed").get<std::uint64_t>(), j.at("stream_index").get<std::uint64_t>(),
                   j.at("position").get<std::uint64_t>());
}

}  // namespace pinlab
