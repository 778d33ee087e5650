#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string_view>

namespace npgof {

// Philox4x32-10 (Salmon et al., SC'11): a bijection of a 128-bit counter
// under a 64-bit key. Outputs are addressed rather than generated in
// sequence, so a replication's draws do not depend on which worker runs it.
namespace detail {

inline constexpr std::uint32_t kPhiloxW32A = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW32B = 0xBB67AE85u;
inline constexpr std::uint32_t kPhiloxM4x32A = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM4x32B = 0xCD9E8D57u;

inline void philox_round(std::array<std::uint32_t, 4>& ctr,
                         const std::array<std::uint32_t, 2>& key) {
  const std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM4x32A) * ctr[0];
  const std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM4x32B) * ctr[2];
  const auto lo0 = static_cast<std::uint32_t>(p0);
  const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
  const auto lo1 = static_cast<std::uint32_t>(p1);
  const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
  ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
}

}  // namespace detail

inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                               std::array<std::uint32_t, 2> key) {
  detail::philox_round(counter, key);
  for (int round = 1; round < 10; ++round) {
    key[0] += detail::kPhiloxW32A;
    key[1] += detail::kPhiloxW32B;
    detail::philox_round(counter, key);
  }
  return counter;
}

// splitmix64 finalizer; mixes seeds and tags into well-spread stream keys.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// FNV-1a over a name, so call sites can tag their streams readably.
inline constexpr std::uint64_t tag_hash(std::string_view name) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char ch : name) {
    h ^= static_cast<unsigned char>(ch);
    h *= 0x100000001B3ull;
  }
  return h;
}

inline std::uint64_t derive_key(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(splitmix64(seed) ^ tag);
}

inline std::uint64_t derive_key(std::uint64_t seed, std::string_view tag) {
  return derive_key(seed, tag_hash(tag));
}

// One addressable stream of draws. The 128-bit counter is split as
// [block_lo, block_hi, stream_lo, stream_hi]; distinct stream ids under the
// same key never collide. uniform() is strictly inside (0,1).
class RngStream {
 public:
  RngStream(std::uint64_t key, std::uint64_t stream)
      : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
        stream_(stream) {}

  double uniform() {
    const std::uint64_t hi = next_u32();
    const std::uint64_t lo = next_u32();
    const std::uint64_t bits = (hi << 32) | lo;
    return (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

 private:
  std::uint32_t next_u32() {
    if (used_ == 4) {
      const std::array<std::uint32_t, 4> ctr{
          static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
          static_cast<std::uint32_t>(stream_), static_cast<std::uint32_t>(stream_ >> 32)};
      buf_ = philox4x32(ctr, key_);
      ++block_;
      used_ = 0;
    }
    return buf_[used_++];
  }

  std::array<std::uint32_t, 2> key_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int used_ = 4;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Stream for replication `rep`, optionally split into per-index substreams
// (rejection-sampler retries stay aligned across experiment arms).
inline RngStream replication_stream(std::uint64_t key, std::uint64_t rep,
                                    std::uint32_t substream = 0) {
  return RngStream(key, (static_cast<std::uint64_t>(substream) << 32) |
                            (rep & 0xFFFFFFFFull));
}

}  // namespace npgof
