#pragma once

#include <array>
#include <cstdint>
#include <limits>

#include <boost/random/normal_distribution.hpp>

namespace brwre {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as easy as 1, 2, 3").
/// Maps a 128-bit counter and a 64-bit key to 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key) noexcept;

/// SplitMix64 finalizer; used to turn structured identifiers into keys.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Purpose tags separating the sub-streams derived from one master seed.
enum class StreamDomain : std::uint64_t {
  Environment = 1,
  Branching = 2,
  Walk = 3,
  GammaWall = 4,
  GammaPath = 5,
  Bootstrap = 6,
  Catalogue = 7,
};

/// A counter-based random stream.
///
/// A stream is identified by (key, substream); the position inside the stream
/// is a 64-bit counter. Two streams with different identifiers never share
/// counter blocks, so results do not depend on how work is split across
/// threads. Satisfies UniformRandomBitGenerator.
class RandomStream {
 public:
  using result_type = std::uint32_t;

  RandomStream(std::uint64_t key, std::uint64_t substream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    if (next_ == 4) refill();
    return buffer_[next_++];
  }

  std::uint64_t next_u64() noexcept {
    const std::uint64_t hi = (*this)();
    return (hi << 32) | (*this)();
  }

  /// Uniform on the open interval (0, 1) with 53 random bits.
  double uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal (ziggurat).
  double normal() noexcept { return normal_(*this); }

  std::uint64_t position() const noexcept { return position_; }

 private:
  void refill() noexcept;

  std::array<std::uint32_t, 2> key_;
  std::uint64_t substream_;
  std::uint64_t position_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  unsigned next_ = 4;
  boost::random::normal_distribution<double> normal_;
};

/// Derives independent streams from a master seed.
class SeedTree {
 public:
  explicit SeedTree(std::uint64_t master) noexcept : master_(master) {}

  std::uint64_t master() const noexcept { return master_; }

  RandomStream stream(StreamDomain domain, std::uint64_t a = 0, std::uint64_t b = 0) const noexcept;

  /// A child seed, for handing a whole sub-experiment its own tree.
  std::uint64_t child_seed(StreamDomain domain, std::uint64_t a = 0, std::uint64_t b = 0) const noexcept;

 private:
  std::uint64_t master_;
};

}  // namespace brwre
