#include "brwre/rng.hpp"

namespace brwre {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> c,
                                        std::array<std::uint32_t, 2> k) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

RandomStream::RandomStream(std::uint64_t key, std::uint64_t substream) noexcept
    : key_{static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)},
      substream_(substream) {}

void RandomStream::refill() noexcept {
  const std::array<std::uint32_t, 4> ctr{
      static_cast<std::uint32_t>(position_), static_cast<std::uint32_t>(position_ >> 32),
      static_cast<std::uint32_t>(substream_), static_cast<std::uint32_t>(substream_ >> 32)};
  buffer_ = philox4x32(ctr, key_);
  ++position_;
  next_ = 0;
}

RandomStream SeedTree::stream(StreamDomain domain, std::uint64_t a, std::uint64_t b) const noexcept {
  const std::uint64_t key = mix64(master_ ^ mix64(static_cast<std::uint64_t>(domain)));
  const std::uint64_t sub = mix64(mix64(a) + 0x632be59bd9b4e019ULL * mix64(b ^ 0x5bd1e995ULL));
  return RandomStream(key, sub);
}

std::uint64_t SeedTree::child_seed(StreamDomain domain, std::uint64_t a, std::uint64_t b) const noexcept {
  return mix64(mix64(master_ + static_cast<std::uint64_t>(domain)) ^ mix64(a * 0x9e3779b97f4a7c15ULL + b));
}

}  // namespace brwre
