#include "svoter/rng.hpp"

namespace svoter {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53u;
constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                    std::uint32_t& lo) noexcept {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(p >> 32);
  lo = static_cast<std::uint32_t>(p);
}

}  // namespace

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, ctr[0], hi0, lo0);
    mulhilo(kMul1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeyl0;
    key[1] += kWeyl1;
  }
  return ctr;
}

Stream::Stream(std::uint64_t key, std::uint64_t stream_id) noexcept
    : key_(key), id_(stream_id) {}

void Stream::refill() noexcept {
  const Philox4x32::Counter ctr = {
      static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32),
      static_cast<std::uint32_t>(id_), static_cast<std::uint32_t>(id_ >> 32)};
  const Philox4x32::Key k = {static_cast<std::uint32_t>(key_),
                             static_cast<std::uint32_t>(key_ >> 32)};
  buf_ = Philox4x32::block(ctr, k);
  ++block_;
  pos_ = 0;
}

std::uint32_t Stream::uniform_index(std::uint32_t n) noexcept {
  std::uint64_t m = static_cast<std::uint64_t>(next_u32()) * n;
  auto low = static_cast<std::uint32_t>(m);
  if (low < n) {
    const std::uint32_t threshold = static_cast<std::uint32_t>(-n) % n;
    while (low < threshold) {
      m = static_cast<std::uint64_t>(next_u32()) * n;
      low = static_cast<std::uint32_t>(m);
    }
  }
  return static_cast<std::uint32_t>(m >> 32);
}

std::uint64_t derive_key(std::uint64_t master_seed, std::string_view stream_id) noexcept {
  return splitmix64_mix(splitmix64_mix(master_seed) ^
                        splitmix64_mix(fnv1a64(stream_id) + 0x9e3779b97f4a7c15ULL));
}

Stream derive_stream(const SeedDerivation& seed) noexcept {
  return Stream(derive_key(seed.master_seed, seed.stream_id), seed.replica_index);
}

}  // namespace svoter
