#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string>
#include <string_view>

namespace svoter {

/// SplitMix64 output finalizer (Steele, Lea & Flood). Bijective on 64-bit words.
constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// 64-bit FNV-1a over a byte string; used to turn stream labels into words.
std::uint64_t fnv1a64(std::string_view bytes) noexcept;

/// Philox4x32-10 block function (Salmon et al., SC'11).
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;
  static Counter block(Counter ctr, Key key) noexcept;
};

/// Counter-based random stream.
///
/// The stream is a pure function of (key, stream_id, position): block `b`
/// is Philox4x32-10 applied to the counter (b_lo, b_hi, id_lo, id_hi). The
/// 32-bit words of each block are consumed in order. All derived variates
/// are computed with explicit arithmetic, never through `<random>`
/// distributions, so a stream reproduces bit for bit on every platform.
class Stream {
 public:
  using result_type = std::uint64_t;

  Stream() = default;
  Stream(std::uint64_t key, std::uint64_t stream_id) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  std::uint32_t next_u32() noexcept {
    if (pos_ == 4) refill();
    return buf_[pos_++];
  }
  std::uint64_t next_u64() noexcept {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }
  result_type operator()() noexcept { return next_u64(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }
  /// Uniform on (0, 1] with 53 random bits; safe to take logarithms of.
  double uniform_pos() noexcept {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }
  /// Exponential with the given mean.
  double exponential(double mean) noexcept;
  /// Uniform on {0, ..., n-1}; unbiased (Lemire's multiply-and-reject).
  std::uint32_t uniform_index(std::uint32_t n) noexcept;
  /// Standard normal (Box-Muller, cosine branch).
  double normal() noexcept;
  /// Gamma(shape, scale) (Marsaglia-Tsang, boosted for shape < 1).
  double gamma(double shape, double scale) noexcept;
  /// Poisson with the given mean (multiplication for small means, PTRS otherwise).
  std::uint64_t poisson(double mean) noexcept;

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t stream_id() const noexcept { return id_; }
  std::uint64_t blocks_used() const noexcept { return block_; }

 private:
  void refill() noexcept;

  std::uint64_t key_ = 0;
  std::uint64_t id_ = 0;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  unsigned pos_ = 4;
};

/// Inputs of a deterministic stream derivation.
struct SeedDerivation {
  std::uint64_t master_seed = 0;
  std::string stream_id;
  std::uint64_t replica_index = 0;
};

/// Philox key for (master_seed, stream_id); the replica index becomes the
/// high half of the Philox counter, so distinct replicas of one label can
/// never share a block.
std::uint64_t derive_key(std::uint64_t master_seed, std::string_view stream_id) noexcept;

Stream derive_stream(const SeedDerivation& seed) noexcept;

/// A labelled family of replica streams under one master seed.
struct StreamFamily {
  std::uint64_t master_seed = 0;
  std::string label;

  Stream at(std::uint64_t replica) const noexcept {
    return derive_stream({master_seed, label, replica});
  }
  StreamFamily child(std::string_view suffix) const {
    return {master_seed, label + "/" + std::string(suffix)};
  }
  /// Value written to the `seed` column of replica CSV files.
  std::uint64_t provenance(std::uint64_t replica) const noexcept {
    return splitmix64_mix(derive_key(master_seed, label) ^ splitmix64_mix(replica));
  }
};

}  // namespace svoter
