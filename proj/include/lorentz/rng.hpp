#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace lorentz {

/// Identifies a family of reproducible random streams.
struct RngStreamSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_id = 0;

  friend bool operator==(const RngStreamSpec&, const RngStreamSpec&) = default;
};

namespace detail {

// SplitMix64 output function (Stafford variant 13).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;

}  // namespace detail

/// Counter-based generator: the k-th output of substream (seed, stream, row)
/// is mix64(key + (k+1) * golden) with key a hash of the triple. Any row can
/// be regenerated independently, which is what makes batches reproducible
/// regardless of how rows are distributed across threads.
///
/// Satisfies std::uniform_random_bit_generator.
class StreamRng {
 public:
  using result_type = std::uint64_t;

  StreamRng(const RngStreamSpec& spec, std::uint64_t substream) noexcept {
    std::uint64_t k = detail::mix64(spec.master_seed + detail::kGolden);
    k = detail::mix64(k ^ (spec.stream_id * 0xd1b54a32d192ed03ull + 0x8bb84b93962eacc9ull));
    k = detail::mix64(k ^ (substream * 0xaef17502108ef2d9ull + 0x2545f4914f6cdd1dull));
    state_ = k;
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    state_ += detail::kGolden;
    return detail::mix64(state_);
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform on (-1, 1) built from one draw.
  double uniform_signed() noexcept { return 2.0 * uniform() - 1.0; }

  // Standard exponential by inversion; one draw per variate.
  double exponential() noexcept { return -std::log1p(-uniform()); }

  // Unbiased integer in [0, bound) (Lemire's multiply-and-reject).
  std::uint64_t below(std::uint64_t bound) noexcept {
    unsigned __int128 m = static_cast<unsigned __int128>((*this)()) * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = static_cast<unsigned __int128>((*this)()) * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  std::uint64_t state_;
};

}  // namespace lorentz
