#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <numbers>
#include <vector>

namespace attrspace {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// Streams are cheap value types: a stream is (key, stream-id) and a 64-bit
// block counter. Substreams are derived by hashing arbitrary 64-bit tags
// into the id, so per-attribute / per-purpose streams are independent by
// construction and adding one stream never perturbs another.

constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : RngStream(seed, {}) {}

  RngStream(std::uint64_t seed, std::initializer_list<std::uint64_t> tags) {
    std::uint64_t h = mix64(seed ^ 0x853C49E6748FEA9Bull);
    for (std::uint64_t t : tags) h = mix64(h ^ t);
    key_[0] = static_cast<std::uint32_t>(h);
    key_[1] = static_cast<std::uint32_t>(h >> 32);
    const std::uint64_t sid = mix64(h ^ 0xDA3E39CB94B95BDBull);
    stream_[0] = static_cast<std::uint32_t>(sid);
    stream_[1] = static_cast<std::uint32_t>(sid >> 32);
  }

  /// Child stream derived from this one; does not advance this stream.
  RngStream child(std::uint64_t tag) const {
    RngStream c(0);
    const std::uint64_t base =
        (static_cast<std::uint64_t>(key_[1]) << 32) | key_[0];
    const std::uint64_t sbase =
        (static_cast<std::uint64_t>(stream_[1]) << 32) | stream_[0];
    const std::uint64_t h = mix64(base ^ mix64(sbase ^ tag));
    c.key_[0] = static_cast<std::uint32_t>(h);
    c.key_[1] = static_cast<std::uint32_t>(h >> 32);
    const std::uint64_t sid = mix64(h ^ 0xF1EA5EEDB1E55EDull);
    c.stream_[0] = static_cast<std::uint32_t>(sid);
    c.stream_[1] = static_cast<std::uint32_t>(sid >> 32);
    return c;
  }

  std::uint32_t next_u32() {
    if (buf_pos_ == 4) refill();
    return buf_[buf_pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t lo = next_u32();
    const std::uint64_t hi = next_u32();
    return (hi << 32) | lo;
  }

  /// Uniform double in [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller; pairs are cached.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    // u1 in (0,1] so log never sees zero.
    const double u1 = (static_cast<double>(next_u64() >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  void fill_normal(double* out, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) out[i] = normal();
  }

  /// Unbiased integer in [0, bound) (Lemire rejection).
  std::uint32_t bounded(std::uint32_t bound) {
    std::uint64_t m = static_cast<std::uint64_t>(next_u32()) * bound;
    auto l = static_cast<std::uint32_t>(m);
    if (l < bound) {
      const std::uint32_t t = (~bound + 1u) % bound;
      while (l < t) {
        m = static_cast<std::uint64_t>(next_u32()) * bound;
        l = static_cast<std::uint32_t>(m);
      }
    }
    return static_cast<std::uint32_t>(m >> 32);
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = bounded(static_cast<std::uint32_t>(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  /// First `m` entries of a full shuffle of [0, n), without materializing
  /// the rest of the permutation's draws.
  std::vector<std::uint32_t> sample_without_replacement(std::uint32_t n, std::uint32_t m) {
    std::vector<std::uint32_t> idx(n);
    for (std::uint32_t i = 0; i < n; ++i) idx[i] = i;
    if (m > n) m = n;
    for (std::uint32_t i = 0; i < m; ++i) {
      const std::uint32_t j = i + bounded(n - i);
      std::swap(idx[i], idx[j]);
    }
    idx.resize(m);
    return idx;
  }

 private:
  void refill() {
    std::array<std::uint32_t, 4> ctr = {
        static_cast<std::uint32_t>(counter_),
        static_cast<std::uint32_t>(counter_ >> 32), stream_[0], stream_[1]};
    std::array<std::uint32_t, 2> key = key_;
    for (int round = 0; round < 10; ++round) {
      const std::uint64_t p0 = 0xD2511F53ull * ctr[0];
      const std::uint64_t p1 = 0xCD9E8D57ull * ctr[2];
      const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
      const auto lo0 = static_cast<std::uint32_t>(p0);
      const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
      const auto lo1 = static_cast<std::uint32_t>(p1);
      ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
      key[0] += 0x9E3779B9u;
      key[1] += 0xBB67AE85u;
    }
    buf_ = ctr;
    buf_pos_ = 0;
    ++counter_;
  }

  std::array<std::uint32_t, 2> key_ = {0, 0};
  std::array<std::uint32_t, 2> stream_ = {0, 0};
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buf_ = {0, 0, 0, 0};
  int buf_pos_ = 4;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// Purpose tags for substream derivation. Values are arbitrary but frozen:
// changing one changes every seeded fixture downstream of it.
namespace rng_tag {
constexpr std::uint64_t gaussian = 0x67617573;      // sampler draws
constexpr std::uint64_t skew = 0x736b6577;          // skewed sampler draws
constexpr std::uint64_t mixture = 0x6d697874;       // mixture component picks
constexpr std::uint64_t noise_select = 0x6e6f6973;  // label-noise point picks
constexpr std::uint64_t noise_label = 0x6c61626c;   // label-noise new labels
constexpr std::uint64_t init_pool = 0x706f6f6c;     // candidate pool sampling
constexpr std::uint64_t select = 0x73656c63;        // stochastic shortlist pick
constexpr std::uint64_t param_init = 0x70696e69;    // model parameter init
constexpr std::uint64_t shuffle = 0x73687566;       // epoch batch shuffles
constexpr std::uint64_t perturb = 0x70657274;       // latent perturbation noise
}  // namespace rng_tag

}  // namespace attrspace
