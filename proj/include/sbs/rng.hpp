#pragma once

#include <cmath>
#include <cstdint>

namespace sbs {

/// Philox4x32-10 counter-based generator. Substreams are addressed by
/// (seed, stream) and are independent of execution order, which keeps
/// replicate-parallel simulations reproducible.
class Philox {
public:
  explicit Philox(std::uint64_t seed, std::uint64_t stream = 0)
      : key0_(static_cast<std::uint32_t>(seed)),
        key1_(static_cast<std::uint32_t>(seed >> 32)),
        ctr2_(static_cast<std::uint32_t>(stream)),
        ctr3_(static_cast<std::uint32_t>(stream >> 32)) {}

  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64() {
    if (have_block_) {
      have_block_ = false;
      return (static_cast<std::uint64_t>(out_[2]) << 32) | out_[3];
    }
    block(ctr_lo_, static_cast<std::uint32_t>(ctr_lo_ >> 32), ctr2_, ctr3_);
    ++ctr_lo_;
    have_block_ = true;
    return (static_cast<std::uint64_t>(out_[0]) << 32) | out_[1];
  }

  /// Uniform on [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller (explicit form, platform independent).
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

private:
  static constexpr std::uint32_t kM0 = 0xD2511F53u;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
  static constexpr std::uint32_t kW0 = 0x9E3779B9u;
  static constexpr std::uint32_t kW1 = 0xBB67AE85u;

  static void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi,
                      std::uint32_t& lo) {
    const std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(prod >> 32);
    lo = static_cast<std::uint32_t>(prod);
  }

  void block(std::uint64_t c01, std::uint32_t, std::uint32_t c2, std::uint32_t c3) {
    std::uint32_t x0 = static_cast<std::uint32_t>(c01);
    std::uint32_t x1 = static_cast<std::uint32_t>(c01 >> 32);
    std::uint32_t x2 = c2, x3 = c3;
    std::uint32_t k0 = key0_, k1 = key1_;
    for (int round = 0; round < 10; ++round) {
      std::uint32_t hi0, lo0, hi1, lo1;
      mulhilo(kM0, x0, hi0, lo0);
      mulhilo(kM1, x2, hi1, lo1);
      const std::uint32_t y0 = hi1 ^ x1 ^ k0;
      const std::uint32_t y1 = lo1;
      const std::uint32_t y2 = hi0 ^ x3 ^ k1;
      const std::uint32_t y3 = lo0;
      x0 = y0; x1 = y1; x2 = y2; x3 = y3;
      k0 += kW0;
      k1 += kW1;
    }
    out_[0] = x0; out_[1] = x1; out_[2] = x2; out_[3] = x3;
  }

  std::uint32_t key0_, key1_;
  std::uint64_t ctr_lo_ = 0;
  std::uint32_t ctr2_, ctr3_;
  std::uint32_t out_[4] = {0, 0, 0, 0};
  bool have_block_ = false;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Stream id for substream addressing: one 64-bit lane per
/// (condition, replicate) cell plus a small salt for nested draws.
inline std::uint64_t stream_id(std::uint32_t condition, std::uint32_t replicate) {
  return (static_cast<std::uint64_t>(condition) << 32) | replicate;
}

}  // namespace sbs
