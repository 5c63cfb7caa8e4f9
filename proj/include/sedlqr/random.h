#pragma once

#include <array>
#include <cstdint>

namespace sedlqr {

/// Philox4x64-10 block function (Random123 constants).
std::array<std::uint64_t, 4> Philox4x64(std::array<std::uint64_t, 4> counter,
                                        std::array<std::uint64_t, 2> key);

/// Counter-based stream: key (seed, stream), block b is
/// Philox4x64({b, 0, 0, 0}, key) and its four words are drawn in order.
/// Uniforms are ((u >> 11) + 0.5) * 2^-53, never exactly 0 or 1. Normals come
/// in Box-Muller pairs (cos first, then sin) from two consecutive uniforms.
///
/// Any draw can be recomputed from (seed, stream, index) alone.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t NextU64();
  double Uniform();
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }
  double Normal();

 private:
  std::array<std::uint64_t, 2> key_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 4> buffer_{};
  int used_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace sedlqr
