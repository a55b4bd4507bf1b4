#pragma once

#include <array>
#include <cstdint>

namespace qmeas {

/// Philox4x32-10 counter-based generator.
///
/// The output is a pure function of (seed, stream, counter), so any draw can be
/// reproduced without replaying the stream. Normal variates use the Box-Muller
/// transform on two 53-bit uniforms taken from one block; the second variate of
/// each pair is cached and returned by the next call.
class CounterRng {
 public:
  using Block = std::array<std::uint32_t, 4>;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0);

  /// Raw Philox output for an explicit 128-bit counter (lo, hi) under this key.
  static Block philox(std::array<std::uint32_t, 4> counter, std::array<std::uint32_t, 2> key);

  Block next_block();
  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Standard normal.
  double normal();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t blocks_used() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
  Block pending_{};
  int pending_used_ = 4;
};

}  // namespace qmeas
