#pragma once

#include <array>
#include <cstdint>

namespace myopic {

/// Philox4x64-10. Output matches the Random123 reference and numpy's
/// Philox for the same key and counter.
using PhiloxCounter = std::array<std::uint64_t, 4>;
using PhiloxKey = std::array<std::uint64_t, 2>;

PhiloxCounter philox4x64(PhiloxCounter counter, PhiloxKey key);

/// Top 53 bits as a double in [0, 1).
inline double to_unit_interval(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Draw stream of one sequence: draw d is word d % 4 of the block with
/// counter {sequence, d / 4, 0, 0} under key {seed, 0}.
class SequenceStream {
 public:
  SequenceStream(std::uint64_t seed, std::uint64_t sequence) : key_{seed, 0}, sequence_(sequence) {}

  std::uint64_t bits(std::uint64_t draw);
  double uniform(std::uint64_t draw) { return to_unit_interval(bits(draw)); }

 private:
  PhiloxKey key_;
  std::uint64_t sequence_;
  std::uint64_t cached_block_ = ~std::uint64_t{0};
  PhiloxCounter cached_{};
};

}  // namespace myopic
