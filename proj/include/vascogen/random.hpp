#pragma once

#include <cstdint>
#include <random>

namespace vascogen {

// Seeded random stream with a fully specified mapping from engine output to
// doubles, so identical seeds reproduce identical draws on any platform
// (std::uniform_real_distribution makes no such promise).
class RandomStream {
public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits, one engine draw.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [a, b), one engine draw.
  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

private:
  std::mt19937_64 engine_;
};

} // namespace vascogen
