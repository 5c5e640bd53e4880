#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace emlsr {

/// Every stochastic subsystem draws from its own stream, split off the run
/// seed by subsystem index. Changing how one subsystem consumes randomness
/// never perturbs another, which is what makes controlled-difference replays
/// (same seed, one knob changed) line up event for event.
enum class StreamId : std::uint64_t {
  Motion = 1,       // process noise acting on the true target
  Measurement = 2,  // trilateration measurement noise
  Contention = 3,   // backoff draws
  Placement = 4,    // AP/STA positions and target heading
  Traffic = 5,      // reserved; DL arrivals are constant-rate
  Selection = 6,    // random-selection baseline draws
};

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Deterministic random stream. Distributions are hand-rolled on top of
/// mt19937_64 because the standard <random> distributions are
/// implementation-defined and would break cross-platform replay.
class RngStream {
 public:
  RngStream(std::uint64_t seed, StreamId id)
      : engine_(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(id)))) {}

  /// Uniform in [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform integer in [0, n). Modulo bias is below 2^-52 for any n that
  /// fits the call sites here (n <= 2^12-ish).
  std::uint64_t uniform_below(std::uint64_t n) { return engine_() % n; }

  bool coin() { return (engine_() & 1ULL) != 0; }

  /// Standard normal via Box-Muller; consumes two uniforms per pair.
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = uniform01();
    const double u2 = uniform01();
    if (u1 < 1e-300) u1 = 1e-300;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace emlsr
