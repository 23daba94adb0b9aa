#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace ddis {

/// Mixes a word through the splitmix64 finalizer. Used to derive independent
/// sub-stream seeds from (seed, counter...) tuples so results do not depend
/// on evaluation order.
inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t mix64(std::uint64_t seed, std::uint64_t a) {
  return mix64(seed ^ mix64(a));
}

inline std::uint64_t mix64(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  return mix64(mix64(seed, a) ^ mix64(b + 0x6a09e667f3bcc909ull));
}

/// Deterministic random stream. mt19937_64 is fully specified by the
/// standard, and the uniform/normal mappings below avoid the
/// implementation-defined std::*_distribution adaptors, so identical seeds
/// give identical draws on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next_u64() { return eng_(); }

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform01() {
    return static_cast<double>(eng_() >> 11) * (1.0 / 9007199254740992.0);
  }

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t uniform_index(std::uint64_t n) {
    // Modulo bias is < 2^-40 for any n used here; acceptable for simulation.
    return eng_() % n;
  }

  /// Standard normal draw via Box-Muller. Consumes two engine outputs per
  /// draw (no cached spare), keeping the stream position predictable.
  double normal() {
    const double u1 = 1.0 - uniform01();  // (0, 1]
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
  }

  double normal(double mu, double sigma) { return mu + sigma * normal(); }

 private:
  std::mt19937_64 eng_;
};

}  // namespace ddis
