#pragma once

#include <cstdint>
#include <initializer_list>

namespace otsm {

/// Name recorded in every output that depends on random draws.
inline constexpr const char* kPrngName = "splitmix64-counter+box-muller";

/// SplitMix64 finalizer (Steele, Lea, Flood 2014).
std::uint64_t splitmix64_mix(std::uint64_t z);

/// Derives a seed from a base seed and a list of indices:
///   h = mix(base); for each x: h = mix(h ^ mix(x + 1 + k * golden))
/// where k is the position of x. Used for per-replicate seeds
/// derive_seed(base, {m_index, sigma_index, replicate}).
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> indices);

/// Counter-based generator: the n-th output is splitmix64_mix(seed + n * golden),
/// so a stream is fully determined by (seed, n). Normal variates use the
/// Box-Muller transform on pairs of uniforms; both outputs are consumed.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64();
  /// Uniform on (0, 1].
  double uniform();
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace otsm
