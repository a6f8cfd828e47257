#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace gdivide {

/// Seeded generator with platform-stable variates.
///
/// std::mt19937_64 has a standardized output sequence, but the standard
/// distributions do not; every variate used by the library is therefore
/// derived here from raw engine output so results are bit-identical across
/// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform integer on [0, n).
  std::size_t index(std::size_t n);
  double normal();
  double normal(double mean, double sd) { return mean + sd * normal(); }
  /// Gamma(shape, scale = 1), Marsaglia-Tsang.
  double gamma(double shape);
  double exponential(double rate = 1.0);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Seed for substream `stream` of a master seed (splitmix64 finalizer).
/// Substreams let resampling loops assign one generator per replicate so the
/// output does not depend on scheduling.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

/// Runs fn(i) for i in [0, n) on up to `threads` worker threads.
/// fn must only write to per-index state.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

/// Process-wide default worker count used when callers pass 0.
unsigned default_threads();
void set_default_threads(unsigned threads);

}  // namespace gdivide
