#pragma once

#include <cstdint>

namespace smx {

// Deterministic, splittable random stream. A stream is fully identified by
// (seed, stream_id): the same pair with the same call sequence yields
// bit-identical draws on a given platform. split() derives children from a
// private split counter, so a child's output never depends on how many draws
// the parent makes afterwards.
//
// Distribution transforms (uniform, normal, gamma) are implemented here
// instead of <random> so the draw sequence is pinned by this library and not
// by the standard library vendor.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0);

  std::uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double uniform();

  // Standard normal via Box-Muller (two uniforms per call, no caching).
  double normal();

  // Gamma(alpha, 1), alpha > 0. Marsaglia-Tsang squeeze with the usual
  // boost for alpha < 1.
  double gamma(double alpha);

  // Standard normal conditioned on [lo, hi], by rejection.
  double truncated_normal(double lo, double hi);

  RngStream split();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::uint64_t seed_ = 0;
  std::uint64_t stream_id_ = 0;
  std::uint64_t split_count_ = 0;
  std::uint64_t s_[4] = {};  // xoshiro256++ state
};

}  // namespace smx
