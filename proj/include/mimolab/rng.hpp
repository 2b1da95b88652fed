#pragma once

#include "mimolab/common.hpp"

#include <cstdint>
#include <vector>

namespace mimolab {

/// splitmix64 step; used to derive independent stream seeds from a base seed.
std::uint64_t splitmix64(std::uint64_t& state);

/// Combine a base seed with a stream index into a well-separated seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

/// Small deterministic generator (xoshiro256**). Uniforms come from raw
/// 53-bit mantissas and normals from Box-Muller, so sequences are identical
/// across standard libraries and platforms.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  /// Uniform on [0, 1).
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);
  /// Standard normal.
  double gauss();
  /// Circularly-symmetric complex normal, unit variance: (g1 + i g2)/sqrt(2).
  cplx cgauss();

  /// Fill an N-by-K matrix with i.i.d. unit-variance complex normals.
  void fill_cgauss(MatC& m);

  /// Sample `count` distinct integers from {0, ..., n-1} (order preserved by
  /// selection order); used for beam assignment.
  std::vector<int> sample_without_replacement(int n, int count);

 private:
  std::uint64_t s_[4];
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mimolab
