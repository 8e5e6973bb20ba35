#pragma once

#include <cstdint>

namespace safe {

// Philox4x32-10 counter-based generator (Salmon et al., 2011). The output
// sequence depends only on (seed, stream, position), so draws are identical
// across platforms and compilers, and streams with the same seed but distinct
// stream ids are statistically independent.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint32_t next_u32();
  std::uint64_t next_u64();

  // Uniform strictly inside (0, 1), built from the top 53 output bits.
  double uniform();

  // Standard normal by inverse CDF, keeping draws reproducible bit-for-bit.
  double gaussian();

  // Independent stream with the same seed.
  Rng stream(std::uint64_t stream_id) const { return Rng(seed_, stream_id); }

  std::uint64_t seed() const { return seed_; }

 private:
  void refill();

  std::uint64_t seed_;
  std::uint32_t key_[2];
  std::uint32_t ctr_[4];
  std::uint32_t out_[4];
  int idx_ = 4;
};

enum class TruncationSide { Positive, Negative };

// Unit-scale Gamma(shape) via Marsaglia-Tsang, with the power boost for
// shape < 1.
double gamma_draw(double shape, Rng& rng);

// Draw from Normal(mean, sd^2) restricted to (0, inf) or (-inf, 0).
// Inverse CDF in complementary form for moderate truncation; Robert (1995)
// exponential rejection once the cut is more than 5 sd into the tail.
double sample_truncated_normal(double mean, double sd, TruncationSide side,
                               Rng& rng);

}  // namespace safe
