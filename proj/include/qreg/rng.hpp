#ifndef QREG_RNG_HPP
#define QREG_RNG_HPP

#include <cstdint>
#include <random>

namespace qreg {

// Seedable random stream with hand-rolled variate transforms so that output
// is bit-identical across platforms (std::mt19937_64 is standardized; the
// library distributions are not). One stream is owned by one caller at a
// time; concurrent work derives independent sub-streams via derive().
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  // Independent sub-stream keyed by (base_seed, index, tag); SplitMix64
  // finalizer mixing.
  static RngStream derive(std::uint64_t base_seed, std::uint64_t index,
                          std::uint64_t tag);
  static std::uint64_t mix(std::uint64_t z);

  std::uint64_t next_u64();

  double uniform();       // [0, 1)
  double uniform_pos();   // (0, 1]
  // Fisher-Yates helper: integer in [0, bound)
  std::uint64_t uniform_below(std::uint64_t bound);

  double normal();                 // standard normal, Box-Muller pair cache
  double gamma(double shape);      // unit scale, Marsaglia-Tsang
  double chi_square(double dof);
  double student_t(double dof);    // normal / sqrt(chi_square/dof)

 private:
  std::mt19937_64 gen_;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

}  // namespace qreg

#endif
