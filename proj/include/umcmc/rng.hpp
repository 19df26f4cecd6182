#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace umcmc {

/// Identifies one position in one replicate's random stream.
struct StreamKey {
  std::uint64_t master_seed = 0;
  std::uint64_t replicate_index = 0;
  std::uint64_t draw_counter = 0;
};

/// Philox4x32-10 block function (Salmon et al. 2011). Maps a 128-bit counter
/// and a 64-bit key to 128 pseudo-random bits.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Counter-based random stream.
///
/// The key is the master seed; the counter is (block index, replicate index).
/// A stream is therefore a pure function of (master_seed, replicate_index) and
/// can be created anywhere without coordination. Every uniform consumes exactly
/// one 64-bit word and every normal consumes exactly one uniform (inversion),
/// so `key().draw_counter` advances deterministically.
///
/// Satisfies UniformRandomBitGenerator so it can drive std algorithms.
class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(std::uint64_t master_seed, std::uint64_t replicate_index);

  /// Resumes a stream at an arbitrary draw counter.
  explicit Stream(const StreamKey& key);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return next_u64(); }

  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform();

  /// Uniform on the open interval (0, 1).
  double open_uniform();

  /// Standard normal by inversion of one open uniform.
  double standard_normal();

  const StreamKey& key() const { return key_; }

 private:
  StreamKey key_;
};

/// Stream for replicate `replicate_index` of a run seeded with `master_seed`.
Stream derive_stream(std::uint64_t master_seed, std::uint64_t replicate_index);

/// Derives an independent master seed for a named phase of a run (pilot,
/// main, ...), so phases never share streams.
std::uint64_t phase_seed(std::uint64_t master_seed, std::uint64_t phase);

inline double uniform(Stream& stream) { return stream.uniform(); }
inline double standard_normal(Stream& stream) { return stream.standard_normal(); }

}  // namespace umcmc
