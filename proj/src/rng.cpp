#include "umcmc/rng.hpp"

#include "umcmc/special.hpp"

namespace umcmc {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  hi = static_cast<std::uint32_t>(product >> 32);
  lo = static_cast<std::uint32_t>(product);
}

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, ctr[0], hi0, lo0);
    mulhilo(kPhiloxM1, ctr[2], hi1, lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kPhiloxW0;
    key[1] += kPhiloxW1;
  }
  return ctr;
}

Stream::Stream(std::uint64_t master_seed, std::uint64_t replicate_index)
    : key_{master_seed, replicate_index, 0} {}

Stream::Stream(const StreamKey& key) : key_(key) {}

std::uint64_t Stream::next_u64() {
  // Each Philox block holds two 64-bit words; word w lives in block w / 2.
  const std::uint64_t block = key_.draw_counter >> 1;
  const std::array<std::uint32_t, 4> counter = {
      static_cast<std::uint32_t>(block), static_cast<std::uint32_t>(block >> 32),
      static_cast<std::uint32_t>(key_.replicate_index),
      static_cast<std::uint32_t>(key_.replicate_index >> 32)};
  const std::array<std::uint32_t, 2> key = {static_cast<std::uint32_t>(key_.master_seed),
                                            static_cast<std::uint32_t>(key_.master_seed >> 32)};
  const auto out = philox4x32(counter, key);
  const bool high = (key_.draw_counter & 1u) != 0;
  ++key_.draw_counter;
  return high ? (static_cast<std::uint64_t>(out[3]) << 32 | out[2])
              : (static_cast<std::uint64_t>(out[1]) << 32 | out[0]);
}

double Stream::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1p-53; }

double Stream::open_uniform() {
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1p-53;
}

double Stream::standard_normal() { return normal_quantile(open_uniform()); }

Stream derive_stream(std::uint64_t master_seed, std::uint64_t replicate_index) {
  return Stream(master_seed, replicate_index);
}

std::uint64_t phase_seed(std::uint64_t master_seed, std::uint64_t phase) {
  if (phase == 0) return master_seed;
  return splitmix64(master_seed ^ splitmix64(phase));
}

}  // namespace umcmc
