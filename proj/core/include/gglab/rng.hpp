#pragma once

#include <cstdint>
#include <limits>

#include "gglab/lattice.hpp"

namespace gglab {

std::uint64_t mix64(std::uint64_t z);

// Key derivation: fold a sequence of words into a stream key.
std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0);
std::uint64_t site_key(const Site& x);

// Counter-based generator: output n is mix64(key + n * gamma). Any (key, n)
// can be evaluated directly, so streams never depend on scheduling.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t key, std::uint64_t counter = 0) : key_(key), ctr_(counter) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix64(key_ + (++ctr_) * 0x9e3779b97f4a7c15ULL); }

  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  // (0, 1], safe for log
  double uniform_pos() { return (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53; }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return ctr_; }

 private:
  std::uint64_t key_;
  std::uint64_t ctr_;
};

// Stream tags keep keys for different purposes apart.
enum class StreamTag : std::uint64_t {
  Disorder = 1,
  DisorderNegated = 2,
  Chain = 3,
  Walker = 4,
  Initial = 5,
  Shift = 6,
  Ensemble = 7,
};

}  // namespace gglab
