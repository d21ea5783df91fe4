#include "gglab/rng.hpp"

namespace gglab {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_key(std::uint64_t seed, std::uint64_t a, std::uint64_t b, std::uint64_t c) {
  std::uint64_t k = mix64(seed + 0x632be59bd9b4e019ULL);
  k = mix64(k ^ (a + 0x9e3779b97f4a7c15ULL));
  k = mix64(k ^ (b + 0xd1b54a32d192ed03ULL));
  k = mix64(k ^ (c + 0x8cb92ba72f3d8dd7ULL));
  return k;
}

std::uint64_t site_key(const Site& x) {
  std::uint64_t k = 0x2545f4914f6cdd1dULL;
  for (int c : x.c) k = mix64(k ^ static_cast<std::uint64_t>(static_cast<std::int64_t>(c)));
  return k;
}

}  // namespace gglab
