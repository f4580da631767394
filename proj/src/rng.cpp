#include "papc/rng.hpp"

#include <cmath>

namespace papc {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

namespace {

std::uint64_t derive(std::uint64_t seed, std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t k : keys) h = splitmix64(h ^ splitmix64(k + 0x632be59bd9b4e019ULL));
  return h;
}

}  // namespace

StreamRng::StreamRng(std::uint64_t seed, std::initializer_list<std::uint64_t> keys)
    : engine_(derive(seed, keys)) {}

double StreamRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double StreamRng::exponential() { return -std::log1p(-uniform()); }

}  // namespace papc
