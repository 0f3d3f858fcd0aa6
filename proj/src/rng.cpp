#include "alm/rng.hpp"

#include <limits>

#include "alm/error.hpp"

namespace alm {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t root, std::string_view name, std::uint64_t index) {
  std::uint64_t s = splitmix64(root);
  s = splitmix64(s ^ fnv1a(name));
  return splitmix64(s ^ splitmix64(index + 0x632be59bd9b4e019ULL));
}

std::size_t uniform_index(Rng& rng, std::size_t n) {
  if (n == 0) throw Error(ErrorKind::InvalidArgument, "uniform_index over an empty range");
  const std::uint64_t bound = n;
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r;
  do {
    r = rng();
  } while (r >= limit);
  return static_cast<std::size_t>(r % bound);
}

double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace alm
