#pragma once

#include <cstdint>
#include <random>

namespace holds {

// Independent random streams keyed by (master seed, replication, title,
// purpose). Arrival draws never share a stream with reserve initialisation
// or policy tie-breaking, so changing a policy leaves arrivals untouched.
enum class Stream : std::uint64_t { Arrivals = 1, Reserves = 2, Policy = 3, Generator = 4, Search = 5 };

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t stream_seed(std::uint64_t master, std::uint64_t replication,
                                    std::uint64_t title, Stream purpose) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ replication);
  h = splitmix64(h ^ (title * 0x100000001b3ULL));
  return splitmix64(h ^ static_cast<std::uint64_t>(purpose));
}

using Rng = std::mt19937_64;

inline Rng make_rng(std::uint64_t master, std::uint64_t replication, std::uint64_t title,
                    Stream purpose) {
  return Rng(stream_seed(master, replication, title, purpose));
}

}  // namespace holds
