#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace anm {

/// Worker count used by OpenMP regions. Values < 1 are treated as 1.
void set_jobs(int jobs);
int jobs();

/// Default worker count from the ANM_JOBS environment variable, else 1.
int default_jobs();

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Seed for an independent stream identified by (master, ids...). Depends only on
/// the values, never on scheduling, so trial results are identical for any job count.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> ids) {
  std::uint64_t h = splitmix64(master);
  for (std::uint64_t id : ids) h = splitmix64(h ^ splitmix64(id + 0x632be59bd9b4e019ULL));
  return h;
}

using Rng = std::mt19937_64;

}  // namespace anm
