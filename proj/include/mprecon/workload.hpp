#pragma once

#include <cstdint>
#include <unordered_set>
#include <vector>

#include "mprecon/protocol.hpp"
#include "mprecon/rng.hpp"

namespace mprecon {

/// `count` distinct uniformly random 64-bit keys, in draw order.
inline std::vector<std::uint64_t> random_distinct_keys(std::size_t count, Rng& rng) {
  std::vector<std::uint64_t> out;
  std::unordered_set<std::uint64_t> seen;
  out.reserve(count);
  while (out.size() < count) {
    const std::uint64_t x = rng.next();
    if (seen.insert(x).second) out.push_back(x);
  }
  return out;
}

/// One distinct key per party.
inline std::vector<KeySet> singleton_sets(std::size_t n, Rng& rng) {
  std::vector<KeySet> sets;
  for (std::uint64_t x : random_distinct_keys(n, rng)) sets.push_back({x});
  return sets;
}

/// n sets sharing a common core, plus `diff` extra keys each held by a
/// uniformly random nonempty proper subset of the parties, so that
/// |union - intersection| = diff and E|S_i| = set_size.
inline std::vector<KeySet> random_sets(std::size_t n, std::size_t set_size, std::size_t diff, Rng& rng) {
  if (n == 1) diff = 0;
  const std::size_t core = set_size > diff / 2 ? set_size - diff / 2 : 0;
  auto keys = random_distinct_keys(core + diff, rng);
  std::vector<KeySet> sets(n);
  for (std::size_t i = 0; i < core; ++i)
    for (auto& s : sets) s.push_back(keys[i]);
  std::vector<bool> holds(n);
  for (std::size_t e = core; e < core + diff; ++e) {
    std::size_t held = 0;
    do {
      held = 0;
      for (std::size_t i = 0; i < n; ++i) {
        holds[i] = (rng.next() >> 63) != 0;
        held += holds[i];
      }
    } while (held == 0 || held == n);
    for (std::size_t i = 0; i < n; ++i)
      if (holds[i]) sets[i].push_back(keys[e]);
  }
  for (auto& s : sets) s = normalized(std::move(s));
  return sets;
}

}  // namespace mprecon
