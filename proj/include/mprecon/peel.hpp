#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "mprecon/sketch.hpp"

namespace mprecon {

struct PeelEntry {
  std::uint64_t key = 0;
  /// Least positive residue of the key's total coefficient.
  Scalar multiplicity;
  /// Parity bits of the peeled cell; absent when the sketch has none or they are poisoned.
  std::optional<std::vector<std::uint64_t>> ids;

  friend bool operator==(const PeelEntry&, const PeelEntry&) = default;
};

struct PeelResult {
  std::vector<PeelEntry> entries;
  /// Residual field content is zero after removing every entry.
  bool complete = false;
};

namespace detail {

/// Shared peeling loop. `find` returns the (key, multiplicity) held alone by
/// a cell, if any. FIFO over cells, seeded by one ascending scan.
template <class FindPure>
PeelResult peel_with(const Sketch& input, FindPure find) {
  Sketch s = input;
  const std::size_t m = s.size();
  const bool track_ids = s.ids_width() > 0 && !s.ids_poisoned();
  PeelResult out;
  std::deque<std::size_t> queue;
  for (std::size_t i = 0; i < m; ++i) {
    if (!s.cell_is_zero(i)) queue.push_back(i);
  }
  // A run of checksum false positives cannot loop forever.
  const std::size_t max_entries = 4 * m + 16;
  while (!queue.empty() && out.entries.size() < max_entries) {
    const std::size_t i = queue.front();
    queue.pop_front();
    if (s.cell_is_zero(i)) continue;
    std::optional<std::pair<std::uint64_t, Scalar>> hit = find(s, i);
    if (!hit) continue;
    const auto [key, a] = *hit;
    PeelEntry entry{key, a, std::nullopt};
    if (track_ids) entry.ids.emplace(s.ids(i).begin(), s.ids(i).end());
    s.insert(key, Scalar{s.params().neg(a.value)});
    for (std::size_t pos : cell_positions(key, s.hash_config())) {
      if (entry.ids) {
        auto bits = s.ids(pos);
        for (std::size_t w = 0; w < bits.size(); ++w) bits[w] ^= (*entry.ids)[w];
      }
      if (!s.cell_is_zero(pos)) queue.push_back(pos);
    }
    out.entries.push_back(std::move(entry));
  }
  out.complete = s.is_zero();
  return out;
}

}  // namespace detail

/// Lists the keys of a sketch whose count field is in use. A cell with count
/// a != 0 is pure when a^-1 * key_sum decodes to some x, the cell is one of
/// x's positions, and hash_sum = a * enc(H(x)).
inline PeelResult peel(const Sketch& s) {
  return detail::peel_with(s, [](const Sketch& cur, std::size_t i) -> std::optional<std::pair<std::uint64_t, Scalar>> {
    const Scalar a{cur.count(i)};
    if (a.value == 0) return std::nullopt;
    if (auto x = cur.verify_pure(i, a)) return std::pair{*x, a};
    return std::nullopt;
  });
}

/// Peeling without consulting the count field: each candidate multiplicity is
/// tried in order and the first one whose checksum verifies wins.
inline PeelResult peel_no_count(const Sketch& s, std::span<const Scalar> candidates) {
  std::vector<Scalar> cands(candidates.begin(), candidates.end());
  PeelResult r = detail::peel_with(s, [&cands](const Sketch& cur, std::size_t i)
                                          -> std::optional<std::pair<std::uint64_t, Scalar>> {
    for (Scalar a : cands) {
      if (auto x = cur.verify_pure(i, a)) return std::pair{*x, cur.params().scalar(a.value)};
    }
    return std::nullopt;
  });
  return r;
}

}  // namespace mprecon
