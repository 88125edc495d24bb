#pragma once

/// Reconciliation on top of sketches: two-party difference, combination of
/// two linear combinations of party sketches, local correction for n-party
/// sums, and holder identification from parity bits.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mprecon/error.hpp"
#include "mprecon/field.hpp"
#include "mprecon/peel.hpp"
#include "mprecon/sketch.hpp"

namespace mprecon {

using KeySet = std::vector<std::uint64_t>;  // sorted, unique
using PartySet = std::vector<std::uint32_t>;

/// A sketch together with the sum of the coefficients that produced it.
struct Combo {
  Sketch sketch;
  Scalar coeff_sum;

  Combo& operator+=(const Combo& o) {
    sketch += o.sketch;
    coeff_sum = add(coeff_sum, o.coeff_sum, sketch.params());
    return *this;
  }

  Combo scaled(Scalar c) const {
    return Combo{scale(sketch, c), mul(coeff_sum, c, sketch.params())};
  }
};

struct ReconEntry {
  std::uint64_t key = 0;
  Scalar multiplicity;
  std::optional<PartySet> holders;
  bool holders_reliable = false;
};

struct ReconOutcome {
  std::vector<ReconEntry> recovered;
  bool complete = false;
  KeySet union_of_local;
};

inline KeySet normalized(std::vector<std::uint64_t> keys) {
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());
  return keys;
}

inline bool contains(const KeySet& set, std::uint64_t key) { return std::binary_search(set.begin(), set.end(), key); }

/// Parties whose parity bit is set. The number of holders must have the same
/// parity as the recovered multiplicity.
inline PartySet holders_from_ids(std::span<const std::uint64_t> ids, std::size_t width, Scalar multiplicity,
                                 bool poisoned = false) {
  if (poisoned) raise(Errc::ids_poisoned, "parity bits were invalidated by scaling");
  PartySet out;
  for (std::size_t i = 0; i < width; ++i) {
    if ((ids[i / 64] >> (i % 64)) & 1) out.push_back(static_cast<std::uint32_t>(i));
  }
  if (out.size() % 2 != multiplicity.value % 2) {
    raise(Errc::parity_mismatch, std::to_string(out.size()) + " holders for multiplicity " +
                                     std::to_string(multiplicity.value));
  }
  return out;
}

namespace detail {

inline ReconEntry to_recon_entry(const PeelEntry& e, const Sketch& s) {
  ReconEntry r{e.key, e.multiplicity, std::nullopt, false};
  if (!e.ids) return r;
  try {
    r.holders = holders_from_ids(*e.ids, s.ids_width(), e.multiplicity);
    r.holders_reliable = true;
  } catch (const Error& err) {
    if (err.code() != Errc::parity_mismatch) throw;
    PartySet raw;
    for (std::size_t i = 0; i < s.ids_width(); ++i) {
      if (((*e.ids)[i / 64] >> (i % 64)) & 1) raw.push_back(static_cast<std::uint32_t>(i));
    }
    r.holders = std::move(raw);
  }
  return r;
}


inline ReconOutcome outcome_from(const PeelResult& pr, const Sketch& combined, const KeySet& own_set) {
  ReconOutcome out;
  out.complete = pr.complete;
  out.union_of_local = own_set;
  for (const auto& e : pr.entries) {
    out.recovered.push_back(detail::to_recon_entry(e, combined));
    out.union_of_local.push_back(e.key);
  }
  out.union_of_local = normalized(std::move(out.union_of_local));
  return out;
}

}  // namespace detail

/// Peels `combined` and merges every recovered key into `own_set`.
inline ReconOutcome decode_into(const Sketch& combined, const KeySet& own_set) {
  return detail::outcome_from(peel(combined), combined, own_set);
}

/// As decode_into, ignoring the count field and trying each candidate multiplicity.
inline ReconOutcome decode_countless_into(const Sketch& combined, const KeySet& own_set,
                                          std::span<const Scalar> candidates) {
  return detail::outcome_from(peel_no_count(combined, candidates), combined, own_set);
}

/// Two-party reconciliation from the caller's side: peel peer - own.
/// Multiplicity 1 marks peer-only keys and p-1 own-only keys; over F_2 the
/// two coincide and membership in own_set decides.
inline ReconOutcome difference_two(const KeySet& own_set, const Sketch& peer_sketch) {
  const auto& f = peer_sketch.params();
  Sketch own = build_sketch(own_set, f, peer_sketch.hash_config(), peer_sketch.ids_width());
  Sketch diff = peer_sketch;
  diff.add_scaled(own, Scalar{f.p() - 1});
  PeelResult pr = peel(diff);
  ReconOutcome out;
  out.complete = pr.complete;
  out.union_of_local = own_set;
  for (const auto& e : pr.entries) {
    out.recovered.push_back(ReconEntry{e.key, e.multiplicity, std::nullopt, false});
    const bool peer_only = f.p() == 2 ? !contains(own_set, e.key) : e.multiplicity.value == 1;
    if (peer_only) out.union_of_local.push_back(e.key);
  }
  out.union_of_local = normalized(std::move(out.union_of_local));
  return out;
}

/// gamma = -alpha * beta^-1; returns L1 + gamma * L2, in which every key held
/// by all parties has coefficient zero. With alpha = 0, L1 already has that
/// property and is returned unchanged.
inline Sketch combine_general(const Combo& l1, const Combo& l2) {
  const auto& f = l1.sketch.params();
  if (!l1.sketch.compatible(l2.sketch)) raise(Errc::config_mismatch, "combinations use different sketch configs");
  if (l1.coeff_sum.value == 0) return l1.sketch;
  if (l2.coeff_sum.value == 0) raise(Errc::zero_beta, "second combination has coefficient sum 0");
  const Scalar gamma = neg(mul(l1.coeff_sum, mul_inv(l2.coeff_sum, f), f), f);
  Sketch out = l1.sketch;
  out.add_scaled(l2.sketch, gamma);
  return out;
}

/// Z + (p - n) * own, where Z is the unit-coefficient sum over n participants.
inline Sketch local_correct(const Sketch& z, std::size_t n_participants, const Sketch& own_sketch) {
  const auto& f = z.params();
  if (n_participants > f.p()) {
    raise(Errc::too_many_parties, std::to_string(n_participants) + " participants exceed p = " + std::to_string(f.p()));
  }
  Sketch out = z;
  out.add_scaled(own_sketch, Scalar{(f.p() - n_participants) % f.p()});
  return out;
}

/// Key -> holders map for a family of sets.
using Memberships = std::map<std::uint64_t, PartySet>;

inline Memberships memberships_of(std::span<const KeySet> sets) {
  Memberships m;
  for (std::uint32_t i = 0; i < sets.size(); ++i) {
    for (std::uint64_t x : sets[i]) m[x].push_back(i);
  }
  return m;
}

/// Keys of the union (minus the intersection) whose coefficient
/// sum_{i in T} (alpha_i + gamma * beta_i) vanishes mod p, with
/// gamma = -alpha * beta^-1, or gamma = 0 when alpha = 0. Direct evaluation;
/// used as a test and simulation oracle.
inline KeySet oracle_excluded_set(const Memberships& memberships, std::span<const Scalar> alphas,
                                  std::span<const Scalar> betas, std::uint64_t p) {
  if (alphas.size() != betas.size()) raise(Errc::invalid_argument, "alpha and beta lengths differ");
  const FieldParams f(p, 2);
  Scalar alpha{0}, beta{0};
  for (Scalar a : alphas) alpha = add(alpha, f.scalar(a.value), f);
  for (Scalar b : betas) beta = add(beta, f.scalar(b.value), f);
  Scalar gamma{0};
  if (alpha.value != 0) {
    if (beta.value == 0) raise(Errc::zero_beta, "beta sums to zero");
    gamma = neg(mul(alpha, mul_inv(beta, f), f), f);
  }
  KeySet out;
  for (const auto& [key, holders] : memberships) {
    if (holders.empty() || holders.size() == alphas.size()) continue;
    Scalar sum{0};
    for (std::uint32_t i : holders) {
      sum = add(sum, add(f.scalar(alphas[i].value), mul(gamma, f.scalar(betas[i].value), f), f), f);
    }
    if (sum.value == 0) out.push_back(key);
  }
  return out;
}

/// Union minus intersection of a family of sets.
inline KeySet symmetric_core(std::span<const KeySet> sets) {
  KeySet out;
  for (const auto& [key, holders] : memberships_of(sets)) {
    if (holders.size() != sets.size()) out.push_back(key);
  }
  return out;
}

inline KeySet union_of(std::span<const KeySet> sets) {
  KeySet out;
  for (const auto& s : sets) out.insert(out.end(), s.begin(), s.end());
  return normalized(std::move(out));
}

}  // namespace mprecon
