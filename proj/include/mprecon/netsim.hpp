#pragma once

/// Deterministic simulation of the reconciliation communication patterns:
/// relay star (wired and wireless), rooted tree, synchronous PUSH-PULL
/// gossip on a graph, and the all-pairs baseline.
///
/// Message counts are sketch transmissions; bits use the packed-field size
/// of the transmitted sketch. Each party's outcome is judged against the
/// true union, and every failing party gets exactly one failure cause.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mprecon/error.hpp"
#include "mprecon/peel.hpp"
#include "mprecon/protocol.hpp"
#include "mprecon/rng.hpp"
#include "mprecon/sketch.hpp"
#include "mprecon/topology.hpp"

namespace mprecon {

struct SimConfig {
  FieldParams params;
  HashConfig hash;
  std::size_t ids_width = 0;
  /// Gossip only: carry real sketches every round and check them against
  /// the ground-truth coefficients. Much slower; meant for tests.
  bool debug_checks = false;
};

enum class Outcome { all_recovered, missing_one, missing_many };

enum class FailureCause {
  insufficient_spread,
  zeroed_coefficient,
  nonempty_excluded_set,
  peel_failure,
  checksum_false_positive,
};

inline constexpr std::string_view to_string(FailureCause c) {
  switch (c) {
    case FailureCause::insufficient_spread: return "insufficient_spread";
    case FailureCause::zeroed_coefficient: return "zeroed_coefficient";
    case FailureCause::nonempty_excluded_set: return "nonempty_excluded_set";
    case FailureCause::peel_failure: return "peel_failure";
    case FailureCause::checksum_false_positive: return "checksum_false_positive";
  }
  return "unknown";
}

struct PartyResult {
  bool has_set = true;
  std::size_t missing = 0;
  /// Recovered keys that no party holds (checksum false positives).
  std::size_t spurious = 0;
  bool complete = true;
  Outcome outcome = Outcome::all_recovered;
  std::optional<FailureCause> cause;
};

struct SimStats {
  std::uint64_t messages = 0;
  std::uint64_t bits = 0;
  std::uint64_t rounds = 0;
  std::vector<PartyResult> parties;
  /// Bits sent by each party (pairwise baseline only).
  std::vector<std::uint64_t> sent_bits;

  std::uint64_t bytes() const { return (bits + 7) / 8; }
  std::size_t count(Outcome o) const {
    return static_cast<std::size_t>(std::count_if(parties.begin(), parties.end(), [o](const PartyResult& r) {
      return r.has_set && r.outcome == o;
    }));
  }
  std::size_t count(FailureCause c) const {
    return static_cast<std::size_t>(
        std::count_if(parties.begin(), parties.end(), [c](const PartyResult& r) { return r.cause == c; }));
  }
};

namespace detail {

/// Per-trial ground truth shared by the protocol runners.
struct Truth {
  std::vector<KeySet> sets;
  KeySet all;
  Memberships members;
  std::vector<Sketch> sketches;
  std::vector<std::vector<std::size_t>> supports;

  Truth(std::span<const KeySet> input, const SimConfig& cfg) {
    for (const auto& s : input) sets.push_back(normalized(s));
    all = union_of(sets);
    members = memberships_of(sets);
    const bool with_ids = cfg.ids_width >= sets.size() && cfg.ids_width > 0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
      sketches.push_back(build_sketch(sets[i], cfg.params, cfg.hash, cfg.ids_width,
                                      with_ids ? std::optional<std::size_t>(i) : std::nullopt));
      supports.push_back(sketches.back().support());
    }
  }

  std::size_t n() const { return sets.size(); }
  bool has_set(std::size_t i) const { return !sets[i].empty(); }

  /// sum_i coeffs[i] * v_i, touching only nonzero cells.
  Sketch materialize(std::span<const Scalar> coeffs, const SimConfig& cfg) const {
    Sketch out(cfg.params, cfg.hash, cfg.ids_width);
    for (std::size_t i = 0; i < n(); ++i) {
      if (coeffs[i].value != 0 && has_set(i)) out.add_scaled_cells(sketches[i], coeffs[i], supports[i]);
    }
    return out;
  }
};

/// Judges party j's decode of `decoded`.
///   raw:       coefficient of each source before local correction
///   effective: coefficient of each source in the decoded sketch
///   reached:   whether information from each source reached j
inline PartyResult evaluate_party(std::size_t j, const Truth& truth, const ReconOutcome& rec, const FieldParams& f,
                                  std::span<const Scalar> raw, std::span<const Scalar> effective,
                                  const std::vector<bool>& reached) {
  PartyResult r;
  if (!truth.has_set(j)) {
    r.has_set = false;
    return r;
  }
  r.complete = rec.complete;
  const KeySet& got = rec.union_of_local;
  for (std::uint64_t x : truth.all) r.missing += !contains(got, x);
  for (std::uint64_t x : got) r.spurious += !contains(truth.all, x);
  if (r.missing == 0) return r;
  r.outcome = r.missing == 1 ? Outcome::missing_one : Outcome::missing_many;

  for (std::size_t i = 0; i < truth.n(); ++i) {
    if (i != j && truth.has_set(i) && !reached[i]) {
      r.cause = FailureCause::insufficient_spread;
      return r;
    }
  }
  for (std::size_t i = 0; i < truth.n(); ++i) {
    if (truth.has_set(i) && raw[i].value == 0) {
      r.cause = FailureCause::zeroed_coefficient;
      return r;
    }
  }
  // Excluded set over the parties that actually hold sets.
  std::vector<std::uint32_t> index(truth.n(), 0);
  std::vector<Scalar> alphas;
  for (std::size_t i = 0; i < truth.n(); ++i) {
    if (truth.has_set(i)) {
      index[i] = static_cast<std::uint32_t>(alphas.size());
      alphas.push_back(effective[i]);
    }
  }
  Memberships remapped;
  for (const auto& [key, holders] : truth.members) {
    for (auto h : holders) remapped[key].push_back(index[h]);
  }
  std::vector<Scalar> betas(alphas.size(), Scalar{0});
  Scalar total{0};
  for (Scalar a : alphas) total = add(total, a, f);
  if (total.value == 0) {
    for (std::uint64_t x : oracle_excluded_set(remapped, alphas, betas, f.p())) {
      if (!contains(truth.sets[j], x)) {
        r.cause = FailureCause::nonempty_excluded_set;
        return r;
      }
    }
  }
  r.cause = rec.complete ? FailureCause::checksum_false_positive : FailureCause::peel_failure;
  return r;
}

inline void require_parties_fit(std::size_t n, const FieldParams& f) {
  if (n > f.p()) raise(Errc::too_many_parties, std::to_string(n) + " parties exceed p = " + std::to_string(f.p()));
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Relay star

inline SimStats run_relay(std::span<const KeySet> parties, RelayMode mode, const SimConfig& cfg) {
  const std::size_t n = parties.size();
  detail::require_parties_fit(n, cfg.params);
  detail::Truth truth(parties, cfg);
  const auto& f = cfg.params;
  const std::uint64_t sketch_bits = packed_bits(cfg.params, cfg.hash, cfg.ids_width);

  Sketch z(cfg.params, cfg.hash, cfg.ids_width);
  for (const auto& v : truth.sketches) z += v;

  SimStats stats;
  stats.rounds = 2;
  stats.messages = mode == RelayMode::wired ? 2 * n : n + 1;
  stats.bits = stats.messages * sketch_bits;
  std::vector<bool> reached(n, true);
  std::vector<Scalar> raw(n, Scalar{1});
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Scalar> effective(n, Scalar{1});
    Sketch decoded = z;
    if (mode == RelayMode::wired) {
      // Relay forwards the unit sum of everyone else.
      Sketch others(cfg.params, cfg.hash, cfg.ids_width);
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) others += truth.sketches[j];
      }
      decoded = combine_general(Combo{others, f.scalar(n - 1)}, Combo{truth.sketches[i], Scalar{1}});
      effective[i] = n == 1 ? Scalar{0} : neg(f.scalar(n - 1), f);
    } else {
      decoded = local_correct(z, n, truth.sketches[i]);
      effective[i] = f.scalar(1 + f.p() - n % f.p());
    }
    stats.parties.push_back(
        detail::evaluate_party(i, truth, decode_into(decoded, truth.sets[i]), f, raw, effective, reached));
  }
  return stats;
}

/// Wireless relay where parties decode without the count field, trying each
/// candidate multiplicity (the 3-party F_3 variant uses {1, 2}).
inline SimStats run_relay_countless(std::span<const KeySet> parties, const SimConfig& cfg,
                                    std::span<const Scalar> candidates) {
  const std::size_t n = parties.size();
  detail::require_parties_fit(n, cfg.params);
  detail::Truth truth(parties, cfg);
  const auto& f = cfg.params;
  Sketch z(cfg.params, cfg.hash, cfg.ids_width);
  for (const auto& v : truth.sketches) z += v;
  SimStats stats;
  stats.rounds = 2;
  stats.messages = n + 1;
  stats.bits = stats.messages * packed_bits(cfg.params, cfg.hash, cfg.ids_width);
  std::vector<bool> reached(n, true);
  std::vector<Scalar> raw(n, Scalar{1});
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Scalar> effective(n, Scalar{1});
    effective[i] = f.scalar(1 + f.p() - n % f.p());
    const Sketch decoded = local_correct(z, n, truth.sketches[i]);
    stats.parties.push_back(detail::evaluate_party(i, truth, decode_countless_into(decoded, truth.sets[i], candidates),
                                                   f, raw, effective, reached));
  }
  return stats;
}

// ---------------------------------------------------------------------------
// Rooted tree

/// Up-phase: every vertex forwards the sum of its subtree once all children
/// have reported; down-phase: the root's total flows back to every leaf.
inline SimStats run_tree(const RootedTree& tree, std::span<const KeySet> parties, const SimConfig& cfg) {
  validate_tree(tree);
  if (parties.size() != tree.party_leaf.size()) raise(Errc::malformed_tree, "party count differs from party leaves");
  const std::size_t n = parties.size();
  detail::require_parties_fit(n, cfg.params);
  detail::Truth truth(parties, cfg);
  const std::size_t nv = tree.adjacency.size();
  const std::uint64_t sketch_bits = packed_bits(cfg.params, cfg.hash, cfg.ids_width);

  std::vector<std::uint32_t> parent(nv, UINT32_MAX);
  std::vector<std::size_t> pending(nv, 0);
  {
    std::vector<std::uint32_t> stack{tree.root};
    std::vector<bool> seen(nv, false);
    seen[tree.root] = true;
    while (!stack.empty()) {
      auto u = stack.back();
      stack.pop_back();
      for (auto v : tree.adjacency[u]) {
        if (!seen[v]) {
          seen[v] = true;
          parent[v] = u;
          ++pending[u];
          stack.push_back(v);
        }
      }
    }
  }
  std::vector<Sketch> acc(nv, Sketch(cfg.params, cfg.hash, cfg.ids_width));
  for (std::size_t i = 0; i < n; ++i) acc[tree.party_leaf[i]] = truth.sketches[i];

  SimStats stats;
  std::vector<bool> sent(nv, false);
  std::size_t up_steps = 0;
  while (pending[tree.root] != 0) {
    ++up_steps;
    std::vector<std::uint32_t> ready;
    for (std::uint32_t v = 0; v < nv; ++v) {
      if (v != tree.root && !sent[v] && pending[v] == 0) ready.push_back(v);
    }
    for (auto v : ready) {
      acc[parent[v]] += acc[v];
      --pending[parent[v]];
      sent[v] = true;
      ++stats.messages;
    }
  }
  // Down-phase: one message per edge, one tree level per step.
  const Sketch& z = acc[tree.root];
  std::vector<std::uint32_t> frontier{tree.root};
  std::size_t down_steps = 0;
  while (true) {
    std::vector<std::uint32_t> next;
    for (auto u : frontier) {
      for (auto v : tree.adjacency[u]) {
        if (v != parent[u]) {
          next.push_back(v);
          ++stats.messages;
        }
      }
    }
    if (next.empty()) break;
    ++down_steps;
    frontier = std::move(next);
  }
  stats.rounds = up_steps + down_steps;
  stats.bits = stats.messages * sketch_bits;

  const auto& f = cfg.params;
  std::vector<bool> reached(n, true);
  std::vector<Scalar> raw(n, Scalar{1});
  for (std::size_t i = 0; i < n; ++i) {
    Sketch decoded = local_correct(z, n, truth.sketches[i]);
    std::vector<Scalar> effective(n, Scalar{1});
    effective[i] = f.scalar(1 + f.p() - n % f.p());
    stats.parties.push_back(
        detail::evaluate_party(i, truth, decode_into(decoded, truth.sets[i]), f, raw, effective, reached));
  }
  return stats;
}

// ---------------------------------------------------------------------------
// Gossip

namespace detail {

/// Row-major n x n bit matrix; row j = sources whose information reached j.
class ReachMatrix {
 public:
  explicit ReachMatrix(std::size_t n) : n_(n), words_((n + 63) / 64), bits_(n * words_, 0) {
    for (std::size_t j = 0; j < n; ++j) set(j, j);
  }
  void set(std::size_t row, std::size_t col) { bits_[row * words_ + col / 64] |= std::uint64_t{1} << (col % 64); }
  bool get(std::size_t row, std::size_t col) const { return (bits_[row * words_ + col / 64] >> (col % 64)) & 1; }
  void merge_row(std::size_t dst, const ReachMatrix& src, std::size_t src_row) {
    for (std::size_t w = 0; w < words_; ++w) bits_[dst * words_ + w] |= src.bits_[src_row * words_ + w];
  }
  bool full() const {
    const std::uint64_t tail = n_ % 64 == 0 ? ~std::uint64_t{0} : (std::uint64_t{1} << (n_ % 64)) - 1;
    for (std::size_t r = 0; r < n_; ++r) {
      for (std::size_t w = 0; w < words_; ++w) {
        const std::uint64_t want = w + 1 == words_ ? tail : ~std::uint64_t{0};
        if (bits_[r * words_ + w] != want) return false;
      }
    }
    return true;
  }

 private:
  std::size_t n_;
  std::size_t words_;
  std::vector<std::uint64_t> bits_;
};

inline std::uint32_t random_neighbor(const Adjacency& adj, std::uint32_t v, Rng& rng) {
  const auto& nb = adj[v];
  if (nb.empty()) raise(Errc::invalid_argument, "isolated vertex in gossip graph");
  return nb[rng.below(nb.size())];
}

}  // namespace detail

/// Synchronous PUSH-PULL: in every round each vertex j contacts a uniform
/// random neighbor u, pushes kappa1 * combo_j to u and pulls kappa2 * combo_u,
/// with fresh nonzero kappas per message, all computed from the round-start
/// state. Afterwards party j decodes combo_j + (p - coeff_sum_j) * v_j.
///
/// By linearity a vertex's sketch is sum_i alpha_ij v_i, so the simulator
/// tracks the coefficient matrix alpha and materializes sketches only for
/// decoding. With cfg.debug_checks the real sketches are carried too and
/// compared cell-for-cell after every round.
///
/// `parties` is indexed by party; party i sits on vertex g.party_vertex[i].
/// Vertices without a party carry a null message.
inline SimStats run_gossip(const Graph& g, std::span<const KeySet> parties, std::size_t rounds, const SimConfig& cfg,
                           std::uint64_t seed) {
  const std::size_t n = g.vertex_count();
  if (parties.size() != g.party_vertex.size()) raise(Errc::invalid_argument, "party count differs from party map");
  std::vector<KeySet> vertex_sets(n);
  std::vector<int> party_of(n, -1);
  for (std::size_t i = 0; i < parties.size(); ++i) {
    vertex_sets[g.party_vertex[i]] = parties[i];
    party_of[g.party_vertex[i]] = static_cast<int>(i);
  }
  detail::Truth truth(vertex_sets, cfg);
  const auto& f = cfg.params;
  Rng rng(seed);

  std::vector<std::uint64_t> alpha(n * n, 0);
  std::vector<std::uint64_t> sums(n, 0);
  for (std::size_t j = 0; j < n; ++j) {
    if (truth.has_set(j)) {
      alpha[j * n + j] = 1;
      sums[j] = 1;
    }
  }
  detail::ReachMatrix reach(n);
  std::vector<Combo> combos;
  if (cfg.debug_checks) {
    for (std::size_t j = 0; j < n; ++j) {
      combos.push_back(Combo{truth.has_set(j) ? truth.sketches[j] : Sketch(f, cfg.hash, cfg.ids_width),
                             Scalar{sums[j]}});
    }
  }

  auto add_row = [&](std::vector<std::uint64_t>& dst, std::size_t to, const std::vector<std::uint64_t>& src,
                     std::size_t from, std::uint64_t kappa) {
    std::uint64_t* d = dst.data() + to * n;
    const std::uint64_t* s = src.data() + from * n;
    for (std::size_t i = 0; i < n; ++i) {
      if (s[i] != 0) d[i] = f.add(d[i], f.mul(kappa, s[i]));
    }
  };

  SimStats stats;
  const std::uint64_t sketch_bits = packed_bits(cfg.params, cfg.hash, cfg.ids_width);
  for (std::size_t round = 0; round < rounds; ++round) {
    const std::vector<std::uint64_t> snap = alpha;
    const std::vector<std::uint64_t> snap_sums = sums;
    const detail::ReachMatrix snap_reach = reach;
    std::vector<Combo> snap_combos;
    if (cfg.debug_checks) snap_combos = combos;
    for (std::uint32_t j = 0; j < n; ++j) {
      const std::uint32_t u = detail::random_neighbor(g.adjacency, j, rng);
      const Scalar push = rng.nonzero(f);
      const Scalar pull = rng.nonzero(f);
      add_row(alpha, u, snap, j, push.value);
      sums[u] = f.add(sums[u], f.mul(push.value, snap_sums[j]));
      reach.merge_row(u, snap_reach, j);
      add_row(alpha, j, snap, u, pull.value);
      sums[j] = f.add(sums[j], f.mul(pull.value, snap_sums[u]));
      reach.merge_row(j, snap_reach, u);
      if (cfg.debug_checks) {
        combos[u] += snap_combos[j].scaled(push);
        combos[j] += snap_combos[u].scaled(pull);
      }
      stats.messages += 2;
    }
    if (cfg.debug_checks) {
      for (std::size_t j = 0; j < n; ++j) {
        std::vector<Scalar> row(n);
        std::uint64_t s = 0;
        for (std::size_t i = 0; i < n; ++i) {
          row[i] = Scalar{alpha[j * n + i]};
          s = f.add(s, alpha[j * n + i]);
        }
        Sketch expect = truth.materialize(row, cfg);
        if (expect.raw_words().size() != combos[j].sketch.raw_words().size() ||
            !std::equal(expect.raw_words().begin(), expect.raw_words().end(), combos[j].sketch.raw_words().begin()) ||
            combos[j].coeff_sum.value != sums[j] || s != sums[j]) {
          throw std::logic_error("gossip state diverged from ground-truth coefficients at round " +
                                 std::to_string(round + 1));
        }
      }
    }
  }
  stats.rounds = rounds;
  stats.bits = stats.messages * sketch_bits;

  stats.parties.resize(parties.size());
  for (std::size_t j = 0; j < n; ++j) {
    if (party_of[j] < 0) continue;
    PartyResult& out = stats.parties[static_cast<std::size_t>(party_of[j])];
    if (!truth.has_set(j)) {
      out.has_set = false;
      continue;
    }
    std::vector<Scalar> raw(n), effective(n);
    std::vector<bool> reached(n);
    for (std::size_t i = 0; i < n; ++i) {
      raw[i] = Scalar{alpha[j * n + i]};
      effective[i] = raw[i];
      reached[i] = reach.get(j, i);
    }
    const Scalar correction{f.neg(sums[j])};
    effective[j] = add(effective[j], correction, f);
    Sketch decoded = [&] {
      if (!cfg.debug_checks) return truth.materialize(effective, cfg);
      Sketch s = combos[j].sketch;
      s.add_scaled(truth.sketches[j], correction);
      return s;
    }();
    out = detail::evaluate_party(j, truth, decode_into(decoded, truth.sets[j]), f, raw, effective, reached);
  }
  return stats;
}

/// Rounds until every vertex has heard from every source under PUSH-PULL
/// flooding, or max_rounds + 1 if that never happens.
inline std::size_t flooding_time(const Graph& g, Rng& rng, std::size_t max_rounds) {
  const std::size_t n = g.vertex_count();
  detail::ReachMatrix reach(n);
  for (std::size_t round = 1; round <= max_rounds; ++round) {
    const detail::ReachMatrix snap = reach;
    for (std::uint32_t j = 0; j < n; ++j) {
      const std::uint32_t u = detail::random_neighbor(g.adjacency, j, rng);
      reach.merge_row(u, snap, j);
      reach.merge_row(j, snap, u);
    }
    if (reach.full()) return round;
  }
  return max_rounds + 1;
}

inline constexpr double kRoundsSafetyFactor = 1.5;

namespace detail {

inline std::size_t rounds_from_samples(std::vector<std::size_t> samples, double target) {
  std::sort(samples.begin(), samples.end());
  const auto want = static_cast<std::size_t>(std::ceil(target * static_cast<double>(samples.size()) - 1e-9));
  const std::size_t idx = std::min(samples.size() - 1, want == 0 ? 0 : want - 1);
  return static_cast<std::size_t>(std::ceil(kRoundsSafetyFactor * static_cast<double>(samples[idx])));
}

inline std::size_t flooding_cap(std::size_t n) { return 20 * n + 100; }

}  // namespace detail

/// Smallest L such that all-source flooding completes within L rounds in at
/// least `target` of the trials, times the safety factor, rounded up.
inline std::size_t calibrate_rounds(const Graph& g, double target, std::size_t trials, std::uint64_t seed) {
  if (trials == 0) raise(Errc::invalid_argument, "calibration needs at least one trial");
  if (!is_connected(g.adjacency)) raise(Errc::invalid_argument, "calibration needs a connected graph");
  std::vector<std::size_t> samples;
  for (std::size_t t = 0; t < trials; ++t) {
    Rng rng(derive_seed(seed, t));
    samples.push_back(flooding_time(g, rng, detail::flooding_cap(g.vertex_count())));
  }
  return detail::rounds_from_samples(std::move(samples), target);
}

/// As calibrate_rounds, but with a fresh G(n, edge_prob) sample per trial.
inline std::size_t calibrate_rounds_gnp(std::size_t n, double edge_prob, double target, std::size_t trials,
                                        std::uint64_t seed) {
  if (trials == 0) raise(Errc::invalid_argument, "calibration needs at least one trial");
  std::vector<std::size_t> samples;
  for (std::size_t t = 0; t < trials; ++t) {
    Graph g = gen_gnp(n, edge_prob, derive_seed(seed, 2 * t));
    Rng rng(derive_seed(seed, 2 * t + 1));
    samples.push_back(flooding_time(g, rng, detail::flooding_cap(n)));
  }
  return detail::rounds_from_samples(std::move(samples), target);
}

// ---------------------------------------------------------------------------
// All-pairs baseline

/// Every ordered pair (i, j) sends S_i's sketch sized for |S_i ^ S_j| to j,
/// who decodes it against S_j. Sizes use size_for with cfg.hash.k.
inline SimStats run_pairwise_baseline(std::span<const KeySet> parties, const SimConfig& cfg, double epsilon) {
  const std::size_t n = parties.size();
  if (n < 2) raise(Errc::invalid_argument, "pairwise baseline needs at least two parties");
  std::vector<KeySet> sets;
  for (const auto& s : parties) sets.push_back(normalized(s));
  const KeySet all = union_of(sets);

  SimStats stats;
  stats.rounds = 1;
  stats.sent_bits.assign(n, 0);
  std::vector<KeySet> got = sets;
  std::vector<bool> complete(n, true);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      std::vector<std::uint64_t> diff;
      std::set_symmetric_difference(sets[i].begin(), sets[i].end(), sets[j].begin(), sets[j].end(),
                                    std::back_inserter(diff));
      HashConfig hc = cfg.hash;
      hc.subtable_size = subtable_size_for(std::max<std::size_t>(1, diff.size()), hc.k, epsilon);
      Sketch si = build_sketch(sets[i], cfg.params, hc);
      const std::uint64_t b = packed_bits(si);
      ++stats.messages;
      stats.bits += b;
      stats.sent_bits[i] += b;
      ReconOutcome rec = difference_two(sets[j], si);
      complete[j] = complete[j] && rec.complete;
      got[j].insert(got[j].end(), rec.union_of_local.begin(), rec.union_of_local.end());
    }
  }
  for (std::size_t j = 0; j < n; ++j) {
    const KeySet mine = normalized(std::move(got[j]));
    PartyResult r;
    r.complete = complete[j];
    for (std::uint64_t x : all) r.missing += !contains(mine, x);
    for (std::uint64_t x : mine) r.spurious += !contains(all, x);
    if (r.missing > 0) {
      r.outcome = r.missing == 1 ? Outcome::missing_one : Outcome::missing_many;
      r.cause = complete[j] ? FailureCause::checksum_false_positive : FailureCause::peel_failure;
    }
    stats.parties.push_back(r);
  }
  return stats;
}

}  // namespace mprecon
