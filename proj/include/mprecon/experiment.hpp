#pragma once

/// Experiment harness: runs a protocol or simulation for many seeded trials,
/// aggregates per-party outcomes into Table-2 style rows, and renders them as
/// CSV or JSON with the full configuration echoed as metadata.

#include <algorithm>
#include <bit>
#include <charconv>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <exception>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "json.hpp"

#include "mprecon/error.hpp"
#include "mprecon/netsim.hpp"
#include "mprecon/protocol.hpp"
#include "mprecon/sketch.hpp"
#include "mprecon/topology.hpp"
#include "mprecon/workload.hpp"

namespace mprecon {

inline constexpr std::string_view kVersion = "0.1.0";

enum class Command { two, nparty, relay, tree, gossip, pairwise, calibrate };
enum class RetryPolicy { none, doubling };
enum class Workload { automatic, singleton, random };

inline std::string_view to_string(Command c) {
  switch (c) {
    case Command::two: return "two";
    case Command::nparty: return "nparty";
    case Command::relay: return "relay";
    case Command::tree: return "tree";
    case Command::gossip: return "gossip";
    case Command::pairwise: return "pairwise";
    case Command::calibrate: return "calibrate";
  }
  return "?";
}

inline Command parse_command(std::string_view s) {
  for (Command c : {Command::two, Command::nparty, Command::relay, Command::tree, Command::gossip, Command::pairwise,
                    Command::calibrate}) {
    if (to_string(c) == s) return c;
  }
  raise(Errc::invalid_argument, "unknown command '" + std::string(s) + "'");
}

/// Table size expression: "auto", an absolute count ("4096"), or a multiple
/// of the party count ("2n") or of the difference bound ("1.3t").
struct CellsExpr {
  enum class Kind { automatic, absolute, per_n, per_t };
  Kind kind = Kind::automatic;
  double value = 0;

  static CellsExpr parse(const std::string& s) {
    if (s.empty() || s == "auto") return {};
    CellsExpr e;
    std::string num = s;
    if (s.back() == 'n' || s.back() == 't') {
      e.kind = s.back() == 'n' ? Kind::per_n : Kind::per_t;
      num = s.substr(0, s.size() - 1);
      if (num.empty()) num = "1";
    } else {
      e.kind = Kind::absolute;
    }
    std::size_t used = 0;
    try {
      e.value = std::stod(num, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != num.size() || !(e.value > 0)) raise(Errc::invalid_argument, "bad cells expression '" + s + "'");
    return e;
  }

  std::string str() const {
    std::ostringstream os;
    switch (kind) {
      case Kind::automatic: return "auto";
      case Kind::absolute: os << value; break;
      case Kind::per_n: os << value << 'n'; break;
      case Kind::per_t: os << value << 't'; break;
    }
    return os.str();
  }
};

struct ExperimentConfig {
  Command command = Command::gossip;
  std::uint64_t p = 1000000007;
  std::uint64_t q = std::uint64_t{1} << 32;
  unsigned k = 4;
  CellsExpr cells;
  double epsilon = 0.3;
  std::vector<std::size_t> n = {10};
  std::size_t trials = 100;
  std::uint64_t seed = 1;
  std::optional<std::size_t> rounds;    // nullopt = calibrate
  std::optional<double> edge_prob;      // nullopt = 2 ln n / n
  RetryPolicy retry = RetryPolicy::none;
  Workload workload = Workload::automatic;
  std::size_t set_size = 1000;
  std::size_t diff = 100;
  RelayMode relay_mode = RelayMode::wired;
  std::optional<std::string> topology;  // edge-list file for gossip/tree
  double calibration_target = 0.999;
  std::size_t calibration_trials = 200;
  std::size_t max_doublings = 4;
};

struct ReportRow {
  std::size_t n = 0;
  std::uint64_t cnt_all = 0;
  std::uint64_t cnt_miss1 = 0;
  std::uint64_t cnt_missmore = 0;

  std::uint64_t total() const { return cnt_all + cnt_miss1 + cnt_missmore; }
  double pct(std::uint64_t c) const { return total() == 0 ? 0.0 : 100.0 * static_cast<double>(c) / total(); }

  friend bool operator==(const ReportRow&, const ReportRow&) = default;
};

struct Report {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<ReportRow> rows;

  const std::string* meta(std::string_view key) const {
    for (const auto& [k, v] : metadata)
      if (k == key) return &v;
    return nullptr;
  }

  friend bool operator==(const Report&, const Report&) = default;
};

// ---------------------------------------------------------------------------
// Parallel trials

/// Worker count: MPRECON_THREADS if set, else hardware concurrency.
inline std::size_t worker_count() {
  std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("MPRECON_THREADS")) {
    char* end = nullptr;
    const unsigned long v = std::strtoul(env, &end, 10);
    if (end != env && v > 0) hw = std::min<std::size_t>(hw, v);
  }
  return hw;
}

/// Runs body(i) for i in [0, count) across workers; results are written by
/// index so the outcome does not depend on scheduling.
template <class Body>
void parallel_for(std::size_t count, Body body) {
  const std::size_t workers = std::min(worker_count(), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            std::lock_guard lock(failure_mu);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

// ---------------------------------------------------------------------------
// Trials

namespace detail {

inline bool singleton_workload(const ExperimentConfig& cfg) {
  if (cfg.workload != Workload::automatic) return cfg.workload == Workload::singleton;
  return cfg.command == Command::gossip || cfg.command == Command::relay || cfg.command == Command::tree;
}

/// Difference bound t used by "auto" and "<x>t" cell expressions.
inline std::size_t difference_bound(const ExperimentConfig& cfg, std::size_t n) {
  return singleton_workload(cfg) ? std::max<std::size_t>(n, 1) : std::max<std::size_t>(cfg.diff, 1);
}

inline std::uint32_t subtable_for(const ExperimentConfig& cfg, std::size_t n, bool growable) {
  const std::size_t t = difference_bound(cfg, n);
  std::size_t cells = 0;
  switch (cfg.cells.kind) {
    case CellsExpr::Kind::automatic:
      if (singleton_workload(cfg)) {
        cells = 2 * t;
      } else {
        return subtable_size_for(t, cfg.k, cfg.epsilon, growable);
      }
      break;
    case CellsExpr::Kind::absolute: cells = static_cast<std::size_t>(std::ceil(cfg.cells.value)); break;
    case CellsExpr::Kind::per_n: cells = static_cast<std::size_t>(std::ceil(cfg.cells.value * n - 1e-9)); break;
    case CellsExpr::Kind::per_t: cells = static_cast<std::size_t>(std::ceil(cfg.cells.value * t - 1e-9)); break;
  }
  std::uint32_t sub = subtable_size_for_cells(cells, cfg.k);
  return growable ? std::bit_ceil(sub) : sub;
}

inline std::vector<KeySet> make_sets(const ExperimentConfig& cfg, std::size_t n, Rng& rng) {
  return singleton_workload(cfg) ? singleton_sets(n, rng) : random_sets(n, cfg.set_size, cfg.diff, rng);
}

struct TrialContext {
  const ExperimentConfig& cfg;
  const FieldParams& field;
  std::size_t n;
  std::size_t rounds;
  double edge_prob;
  const Graph* fixed_graph;
};

inline SimStats run_two_party_trial(const TrialContext& ctx, std::uint64_t trial_seed) {
  const auto& cfg = ctx.cfg;
  Rng rng(derive_seed(trial_seed, 3));
  const auto sets = random_sets(2, cfg.set_size, cfg.diff, rng);
  const bool growable = cfg.retry == RetryPolicy::doubling;
  HashConfig hc{cfg.k, subtable_for(cfg, 2, growable), derive_seed(trial_seed, 4), derive_seed(trial_seed, 5), cfg.q};
  const KeySet all = union_of(sets);

  SimStats stats;
  stats.rounds = 1;
  for (std::size_t me = 0; me < 2; ++me) {
    const KeySet& own = sets[me];
    const KeySet& peer = sets[1 - me];
    Sketch peer_sketch = build_sketch(peer, ctx.field, hc);
    stats.messages += 1;
    stats.bits += packed_bits(peer_sketch);
    ReconOutcome rec = difference_two(own, peer_sketch);
    for (std::size_t d = 0; d < cfg.max_doublings && growable && !rec.complete; ++d) {
      // Peer builds the doubled table and ships only its odd cells.
      const HashConfig bigger = doubled(peer_sketch.hash_config());
      const OddHalf half = odd_half(build_sketch(peer, ctx.field, bigger));
      stats.messages += 1;
      stats.bits += packed_bits(ctx.field, bigger, 0) / 2;
      ++stats.rounds;
      peer_sketch = refine_halves(peer_sketch, half);
      rec = difference_two(own, peer_sketch);
    }
    PartyResult r;
    r.complete = rec.complete;
    for (std::uint64_t x : all) r.missing += !contains(rec.union_of_local, x);
    for (std::uint64_t x : rec.union_of_local) r.spurious += !contains(all, x);
    if (r.missing > 0) {
      r.outcome = r.missing == 1 ? Outcome::missing_one : Outcome::missing_many;
      r.cause = rec.complete ? FailureCause::checksum_false_positive : FailureCause::peel_failure;
    }
    stats.parties.push_back(r);
  }
  return stats;
}

inline SimStats run_trial(const TrialContext& ctx, std::uint64_t trial_seed) {
  const auto& cfg = ctx.cfg;
  if (cfg.command == Command::two) return run_two_party_trial(ctx, trial_seed);

  Rng topo_rng(derive_seed(trial_seed, 1));
  Rng set_rng(derive_seed(trial_seed, 3));
  SimConfig sim{ctx.field,
                HashConfig{cfg.k, subtable_for(cfg, ctx.n, false), derive_seed(trial_seed, 4), derive_seed(trial_seed, 5),
                           cfg.q},
                0, false};
  switch (cfg.command) {
    case Command::gossip: {
      const Graph g = ctx.fixed_graph ? *ctx.fixed_graph : gen_gnp(ctx.n, ctx.edge_prob, derive_seed(trial_seed, 1));
      const auto sets = make_sets(cfg, g.party_vertex.size(), set_rng);
      return run_gossip(g, sets, ctx.rounds, sim, derive_seed(trial_seed, 2));
    }
    case Command::tree: {
      const RootedTree t = ctx.fixed_graph ? tree_from_graph(*ctx.fixed_graph, 0) : random_tree(ctx.n, topo_rng);
      const auto sets = make_sets(cfg, t.party_leaf.size(), set_rng);
      return run_tree(t, sets, sim);
    }
    case Command::relay: return run_relay(make_sets(cfg, ctx.n, set_rng), cfg.relay_mode, sim);
    case Command::nparty: return run_relay(make_sets(cfg, ctx.n, set_rng), RelayMode::wireless, sim);
    case Command::pairwise: return run_pairwise_baseline(make_sets(cfg, ctx.n, set_rng), sim, cfg.epsilon);
    default: break;
  }
  raise(Errc::invalid_argument, "command has no trial runner");
}

inline std::string fmt_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

inline std::string join(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

inline void echo_config(const ExperimentConfig& cfg, Report& r) {
  auto put = [&](std::string k, std::string v) { r.metadata.emplace_back(std::move(k), std::move(v)); };
  put("version", std::string(kVersion));
  put("command", std::string(to_string(cfg.command)));
  put("p", std::to_string(cfg.p));
  put("q", std::to_string(cfg.q));
  put("k", std::to_string(cfg.k));
  put("cells", cfg.cells.str());
  put("epsilon", fmt_double(cfg.epsilon));
  put("n", join(cfg.n));
  put("trials", std::to_string(cfg.trials));
  put("seed", std::to_string(cfg.seed));
  put("rounds", cfg.rounds ? std::to_string(*cfg.rounds) : "auto");
  put("edge_prob", cfg.edge_prob ? fmt_double(*cfg.edge_prob) : "auto");
  put("retry", cfg.retry == RetryPolicy::doubling ? "double" : "none");
  put("workload", singleton_workload(cfg) ? "singleton" : "random");
  put("set_size", std::to_string(cfg.set_size));
  put("diff", std::to_string(cfg.diff));
  put("relay_mode", cfg.relay_mode == RelayMode::wired ? "wired" : "wireless");
  put("topology", cfg.topology.value_or("generated"));
  put("calibration_target", fmt_double(cfg.calibration_target));
  put("calibration_trials", std::to_string(cfg.calibration_trials));
  put("max_doublings", std::to_string(cfg.max_doublings));
  put("graph_resampling", "per_trial");
  put("trial_seed", "derive_seed(derive_seed(seed, n), trial)");
}

}  // namespace detail

inline void validate(const ExperimentConfig& cfg) {
  FieldParams f(cfg.p, cfg.q);
  threshold_coefficient(cfg.k);
  if (cfg.trials < 1) raise(Errc::invalid_argument, "trials must be at least 1");
  if (cfg.n.empty()) raise(Errc::invalid_argument, "need at least one n");
  if (cfg.edge_prob && !(*cfg.edge_prob > 0 && *cfg.edge_prob <= 1)) {
    raise(Errc::invalid_argument, "edge probability must lie in (0, 1]");
  }
}

inline Report run_experiment(const ExperimentConfig& cfg) {
  validate(cfg);
  const FieldParams field(cfg.p, cfg.q);
  Report report;
  detail::echo_config(cfg, report);

  std::optional<Graph> fixed_graph;
  if (cfg.topology) fixed_graph = read_topology_file(*cfg.topology);

  std::vector<std::size_t> ns = cfg.n;
  if (cfg.command == Command::two) ns = {2};
  for (std::size_t n : ns) {
    if (fixed_graph) n = fixed_graph->vertex_count();
    const std::string tag = "row." + std::to_string(n) + ".";
    const std::uint64_t row_seed = derive_seed(cfg.seed, n);
    const double edge_prob = cfg.edge_prob.value_or(default_edge_prob(n));
    std::size_t rounds = cfg.rounds.value_or(0);
    if (cfg.command == Command::calibrate || (cfg.command == Command::gossip && !cfg.rounds)) {
      const std::uint64_t cal_seed = derive_seed(row_seed, 0xCA11B);
      rounds = fixed_graph ? calibrate_rounds(*fixed_graph, cfg.calibration_target, cfg.calibration_trials, cal_seed)
                           : calibrate_rounds_gnp(n, edge_prob, cfg.calibration_target, cfg.calibration_trials, cal_seed);
    }
    report.metadata.emplace_back(tag + "rounds", std::to_string(rounds));
    if (cfg.command == Command::gossip || cfg.command == Command::calibrate) {
      report.metadata.emplace_back(tag + "edge_prob", detail::fmt_double(edge_prob));
    }
    if (cfg.command == Command::calibrate) continue;

    const detail::TrialContext ctx{cfg, field, n, rounds, edge_prob, fixed_graph ? &*fixed_graph : nullptr};
    std::vector<SimStats> results(cfg.trials);
    parallel_for(cfg.trials, [&](std::size_t t) { results[t] = detail::run_trial(ctx, derive_seed(row_seed, t)); });

    ReportRow row{n, 0, 0, 0};
    std::uint64_t messages = 0, bits = 0, spurious = 0, incomplete = 0;
    std::map<FailureCause, std::uint64_t> causes;
    for (const auto& s : results) {
      messages += s.messages;
      bits += s.bits;
      row.cnt_all += s.count(Outcome::all_recovered);
      row.cnt_miss1 += s.count(Outcome::missing_one);
      row.cnt_missmore += s.count(Outcome::missing_many);
      for (const auto& pr : s.parties) {
        if (pr.cause) ++causes[*pr.cause];
        spurious += pr.spurious > 0;
        incomplete += pr.has_set && !pr.complete;
      }
    }
    report.rows.push_back(row);
    report.metadata.emplace_back(tag + "messages", std::to_string(messages));
    report.metadata.emplace_back(tag + "bits", std::to_string(bits));
    report.metadata.emplace_back(tag + "parties_incomplete_peel", std::to_string(incomplete));
    report.metadata.emplace_back(tag + "parties_with_spurious_keys", std::to_string(spurious));
    for (FailureCause c : {FailureCause::insufficient_spread, FailureCause::zeroed_coefficient,
                           FailureCause::nonempty_excluded_set, FailureCause::peel_failure,
                           FailureCause::checksum_false_positive}) {
      report.metadata.emplace_back(tag + "cause." + std::string(to_string(c)), std::to_string(causes[c]));
    }
  }
  return report;
}

// ---------------------------------------------------------------------------
// Output

inline constexpr std::string_view kCsvHeader = "n,pct_all,pct_miss1,pct_missmore,cnt_all,cnt_miss1,cnt_missmore";

inline std::string pct2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string emit_report(const Report& r, std::string_view format) {
  if (format == "csv") {
    std::string out;
    for (const auto& [k, v] : r.metadata) out += "# " + k + "=" + v + "\n";
    out += kCsvHeader;
    out += '\n';
    for (const auto& row : r.rows) {
      out += std::to_string(row.n) + "," + pct2(row.pct(row.cnt_all)) + "," + pct2(row.pct(row.cnt_miss1)) + "," +
             pct2(row.pct(row.cnt_missmore)) + "," + std::to_string(row.cnt_all) + "," +
             std::to_string(row.cnt_miss1) + "," + std::to_string(row.cnt_missmore) + "\n";
    }
    return out;
  }
  if (format == "json") {
    nlohmann::ordered_json j;
    j["metadata"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : r.metadata) j["metadata"][k] = v;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : r.rows) {
      j["rows"].push_back({{"n", row.n},
                           {"pct_all", pct2(row.pct(row.cnt_all))},
                           {"pct_miss1", pct2(row.pct(row.cnt_miss1))},
                           {"pct_missmore", pct2(row.pct(row.cnt_missmore))},
                           {"cnt_all", row.cnt_all},
                           {"cnt_miss1", row.cnt_miss1},
                           {"cnt_missmore", row.cnt_missmore}});
    }
    return j.dump(2) + "\n";
  }
  raise(Errc::invalid_argument, "unknown report format '" + std::string(format) + "'");
}

inline Report parse_report_json(std::string_view text) {
  Report r;
  try {
    const auto j = nlohmann::ordered_json::parse(text);
    for (const auto& [k, v] : j.at("metadata").items()) r.metadata.emplace_back(k, v.get<std::string>());
    for (const auto& row : j.at("rows")) {
      r.rows.push_back(ReportRow{row.at("n").get<std::size_t>(), row.at("cnt_all").get<std::uint64_t>(),
                                 row.at("cnt_miss1").get<std::uint64_t>(), row.at("cnt_missmore").get<std::uint64_t>()});
    }
  } catch (const nlohmann::json::exception& e) {
    raise(Errc::invalid_argument, std::string("bad report json: ") + e.what());
  }
  return r;
}

/// Writes via a temporary file and rename so readers never see a partial report.
inline void write_file_atomically(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) raise(Errc::io_error, "cannot open " + tmp);
    out << content;
    if (!out.flush()) raise(Errc::io_error, "write failed for " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) raise(Errc::io_error, "cannot move report into place: " + ec.message());
}

}  // namespace mprecon
