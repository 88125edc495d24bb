// mprecon: run reconciliation experiments and print Table-2 style reports.

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mprecon/experiment.hpp"

namespace {

template <class T>
std::optional<T> auto_or(const std::string& s, T (*parse)(const std::string&, std::size_t*)) {
  if (s == "auto") return std::nullopt;
  std::size_t used = 0;
  T v{};
  try {
    v = parse(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    mprecon::raise(mprecon::Errc::invalid_argument, "expected a number or 'auto', got '" + s + "'");
  }
  return v;
}

std::size_t parse_size(const std::string& s, std::size_t* used) { return std::stoull(s, used); }
double parse_double(const std::string& s, std::size_t* used) { return std::stod(s, used); }

}  // namespace

int main(int argc, char** argv) {
  using namespace mprecon;
  CLI::App app{"Multi-party set reconciliation with prime-field IBLTs"};
  app.set_version_flag("--version", std::string(kVersion));

  ExperimentConfig cfg;
  std::string command, cells = "auto", rounds = "auto", edge_prob = "auto", format = "csv", out, retry = "none",
                       workload = "auto";
  std::vector<std::size_t> ns;
  bool wireless = false;

  app.add_option("command", command, "two | nparty | relay | tree | gossip | pairwise | calibrate")->required();
  app.add_option("--p", cfg.p, "field prime")->capture_default_str();
  app.add_option("--q", cfg.q, "checksum range (power of two)")->capture_default_str();
  app.add_option("--k", cfg.k, "hash functions, 3..7")->capture_default_str();
  app.add_option("--cells", cells, "table size: auto, <m>, <x>n or <x>t")->capture_default_str();
  app.add_option("--epsilon", cfg.epsilon, "slack over the peeling threshold for auto sizing")->capture_default_str();
  app.add_option("--n", ns, "party counts (repeat or comma-separate)")->delimiter(',');
  app.add_option("--trials", cfg.trials)->capture_default_str();
  app.add_option("--seed", cfg.seed)->capture_default_str();
  app.add_option("--rounds", rounds, "gossip rounds or 'auto'")->capture_default_str();
  app.add_option("--edge-prob", edge_prob, "G(n,p) edge probability or 'auto'")->capture_default_str();
  app.add_option("--format", format)->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  app.add_option("--out", out, "write report here instead of stdout");
  app.add_option("--retry", retry)->check(CLI::IsMember({"none", "double"}))->capture_default_str();
  app.add_option("--workload", workload)->check(CLI::IsMember({"auto", "singleton", "random"}))->capture_default_str();
  app.add_option("--set-size", cfg.set_size, "random workload: keys per party")->capture_default_str();
  app.add_option("--diff", cfg.diff, "random workload: |union - intersection|")->capture_default_str();
  app.add_flag("--wireless", wireless, "relay: broadcast the sum instead of per-party sums");
  app.add_option("--topology", cfg.topology, "edge-list file used instead of generated graphs");
  app.add_option("--calib-target", cfg.calibration_target)->capture_default_str();
  app.add_option("--calib-trials", cfg.calibration_trials)->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.command = parse_command(command);
    cfg.cells = CellsExpr::parse(cells);
    if (!ns.empty()) cfg.n = ns;
    cfg.rounds = auto_or<std::size_t>(rounds, parse_size);
    cfg.edge_prob = auto_or<double>(edge_prob, parse_double);
    cfg.retry = retry == "double" ? RetryPolicy::doubling : RetryPolicy::none;
    cfg.workload = workload == "singleton" ? Workload::singleton
                   : workload == "random"  ? Workload::random
                                           : Workload::automatic;
    cfg.relay_mode = wireless ? RelayMode::wireless : RelayMode::wired;

    const std::string text = emit_report(run_experiment(cfg), format);
    if (out.empty()) {
      std::cout << text;
    } else {
      write_file_atomically(out, text);
    }
  } catch (const Error& e) {
    std::cerr << "mprecon: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "mprecon: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
