#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "mprecon/experiment.hpp"

using namespace mprecon;

namespace {

ExperimentConfig small(Command c) {
  ExperimentConfig cfg;
  cfg.command = c;
  cfg.n = {4, 7};
  cfg.trials = 12;
  cfg.seed = 77;
  cfg.rounds = 12;
  cfg.set_size = 60;
  cfg.diff = 10;
  cfg.cells = CellsExpr::parse("8n");
  return cfg;
}

Errc error_of(const ExperimentConfig& cfg) {
  try {
    run_experiment(cfg);
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::io_error;
}

}  // namespace

TEST(Config, RejectsCompositeAndUnsupportedK) {
  ExperimentConfig cfg = small(Command::gossip);
  cfg.p = 1000000006;
  EXPECT_EQ(error_of(cfg), Errc::composite_p);
  cfg = small(Command::gossip);
  cfg.k = 8;
  EXPECT_EQ(error_of(cfg), Errc::unsupported_k);
  cfg = small(Command::gossip);
  cfg.trials = 0;
  EXPECT_EQ(error_of(cfg), Errc::invalid_argument);
}

TEST(Config, CellsExpressions) {
  EXPECT_EQ(CellsExpr::parse("auto").kind, CellsExpr::Kind::automatic);
  const CellsExpr abs = CellsExpr::parse("4096");
  EXPECT_EQ(abs.kind, CellsExpr::Kind::absolute);
  EXPECT_EQ(abs.value, 4096);
  const CellsExpr n2 = CellsExpr::parse("2n");
  EXPECT_EQ(n2.kind, CellsExpr::Kind::per_n);
  EXPECT_EQ(n2.value, 2);
  const CellsExpr t13 = CellsExpr::parse("1.3t");
  EXPECT_EQ(t13.kind, CellsExpr::Kind::per_t);
  EXPECT_DOUBLE_EQ(t13.value, 1.3);
  EXPECT_EQ(t13.str(), "1.3t");
  for (const char* bad : {"x", "2q", "-1n", "0", "1.5.5t"}) EXPECT_THROW(CellsExpr::parse(bad), Error) << bad;
}

TEST(Config, TwoNCellsMeansTwoNRoundedToSubtables) {
  ExperimentConfig cfg = small(Command::gossip);
  cfg.cells = CellsExpr::parse("2n");
  EXPECT_EQ(detail::subtable_for(cfg, 10, false), 5u);  // 20 cells over k = 4
  EXPECT_EQ(detail::subtable_for(cfg, 11, false), 6u);  // 22 rounds up to 24
}

TEST(Experiment, SameConfigSameBytes) {
  for (Command c : {Command::gossip, Command::relay, Command::tree, Command::pairwise, Command::nparty, Command::two}) {
    const ExperimentConfig cfg = small(c);
    EXPECT_EQ(emit_report(run_experiment(cfg), "csv"), emit_report(run_experiment(cfg), "csv")) << to_string(c);
  }
}

TEST(Experiment, ThreadCountDoesNotChangeResults) {
  const ExperimentConfig cfg = small(Command::gossip);
  ::setenv("MPRECON_THREADS", "1", 1);
  const std::string one = emit_report(run_experiment(cfg), "json");
  ::setenv("MPRECON_THREADS", "5", 1);
  const std::string five = emit_report(run_experiment(cfg), "json");
  ::unsetenv("MPRECON_THREADS");
  EXPECT_EQ(one, five);
}

TEST(Experiment, SeedChangesResults) {
  ExperimentConfig a = small(Command::gossip);
  a.cells = CellsExpr::parse("2n");
  ExperimentConfig b = a;
  b.seed = 78;
  EXPECT_NE(emit_report(run_experiment(a), "csv"), emit_report(run_experiment(b), "csv"));
}

TEST(Experiment, CountsSumToPartiesTimesTrials) {
  for (Command c : {Command::gossip, Command::relay, Command::tree, Command::pairwise, Command::nparty}) {
    const ExperimentConfig cfg = small(c);
    const Report r = run_experiment(cfg);
    ASSERT_EQ(r.rows.size(), cfg.n.size());
    for (const auto& row : r.rows) EXPECT_EQ(row.total(), row.n * cfg.trials) << to_string(c);
  }
  const Report two = run_experiment(small(Command::two));
  ASSERT_EQ(two.rows.size(), 1u);
  EXPECT_EQ(two.rows[0].total(), 2 * small(Command::two).trials);
}

TEST(Experiment, EchoesEveryParameter) {
  ExperimentConfig cfg = small(Command::gossip);
  cfg.edge_prob = 0.5;
  const Report r = run_experiment(cfg);
  for (const char* key : {"version", "command", "p", "q", "k", "cells", "epsilon", "n", "trials", "seed", "rounds",
                          "edge_prob", "retry", "workload", "set_size", "diff", "relay_mode", "topology",
                          "calibration_target", "calibration_trials", "max_doublings"}) {
    EXPECT_NE(r.meta(key), nullptr) << key;
  }
  EXPECT_EQ(*r.meta("seed"), "77");
  EXPECT_EQ(*r.meta("cells"), "8n");
  EXPECT_EQ(*r.meta("edge_prob"), "0.5");
  EXPECT_EQ(*r.meta("row.7.rounds"), "12");
}

TEST(Experiment, AutoRoundsAreCalibratedPerRow) {
  ExperimentConfig cfg = small(Command::gossip);
  cfg.rounds.reset();
  cfg.calibration_trials = 30;
  const Report r = run_experiment(cfg);
  EXPECT_EQ(*r.meta("rounds"), "auto");
  EXPECT_GT(std::stoul(*r.meta("row.4.rounds")), 0u);
  EXPECT_GT(std::stoul(*r.meta("row.7.rounds")), 0u);

  cfg.command = Command::calibrate;
  const Report cal = run_experiment(cfg);
  EXPECT_TRUE(cal.rows.empty());
  EXPECT_EQ(*cal.meta("row.7.rounds"), *r.meta("row.7.rounds"));
}

TEST(Experiment, DoublingRetryRescuesUndersizedTwoParty) {
  ExperimentConfig cfg = small(Command::two);
  cfg.trials = 40;
  cfg.diff = 60;
  cfg.cells = CellsExpr::parse("16");
  const Report none = run_experiment(cfg);
  cfg.retry = RetryPolicy::doubling;
  const Report dbl = run_experiment(cfg);
  EXPECT_LT(none.rows[0].cnt_all, none.rows[0].total() / 2);
  EXPECT_EQ(dbl.rows[0].cnt_all, dbl.rows[0].total());
}

TEST(Report, TableRowFormatting) {
  Report r;
  r.rows.push_back(ReportRow{1280, 1279999, 1, 0});
  const std::string csv = emit_report(r, "csv");
  EXPECT_EQ(csv, std::string(kCsvHeader) + "\n1280,100.00,0.00,0.00,1279999,1,0\n");
}

TEST(Report, EmptyReportIsHeaderAndMetadata) {
  Report r;
  r.metadata = {{"seed", "5"}, {"p", "7"}};
  EXPECT_EQ(emit_report(r, "csv"), "# seed=5\n# p=7\n" + std::string(kCsvHeader) + "\n");
  EXPECT_EQ(parse_report_json(emit_report(r, "json")), r);
}

TEST(Report, JsonRoundTrip) {
  const Report r = run_experiment(small(Command::relay));
  EXPECT_EQ(parse_report_json(emit_report(r, "json")), r);
  EXPECT_THROW(parse_report_json("{\"rows\": 3}"), Error);
  EXPECT_THROW(emit_report(r, "xml"), Error);
}

TEST(Report, AtomicWrite) {
  const auto dir = std::filesystem::temp_directory_path() / "mprecon_test_out";
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "r.csv").string();
  write_file_atomically(path, "a\n");
  write_file_atomically(path, "bb\n");
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  EXPECT_EQ(ss.str(), "bb\n");
  EXPECT_FALSE(std::filesystem::exists(path + ".tmp"));
  try {
    write_file_atomically((dir / "missing" / "r.csv").string(), "x");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::io_error);
  }
  std::filesystem::remove_all(dir);
}
