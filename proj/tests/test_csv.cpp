// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "abps/csv.hpp"
#include "abps/error.hpp"

using namespace abps;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / "abps_csv_test") {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("doubles survive a format/parse round trip bit-exactly") {
  const double values[] = {0.0,   -0.0,  1.0,    1.0 / 3.0, 0.1,  -2.5e-9,
                           1e300, 1e-300, 3.25,  123456.789, -0.7, 5e-3};
  for (double v : values) {
    const auto s = csv::format_double(v);
    const double back = csv::parse_double(s);
    CHECK(std::signbit(back) == std::signbit(v));
    CHECK(back == v);
  }
  CHECK_THROWS_AS(csv::parse_double("abc"), Error);
  CHECK_THROWS_AS(csv::parse_double("1.5x"), Error);
  CHECK_THROWS_AS(csv::parse_u64("-3"), Error);
  CHECK_THROWS_AS(csv::parse_int("4.5"), Error);
}

TEST_CASE("eval rows round-trip through csv text") {
  std::vector<training::EvalRow> rows{{0, 0, 0, 1.0 / 3.0},
                                      {1, 2000, 1, -0.125},
                                      {2, 4000, 7, 0.9999999999999999}};
  const auto text = csv::eval_to_csv(rows);
  const auto back = csv::eval_from_csv(text);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].epoch == rows[i].epoch);
    CHECK(back[i].env_steps == rows[i].env_steps);
    CHECK(back[i].agent_id == rows[i].agent_id);
    CHECK(back[i].mean_return == rows[i].mean_return);
  }
  CHECK(csv::eval_to_csv(back) == text);
}

TEST_CASE("selection and pbt event rows round-trip") {
  std::vector<training::SelectionEvent> sels{{5, 2, 0.25}, {6, 0, -1.5}};
  const auto sel_text = csv::selections_to_csv(sels);
  const auto sels_back = csv::selections_from_csv(sel_text);
  REQUIRE(sels_back.size() == 2);
  CHECK(sels_back[1].round == 6);
  CHECK(sels_back[1].arm == 0);
  CHECK(sels_back[1].period_reward == -1.5);

  std::vector<training::PbtEvent> events{
      {12, 3, "exploit", 1, 1e-3, 2e-3, 100000, 100000},
      {12, 3, "explore", -1, 2e-3, 1.6e-3, 100000, 250000},
      {12, 0, "stale-eval", -1, 5e-4, 5e-4, 300000, 300000}};
  const auto ev_text = csv::events_to_csv(events);
  const auto ev_back = csv::events_from_csv(ev_text);
  REQUIRE(ev_back.size() == 3);
  for (std::size_t i = 0; i < events.size(); ++i) {
    CHECK(ev_back[i].round == events[i].round);
    CHECK(ev_back[i].agent_id == events[i].agent_id);
    CHECK(ev_back[i].action == events[i].action);
    CHECK(ev_back[i].src_agent == events[i].src_agent);
    CHECK(ev_back[i].old_learning_rate == events[i].old_learning_rate);
    CHECK(ev_back[i].new_learning_rate == events[i].new_learning_rate);
    CHECK(ev_back[i].old_epsilon_decay_steps == events[i].old_epsilon_decay_steps);
    CHECK(ev_back[i].new_epsilon_decay_steps == events[i].new_epsilon_decay_steps);
  }
}

TEST_CASE("metrics rows round-trip to full precision") {
  std::vector<metrics::EpochMetrics> rows(2);
  rows[0] = {0, 0, 1.0 / 7.0, 0.125, 0.001953125, 0.1};
  rows[1] = {3, 6000, 0.75, 0.7, 1e-17, 0.6999999999999};
  const auto text = csv::metrics_to_csv(rows);
  const auto back = csv::metrics_from_csv(text);
  REQUIRE(back.size() == 2);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(back[i].epoch == rows[i].epoch);
    CHECK(back[i].env_steps == rows[i].env_steps);
    CHECK(back[i].best == rows[i].best);
    CHECK(back[i].top25_quantile == rows[i].top25_quantile);
    CHECK(back[i].variance == rows[i].variance);
    CHECK(back[i].median == rows[i].median);
  }
}

TEST_CASE("malformed csv input is rejected") {
  CHECK_THROWS_AS(csv::eval_from_csv("wrong,header\n1,2,3,4\n"), Error);
  CHECK_THROWS_AS(csv::eval_from_csv("epoch,env_steps,agent_id,mean_return\n1,2,3\n"), Error);
  CHECK_THROWS_AS(csv::eval_from_csv(""), Error);
  CHECK_THROWS_AS(
      csv::eval_from_csv("epoch,env_steps,agent_id,mean_return\n1,2,3,not_a_number\n"), Error);
}

TEST_CASE("atomic writes land complete and leave no temp files") {
  TempDir tmp;
  const auto target = tmp.path / "out.csv";
  csv::write_file_atomic(target, "hello\nworld\n");
  CHECK(csv::read_file(target) == "hello\nworld\n");
  CHECK(!fs::exists(tmp.path / "out.csv.tmp"));

  csv::write_file_atomic(target, "second");
  CHECK(csv::read_file(target) == "second");
}

TEST_CASE("write_log emits the three run files, byte-stable across calls") {
  TempDir tmp;
  training::TrainingLog log;
  log.eval_rows = {{0, 0, 0, 0.5}, {0, 0, 1, 0.25}};
  log.selections = {{3, 1, 0.75}};
  log.events = {{4, 1, "exploit", 0, 1e-3, 2e-3, 1000, 1000}};

  csv::write_log(log, tmp.path);
  const auto eval_a = csv::read_file(tmp.path / "eval.csv");
  const auto sel_a = csv::read_file(tmp.path / "selections.csv");
  const auto ev_a = csv::read_file(tmp.path / "events.csv");
  csv::write_log(log, tmp.path);
  CHECK(csv::read_file(tmp.path / "eval.csv") == eval_a);
  CHECK(csv::read_file(tmp.path / "selections.csv") == sel_a);
  CHECK(csv::read_file(tmp.path / "events.csv") == ev_a);

  // Empty tables still carry their headers.
  training::TrainingLog empty;
  csv::write_log(empty, tmp.path);
  CHECK(csv::read_file(tmp.path / "selections.csv") == "round,arm,period_reward\n");
  CHECK(csv::eval_from_csv(csv::read_file(tmp.path / "eval.csv")).empty());
}
