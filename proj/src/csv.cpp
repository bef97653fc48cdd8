// SPDX-License-Identifier: Apache-2.0
#include "abps/csv.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <system_error>

#include "abps/error.hpp"

namespace abps::csv {

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  require(res.ec == std::errc(), "format_double: conversion failed");
  return std::string(buf, res.ptr);
}

double parse_double(std::string_view s) {
  double vals = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), vals);
  require(res.ec == std::errc() && res.ptr == s.data() + s.size(),
          "parse_double: bad number '", std::string(s), "'");
  return vals;
}

std::uint64_t parse_u64(std::string_view s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  require(res.ec == std::errc() && res.ptr == s.data() + s.size(),
          "parse_u64: bad number '", std::string(s), "'");
  return v;
}

int parse_int(std::string_view s) {
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  require(res.ec == std::errc() && res.ptr == s.data() + s.size(),
          "parse_int: bad number '", std::string(s), "'");
  return v;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = std::filesystem::path(path.string() + ".tmp");
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    require(os.good(), "write_file_atomic: cannot open ", tmp.string());
    os.write(content.data(), static_cast<std::streamsize>(content.size()));
    os.flush();
    require(os.good(), "write_file_atomic: write failed for ", tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  require(!ec, "write_file_atomic: rename to ", path.string(), " failed: ", ec.message());
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  require(is.good(), "read_file: cannot open ", path.string());
  std::ostringstream os;
  os << is.rdbuf();
  require(!is.bad(), "read_file: read failed for ", path.string());
  return os.str();
}

namespace {

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

/// Yields data lines after checking the header; tolerates one trailing
/// newline, nothing else.
std::vector<std::vector<std::string_view>> parse_table(std::string_view text,
                                                       std::string_view header,
                                                       std::size_t columns) {
  std::vector<std::vector<std::string_view>> rows;
  std::size_t start = 0;
  bool first = true;
  while (start < text.size()) {
    auto pos = text.find('\n', start);
    if (pos == std::string_view::npos) pos = text.size();
    const auto line = text.substr(start, pos - start);
    start = pos + 1;
    if (first) {
      require(line == header, "csv: bad header '", std::string(line), "', expected '",
              std::string(header), "'");
      first = false;
      continue;
    }
    if (line.empty()) continue;
    auto fields = split(line, ',');
    require(fields.size() == columns, "csv: expected ", columns, " fields, got ",
            fields.size(), " in '", std::string(line), "'");
    rows.push_back(std::move(fields));
  }
  require(!first, "csv: empty input");
  return rows;
}

}  // namespace

static const char* kEvalHeader = "epoch,env_steps,agent_id,mean_return";

std::string eval_to_csv(const std::vector<training::EvalRow>& rows) {
  std::string out = kEvalHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.epoch);
    out += ',';
    out += std::to_string(r.env_steps);
    out += ',';
    out += std::to_string(r.agent_id);
    out += ',';
    out += format_double(r.mean_return);
    out += '\n';
  }
  return out;
}

std::vector<training::EvalRow> eval_from_csv(std::string_view text) {
  std::vector<training::EvalRow> rows;
  for (const auto& f : parse_table(text, kEvalHeader, 4)) {
    rows.push_back({parse_u64(f[0]), parse_u64(f[1]), parse_int(f[2]), parse_double(f[3])});
  }
  return rows;
}

static const char* kSelectionsHeader = "round,arm,period_reward";

std::string selections_to_csv(const std::vector<training::SelectionEvent>& rows) {
  std::string out = kSelectionsHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.round);
    out += ',';
    out += std::to_string(r.arm);
    out += ',';
    out += format_double(r.period_reward);
    out += '\n';
  }
  return out;
}

std::vector<training::SelectionEvent> selections_from_csv(std::string_view text) {
  std::vector<training::SelectionEvent> rows;
  for (const auto& f : parse_table(text, kSelectionsHeader, 3)) {
    rows.push_back({parse_u64(f[0]), parse_u64(f[1]), parse_double(f[2])});
  }
  return rows;
}

static const char* kEventsHeader =
    "round,agent_id,action,src_agent,old_learning_rate,new_learning_rate,"
    "old_epsilon_decay_steps,new_epsilon_decay_steps";

std::string events_to_csv(const std::vector<training::PbtEvent>& rows) {
  std::string out = kEventsHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.round);
    out += ',';
    out += std::to_string(r.agent_id);
    out += ',';
    out += r.action;
    out += ',';
    out += std::to_string(r.src_agent);
    out += ',';
    out += format_double(r.old_learning_rate);
    out += ',';
    out += format_double(r.new_learning_rate);
    out += ',';
    out += std::to_string(r.old_epsilon_decay_steps);
    out += ',';
    out += std::to_string(r.new_epsilon_decay_steps);
    out += '\n';
  }
  return out;
}

std::vector<training::PbtEvent> events_from_csv(std::string_view text) {
  std::vector<training::PbtEvent> rows;
  for (const auto& f : parse_table(text, kEventsHeader, 8)) {
    rows.push_back({parse_u64(f[0]), parse_int(f[1]), std::string(f[2]), parse_int(f[3]),
                    parse_double(f[4]), parse_double(f[5]), parse_u64(f[6]), parse_u64(f[7])});
  }
  return rows;
}

static const char* kMetricsHeader = "epoch,env_steps,best,top25_quantile,variance,median";

std::string metrics_to_csv(const std::vector<metrics::EpochMetrics>& rows) {
  std::string out = kMetricsHeader;
  out += '\n';
  for (const auto& r : rows) {
    out += std::to_string(r.epoch);
    out += ',';
    out += std::to_string(r.env_steps);
    out += ',';
    out += format_double(r.best);
    out += ',';
    out += format_double(r.top25_quantile);
    out += ',';
    out += format_double(r.variance);
    out += ',';
    out += format_double(r.median);
    out += '\n';
  }
  return out;
}

std::vector<metrics::EpochMetrics> metrics_from_csv(std::string_view text) {
  std::vector<metrics::EpochMetrics> rows;
  for (const auto& f : parse_table(text, kMetricsHeader, 6)) {
    metrics::EpochMetrics m;
    m.epoch = parse_u64(f[0]);
    m.env_steps = parse_u64(f[1]);
    m.best = parse_double(f[2]);
    m.top25_quantile = parse_double(f[3]);
    m.variance = parse_double(f[4]);
    m.median = parse_double(f[5]);
    rows.push_back(m);
  }
  return rows;
}

void write_log(const training::TrainingLog& log, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "eval.csv", eval_to_csv(log.eval_rows));
  write_file_atomic(dir / "selections.csv", selections_to_csv(log.selections));
  write_file_atomic(dir / "events.csv", events_to_csv(log.events));
}

}  // namespace abps::csv
