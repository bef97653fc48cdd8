// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "abps/metrics.hpp"
#include "abps/training.hpp"

namespace abps::csv {

/// Shortest decimal form that parses back to the same bits.
std::string format_double(double v);
double parse_double(std::string_view s);
std::uint64_t parse_u64(std::string_view s);
int parse_int(std::string_view s);

/// Whole-file write via a temp file and rename, so readers never observe a
/// partial file and failures leave nothing behind.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
std::string read_file(const std::filesystem::path& path);

std::string eval_to_csv(const std::vector<training::EvalRow>& rows);
std::vector<training::EvalRow> eval_from_csv(std::string_view text);

std::string selections_to_csv(const std::vector<training::SelectionEvent>& rows);
std::vector<training::SelectionEvent> selections_from_csv(std::string_view text);

std::string events_to_csv(const std::vector<training::PbtEvent>& rows);
std::vector<training::PbtEvent> events_from_csv(std::string_view text);

std::string metrics_to_csv(const std::vector<metrics::EpochMetrics>& rows);
std::vector<metrics::EpochMetrics> metrics_from_csv(std::string_view text);

/// Writes eval.csv, selections.csv, and events.csv into dir (created if
/// missing), each atomically.
void write_log(const training::TrainingLog& log, const std::filesystem::path& dir);

}  // namespace abps::csv
