// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include <json.hpp>

#include "iscap/algorithm.hpp"

namespace iscap {

/// Number formatting shared by every CSV writer: 12 significant digits.
std::string format_number(double v);

nlohmann::json run_record_to_json(const RunRecord& rec);

/// Writes one JSON document per run. Throws IoError with the path on failure.
void write_run_record(const RunRecord& rec, const std::string& path);

/// One-line CSV summary of a run. Column names containing "time" hold
/// wall-clock values.
std::string run_summary_csv_header();
std::string run_summary_csv_row(const RunRecord& rec);

}  // namespace iscap
