#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "diffar/estimators.hpp"
#include "diffar/experiments.hpp"
#include "diffar/series.hpp"

namespace diffar::io {

// Shortest decimal form that round-trips to the same double.
[[nodiscard]] std::string format_double(double value);

// Reads a series from delimited text: one value per line, or one row per
// line with `column` selecting a named column from a header row. Blank lines
// and lines starting with '#' are skipped. Delimiters are any mix of commas,
// semicolons, tabs and spaces. Throws ParseError (with a 1-based line number)
// on malformed input, unknown columns, or fewer than 2 values.
[[nodiscard]] Series read_series(const std::filesystem::path& path,
                                 const std::optional<std::string>& column = std::nullopt);
[[nodiscard]] Series read_series_stream(std::istream& in, const std::optional<std::string>& column,
                                        const std::string& name);

// Writes one value per line in round-trip form, preceded by '#' comment
// lines.
void write_series(const std::filesystem::path& path, std::span<const double> values,
                  std::span<const std::string> comments);

[[nodiscard]] std::string report_to_json(const EstimationReport& report);

// Writes replications.tsv, summary.tsv and manifest.json under out_dir
// (created if needed). File contents are byte-deterministic functions of the
// result and spec; runtime is never written.
void write_experiment_outputs(const std::filesystem::path& out_dir, const experiments::AggregateResult& result,
                              const experiments::ScenarioSpec& spec);

}  // namespace diffar::io
