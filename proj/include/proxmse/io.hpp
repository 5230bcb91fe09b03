#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "proxmse/denoise.hpp"
#include "proxmse/lasso.hpp"
#include "proxmse/stats.hpp"

namespace proxmse {

/// Column-labelled result rows. Cells are JSON scalars so the same table can be
/// written as CSV or as JSON.
struct ResultTable {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;
};

/// Grid syntax: "start:step:stop" (stop included when it lands on the grid),
/// a comma-separated list, or a single value. Throws std::invalid_argument.
std::vector<double> parse_real_grid(const std::string& text);
std::vector<std::size_t> parse_count_grid(const std::string& text);

/// Shortest "%.12g" rendering; CSV uses '.' decimals regardless of locale.
std::string format_number(double x);

/// CSV with a leading "# config: <json>" comment line, ',' separators, LF endings.
std::string to_csv(const ResultTable& table, const nlohmann::json& config);

/// {"config": ..., "rows": [ {column: value, ...}, ... ]}
std::string to_json_text(const ResultTable& table, const nlohmann::json& config);

ResultTable msd_table(const std::string& structure, const std::vector<MsdEstimate>& estimates);
ResultTable denoise_table(const DenoiseRun& run);
ResultTable lasso_table(const std::string& structure, MatrixKind kind, const std::vector<LassoSweepRecord>& records);

}  // namespace proxmse
