#include "proxmse/io.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace proxmse {
namespace {

std::string cell_text(const nlohmann::json& cell) {
  if (cell.is_null()) return "";
  if (cell.is_string()) return cell.get<std::string>();
  if (cell.is_number_float()) return format_number(cell.get<double>());
  return cell.dump();
}

double parse_double(const std::string& s) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad number '" + s + "' in grid");
  }
  if (pos != s.size() || !std::isfinite(v)) throw std::invalid_argument("bad number '" + s + "' in grid");
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) parts.push_back(item);
  return parts;
}

}  // namespace

std::vector<double> parse_real_grid(const std::string& text) {
  if (text.empty()) throw std::invalid_argument("empty grid");
  const auto ranged = split(text, ':');
  std::vector<double> grid;
  if (ranged.size() == 3) {
    const double start = parse_double(ranged[0]);
    const double step = parse_double(ranged[1]);
    const double stop = parse_double(ranged[2]);
    if (!(step > 0.0) || stop < start) throw std::invalid_argument("grid needs step > 0 and stop >= start");
    const double count = std::floor((stop - start) / step + 1e-9);
    if (count > 1e7) throw std::invalid_argument("grid too large");
    for (long long i = 0; i <= static_cast<long long>(count); ++i) grid.push_back(start + static_cast<double>(i) * step);
    return grid;
  }
  if (ranged.size() != 1) throw std::invalid_argument("malformed grid '" + text + "'");
  for (const auto& item : split(text, ',')) grid.push_back(parse_double(item));
  if (grid.empty()) throw std::invalid_argument("empty grid");
  return grid;
}

std::vector<std::size_t> parse_count_grid(const std::string& text) {
  std::vector<std::size_t> out;
  for (double v : parse_real_grid(text)) {
    if (v < 1.0 || v != std::floor(v)) throw std::invalid_argument("count grid needs positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string to_csv(const ResultTable& table, const nlohmann::json& config) {
  std::ostringstream out;
  out << "# config: " << config.dump() << '\n';
  for (std::size_t c = 0; c < table.columns.size(); ++c) out << (c ? "," : "") << table.columns[c];
  out << '\n';
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) out << (c ? "," : "") << cell_text(row[c]);
    out << '\n';
  }
  return out.str();
}

std::string to_json_text(const ResultTable& table, const nlohmann::json& config) {
  nlohmann::ordered_json doc;
  doc["config"] = config;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : table.rows) {
    nlohmann::ordered_json obj;
    for (std::size_t c = 0; c < row.size(); ++c) obj[table.columns[c]] = row[c];
    doc["rows"].push_back(std::move(obj));
  }
  return doc.dump(2) + "\n";
}

ResultTable msd_table(const std::string& structure, const std::vector<MsdEstimate>& estimates) {
  ResultTable t{{"structure", "lambda", "mean", "stderr", "samples"}, {}};
  for (const auto& e : estimates) {
    t.rows.push_back({structure, e.lambda ? nlohmann::json(*e.lambda) : nlohmann::json("cone"), e.mean,
                      e.std_error, e.samples});
  }
  return t;
}

ResultTable denoise_table(const DenoiseRun& run) {
  ResultTable t{{"structure", "estimator", "lambda", "sigma", "nmse_mean", "nmse_stderr", "trials", "d_reference"},
                {}};
  const std::string structure = label(run.recipe);
  for (const auto& r : run.records) {
    t.rows.push_back({structure, estimator_name(run.estimator),
                      run.estimator == Estimator::kConstrained ? nlohmann::json(nullptr) : nlohmann::json(run.lambda),
                      r.sigma, r.nmse_mean, r.nmse_stderr, r.trials, r.d_reference});
  }
  return t;
}

ResultTable lasso_table(const std::string& structure, MatrixKind kind, const std::vector<LassoSweepRecord>& records) {
  ResultTable t{{"structure", "matrix_kind", "m", "eta_mean", "eta_stderr", "f_mean", "f_stderr", "e_mean",
                 "e_stderr", "predicted_eta", "trials", "excluded_trials"},
                {}};
  for (const auto& r : records) {
    t.rows.push_back({structure, matrix_kind_name(kind), r.m, r.eta_mean, r.eta_stderr, r.f_mean, r.f_stderr,
                      r.e_mean, r.e_stderr, r.predicted_eta, r.trials, r.excluded_trials});
  }
  return t;
}

}  // namespace proxmse
