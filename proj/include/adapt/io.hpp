#pragma once

// File formats: dataset CSV, coefficient / model-bank / diagnostics JSON,
// drift configuration JSON and AUC-table CSV.

#include <nlohmann/json.hpp>

#include <charconv>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "adapt/drift.hpp"
#include "adapt/error.hpp"
#include "adapt/glm.hpp"
#include "adapt/metrics.hpp"
#include "adapt/solver.hpp"

namespace adapt {

using json = nlohmann::json;

// Shortest representation that round-trips exactly.
inline std::string format_double(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

inline double parse_double(std::string_view s, const std::string& where) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  double v = 0.0;
  const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw InvalidArgument("cannot parse number '" + std::string(s) + "' at " + where);
  return v;
}

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return out;
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

// ---------------------------------------------------------------- datasets

// Header `y,x1,...,xp` with an optional trailing `period` column.
inline std::string dataset_to_csv(const Dataset& d, bool with_period = false) {
  std::string s = "y";
  for (Index j = 0; j < d.dim(); ++j) s += ",x" + std::to_string(j + 1);
  if (with_period) s += ",period";
  s += '\n';
  for (Index i = 0; i < d.rows(); ++i) {
    s += format_double(d.outcomes[i]);
    for (Index j = 0; j < d.dim(); ++j) {
      s += ',';
      s += format_double(d.features(i, j));
    }
    if (with_period) s += "," + std::to_string(d.period.value_or(0));
    s += '\n';
  }
  return s;
}

inline Dataset dataset_from_csv(const std::string& text, const std::string& name = "dataset") {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument(name + ": empty file");
  const auto header = split_csv_line(line);
  if (header.empty() || header[0] != "y") throw InvalidArgument(name + ": first column must be 'y'");
  std::size_t p = 0;
  bool has_period = false;
  for (std::size_t c = 1; c < header.size(); ++c) {
    if (header[c] == "x" + std::to_string(c)) {
      if (has_period) throw InvalidArgument(name + ": 'period' must be the last column");
      ++p;
    } else if (header[c] == "period" && c + 1 == header.size()) {
      has_period = true;
    } else {
      throw InvalidArgument(name + ": unexpected column '" + std::string(header[c]) + "'");
    }
  }
  if (p == 0) throw InvalidArgument(name + ": no feature columns");

  std::vector<double> values;
  std::vector<double> ys;
  std::optional<int> period;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++row;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw InvalidArgument(name + ": row " + std::to_string(row) + " has " +
                            std::to_string(cells.size()) + " fields, expected " +
                            std::to_string(header.size()));
    const std::string where = name + " row " + std::to_string(row);
    ys.push_back(parse_double(cells[0], where));
    for (std::size_t j = 1; j <= p; ++j) values.push_back(parse_double(cells[j], where));
    if (has_period) {
      const int pr = static_cast<int>(parse_double(cells.back(), where));
      if (period && *period != pr) throw InvalidArgument(name + ": mixed period labels");
      period = pr;
    }
  }
  if (ys.empty()) throw InvalidArgument(name + ": no data rows");
  Dataset d;
  const auto n = static_cast<Index>(ys.size());
  d.features.resize(n, static_cast<Index>(p));
  d.outcomes = Eigen::Map<const Vector>(ys.data(), n);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < static_cast<Index>(p); ++j)
      d.features(i, j) = values[static_cast<std::size_t>(i) * p + static_cast<std::size_t>(j)];
  d.period = period;
  return d;
}

inline Dataset read_dataset(const std::filesystem::path& path) {
  return dataset_from_csv(read_text(path), path.string());
}

// ------------------------------------------------------------ coefficients

inline json to_json(const CoefficientVector& beta, Link link) {
  return {{"intercept", beta.intercept},
          {"slopes", std::vector<double>(beta.slopes.data(), beta.slopes.data() + beta.dim())},
          {"link", std::string(to_string(link))}};
}

inline std::pair<CoefficientVector, Link> coefficients_from_json(const json& j) {
  try {
    const auto slopes = j.at("slopes").get<std::vector<double>>();
    CoefficientVector beta(j.at("intercept").get<double>(),
                           Eigen::Map<const Vector>(slopes.data(), static_cast<Index>(slopes.size())));
    const Link link = parse_link(j.value("link", std::string("logistic")));
    if (!beta.finite()) throw InvalidArgument("coefficients must be finite");
    return {std::move(beta), link};
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed coefficient JSON: ") + e.what());
  }
}

inline json to_json(const ModelBank& bank, Link link) {
  json cols = json::array();
  for (const auto& c : bank.columns) cols.push_back(to_json(c, link));
  return {{"columns", cols}, {"labels", bank.labels}};
}

inline ModelBank bank_from_json(const json& j) {
  ModelBank bank;
  try {
    for (const auto& c : j.at("columns")) bank.columns.push_back(coefficients_from_json(c).first);
    bank.labels = j.value("labels", std::vector<int>{});
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed model bank JSON: ") + e.what());
  }
  bank.validate();
  return bank;
}

inline json to_json(const AdaptDiagnostics& d) {
  auto finite_or_null = [](double v) -> json { return std::isfinite(v) ? json(v) : json(nullptr); };
  return {{"objective", d.objective},
          {"constraint_value", finite_or_null(d.constraint_value)},
          {"tau", finite_or_null(d.tau)},
          {"constraint_slack", finite_or_null(d.slack)},
          {"mu", d.mu},
          {"kkt_residual", d.kkt_residual},
          {"complementary_slackness", d.complementary_slackness},
          {"iterations", d.iterations},
          {"bisections", d.bisections},
          {"constraint_active", d.constraint_active},
          {"active_set", d.support},
          {"converged", d.converged},
          {"termination", d.termination}};
}

// ------------------------------------------------------------ drift config

inline json to_json(const DriftConfig& c) {
  return {{"periods", c.periods},
          {"dim", c.dim},
          {"zero_coords", c.zero_coords},
          {"ar_order", c.ar_order},
          {"ar_weights", c.weights()},
          {"shock_prob", c.shock_prob},
          {"shock_sd", c.shock_sd},
          {"perturb_level", c.perturb_level},
          {"perturb_period", c.perturb_period},
          {"samples_per_period", c.samples_per_period},
          {"rho", c.rho},
          {"seed", c.seed}};
}

// Missing fields keep their defaults; unknown fields are rejected.
inline DriftConfig drift_config_from_json(const json& j) {
  static const char* known[] = {"periods",    "dim",           "zero_coords",    "ar_order",
                                "ar_weights", "shock_prob",    "shock_sd",       "perturb_level",
                                "perturb_period", "samples_per_period", "rho",   "seed"};
  if (!j.is_object()) throw InvalidArgument("drift config must be a JSON object");
  for (const auto& [key, _] : j.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known))
      throw InvalidArgument("drift config: unknown field '" + key + "'");
  }
  DriftConfig c;
  try {
    c.periods = j.value("periods", c.periods);
    c.dim = j.value("dim", c.dim);
    c.zero_coords = j.value("zero_coords", c.zero_coords);
    c.ar_order = j.value("ar_order", c.ar_order);
    c.ar_weights = j.value("ar_weights", c.ar_weights);
    c.shock_prob = j.value("shock_prob", c.shock_prob);
    c.shock_sd = j.value("shock_sd", c.shock_sd);
    c.perturb_level = j.value("perturb_level", c.perturb_level);
    c.perturb_period = j.value("perturb_period", c.perturb_period);
    c.samples_per_period = j.value("samples_per_period", c.samples_per_period);
    c.rho = j.value("rho", c.rho);
    c.seed = j.value("seed", c.seed);
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("drift config: ") + e.what());
  }
  c.validate();
  return c;
}

inline json parse_json_file(const std::filesystem::path& path) {
  const std::string text = read_text(path);
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(path.string() + ": " + e.what());
  }
}

inline json coefficient_path_json(const CoefficientPath& path) {
  json periods = json::array();
  for (std::size_t l = 0; l < path.betas.size(); ++l) {
    json entry = to_json(path.betas[l], Link::logistic);
    entry["period"] = l + 1;
    periods.push_back(std::move(entry));
  }
  return {{"periods", periods}};
}

// ------------------------------------------------------------- AUC tables

struct AucRecord {
  std::string method;
  int train_period = 0;
  int eval_period = 0;
  int rep = 0;
  double auc = 0.0;
};

// Reads any CSV carrying the columns method, train_period, eval_period,
// rep and auc (in any order, extra columns ignored).
inline std::vector<AucRecord> auc_records_from_csv(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument(name + ": empty file");
  const auto header = split_csv_line(line);
  std::map<std::string, std::size_t, std::less<>> col;
  for (std::size_t c = 0; c < header.size(); ++c) col[std::string(header[c])] = c;
  for (const char* required : {"method", "train_period", "eval_period", "rep", "auc"})
    if (!col.count(required)) throw InvalidArgument(name + ": missing column '" + required + "'");

  std::vector<AucRecord> out;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++row;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw InvalidArgument(name + ": row " + std::to_string(row) + " has the wrong field count");
    const std::string where = name + " row " + std::to_string(row);
    AucRecord r;
    r.method = std::string(cells[col["method"]]);
    r.train_period = static_cast<int>(parse_double(cells[col["train_period"]], where));
    r.eval_period = static_cast<int>(parse_double(cells[col["eval_period"]], where));
    r.rep = static_cast<int>(parse_double(cells[col["rep"]], where));
    r.auc = parse_double(cells[col["auc"]], where);
    out.push_back(std::move(r));
  }
  return out;
}

// Averages over repetitions; restricted to one method when `method` is
// non-empty, otherwise all rows must share one method.
inline AucTable aggregate_auc_table(const std::vector<AucRecord>& records, const std::string& method) {
  std::map<std::pair<int, int>, std::pair<double, int>> sums;
  std::string seen;
  std::map<int, bool> reps;
  for (const auto& r : records) {
    if (!method.empty() && r.method != method) continue;
    if (method.empty()) {
      if (seen.empty()) seen = r.method;
      if (r.method != seen)
        throw InvalidArgument("AUC table mixes methods '" + seen + "' and '" + r.method +
                              "'; choose one");
    }
    auto& s = sums[{r.train_period, r.eval_period}];
    s.first += r.auc;
    s.second += 1;
    reps[r.rep] = true;
  }
  AucTable table;
  for (const auto& [key, s] : sums) table.set(key.first, key.second, s.first / s.second);
  table.reps = static_cast<int>(reps.size());
  return table;
}

}  // namespace adapt
