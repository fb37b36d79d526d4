#include "sypi/panel_io.hpp"

#include "sypi/error.hpp"
#include "sypi/file_util.hpp"

#include <json.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace sypi {

namespace {

constexpr double kMissing = std::numeric_limits<double>::quiet_NaN();

std::vector<std::string> split_record(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        field += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      fields.push_back(field);
      field.clear();
    } else if (ch != '\r') {
      field += ch;
    }
  }
  fields.push_back(field);
  return fields;
}

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t");
  if (first == std::string::npos) return "";
  return s.substr(first, s.find_last_not_of(" \t") - first + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

bool is_missing_token(const std::string& s) {
  const std::string l = lower(s);
  return l.empty() || l == "na" || l == "nan" || l == "null" || l == "-" || l == ":";
}

bool parse_number(const std::string& s, double& out) {
  const char* begin = s.data();
  const char* end = s.data() + s.size();
  if (begin != end && *begin == '+') ++begin;
  const auto [ptr, ec] = std::from_chars(begin, end, out);
  return ec == std::errc() && ptr == end && std::isfinite(out);
}

bool looks_like_time_header(const std::string& name) {
  static const char* names[] = {"t", "time", "date", "period", "month", "week", "year", "timestamp", "index", ""};
  const std::string l = lower(trim(name));
  return std::find(std::begin(names), std::end(names), l) != std::end(names);
}

std::string fmt12(double v) {
  std::ostringstream ss;
  ss << std::setprecision(12) << v;
  return ss.str();
}

}  // namespace

LoadedPanel parse_csv(const std::string& text, const std::string& target_column, const CsvOptions& options) {
  std::vector<std::vector<std::string>> rows;
  {
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
      if (trim(line).empty() || trim(line) == "\r") continue;
      rows.push_back(split_record(line));
    }
  }
  if (rows.empty()) throw_data("csv: no header row");
  std::vector<std::string> header = rows.front();
  for (std::string& h : header) h = trim(h);
  rows.erase(rows.begin());
  const size_t width = header.size();
  for (size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != width) {
      throw_data("csv: row " + std::to_string(r + 2) + " has " + std::to_string(rows[r].size()) +
                 " fields, header has " + std::to_string(width));
    }
  }

  int time_col = -1;
  if (!options.time_column.empty()) {
    const auto it = std::find(header.begin(), header.end(), options.time_column);
    if (it == header.end()) throw_data("csv: time column '" + options.time_column + "' not found");
    time_col = static_cast<int>(it - header.begin());
  } else if (width > 1) {
    bool non_numeric = false;
    for (const auto& row : rows) {
      double v;
      const std::string cell = trim(row[0]);
      if (!is_missing_token(cell) && !parse_number(cell, v)) non_numeric = true;
    }
    if (non_numeric || looks_like_time_header(header[0])) time_col = 0;
  }

  const auto target_it = std::find(header.begin(), header.end(), target_column);
  if (target_it == header.end()) throw_data("csv: target column '" + target_column + "' not found");
  const int target_col = static_cast<int>(target_it - header.begin());
  if (target_col == time_col) throw_data("csv: target column is the time index");

  std::vector<int> candidate_cols;
  for (int c = 0; c < static_cast<int>(width); ++c) {
    if (c != time_col && c != target_col) candidate_cols.push_back(c);
  }
  if (candidate_cols.empty()) throw_data("csv: no candidate columns besides the target");

  // Column-major numeric table: candidates first, target last.
  std::vector<int> data_cols = candidate_cols;
  data_cols.push_back(target_col);
  const size_t n_rows = rows.size();
  std::vector<std::vector<double>> values(data_cols.size(), std::vector<double>(n_rows, kMissing));
  LoadedPanel out;
  for (size_t r = 0; r < n_rows; ++r) {
    for (size_t k = 0; k < data_cols.size(); ++k) {
      const std::string cell = trim(rows[r][static_cast<size_t>(data_cols[k])]);
      double v;
      if (!is_missing_token(cell) && parse_number(cell, v)) {
        values[k][r] = v;
      } else if (options.missing == MissingPolicy::Strict) {
        throw_data("csv: row " + std::to_string(r + 2) + ", column '" + header[static_cast<size_t>(data_cols[k])] +
                   "': " + (is_missing_token(cell) ? "missing value" : "non-numeric value '" + cell + "'"));
      }
    }
  }

  for (auto& column : values) {
    double last = kMissing;
    for (double& v : column) {
      if (std::isnan(v)) {
        if (!std::isnan(last)) {
          v = last;
          ++out.filled_cells;
        }
      } else {
        last = v;
      }
    }
  }
  size_t first_complete = 0;
  while (first_complete < n_rows &&
         std::any_of(values.begin(), values.end(), [&](const auto& col) { return std::isnan(col[first_complete]); })) {
    ++first_complete;
  }
  out.dropped_rows = static_cast<long>(first_complete);
  const long T = static_cast<long>(n_rows - first_complete);
  if (T < 2) throw_data("csv: fewer than 2 usable rows");
  if (T < 50) out.warnings.push_back("only " + std::to_string(T) + " usable rows (fewer than 50)");

  TimeSeriesPanel& p = out.panel;
  p.candidates.resize(T, static_cast<Eigen::Index>(candidate_cols.size()));
  p.target.resize(T);
  for (long t = 0; t < T; ++t) {
    for (size_t k = 0; k < candidate_cols.size(); ++k) {
      p.candidates(t, static_cast<Eigen::Index>(k)) = values[k][first_complete + static_cast<size_t>(t)];
    }
    p.target(t) = values.back()[first_complete + static_cast<size_t>(t)];
    if (time_col >= 0) p.time_labels.push_back(trim(rows[first_complete + static_cast<size_t>(t)][static_cast<size_t>(time_col)]));
  }
  for (int c : candidate_cols) p.names.push_back(header[static_cast<size_t>(c)]);
  p.target_name = target_column;
  if (options.standardize) {
    p.standardize();
    for (size_t k = 0; k < p.near_constant.size(); ++k) {
      if (p.near_constant[k]) out.warnings.push_back("column '" + p.names[k] + "' is near-constant");
    }
  } else {
    p.near_constant.assign(candidate_cols.size(), false);
  }
  p.validate();
  return out;
}

LoadedPanel load_csv(const std::string& path, const std::string& target_column, const CsvOptions& options) {
  return parse_csv(read_file(path), target_column, options);
}

std::string panel_to_csv(const TimeSeriesPanel& panel) {
  panel.validate();
  std::ostringstream ss;
  ss << 't';
  for (const std::string& n : panel.names) ss << ',' << n;
  ss << ',' << panel.target_name << '\n';
  for (long t = 0; t < panel.length(); ++t) {
    if (panel.time_labels.empty()) {
      ss << t;
    } else {
      ss << panel.time_labels[static_cast<size_t>(t)];
    }
    for (int j = 0; j < panel.n_candidates(); ++j) ss << ',' << fmt12(panel.candidates(t, j));
    ss << ',' << fmt12(panel.target(t)) << '\n';
  }
  return ss.str();
}

void save_panel_csv(const TimeSeriesPanel& panel, const std::string& path) {
  write_file_atomic(path, panel_to_csv(panel));
}

std::string report_to_json(const DiscoveryReport& report) {
  using nlohmann::json;
  json j;
  j["format"] = "sypi-report";
  j["version"] = 1;
  j["target"] = report.target_name;
  j["threshold1"] = report.threshold1;
  j["threshold2"] = report.threshold2;
  j["causes"] = json::array();
  for (int i : report.causes()) j["causes"].push_back(report.names[static_cast<size_t>(i)]);
  j["candidates"] = json::array();
  for (size_t i = 0; i < report.candidates.size(); ++i) {
    const CandidateResult& c = report.candidates[i];
    json entry{{"name", report.names[i]},
               {"lag", c.lag ? json(*c.lag) : json(nullptr)},
               {"p1", c.p1},
               {"p2", c.p2},
               {"decision", to_string(c.decision)},
               {"n_eff", c.n_eff},
               {"degenerate", c.degenerate},
               {"zero_lag_in_conditioning", c.zero_lag_in_conditioning}};
    j["candidates"].push_back(entry);
  }
  return j.dump(2) + "\n";
}

std::string report_to_table(const DiscoveryReport& report) {
  size_t width = 9;
  for (const std::string& n : report.names) width = std::max(width, n.size());
  std::ostringstream ss;
  ss << "target: " << report.target_name << "  threshold1=" << report.threshold1
     << "  threshold2=" << report.threshold2 << '\n';
  ss << std::left << std::setw(static_cast<int>(width)) << "candidate" << "  lag  " << std::setw(12) << "p1"
     << std::setw(12) << "p2" << std::setw(8) << "n_eff" << "decision\n";
  for (size_t i = 0; i < report.candidates.size(); ++i) {
    const CandidateResult& c = report.candidates[i];
    ss << std::left << std::setw(static_cast<int>(width)) << report.names[i] << "  " << std::setw(5)
       << (c.lag ? std::to_string(*c.lag) : "-");
    if (c.lag) {
      ss << std::setw(12) << std::setprecision(4) << c.p1 << std::setw(12) << std::setprecision(4) << c.p2
         << std::setw(8) << c.n_eff;
    } else {
      ss << std::setw(12) << "-" << std::setw(12) << "-" << std::setw(8) << "-";
    }
    ss << to_string(c.decision);
    if (c.degenerate) ss << " (degenerate)";
    if (c.zero_lag_in_conditioning) ss << " (zero-lag conditioning)";
    ss << '\n';
  }
  const std::vector<int> causes = report.causes();
  ss << "causes:";
  if (causes.empty()) ss << " (none)";
  for (int i : causes) ss << ' ' << report.names[static_cast<size_t>(i)];
  ss << '\n';
  return ss.str();
}

}  // namespace sypi
