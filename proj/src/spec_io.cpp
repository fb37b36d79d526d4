#include "sypi/spec_io.hpp"

#include "sypi/error.hpp"
#include "sypi/file_util.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace sypi {

using nlohmann::json;

void write_file_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(target.parent_path(), ec);
  }
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw_data("cannot open " + tmp.string() + " for writing");
    out << contents;
    out.flush();
    if (!out) throw_data("failed writing " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw_data("cannot move " + tmp.string() + " to " + path);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw_data("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string spec_to_json(const FullTimeGraphSpec& spec) {
  json j;
  j["format"] = "sypi-spec";
  j["version"] = kSpecFormatVersion;
  j["n_obs"] = spec.n_obs;
  j["n_hidden"] = spec.n_hidden;
  j["target"] = spec.target();
  j["multi_lag_mode"] = spec.multi_lag_mode;
  j["weight_scale"] = spec.weight_scale;
  j["stabilized"] = spec.stabilized;
  j["series"] = json::array();
  for (int s = 0; s < spec.n_series(); ++s) {
    j["series"].push_back({{"index", s},
                           {"name", spec.series_name(s)},
                           {"hidden", spec.is_hidden(s)},
                           {"memoryless", spec.memoryless(s)},
                           {"self_weight", spec.self_weight[static_cast<size_t>(s)]},
                           {"noise_std", spec.noise_std[static_cast<size_t>(s)]}});
  }
  j["edges"] = json::array();
  for (const CrossEdge& e : spec.edges) {
    j["edges"].push_back({{"source", e.source}, {"dest", e.dest}, {"lag", e.lag}, {"weight", e.weight}});
  }
  return j.dump(2) + "\n";
}

FullTimeGraphSpec spec_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw_data(std::string("spec: malformed JSON: ") + e.what());
  }
  try {
    if (j.at("format").get<std::string>() != "sypi-spec") throw_data("spec: wrong format tag");
    if (j.at("version").get<int>() != kSpecFormatVersion) throw_data("spec: unsupported version");
    FullTimeGraphSpec spec;
    spec.n_obs = j.at("n_obs").get<int>();
    spec.n_hidden = j.at("n_hidden").get<int>();
    spec.multi_lag_mode = j.at("multi_lag_mode").get<bool>();
    spec.weight_scale = j.at("weight_scale").get<double>();
    spec.stabilized = j.at("stabilized").get<bool>();
    if (spec.n_obs < 0 || spec.n_hidden < 0) throw_data("spec: negative series count");
    if (j.at("target").get<int>() != spec.target()) throw_data("spec: target index must be the last series");
    const json& series = j.at("series");
    if (static_cast<int>(series.size()) != spec.n_series()) throw_data("spec: series count mismatch");
    spec.self_weight.resize(series.size());
    spec.noise_std.resize(series.size());
    for (const json& s : series) {
      const int index = s.at("index").get<int>();
      if (index < 0 || index >= spec.n_series()) throw_data("spec: series index out of range");
      spec.self_weight[static_cast<size_t>(index)] = s.at("self_weight").get<double>();
      spec.noise_std[static_cast<size_t>(index)] = s.at("noise_std").get<double>();
    }
    for (const json& e : j.at("edges")) {
      spec.edges.push_back({e.at("source").get<int>(), e.at("dest").get<int>(), e.at("lag").get<int>(),
                            e.at("weight").get<double>()});
    }
    const std::vector<std::string> issues = check_structure(spec);
    if (!issues.empty()) throw_data("spec: " + issues.front());
    return spec;
  } catch (const json::exception& e) {
    throw_data(std::string("spec: ") + e.what());
  }
}

void save_spec(const FullTimeGraphSpec& spec, const std::string& path) {
  write_file_atomic(path, spec_to_json(spec));
}

FullTimeGraphSpec load_spec(const std::string& path) { return spec_from_json(read_file(path)); }

}  // namespace sypi
