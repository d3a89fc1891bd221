#include "enkbf/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace enkbf {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ConfigError("config error at '" + field + "': " + what);
}

double number_at(const json& j, const std::string& field, double fallback) {
  if (!j.contains(field)) return fallback;
  if (!j.at(field).is_number()) fail(field, "expected a number");
  return j.at(field).get<double>();
}

std::vector<double> number_list_at(const json& j, const std::string& field,
                                   std::vector<double> fallback) {
  if (!j.contains(field)) return fallback;
  if (!j.at(field).is_array()) fail(field, "expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : j.at(field)) {
    if (!v.is_number()) fail(field, "expected an array of numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

std::string string_at(const json& j, const std::string& field,
                      std::string fallback) {
  if (!j.contains(field)) return fallback;
  if (!j.at(field).is_string()) fail(field, "expected a string");
  return j.at(field).get<std::string>();
}

std::optional<double> threshold_at(const json& j, const std::string& field) {
  if (!j.contains(field)) return std::nullopt;
  const auto& v = j.at(field);
  if (v.is_string()) {
    if (v.get<std::string>() != "auto") fail(field, "expected number or 'auto'");
    return std::nullopt;
  }
  if (!v.is_number()) fail(field, "expected number or 'auto'");
  return v.get<double>();
}

}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config root must be an object");

  ExperimentConfig cfg;
  static const std::vector<std::string> known = {
      "problem",      "variant",     "filter",       "T",
      "h_list",       "h_fine",      "fine_ratio",   "M",
      "seeds",        "master_seed", "x0",           "init_spread",
      "thresholds",   "error_levels", "baseline_error", "n_list",
      "out",          "threads"};
  for (const auto& [key, value] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      fail(key, "unknown field");
    }
  }

  if (j.contains("problem")) {
    const auto& p = j.at("problem");
    if (!p.is_object()) fail("problem", "expected an object");
    cfg.problem_name = string_at(p, "name", cfg.problem_name);
    if (p.contains("params")) {
      if (!p.at("params").is_object()) {
        fail("problem.params", "expected an object of numbers");
      }
      for (const auto& [key, value] : p.at("params").items()) {
        if (!value.is_number()) {
          fail("problem.params." + key, "expected a number");
        }
        cfg.problem_params[key] = value.get<double>();
      }
    }
    for (const auto& [key, value] : p.items()) {
      if (key != "name" && key != "params") fail("problem." + key, "unknown field");
    }
  }

  cfg.variant = string_at(j, "variant", cfg.variant);
  cfg.filter = string_at(j, "filter", cfg.filter);
  cfg.T = number_at(j, "T", cfg.T);
  cfg.h_list = number_list_at(j, "h_list", cfg.h_list);
  cfg.h_fine = number_at(j, "h_fine", cfg.h_fine);
  cfg.fine_ratio = static_cast<int>(number_at(j, "fine_ratio", cfg.fine_ratio));
  cfg.M = static_cast<int>(number_at(j, "M", cfg.M));
  cfg.seeds = static_cast<int>(number_at(j, "seeds", cfg.seeds));
  if (j.contains("master_seed")) {
    if (!j.at("master_seed").is_number_unsigned() &&
        !j.at("master_seed").is_number_integer()) {
      fail("master_seed", "expected an unsigned integer");
    }
    cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
  }
  if (j.contains("x0")) {
    if (j.at("x0").is_number()) {
      cfg.x0 = {j.at("x0").get<double>()};
    } else {
      cfg.x0 = number_list_at(j, "x0", {});
    }
  }
  cfg.init_spread = number_at(j, "init_spread", cfg.init_spread);
  if (j.contains("thresholds")) {
    const auto& t = j.at("thresholds");
    if (!t.is_object()) fail("thresholds", "expected an object");
    cfg.threshold_n = threshold_at(t, "n");
    cfg.threshold_mn = threshold_at(t, "m_n");
    for (const auto& [key, value] : t.items()) {
      if (key != "n" && key != "m_n") fail("thresholds." + key, "unknown field");
    }
  }
  cfg.error_levels = number_list_at(j, "error_levels", cfg.error_levels);
  cfg.baseline_error = number_at(j, "baseline_error", cfg.baseline_error);
  cfg.n_list = number_list_at(j, "n_list", cfg.n_list);
  cfg.out_dir = string_at(j, "out", cfg.out_dir);
  cfg.threads = static_cast<int>(number_at(j, "threads", cfg.threads));

  cfg.validate();
  return cfg;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

void ExperimentConfig::validate() const {
  if (variant != "enkf" && variant != "etkf" && variant != "unperturbed") {
    fail("variant", "expected enkf | etkf | unperturbed");
  }
  if (filter != "continuous" && filter != "discrete") {
    fail("filter", "expected continuous | discrete");
  }
  if (T <= 0.0) fail("T", "must be positive");
  if (h_list.empty()) fail("h_list", "must not be empty");
  for (const double h : h_list) {
    if (h <= 0.0) fail("h_list", "entries must be positive");
  }
  if (h_fine < 0.0) fail("h_fine", "must be nonnegative (0 = auto)");
  if (fine_ratio < 1) fail("fine_ratio", "must be >= 1");
  const double hf = resolved_h_fine();
  for (const double h : h_list) {
    const double r = h / hf;
    if (std::abs(r - std::llround(r)) > 1e-9 || std::llround(r) < 1) {
      fail("h_list", "every h must be an integer multiple of h_fine");
    }
  }
  const double nodes = T / hf;
  if (std::abs(nodes - std::llround(nodes)) > 1e-9 || std::llround(nodes) < 1) {
    fail("h_fine", "T/h_fine must be a positive integer");
  }
  for (const double h : h_list) {
    const double steps = T / h;
    if (std::abs(steps - std::llround(steps)) > 1e-9) {
      fail("h_list", "T must be an integer multiple of every h");
    }
  }
  if (M < 2) fail("M", "must be >= 2");
  if (seeds < 1) fail("seeds", "must be >= 1");
  if (init_spread < 0.0) fail("init_spread", "must be nonnegative");
  if (error_levels.empty()) fail("error_levels", "must not be empty");
  for (const double level : error_levels) {
    if (level < 0.0) fail("error_levels", "entries must be nonnegative");
  }
  if (baseline_error < 0.0) fail("baseline_error", "must be nonnegative");
  if (!n_list.empty() && !std::is_sorted(n_list.begin(), n_list.end())) {
    fail("n_list", "must be increasing");
  }
}

double ExperimentConfig::resolved_h_fine() const {
  if (h_fine > 0.0) return h_fine;
  return *std::min_element(h_list.begin(), h_list.end()) / fine_ratio;
}

std::string ExperimentConfig::to_json_text() const {
  json j;
  j["problem"]["name"] = problem_name;
  j["problem"]["params"] = json::object();
  for (const auto& [key, value] : problem_params) {
    j["problem"]["params"][key] = value;
  }
  j["variant"] = variant;
  j["filter"] = filter;
  j["T"] = T;
  j["h_list"] = h_list;
  j["h_fine"] = resolved_h_fine();
  j["fine_ratio"] = fine_ratio;
  j["M"] = M;
  j["seeds"] = seeds;
  j["master_seed"] = master_seed;
  j["x0"] = x0;
  j["init_spread"] = init_spread;
  j["thresholds"]["n"] = threshold_n ? json(*threshold_n) : json("auto");
  j["thresholds"]["m_n"] = threshold_mn ? json(*threshold_mn) : json("auto");
  j["error_levels"] = error_levels;
  j["baseline_error"] = baseline_error;
  j["n_list"] = n_list;
  j["out"] = out_dir;
  j["threads"] = threads;
  return j.dump(2);
}

}  // namespace enkbf
