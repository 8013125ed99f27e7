#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "fatigue/pipeline.hpp"

namespace fatigue {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

void reject_unknown(const json& obj, const std::string& where, std::initializer_list<std::string_view> keys) {
  for (const auto& [key, _] : obj.items()) {
    bool known = false;
    for (auto k : keys) known |= key == k;
    if (!known) throw DecodeError("config: unknown key '" + where + key + "'");
  }
}

const json* member(const json& obj, const char* key) {
  auto it = obj.find(key);
  return it == obj.end() ? nullptr : &*it;
}

const json& object_at(const json& obj, const char* key, const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_object()) throw DecodeError("config: '" + where + key + "' must be an object");
  return v;
}

double number(const json& v, const std::string& name) {
  if (!v.is_number()) throw DecodeError("config: '" + name + "' must be a number");
  return v.get<double>();
}

std::size_t count(const json& v, const std::string& name) {
  if (!v.is_number_unsigned()) throw DecodeError("config: '" + name + "' must be a non-negative integer");
  return v.get<std::size_t>();
}

void read_number(const json& obj, const char* key, const std::string& where, double& out) {
  if (const json* v = member(obj, key)) out = number(*v, where + key);
}

void read_count(const json& obj, const char* key, const std::string& where, std::size_t& out) {
  if (const json* v = member(obj, key)) out = count(*v, where + key);
}

std::optional<fs::path> read_path(const json& v, const std::string& name, const fs::path& base) {
  if (v.is_null()) return std::nullopt;
  if (!v.is_string()) throw DecodeError("config: '" + name + "' must be a path string or null");
  fs::path p(v.get<std::string>());
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.lexically_normal();
}

json path_json(const std::optional<fs::path>& p) { return p ? json(p->generic_string()) : json(nullptr); }

void read_features(const json& f, FeatureParams& p) {
  const std::string w = "features.";
  reject_unknown(f, w,
                 {"apen_m", "apen_r_factor", "correction_threshold", "correction_hysteresis", "half_lane_width",
                  "eye_closed_threshold", "blink_min", "microsleep_min", "yawn_ratio", "yawn_min_duration",
                  "head_alpha", "saccade_speed"});
  read_count(f, "apen_m", w, p.apen.m);
  read_number(f, "apen_r_factor", w, p.apen.r_factor);
  read_number(f, "correction_threshold", w, p.correction_threshold);
  read_number(f, "correction_hysteresis", w, p.correction_hysteresis);
  read_number(f, "half_lane_width", w, p.half_lane_width);
  read_number(f, "eye_closed_threshold", w, p.eye_closed_threshold);
  read_number(f, "blink_min", w, p.blink_min_duration);
  read_number(f, "microsleep_min", w, p.microsleep_min_duration);
  read_number(f, "yawn_ratio", w, p.yawn_ratio);
  read_number(f, "yawn_min_duration", w, p.yawn_min_duration);
  read_number(f, "head_alpha", w, p.head_alpha);
  read_number(f, "saccade_speed", w, p.saccade_speed);
}

}  // namespace

void PipelineConfig::validate() const {
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) throw ArgumentError(std::string(name) + " must be a positive number");
  };
  positive(window_length, "window.length");
  positive(window_stride, "window.stride");
  positive(perclos_window, "perclos_window");
  positive(features.apen.r_factor, "features.apen_r_factor");
  positive(features.correction_threshold, "features.correction_threshold");
  positive(features.half_lane_width, "features.half_lane_width");
  positive(features.blink_min_duration, "features.blink_min");
  positive(features.microsleep_min_duration, "features.microsleep_min");
  positive(features.yawn_min_duration, "features.yawn_min_duration");
  positive(features.saccade_speed, "features.saccade_speed");
  if (features.apen.m < 1) throw ArgumentError("features.apen_m must be at least 1");
  if (!(features.correction_hysteresis >= 0.0)) throw ArgumentError("features.correction_hysteresis must be >= 0");
  if (!(features.eye_closed_threshold > 0.0 && features.eye_closed_threshold < 1.0)) {
    throw ArgumentError("features.eye_closed_threshold must be in (0, 1)");
  }
  if (!(features.yawn_ratio > 0.0)) throw ArgumentError("features.yawn_ratio must be positive");
  if (!(features.head_alpha > 0.0 && features.head_alpha <= 1.0)) {
    throw ArgumentError("features.head_alpha must be in (0, 1]");
  }
  if (features.blink_min_duration >= features.microsleep_min_duration) {
    throw ArgumentError("features.blink_min must be below features.microsleep_min");
  }
  if (!(fusion_cutoffs.medium <= fusion_cutoffs.high)) throw ArgumentError("fusion cut-offs must be ordered");
  if (alert.consecutive < 1) throw ArgumentError("alert.consecutive must be at least 1");
  if (snapshots.cadence < 1) throw ArgumentError("snapshots.cadence must be at least 1");
  if (threads < 1) throw ArgumentError("threads must be at least 1");
}

PipelineConfig load_config(std::string_view text, const fs::path& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw DecodeError("config parse error at byte " + std::to_string(e.byte));
  }
  if (!doc.is_object()) throw DecodeError("config must be a JSON object");
  reject_unknown(doc, "",
                 {"window", "perclos_window", "features", "scheme", "rules", "fusion", "alert", "snapshots", "profile",
                  "threads"});

  PipelineConfig cfg;
  if (doc.contains("window")) {
    const json& w = object_at(doc, "window", "");
    reject_unknown(w, "window.", {"length", "stride"});
    read_number(w, "length", "window.", cfg.window_length);
    read_number(w, "stride", "window.", cfg.window_stride);
  }
  read_number(doc, "perclos_window", "", cfg.perclos_window);
  if (doc.contains("features")) read_features(object_at(doc, "features", ""), cfg.features);
  if (const json* s = member(doc, "scheme")) cfg.scheme_path = read_path(*s, "scheme", base_dir);
  if (doc.contains("rules")) {
    const json& r = object_at(doc, "rules", "");
    reject_unknown(r, "rules.", {"pack", "verbatim_table1"});
    if (const json* p = member(r, "pack")) cfg.rules_path = read_path(*p, "rules.pack", base_dir);
    if (const json* v = member(r, "verbatim_table1")) {
      if (!v->is_boolean()) throw DecodeError("config: 'rules.verbatim_table1' must be a boolean");
      cfg.verbatim_table1 = v->get<bool>();
    }
  }
  if (doc.contains("fusion")) {
    const json& f = object_at(doc, "fusion", "");
    reject_unknown(f, "fusion.", {"weights", "medium_cutoff", "high_cutoff"});
    if (f.contains("weights")) {
      std::map<std::string, double> weights;
      for (const auto& [source, w] : object_at(f, "weights", "fusion.").items()) {
        weights[source] = number(w, "fusion.weights." + source);
      }
      cfg.fusion_weights = FusionWeights(std::move(weights));
    }
    read_number(f, "medium_cutoff", "fusion.", cfg.fusion_cutoffs.medium);
    read_number(f, "high_cutoff", "fusion.", cfg.fusion_cutoffs.high);
  }
  if (doc.contains("alert")) {
    const json& a = object_at(doc, "alert", "");
    reject_unknown(a, "alert.", {"threshold", "consecutive"});
    if (const json* t = member(a, "threshold")) {
      if (!t->is_string()) throw DecodeError("config: 'alert.threshold' must be a level name");
      cfg.alert.threshold = level_from_name(t->get<std::string>());
    }
    read_count(a, "consecutive", "alert.", cfg.alert.consecutive);
  }
  if (doc.contains("snapshots")) {
    const json& s = object_at(doc, "snapshots", "");
    reject_unknown(s, "snapshots.", {"directory", "cadence"});
    if (const json* d = member(s, "directory")) cfg.snapshots.directory = read_path(*d, "snapshots.directory", base_dir);
    read_count(s, "cadence", "snapshots.", cfg.snapshots.cadence);
  }
  if (doc.contains("profile")) {
    const json& p = object_at(doc, "profile", "");
    reject_unknown(p, "profile.", {"id", "sex"});
    if (const json* id = member(p, "id")) {
      if (!id->is_string()) throw DecodeError("config: 'profile.id' must be a string");
      cfg.profile.id = id->get<std::string>();
    }
    if (const json* sex = member(p, "sex")) {
      if (!sex->is_string()) throw DecodeError("config: 'profile.sex' must be a string");
      cfg.profile.sex = sex_from_name(sex->get<std::string>());
    }
  }
  read_count(doc, "threads", "", cfg.threads);
  cfg.validate();
  return cfg;
}

PipelineConfig load_config_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DecodeError("cannot open config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_config(buf.str(), path.parent_path());
}

std::string config_to_json(const PipelineConfig& cfg) {
  const FeatureParams& f = cfg.features;
  json weights = json::object();
  for (const auto& [source, w] : cfg.fusion_weights.values()) weights[source] = w;
  json doc = {
      {"window", {{"length", cfg.window_length}, {"stride", cfg.window_stride}}},
      {"perclos_window", cfg.perclos_window},
      {"features",
       {{"apen_m", f.apen.m},
        {"apen_r_factor", f.apen.r_factor},
        {"correction_threshold", f.correction_threshold},
        {"correction_hysteresis", f.correction_hysteresis},
        {"half_lane_width", f.half_lane_width},
        {"eye_closed_threshold", f.eye_closed_threshold},
        {"blink_min", f.blink_min_duration},
        {"microsleep_min", f.microsleep_min_duration},
        {"yawn_ratio", f.yawn_ratio},
        {"yawn_min_duration", f.yawn_min_duration},
        {"head_alpha", f.head_alpha},
        {"saccade_speed", f.saccade_speed}}},
      {"scheme", path_json(cfg.scheme_path)},
      {"rules", {{"pack", path_json(cfg.rules_path)}, {"verbatim_table1", cfg.verbatim_table1}}},
      {"fusion",
       {{"weights", weights},
        {"medium_cutoff", cfg.fusion_cutoffs.medium},
        {"high_cutoff", cfg.fusion_cutoffs.high}}},
      {"alert", {{"threshold", std::string(level_name(cfg.alert.threshold))}, {"consecutive", cfg.alert.consecutive}}},
      {"snapshots", {{"directory", path_json(cfg.snapshots.directory)}, {"cadence", cfg.snapshots.cadence}}},
      {"profile", {{"id", cfg.profile.id}, {"sex", std::string(sex_name(cfg.profile.sex))}}},
      {"threads", cfg.threads},
  };
  return doc.dump(2) + "\n";
}

}  // namespace fatigue
