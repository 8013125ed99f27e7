#include "fatigue/qualify.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "fatigue/error.hpp"
#include "text_util.hpp"

namespace fatigue {

namespace {

using nlohmann::json;

const std::vector<FeatureBinding> kBindings = {
    {"mean_swa_abs", "MeanSWA", "hasMeanSWA", FeatureDomain::non_negative},
    {"max_swa_abs", "SWA_measure", "hasSWAMeasured", FeatureDomain::non_negative},
    {"swa_correction_freq", "FrequencySWA", "hasFrequencyCorrection", FeatureDomain::non_negative},
    {"swa_angular_velocity_max", "AngularVelocity", "hasAngularVelocity", FeatureDomain::non_negative},
    {"swa_apen", "ApproximateEntropySWA", "hasApproximateEntropySWA", FeatureDomain::real},
    {"mean_yaw_abs", "MeanYaw", "hasMeanYaw", FeatureDomain::non_negative},
    {"max_yaw_abs", "Yaw_measure", "hasYawAngleMeasured", FeatureDomain::non_negative},
    {"var_yaw", "VarYaw", "hasVarYaw", FeatureDomain::non_negative},
    {"yaw_apen", "ApproximateEntropyYaw", "hasApproximateEntropyYaw", FeatureDomain::real},
    {"yaw_accel_max", "AccelerationYawRate", "hasAccelerationYawRate", FeatureDomain::non_negative},
    {"lat_accel_range", "LateralAcceleration", "hasLateralAccelerationRange", FeatureDomain::non_negative},
    {"lane_std", "LaneDeviation", "hasLaneDeviation", FeatureDomain::non_negative},
    {"lane_crossings", "LaneCrossing", "hasLaneCrossings", FeatureDomain::non_negative},
    {"perclos80", "EyeClosure", "hasPERCLOS", FeatureDomain::non_negative},
    {"blink_freq", "BlinkFrequency", "hasBlinkFrequency", FeatureDomain::non_negative},
    {"blink_dur_mean", "BlinkDuration", "hasBlinkDuration", FeatureDomain::non_negative},
    {"microsleep_count", "MicroSleep", "hasMicroSleepCount", FeatureDomain::non_negative},
    {"yawn_count", "Yawn", "hasYawnCount", FeatureDomain::non_negative},
    {"yawn_freq", "YawnFrequency", "hasYawnFrequency", FeatureDomain::non_negative},
    {"head_ewma", "HeadPitch", "hasHeadPitchEWMA", FeatureDomain::real},
    {"head_ewvar", "HeadVariance", "hasHeadPitchEWVAR", FeatureDomain::non_negative},
    {"gaze_persac", "Saccade", "hasSaccadeProportion", FeatureDomain::non_negative},
    {"mean_bpm", "HeartRate", "hasBPM", FeatureDomain::non_negative},
};

std::string bound_text(double v) {
  if (std::isinf(v)) return v < 0 ? "-inf" : "inf";
  return text_util::format_double(v);
}

std::string interval_text(double lo, double hi) { return "[" + bound_text(lo) + "," + bound_text(hi) + ")"; }

BandSet three(const std::string& prefix, const char* a, const char* b, const char* c, double t1, double t2) {
  return {{prefix + a, 0.0, t1}, {prefix + b, t1, t2}, {prefix + c, t2, kInf}};
}

BandSet two(const std::string& prefix, const char* a, const char* b, double t1) {
  return {{prefix + a, 0.0, t1}, {prefix + b, t1, kInf}};
}

// The normal band is closed at its top, so the upper atypical band starts
// one representable value above it.
BandSet heart_rate(double drowsy, double intermediate, double normal, double normal_top) {
  const double atypical = std::nextafter(normal_top, kInf);
  return {
      {"BPM_Atypical", 0.0, drowsy},
      {"BPM_Drowsy", drowsy, intermediate},
      {"BPM_Intermediate", intermediate, normal},
      {"BPM_Normal", normal, atypical},
      {"BPM_Atypical", atypical, kInf},
  };
}

QualificationScheme build_default_scheme() {
  QualificationScheme s;
  s.set("mean_swa_abs", three("MeanSWA_", "Small", "Large", "Extreme", 6.0, 10.0));
  s.set("max_swa_abs", three("SWA_", "Small", "Large", "Extreme", 6.0, 10.0));
  s.set("swa_correction_freq", three("FrequencyCorrection_", "Low", "Normal", "High", 2.0, 12.0));
  s.set("swa_angular_velocity_max", two("AngularVelocity_", "Normal", "High", 6.0));
  // Finite-sample ApEn estimates can dip slightly below zero.
  s.set("swa_apen", {{"ApproximateEntropySWA_Low", -kInf, 0.3},
                     {"ApproximateEntropySWA_Medium", 0.3, 0.8},
                     {"ApproximateEntropySWA_High", 0.8, kInf}});
  s.set("mean_yaw_abs", three("MeanYaw_", "Small", "Large", "Extreme", 1.0, 2.5));
  s.set("max_yaw_abs", three("Yaw_", "Small", "Large", "Extreme", 1.0, 2.5));
  s.set("var_yaw", three("VarYaw_", "Small", "Large", "Extreme", 0.25, 1.0));
  s.set("yaw_apen", {{"ApproximateEntropyYaw_Low", -kInf, 0.3},
                     {"ApproximateEntropyYaw_Medium", 0.3, 0.8},
                     {"ApproximateEntropyYaw_High", 0.8, kInf}});
  s.set("yaw_accel_max", three("AccelerationYawRate_", "Low", "Medium", "High", 1.0, 2.5));
  s.set("lat_accel_range", two("LateralAcceleration_", "Normal", "High", 2.0));
  s.set("lane_std", three("LaneDeviation_", "Small", "Large", "Extreme", 0.3, 0.6));
  s.set("lane_crossings", three("LaneCrossing_", "None", "Few", "Many", 1.0, 3.0));
  s.set("perclos80", three("PERCLOS_", "Normal", "Elevated", "Critical", 0.15, 0.4));
  s.set("blink_freq", two("BlinkFrequency_", "Normal", "High", 20.0));
  s.set("blink_dur_mean", two("BlinkDuration_", "Short", "Long", 0.3));
  s.set("microsleep_count", two("MicroSleep_", "None", "Present", 1.0));
  s.set("yawn_count", three("Yawn_", "None", "Occasional", "Frequent", 1.0, 3.0));
  s.set("yawn_freq", two("YawnFrequency_", "Low", "High", 0.5));
  s.set("head_ewma", {{"HeadPitch_Down", -kInf, -15.0}, {"HeadPitch_Normal", -15.0, 15.0}, {"HeadPitch_Up", 15.0, kInf}});
  s.set("head_ewvar", two("HeadVariance_", "Low", "High", 25.0));
  s.set("gaze_persac", two("Saccade_", "Normal", "High", 0.1));
  s.set_by_sex("mean_bpm", Sex::male, heart_rate(50.0, 65.0, 75.0, 100.0));
  s.set_by_sex("mean_bpm", Sex::female, heart_rate(45.0, 63.0, 70.0, 95.0));
  s.set_by_sex("mean_bpm", Sex::unspecified, heart_rate(50.0, 65.0, 75.0, 100.0));
  return s;
}

double bound_from_json(const json& v, double infinity, const std::string& feature) {
  if (v.is_null()) return infinity;
  if (!v.is_number()) throw SchemeError(feature, "band bound must be a number or null");
  return v.get<double>();
}

BandSet bands_from_json(const json& arr, const std::string& feature) {
  if (!arr.is_array()) throw SchemeError(feature, "expected an array of bands");
  BandSet bands;
  for (const auto& b : arr) {
    if (!b.is_object() || !b.contains("label") || !b["label"].is_string()) {
      throw SchemeError(feature, "each band needs a string 'label'");
    }
    bands.push_back({b["label"].get<std::string>(), bound_from_json(b.value("lower", json()), -kInf, feature),
                     bound_from_json(b.value("upper", json()), kInf, feature)});
  }
  return bands;
}

json bound_to_json(double v) { return std::isinf(v) ? json(nullptr) : json(v); }

json bands_to_json(const BandSet& bands) {
  json arr = json::array();
  for (const auto& b : bands) {
    arr.push_back({{"label", b.label}, {"lower", bound_to_json(b.lower)}, {"upper", bound_to_json(b.upper)}});
  }
  return arr;
}

const FeatureBinding& require_binding(std::string_view feature) {
  const FeatureBinding* b = find_binding(feature);
  if (!b) throw SchemeError(std::string(feature), "unknown feature");
  return *b;
}

}  // namespace

const std::vector<FeatureBinding>& feature_bindings() { return kBindings; }

const FeatureBinding* find_binding(std::string_view feature) noexcept {
  for (const auto& b : kBindings) {
    if (b.feature == feature) return &b;
  }
  return nullptr;
}

void validate_bands(std::string_view feature, const BandSet& input, FeatureDomain domain) {
  const std::string name(feature);
  if (input.empty()) throw SchemeError(name, "empty band set");
  BandSet bands = input;
  std::stable_sort(bands.begin(), bands.end(), [](const Band& a, const Band& b) { return a.lower < b.lower; });

  for (const auto& b : bands) {
    if (b.label.empty()) throw SchemeError(name, "band with empty label");
    if (std::isnan(b.lower) || std::isnan(b.upper) || !(b.lower < b.upper)) {
      throw SchemeError(name, "band '" + b.label + "' has empty interval " + interval_text(b.lower, b.upper));
    }
  }
  const double domain_start = domain == FeatureDomain::real ? -kInf : 0.0;
  if (bands.front().lower > domain_start) {
    throw SchemeError(name, "gap " + interval_text(domain_start, bands.front().lower));
  }
  for (std::size_t i = 1; i < bands.size(); ++i) {
    const Band& prev = bands[i - 1];
    const Band& next = bands[i];
    if (next.lower < prev.upper) {
      throw SchemeError(name, "overlap " + interval_text(next.lower, std::min(prev.upper, next.upper)));
    }
    if (next.lower > prev.upper) throw SchemeError(name, "gap " + interval_text(prev.upper, next.lower));
  }
  if (bands.back().upper != kInf) throw SchemeError(name, "gap " + interval_text(bands.back().upper, kInf));
}

void QualificationScheme::set(std::string_view feature, BandSet bands) {
  const auto& binding = require_binding(feature);
  validate_bands(feature, bands, binding.domain);
  std::stable_sort(bands.begin(), bands.end(), [](const Band& a, const Band& b) { return a.lower < b.lower; });
  plain_[std::string(feature)] = std::move(bands);
}

void QualificationScheme::set_by_sex(std::string_view feature, Sex sex, BandSet bands) {
  const auto& binding = require_binding(feature);
  validate_bands(feature, bands, binding.domain);
  std::stable_sort(bands.begin(), bands.end(), [](const Band& a, const Band& b) { return a.lower < b.lower; });
  auto it = by_sex_.find(feature);
  if (it == by_sex_.end()) it = by_sex_.emplace(std::string(feature), std::map<Sex, BandSet>{}).first;
  it->second[sex] = std::move(bands);
}

const BandSet* QualificationScheme::find(std::string_view feature, const DriverProfile& profile) const {
  if (auto it = by_sex_.find(feature); it != by_sex_.end()) {
    if (auto s = it->second.find(profile.sex); s != it->second.end()) return &s->second;
    if (auto s = it->second.find(Sex::unspecified); s != it->second.end()) return &s->second;
  }
  if (auto it = plain_.find(feature); it != plain_.end()) return &it->second;
  return nullptr;
}

bool QualificationScheme::has(std::string_view feature) const {
  return plain_.find(feature) != plain_.end() || by_sex_.find(feature) != by_sex_.end();
}

std::vector<std::string> QualificationScheme::labels() const {
  std::set<std::string> out;
  for (const auto& [f, bands] : plain_) {
    for (const auto& b : bands) out.insert(b.label);
  }
  for (const auto& [f, per_sex] : by_sex_) {
    for (const auto& [sex, bands] : per_sex) {
      for (const auto& b : bands) out.insert(b.label);
    }
  }
  return {out.begin(), out.end()};
}

const QualificationScheme& default_scheme() {
  static const QualificationScheme scheme = build_default_scheme();
  return scheme;
}

QualificationScheme load_scheme(std::string_view config) {
  QualificationScheme scheme = default_scheme();
  if (config.find_first_not_of(" \t\r\n") == std::string_view::npos) return scheme;

  json doc;
  try {
    doc = json::parse(config);
  } catch (const json::parse_error& e) {
    throw DecodeError("scheme parse error at byte " + std::to_string(e.byte) + ": " + e.what());
  }
  if (!doc.is_object()) throw DecodeError("scheme must be a JSON object");

  for (const auto& [feature, value] : doc.items()) {
    require_binding(feature);
    QualificationScheme replacement;
    if (value.is_array()) {
      replacement.set(feature, bands_from_json(value, feature));
    } else if (value.is_object() && value.contains("by_sex") && value["by_sex"].is_object()) {
      for (const auto& [sex, bands] : value["by_sex"].items()) {
        Sex s{};
        try {
          s = sex_from_name(sex);
        } catch (const ArgumentError&) {
          throw SchemeError(feature, "unknown sex '" + sex + "'");
        }
        replacement.set_by_sex(feature, s, bands_from_json(bands, feature));
      }
    } else {
      throw SchemeError(feature, "expected a band array or {\"by_sex\": {...}}");
    }
    scheme.plain_.erase(feature);
    scheme.by_sex_.erase(feature);
    if (auto it = replacement.plain_.find(feature); it != replacement.plain_.end()) {
      scheme.plain_[feature] = it->second;
    }
    if (auto it = replacement.by_sex_.find(feature); it != replacement.by_sex_.end()) {
      scheme.by_sex_[feature] = it->second;
    }
  }
  return scheme;
}

std::string scheme_to_json(const QualificationScheme& scheme) {
  json doc = json::object();
  for (const auto& [feature, bands] : scheme.plain()) doc[feature] = bands_to_json(bands);
  for (const auto& [feature, per_sex] : scheme.by_sex()) {
    json sexes = json::object();
    for (const auto& [sex, bands] : per_sex) sexes[std::string(sex_name(sex))] = bands_to_json(bands);
    doc[feature] = {{"by_sex", std::move(sexes)}};
  }
  return doc.dump(2) + "\n";
}

void check_labels(const QualificationScheme& scheme, const Taxonomy& taxonomy) {
  for (const auto& label : scheme.labels()) {
    if (!taxonomy.contains(label)) throw UnknownClass(label);
  }
}

const Band& classify_value(const BandSet& bands, std::string_view feature, double value) {
  for (const auto& b : bands) {
    if (b.contains(value)) return b;
  }
  throw RangeError(std::string(feature), 0, "value " + text_util::format_double(value) + " outside every band");
}

std::string individual_name(std::string_view feature, double window_start) {
  return std::string(feature) + "@" + text_util::format_double(window_start);
}

std::vector<QualifiedFact> qualify(const FeatureVector& fv, const QualificationScheme& scheme,
                                   const DriverProfile& profile) {
  std::vector<QualifiedFact> facts;
  for (const auto& field : feature_fields()) {
    const auto value = fv.*field.member;
    if (!value) continue;
    const BandSet* bands = scheme.find(field.name, profile);
    if (!bands) throw UnboundFeature(std::string(field.name));
    const Band& band = classify_value(*bands, field.name, *value);
    const FeatureBinding* binding = find_binding(field.name);
    facts.push_back({individual_name(field.name, fv.window_start), band.label, *value, fv.window_start,
                     fv.window_end, std::string(field.name), binding ? std::string(binding->property) : ""});
  }
  return facts;
}

}  // namespace fatigue
