#include "fatigue/kstore.hpp"

#include <cmath>

#include "fatigue/error.hpp"

namespace fatigue {

namespace {

struct Family {
  const char* parent;
  const char* family;
  std::vector<const char*> members;
};

Taxonomy build_default_taxonomy() {
  Taxonomy t;
  for (const char* root : {"Vehicle_Measure", "Physical_measure", "Physiological_measure"}) t.add_class(root);

  const std::vector<std::pair<const char*, const char*>> groups = {
      {"SteeringWheelAngleMeasurement", "Vehicle_Measure"},
      {"YawAngleMeasurement", "Vehicle_Measure"},
      {"Acceleration_measure", "Vehicle_Measure"},
      {"LanePosition_measure", "Vehicle_Measure"},
      {"VehicleBasedMeasurementFatigue", "Vehicle_Measure"},
      {"Facial_measure", "Physical_measure"},
      {"Eye_measure", "Facial_measure"},
      {"Mouth_measure", "Facial_measure"},
      {"Head_measure", "Facial_measure"},
      {"Gaze_measure", "Facial_measure"},
  };
  for (const auto& [label, parent] : groups) t.add_class(label, {parent});

  const std::vector<Family> families = {
      {"SteeringWheelAngleMeasurement", "MeanSWA", {"MeanSWA_Small", "MeanSWA_Large", "MeanSWA_Extreme"}},
      {"SteeringWheelAngleMeasurement",
       "FrequencySWA",
       {"FrequencyCorrection_Low", "FrequencyCorrection_Normal", "FrequencyCorrection_High"}},
      {"SteeringWheelAngleMeasurement", "SWA_measure", {"SWA_Small", "SWA_Large", "SWA_Extreme"}},
      {"SteeringWheelAngleMeasurement",
       "ApproximateEntropySWA",
       {"ApproximateEntropySWA_Low", "ApproximateEntropySWA_Medium", "ApproximateEntropySWA_High"}},
      {"SteeringWheelAngleMeasurement", "AngularVelocity", {"AngularVelocity_Normal", "AngularVelocity_High"}},
      {"YawAngleMeasurement", "MeanYaw", {"MeanYaw_Small", "MeanYaw_Large", "MeanYaw_Extreme"}},
      {"YawAngleMeasurement", "VarYaw", {"VarYaw_Small", "VarYaw_Large", "VarYaw_Extreme"}},
      {"YawAngleMeasurement", "Yaw_measure", {"Yaw_Small", "Yaw_Large", "Yaw_Extreme"}},
      {"YawAngleMeasurement",
       "ApproximateEntropyYaw",
       {"ApproximateEntropyYaw_Low", "ApproximateEntropyYaw_Medium", "ApproximateEntropyYaw_High"}},
      {"YawAngleMeasurement",
       "AccelerationYawRate",
       {"AccelerationYawRate_Low", "AccelerationYawRate_Medium", "AccelerationYawRate_High"}},
      {"Acceleration_measure", "LateralAcceleration", {"LateralAcceleration_Normal", "LateralAcceleration_High"}},
      {"LanePosition_measure", "LaneDeviation", {"LaneDeviation_Small", "LaneDeviation_Large", "LaneDeviation_Extreme"}},
      {"LanePosition_measure", "LaneCrossing", {"LaneCrossing_None", "LaneCrossing_Few", "LaneCrossing_Many"}},
      {"VehicleBasedMeasurementFatigue",
       "SteeringWheelMeasurementFatigue",
       {"SteeringWheelMeasurmentFatigue_Low", "SteeringWheelMeasurmentFatigue_Medium",
        "SteeringWheelMeasurmentFatigue_High"}},
      {"VehicleBasedMeasurementFatigue",
       "YawAngleMeasurementFatigue",
       {"YawAngleMeasurmentFatigue_Low", "YawAngleMeasurmentFatigue_Medium", "YawAngleMeasurmentFatigue_High"}},
      {"Eye_measure", "EyeClosure", {"PERCLOS_Normal", "PERCLOS_Elevated", "PERCLOS_Critical"}},
      {"Eye_measure", "BlinkFrequency", {"BlinkFrequency_Normal", "BlinkFrequency_High"}},
      {"Eye_measure", "BlinkDuration", {"BlinkDuration_Short", "BlinkDuration_Long"}},
      {"Eye_measure", "MicroSleep", {"MicroSleep_None", "MicroSleep_Present"}},
      {"Mouth_measure", "Yawn", {"Yawn_None", "Yawn_Occasional", "Yawn_Frequent"}},
      {"Mouth_measure", "YawnFrequency", {"YawnFrequency_Low", "YawnFrequency_High"}},
      {"Head_measure", "HeadPitch", {"HeadPitch_Down", "HeadPitch_Normal", "HeadPitch_Up"}},
      {"Head_measure", "HeadVariance", {"HeadVariance_Low", "HeadVariance_High"}},
      {"Gaze_measure", "Saccade", {"Saccade_Normal", "Saccade_High"}},
      {"Physiological_measure", "HeartRate", {"BPM_Atypical", "BPM_Drowsy", "BPM_Intermediate", "BPM_Normal"}},
  };
  for (const auto& f : families) {
    t.add_class(f.family, {f.parent});
    for (const char* m : f.members) t.add_class(m, {f.family});
  }
  return t;
}

}  // namespace

// ---------------------------------------------------------------------------
// Taxonomy

void Taxonomy::require(std::string_view label) const {
  if (!contains(label)) throw UnknownClass(std::string(label));
}

bool Taxonomy::contains(std::string_view label) const { return descendants_.find(label) != descendants_.end(); }

void Taxonomy::add_class(const std::string& label, const std::vector<std::string>& parents) {
  if (label.empty()) throw ArgumentError("class label must be non-empty");
  for (const auto& p : parents) require(p);
  if (classes_.insert(label).second) {
    descendants_[label] = {label};
    ancestors_[label] = {label};
  }
  for (const auto& p : parents) add_subclass(label, p);
}

void Taxonomy::add_subclass(const std::string& child, const std::string& parent) {
  require(child);
  require(parent);
  if (edges_.count({child, parent})) return;
  if (descendants_.find(child)->second.count(parent)) {
    throw ArgumentError("subclass edge " + child + " -> " + parent + " would create a cycle");
  }
  edges_.emplace(child, parent);
  const std::set<std::string> below = descendants_.find(child)->second;
  const std::set<std::string> above = ancestors_.find(parent)->second;
  for (const auto& a : above) descendants_.find(a)->second.insert(below.begin(), below.end());
  for (const auto& d : below) ancestors_.find(d)->second.insert(above.begin(), above.end());
}

const std::set<std::string>& Taxonomy::descendants(std::string_view label) const {
  auto it = descendants_.find(label);
  if (it == descendants_.end()) throw UnknownClass(std::string(label));
  return it->second;
}

bool Taxonomy::is_subclass_of(std::string_view child, std::string_view ancestor) const {
  require(child);
  return descendants(ancestor).count(std::string(child)) > 0;
}

const Taxonomy& default_taxonomy() {
  static const Taxonomy taxonomy = build_default_taxonomy();
  return taxonomy;
}

// ---------------------------------------------------------------------------
// FactBase

FactBase::FactBase(std::shared_ptr<const Taxonomy> taxonomy, double timestamp)
    : taxonomy_(std::move(taxonomy)), timestamp_(timestamp) {
  if (!taxonomy_) throw ArgumentError("fact base needs a taxonomy");
}

bool FactBase::insert(const Membership& m) {
  if (m.individual.empty()) throw ArgumentError("individual must be non-empty");
  if (!taxonomy_->contains(m.class_label)) throw UnknownClass(m.class_label);
  return memberships_.insert(m).second;
}

bool FactBase::insert(const DataProperty& p) {
  if (p.individual.empty() || p.property.empty()) throw ArgumentError("data property needs individual and name");
  if (!std::isfinite(p.value)) throw ArgumentError("data property '" + p.property + "' value is not finite");
  auto [it, inserted] = data_properties_.try_emplace({p.individual, p.property}, p.value);
  if (!inserted && it->second != p.value) {
    throw ArgumentError("conflicting value for " + p.individual + "." + p.property);
  }
  return inserted;
}

FactBase FactBase::with(const Membership& m) const {
  FactBase next = *this;
  next.insert(m);
  return next;
}

FactBase FactBase::with(const DataProperty& p) const {
  FactBase next = *this;
  next.insert(p);
  return next;
}

FactBase FactBase::with(const QualifiedFact& f) const {
  FactBase next = *this;
  next.insert(Membership{f.individual, f.class_label});
  if (!f.property.empty()) next.insert(DataProperty{f.individual, f.property, f.value});
  return next;
}

bool FactBase::entails(std::string_view individual, std::string_view class_label) const {
  for (const auto& c : taxonomy_->descendants(class_label)) {
    if (memberships_.count(Membership{std::string(individual), c})) return true;
  }
  return false;
}

std::set<std::string> FactBase::query_class(std::string_view class_label) const {
  const auto& below = taxonomy_->descendants(class_label);
  std::set<std::string> out;
  for (const auto& m : memberships_) {
    if (below.count(m.class_label)) out.insert(m.individual);
  }
  return out;
}

std::optional<double> FactBase::get_value(std::string_view individual, std::string_view property) const {
  auto it = data_properties_.find({std::string(individual), std::string(property)});
  if (it == data_properties_.end()) return std::nullopt;
  return it->second;
}

std::set<std::string> FactBase::individuals() const {
  std::set<std::string> out;
  for (const auto& m : memberships_) out.insert(m.individual);
  for (const auto& [key, value] : data_properties_) out.insert(key.first);
  return out;
}

bool operator==(const FactBase& a, const FactBase& b) {
  return *a.taxonomy_ == *b.taxonomy_ && a.timestamp_ == b.timestamp_ && a.memberships_ == b.memberships_ &&
         a.data_properties_ == b.data_properties_;
}

FactBase assert_fact(const FactBase& fb, const Membership& m) { return fb.with(m); }
FactBase assert_fact(const FactBase& fb, const DataProperty& p) { return fb.with(p); }
FactBase assert_fact(const FactBase& fb, const QualifiedFact& f) { return fb.with(f); }

std::string_view engine_version() noexcept { return "fatigue " FATIGUE_VERSION; }

}  // namespace fatigue
