#include <cmath>

#include "fatigue/rules.hpp"

namespace fatigue {

std::string_view level_name(Level l) noexcept {
  switch (l) {
    case Level::Low: return "Low";
    case Level::Medium: return "Medium";
    case Level::High: break;
  }
  return "High";
}

Level level_from_name(std::string_view name) {
  if (name == "Low") return Level::Low;
  if (name == "Medium") return Level::Medium;
  if (name == "High") return Level::High;
  throw ArgumentError("unknown fatigue level '" + std::string(name) + "'");
}

const std::vector<FatigueSource>& default_fatigue_sources() {
  static const std::vector<FatigueSource> sources = {
      {"SteeringWheel",
       "SteeringWheelMeasurementFatigue",
       {{Level::Low, "SteeringWheelMeasurmentFatigue_Low"},
        {Level::Medium, "SteeringWheelMeasurmentFatigue_Medium"},
        {Level::High, "SteeringWheelMeasurmentFatigue_High"}}},
      {"YawAngle",
       "YawAngleMeasurementFatigue",
       {{Level::Low, "YawAngleMeasurmentFatigue_Low"},
        {Level::Medium, "YawAngleMeasurmentFatigue_Medium"},
        {Level::High, "YawAngleMeasurmentFatigue_High"}}},
  };
  return sources;
}

std::vector<FatigueLevel> read_fatigue(const FactBase& fb, const std::vector<FatigueSource>& sources) {
  const Taxonomy& tax = fb.taxonomy();
  std::vector<FatigueLevel> out;
  for (const auto& source : sources) {
    if (!tax.contains(source.anchor_class)) continue;
    std::optional<Level> best;
    for (const auto& ind : fb.query_class(source.anchor_class)) {
      std::vector<std::pair<Level, const std::string*>> held;
      for (const auto& [level, cls] : source.level_classes) {
        if (tax.contains(cls) && fb.entails(ind, cls)) held.emplace_back(level, &cls);
      }
      // Drop classes that are strict superclasses of another held class.
      std::vector<Level> specific;
      for (const auto& [level, cls] : held) {
        bool general = false;
        for (const auto& [other_level, other] : held) {
          if (other != cls && *other != *cls && tax.is_subclass_of(*other, *cls)) general = true;
        }
        if (!general) specific.push_back(level);
      }
      if (specific.empty()) continue;
      for (Level l : specific) {
        if (l != specific.front()) {
          throw AmbiguityError("individual '" + ind + "' is classified at several " + source.name + " levels");
        }
      }
      if (!best || encode(specific.front()) > encode(*best)) best = specific.front();
    }
    if (best) out.push_back({source.name, *best});
  }
  return out;
}

FusionWeights::FusionWeights() : weights_{{"SteeringWheel", 1.0}, {"YawAngle", 1.0}} {}

FusionWeights::FusionWeights(std::map<std::string, double> weights) {
  bool positive = false;
  for (auto& [source, w] : weights) {
    if (!std::isfinite(w) || w < 0.0) throw ArgumentError("fusion weight for '" + source + "' must be >= 0");
    positive |= w > 0.0;
    weights_.emplace(source, w);
  }
  if (!positive) throw ArgumentError("at least one fusion weight must be positive");
}

double FusionWeights::weight(std::string_view source) const noexcept {
  auto it = weights_.find(source);
  return it == weights_.end() ? 0.0 : it->second;
}

double fusion_score(std::span<const FatigueLevel> levels, const FusionWeights& w) {
  if (levels.empty()) throw EmptyInput("fusion needs at least one level");
  double weighted = 0.0;
  double total = 0.0;
  for (const auto& l : levels) {
    const double wi = w.weight(l.source);
    weighted += wi * encode(l.level);
    total += wi;
  }
  if (!(total > 0.0)) throw ArgumentError("no positive fusion weight among the present sources");
  return weighted / total;
}

FatigueLevel fuse(std::span<const FatigueLevel> levels, const FusionWeights& w, FusionCutoffs cutoffs) {
  const double score = fusion_score(levels, w);
  Level level = Level::High;
  if (score < cutoffs.medium) {
    level = Level::Low;
  } else if (score < cutoffs.high) {
    level = Level::Medium;
  }
  return {std::string(kOverallSource), level};
}

}  // namespace fatigue
