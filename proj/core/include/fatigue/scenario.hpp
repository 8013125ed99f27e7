#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "fatigue/signal.hpp"

namespace fatigue {

enum class Regime { alert, drowsy };

std::string_view regime_name(Regime r) noexcept;

struct ScenarioSegment {
  double start = 0.0;
  double end = 0.0;
  Regime regime = Regime::alert;
  std::uint64_t seed = 0;
  friend bool operator==(const ScenarioSegment&, const ScenarioSegment&) = default;
};

/// A synthetic drive. Time not covered by a segment is driven in the alert
/// regime with seed 0.
struct ScenarioSpec {
  double duration = 0.0;      // seconds
  double sample_rate = 10.0;  // Hz
  std::vector<ScenarioSegment> segments;
  DriverProfile profile;

  /// Throws SpecError on a non-positive rate or duration and on overlapping
  /// or out-of-range segments.
  void validate() const;
  friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

/// `{"duration": s, "sample_rate": hz, "profile": {"sex": ...},
///   "segments": [{"start", "end", "regime", "seed"}]}`; throws SpecError.
ScenarioSpec load_scenario(std::string_view json);

/// Deterministic for a given spec on every platform.
std::vector<SignalFrame> generate_scenario(const ScenarioSpec& spec);

}  // namespace fatigue
