#pragma once

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fatigue/features.hpp"
#include "fatigue/kstore.hpp"
#include "fatigue/signal.hpp"

namespace fatigue {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Half-open interval [lower, upper) mapped to a class label. Infinite bounds
/// are written as null in JSON.
struct Band {
  std::string label;
  double lower = -kInf;
  double upper = kInf;

  bool contains(double v) const noexcept { return v >= lower && v < upper; }
  friend bool operator==(const Band&, const Band&) = default;
};

/// Ordered, contiguous bands for one feature.
using BandSet = std::vector<Band>;

enum class FeatureDomain { non_negative, real };

/// Static description of how a feature enters the knowledge store.
struct FeatureBinding {
  std::string_view feature;
  std::string_view family;    // taxonomy class grouping the qualification labels
  std::string_view property;  // data property recording the measured value
  FeatureDomain domain;
};

const std::vector<FeatureBinding>& feature_bindings();
const FeatureBinding* find_binding(std::string_view feature) noexcept;

/// Threshold bands for every feature; mean_bpm bands depend on the driver's sex.
class QualificationScheme {
 public:
  QualificationScheme() = default;

  /// Validates and stores; throws SchemeError on gaps, overlaps or bad coverage.
  void set(std::string_view feature, BandSet bands);
  void set_by_sex(std::string_view feature, Sex sex, BandSet bands);

  /// Band set to use for `feature` under `profile`, or nullptr if unbound.
  const BandSet* find(std::string_view feature, const DriverProfile& profile) const;
  bool has(std::string_view feature) const;

  const std::map<std::string, BandSet, std::less<>>& plain() const noexcept { return plain_; }
  const std::map<std::string, std::map<Sex, BandSet>, std::less<>>& by_sex() const noexcept { return by_sex_; }

  /// Every label named by any band.
  std::vector<std::string> labels() const;

  friend bool operator==(const QualificationScheme&, const QualificationScheme&) = default;
  friend QualificationScheme load_scheme(std::string_view config);

 private:
  std::map<std::string, BandSet, std::less<>> plain_;
  std::map<std::string, std::map<Sex, BandSet>, std::less<>> by_sex_;
};

/// Throws SchemeError describing the first gap/overlap/coverage problem.
void validate_bands(std::string_view feature, const BandSet& bands, FeatureDomain domain);

const QualificationScheme& default_scheme();

/// Parses `{feature: [{label, lower, upper}, ...], mean_bpm: {"by_sex": {...}}}`.
/// Features not mentioned keep their default bands; empty input yields the
/// default scheme.
QualificationScheme load_scheme(std::string_view config);
std::string scheme_to_json(const QualificationScheme& scheme);

/// Checks every label against the taxonomy; throws UnknownClass.
void check_labels(const QualificationScheme& scheme, const Taxonomy& taxonomy);

/// Label of the band containing `value`; throws RangeError when outside the
/// covered domain.
const Band& classify_value(const BandSet& bands, std::string_view feature, double value);

/// `<feature>@<window_start>` with the shortest round-trip number form.
std::string individual_name(std::string_view feature, double window_start);

/// One fact per present feature. Throws UnboundFeature when a present feature
/// has no band set.
std::vector<QualifiedFact> qualify(const FeatureVector& fv, const QualificationScheme& scheme,
                                   const DriverProfile& profile);

}  // namespace fatigue
