#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fatigue/signal.hpp"

namespace fatigue {

/// Windowed numeric features. A field is absent when its input channels were
/// missing or too sparse in the window.
struct FeatureVector {
  double window_start = 0.0;
  double window_end = 0.0;

  // steering wheel
  std::optional<double> mean_swa_abs;
  std::optional<double> max_swa_abs;
  std::optional<double> swa_correction_freq;       // per minute
  std::optional<double> swa_angular_velocity_max;  // deg/s
  std::optional<double> swa_apen;
  // yaw
  std::optional<double> mean_yaw_abs;
  std::optional<double> max_yaw_abs;
  std::optional<double> var_yaw;
  std::optional<double> yaw_apen;
  std::optional<double> yaw_accel_max;  // deg/s^2
  // kinematics
  std::optional<double> lat_accel_range;
  std::optional<double> lane_std;
  std::optional<double> lane_crossings;
  // eyes, mouth, head, gaze
  std::optional<double> perclos80;
  std::optional<double> blink_freq;  // per minute
  std::optional<double> blink_dur_mean;
  std::optional<double> microsleep_count;
  std::optional<double> yawn_count;
  std::optional<double> yawn_freq;  // per minute
  std::optional<double> head_ewma;
  std::optional<double> head_ewvar;
  std::optional<double> gaze_persac;
  // physiology
  std::optional<double> mean_bpm;

  /// Copies every present field of `other` into this vector.
  void merge(const FeatureVector& other);

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
};

struct FeatureField {
  std::string_view name;
  std::optional<double> FeatureVector::*member;
};

inline constexpr std::size_t kFeatureCount = 23;

/// Every optional field of FeatureVector, in declaration order.
const std::array<FeatureField, kFeatureCount>& feature_fields() noexcept;

std::optional<double> feature_value(const FeatureVector& fv, std::string_view name);

/// Flat JSON object, absent fields omitted.
std::string to_json(const FeatureVector& fv);

/// Absolute ApEn parameters: embedding length m and tolerance r.
struct ApEnParams {
  std::size_t m = 2;
  double r = 0.2;
};

/// ApEn settings where the tolerance scales with the series' standard deviation.
struct ApEnConfig {
  std::size_t m = 2;
  double r_factor = 0.2;
  friend bool operator==(const ApEnConfig&, const ApEnConfig&) = default;
};

/// Approximate entropy Phi^m(r) - Phi^{m+1}(r), Chebyshev template distance,
/// self-matches included. Requires x.size() >= m + 2 and r > 0.
double approximate_entropy(std::span<const double> x, ApEnParams p);

double mean(std::span<const double> x);
/// Population variance (divides by N).
double variance(std::span<const double> x);

struct FeatureParams {
  ApEnConfig apen;
  double correction_threshold = 6.0;   // degrees
  double correction_hysteresis = 0.5;  // degrees
  double half_lane_width = 1.75;       // meters
  double eye_closed_threshold = 0.8;
  double blink_min_duration = 0.2;       // seconds
  double microsleep_min_duration = 0.5;  // seconds
  double yawn_ratio = 0.6;
  double yawn_min_duration = 3.0;  // seconds
  double head_alpha = 0.1;
  double saccade_speed = 30.0;  // deg/s

  friend bool operator==(const FeatureParams&, const FeatureParams&) = default;
};

/// Upward crossings of |x| through `threshold`; re-arms once |x| falls below
/// threshold - hysteresis. A series that starts above threshold is not counted.
std::size_t count_upcrossings(std::span<const double> x, double threshold, double hysteresis);

/// Seconds of trace covered by the window's frames: each frame spans the gap
/// to its successor; the last spans the mean spacing, clipped at end_t.
std::vector<double> frame_durations(const Window& w, std::span<const double> t);

FeatureVector swa_features(const Window& w, const FeatureParams& p = {});
FeatureVector yaw_features(const Window& w, const FeatureParams& p = {});
FeatureVector kinematics_features(const Window& w, const FeatureParams& p = {});
FeatureVector eye_features(const Window& w, const FeatureParams& p = {});
/// PERCLOS only; the pipeline runs it over a longer trailing window.
std::optional<double> perclos(const Window& w, double closed_threshold);
FeatureVector mouth_features(const Window& w, const FeatureParams& p = {});
FeatureVector head_features(const Window& w, double alpha);
FeatureVector gaze_features(const Window& w, double saccade_speed);
FeatureVector physiology_features(const Window& w);

struct ReactionTimes {
  double visual = 0.0;    // obstacle visible -> physical reaction
  double physical = 0.0;  // physical reaction -> movement
  double movement = 0.0;  // movement -> vehicle response
  double total = 0.0;     // obstacle visible -> vehicle response
};

ReactionTimes reaction_times(const ObstacleEvent& e);

/// Result of running every extractor over one window.
struct ExtractionResult {
  FeatureVector features;
  /// One line per extractor that failed for a reason other than a missing
  /// channel ("swa: ..."). Non-empty means the window is degraded.
  std::vector<std::string> issues;
};

ExtractionResult extract_features(const Window& w, const FeatureParams& p = {});

}  // namespace fatigue
