#include "fatigue/features.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "fatigue/error.hpp"

namespace fatigue {

namespace {

// Durations derived from sampled timestamps carry rounding error.
constexpr double kTimeEps = 1e-9;

constexpr std::array<FeatureField, kFeatureCount> kFields = {{
    {"mean_swa_abs", &FeatureVector::mean_swa_abs},
    {"max_swa_abs", &FeatureVector::max_swa_abs},
    {"swa_correction_freq", &FeatureVector::swa_correction_freq},
    {"swa_angular_velocity_max", &FeatureVector::swa_angular_velocity_max},
    {"swa_apen", &FeatureVector::swa_apen},
    {"mean_yaw_abs", &FeatureVector::mean_yaw_abs},
    {"max_yaw_abs", &FeatureVector::max_yaw_abs},
    {"var_yaw", &FeatureVector::var_yaw},
    {"yaw_apen", &FeatureVector::yaw_apen},
    {"yaw_accel_max", &FeatureVector::yaw_accel_max},
    {"lat_accel_range", &FeatureVector::lat_accel_range},
    {"lane_std", &FeatureVector::lane_std},
    {"lane_crossings", &FeatureVector::lane_crossings},
    {"perclos80", &FeatureVector::perclos80},
    {"blink_freq", &FeatureVector::blink_freq},
    {"blink_dur_mean", &FeatureVector::blink_dur_mean},
    {"microsleep_count", &FeatureVector::microsleep_count},
    {"yawn_count", &FeatureVector::yawn_count},
    {"yawn_freq", &FeatureVector::yawn_freq},
    {"head_ewma", &FeatureVector::head_ewma},
    {"head_ewvar", &FeatureVector::head_ewvar},
    {"gaze_persac", &FeatureVector::gaze_persac},
    {"mean_bpm", &FeatureVector::mean_bpm},
}};

FeatureVector empty_for(const Window& w) {
  FeatureVector fv;
  fv.window_start = w.start_t;
  fv.window_end = w.end_t;
  return fv;
}

ChannelSeries require(const Window& w, Channel c, std::size_t min_samples) {
  ChannelSeries s = channel_series(w.frames, c);
  if (s.empty()) throw MissingChannel(std::string(channel_name(c)));
  if (s.size() < min_samples) {
    throw InsufficientData(std::string(channel_name(c)) + ": need " + std::to_string(min_samples) +
                           " samples, got " + std::to_string(s.size()));
  }
  return s;
}

double sum(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v;
  return acc;
}

std::vector<double> abs_values(std::span<const double> x) {
  std::vector<double> out(x.size());
  std::transform(x.begin(), x.end(), out.begin(), [](double v) { return std::abs(v); });
  return out;
}

// ApEn over the uniformly resampled series with r = r_factor * sigma.
// A constant series is perfectly regular; absent when too short.
std::optional<double> series_apen(std::span<const double> uniform, const ApEnConfig& cfg) {
  if (uniform.size() < cfg.m + 2) return std::nullopt;
  const double sigma = std::sqrt(variance(uniform));
  if (sigma == 0.0) return 0.0;
  return approximate_entropy(uniform, {cfg.m, cfg.r_factor * sigma});
}

struct Run {
  std::size_t first;
  std::size_t last;  // inclusive
  double duration;
};

// Maximal runs of samples satisfying `pred`, timed from the first sample of the
// run to the sample after it (or to the end of the last sample's span).
template <typename Pred>
std::vector<Run> runs(const ChannelSeries& s, std::span<const double> durations, Pred pred) {
  std::vector<Run> out;
  const std::size_t n = s.size();
  std::size_t i = 0;
  while (i < n) {
    if (!pred(s.value[i])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && pred(s.value[j + 1])) ++j;
    const double end = j + 1 < n ? s.t[j + 1] : s.t[j] + durations[j];
    out.push_back({i, j, end - s.t[i]});
    i = j + 1;
  }
  return out;
}

}  // namespace

const std::array<FeatureField, kFeatureCount>& feature_fields() noexcept { return kFields; }

std::optional<double> feature_value(const FeatureVector& fv, std::string_view name) {
  for (const auto& f : kFields) {
    if (f.name == name) return fv.*f.member;
  }
  throw ArgumentError("unknown feature '" + std::string(name) + "'");
}

void FeatureVector::merge(const FeatureVector& other) {
  for (const auto& f : kFields) {
    if (other.*f.member) this->*f.member = other.*f.member;
  }
}

std::string to_json(const FeatureVector& fv) {
  nlohmann::json j = nlohmann::json::object();
  j["window_start"] = fv.window_start;
  j["window_end"] = fv.window_end;
  for (const auto& f : kFields) {
    if (auto v = fv.*f.member) j[std::string(f.name)] = *v;
  }
  return j.dump();
}

std::size_t count_upcrossings(std::span<const double> x, double threshold, double hysteresis) {
  if (x.empty()) return 0;
  std::size_t count = 0;
  bool armed = std::abs(x[0]) < threshold;
  for (std::size_t k = 1; k < x.size(); ++k) {
    const double a = std::abs(x[k]);
    if (armed && a >= threshold) {
      ++count;
      armed = false;
    } else if (!armed && a < threshold - hysteresis) {
      armed = true;
    }
  }
  return count;
}

std::vector<double> frame_durations(const Window& w, std::span<const double> t) {
  std::vector<double> d(t.size(), 0.0);
  if (t.empty()) return d;
  for (std::size_t i = 0; i + 1 < t.size(); ++i) d[i] = t[i + 1] - t[i];
  if (t.size() >= 2) {
    const double spacing = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    d.back() = std::max(0.0, std::min(spacing, w.end_t - t.back()));
  }
  return d;
}

FeatureVector swa_features(const Window& w, const FeatureParams& p) {
  const ChannelSeries s = require(w, Channel::swa, 2);
  const auto magnitude = abs_values(s.value);
  const auto durations = frame_durations(w, s.t);
  const double observed = sum(durations);

  FeatureVector fv = empty_for(w);
  fv.mean_swa_abs = mean(magnitude);
  fv.max_swa_abs = *std::max_element(magnitude.begin(), magnitude.end());

  const auto crossings = count_upcrossings(s.value, p.correction_threshold, p.correction_hysteresis);
  fv.swa_correction_freq = observed > 0.0 ? static_cast<double>(crossings) * 60.0 / observed : 0.0;

  double velocity = 0.0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    velocity = std::max(velocity, std::abs((s.value[i] - s.value[i - 1]) / (s.t[i] - s.t[i - 1])));
  }
  fv.swa_angular_velocity_max = velocity;
  fv.swa_apen = series_apen(resample_series(s), p.apen);
  return fv;
}

FeatureVector yaw_features(const Window& w, const FeatureParams& p) {
  const ChannelSeries s = require(w, Channel::yaw, 3);
  const auto magnitude = abs_values(s.value);

  FeatureVector fv = empty_for(w);
  fv.mean_yaw_abs = mean(magnitude);
  fv.max_yaw_abs = *std::max_element(magnitude.begin(), magnitude.end());
  fv.var_yaw = variance(s.value);

  const auto uniform = resample_series(s);
  const double dt = (s.t.back() - s.t.front()) / static_cast<double>(s.size() - 1);
  double accel = 0.0;
  for (std::size_t i = 1; i + 1 < uniform.size(); ++i) {
    accel = std::max(accel, std::abs(uniform[i + 1] - 2.0 * uniform[i] + uniform[i - 1]) / (dt * dt));
  }
  fv.yaw_accel_max = accel;
  fv.yaw_apen = series_apen(uniform, p.apen);
  return fv;
}

FeatureVector kinematics_features(const Window& w, const FeatureParams& p) {
  FeatureVector fv = empty_for(w);
  const ChannelSeries lat = channel_series(w.frames, Channel::lat_accel);
  const ChannelSeries lane = channel_series(w.frames, Channel::lane_offset);

  if (lat.size() >= 2) {
    auto [lo, hi] = std::minmax_element(lat.value.begin(), lat.value.end());
    fv.lat_accel_range = *hi - *lo;
  }
  if (lane.size() >= 2) {
    fv.lane_std = std::sqrt(variance(lane.value));
    std::size_t crossings = 0;
    bool outside = std::abs(lane.value[0]) > p.half_lane_width;
    for (std::size_t i = 1; i < lane.size(); ++i) {
      const bool now = std::abs(lane.value[i]) > p.half_lane_width;
      if (now && !outside) ++crossings;
      outside = now;
    }
    fv.lane_crossings = static_cast<double>(crossings);
  }
  if (!fv.lat_accel_range && !fv.lane_std) {
    if (lat.empty() && lane.empty()) throw MissingChannel("lat_accel, lane_offset");
    throw InsufficientData("lat_accel/lane_offset: need 2 samples");
  }
  return fv;
}

std::optional<double> perclos(const Window& w, double closed_threshold) {
  const ChannelSeries s = channel_series(w.frames, Channel::eye_closure);
  if (s.size() < 2) return std::nullopt;
  const auto durations = frame_durations(w, s.t);
  const double total = sum(durations);
  if (!(total > 0.0)) return std::nullopt;
  double closed = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.value[i] >= closed_threshold) closed += durations[i];
  }
  return closed / total;
}

FeatureVector eye_features(const Window& w, const FeatureParams& p) {
  if (!(p.eye_closed_threshold > 0.0 && p.eye_closed_threshold < 1.0)) {
    throw ArgumentError("eye closed threshold must lie in (0,1)");
  }
  const ChannelSeries s = require(w, Channel::eye_closure, 2);
  const auto durations = frame_durations(w, s.t);
  const double observed = sum(durations);

  FeatureVector fv = empty_for(w);
  fv.perclos80 = perclos(w, p.eye_closed_threshold);

  std::size_t blinks = 0;
  std::size_t microsleeps = 0;
  double blink_time = 0.0;
  for (const Run& r : runs(s, durations, [&](double v) { return v >= p.eye_closed_threshold; })) {
    if (r.duration >= p.microsleep_min_duration - kTimeEps) {
      ++microsleeps;
    } else if (r.duration >= p.blink_min_duration - kTimeEps) {
      ++blinks;
      blink_time += r.duration;
    }
  }
  fv.blink_freq = observed > 0.0 ? static_cast<double>(blinks) * 60.0 / observed : 0.0;
  if (blinks > 0) fv.blink_dur_mean = blink_time / static_cast<double>(blinks);
  fv.microsleep_count = static_cast<double>(microsleeps);
  return fv;
}

FeatureVector mouth_features(const Window& w, const FeatureParams& p) {
  const ChannelSeries s = require(w, Channel::mouth_open, 1);
  const auto durations = frame_durations(w, s.t);
  const double observed = sum(durations);

  std::size_t yawns = 0;
  for (const Run& r : runs(s, durations, [&](double v) { return v >= p.yawn_ratio; })) {
    if (r.duration >= p.yawn_min_duration - kTimeEps) ++yawns;
  }
  FeatureVector fv = empty_for(w);
  fv.yawn_count = static_cast<double>(yawns);
  fv.yawn_freq = observed > 0.0 ? static_cast<double>(yawns) * 60.0 / observed : 0.0;
  return fv;
}

FeatureVector head_features(const Window& w, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ArgumentError("EWMA smoothing factor must lie in (0,1]");
  const ChannelSeries s = require(w, Channel::head_pitch, 1);

  double ewma = s.value[0];
  double ewvar = 0.0;
  for (std::size_t k = 1; k < s.size(); ++k) {
    const double delta = s.value[k] - ewma;
    ewvar = (1.0 - alpha) * (ewvar + alpha * delta * delta);
    ewma = alpha * s.value[k] + (1.0 - alpha) * ewma;
  }
  FeatureVector fv = empty_for(w);
  fv.head_ewma = ewma;
  fv.head_ewvar = ewvar;
  return fv;
}

FeatureVector gaze_features(const Window& w, double saccade_speed) {
  const ChannelSeries s = require(w, Channel::gaze_offset, 2);
  std::size_t saccadic = 0;
  for (std::size_t i = 1; i < s.size(); ++i) {
    if (std::abs((s.value[i] - s.value[i - 1]) / (s.t[i] - s.t[i - 1])) > saccade_speed) ++saccadic;
  }
  FeatureVector fv = empty_for(w);
  fv.gaze_persac = static_cast<double>(saccadic) / static_cast<double>(s.size() - 1);
  return fv;
}

FeatureVector physiology_features(const Window& w) {
  const ChannelSeries s = require(w, Channel::heart_bpm, 1);
  FeatureVector fv = empty_for(w);
  fv.mean_bpm = mean(s.value);
  return fv;
}

ReactionTimes reaction_times(const ObstacleEvent& e) {
  if (!(e.t_visible <= e.t_physical_reaction && e.t_physical_reaction <= e.t_movement &&
        e.t_movement <= e.t_vehicle_response)) {
    throw OrderingError("obstacle event timestamps must be non-decreasing");
  }
  return {
      e.t_physical_reaction - e.t_visible,
      e.t_movement - e.t_physical_reaction,
      e.t_vehicle_response - e.t_movement,
      e.t_vehicle_response - e.t_visible,
  };
}

ExtractionResult extract_features(const Window& w, const FeatureParams& p) {
  ExtractionResult result;
  result.features = empty_for(w);

  auto run = [&](std::string_view group, auto&& extractor) {
    try {
      result.features.merge(extractor());
    } catch (const MissingChannel&) {
      // Absent sensor: dependent fields stay absent.
    } catch (const Error& e) {
      result.issues.push_back(std::string(group) + ": " + e.what());
    }
  };
  run("swa", [&] { return swa_features(w, p); });
  run("yaw", [&] { return yaw_features(w, p); });
  run("kinematics", [&] { return kinematics_features(w, p); });
  run("eye", [&] { return eye_features(w, p); });
  run("mouth", [&] { return mouth_features(w, p); });
  run("head", [&] { return head_features(w, p.head_alpha); });
  run("gaze", [&] { return gaze_features(w, p.saccade_speed); });
  run("physiology", [&] { return physiology_features(w); });
  return result;
}

}  // namespace fatigue
