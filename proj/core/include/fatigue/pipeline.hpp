#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fatigue/features.hpp"
#include "fatigue/kstore.hpp"
#include "fatigue/qualify.hpp"
#include "fatigue/rules.hpp"
#include "fatigue/signal.hpp"

namespace fatigue {

/// Raise an alert once `consecutive` Overall levels in a row reach `threshold`.
struct AlertPolicy {
  Level threshold = Level::High;
  std::size_t consecutive = 2;
  friend bool operator==(const AlertPolicy&, const AlertPolicy&) = default;
};

/// Streaming form of the alert rule. After an alert it stays silent until a
/// window falls below the threshold. A missing Overall counts as below.
class AlertTracker {
 public:
  explicit AlertTracker(AlertPolicy policy);
  /// Returns true when this window raises an alert.
  bool push(std::optional<Level> overall);

 private:
  AlertPolicy policy_;
  std::size_t run_ = 0;
  bool armed_ = true;
};

/// Window indices at which alerts are raised.
std::vector<std::size_t> decide(std::span<const std::optional<Level>> overall, const AlertPolicy& policy);
std::vector<std::size_t> decide(std::span<const Level> overall, const AlertPolicy& policy);

struct SnapshotPolicy {
  std::optional<std::filesystem::path> directory;  // disabled when unset
  std::size_t cadence = 6;                         // one snapshot every N windows
  friend bool operator==(const SnapshotPolicy&, const SnapshotPolicy&) = default;
};

struct PipelineConfig {
  double window_length = 60.0;  // seconds
  double window_stride = 10.0;
  double perclos_window = 180.0;
  FeatureParams features;
  std::optional<std::filesystem::path> scheme_path;  // built-in scheme when unset
  std::optional<std::filesystem::path> rules_path;   // built-in pack when unset
  bool verbatim_table1 = false;
  FusionWeights fusion_weights;
  FusionCutoffs fusion_cutoffs;
  AlertPolicy alert;
  SnapshotPolicy snapshots;
  DriverProfile profile;
  std::size_t threads = 1;  // feature-extraction workers

  /// Throws ArgumentError on non-positive windows, zero cadence and the like.
  void validate() const;

  friend bool operator==(const PipelineConfig&, const PipelineConfig&) = default;
};

/// Reads a JSON config. Absent keys keep their defaults; relative paths are
/// resolved against `base_dir`. Throws DecodeError or ArgumentError.
PipelineConfig load_config(std::string_view json, const std::filesystem::path& base_dir = {});
PipelineConfig load_config_file(const std::filesystem::path& path);
std::string config_to_json(const PipelineConfig& cfg);

struct WindowReport {
  std::size_t index = 0;
  double start = 0.0;
  double end = 0.0;
  /// Problems that removed some features or facts from this window.
  std::vector<std::string> degraded;
  FeatureVector features;
  std::vector<QualifiedFact> facts;
  std::vector<FiredRule> fired_rules;
  std::vector<FatigueLevel> levels;
  std::optional<Level> overall;
  bool alert = false;
};

/// One compact JSON object (no trailing newline).
std::string report_to_json(const WindowReport& r);

/// End-to-end processing: window, extract, qualify, infer, fuse, decide.
class Pipeline {
 public:
  /// Loads the scheme and rule pack named by the config (or the built-ins).
  explicit Pipeline(PipelineConfig cfg);
  Pipeline(PipelineConfig cfg, QualificationScheme scheme, RulePack pack);

  using Sink = std::function<void(const WindowReport&)>;

  /// Emits reports in window order and returns how many were emitted.
  /// Snapshots of the accumulated history go to `<dir>/<trace_id>_w<index>.snapshot.json`.
  std::size_t run(std::span<const SignalFrame> frames, const Sink& sink, std::string_view trace_id = "trace") const;
  std::vector<WindowReport> run(std::span<const SignalFrame> frames, std::string_view trace_id = "trace") const;

  const PipelineConfig& config() const noexcept { return cfg_; }
  const QualificationScheme& scheme() const noexcept { return scheme_; }
  const RulePack& rules() const noexcept { return pack_; }

 private:
  PipelineConfig cfg_;
  QualificationScheme scheme_;
  RulePack pack_;
  std::shared_ptr<const Taxonomy> taxonomy_;
};

}  // namespace fatigue
