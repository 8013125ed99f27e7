#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fatigue {

enum class Channel : std::size_t {
  swa,          // steering-wheel angle, degrees
  yaw,          // yaw angle, degrees
  speed,        // m/s
  lat_accel,    // m/s^2
  lon_accel,    // m/s^2
  lane_offset,  // meters from lane center
  eye_closure,  // [0,1], 1 = fully closed
  mouth_open,   // mouth aspect ratio, >= 0
  head_pitch,   // degrees
  heart_bpm,    // beats per minute, (0,300)
  gaze_offset,  // degrees
};

inline constexpr std::size_t kChannelCount = 11;

inline constexpr std::array<Channel, kChannelCount> kAllChannels = {
    Channel::swa,         Channel::yaw,        Channel::speed,      Channel::lat_accel,
    Channel::lon_accel,   Channel::lane_offset, Channel::eye_closure, Channel::mouth_open,
    Channel::head_pitch,  Channel::heart_bpm,  Channel::gaze_offset,
};

std::string_view channel_name(Channel c) noexcept;
std::optional<Channel> channel_from_name(std::string_view name) noexcept;

/// One time-stamped sample of a drive trace. Every channel is optional.
class SignalFrame {
 public:
  SignalFrame() = default;
  explicit SignalFrame(double t) : t_(t) {}

  double t() const noexcept { return t_; }
  void set_t(double t) noexcept { t_ = t; }

  std::optional<double> get(Channel c) const noexcept { return values_[static_cast<std::size_t>(c)]; }
  bool has(Channel c) const noexcept { return get(c).has_value(); }
  SignalFrame& set(Channel c, std::optional<double> v) noexcept {
    values_[static_cast<std::size_t>(c)] = v;
    return *this;
  }

  friend bool operator==(const SignalFrame&, const SignalFrame&) = default;

 private:
  double t_ = 0.0;
  std::array<std::optional<double>, kChannelCount> values_{};
};

/// Checks the per-frame invariants; throws RangeError naming channel and row.
void validate_frame(const SignalFrame& frame, std::size_t row);

/// Frames with t in [start_t, end_t), strictly increasing.
struct Window {
  double start_t = 0.0;
  double end_t = 0.0;
  std::vector<SignalFrame> frames;

  double length() const noexcept { return end_t - start_t; }
};

enum class Sex { male, female, unspecified };

std::string_view sex_name(Sex s) noexcept;
Sex sex_from_name(std::string_view name);

struct DriverProfile {
  Sex sex = Sex::unspecified;
  std::string id = "driver";
  friend bool operator==(const DriverProfile&, const DriverProfile&) = default;
};

/// Timestamps of the four phases of a reaction to an obstacle.
struct ObstacleEvent {
  double t_visible = 0.0;
  double t_physical_reaction = 0.0;
  double t_movement = 0.0;
  double t_vehicle_response = 0.0;
};

enum class TraceFormat { csv, jsonl };

/// Parses a trace in CSV or JSONL form (see README for the column set).
/// Malformed input raises DecodeError, MonotonicityError or RangeError;
/// no row is dropped silently.
std::vector<SignalFrame> parse_trace(std::string_view bytes, TraceFormat format);

/// Inverse of parse_trace. Numbers use the shortest round-trip form, so
/// parse_trace(serialize_trace(x)) == x. CSV carries only channels present
/// in at least one frame.
std::string serialize_trace(std::span<const SignalFrame> frames, TraceFormat format);

/// Windows starting at k*stride (k = 0, 1, ...) covering [start, start+length).
/// Windows holding fewer than two frames are skipped.
std::vector<Window> make_windows(std::span<const SignalFrame> frames, double length, double stride);

/// Frames with t in [start, end) copied into a window.
Window slice_window(std::span<const SignalFrame> frames, double start, double end);

/// Per-channel linear interpolation onto t0, t0+dt, ... <= t_last. A channel is
/// present at a grid point only if it is bracketed by samples of that channel.
std::vector<SignalFrame> resample_uniform(std::span<const SignalFrame> frames, double dt);

/// Samples of one channel as parallel (t, value) arrays, absent samples skipped.
struct ChannelSeries {
  std::vector<double> t;
  std::vector<double> value;

  std::size_t size() const noexcept { return t.size(); }
  bool empty() const noexcept { return t.empty(); }
};

ChannelSeries channel_series(std::span<const SignalFrame> frames, Channel c);

/// Resamples a series on a uniform grid of step (t_last - t_first) / (n - 1),
/// i.e. at the series' own mean spacing.
std::vector<double> resample_series(const ChannelSeries& series);

}  // namespace fatigue
