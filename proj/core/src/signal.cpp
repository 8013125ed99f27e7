#include "fatigue/signal.hpp"

#include <algorithm>
#include <cmath>

#include "fatigue/error.hpp"

namespace fatigue {

namespace {

constexpr std::array<std::string_view, kChannelCount> kChannelNames = {
    "swa",        "yaw",        "speed",     "lat_accel", "lon_accel",  "lane_offset",
    "eye_closure", "mouth_open", "head_pitch", "heart_bpm", "gaze_offset",
};

// Grid points computed as t0 + i*dt drift by a few ulps from sample times.
bool nearly_equal(double a, double b) {
  return std::abs(a - b) <= 1e-9 * std::max(1.0, std::abs(a));
}

std::optional<double> interpolate_at(const ChannelSeries& s, double t) {
  if (s.empty()) return std::nullopt;
  if (nearly_equal(t, s.t.front())) return s.value.front();
  if (nearly_equal(t, s.t.back())) return s.value.back();
  if (t < s.t.front() || t > s.t.back()) return std::nullopt;
  auto hi = static_cast<std::size_t>(std::upper_bound(s.t.begin(), s.t.end(), t) - s.t.begin());
  std::size_t lo = hi - 1;
  if (nearly_equal(t, s.t[lo])) return s.value[lo];
  const double frac = (t - s.t[lo]) / (s.t[hi] - s.t[lo]);
  return s.value[lo] + frac * (s.value[hi] - s.value[lo]);
}

auto frame_lower_bound(std::span<const SignalFrame> frames, double t) {
  return std::lower_bound(frames.begin(), frames.end(), t,
                          [](const SignalFrame& f, double v) { return f.t() < v; });
}

}  // namespace

std::string_view channel_name(Channel c) noexcept { return kChannelNames[static_cast<std::size_t>(c)]; }

std::optional<Channel> channel_from_name(std::string_view name) noexcept {
  for (std::size_t i = 0; i < kChannelCount; ++i) {
    if (kChannelNames[i] == name) return static_cast<Channel>(i);
  }
  return std::nullopt;
}

std::string_view sex_name(Sex s) noexcept {
  switch (s) {
    case Sex::male: return "male";
    case Sex::female: return "female";
    case Sex::unspecified: break;
  }
  return "unspecified";
}

Sex sex_from_name(std::string_view name) {
  if (name == "male") return Sex::male;
  if (name == "female") return Sex::female;
  if (name == "unspecified") return Sex::unspecified;
  throw ArgumentError("unknown sex '" + std::string(name) + "'");
}

void validate_frame(const SignalFrame& frame, std::size_t row) {
  if (!std::isfinite(frame.t()) || frame.t() < 0.0) {
    throw RangeError("t", row, "must be finite and non-negative");
  }
  for (Channel c : kAllChannels) {
    auto v = frame.get(c);
    if (!v) continue;
    const std::string name(channel_name(c));
    if (!std::isfinite(*v)) throw RangeError(name, row, "not finite");
    switch (c) {
      case Channel::eye_closure:
        if (*v < 0.0 || *v > 1.0) throw RangeError(name, row, "must lie in [0,1]");
        break;
      case Channel::heart_bpm:
        if (*v <= 0.0 || *v >= 300.0) throw RangeError(name, row, "must lie in (0,300)");
        break;
      case Channel::mouth_open:
        if (*v < 0.0) throw RangeError(name, row, "must be non-negative");
        break;
      default:
        break;
    }
  }
}

Window slice_window(std::span<const SignalFrame> frames, double start, double end) {
  Window w{start, end, {}};
  auto first = frame_lower_bound(frames, start);
  auto last = frame_lower_bound(frames, end);
  w.frames.assign(first, last);
  return w;
}

std::vector<Window> make_windows(std::span<const SignalFrame> frames, double length, double stride) {
  if (!(length > 0.0) || !(stride > 0.0)) {
    throw ArgumentError("window length and stride must be positive");
  }
  std::vector<Window> out;
  if (frames.empty()) return out;

  const double t_first = frames.front().t();
  const double t_last = frames.back().t();
  // Windows ending at or before the first frame are empty.
  auto k = static_cast<std::size_t>(std::max(0.0, std::floor((t_first - length) / stride)));
  for (;; ++k) {
    const double start = static_cast<double>(k) * stride;
    if (start > t_last) break;
    Window w = slice_window(frames, start, start + length);
    if (w.frames.size() >= 2) out.push_back(std::move(w));
  }
  return out;
}

ChannelSeries channel_series(std::span<const SignalFrame> frames, Channel c) {
  ChannelSeries s;
  for (const auto& f : frames) {
    if (auto v = f.get(c)) {
      s.t.push_back(f.t());
      s.value.push_back(*v);
    }
  }
  return s;
}

std::vector<SignalFrame> resample_uniform(std::span<const SignalFrame> frames, double dt) {
  if (!(dt > 0.0)) throw ArgumentError("resample step must be positive");
  if (frames.size() < 2) throw ArgumentError("resampling needs at least two frames");

  const double t0 = frames.front().t();
  const double span = frames.back().t() - t0;
  const auto count = static_cast<std::size_t>(std::floor(span / dt + 1e-9)) + 1;

  std::array<ChannelSeries, kChannelCount> series;
  for (Channel c : kAllChannels) series[static_cast<std::size_t>(c)] = channel_series(frames, c);

  std::vector<SignalFrame> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    SignalFrame f(t0 + static_cast<double>(i) * dt);
    for (Channel c : kAllChannels) f.set(c, interpolate_at(series[static_cast<std::size_t>(c)], f.t()));
    out.push_back(f);
  }
  return out;
}

std::vector<double> resample_series(const ChannelSeries& series) {
  const std::size_t n = series.size();
  if (n < 2) return series.value;
  const double t0 = series.t.front();
  const double dt = (series.t.back() - t0) / static_cast<double>(n - 1);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i] = *interpolate_at(series, i + 1 == n ? series.t.back() : t0 + static_cast<double>(i) * dt);
  }
  return out;
}

}  // namespace fatigue
