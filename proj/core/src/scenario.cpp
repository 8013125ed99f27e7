#include "fatigue/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include <json.hpp>

#include "fatigue/error.hpp"
#include "fatigue/qualify.hpp"

namespace fatigue {

std::string_view regime_name(Regime r) noexcept { return r == Regime::alert ? "alert" : "drowsy"; }

void ScenarioSpec::validate() const {
  if (!(duration > 0.0) || !std::isfinite(duration)) throw SpecError("duration must be a positive number");
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) throw SpecError("sample_rate must be positive");
  std::vector<ScenarioSegment> sorted = segments;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    const auto& s = sorted[i];
    if (!(s.start >= 0.0 && s.start < s.end && s.end <= duration)) {
      throw SpecError("segment [" + std::to_string(s.start) + ", " + std::to_string(s.end) +
                      ") must be non-empty and lie within the duration");
    }
    if (i > 0 && s.start < sorted[i - 1].end) throw SpecError("segments overlap");
  }
}

ScenarioSpec load_scenario(std::string_view text) {
  using json = nlohmann::json;
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SpecError("scenario parse error at byte " + std::to_string(e.byte));
  }
  if (!doc.is_object()) throw SpecError("scenario must be a JSON object");

  auto number = [](const json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_number()) throw SpecError(std::string("'") + key + "' must be a number");
    return it->get<double>();
  };

  ScenarioSpec spec;
  spec.duration = number(doc, "duration");
  if (doc.contains("sample_rate")) spec.sample_rate = number(doc, "sample_rate");
  if (auto it = doc.find("profile"); it != doc.end()) {
    if (!it->is_object()) throw SpecError("'profile' must be an object");
    try {
      if (it->contains("sex")) spec.profile.sex = sex_from_name(it->at("sex").get<std::string>());
      if (it->contains("id")) spec.profile.id = it->at("id").get<std::string>();
    } catch (const std::exception& e) {
      throw SpecError(std::string("bad profile: ") + e.what());
    }
  }
  auto segs = doc.find("segments");
  if (segs == doc.end() || !segs->is_array()) throw SpecError("'segments' must be an array");
  for (const auto& s : *segs) {
    if (!s.is_object()) throw SpecError("each segment must be an object");
    ScenarioSegment seg;
    seg.start = number(s, "start");
    seg.end = number(s, "end");
    const auto regime = s.find("regime");
    if (regime == s.end() || !regime->is_string()) throw SpecError("segment 'regime' must be a string");
    if (*regime == "alert") {
      seg.regime = Regime::alert;
    } else if (*regime == "drowsy") {
      seg.regime = Regime::drowsy;
    } else {
      throw SpecError("unknown regime '" + regime->get<std::string>() + "'");
    }
    if (auto seed = s.find("seed"); seed != s.end()) {
      if (!seed->is_number_unsigned()) throw SpecError("segment 'seed' must be a non-negative integer");
      seg.seed = seed->get<std::uint64_t>();
    }
    spec.segments.push_back(seg);
  }
  spec.validate();
  return spec;
}

namespace {

constexpr double kPi = std::numbers::pi;

// Uniform and normal draws built directly on the engine's output so that the
// sequence does not depend on the standard library's distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double sign() { return uniform() < 0.5 ? -1.0 : 1.0; }
  double normal(double sigma) {
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return sigma * std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
  }
  double noise(double sigma, double limit) { return std::clamp(normal(sigma), -limit, limit); }

 private:
  std::mt19937_64 engine_;
};

struct Event {
  double start;
  double duration;
  double amplitude;  // signed
};

// Events from `first` onwards, one every [gap_lo, gap_hi] seconds, until `end`.
template <typename Make>
std::vector<Event> schedule(Rng& rng, double first, double end, double gap_lo, double gap_hi, Make make) {
  std::vector<Event> out;
  for (double t = first; t < end; t += rng.uniform(gap_lo, gap_hi)) out.push_back(make(t));
  return out;
}

const Event* active(const std::vector<Event>& events, double t) {
  auto it = std::upper_bound(events.begin(), events.end(), t, [](double v, const Event& e) { return v < e.start; });
  if (it == events.begin()) return nullptr;
  --it;
  return t < it->start + it->duration ? &*it : nullptr;
}

double raised_cosine(double u) { return 0.5 * (1.0 - std::cos(2.0 * kPi * u)); }  // 0 -> 1 -> 0 over [0,1]

double band_middle(const DriverProfile& profile, std::string_view label) {
  const BandSet* bands = default_scheme().find("mean_bpm", profile);
  for (const auto& b : *bands) {
    if (b.label == label && std::isfinite(b.lower) && std::isfinite(b.upper)) return 0.5 * (b.lower + b.upper);
  }
  throw SpecError("no finite heart-rate band '" + std::string(label) + "'");
}

class Model {
 public:
  virtual ~Model() = default;
  virtual void sample(double t, SignalFrame& f) = 0;
};

// Attentive driving: frequent small steering corrections that never reach the
// significance threshold, yaw inside [0, 1] degrees, calm face.
class AlertModel final : public Model {
 public:
  AlertModel(const ScenarioSegment& seg, const DriverProfile& profile)
      : rng_(seg.seed), bpm_(band_middle(profile, "BPM_Normal")) {
    double sign = rng_.sign();
    for (double t = seg.start; t < seg.end;) {
      const double d = rng_.uniform(3.5, 4.5);
      corrections_.push_back({t, d, sign * rng_.uniform(1.0, 5.5)});
      sign = -sign;
      t += d;
    }
    blinks_ = schedule(rng_, seg.start + rng_.uniform(0.5, 4.0), seg.end, 3.0, 5.0,
                       [&](double t) { return Event{t, 0.3, 1.0}; });
    saccades_ = schedule(rng_, seg.start + rng_.uniform(0.5, 3.0), seg.end, 2.0, 4.0,
                         [&](double t) { return Event{t, 1e9, rng_.uniform(-6.0, 6.0)}; });
    phase_[0] = rng_.uniform(0.0, 2.0 * kPi);
    phase_[1] = rng_.uniform(0.0, 2.0 * kPi);
    phase_[2] = rng_.uniform(0.0, 2.0 * kPi);
  }

  void sample(double t, SignalFrame& f) override {
    double swa = rng_.noise(0.01, 0.03);
    if (const Event* e = active(corrections_, t)) swa += e->amplitude * std::sin(kPi * (t - e->start) / e->duration);
    f.set(Channel::swa, swa);
    f.set(Channel::yaw, 0.45 + 0.25 * std::sin(2.0 * kPi * t / 17.0 + phase_[0]) +
                            0.15 * std::sin(2.0 * kPi * t / 7.3 + phase_[1]));
    f.set(Channel::speed, 27.0 + 0.5 * std::sin(2.0 * kPi * t / 40.0 + phase_[2]));
    f.set(Channel::lon_accel, 0.5 * (2.0 * kPi / 40.0) * std::cos(2.0 * kPi * t / 40.0 + phase_[2]));
    f.set(Channel::lat_accel, 0.3 * std::sin(2.0 * kPi * t / 11.0 + phase_[1]) + rng_.noise(0.02, 0.05));
    f.set(Channel::lane_offset, 0.2 * std::sin(2.0 * kPi * t / 23.0 + phase_[0]) + rng_.noise(0.01, 0.03));
    f.set(Channel::eye_closure, active(blinks_, t) ? 0.92 : 0.15 + rng_.noise(0.02, 0.05));
    f.set(Channel::mouth_open, 0.12 + rng_.noise(0.02, 0.05));
    f.set(Channel::head_pitch, 2.0 * std::sin(2.0 * kPi * t / 9.0 + phase_[2]) + rng_.noise(0.3, 1.0));
    const Event* gaze = active(saccades_, t);
    f.set(Channel::gaze_offset, (gaze ? gaze->amplitude : 0.0) + rng_.noise(0.05, 0.1));
    f.set(Channel::heart_bpm, bpm_ + rng_.noise(1.0, 3.0));
  }

 private:
  Rng rng_;
  double bpm_;
  std::vector<Event> corrections_, blinks_, saccades_;
  double phase_[3] = {};
};

// Drowsy driving: long quiet stretches broken by rare large steering jerks,
// yaw excursions with sharp returns, long eye closures, yawns and head nods.
class DrowsyModel final : public Model {
 public:
  DrowsyModel(const ScenarioSegment& seg, const DriverProfile& profile)
      : rng_(seg.seed), bpm_(band_middle(profile, "BPM_Drowsy")) {
    jerks_ = schedule(rng_, seg.start + rng_.uniform(2.0, 8.0), seg.end, 31.0, 35.0,
                      [&](double t) { return Event{t, 3.0, rng_.sign() * rng_.uniform(10.0, 15.0)}; });
    excursions_ = schedule(rng_, seg.start + rng_.uniform(1.0, 5.0), seg.end, 18.0, 22.0,
                           [&](double t) { return Event{t, kRise + kFall, rng_.sign() * rng_.uniform(5.0, 6.0)}; });
    for (double t = seg.start + rng_.uniform(0.0, 2.0); t < seg.end;) {
      const double closed = rng_.uniform(3.5, 4.5);
      closures_.push_back({t, closed, 1.0});
      t += closed + rng_.uniform(3.5, 4.5);
    }
    yawns_ = schedule(rng_, seg.start + rng_.uniform(5.0, 20.0), seg.end, 40.0, 50.0,
                      [&](double t) { return Event{t, rng_.uniform(4.0, 6.0), 1.0}; });
    nods_ = schedule(rng_, seg.start + rng_.uniform(3.0, 15.0), seg.end, 22.0, 28.0,
                     [&](double t) { return Event{t, 1.5, -rng_.uniform(18.0, 25.0)}; });
    drifts_ = schedule(rng_, seg.start + rng_.uniform(5.0, 25.0), seg.end, 35.0, 45.0,
                       [&](double t) { return Event{t, 8.0, rng_.sign() * rng_.uniform(2.0, 2.4)}; });
    phase_[0] = rng_.uniform(0.0, 2.0 * kPi);
    phase_[1] = rng_.uniform(0.0, 2.0 * kPi);
  }

  void sample(double t, SignalFrame& f) override {
    double swa = 0.8 * std::sin(2.0 * kPi * t / 23.0 + phase_[0]) + rng_.noise(0.01, 0.03);
    if (const Event* e = active(jerks_, t)) swa += e->amplitude * raised_cosine((t - e->start) / e->duration);
    f.set(Channel::swa, swa);

    double yaw = 0.1 * std::sin(2.0 * kPi * t / 13.0 + phase_[1]);
    if (const Event* e = active(excursions_, t)) {
      const double u = t - e->start;
      const double shape = u < kRise ? 0.5 * (1.0 - std::cos(kPi * u / kRise))
                                     : 0.5 * (1.0 + std::cos(kPi * (u - kRise) / kFall));
      yaw += e->amplitude * shape;
    }
    f.set(Channel::yaw, yaw);

    f.set(Channel::speed, 24.0 + 1.5 * std::sin(2.0 * kPi * t / 60.0 + phase_[0]));
    f.set(Channel::lon_accel, 1.5 * (2.0 * kPi / 60.0) * std::cos(2.0 * kPi * t / 60.0 + phase_[0]));
    f.set(Channel::lat_accel, 0.2 * std::sin(2.0 * kPi * t / 15.0) + rng_.noise(0.02, 0.05));
    double lane = 0.3 * std::sin(2.0 * kPi * t / 29.0 + phase_[1]);
    if (const Event* e = active(drifts_, t)) lane += e->amplitude * raised_cosine((t - e->start) / e->duration);
    f.set(Channel::lane_offset, lane);

    f.set(Channel::eye_closure, active(closures_, t) ? 0.9 + rng_.noise(0.02, 0.05) : 0.35 + rng_.noise(0.05, 0.1));
    f.set(Channel::mouth_open, active(yawns_, t) ? 0.85 : 0.1 + rng_.noise(0.02, 0.05));
    double pitch = rng_.noise(0.3, 1.0);
    if (const Event* e = active(nods_, t)) pitch += e->amplitude * raised_cosine((t - e->start) / e->duration);
    f.set(Channel::head_pitch, pitch);
    f.set(Channel::gaze_offset, 0.5 * std::sin(2.0 * kPi * t / 31.0) + rng_.noise(0.05, 0.1));
    f.set(Channel::heart_bpm, bpm_ + rng_.noise(1.0, 3.0));
  }

 private:
  static constexpr double kRise = 2.8;
  static constexpr double kFall = 1.2;
  Rng rng_;
  double bpm_;
  std::vector<Event> jerks_, excursions_, closures_, yawns_, nods_, drifts_;
  double phase_[2] = {};
};

std::unique_ptr<Model> make_model(const ScenarioSegment& seg, const DriverProfile& profile) {
  if (seg.regime == Regime::drowsy) return std::make_unique<DrowsyModel>(seg, profile);
  return std::make_unique<AlertModel>(seg, profile);
}

}  // namespace

std::vector<SignalFrame> generate_scenario(const ScenarioSpec& spec) {
  spec.validate();

  // Cover [0, duration) completely, filling gaps with seed-0 alert driving.
  std::vector<ScenarioSegment> plan = spec.segments;
  std::sort(plan.begin(), plan.end(), [](const auto& a, const auto& b) { return a.start < b.start; });
  std::vector<ScenarioSegment> full;
  double cursor = 0.0;
  for (const auto& s : plan) {
    if (s.start > cursor) full.push_back({cursor, s.start, Regime::alert, 0});
    full.push_back(s);
    cursor = s.end;
  }
  if (cursor < spec.duration) full.push_back({cursor, spec.duration, Regime::alert, 0});

  const auto count = static_cast<std::size_t>(std::ceil(spec.duration * spec.sample_rate - 1e-9));
  std::vector<SignalFrame> frames;
  frames.reserve(count);
  std::size_t k = 0;
  for (const auto& seg : full) {
    auto model = make_model(seg, spec.profile);
    for (; k < count; ++k) {
      const double t = static_cast<double>(k) / spec.sample_rate;
      if (t >= seg.end) break;
      SignalFrame f;
      f.set_t(t);
      model->sample(t, f);
      frames.push_back(f);
    }
  }
  return frames;
}

}  // namespace fatigue
