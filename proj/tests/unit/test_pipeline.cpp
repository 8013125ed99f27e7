#include <doctest.h>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fatigue/fatigue.hpp"
#include "oracles.hpp"

using namespace fatigue;
namespace fs = std::filesystem;

namespace {

std::string read_source(const std::string& rel) {
  std::ifstream in(std::string(FATIGUE_SOURCE_DIR) + "/" + rel);
  REQUIRE(in);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

ScenarioSpec single(Regime regime, double duration, std::uint64_t seed, Sex sex = Sex::unspecified) {
  ScenarioSpec s;
  s.duration = duration;
  s.segments.push_back({0.0, duration, regime, seed});
  s.profile.sex = sex;
  return s;
}

std::vector<double> channel_values(const std::vector<SignalFrame>& frames, Channel c, double t0, double t1) {
  std::vector<double> out;
  for (const auto& f : frames) {
    if (f.t() >= t0 && f.t() < t1 && f.has(c)) out.push_back(*f.get(c));
  }
  return out;
}

// Excursions of |swa| above `floor`: contiguous runs of one sign.
std::size_t correction_events(const std::vector<double>& swa, double floor) {
  std::size_t events = 0;
  int prev = 0;
  for (double v : swa) {
    const int sign = std::abs(v) >= floor ? (v > 0 ? 1 : -1) : 0;
    if (sign != 0 && sign != prev) ++events;
    prev = sign;
  }
  return events;
}

std::string temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("fatigue_test_" + name);
  fs::remove_all(p);
  return p.string();
}

}  // namespace

TEST_CASE("alert decision examples") {
  const AlertPolicy policy;
  using L = Level;
  CHECK(decide(std::vector<L>{L::Low, L::High, L::High}, policy) == std::vector<std::size_t>{2});
  CHECK(decide(std::vector<L>{L::High, L::Low, L::High}, policy).empty());
  CHECK(decide(std::vector<L>{L::High, L::High, L::High, L::Low, L::High, L::High}, policy) ==
        std::vector<std::size_t>{1, 5});
  const std::vector<std::optional<L>> gappy{L::High, std::nullopt, L::High, L::High};
  CHECK(decide(gappy, policy) == std::vector<std::size_t>{3});
  CHECK(decide(std::vector<L>{L::Medium, L::High}, AlertPolicy{L::Medium, 2}) == std::vector<std::size_t>{1});
  CHECK(decide(std::vector<L>{L::High}, AlertPolicy{L::High, 1}) == std::vector<std::size_t>{0});
}

TEST_CASE("alerts are sound") {
  std::mt19937_64 rng(3);
  const AlertPolicy policy;
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Level> seq(30);
    for (auto& l : seq) l = static_cast<Level>(rng() % 3);
    const auto alerts = decide(seq, policy);
    for (std::size_t i : alerts) {
      REQUIRE(i >= 1);
      CHECK(seq[i] == Level::High);
      CHECK(seq[i - 1] == Level::High);
    }
    // Every run of at least two Highs alerts exactly once.
    std::size_t runs = 0, len = 0;
    for (Level l : seq) {
      len = l == Level::High ? len + 1 : 0;
      runs += len == 2;
    }
    CHECK(alerts.size() == runs);
  }
}

TEST_CASE("built-in config equals the shipped default config") {
  CHECK(config_to_json(PipelineConfig{}) == read_source("config/default_config.json"));
  CHECK(load_config(read_source("config/default_config.json")) == PipelineConfig{});
  CHECK(load_config("{}") == PipelineConfig{});
}

TEST_CASE("config loading") {
  const auto cfg = load_config(R"({"window": {"length": 30}, "alert": {"threshold": "Medium"},
                                   "fusion": {"weights": {"SteeringWheel": 2}}, "rules": {"pack": "p.rules"}})",
                               "/etc/fatigue");
  CHECK(cfg.window_length == 30.0);
  CHECK(cfg.window_stride == 10.0);
  CHECK(cfg.alert.threshold == Level::Medium);
  CHECK(cfg.fusion_weights.weight("SteeringWheel") == 2.0);
  CHECK(cfg.fusion_weights.weight("YawAngle") == 0.0);
  CHECK(cfg.rules_path == fs::path("/etc/fatigue/p.rules"));
  CHECK(load_config(config_to_json(cfg)) == cfg);

  CHECK_THROWS_AS(load_config("{"), DecodeError);
  CHECK_THROWS_AS(load_config(R"({"windows": {}})"), DecodeError);
  CHECK_THROWS_AS(load_config(R"({"window": {"length": "long"}})"), DecodeError);
  CHECK_THROWS_AS(load_config(R"({"window": {"length": 0}})"), ArgumentError);
  CHECK_THROWS_AS(load_config(R"({"snapshots": {"cadence": 0}})"), ArgumentError);
  CHECK_THROWS_AS(load_config(R"({"alert": {"threshold": "Severe"}})"), ArgumentError);
  CHECK_THROWS_AS(load_config(R"({"features": {"eye_closed_threshold": 1.0}})"), ArgumentError);
  CHECK_THROWS_AS(load_config(R"({"fusion": {"medium_cutoff": 2, "high_cutoff": 1}})"), ArgumentError);
}

TEST_CASE("empty trace produces nothing") {
  const auto dir = temp_dir("empty");
  PipelineConfig cfg;
  cfg.snapshots.directory = dir;
  CHECK(Pipeline(cfg).run(std::vector<SignalFrame>{}).empty());
  CHECK_FALSE(fs::exists(dir));
}

TEST_CASE("one report per window, in order") {
  const auto frames = generate_scenario(single(Regime::drowsy, 180.0, 1));
  const Pipeline p{PipelineConfig{}};
  const auto reports = p.run(frames);
  const auto windows = make_windows(frames, 60.0, 10.0);
  REQUIRE(reports.size() == windows.size());
  for (std::size_t i = 0; i < reports.size(); ++i) {
    CHECK(reports[i].index == i);
    CHECK(reports[i].start == windows[i].start_t);
    CHECK(reports[i].end == windows[i].end_t);
  }
}

TEST_CASE("report records carry the documented keys") {
  const auto frames = generate_scenario(single(Regime::drowsy, 120.0, 2));
  const auto reports = Pipeline(PipelineConfig{}).run(frames);
  REQUIRE_FALSE(reports.empty());
  for (const auto& r : reports) {
    const auto j = nlohmann::json::parse(report_to_json(r));
    for (const char* key : {"window", "features", "facts", "fired_rules", "levels", "overall", "alert"}) {
      CHECK(j.contains(key));
    }
    CHECK(j["window"]["index"] == r.index);
    CHECK(j["alert"] == r.alert);
    CHECK(j["facts"].size() == r.facts.size());
    CHECK(report_to_json(r).find('\n') == std::string::npos);
  }
}

TEST_CASE("pipeline runs are deterministic and thread-count independent") {
  const auto frames = generate_scenario(single(Regime::drowsy, 240.0, 4));
  PipelineConfig cfg;
  const auto a = Pipeline(cfg).run(frames);
  cfg.threads = 3;
  const auto b = Pipeline(cfg).run(frames);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(report_to_json(a[i]) == report_to_json(b[i]));
}

TEST_CASE("a missing channel only removes its features") {
  const auto full = generate_scenario(single(Regime::drowsy, 120.0, 5));
  const auto expected = make_windows(full, 60.0, 10.0).size();
  for (Channel c : kAllChannels) {
    CAPTURE(channel_name(c));
    std::vector<SignalFrame> stripped;
    for (const auto& f : full) {
      SignalFrame g(f.t());
      for (Channel d : kAllChannels) {
        if (d != c && f.has(d)) g.set(d, *f.get(d));
      }
      stripped.push_back(g);
    }
    std::vector<WindowReport> reports;
    CHECK_NOTHROW(reports = Pipeline(PipelineConfig{}).run(stripped));
    CHECK(reports.size() == expected);
  }
}

TEST_CASE("snapshots follow the cadence") {
  const auto dir = temp_dir("snapshots");
  PipelineConfig cfg;
  cfg.snapshots.directory = dir;
  cfg.snapshots.cadence = 3;
  const auto frames = generate_scenario(single(Regime::drowsy, 120.0, 6));
  const auto reports = Pipeline(cfg).run(frames, "demo");
  std::size_t expected = 0;
  for (const auto& r : reports) {
    const fs::path file = fs::path(dir) / ("demo_w" + std::to_string(r.index) + ".snapshot.json");
    const bool due = (r.index + 1) % 3 == 0;
    CHECK(fs::exists(file) == due);
    if (!due) continue;
    ++expected;
    std::ifstream in(file);
    std::stringstream buf;
    buf << in.rdbuf();
    const auto snap = load_snapshot(buf.str());
    CHECK(snap.meta.trace_id == "demo");
    CHECK(snap.meta.window_end == r.end);
    CHECK(save_snapshot(snap) == buf.str());
  }
  CHECK(expected == reports.size() / 3);
  fs::remove_all(dir);
}

TEST_CASE("degraded windows are flagged, not fatal") {
  // A scheme covering one feature leaves every other feature unbound.
  const auto frames = generate_scenario(single(Regime::alert, 90.0, 8));
  QualificationScheme partial;
  partial.set("max_swa_abs", *default_scheme().find("max_swa_abs", {}));
  const Pipeline p(PipelineConfig{}, partial, table1_pack());
  const auto reports = p.run(frames);
  REQUIRE_FALSE(reports.empty());
  for (const auto& r : reports) {
    REQUIRE_FALSE(r.degraded.empty());
    CHECK(r.degraded.front().rfind("qualify:", 0) == 0);
    CHECK_FALSE(r.overall.has_value());
  }
}

TEST_CASE("alert regime stays within its bands") {
  const auto frames = generate_scenario(single(Regime::alert, 60.0, 21));
  REQUIRE(frames.size() == 600);
  const auto swa = channel_values(frames, Channel::swa, 0.0, 60.0);
  const auto yaw = channel_values(frames, Channel::yaw, 0.0, 60.0);
  for (double v : swa) CHECK(std::abs(v) <= 6.0);
  for (double v : yaw) CHECK(std::abs(v) <= 1.0);
  CHECK(correction_events(swa, 0.5) >= 12);
  const BandSet& bpm = *default_scheme().find("mean_bpm", {});
  for (double v : channel_values(frames, Channel::heart_bpm, 0.0, 60.0)) {
    CHECK(classify_value(bpm, "mean_bpm", v).label == "BPM_Normal");
  }
}

TEST_CASE("drowsy regime meets its post-conditions") {
  const auto frames = generate_scenario(single(Regime::drowsy, 300.0, 22, Sex::female));
  for (int minute = 0; minute < 5; ++minute) {
    CAPTURE(minute);
    const double t0 = 60.0 * minute;
    const auto swa = channel_values(frames, Channel::swa, t0, t0 + 60.0);
    double peak = 0.0;
    for (double v : swa) peak = std::max(peak, std::abs(v));
    CHECK(peak >= 10.0);
    CHECK(peak <= 15.0 + 0.5);
    CHECK(oracle::upcrossings(swa, 6.0, 0.5) <= 2);
    double yaw_peak = 0.0;
    for (double v : channel_values(frames, Channel::yaw, t0, t0 + 60.0)) yaw_peak = std::max(yaw_peak, std::abs(v));
    CHECK(yaw_peak > 1.0);
  }
  const auto w = slice_window(frames, 0.0, 180.0);
  CHECK(*perclos(w, 0.8) >= 0.4);
  CHECK(*mouth_features(w).yawn_count >= 1.0);
  const auto bpm = channel_values(frames, Channel::heart_bpm, 0.0, 300.0);
  const Band* band = nullptr;
  for (const auto& b : *default_scheme().find("mean_bpm", {Sex::female, "d"})) {
    if (b.label == "BPM_Drowsy") band = &b;
  }
  REQUIRE(band != nullptr);
  for (double v : bpm) CHECK(band->contains(v));
}

TEST_CASE("scenario generation is reproducible") {
  const auto spec = load_scenario(read_source("scenarios/mixed_20min.json"));
  CHECK(spec.profile.sex == Sex::female);
  CHECK(spec.segments.size() == 3);
  const auto a = serialize_trace(generate_scenario(spec), TraceFormat::csv);
  const auto b = serialize_trace(generate_scenario(spec), TraceFormat::csv);
  CHECK(a == b);
  auto other = spec;
  other.segments[1].seed = 6;
  CHECK(serialize_trace(generate_scenario(other), TraceFormat::csv) != a);
}

TEST_CASE("scenario spec errors") {
  CHECK_THROWS_AS(load_scenario("{"), SpecError);
  CHECK_THROWS_AS(load_scenario(R"({"duration": 0})"), SpecError);
  CHECK_THROWS_AS(load_scenario(R"({"duration": 10, "sample_rate": -1})"), SpecError);
  CHECK_THROWS_AS(load_scenario(R"({"duration": 10, "segments": [{"start": 0, "end": 20, "regime": "alert", "seed": 1}]})"),
                  SpecError);
  CHECK_THROWS_AS(load_scenario(R"({"duration": 10, "segments": [{"start": 0, "end": 6, "regime": "alert", "seed": 1},
                                                                 {"start": 5, "end": 9, "regime": "alert", "seed": 1}]})"),
                  SpecError);
  CHECK_THROWS_AS(load_scenario(R"({"duration": 10, "segments": [{"start": 0, "end": 5, "regime": "sleepy", "seed": 1}]})"),
                  SpecError);
  const auto spec = load_scenario(R"({"duration": 10, "segments": []})");
  CHECK(generate_scenario(spec).size() == 100);
}
