#include <doctest.h>

#include <random>

#include "fatigue/error.hpp"
#include "fatigue/signal.hpp"

using namespace fatigue;

namespace {

std::vector<SignalFrame> ramp(double t0, double t1, double dt) {
  std::vector<SignalFrame> out;
  for (int k = 0; t0 + k * dt < t1 - 1e-9; ++k) out.emplace_back(SignalFrame(t0 + k * dt));
  return out;
}

}  // namespace

TEST_CASE("csv trace with two frames") {
  const auto frames = parse_trace("t,swa\n0.0,1.5\n0.1,2.0", TraceFormat::csv);
  REQUIRE(frames.size() == 2);
  CHECK(frames[0].get(Channel::swa) == 1.5);
  CHECK(frames[1].get(Channel::swa) == 2.0);
  for (Channel c : kAllChannels) {
    if (c != Channel::swa) CHECK_FALSE(frames[0].has(c));
  }
}

TEST_CASE("csv rows out of order report the row") {
  try {
    parse_trace("t,swa\n0.2,1\n0.1,1\n", TraceFormat::csv);
    FAIL("expected MonotonicityError");
  } catch (const MonotonicityError& e) {
    CHECK(e.row() == 2);
  }
  CHECK_THROWS_AS(parse_trace("t\n0\n0\n", TraceFormat::csv), MonotonicityError);
}

TEST_CASE("jsonl eye closure out of range") {
  try {
    parse_trace("{\"t\":0,\"eye_closure\":0.5}\n{\"t\":0.1,\"eye_closure\":1.4}\n", TraceFormat::jsonl);
    FAIL("expected RangeError");
  } catch (const RangeError& e) {
    CHECK(e.channel() == "eye_closure");
    CHECK(e.row() == 2);
  }
}

TEST_CASE("decode failures") {
  CHECK_THROWS_AS(parse_trace("t,bogus\n0,1\n", TraceFormat::csv), DecodeError);
  CHECK_THROWS_AS(parse_trace("swa\n1\n", TraceFormat::csv), DecodeError);
  CHECK_THROWS_AS(parse_trace("t,swa\n0,abc\n", TraceFormat::csv), DecodeError);
  CHECK_THROWS_AS(parse_trace("t,swa\n0,1,2\n", TraceFormat::csv), DecodeError);
  CHECK_THROWS_AS(parse_trace("t,swa\n0,\xff\n", TraceFormat::csv), DecodeError);
  CHECK_THROWS_AS(parse_trace("{\"t\":0,\"nope\":1}\n", TraceFormat::jsonl), DecodeError);
  CHECK_THROWS_AS(parse_trace("[1,2]\n", TraceFormat::jsonl), DecodeError);
  CHECK_THROWS_AS(parse_trace("t,heart_bpm\n0,300\n", TraceFormat::csv), RangeError);
  CHECK_THROWS_AS(parse_trace("t\n-1\n", TraceFormat::csv), RangeError);
}

TEST_CASE("empty cells and missing keys are absent channels") {
  const auto csv = parse_trace("t,swa,yaw\r\n0,,1\r\n\r\n0.1,2,\r\n", TraceFormat::csv);
  REQUIRE(csv.size() == 2);
  CHECK_FALSE(csv[0].has(Channel::swa));
  CHECK(csv[0].get(Channel::yaw) == 1.0);
  CHECK_FALSE(csv[1].has(Channel::yaw));
  const auto jl = parse_trace("{\"t\":0,\"swa\":null}\n{\"t\":1,\"yaw\":2}\n", TraceFormat::jsonl);
  REQUIRE(jl.size() == 2);
  CHECK_FALSE(jl[0].has(Channel::swa));
  CHECK(jl[1].get(Channel::yaw) == 2.0);
}

TEST_CASE("serialize then parse is the identity") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-50.0, 50.0);
  std::bernoulli_distribution present(0.7);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<SignalFrame> frames;
    double t = 0.0;
    for (int k = 0; k < 40; ++k) {
      t += 0.001 + std::abs(u(rng)) / 100.0;
      SignalFrame f(t);
      for (Channel c : kAllChannels) {
        if (!present(rng)) continue;
        double v = u(rng);
        if (c == Channel::eye_closure) v = std::abs(v) / 50.0;
        if (c == Channel::heart_bpm) v = 60.0 + std::abs(v);
        if (c == Channel::mouth_open) v = std::abs(v);
        f.set(c, v);
      }
      frames.push_back(f);
    }
    for (auto fmt : {TraceFormat::csv, TraceFormat::jsonl}) {
      const std::string once = serialize_trace(frames, fmt);
      CHECK(parse_trace(once, fmt) == frames);
      CHECK(serialize_trace(parse_trace(once, fmt), fmt) == once);
    }
  }
}

TEST_CASE("windows of length 5 stride 5") {
  const auto frames = ramp(0.0, 10.0, 0.1);
  const auto w = make_windows(frames, 5.0, 5.0);
  REQUIRE(w.size() == 2);
  CHECK(w[0].frames.size() == 50);
  CHECK(w[1].frames.size() == 50);
}

TEST_CASE("windows of length 6 stride 2") {
  const auto frames = ramp(0.0, 10.0, 0.1);
  const auto w = make_windows(frames, 6.0, 2.0);
  REQUIRE(w.size() == 5);
  // Boundary oracle: count frames with t in [start, start+6) directly.
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double start = 2.0 * static_cast<double>(i);
    CHECK(w[i].start_t == start);
    std::size_t expected = 0;
    for (const auto& f : frames) expected += f.t() >= start && f.t() < start + 6.0;
    CHECK(w[i].frames.size() == expected);
  }
}

TEST_CASE("window edge cases") {
  CHECK(make_windows({}, 5.0, 5.0).empty());
  const auto frames = ramp(0.0, 1.0, 0.1);
  CHECK_THROWS_AS(make_windows(frames, 0.0, 1.0), ArgumentError);
  CHECK_THROWS_AS(make_windows(frames, 1.0, -1.0), ArgumentError);
}

TEST_CASE("every frame lands in some window when stride <= length") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> gap(0.01, 0.7);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<SignalFrame> frames;
    double t = gap(rng);
    for (int k = 0; k < 200; ++k, t += gap(rng)) frames.emplace_back(SignalFrame(t));
    const double length = 1.0 + gap(rng) * 10.0;
    const double stride = length * (0.2 + gap(rng));
    const auto windows = make_windows(frames, std::max(length, stride), std::min(length, stride));
    if (windows.empty()) continue;
    const double last_end = windows.back().end_t;
    for (const auto& f : frames) {
      if (f.t() >= last_end) continue;
      bool covered = false;
      for (const auto& w : windows) {
        for (const auto& g : w.frames) covered |= g.t() == f.t();
      }
      // A frame may be alone in a skipped window; only windows with two or
      // more frames are emitted.
      bool alone = true;
      for (const auto& w : windows) alone &= !(f.t() >= w.start_t && f.t() < w.end_t);
      CHECK((covered || alone));
    }
    for (const auto& w : windows) {
      CHECK(w.end_t > w.start_t);
      for (std::size_t i = 0; i < w.frames.size(); ++i) {
        CHECK(w.frames[i].t() >= w.start_t);
        CHECK(w.frames[i].t() < w.end_t);
        if (i > 0) CHECK(w.frames[i].t() > w.frames[i - 1].t());
      }
    }
  }
}

TEST_CASE("linear resampling") {
  std::vector<SignalFrame> frames{SignalFrame(0.0), SignalFrame(1.0)};
  frames[0].set(Channel::swa, 0.0).set(Channel::yaw, 4.0);
  frames[1].set(Channel::swa, 10.0).set(Channel::yaw, 4.0);
  const auto out = resample_uniform(frames, 0.5);
  REQUIRE(out.size() == 3);
  CHECK(out[0].get(Channel::swa) == 0.0);
  CHECK(out[1].get(Channel::swa) == 5.0);
  CHECK(out[2].get(Channel::swa) == 10.0);
  for (const auto& f : out) CHECK(f.get(Channel::yaw) == 4.0);
}

TEST_CASE("resampling across a sparse channel") {
  std::vector<SignalFrame> frames{SignalFrame(0.0), SignalFrame(1.0), SignalFrame(2.0)};
  frames[0].set(Channel::swa, 2.0).set(Channel::yaw, 1.0);
  frames[1].set(Channel::yaw, 7.0);
  frames[2].set(Channel::swa, 6.0).set(Channel::yaw, 3.0);
  const auto out = resample_uniform(frames, 1.0);
  REQUIRE(out.size() == 3);
  CHECK(out[1].get(Channel::swa) == doctest::Approx(4.0));
  CHECK(out[1].get(Channel::yaw) == 7.0);
  CHECK(out[0].get(Channel::yaw) == 1.0);
  CHECK(out[2].get(Channel::yaw) == 3.0);
  CHECK_FALSE(out[1].has(Channel::speed));
}

TEST_CASE("resampling at the native step returns the samples") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 5.0);
  std::vector<SignalFrame> frames;
  for (int k = 0; k < 300; ++k) {
    SignalFrame f(k * 0.1);
    f.set(Channel::swa, n(rng));
    frames.push_back(f);
  }
  const auto out = resample_uniform(frames, 0.1);
  REQUIRE(out.size() == frames.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(std::abs(*out[i].get(Channel::swa) - *frames[i].get(Channel::swa)) <= 1e-9);
  }
}

TEST_CASE("resampling rejects bad input") {
  std::vector<SignalFrame> one{SignalFrame(0.0)};
  CHECK_THROWS_AS(resample_uniform(one, 0.1), ArgumentError);
  std::vector<SignalFrame> two{SignalFrame(0.0), SignalFrame(1.0)};
  CHECK_THROWS_AS(resample_uniform(two, 0.0), ArgumentError);
}

TEST_CASE("channel and sex names round-trip") {
  for (Channel c : kAllChannels) CHECK(channel_from_name(channel_name(c)) == c);
  CHECK_FALSE(channel_from_name("t").has_value());
  for (Sex s : {Sex::male, Sex::female, Sex::unspecified}) CHECK(sex_from_name(sex_name(s)) == s);
  CHECK_THROWS_AS(sex_from_name("other"), ArgumentError);
}
