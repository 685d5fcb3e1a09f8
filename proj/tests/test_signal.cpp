#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <doctest.h>

#include "gaitlab/error.hpp"
#include "gaitlab/signal.hpp"
#include "gaitlab/synthetic.hpp"
#include "oracle.hpp"

using namespace gaitlab;
using namespace gaitlab::signal;

namespace {

constexpr double kPi = std::numbers::pi;

// Stride-shaped test signal: one tall peak per period.
double gait_like(double t, double period) {
  const double ph = 2 * kPi * t / period;
  return 20 * std::cos(ph) + 5 * std::cos(2 * ph);
}

}  // namespace

TEST_CASE("hampel leaves a constant signal unchanged") {
  const std::vector<double> x{10, 10, 10, 10, 10};
  CHECK(hampel(x, 5, 3.0) == x);
}

TEST_CASE("hampel replaces an isolated spike with the window median") {
  const std::vector<double> x{10, 10, 500, 10, 10};
  const auto expected = oracle::hampel_once(x, 5, 3.0);
  CHECK(expected == std::vector<double>{10, 10, 10, 10, 10});
  CHECK(hampel(x, 5, 3.0) == expected);
}

TEST_CASE("hampel matches the brute-force oracle iterated to a fixpoint") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> x(40);
    for (double& v : x) v = rng::gaussian(rng) + (rng::uniform01(rng) < 0.1 ? 50.0 : 0.0);
    auto ref = x;
    for (int pass = 0; pass < 32; ++pass) {
      auto next = oracle::hampel_once(ref, 5, 3.0);
      if (next == ref) break;
      ref = next;
    }
    CHECK(hampel(x, 5, 3.0) == ref);
  }
}

TEST_CASE("hampel rejects a series shorter than the window") {
  const std::vector<double> x{1, 2, 3, 4};
  CHECK_THROWS_AS(hampel(x, 5, 3.0), SignalTooShortError);
  CHECK_THROWS_AS(hampel(x, 4, 3.0), ValidationError);
}

TEST_CASE("denoise keeps a noiseless sine") {
  const auto raw = oracle::capture_of([](double t) { return 30 * std::sin(2 * kPi * t / 1.2); }, 12.0, 50.0);
  const auto out = denoise(raw);
  REQUIRE(out.samples.size() == raw.samples.size());
  for (std::size_t i = 0; i < raw.samples.size(); ++i) {
    CHECK(out.samples[i].t_ms == raw.samples[i].t_ms);
    CHECK(std::abs(out.samples[i].beta - raw.samples[i].beta) <= 1e-9);
  }
}

TEST_CASE("denoise is idempotent") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    auto raw = oracle::capture_of([](double t) { return gait_like(t, 1.1); }, 6.0, 50.0);
    for (auto& s : raw.samples) {
      s.alpha = 2.0 * rng::gaussian(rng);
      s.beta += rng::gaussian(rng) + (rng::uniform01(rng) < 0.05 ? 80.0 : 0.0);
      s.gamma = rng::uniform(rng, -5.0, 5.0);
    }
    const auto once = denoise(raw);
    const auto twice = denoise(once);
    for (std::size_t i = 0; i < once.samples.size(); ++i) {
      CHECK(twice.samples[i].alpha == once.samples[i].alpha);
      CHECK(twice.samples[i].beta == once.samples[i].beta);
      CHECK(twice.samples[i].gamma == once.samples[i].gamma);
    }
  }
}

TEST_CASE("capture validation reports the offending field") {
  RawCapture raw = oracle::capture_of([](double) { return 0.0; }, 1.0, 10.0);
  raw.samples[3].t_ms = raw.samples[2].t_ms;
  try {
    raw.validate();
    FAIL("expected SchemaError");
  } catch (const SchemaError& e) {
    CHECK(e.path == "samples[3].t");
  }
  raw = oracle::capture_of([](double) { return 0.0; }, 1.0, 10.0);
  raw.sample_rate = 0.0;
  CHECK_THROWS_AS(raw.validate(), SchemaError);
}

TEST_CASE("segment_steps finds ten strides of 1.2 s at 50 Hz") {
  const auto raw = oracle::capture_of([](double t) { return gait_like(t, 1.2); }, 12.0, 50.0);
  const auto segs = segment_steps(raw);
  REQUIRE(segs.size() == 10);
  for (std::size_t i = 0; i < segs.size(); ++i) {
    CHECK(segs[i].end - segs[i].begin == 60);
    if (i > 0) CHECK(segs[i].begin == segs[i - 1].end);
  }
}

TEST_CASE("segment_steps on two strides gives two segments") {
  const auto raw = oracle::capture_of([](double t) { return gait_like(t, 1.2); }, 2.4, 50.0);
  CHECK(segment_steps(raw).size() == 2);
}

TEST_CASE("segment_steps rejects signals without periodic structure") {
  const auto ramp = oracle::capture_of([](double t) { return 10 * t; }, 5.0, 50.0);
  CHECK_THROWS_AS(segment_steps(ramp), NoStepsError);
  const auto flat = oracle::capture_of([](double) { return 3.0; }, 5.0, 50.0);
  CHECK_THROWS_AS(segment_steps(flat), NoStepsError);
}

TEST_CASE("segment_steps ignores peaks closer than the minimum distance") {
  // A 0.3 s ripple riding on 1.2 s strides must not split strides.
  const auto raw = oracle::capture_of(
      [](double t) { return gait_like(t, 1.2) + 0.5 * std::cos(2 * kPi * t / 0.3); }, 12.0, 100.0);
  CHECK(segment_steps(raw).size() == 10);
}

TEST_CASE("summarize_cycle of one segment is its resample") {
  const auto raw = oracle::capture_of([](double t) { return gait_like(t, 1.2); }, 3.6, 50.0);
  const std::vector<StepSegment> one{{60, 120}};
  CHECK(summarize_cycle(one, raw).angles == resample_segment(raw, one[0], Axis::beta));
}

TEST_CASE("summarize_cycle of identical strides equals a single stride") {
  const auto raw = oracle::capture_of([](double t) { return gait_like(t, 1.2); }, 12.0, 50.0);
  const auto segs = segment_steps(raw);
  const auto cycle = summarize_cycle(segs, raw);
  const auto single = resample_segment(raw, segs[3], Axis::beta);
  REQUIRE(cycle.angles.size() == kCycleLength);
  for (std::size_t i = 0; i < kCycleLength; ++i) CHECK(std::abs(cycle.angles[i] - single[i]) <= 1e-9);

  const std::vector<StepSegment> three{segs[0], segs[0], segs[0]};
  const auto mean3 = summarize_cycle(three, raw).angles;
  const auto ref = resample_segment(raw, segs[0], Axis::beta);
  for (std::size_t i = 0; i < kCycleLength; ++i) CHECK(std::abs(mean3[i] - ref[i]) <= 1e-12);
}

TEST_CASE("summarize_cycle averages offset strides to their midline") {
  // Stride A over samples 0..60, stride B = A + 2 degrees over 61..121.
  RawCapture raw;
  raw.placement_joint = Joint::hip;
  raw.sample_rate = 50.0;
  for (int k = 0; k < 2; ++k) {
    for (int i = 0; i <= 60; ++i) {
      const double t = (61.0 * k + i) * 20.0;
      raw.samples.push_back({t, 0.0, gait_like(i / 50.0, 1.2) + 2.0 * k, 0.0});
    }
  }
  const std::vector<StepSegment> segs{{0, 60}, {61, 121}};
  const auto base = resample_segment(raw, segs[0], Axis::beta);
  const auto cycle = summarize_cycle(segs, raw);
  CHECK(cycle.joint == Joint::hip);
  for (std::size_t i = 0; i < kCycleLength; ++i) CHECK(std::abs(cycle.angles[i] - (base[i] + 1.0)) <= 1e-12);
}

TEST_CASE("summarize_cycle ignores segment order") {
  std::mt19937_64 rng(5);
  auto raw = oracle::capture_of([](double t) { return gait_like(t, 1.2); }, 12.0, 50.0);
  for (auto& s : raw.samples) s.beta += rng::gaussian(rng);
  auto segs = segment_steps(raw);
  const auto a = summarize_cycle(segs, raw);
  std::reverse(segs.begin(), segs.end());
  const auto b = summarize_cycle(segs, raw);
  std::swap(segs[1], segs[4]);
  const auto c = summarize_cycle(segs, raw);
  CHECK(a.angles == b.angles);
  CHECK(a.angles == c.angles);
}

TEST_CASE("summarize_cycle rejects degenerate and missing segments") {
  const auto raw = oracle::capture_of([](double t) { return gait_like(t, 1.2); }, 2.4, 50.0);
  const std::vector<StepSegment> tiny{{0, 3}};
  CHECK_THROWS_AS(summarize_cycle(tiny, raw), DegenerateSegmentError);
  CHECK_THROWS_AS(summarize_cycle(std::span<const StepSegment>{}, raw), NoStepsError);
}

TEST_CASE("rotate_cycle shifts circularly") {
  std::vector<double> c(kCycleLength);
  for (std::size_t i = 0; i < c.size(); ++i) c[i] = static_cast<double>(i);
  const auto r = rotate_cycle(c, 0.25);
  for (std::size_t i = 0; i < c.size(); ++i) CHECK(r[i] == static_cast<double>((i + 5) % 20));
  CHECK(rotate_cycle(c, 1.0) == c);
  CHECK(rotate_cycle(c, -0.05)[0] == 19.0);
  const auto half = rotate_cycle(c, 0.025);
  CHECK(half[0] == doctest::Approx(0.5));
  CHECK(half[19] == doctest::Approx(9.5));  // between 19 and 0
}

TEST_CASE("extract_features on ten strides in 12 s") {
  const auto raw = oracle::capture_of([](double t) { return gait_like(t, 1.2); }, 12.0, 50.0);
  const auto segs = segment_steps(raw);
  PhaseLabels labels;
  for (std::size_t i = 0; i < kCycleLength; ++i) labels.labels[i] = i < 12 ? Phase::stance : Phase::swing;
  const auto f = extract_features(raw, segs, labels);
  CHECK(f.step_count == 10);
  CHECK(f.step_count == segs.size());
  CHECK(f.time_per_step == doctest::Approx(1.2).epsilon(1e-12));
  CHECK(f.speed == doctest::Approx(10.0 / 12.0).epsilon(1e-12));
  CHECK(f.stance_swing_ratio == doctest::Approx(1.5).epsilon(1e-12));
}

TEST_CASE("extract_features reports the extrema of a 30 degree sine") {
  const auto raw = oracle::capture_of([](double t) { return 30 * std::sin(2 * kPi * t / 1.2); }, 12.0, 50.0);
  const auto segs = segment_steps(raw);
  PhaseLabels labels;
  labels.labels[19] = Phase::swing;
  const auto f = extract_features(raw, segs, labels);
  CHECK(f.min_angle == doctest::Approx(-30.0).epsilon(1e-12));
  CHECK(f.max_angle == doctest::Approx(30.0).epsilon(1e-12));
}

TEST_CASE("extract_features flags a gait without stance") {
  const auto raw = oracle::capture_of([](double t) { return gait_like(t, 1.2); }, 12.0, 50.0);
  const auto segs = segment_steps(raw);
  PhaseLabels swing;
  swing.labels.fill(Phase::swing);
  CHECK_THROWS_AS(extract_features(raw, segs, swing), InvalidGaitError);
}

TEST_CASE("synthetic captures recover their source cycle") {
  const auto gait = synthetic::synthesize_gait({}, BodyParams{});
  for (const auto* cyc : {&gait.cycles.hip, &gait.cycles.knee, &gait.cycles.ankle}) {
    synthetic::CaptureOptions opts;
    opts.sample_rate = 100.0;
    const auto cap = synthetic::synthesize_capture(*cyc, opts);
    SignalOptions so;
    so.onset_offset = cap.onset_offset;
    const auto segs = segment_steps(denoise(cap.capture, so), so);
    CHECK(segs.size() == opts.strides);
    const auto cycle = summarize_cycle(segs, cap.capture, so);
    CHECK(cycle.joint == cyc->joint);
    for (std::size_t i = 0; i < kCycleLength; ++i) CHECK(cycle.angles[i] == doctest::Approx(cyc->angles[i]).epsilon(1e-9));
  }
}
