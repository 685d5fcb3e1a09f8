#pragma once

// Raw orientation captures to a single canonical gait cycle.
//
//   denoise -> segment_steps -> summarize_cycle
//                            -> extract_features
//
// Every function here is pure.

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "gaitlab/types.hpp"

namespace gaitlab::signal {

enum class Axis { alpha, beta, gamma };

struct OrientationSample {
  double t_ms = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double gamma = 0.0;

  double axis(Axis a) const;
  double& axis(Axis a);
};

struct RawCapture {
  Joint placement_joint = Joint::ankle;
  double sample_rate = 0.0;  // samples per second
  std::vector<OrientationSample> samples;

  /// Strictly increasing timestamps, positive rate, at least two samples.
  void validate() const;
  std::vector<double> axis_values(Axis a) const;
  double duration_s() const;
};

/// One normalized cycle: kCycleLength angles in degrees at 5% steps from stance onset.
struct GaitCycle {
  Joint joint = Joint::ankle;
  std::vector<double> angles;

  void validate() const;
};

enum class Phase { stance, swing };

struct PhaseLabels {
  std::array<Phase, kCycleLength> labels{};

  std::size_t stance_count() const;
  std::size_t swing_count() const;
  bool valid_gait() const { return stance_count() > 0 && swing_count() > 0; }
};

struct GaitFeatures {
  double min_angle = 0.0;  // degrees
  double max_angle = 0.0;
  std::size_t step_count = 0;
  double stance_swing_ratio = 0.0;
  double speed = 0.0;          // steps per second
  double time_per_step = 0.0;  // seconds
};

/// Stride between two consecutive stance onsets. Samples [begin, end) belong
/// to the stride; `end` is the next stride's onset and closes it when resampling.
struct StepSegment {
  std::size_t begin = 0;
  std::size_t end = 0;

  friend bool operator==(const StepSegment&, const StepSegment&) = default;
};

struct SignalOptions {
  std::size_t hampel_window = 5;
  double hampel_threshold = 3.0;   // in scaled MADs
  std::size_t hampel_max_passes = 32;
  Axis sagittal_axis = Axis::beta;
  double min_peak_distance_s = 0.4;
  double min_peak_prominence = 0.5;  // fraction of the signal range
  double boundary_tolerance = 0.2;   // allowed relative deviation of edge strides
  double onset_offset = 0.0;         // stance onset phase measured forward from the detected peak
};

/// Hampel filter, repeated until no sample changes (or max_passes).
/// Truncated windows at the edges. Throws SignalTooShortError when the
/// series is shorter than the window.
std::vector<double> hampel(std::span<const double> x, std::size_t window, double threshold,
                           std::size_t max_passes = 32);

RawCapture denoise(const RawCapture& raw, const SignalOptions& opts = {});

std::vector<StepSegment> segment_steps(const RawCapture& raw, const SignalOptions& opts = {});

/// Linear-interpolation resample of one stride to kCycleLength points.
std::vector<double> resample_segment(const RawCapture& raw, const StepSegment& seg, Axis axis);

GaitCycle summarize_cycle(std::span<const StepSegment> segments, const RawCapture& raw,
                          const SignalOptions& opts = {});

/// `labels` classify the summarized cycle; see classify_phases.
GaitFeatures extract_features(const RawCapture& raw, std::span<const StepSegment> segments,
                              const PhaseLabels& labels, const SignalOptions& opts = {});

/// Circularly shifts a cycle so that output[i] = input at phase (i/N + offset).
std::vector<double> rotate_cycle(std::span<const double> cycle, double offset);

}  // namespace gaitlab::signal
