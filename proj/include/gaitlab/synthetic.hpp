#pragma once

// Forward-kinematics gait generator. Produces joint cycles whose stance and
// swing labels are known by construction, and raw captures built from them.

#include <cstdint>
#include <random>

#include "gaitlab/body.hpp"
#include "gaitlab/kinematics.hpp"
#include "gaitlab/random.hpp"
#include "gaitlab/signal.hpp"

namespace gaitlab::synthetic {

struct GaitShape {
  double stance_fraction = 0.6;
  double hip_offset_deg = 5.0;
  double hip_amplitude_deg = 20.0;
  double stance_knee_deg = 12.0;
  double swing_knee_deg = 60.0;
  double swing_toe_deg = 5.0;
  double heel_contact_fraction = 0.3;  // leading share of stance on the heel
};

struct SyntheticGait {
  kinematics::LimbCycles cycles;
  signal::PhaseLabels labels;
};

/// Stance samples put the lowest foot point exactly on the ground; swing
/// samples clear it by at least twice the contact threshold. Throws
/// ValidationError when the shape cannot satisfy both for this body.
SyntheticGait synthesize_gait(const GaitShape& shape, const BodyParams& body,
                              double threshold_fraction = 0.02);

GaitShape random_shape(std::mt19937_64& rng);
/// Crouched, short stride with prolonged stance.
GaitShape pathological_shape(std::mt19937_64& rng);
BodyParams random_body(std::mt19937_64& rng);

struct CaptureOptions {
  std::size_t strides = 10;
  double stride_s = 1.2;
  double sample_rate = 50.0;
  double noise_deg = 0.0;       // Gaussian noise on every axis
  double spike_rate = 0.0;      // probability of an outlier per sample
  double spike_deg = 90.0;
  std::uint64_t seed = 1;
  signal::Axis sagittal_axis = signal::Axis::beta;
};

struct SyntheticCapture {
  signal::RawCapture capture;
  double onset_offset = 0.0;  // value for SignalOptions::onset_offset
};

/// Repeats the cycle (periodic linear interpolation) for `strides` strides,
/// starting each stride at the cycle's maximum. The last sample closes the
/// final stride.
SyntheticCapture synthesize_capture(const signal::GaitCycle& cycle, const CaptureOptions& opts);

using rng::gaussian;
using rng::uniform;
using rng::uniform01;

}  // namespace gaitlab::synthetic
