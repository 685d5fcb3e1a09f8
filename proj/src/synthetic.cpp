#include "gaitlab/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gaitlab/error.hpp"

namespace gaitlab::synthetic {

namespace {

constexpr double kPi = std::numbers::pi;

double periodic_lerp(const std::vector<double>& cycle, double pos) {
  const auto n = static_cast<double>(cycle.size());
  pos -= std::floor(pos / n) * n;
  const double base = std::floor(pos);
  const double w = pos - base;
  const auto i = static_cast<std::size_t>(base) % cycle.size();
  const double a = cycle[i];
  if (w == 0.0) return a;
  return a + w * (cycle[(i + 1) % cycle.size()] - a);
}

}  // namespace

SyntheticGait synthesize_gait(const GaitShape& shape, const BodyParams& body, double threshold_fraction) {
  body.validate();
  constexpr std::size_t n = kCycleLength;
  const auto n_stance = static_cast<std::size_t>(
      std::clamp(std::lround(shape.stance_fraction * static_cast<double>(n)), 1L, static_cast<long>(n) - 1));
  const std::size_t n_swing = n - n_stance;
  const auto n_heel = static_cast<std::size_t>(
      std::lround(shape.heel_contact_fraction * static_cast<double>(n_stance)));

  std::vector<double> hip(n), knee(n), ankle(n);
  std::vector<double> foot_angle(n);
  std::vector<kinematics::LimbPose> bare(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double phase = static_cast<double>(i) / static_cast<double>(n);
    hip[i] = shape.hip_offset_deg + shape.hip_amplitude_deg * std::cos(2.0 * kPi * phase);
    if (i < n_stance) {
      knee[i] = shape.stance_knee_deg *
                std::sin(kPi * (static_cast<double>(i) + 0.5) / static_cast<double>(n_stance));
    } else {
      const double u = static_cast<double>(i - n_stance + 1) / static_cast<double>(n_swing + 1);
      knee[i] = shape.swing_knee_deg * std::sin(kPi * u);
    }
    bare[i] = kinematics::limb_pose(hip[i], knee[i], 0.0, body);
  }

  double ground = bare[0].ankle.y;
  for (std::size_t i = 0; i < n_stance; ++i) ground = std::min(ground, bare[i].ankle.y);

  const double threshold = threshold_fraction * body.leg_length;
  // Heel contact is a leading run of stance; once the foot rolls onto the toe
  // it stays there until toe-off.
  bool on_heel = true;
  for (std::size_t i = 0; i < n; ++i) {
    const double lift = bare[i].ankle.y - ground;
    if (i < n_stance) {
      on_heel = on_heel && i < n_heel && lift <= 0.9 * body.heel_to_ankle;
      if (on_heel) {
        foot_angle[i] = std::asin(lift / body.heel_to_ankle);
      } else if (lift <= 0.9 * body.foot_length) {
        foot_angle[i] = -std::asin(lift / body.foot_length);
      } else {
        throw ValidationError("synthetic gait: stance sample " + std::to_string(i) +
                              " cannot reach the ground");
      }
    } else {
      const double u = static_cast<double>(i - n_stance + 1) / static_cast<double>(n_swing + 1);
      foot_angle[i] = deg_to_rad(shape.swing_toe_deg * std::sin(kPi * u));
    }
    ankle[i] = rad_to_deg(foot_angle[i] - bare[i].shank_from_vertical);
    if (i >= n_stance) {
      const auto pose = kinematics::limb_pose(hip[i], knee[i], ankle[i], body);
      if (pose.foot_height() - ground < 2.0 * threshold) {
        throw ValidationError("synthetic gait: swing sample " + std::to_string(i) +
                              " lacks ground clearance");
      }
    }
  }

  SyntheticGait g;
  g.cycles.hip = {Joint::hip, hip};
  g.cycles.knee = {Joint::knee, knee};
  g.cycles.ankle = {Joint::ankle, ankle};
  for (std::size_t i = 0; i < n; ++i) {
    g.labels.labels[i] = i < n_stance ? signal::Phase::stance : signal::Phase::swing;
  }
  return g;
}

GaitShape random_shape(std::mt19937_64& rng) {
  GaitShape s;
  s.stance_fraction = uniform(rng, 0.55, 0.65);
  s.hip_offset_deg = uniform(rng, 3.0, 8.0);
  s.hip_amplitude_deg = uniform(rng, 15.0, 22.0);
  s.stance_knee_deg = uniform(rng, 5.0, 18.0);
  s.swing_knee_deg = uniform(rng, 55.0, 68.0);
  s.swing_toe_deg = uniform(rng, 0.0, 10.0);
  s.heel_contact_fraction = uniform(rng, 0.1, 0.4);
  return s;
}

GaitShape pathological_shape(std::mt19937_64& rng) {
  GaitShape s;
  s.stance_fraction = uniform(rng, 0.62, 0.66);
  s.hip_offset_deg = uniform(rng, 12.0, 18.0);
  s.hip_amplitude_deg = uniform(rng, 10.0, 14.0);
  s.stance_knee_deg = uniform(rng, 18.0, 24.0);
  s.swing_knee_deg = uniform(rng, 64.0, 72.0);
  s.swing_toe_deg = uniform(rng, 8.0, 14.0);
  s.heel_contact_fraction = uniform(rng, 0.0, 0.15);
  return s;
}

BodyParams random_body(std::mt19937_64& rng) {
  BodyParams b;
  b.body_mass = uniform(rng, 50.0, 100.0);
  b.leg_length = uniform(rng, 0.36, 0.46);
  b.thigh_length = uniform(rng, 0.38, 0.50);
  b.foot_length = uniform(rng, 0.20, 0.27);
  b.heel_to_ankle = uniform(rng, 0.045, 0.07);
  b.ankle_to_foot_centre = 0.4 * b.foot_length;
  b.knee_to_leg_centre = 0.433 * b.leg_length;
  b.hip_to_full_leg_centre = 0.447 * (b.leg_length + b.thigh_length);
  return b;
}

SyntheticCapture synthesize_capture(const signal::GaitCycle& cycle, const CaptureOptions& opts) {
  cycle.validate();
  if (opts.strides == 0 || !(opts.stride_s > 0.0) || !(opts.sample_rate > 0.0)) {
    throw ValidationError("synthetic capture: strides, stride duration and rate must be positive");
  }
  const auto& w = cycle.angles;
  const auto peak = static_cast<std::size_t>(std::max_element(w.begin(), w.end()) - w.begin());
  const double n = static_cast<double>(w.size());

  double per_stride = opts.stride_s * opts.sample_rate;
  if (std::abs(per_stride - std::round(per_stride)) < 1e-9) per_stride = std::round(per_stride);
  const auto total = static_cast<std::size_t>(std::llround(per_stride * static_cast<double>(opts.strides)));

  std::mt19937_64 rng(opts.seed);
  SyntheticCapture out;
  out.capture.placement_joint = cycle.joint;
  out.capture.sample_rate = opts.sample_rate;
  out.capture.samples.reserve(total + 1);
  for (std::size_t j = 0; j <= total; ++j) {
    signal::OrientationSample s;
    s.t_ms = static_cast<double>(j) * 1000.0 / opts.sample_rate;
    const double pos = static_cast<double>(j) * n / per_stride + static_cast<double>(peak);
    const double stride_phase = static_cast<double>(j) / per_stride;
    s.alpha = 180.0 + 2.0 * std::sin(2.0 * kPi * stride_phase);
    s.beta = 0.0;
    s.gamma = 3.0 * std::cos(2.0 * kPi * stride_phase);
    s.axis(opts.sagittal_axis) = periodic_lerp(w, pos);
    if (opts.noise_deg > 0.0) {
      s.alpha += opts.noise_deg * gaussian(rng);
      s.beta += opts.noise_deg * gaussian(rng);
      s.gamma += opts.noise_deg * gaussian(rng);
    }
    if (opts.spike_rate > 0.0 && uniform01(rng) < opts.spike_rate) {
      s.axis(opts.sagittal_axis) += uniform01(rng) < 0.5 ? -opts.spike_deg : opts.spike_deg;
    }
    out.capture.samples.push_back(s);
  }
  out.onset_offset = static_cast<double>((w.size() - peak) % w.size()) / n;
  return out;
}

}  // namespace gaitlab::synthetic
