#pragma once

// Planar (sagittal) kinematic chain of one lower limb in a hip-fixed frame:
// x forward, y up, hip at the origin.
//
// Joint angle conventions (degrees at the API, radians inside):
//   hip   flexion positive, thigh rotated forward of vertical
//   knee  flexion positive, shank rotated back relative to thigh
//   ankle dorsiflexion positive, toe raised relative to the shank-fixed foot
// The foot is the heel-ankle-toe line, horizontal when shank is vertical and
// the ankle angle is zero.

#include <array>
#include <optional>

#include "gaitlab/body.hpp"
#include "gaitlab/signal.hpp"

namespace gaitlab::kinematics {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

struct LimbPose {
  Point hip;
  Point knee;
  Point ankle;
  Point heel;
  Point toe;
  double thigh_from_vertical = 0.0;  // radians
  double shank_from_vertical = 0.0;
  double foot_from_horizontal = 0.0;

  /// Height of the lowest foot point (heel or toe).
  double foot_height() const { return heel.y < toe.y ? heel.y : toe.y; }
};

LimbPose limb_pose(double hip_deg, double knee_deg, double ankle_deg, const BodyParams& body);

struct LimbCycles {
  signal::GaitCycle hip;
  signal::GaitCycle knee;
  signal::GaitCycle ankle;

  /// Throws ShapeError on wrong joint tags or lengths.
  void validate() const;
};

std::array<LimbPose, kCycleLength> cycle_poses(const LimbCycles& cycles, const BodyParams& body);

struct ContactOptions {
  double threshold_fraction = 0.02;     // of leg length
  std::optional<double> ground_height;  // hip frame, metres; default: cycle minimum
};

/// Stance where the lowest foot point is within the contact threshold of the ground.
signal::PhaseLabels classify_phases(const LimbCycles& cycles, const BodyParams& body,
                                    const ContactOptions& opts = {});

/// Horizontal body-centre offset from the hip over the cycle (hip frame).
struct CentreOfMassModel {
  double amplitude_fraction = 0.02;  // of thigh length
  double phase = 0.0;                // radians

  double offset(double cycle_phase, const BodyParams& body) const;
};

}  // namespace gaitlab::kinematics
