#include "gaitlab/kinematics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gaitlab/error.hpp"

namespace gaitlab::kinematics {

LimbPose limb_pose(double hip_deg, double knee_deg, double ankle_deg, const BodyParams& body) {
  LimbPose p;
  p.thigh_from_vertical = deg_to_rad(hip_deg);
  p.shank_from_vertical = p.thigh_from_vertical - deg_to_rad(knee_deg);
  p.foot_from_horizontal = p.shank_from_vertical + deg_to_rad(ankle_deg);

  p.knee = {body.thigh_length * std::sin(p.thigh_from_vertical),
            -body.thigh_length * std::cos(p.thigh_from_vertical)};
  p.ankle = {p.knee.x + body.leg_length * std::sin(p.shank_from_vertical),
             p.knee.y - body.leg_length * std::cos(p.shank_from_vertical)};
  const double c = std::cos(p.foot_from_horizontal);
  const double s = std::sin(p.foot_from_horizontal);
  p.toe = {p.ankle.x + body.foot_length * c, p.ankle.y + body.foot_length * s};
  p.heel = {p.ankle.x - body.heel_to_ankle * c, p.ankle.y - body.heel_to_ankle * s};
  return p;
}

void LimbCycles::validate() const {
  const std::array<std::pair<const signal::GaitCycle*, Joint>, 3> expected{
      {{&hip, Joint::hip}, {&knee, Joint::knee}, {&ankle, Joint::ankle}}};
  for (const auto& [cycle, joint] : expected) {
    if (cycle->joint != joint) {
      throw ShapeError("expected a " + std::string(to_string(joint)) + " cycle, got " +
                       std::string(to_string(cycle->joint)));
    }
    cycle->validate();
  }
}

std::array<LimbPose, kCycleLength> cycle_poses(const LimbCycles& cycles, const BodyParams& body) {
  cycles.validate();
  std::array<LimbPose, kCycleLength> poses;
  for (std::size_t i = 0; i < kCycleLength; ++i) {
    poses[i] = limb_pose(cycles.hip.angles[i], cycles.knee.angles[i], cycles.ankle.angles[i], body);
  }
  return poses;
}

signal::PhaseLabels classify_phases(const LimbCycles& cycles, const BodyParams& body,
                                    const ContactOptions& opts) {
  body.validate();
  const auto poses = cycle_poses(cycles, body);
  std::array<double, kCycleLength> height{};
  for (std::size_t i = 0; i < kCycleLength; ++i) height[i] = poses[i].foot_height();
  const double ground = opts.ground_height.value_or(*std::min_element(height.begin(), height.end()));
  const double limit = ground + opts.threshold_fraction * body.leg_length;

  signal::PhaseLabels labels;
  for (std::size_t i = 0; i < kCycleLength; ++i) {
    labels.labels[i] = height[i] <= limit ? signal::Phase::stance : signal::Phase::swing;
  }
  return labels;
}

double CentreOfMassModel::offset(double cycle_phase, const BodyParams& body) const {
  return amplitude_fraction * body.thigh_length *
         std::sin(2.0 * std::numbers::pi * cycle_phase + phase);
}

}  // namespace gaitlab::kinematics
