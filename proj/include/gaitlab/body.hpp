#pragma once

namespace gaitlab {

/// Subject anthropometry. Lengths in metres, mass in kilograms.
struct BodyParams {
  double body_mass = 80.0;
  double foot_length = 0.25;           // ankle to toe
  double leg_length = 0.40;            // ankle to knee
  double thigh_length = 0.45;          // knee to hip
  double heel_to_ankle = 0.06;
  double ankle_to_foot_centre = 0.10;
  double knee_to_leg_centre = 0.17;
  double hip_to_full_leg_centre = 0.36;

  /// Throws ValidationError when a field is non-positive or the foot is shorter than the heel offset.
  void validate() const;
};

/// Segment mass fractions and radius-of-gyration ratios (Winter's tables).
/// One instance is the single source of truth for these constants.
struct AnthropometryTable {
  double feet_mass_fraction = 0.0145;
  double leg_mass_fraction = 0.0465;
  double thigh_mass_fraction = 0.100;
  double feet_gyration_ratio = 0.62;
  double leg_gyration_ratio = 0.528;
  double thigh_gyration_ratio = 0.540;
};

}  // namespace gaitlab
