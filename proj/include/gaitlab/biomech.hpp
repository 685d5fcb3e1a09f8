#pragma once

// Agent-driven inverse dynamics of the lower body. Each joint agent turns its
// angle trajectory into the net joint torque (inertia x angular acceleration);
// the Boots routine removes environmental torques and converts the remainder
// into a contraction force for one muscle group.
//
// Internal units are SI: radians, seconds, newtons, kilograms, metres.

#include <array>
#include <map>
#include <span>
#include <vector>

#include "gaitlab/body.hpp"
#include "gaitlab/kinematics.hpp"
#include "gaitlab/types.hpp"

namespace gaitlab::biomech {

struct SegmentMasses {
  double feet = 0.0;
  double leg = 0.0;
  double thigh = 0.0;
};

SegmentMasses segment_masses(const BodyParams& body, const AnthropometryTable& table = {});

/// Ankle uses the foot segment, knee the leg (shank), hip the thigh.
double moment_of_inertia(Joint joint, const BodyParams& body, const AnthropometryTable& table = {});

/// Second difference; central inside, one-sided at both ends. Requires n >= 3.
std::vector<double> angular_acceleration(std::span<const double> theta, double dt);

struct JointAgent {
  Joint joint = Joint::ankle;
  std::vector<double> theta;  // radians per timestep
  double dt = 0.0;            // seconds
  double inertia = 0.0;       // kg m^2

  void validate() const;
  std::vector<double> net_torque() const;
};

struct MuscleInsertion {
  double distance = 0.05;                  // joint to ligament, metres
  double angle = deg_to_rad(15.0);         // force line vs bone, radians
  std::vector<double> angle_trajectory;    // per timestep; overrides `angle` when set

  double angle_at(std::size_t t) const;
};

/// Indexed [timestep][source].
using EnvironmentalTorques = std::vector<std::vector<double>>;

/// Builds per-timestep rows from per-source columns (the Concat step).
EnvironmentalTorques stack_sources(const std::vector<std::vector<double>>& sources);

struct ForceTrajectory {
  MuscleGroup muscle = MuscleGroup::gastrocnemius;
  double dt = 0.0;
  std::vector<double> forces;  // newtons, all >= 0

  void validate() const;
};

/// Per timestep: ReLU((I*alpha - sum(env)) / (distance * sin(angle))).
ForceTrajectory boots(const JointAgent& joint, MuscleGroup muscle, const MuscleInsertion& insertion,
                      const EnvironmentalTorques& env);

/// Insertion geometry per (muscle, joint) pair.
class InsertionTable {
 public:
  InsertionTable();
  const MuscleInsertion& at(MuscleGroup muscle, Joint joint) const;
  void set(MuscleGroup muscle, Joint joint, MuscleInsertion insertion);
  std::vector<std::pair<MuscleGroup, Joint>> keys() const;

 private:
  std::map<std::pair<MuscleGroup, Joint>, MuscleInsertion> table_;
};

struct BiomechConfig {
  AnthropometryTable anthropometry;
  InsertionTable insertions;
  kinematics::CentreOfMassModel centre_of_mass;
  kinematics::ContactOptions contact;
  double cross_joint_angle = deg_to_rad(5.0);  // hamstrings/gastrocnemius lever onto the hip
  double cycle_duration_s = 1.2;
};

/// Geometry and loads for every timestep of one cycle.
struct GaitState {
  signal::PhaseLabels labels;
  std::array<kinematics::LimbPose, kCycleLength> poses;
  SegmentMasses masses;
  double dt = 0.0;
  std::vector<double> weight_ankle;    // felt weight W(t), newtons
  std::vector<double> weight_knee;
  std::vector<double> weight_hip;
  std::vector<double> centre_offset;   // body centre minus hip, horizontal, metres
  std::vector<double> ground_toe;
  std::vector<double> ground_heel;
  // sin of each segment's rotation away from its upright standing pose
  std::vector<double> sin_foot_vertical;
  std::vector<double> sin_leg_vertical;
  std::vector<double> sin_thigh_vertical;
  JointAgent ankle;
  JointAgent knee;
  JointAgent hip;
};

GaitState build_state(const kinematics::LimbCycles& cycles, const BodyParams& body,
                      const BiomechConfig& config = {});

/// Felt weight at a joint for a stance timestep.
double felt_weight(Joint joint, const BodyParams& body, const SegmentMasses& masses);

/// Lever rule: share of W carried by the toe from the horizontal position of
/// the body centre between heel and toe. Zero in swing.
double ground_reaction_toe(double weight, bool stance, double heel_x, double toe_x, double centre_x);
double ground_reaction_heel(double weight, double toe_force);

ForceTrajectory gastrocnemius_force(const GaitState& s, const BodyParams& body, const BiomechConfig& c);
ForceTrajectory tibialis_anterior_force(const GaitState& s, const BodyParams& body, const BiomechConfig& c);
ForceTrajectory quadriceps_force(const GaitState& s, const BodyParams& body, const BiomechConfig& c);
ForceTrajectory hamstrings_force(const GaitState& s, const BodyParams& body, const BiomechConfig& c);
/// Needs the hamstrings and gastrocnemius trajectories of the same state.
ForceTrajectory gluteus_force(const GaitState& s, const BodyParams& body, const BiomechConfig& c,
                              const ForceTrajectory& hamstrings, const ForceTrajectory& gastrocnemius);
ForceTrajectory iliopsoas_force(const GaitState& s, const BodyParams& body, const BiomechConfig& c,
                                const ForceTrajectory& hamstrings, const ForceTrajectory& gastrocnemius);

/// Environmental torque columns, exposed so tests can evaluate them independently.
std::vector<std::vector<double>> gastrocnemius_env(const GaitState& s, const BodyParams& body);
std::vector<std::vector<double>> gluteus_env(const GaitState& s, const BodyParams& body,
                                             const BiomechConfig& c, const ForceTrajectory& hamstrings,
                                             const ForceTrajectory& gastrocnemius);

using LowerBodyForces = std::map<MuscleGroup, ForceTrajectory>;

/// All six muscle groups. First stage: gastrocnemius, tibialis anterior,
/// quadriceps, hamstrings; second stage: gluteus, iliopsoas.
LowerBodyForces simulate_lower_body(const kinematics::LimbCycles& cycles, const BodyParams& body,
                                    const BiomechConfig& config = {});

}  // namespace gaitlab::biomech
