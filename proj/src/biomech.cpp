#include "gaitlab/biomech.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "gaitlab/error.hpp"

namespace gaitlab {

void BodyParams::validate() const {
  const std::array<std::pair<const char*, double>, 8> fields{{
      {"body_mass", body_mass},
      {"foot_length", foot_length},
      {"leg_length", leg_length},
      {"thigh_length", thigh_length},
      {"heel_to_ankle", heel_to_ankle},
      {"ankle_to_foot_centre", ankle_to_foot_centre},
      {"knee_to_leg_centre", knee_to_leg_centre},
      {"hip_to_full_leg_centre", hip_to_full_leg_centre},
  }};
  for (const auto& [name, value] : fields) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw SchemaError(std::string("body.") + name, "must be a positive finite number");
    }
  }
  if (!(foot_length > heel_to_ankle)) {
    throw SchemaError("body.foot_length", "must exceed heel_to_ankle");
  }
}

}  // namespace gaitlab

namespace gaitlab::biomech {

SegmentMasses segment_masses(const BodyParams& body, const AnthropometryTable& table) {
  body.validate();
  return {table.feet_mass_fraction * body.body_mass, table.leg_mass_fraction * body.body_mass,
          table.thigh_mass_fraction * body.body_mass};
}

double moment_of_inertia(Joint joint, const BodyParams& body, const AnthropometryTable& table) {
  const SegmentMasses m = segment_masses(body, table);
  auto radial = [](double mass, double ratio, double length) {
    return mass * (ratio * ratio) * (length * length);
  };
  switch (joint) {
    case Joint::ankle:
      return radial(m.feet, table.feet_gyration_ratio, body.foot_length);
    case Joint::knee:
      return radial(m.leg, table.leg_gyration_ratio, body.leg_length);
    case Joint::hip:
      return radial(m.thigh, table.thigh_gyration_ratio, body.thigh_length);
  }
  throw DomainError("moment_of_inertia: unknown joint");
}

std::vector<double> angular_acceleration(std::span<const double> theta, double dt) {
  if (theta.size() < 3) {
    throw SignalTooShortError("angular acceleration needs at least 3 samples, got " +
                              std::to_string(theta.size()));
  }
  if (!(dt > 0.0)) throw ValidationError("angular acceleration: dt must be positive");
  const std::size_t n = theta.size();
  const double inv = 1.0 / (dt * dt);
  auto second = [&](std::size_t c) { return (theta[c - 1] - 2.0 * theta[c] + theta[c + 1]) * inv; };
  std::vector<double> a(n);
  for (std::size_t i = 1; i + 1 < n; ++i) a[i] = second(i);
  a[0] = second(1);
  a[n - 1] = second(n - 2);
  return a;
}

void JointAgent::validate() const {
  if (!(inertia > 0.0)) throw ValidationError("joint agent: inertia must be positive");
  if (!(dt > 0.0)) throw ValidationError("joint agent: dt must be positive");
}

std::vector<double> JointAgent::net_torque() const {
  validate();
  auto alpha = angular_acceleration(theta, dt);
  for (double& v : alpha) v *= inertia;
  return alpha;
}

double MuscleInsertion::angle_at(std::size_t t) const {
  return angle_trajectory.empty() ? angle : angle_trajectory.at(t);
}

EnvironmentalTorques stack_sources(const std::vector<std::vector<double>>& sources) {
  if (sources.empty()) return {};
  const std::size_t n = sources.front().size();
  for (const auto& s : sources) {
    if (s.size() != n) throw ShapeError("environmental torque sources differ in length");
  }
  EnvironmentalTorques env(n, std::vector<double>(sources.size()));
  for (std::size_t k = 0; k < sources.size(); ++k) {
    for (std::size_t t = 0; t < n; ++t) env[t][k] = sources[k][t];
  }
  return env;
}

void ForceTrajectory::validate() const {
  for (std::size_t i = 0; i < forces.size(); ++i) {
    if (!std::isfinite(forces[i]) || forces[i] < 0.0) {
      throw SchemaError("forces[" + std::to_string(i) + "]", "must be finite and non-negative");
    }
  }
  if (!(dt > 0.0)) throw SchemaError("dt", "must be positive");
}

ForceTrajectory boots(const JointAgent& joint, MuscleGroup muscle, const MuscleInsertion& insertion,
                      const EnvironmentalTorques& env) {
  const std::vector<double> torque = joint.net_torque();
  const std::size_t n = torque.size();
  if (env.size() != n) {
    throw ShapeError("environmental torques cover " + std::to_string(env.size()) +
                     " timesteps, trajectory has " + std::to_string(n));
  }
  if (!(insertion.distance > 0.0)) throw ValidationError("insertion distance must be positive");
  if (!insertion.angle_trajectory.empty() && insertion.angle_trajectory.size() != n) {
    throw ShapeError("insertion angle trajectory length mismatch");
  }

  ForceTrajectory out{muscle, joint.dt, std::vector<double>(n, 0.0)};
  for (std::size_t t = 0; t < n; ++t) {
    double total = torque[t];
    for (double e : env[t]) total -= e;
    const double s = std::sin(insertion.angle_at(t));
    if (std::abs(s) < 1e-6) {
      throw SingularGeometryError("insertion angle too close to 0 or pi at timestep " + std::to_string(t));
    }
    out.forces[t] = std::max(total / (insertion.distance * s), 0.0);
  }
  return out;
}

InsertionTable::InsertionTable() {
  auto distance = [](Joint j) {
    switch (j) {
      case Joint::ankle:
        return 0.05;
      case Joint::knee:
        return 0.04;
      case Joint::hip:
        return 0.07;
    }
    return 0.05;
  };
  const std::array<std::pair<MuscleGroup, Joint>, 8> pairs{{
      {MuscleGroup::gastrocnemius, Joint::ankle},
      {MuscleGroup::tibialis_anterior, Joint::ankle},
      {MuscleGroup::quadriceps, Joint::knee},
      {MuscleGroup::quadriceps, Joint::hip},
      {MuscleGroup::hamstrings, Joint::knee},
      {MuscleGroup::hamstrings, Joint::hip},
      {MuscleGroup::gluteus, Joint::hip},
      {MuscleGroup::iliopsoas, Joint::hip},
  }};
  for (const auto& [m, j] : pairs) table_[{m, j}] = MuscleInsertion{distance(j), deg_to_rad(15.0), {}};
}

const MuscleInsertion& InsertionTable::at(MuscleGroup muscle, Joint joint) const {
  auto it = table_.find({muscle, joint});
  if (it == table_.end()) {
    throw DomainError(std::string(to_string(muscle)) + " does not act on the " +
                      std::string(to_string(joint)));
  }
  return it->second;
}

void InsertionTable::set(MuscleGroup muscle, Joint joint, MuscleInsertion insertion) {
  at(muscle, joint);
  if (!(insertion.distance > 0.0) || !(insertion.angle > 0.0) || !(insertion.angle < std::numbers::pi)) {
    throw ValidationError("insertion: distance must be positive and angle within (0, pi)");
  }
  table_[{muscle, joint}] = std::move(insertion);
}

std::vector<std::pair<MuscleGroup, Joint>> InsertionTable::keys() const {
  std::vector<std::pair<MuscleGroup, Joint>> k;
  for (const auto& [key, _] : table_) k.push_back(key);
  return k;
}

double felt_weight(Joint joint, const BodyParams& body, const SegmentMasses& m) {
  switch (joint) {
    case Joint::ankle:
      return kGravity * (body.body_mass - m.feet);
    case Joint::knee:
      return kGravity * (body.body_mass - m.feet - m.leg);
    case Joint::hip:
      return kGravity * (body.body_mass - m.feet - m.leg - m.thigh);
  }
  return 0.0;
}

double ground_reaction_toe(double weight, bool stance, double heel_x, double toe_x, double centre_x) {
  if (!stance) return 0.0;
  const double span = toe_x - heel_x;
  if (!(span > 1e-12)) return centre_x >= heel_x ? weight : 0.0;
  return weight * std::clamp((centre_x - heel_x) / span, 0.0, 1.0);
}

double ground_reaction_heel(double weight, double toe_force) { return weight - toe_force; }

GaitState build_state(const kinematics::LimbCycles& cycles, const BodyParams& body,
                      const BiomechConfig& config) {
  body.validate();
  if (!(config.cycle_duration_s > 0.0)) throw ValidationError("cycle duration must be positive");
  GaitState s;
  s.labels = kinematics::classify_phases(cycles, body, config.contact);
  s.poses = kinematics::cycle_poses(cycles, body);
  s.masses = segment_masses(body, config.anthropometry);
  s.dt = config.cycle_duration_s / static_cast<double>(kCycleLength);

  const std::size_t n = kCycleLength;
  for (auto* v : {&s.weight_ankle, &s.weight_knee, &s.weight_hip, &s.centre_offset, &s.ground_toe,
                  &s.ground_heel, &s.sin_foot_vertical, &s.sin_leg_vertical, &s.sin_thigh_vertical}) {
    v->assign(n, 0.0);
  }
  for (std::size_t t = 0; t < n; ++t) {
    const bool stance = s.labels.labels[t] == signal::Phase::stance;
    const auto& p = s.poses[t];
    s.weight_ankle[t] = stance ? felt_weight(Joint::ankle, body, s.masses) : 0.0;
    s.weight_knee[t] = stance ? felt_weight(Joint::knee, body, s.masses) : 0.0;
    s.weight_hip[t] = stance ? felt_weight(Joint::hip, body, s.masses) : 0.0;
    const double phase = static_cast<double>(t) / static_cast<double>(n);
    s.centre_offset[t] = config.centre_of_mass.offset(phase, body);
    s.ground_toe[t] = ground_reaction_toe(s.weight_ankle[t], stance, p.heel.x, p.toe.x, s.centre_offset[t]);
    s.ground_heel[t] = ground_reaction_heel(s.weight_ankle[t], s.ground_toe[t]);
    // Segment angles in the sin terms are rotations from the upright standing
    // pose: the shank and thigh from vertical, the foot from horizontal.
    s.sin_foot_vertical[t] = std::sin(p.foot_from_horizontal);
    s.sin_leg_vertical[t] = std::sin(p.shank_from_vertical);
    s.sin_thigh_vertical[t] = std::sin(p.thigh_from_vertical);
  }

  auto agent = [&](Joint j, const signal::GaitCycle& c) {
    JointAgent a;
    a.joint = j;
    a.dt = s.dt;
    a.inertia = moment_of_inertia(j, body, config.anthropometry);
    a.theta.resize(n);
    std::transform(c.angles.begin(), c.angles.end(), a.theta.begin(), deg_to_rad);
    return a;
  };
  s.ankle = agent(Joint::ankle, cycles.ankle);
  s.knee = agent(Joint::knee, cycles.knee);
  s.hip = agent(Joint::hip, cycles.hip);
  return s;
}

namespace {

std::vector<std::vector<double>> negated(std::vector<std::vector<double>> cols) {
  for (auto& c : cols) {
    for (double& v : c) v = -v;
  }
  return cols;
}

ForceTrajectory sum_forces(MuscleGroup muscle, const ForceTrajectory& a, const ForceTrajectory& b) {
  ForceTrajectory out{muscle, a.dt, a.forces};
  for (std::size_t i = 0; i < out.forces.size(); ++i) out.forces[i] += b.forces[i];
  return out;
}

std::vector<std::vector<double>> knee_env(const GaitState& s, const BodyParams& body) {
  std::vector<double> col(kCycleLength);
  for (std::size_t t = 0; t < kCycleLength; ++t) {
    col[t] = s.weight_ankle[t] * body.leg_length * s.sin_leg_vertical[t];
  }
  return {col};
}

std::vector<std::vector<double>> hip_posture_env(const GaitState& s) {
  std::vector<double> col(kCycleLength);
  for (std::size_t t = 0; t < kCycleLength; ++t) col[t] = s.weight_hip[t] * s.centre_offset[t];
  return {col};
}

ForceTrajectory two_joint_force(MuscleGroup muscle, const GaitState& s, const BodyParams& body,
                                const BiomechConfig& c, bool mirrored) {
  auto knee_cols = knee_env(s, body);
  auto hip_cols = hip_posture_env(s);
  if (mirrored) {
    knee_cols = negated(std::move(knee_cols));
    hip_cols = negated(std::move(hip_cols));
  }
  const auto knee_forces = boots(s.knee, muscle, c.insertions.at(muscle, Joint::knee), stack_sources(knee_cols));
  const auto hip_forces = boots(s.hip, muscle, c.insertions.at(muscle, Joint::hip), stack_sources(hip_cols));
  return sum_forces(muscle, knee_forces, hip_forces);
}

}  // namespace

std::vector<std::vector<double>> gastrocnemius_env(const GaitState& s, const BodyParams& body) {
  std::vector<double> ground(kCycleLength), foot_weight(kCycleLength);
  for (std::size_t t = 0; t < kCycleLength; ++t) {
    const double toe = s.ground_toe[t] * body.foot_length * s.sin_foot_vertical[t];
    const double heel = s.ground_heel[t] * body.heel_to_ankle * s.sin_foot_vertical[t];
    ground[t] = toe - heel;
    foot_weight[t] = -s.masses.feet * kGravity * body.ankle_to_foot_centre * s.sin_foot_vertical[t];
  }
  return {ground, foot_weight};
}

std::vector<std::vector<double>> gluteus_env(const GaitState& s, const BodyParams& body,
                                             const BiomechConfig& c, const ForceTrajectory& hamstrings,
                                             const ForceTrajectory& gastrocnemius) {
  if (hamstrings.forces.size() != kCycleLength || gastrocnemius.forces.size() != kCycleLength) {
    throw ShapeError("gluteus: dependency trajectories must cover the cycle");
  }
  const double limb_mass = s.masses.thigh + s.masses.leg + s.masses.feet;
  const double lever = body.thigh_length * std::sin(c.cross_joint_angle);
  std::vector<std::vector<double>> cols(4, std::vector<double>(kCycleLength));
  for (std::size_t t = 0; t < kCycleLength; ++t) {
    cols[0][t] = s.weight_hip[t] * (body.leg_length + body.thigh_length) * s.sin_thigh_vertical[t];
    cols[1][t] = limb_mass * kGravity * body.hip_to_full_leg_centre * s.sin_thigh_vertical[t];
    cols[2][t] = hamstrings.forces[t] * lever;
    cols[3][t] = -gastrocnemius.forces[t] * lever;
  }
  return cols;
}

ForceTrajectory gastrocnemius_force(const GaitState& s, const BodyParams& body, const BiomechConfig& c) {
  return boots(s.ankle, MuscleGroup::gastrocnemius, c.insertions.at(MuscleGroup::gastrocnemius, Joint::ankle),
               stack_sources(gastrocnemius_env(s, body)));
}

ForceTrajectory tibialis_anterior_force(const GaitState& s, const BodyParams& body, const BiomechConfig& c) {
  return boots(s.ankle, MuscleGroup::tibialis_anterior,
               c.insertions.at(MuscleGroup::tibialis_anterior, Joint::ankle),
               stack_sources(negated(gastrocnemius_env(s, body))));
}

ForceTrajectory quadriceps_force(const GaitState& s, const BodyParams& body, const BiomechConfig& c) {
  return two_joint_force(MuscleGroup::quadriceps, s, body, c, false);
}

ForceTrajectory hamstrings_force(const GaitState& s, const BodyParams& body, const BiomechConfig& c) {
  return two_joint_force(MuscleGroup::hamstrings, s, body, c, true);
}

ForceTrajectory gluteus_force(const GaitState& s, const BodyParams& body, const BiomechConfig& c,
                              const ForceTrajectory& hamstrings, const ForceTrajectory& gastrocnemius) {
  return boots(s.hip, MuscleGroup::gluteus, c.insertions.at(MuscleGroup::gluteus, Joint::hip),
               stack_sources(gluteus_env(s, body, c, hamstrings, gastrocnemius)));
}

ForceTrajectory iliopsoas_force(const GaitState& s, const BodyParams& body, const BiomechConfig& c,
                                const ForceTrajectory& hamstrings, const ForceTrajectory& gastrocnemius) {
  return boots(s.hip, MuscleGroup::iliopsoas, c.insertions.at(MuscleGroup::iliopsoas, Joint::hip),
               stack_sources(negated(gluteus_env(s, body, c, hamstrings, gastrocnemius))));
}

LowerBodyForces simulate_lower_body(const kinematics::LimbCycles& cycles, const BodyParams& body,
                                    const BiomechConfig& config) {
  const GaitState s = build_state(cycles, body, config);
  LowerBodyForces out;
  out[MuscleGroup::gastrocnemius] = gastrocnemius_force(s, body, config);
  out[MuscleGroup::tibialis_anterior] = tibialis_anterior_force(s, body, config);
  out[MuscleGroup::quadriceps] = quadriceps_force(s, body, config);
  out[MuscleGroup::hamstrings] = hamstrings_force(s, body, config);
  const auto& ham = out[MuscleGroup::hamstrings];
  const auto& gas = out[MuscleGroup::gastrocnemius];
  out[MuscleGroup::gluteus] = gluteus_force(s, body, config, ham, gas);
  out[MuscleGroup::iliopsoas] = iliopsoas_force(s, body, config, ham, gas);
  return out;
}

}  // namespace gaitlab::biomech
