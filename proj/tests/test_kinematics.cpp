#include <cmath>
#include <random>

#include <doctest.h>

#include "gaitlab/error.hpp"
#include "gaitlab/kinematics.hpp"
#include "gaitlab/synthetic.hpp"

using namespace gaitlab;
using namespace gaitlab::kinematics;

namespace {

LimbCycles constant_cycles(double hip, double knee, double ankle) {
  return {{Joint::hip, std::vector<double>(kCycleLength, hip)},
          {Joint::knee, std::vector<double>(kCycleLength, knee)},
          {Joint::ankle, std::vector<double>(kCycleLength, ankle)}};
}

}  // namespace

TEST_CASE("upright pose stacks the segments under the hip") {
  const BodyParams b;
  const auto p = limb_pose(0, 0, 0, b);
  CHECK(p.knee.x == 0.0);
  CHECK(p.knee.y == doctest::Approx(-0.45));
  CHECK(p.ankle.y == doctest::Approx(-0.85));
  CHECK(p.toe.x == doctest::Approx(0.25));
  CHECK(p.heel.x == doctest::Approx(-0.06));
  CHECK(p.toe.y == p.heel.y);
  CHECK(p.foot_height() == doctest::Approx(-0.85));
}

TEST_CASE("joint angle signs follow the flexion conventions") {
  const BodyParams b;
  CHECK(limb_pose(30, 0, 0, b).knee.x > 0.0);             // hip flexion swings the thigh forward
  CHECK(limb_pose(0, 40, 0, b).ankle.x < 0.0);            // knee flexion folds the shank back
  const auto dorsi = limb_pose(0, 0, 10, b);
  CHECK(dorsi.toe.y > dorsi.heel.y);                      // dorsiflexion lifts the toe
  const auto p = limb_pose(20, 35, -5, b);
  CHECK(p.shank_from_vertical == doctest::Approx(deg_to_rad(-15)));
  CHECK(p.foot_from_horizontal == doctest::Approx(deg_to_rad(-20)));
  const double thigh = std::hypot(p.knee.x - p.hip.x, p.knee.y - p.hip.y);
  const double shank = std::hypot(p.ankle.x - p.knee.x, p.ankle.y - p.knee.y);
  const double foot = std::hypot(p.toe.x - p.heel.x, p.toe.y - p.heel.y);
  CHECK(thigh == doctest::Approx(b.thigh_length).epsilon(1e-12));
  CHECK(shank == doctest::Approx(b.leg_length).epsilon(1e-12));
  CHECK(foot == doctest::Approx(b.foot_length + b.heel_to_ankle).epsilon(1e-12));
}

TEST_CASE("foot flat on the ground the whole cycle is all stance") {
  const auto labels = classify_phases(constant_cycles(0, 0, 0), BodyParams{});
  CHECK(labels.stance_count() == kCycleLength);
}

TEST_CASE("foot held above the ground is all swing") {
  ContactOptions opts;
  opts.ground_height = -0.95;  // 10 cm below the standing foot
  const auto labels = classify_phases(constant_cycles(0, 0, 0), BodyParams{}, opts);
  CHECK(labels.swing_count() == kCycleLength);
  CHECK_FALSE(labels.valid_gait());
}

TEST_CASE("classify_phases rejects inconsistent cycles") {
  auto c = constant_cycles(0, 0, 0);
  c.knee.angles.pop_back();
  CHECK_THROWS_AS(classify_phases(c, BodyParams{}), ShapeError);
  c = constant_cycles(0, 0, 0);
  c.hip.joint = Joint::ankle;
  CHECK_THROWS_AS(classify_phases(c, BodyParams{}), ShapeError);
}

TEST_CASE("default synthetic gait has a 60/40 split recovered exactly") {
  const auto g = synthetic::synthesize_gait({}, BodyParams{});
  CHECK(g.labels.stance_count() == 12);
  const auto labels = classify_phases(g.cycles, BodyParams{});
  CHECK(labels.labels == g.labels.labels);
}

TEST_CASE("synthetic gaits keep stance on the ground and swing clear of it") {
  std::mt19937_64 rng(17);
  int built = 0;
  for (int trial = 0; trial < 200 && built < 100; ++trial) {
    const auto body = synthetic::random_body(rng);
    const auto shape = trial % 2 ? synthetic::pathological_shape(rng) : synthetic::random_shape(rng);
    synthetic::SyntheticGait g;
    try {
      g = synthetic::synthesize_gait(shape, body);
    } catch (const ValidationError&) {
      continue;
    }
    ++built;
    const auto poses = cycle_poses(g.cycles, body);
    double ground = poses[0].foot_height();
    for (const auto& p : poses) ground = std::min(ground, p.foot_height());
    for (std::size_t i = 0; i < kCycleLength; ++i) {
      const double h = poses[i].foot_height() - ground;
      if (g.labels.labels[i] == signal::Phase::stance) {
        CHECK(h == doctest::Approx(0.0).epsilon(1e-12));
      } else {
        CHECK(h >= 2 * 0.02 * body.leg_length);
      }
    }
    CHECK(classify_phases(g.cycles, body).labels == g.labels.labels);
    // Contact rolls from heel to toe at most once during stance.
    int switches = 0;
    bool was_heel = poses[0].heel.y < poses[0].toe.y;
    for (std::size_t i = 1; i < kCycleLength && g.labels.labels[i] == signal::Phase::stance; ++i) {
      const bool heel = poses[i].heel.y < poses[i].toe.y;
      if (heel != was_heel) {
        ++switches;
        CHECK_FALSE(heel);
      }
      was_heel = heel;
    }
    CHECK(switches <= 1);
  }
  CHECK(built >= 100);
}

TEST_CASE("synthetic generator reports infeasible shapes") {
  synthetic::GaitShape s;
  s.swing_knee_deg = 2.0;  // the foot cannot clear the ground
  CHECK_THROWS_AS(synthetic::synthesize_gait(s, BodyParams{}), ValidationError);
}

TEST_CASE("centre of mass sinusoid") {
  const BodyParams b;
  CentreOfMassModel m;
  CHECK(m.offset(0.0, b) == 0.0);
  CHECK(m.offset(0.25, b) == doctest::Approx(0.02 * 0.45).epsilon(1e-12));
  m.amplitude_fraction = 0.0;
  CHECK(m.offset(0.25, b) == 0.0);
}
