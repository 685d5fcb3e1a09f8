#pragma once

// Voluntary-muscle model built from motor-unit agents. Forward direction:
// AP trains -> twitches -> wave summation -> tetanus cap -> length scaling
// -> plus passive elasticity. Inverse direction: a greedy scheduler that
// recruits units smallest-first until the forward model tracks a target.
//
// Times inside this module are milliseconds; forces are newtons.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "gaitlab/biomech.hpp"
#include "gaitlab/types.hpp"

namespace gaitlab::muscle {

struct MotorUnit {
  double f0 = 1.0;         // N
  double t_peak = 40.0;    // ms
  double max_force = 0.0;  // N
  std::size_t size_rank = 1;
};

/// Peak of twitch_single for F0 = 1 and the given T, and the time it occurs.
struct TwitchPeak {
  double time_ms = 0.0;
  double value = 0.0;
};
TwitchPeak unit_twitch_peak(double t_peak);

double twitch_winter(const MotorUnit& mu, double t_ms);
double twitch_single(const MotorUnit& mu, double t_ms);

/// Stimulation times of one motor unit, strictly increasing, ms.
using Train = std::vector<double>;

double wave_summation(const MotorUnit& mu, std::span<const double> train, double t_ms);
double mu_force(const MotorUnit& mu, std::span<const double> train, double t_ms);

enum class LengthCurve {
  continuous,  // descending limb 3.4 - 2l on (1.2, 1.7]
  literal,     // plateau on [1.0, 1.7], then 3.4 - 2l; discontinuous at 1.7
};

double length_force_ratio(double l, LengthCurve curve = LengthCurve::continuous);

struct MuscleAgentModel {
  MuscleGroup name = MuscleGroup::gastrocnemius;
  std::vector<MotorUnit> motor_units;  // ordered by size_rank
  double f_p0 = 1.0;
  double resting_length = 0.3;  // m
  LengthCurve curve = LengthCurve::continuous;

  void validate() const;
  double total_max_force() const;
};

struct PoolParams {
  std::size_t count = 50;
  double f0_smallest = 0.1;
  double f0_largest = 2.0;
  double t_peak = 40.0;
  double max_force_ratio = 10.0;  // of the unit's twitch peak
  double f_p0 = 1.0;
  double resting_length = 0.3;
};

/// F0 graded geometrically by size rank.
MuscleAgentModel make_muscle(MuscleGroup name, const PoolParams& params = {});

double active_force(const MuscleAgentModel& m, std::span<const Train> trains, double t_ms, double l);
double passive_force(const MuscleAgentModel& m, double l);
double muscle_force(const MuscleAgentModel& m, std::span<const Train> trains, double t_ms, double l);

/// Time of timestep k: the midpoint of its interval.
double sample_time_ms(std::size_t k, double dt_s);

biomech::ForceTrajectory forward_simulate(const MuscleAgentModel& m, std::span<const Train> trains,
                                          std::span<const double> lengths, double dt_s);

struct ApTrains {
  MuscleGroup muscle = MuscleGroup::gastrocnemius;
  std::vector<Train> trains;  // index i belongs to motor_units[i]

  std::size_t total_count() const;
};

struct SchedulerOptions {
  double band_fraction = 0.01;        // of the smaller of total max force and peak demand
  double refractory_ms = 2.0;
  double recruit_margin = 0.25;       // recruited capacity must exceed demand by this share
  double grid_ms = 1.0;
  std::size_t refinement_passes = 10;
};

/// Throws InfeasibleError when the demand exceeds the pool or the length
/// curve is zero while force is required.
ApTrains reconstruct_ap_trains(const MuscleAgentModel& m, const biomech::ForceTrajectory& target,
                               std::span<const double> lengths, const SchedulerOptions& opts = {});

struct HistogramBin {
  double bin_start_pct = 0.0;
  std::size_t ap_count = 0;
};

std::vector<HistogramBin> stimulation_histogram(std::span<const Train> trains, double cycle_ms,
                                                std::size_t bins = kCycleLength);

/// Relative muscle length over the cycle from the angle of the joint it spans:
/// l = 1 + gain * sign * theta, sign positive when the muscle lengthens with the angle.
struct LengthModel {
  double gain = 0.3;  // per radian

  std::vector<double> lengths(MuscleGroup muscle, std::span<const double> theta_rad) const;
};

/// +1 when the joint angle lengthens the muscle, -1 when it shortens it.
double lengthening_sign(MuscleGroup muscle);

}  // namespace gaitlab::muscle
