#include "gaitlab/muscle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gaitlab/error.hpp"
#include "gaitlab/kernels.hpp"

namespace gaitlab::muscle {

TwitchPeak unit_twitch_peak(double t_peak) {
  if (!(t_peak > 0.0)) throw DomainError("twitch: T must be positive");
  // d/dt ln F = 1/t - (ln t + 1)/T vanishes where t (ln t + 1) = T.
  double lo = std::exp(-2.0);
  double hi = std::max(t_peak, 1.0);
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid * (std::log(mid) + 1.0) < t_peak) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  const double t = 0.5 * (lo + hi);
  return {t, twitch_single(MotorUnit{1.0, t_peak, 0.0, 1}, t)};
}

double twitch_winter(const MotorUnit& mu, double t_ms) {
  if (t_ms <= 0.0) return 0.0;
  const double x = t_ms / mu.t_peak;
  return mu.f0 * x * std::exp(-x);
}

double twitch_single(const MotorUnit& mu, double t_ms) {
  if (t_ms <= 0.0) return 0.0;
  const double x = t_ms / mu.t_peak;
  return mu.f0 * x * std::exp(-x * std::log(t_ms));
}

double wave_summation(const MotorUnit& mu, std::span<const double> train, double t_ms) {
  double sum = 0.0;
  for (double tj : train) {
    if (tj > t_ms) break;
    sum += twitch_single(mu, t_ms - tj);
  }
  return sum;
}

double mu_force(const MotorUnit& mu, std::span<const double> train, double t_ms) {
  return std::min(wave_summation(mu, train, t_ms), mu.max_force);
}

double length_force_ratio(double l, LengthCurve curve) {
  if (!(l > 0.0)) throw DomainError("length must be positive, got " + std::to_string(l));
  if (l < 0.6) return 0.0;
  if (l <= 0.8) return 4.0 * l - 2.4;
  if (l <= 1.0) return l;
  if (curve == LengthCurve::literal) {
    if (l <= 1.7) return 1.0;
    return 0.0;
  }
  if (l <= 1.2) return 1.0;
  if (l <= 1.7) return 3.4 - 2.0 * l;
  return 0.0;
}

void MuscleAgentModel::validate() const {
  if (motor_units.empty()) throw ValidationError("muscle " + std::string(to_string(name)) + " has no motor units");
  if (!(f_p0 >= 0.0)) throw ValidationError("muscle: f_p0 must be >= 0");
  if (!(resting_length > 0.0)) throw ValidationError("muscle: resting_length must be positive");
  for (std::size_t i = 0; i < motor_units.size(); ++i) {
    const auto& mu = motor_units[i];
    const std::string where = "motor unit " + std::to_string(mu.size_rank);
    if (!(mu.f0 > 0.0) || !(mu.t_peak > 0.0)) throw ValidationError(where + ": f0 and t_peak must be positive");
    if (mu.max_force < mu.f0 * unit_twitch_peak(mu.t_peak).value * (1.0 - 1e-12)) {
      throw ValidationError(where + ": max_force below its single-twitch peak");
    }
    if (i > 0 && mu.size_rank <= motor_units[i - 1].size_rank) {
      throw ValidationError(where + ": size ranks must be unique and increasing");
    }
  }
}

double MuscleAgentModel::total_max_force() const {
  double s = 0.0;
  for (const auto& mu : motor_units) s += mu.max_force;
  return s;
}

MuscleAgentModel make_muscle(MuscleGroup name, const PoolParams& p) {
  if (p.count == 0) throw ValidationError("muscle: motor unit count must be positive");
  if (!(p.f0_smallest > 0.0) || !(p.f0_largest >= p.f0_smallest)) {
    throw ValidationError("muscle: need 0 < f0_smallest <= f0_largest");
  }
  if (!(p.max_force_ratio >= 1.0)) throw ValidationError("muscle: max_force_ratio must be >= 1");
  MuscleAgentModel m;
  m.name = name;
  m.f_p0 = p.f_p0;
  m.resting_length = p.resting_length;
  const double peak = unit_twitch_peak(p.t_peak).value;
  const double ratio = p.f0_largest / p.f0_smallest;
  for (std::size_t i = 0; i < p.count; ++i) {
    const double u = p.count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(p.count - 1);
    MotorUnit mu;
    mu.f0 = p.f0_smallest * std::pow(ratio, u);
    mu.t_peak = p.t_peak;
    mu.max_force = p.max_force_ratio * mu.f0 * peak;
    mu.size_rank = i + 1;
    m.motor_units.push_back(mu);
  }
  m.validate();
  return m;
}

double active_force(const MuscleAgentModel& m, std::span<const Train> trains, double t_ms, double l) {
  if (trains.size() != m.motor_units.size()) {
    throw ShapeError("expected " + std::to_string(m.motor_units.size()) + " trains, got " +
                     std::to_string(trains.size()));
  }
  const double r = length_force_ratio(l, m.curve);
  double sum = 0.0;
  for (std::size_t i = 0; i < trains.size(); ++i) sum += mu_force(m.motor_units[i], trains[i], t_ms);
  return r * sum;
}

double passive_force(const MuscleAgentModel& m, double l) {
  if (!(l > 0.0)) throw DomainError("length must be positive, got " + std::to_string(l));
  return std::max(m.f_p0 * std::exp(l - 1.0) - 1.0, 0.0);
}

double muscle_force(const MuscleAgentModel& m, std::span<const Train> trains, double t_ms, double l) {
  return active_force(m, trains, t_ms, l) + passive_force(m, l);
}

double sample_time_ms(std::size_t k, double dt_s) { return (static_cast<double>(k) + 0.5) * dt_s * 1000.0; }

biomech::ForceTrajectory forward_simulate(const MuscleAgentModel& m, std::span<const Train> trains,
                                          std::span<const double> lengths, double dt_s) {
  if (!(dt_s > 0.0)) throw ValidationError("forward_simulate: dt must be positive");
  biomech::ForceTrajectory out{m.name, dt_s, std::vector<double>(lengths.size())};
  for (std::size_t k = 0; k < lengths.size(); ++k) {
    out.forces[k] = muscle_force(m, trains, sample_time_ms(k, dt_s), lengths[k]);
  }
  return out;
}

std::size_t ApTrains::total_count() const {
  std::size_t n = 0;
  for (const auto& t : trains) n += t.size();
  return n;
}

namespace {

// Linear interpolation of per-timestep values at midpoint sample times, held
// constant outside the first and last sample.
double interpolate(std::span<const double> v, double t_ms, double dt_ms) {
  const double pos = t_ms / dt_ms - 0.5;
  if (pos <= 0.0) return v.front();
  const auto last = static_cast<double>(v.size() - 1);
  if (pos >= last) return v.back();
  const auto i = static_cast<std::size_t>(pos);
  const double w = pos - static_cast<double>(i);
  return v[i] + w * (v[i + 1] - v[i]);
}

}  // namespace

ApTrains reconstruct_ap_trains(const MuscleAgentModel& m, const biomech::ForceTrajectory& target,
                               std::span<const double> lengths, const SchedulerOptions& opts) {
  m.validate();
  target.validate();
  if (target.forces.empty()) throw ShapeError("reconstruct: empty target");
  if (lengths.size() != target.forces.size()) {
    throw ShapeError("reconstruct: " + std::to_string(lengths.size()) + " lengths for " +
                     std::to_string(target.forces.size()) + " timesteps");
  }
  if (!(opts.grid_ms > 0.0) || !(opts.refractory_ms >= 0.0)) {
    throw ValidationError("reconstruct: grid must be positive and refractory non-negative");
  }

  const std::size_t n_mu = m.motor_units.size();
  const double capacity = m.total_max_force();
  const std::string who = std::string(to_string(m.name));

  std::vector<double> required(target.forces.size());
  for (std::size_t k = 0; k < required.size(); ++k) {
    const double l = lengths[k];
    const double need = std::max(target.forces[k] - passive_force(m, l), 0.0);
    if (need <= 0.0) continue;
    const double r = length_force_ratio(l, m.curve);
    if (r <= 0.0) {
      throw InfeasibleError(who + ": force required at timestep " + std::to_string(k) +
                            " but the muscle length gives no active tension");
    }
    required[k] = need / r;
    if (required[k] > capacity) {
      throw InfeasibleError(who + ": timestep " + std::to_string(k) + " needs " + std::to_string(required[k]) +
                            " N of active force, pool maximum is " + std::to_string(capacity) + " N");
    }
  }

  const double dt_ms = target.dt * 1000.0;
  const double cycle_ms = dt_ms * static_cast<double>(target.forces.size());
  const auto grid = static_cast<std::size_t>(std::floor(cycle_ms / opts.grid_ms)) + 1;

  std::vector<double> demand(grid);
  for (std::size_t g = 0; g < grid; ++g) {
    const double t = static_cast<double>(g) * opts.grid_ms;
    const double l = interpolate(lengths, t, dt_ms);
    const double need = std::max(interpolate(target.forces, t, dt_ms) - passive_force(m, l), 0.0);
    const double r = length_force_ratio(l, m.curve);
    demand[g] = need > 0.0 && r > 0.0 ? std::min(need / r, capacity) : 0.0;
  }

  std::vector<std::vector<double>> kernel(n_mu);
  std::vector<double> cap(n_mu);
  double lead_ms = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n_mu; ++i) {
    const auto& mu = m.motor_units[i];
    const TwitchPeak pk = unit_twitch_peak(mu.t_peak);
    lead_ms = std::min(lead_ms, pk.time_ms);
    cap[i] = mu.max_force;
    for (std::size_t j = 0; j < grid; ++j) {
      const double t = static_cast<double>(j) * opts.grid_ms;
      const double v = twitch_single(mu, t);
      if (t > pk.time_ms && v < 1e-12 * mu.f0 * pk.value) break;
      kernel[i].push_back(v);
    }
  }
  const auto lead = static_cast<std::size_t>(std::lround(lead_ms / opts.grid_ms));

  double peak_demand = 0.0;
  for (double d : demand) peak_demand = std::max(peak_demand, d);
  const double band = opts.band_fraction * std::min(capacity, peak_demand);

  std::vector<double> column(n_mu, 0.0);
  std::vector<std::vector<double>> predicted(n_mu, std::vector<double>(grid, 0.0));

  // One greedy sweep. Recruitment follows the true demand; firing follows `aim`.
  auto sweep = [&](const std::vector<double>& aim) {
    for (auto& p : predicted) std::fill(p.begin(), p.end(), 0.0);
    std::vector<double> last_fire(n_mu, -std::numeric_limits<double>::infinity());
    std::vector<Train> trains(n_mu);
    double recruited_capacity = 0.0;
    std::size_t recruited = 0;
    for (std::size_t s = 0; s < grid; ++s) {
      const std::size_t tau = std::min(s + lead, grid - 1);
      const double a = aim[tau];
      if (a <= 0.0) continue;
      while (recruited < n_mu && recruited_capacity < demand[tau] * (1.0 + opts.recruit_margin)) {
        recruited_capacity += cap[recruited];
        ++recruited;
      }
      const double now = static_cast<double>(s) * opts.grid_ms;
      for (;;) {
        for (std::size_t i = 0; i < n_mu; ++i) column[i] = predicted[i][tau];
        if (kernels::sum_clamped(column, cap) >= a - band) break;

        std::size_t pick = n_mu;
        bool all_saturated = true;
        for (std::size_t i = 0; i < recruited; ++i) {
          const bool saturated = column[i] >= cap[i];
          all_saturated = all_saturated && saturated;
          if (!saturated && now - last_fire[i] >= opts.refractory_ms) {
            pick = i;
            break;
          }
        }
        if (pick == n_mu) {
          if (all_saturated && recruited < n_mu) {
            recruited_capacity += cap[recruited];
            ++recruited;
            continue;
          }
          break;
        }
        const std::size_t len = std::min(kernel[pick].size(), grid - s);
        kernels::axpy(1.0, std::span<const double>(kernel[pick].data(), len),
                      std::span<double>(predicted[pick].data() + s, len));
        last_fire[pick] = now;
        trains[pick].push_back(now);
      }
    }
    return trains;
  };

  auto achieved = [&] {
    std::vector<double> a(grid);
    for (std::size_t g = 0; g < grid; ++g) {
      for (std::size_t i = 0; i < n_mu; ++i) column[i] = predicted[i][g];
      a[g] = kernels::sum_clamped(column, cap);
    }
    return a;
  };

  // Error in total force at the sample instants, on the grid.
  std::vector<std::size_t> sample_grid(target.forces.size());
  std::vector<double> sample_ratio(target.forces.size());
  for (std::size_t k = 0; k < sample_grid.size(); ++k) {
    const double t = sample_time_ms(k, target.dt);
    sample_grid[k] = std::min(static_cast<std::size_t>(std::lround(t / opts.grid_ms)), grid - 1);
    sample_ratio[k] = length_force_ratio(lengths[k], m.curve);
  }
  auto sample_error = [&](const std::vector<double>& a) {
    double se = 0.0;
    for (std::size_t k = 0; k < sample_grid.size(); ++k) {
      const double e = sample_ratio[k] * (a[sample_grid[k]] - demand[sample_grid[k]]);
      se += e * e;
    }
    return se;
  };

  // Later APs keep adding to a point the sweep already settled, so a single
  // sweep overshoots. Each refinement pass shifts the aim by the tracking
  // error of the previous pass; the pass closest to the target wins.
  std::vector<double> aim = demand;
  ApTrains out;
  out.muscle = m.name;
  out.trains = sweep(aim);
  std::vector<double> got = achieved();
  double best = sample_error(got);
  for (std::size_t pass = 0; pass < opts.refinement_passes && best > 0.0; ++pass) {
    for (std::size_t g = 0; g < grid; ++g) {
      if (demand[g] > 0.0) aim[g] = std::clamp(aim[g] + demand[g] - got[g], 0.0, capacity);
    }
    auto trains = sweep(aim);
    got = achieved();
    const double e = sample_error(got);
    if (e < best) {
      best = e;
      out.trains = std::move(trains);
    }
  }
  return out;
}

std::vector<HistogramBin> stimulation_histogram(std::span<const Train> trains, double cycle_ms, std::size_t bins) {
  if (bins == 0) throw ValidationError("histogram: bin count must be positive");
  if (!(cycle_ms > 0.0)) throw ValidationError("histogram: cycle duration must be positive");
  std::vector<HistogramBin> h(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    h[b].bin_start_pct = 100.0 * static_cast<double>(b) / static_cast<double>(bins);
  }
  for (const auto& train : trains) {
    for (double t : train) {
      if (t < 0.0 || t > cycle_ms) continue;
      auto b = static_cast<std::size_t>(std::floor(t / cycle_ms * static_cast<double>(bins)));
      h[std::min(b, bins - 1)].ap_count += 1;
    }
  }
  return h;
}

double lengthening_sign(MuscleGroup muscle) {
  switch (muscle) {
    case MuscleGroup::gastrocnemius:
    case MuscleGroup::quadriceps:
    case MuscleGroup::gluteus:
      return 1.0;
    case MuscleGroup::tibialis_anterior:
    case MuscleGroup::hamstrings:
    case MuscleGroup::iliopsoas:
      return -1.0;
  }
  return 1.0;
}

std::vector<double> LengthModel::lengths(MuscleGroup muscle, std::span<const double> theta_rad) const {
  const double sign = lengthening_sign(muscle);
  std::vector<double> l(theta_rad.size());
  for (std::size_t i = 0; i < l.size(); ++i) {
    l[i] = 1.0 + gain * sign * theta_rad[i];
    if (!(l[i] > 0.0)) throw DomainError("length model produced a non-positive length");
  }
  return l;
}

}  // namespace gaitlab::muscle
