#pragma once

// Seeded fixtures shared by the unit tests and the acceptance runner.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "gaitlab/muscle.hpp"
#include "gaitlab/random.hpp"

namespace fixtures {

struct MuscleCase {
  std::vector<gaitlab::muscle::Train> known;  // trains the target was simulated from
  std::vector<double> lengths;
  gaitlab::biomech::ForceTrajectory target;
};

/// Achievable target: forward simulation of random trains on the first
/// 1..N motor units, over a 1.2 s cycle with a gently varying length.
inline MuscleCase achievable_target(std::mt19937_64& rng, const gaitlab::muscle::MuscleAgentModel& m,
                                    double dt_s = 0.06) {
  using gaitlab::rng::uniform;
  const std::size_t n_mu = m.motor_units.size();
  const double cycle_ms = dt_s * 1000.0 * gaitlab::kCycleLength;
  MuscleCase c;
  c.known.resize(n_mu);
  const auto active = 1 + gaitlab::rng::below(rng, n_mu);
  for (std::size_t i = 0; i < active; ++i) {
    const double rate = uniform(rng, 0.02, 0.5);  // APs per ms
    for (double t = uniform(rng, 0.0, 30.0); t < cycle_ms; t += uniform(rng, 0.5, 1.5) / rate) {
      c.known[i].push_back(std::round(t));
    }
    auto& tr = c.known[i];
    tr.erase(std::unique(tr.begin(), tr.end()), tr.end());
  }
  const double phase = uniform(rng, 0.0, 6.3);
  c.lengths.resize(gaitlab::kCycleLength);
  for (std::size_t k = 0; k < c.lengths.size(); ++k) c.lengths[k] = 1.0 + 0.15 * std::sin(0.3 * k + phase);
  c.target = gaitlab::muscle::forward_simulate(m, c.known, c.lengths, dt_s);
  return c;
}

/// RMS difference over the samples divided by the target peak.
inline double relative_rms(const std::vector<double>& got, const std::vector<double>& want) {
  double se = 0.0, peak = 0.0;
  for (std::size_t k = 0; k < want.size(); ++k) {
    se += (got[k] - want[k]) * (got[k] - want[k]);
    peak = std::max(peak, want[k]);
  }
  return peak > 0.0 ? std::sqrt(se / static_cast<double>(want.size())) / peak : std::sqrt(se);
}

/// Empty trains only after the last non-empty one, and first spikes in rank order.
inline bool size_principle_holds(const std::vector<gaitlab::muscle::Train>& trains) {
  bool seen_empty = false;
  double last_first = -1e300;
  for (const auto& t : trains) {
    if (t.empty()) {
      seen_empty = true;
      continue;
    }
    if (seen_empty) return false;
    if (t.front() < last_first) return false;
    last_first = t.front();
  }
  return true;
}

}  // namespace fixtures

#include "gaitlab/ensemble.hpp"

namespace fixtures {

/// Two well-separated Gaussian clusters, one per label. Each person carries
/// `per_person` samples for every requested joint and view; half the persons
/// are pathological.
inline gaitlab::detect::Dataset separable_dataset(std::size_t persons, std::size_t per_person, std::uint64_t seed,
                                                  std::vector<gaitlab::Joint> joints = {gaitlab::Joint::knee}) {
  using namespace gaitlab;
  std::mt19937_64 rng(seed);
  std::array<std::vector<double>, 2> centre;
  for (auto& c : centre) {
    c.resize(kCycleLength);
    for (double& v : c) v = rng::uniform(rng, -1.0, 1.0);
  }
  detect::Dataset d;
  for (std::size_t p = 0; p < persons; ++p) {
    const int label = static_cast<int>(p % 2);
    char id[16];
    std::snprintf(id, sizeof id, "s%03zu", p);
    for (Joint j : joints) {
      for (detect::View v : detect::kViews) {
        for (std::size_t k = 0; k < per_person; ++k) {
          detect::Sample s{id, j, v, std::vector<double>(kCycleLength),
                           label ? detect::Label::pathological : detect::Label::normal};
          for (std::size_t i = 0; i < kCycleLength; ++i) s.values[i] = centre[label][i] + 0.3 * rng::gaussian(rng);
          d.samples.push_back(std::move(s));
        }
      }
    }
  }
  return d;
}

}  // namespace fixtures
