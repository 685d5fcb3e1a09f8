#pragma once

// Independent reference evaluations used as test oracles. Written from the
// formulas directly, without sharing code with the library.

#include <algorithm>
#include <cmath>
#include <vector>

#include "gaitlab/signal.hpp"

namespace oracle {

inline double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// One Hampel pass with truncated edge windows.
inline std::vector<double> hampel_once(const std::vector<double>& x, std::size_t window, double k) {
  const std::size_t half = window / 2;
  std::vector<double> out = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const std::size_t lo = i < half ? 0 : i - half;
    const std::size_t hi = std::min(x.size() - 1, i + half);
    std::vector<double> w(x.begin() + lo, x.begin() + hi + 1);
    const double med = median(w);
    for (double& d : w) d = std::abs(d - med);
    if (std::abs(x[i] - med) > k * 1.4826 * median(w)) out[i] = med;
  }
  return out;
}

inline double twitch_winter(double f0, double T, double t) { return t <= 0 ? 0.0 : f0 * (t / T) * std::exp(-t / T); }
inline double twitch_single(double f0, double T, double t) { return t <= 0 ? 0.0 : f0 * (t / T) * std::pow(t, -t / T); }

/// Capture of a function of time (seconds) on the beta axis.
template <class F>
gaitlab::signal::RawCapture capture_of(F f, double duration_s, double rate, gaitlab::Joint joint = gaitlab::Joint::knee) {
  gaitlab::signal::RawCapture raw;
  raw.placement_joint = joint;
  raw.sample_rate = rate;
  const auto n = static_cast<std::size_t>(std::llround(duration_s * rate)) + 1;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / rate;
    raw.samples.push_back({t * 1000.0, 0.0, f(t), 0.0});
  }
  return raw;
}

}  // namespace oracle
