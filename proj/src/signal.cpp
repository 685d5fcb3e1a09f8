#include "gaitlab/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "gaitlab/error.hpp"

namespace gaitlab::signal {

namespace {

// Consistency constant making the MAD an estimator of sigma for Gaussian noise.
constexpr double kMadScale = 1.4826;

double median_of(std::vector<double>& v) {
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  double upper = v[mid];
  if (n % 2 == 1) return upper;
  double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

std::vector<double> hampel_pass(std::span<const double> x, std::size_t half, double threshold,
                                bool& changed) {
  const std::size_t n = x.size();
  std::vector<double> out(x.begin(), x.end());
  std::vector<double> window;
  std::vector<double> dev;
  changed = false;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t lo = i >= half ? i - half : 0;
    const std::size_t hi = std::min(n - 1, i + half);
    window.assign(x.begin() + static_cast<std::ptrdiff_t>(lo),
                  x.begin() + static_cast<std::ptrdiff_t>(hi + 1));
    const double med = median_of(window);
    dev.resize(hi - lo + 1);
    for (std::size_t j = lo; j <= hi; ++j) dev[j - lo] = std::abs(x[j] - med);
    const double mad = kMadScale * median_of(dev);
    if (std::abs(x[i] - med) > threshold * mad) {
      out[i] = med;
      changed = true;
    }
  }
  return out;
}

constexpr std::array<Axis, 3> kAxes{Axis::alpha, Axis::beta, Axis::gamma};

}  // namespace

double OrientationSample::axis(Axis a) const {
  switch (a) {
    case Axis::alpha:
      return alpha;
    case Axis::beta:
      return beta;
    case Axis::gamma:
      return gamma;
  }
  return beta;
}

double& OrientationSample::axis(Axis a) {
  switch (a) {
    case Axis::alpha:
      return alpha;
    case Axis::gamma:
      return gamma;
    case Axis::beta:
      break;
  }
  return beta;
}

void RawCapture::validate() const {
  if (!(sample_rate > 0.0) || !std::isfinite(sample_rate)) {
    throw SchemaError("sample_rate", "must be a positive number");
  }
  if (samples.size() < 2) throw SchemaError("samples", "at least 2 samples required");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    const std::string path = "samples[" + std::to_string(i) + "]";
    if (!std::isfinite(s.t_ms)) throw SchemaError(path + ".t", "must be finite");
    for (Axis a : kAxes) {
      if (!std::isfinite(s.axis(a))) throw SchemaError(path, "angles must be finite");
    }
    if (i > 0 && !(s.t_ms > samples[i - 1].t_ms)) {
      throw SchemaError(path + ".t", "timestamps must be strictly increasing");
    }
  }
}

std::vector<double> RawCapture::axis_values(Axis a) const {
  std::vector<double> v(samples.size());
  std::transform(samples.begin(), samples.end(), v.begin(),
                 [a](const OrientationSample& s) { return s.axis(a); });
  return v;
}

double RawCapture::duration_s() const {
  if (samples.size() < 2) return 0.0;
  return (samples.back().t_ms - samples.front().t_ms) / 1000.0;
}

void GaitCycle::validate() const {
  if (angles.size() != kCycleLength) {
    throw ShapeError("gait cycle must hold exactly " + std::to_string(kCycleLength) +
                     " angles, got " + std::to_string(angles.size()));
  }
  for (std::size_t i = 0; i < angles.size(); ++i) {
    if (!std::isfinite(angles[i])) {
      throw SchemaError("angles[" + std::to_string(i) + "]", "must be finite");
    }
  }
}

std::size_t PhaseLabels::stance_count() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Phase::stance));
}

std::size_t PhaseLabels::swing_count() const { return labels.size() - stance_count(); }

std::vector<double> hampel(std::span<const double> x, std::size_t window, double threshold,
                           std::size_t max_passes) {
  if (window < 3 || window % 2 == 0) throw ValidationError("hampel window must be odd and >= 3");
  if (x.size() < window) {
    throw SignalTooShortError("signal too short: " + std::to_string(x.size()) +
                              " samples, window needs " + std::to_string(window));
  }
  std::vector<double> cur(x.begin(), x.end());
  for (std::size_t pass = 0; pass < std::max<std::size_t>(1, max_passes); ++pass) {
    bool changed = false;
    cur = hampel_pass(cur, window / 2, threshold, changed);
    if (!changed) break;
  }
  return cur;
}

RawCapture denoise(const RawCapture& raw, const SignalOptions& opts) {
  raw.validate();
  RawCapture out = raw;
  for (Axis a : kAxes) {
    const auto filtered =
        hampel(raw.axis_values(a), opts.hampel_window, opts.hampel_threshold, opts.hampel_max_passes);
    for (std::size_t i = 0; i < filtered.size(); ++i) out.samples[i].axis(a) = filtered[i];
  }
  return out;
}

std::vector<StepSegment> segment_steps(const RawCapture& raw, const SignalOptions& opts) {
  raw.validate();
  const std::vector<double> x = raw.axis_values(opts.sagittal_axis);
  const std::size_t n = x.size();
  const auto [lo_it, hi_it] = std::minmax_element(x.begin(), x.end());
  const double range = *hi_it - *lo_it;
  if (!(range > 0.0)) throw NoStepsError("no steps detected: signal is flat");

  // Local maxima; plateaus report their first sample, so a plateau at the
  // start counts. The last sample counts when it exceeds its neighbour.
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < n; ++i) {
    bool peak;
    if (i == 0) {
      peak = x[0] >= x[1];
    } else if (i + 1 == n) {
      peak = x[i] > x[i - 1];
    } else {
      peak = x[i] > x[i - 1] && x[i] >= x[i + 1];
    }
    if (peak) candidates.push_back(i);
  }

  // Prominence: height above the higher of the two flanking minima, each
  // taken up to the nearest strictly higher sample.
  std::vector<std::size_t> prominent;
  for (std::size_t p : candidates) {
    double left_min = x[p];
    bool has_left = p > 0;
    for (std::size_t j = p; j-- > 0;) {
      if (x[j] > x[p]) break;
      left_min = std::min(left_min, x[j]);
    }
    double right_min = x[p];
    bool has_right = p + 1 < n;
    for (std::size_t j = p + 1; j < n; ++j) {
      if (x[j] > x[p]) break;
      right_min = std::min(right_min, x[j]);
    }
    double base;
    if (has_left && has_right) {
      base = std::max(left_min, right_min);
    } else {
      base = has_left ? left_min : right_min;
    }
    if (x[p] - base >= opts.min_peak_prominence * range) prominent.push_back(p);
  }

  // Minimum distance, tallest first.
  std::vector<std::size_t> order = prominent;
  std::stable_sort(order.begin(), order.end(),
                   [&x](std::size_t a, std::size_t b) { return x[a] > x[b]; });
  const double min_gap_ms = opts.min_peak_distance_s * 1000.0;
  std::vector<std::size_t> kept;
  for (std::size_t p : order) {
    const bool clear = std::none_of(kept.begin(), kept.end(), [&](std::size_t q) {
      return std::abs(raw.samples[p].t_ms - raw.samples[q].t_ms) < min_gap_ms;
    });
    if (clear) kept.push_back(p);
  }
  std::sort(kept.begin(), kept.end());
  if (kept.size() < 2) {
    throw NoStepsError("no steps detected: found " + std::to_string(kept.size()) +
                       " stance onset(s), need at least 2");
  }

  std::vector<StepSegment> segments;
  for (std::size_t i = 0; i + 1 < kept.size(); ++i) segments.push_back({kept[i], kept[i + 1]});

  // Strides bounded by a capture endpoint may be truncated; drop them when
  // their duration is off the median.
  auto duration = [&raw](const StepSegment& s) {
    return raw.samples[s.end].t_ms - raw.samples[s.begin].t_ms;
  };
  std::vector<double> durations;
  for (const auto& s : segments) durations.push_back(duration(s));
  const double med = median_of(durations);
  auto off_median = [&](const StepSegment& s) {
    return std::abs(duration(s) - med) > opts.boundary_tolerance * med;
  };
  if (!segments.empty() && segments.back().end == n - 1 && off_median(segments.back())) {
    segments.pop_back();
  }
  if (!segments.empty() && segments.front().begin == 0 && off_median(segments.front())) {
    segments.erase(segments.begin());
  }
  if (segments.empty()) throw NoStepsError("no steps detected: only truncated strides found");
  return segments;
}

std::vector<double> resample_segment(const RawCapture& raw, const StepSegment& seg, Axis axis) {
  if (seg.end >= raw.samples.size() || seg.begin >= seg.end) {
    throw ValidationError("segment [" + std::to_string(seg.begin) + ", " + std::to_string(seg.end) +
                          ") out of range");
  }
  if (seg.end - seg.begin < 4) {
    throw DegenerateSegmentError("degenerate segment: " + std::to_string(seg.end - seg.begin) +
                                 " samples, need at least 4");
  }
  const double t0 = raw.samples[seg.begin].t_ms;
  const double span_ms = raw.samples[seg.end].t_ms - t0;
  std::vector<double> out(kCycleLength);
  std::size_t j = seg.begin;
  for (std::size_t i = 0; i < kCycleLength; ++i) {
    const double tau = t0 + span_ms * static_cast<double>(i) / static_cast<double>(kCycleLength);
    while (j + 1 < seg.end && raw.samples[j + 1].t_ms <= tau) ++j;
    const auto& a = raw.samples[j];
    const auto& b = raw.samples[j + 1];
    const double w = (tau - a.t_ms) / (b.t_ms - a.t_ms);
    out[i] = w == 0.0 ? a.axis(axis) : a.axis(axis) + w * (b.axis(axis) - a.axis(axis));
  }
  return out;
}

std::vector<double> rotate_cycle(std::span<const double> cycle, double offset) {
  const std::size_t n = cycle.size();
  std::vector<double> out(n);
  if (n == 0) return out;
  double shift = offset * static_cast<double>(n);
  shift -= std::floor(shift / static_cast<double>(n)) * static_cast<double>(n);
  const double rounded = std::round(shift);
  if (std::abs(shift - rounded) < 1e-9) {
    const auto k = static_cast<std::size_t>(rounded) % n;
    for (std::size_t i = 0; i < n; ++i) out[i] = cycle[(i + k) % n];
    return out;
  }
  const auto k = static_cast<std::size_t>(std::floor(shift));
  const double w = shift - std::floor(shift);
  for (std::size_t i = 0; i < n; ++i) {
    const double a = cycle[(i + k) % n];
    const double b = cycle[(i + k + 1) % n];
    out[i] = a + w * (b - a);
  }
  return out;
}

GaitCycle summarize_cycle(std::span<const StepSegment> segments, const RawCapture& raw,
                          const SignalOptions& opts) {
  if (segments.empty()) throw NoStepsError("no steps to summarize");
  // Pointwise least squares over strides reduces to the per-point mean; the
  // sum is ordered by segment start so the result ignores input order.
  std::vector<StepSegment> ordered(segments.begin(), segments.end());
  std::sort(ordered.begin(), ordered.end(),
            [](const StepSegment& a, const StepSegment& b) {
              return a.begin != b.begin ? a.begin < b.begin : a.end < b.end;
            });
  std::vector<double> mean(kCycleLength, 0.0);
  for (const auto& seg : ordered) {
    const auto r = resample_segment(raw, seg, opts.sagittal_axis);
    for (std::size_t i = 0; i < kCycleLength; ++i) mean[i] += r[i];
  }
  for (double& v : mean) v /= static_cast<double>(ordered.size());

  GaitCycle cycle;
  cycle.joint = raw.placement_joint;
  cycle.angles = opts.onset_offset == 0.0 ? mean : rotate_cycle(mean, opts.onset_offset);
  return cycle;
}

GaitFeatures extract_features(const RawCapture& raw, std::span<const StepSegment> segments,
                              const PhaseLabels& labels, const SignalOptions& opts) {
  raw.validate();
  if (segments.empty()) throw NoStepsError("no steps detected");
  if (!labels.valid_gait()) {
    throw InvalidGaitError(labels.stance_count() == 0 ? "invalid gait: no stance phase detected"
                                                      : "invalid gait: no swing phase detected");
  }
  const auto x = raw.axis_values(opts.sagittal_axis);
  GaitFeatures f;
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  f.min_angle = *lo;
  f.max_angle = *hi;
  f.step_count = segments.size();
  double total_ms = 0.0;
  for (const auto& s : segments) {
    if (s.end >= raw.samples.size()) throw ValidationError("segment out of range");
    total_ms += raw.samples[s.end].t_ms - raw.samples[s.begin].t_ms;
  }
  f.time_per_step = total_ms / 1000.0 / static_cast<double>(segments.size());
  f.speed = static_cast<double>(f.step_count) / raw.duration_s();
  f.stance_swing_ratio =
      static_cast<double>(labels.stance_count()) / static_cast<double>(labels.swing_count());
  return f;
}

}  // namespace gaitlab::signal
