#pragma once

// Pipeline configuration. JSON; every section and key is optional, unknown
// keys are rejected with their field path.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>

#include "gaitlab/biomech.hpp"
#include "gaitlab/ensemble.hpp"
#include "gaitlab/io.hpp"
#include "gaitlab/muscle.hpp"
#include "gaitlab/signal.hpp"

namespace gaitlab {

struct MuscleSettings {
  muscle::PoolParams pool;
  /// Newtons of target per newton of biomechanical force. Unset: derived so
  /// the reference gait peaks at `reference_load` of the pool maximum.
  std::optional<double> force_scale;
};

struct PipelineConfig {
  std::uint64_t seed = 1;
  BodyParams body;
  signal::SignalOptions signal;
  std::map<Joint, double> onset_offset;  // per placement; overrides signal.onset_offset
  biomech::BiomechConfig biomech;
  std::map<MuscleGroup, MuscleSettings> muscles;  // one entry per group after loading
  muscle::LengthCurve length_curve = muscle::LengthCurve::continuous;
  muscle::LengthModel length_model;
  muscle::SchedulerOptions scheduler;
  double reference_load = 0.3;
  std::size_t histogram_bins = kCycleLength;
  std::size_t cv_folds = 5;
  detect::TrainParams train;

  PipelineConfig();
  signal::SignalOptions signal_for(Joint placement) const;
};

PipelineConfig config_from_json(const io::json& doc);
PipelineConfig load_config(const std::filesystem::path& path);
/// Full configuration with every default filled in; hashed into reports.
io::json to_json(const PipelineConfig& cfg);

}  // namespace gaitlab
