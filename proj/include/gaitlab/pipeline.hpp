#pragma once

// End-to-end stages behind the CLI. Each cmd_* validates every input before
// writing anything, then writes its outputs atomically.

#include <array>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gaitlab/config.hpp"
#include "gaitlab/ensemble.hpp"
#include "gaitlab/kinematics.hpp"
#include "gaitlab/muscle.hpp"
#include "gaitlab/synthetic.hpp"

namespace gaitlab::pipeline {

namespace fs = std::filesystem;

inline constexpr std::string_view kVersion = "1.0.0";

struct PreprocessResult {
  std::map<Joint, signal::GaitCycle> cycles;
  std::map<Joint, std::vector<signal::StepSegment>> segments;
  std::optional<signal::PhaseLabels> phases;          // needs all three placements
  std::map<Joint, signal::GaitFeatures> features;     // likewise
};

/// One capture per placement joint.
PreprocessResult preprocess(const std::vector<signal::RawCapture>& captures, const PipelineConfig& cfg);

/// The joint whose angle sets a muscle's length.
Joint primary_joint(MuscleGroup m);

muscle::MuscleAgentModel muscle_model(MuscleGroup m, const PipelineConfig& cfg);

/// Target newtons per biomechanical newton, per muscle. Explicit config values
/// win; otherwise the default synthetic gait on the configured body peaks at
/// reference_load of the pool maximum.
std::map<MuscleGroup, double> force_scales(const PipelineConfig& cfg);

struct Stimulation {
  std::map<MuscleGroup, biomech::ForceTrajectory> targets;  // scaled
  std::map<MuscleGroup, muscle::ApTrains> trains;
  std::map<MuscleGroup, std::vector<muscle::HistogramBin>> histograms;  // cfg.histogram_bins
};

/// Reconstructs AP trains for every muscle (concurrently) from biomechanical forces.
Stimulation stimulate(const biomech::LowerBodyForces& forces, const kinematics::LimbCycles& cycles,
                      const PipelineConfig& cfg, const std::map<MuscleGroup, double>& scales);

struct Simulation {
  double cycle_s = 0.0;
  biomech::LowerBodyForces forces;
  std::map<MuscleGroup, double> scales;
  Stimulation stimulation;
};

Simulation simulate(const kinematics::LimbCycles& cycles, double cycle_s, const PipelineConfig& cfg);

/// The three 20-value network inputs of one joint: its angle cycle, the summed
/// force of its muscle pair, and the pair's 20-bin AP histogram.
std::array<std::vector<double>, 3> joint_views(const signal::GaitCycle& cycle, const biomech::LowerBodyForces& forces,
                                               const std::map<MuscleGroup, muscle::ApTrains>& trains, double cycle_s);

/// Seeded synthetic population: each person walks one normal or pathological
/// gait; all three joints and views are emitted.
detect::Dataset synthesize_population(std::size_t persons, std::uint64_t seed, const PipelineConfig& cfg);

struct SynthOptions {
  bool pathological = false;
  synthetic::CaptureOptions capture;
};

// ---- commands ----

void cmd_preprocess(const std::vector<fs::path>& inputs, const fs::path& out, const PipelineConfig& cfg);
void cmd_simulate(const fs::path& in, const fs::path& out, const PipelineConfig& cfg);
/// `timestamp` lands in the report's generated_at field only.
void cmd_classify(const fs::path& in, const fs::path& models, const fs::path& out, const PipelineConfig& cfg,
                  const std::string& timestamp);
void cmd_train(const fs::path& dataset, const fs::path& out, const PipelineConfig& cfg);
void cmd_report(const fs::path& report, const fs::path& out);
/// Writes capture_<joint>.json for all three placements and config.json
/// carrying their onset offsets.
void cmd_synth(const fs::path& out, const PipelineConfig& cfg, const SynthOptions& opts);
void cmd_synth_dataset(const fs::path& out, std::size_t persons, const PipelineConfig& cfg);

}  // namespace gaitlab::pipeline
