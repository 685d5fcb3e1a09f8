#pragma once

// Three networks per joint, one per view of the motion (joint angles, muscle
// forces, neural stimulation), averaged into a normal/pathological verdict.
// Evaluation uses person-based cross-validation.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gaitlab/mlp.hpp"
#include "gaitlab/types.hpp"

namespace gaitlab::detect {

enum class View { angles, forces, stimuli };
inline constexpr std::array<View, 3> kViews{View::angles, View::forces, View::stimuli};

std::string_view to_string(View v);
std::optional<View> parse_view(std::string_view name);

enum class Label { normal, pathological };
std::string_view to_string(Label l);
std::optional<Label> parse_label(std::string_view name);

struct Sample {
  std::string person_id;
  Joint joint = Joint::ankle;
  View view = View::angles;
  std::vector<double> values;
  Label label = Label::normal;
};

struct Dataset {
  std::vector<Sample> samples;

  /// Every vector has kCycleLength finite values and a non-empty person id.
  void validate() const;
  std::vector<std::string> persons() const;  // sorted, unique
};

/// Per-feature z-score. Zero spread maps the feature to 0.
struct Normalizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Normalizer fit(std::span<const std::vector<double>> xs);
  std::vector<double> apply(std::span<const double> x) const;
};

struct ViewModel {
  Joint joint = Joint::ankle;
  View view = View::angles;
  Normalizer normalizer;
  Mlp net;

  double predict(std::span<const double> values) const;
};

struct JointModels {
  Joint joint = Joint::ankle;
  std::array<ViewModel, 3> views;  // indexed by View
};

enum class Verdict { normal, pathological, inconclusive };
std::string_view to_string(Verdict v);

struct EnsembleVerdict {
  Joint joint = Joint::ankle;
  double p_pathological = 0.5;
  std::array<double, 3> per_view{0.5, 0.5, 0.5};

  Verdict verdict() const;
};

EnsembleVerdict combine_views(Joint joint, const std::array<double, 3>& per_view);

EnsembleVerdict ensemble_classify(const JointModels& models, std::span<const double> angles,
                                  std::span<const double> forces, std::span<const double> stimuli);

struct FitOptions {
  TrainParams train;
  std::uint64_t init_seed = 1;
  std::vector<std::size_t> widths{kProductionWidths.begin(), kProductionWidths.end()};
};

/// Trains one view network on the given samples (all of one joint and view).
ViewModel fit_view(Joint joint, View view, std::span<const Sample* const> samples, const FitOptions& opts);

/// Folds of person ids: a seeded shuffle dealt round-robin.
std::vector<std::vector<std::string>> partition_persons(std::vector<std::string> persons, std::size_t folds,
                                                        std::uint64_t seed);

/// Throws ValidationError if any person appears on both sides.
void check_no_leakage(std::span<const std::string> train_persons, std::span<const std::string> test_persons);

struct CvOptions {
  std::size_t folds = 5;
  std::uint64_t seed = 1;
  FitOptions fit;
};

struct CvRow {
  Joint joint = Joint::ankle;
  std::array<double, 3> experiment_accuracy{};  // percent, angles / forces / stimuli
  double average = 0.0;                         // mean of the three experiments
  double ensemble = 0.0;                        // accuracy of the averaged verdict
  std::size_t persons = 0;
};

struct CvReport {
  std::vector<CvRow> rows;
  double overall = 0.0;  // mean of the joint averages
};

/// Joints missing from the dataset are skipped. Throws ValidationError when a
/// joint has fewer persons than folds.
CvReport person_cross_validate(const Dataset& data, const CvOptions& opts);

}  // namespace gaitlab::detect
