#pragma once

// JSON file formats. Every document carries "schema": "gaitlab/v1"; readers
// report the first offending field as a SchemaError path like
// "samples[3].t".

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>

#include <json.hpp>

#include "gaitlab/biomech.hpp"
#include "gaitlab/ensemble.hpp"
#include "gaitlab/muscle.hpp"
#include "gaitlab/signal.hpp"

namespace gaitlab::io {

using json = nlohmann::json;

inline constexpr std::string_view kSchema = "gaitlab/v1";

/// Typed access to one JSON node with its field path.
class Node {
 public:
  Node(const json& value, std::string path) : v_(value), path_(std::move(path)) {}

  const json& value() const { return v_; }
  const std::string& path() const { return path_; }

  void expect_object() const;
  /// Rejects keys outside `allowed`.
  void only_keys(std::initializer_list<std::string_view> allowed) const;
  bool has(std::string_view key) const;
  Node at(std::string_view key) const;  // required
  Node at(std::size_t index) const;
  std::size_t size() const;  // array length; throws unless array

  double number() const;
  double positive() const;
  std::size_t count() const;
  std::uint64_t u64() const;
  bool boolean() const;
  std::string string() const;
  std::vector<double> numbers() const;
  std::vector<double> numbers(std::size_t exact) const;

  [[noreturn]] void fail(const std::string& what) const;

 private:
  const json& v_;
  std::string path_;
};

/// Checks the top-level "schema" tag.
void check_schema(const Node& root);

json parse(std::string_view text);
json read_json(const std::filesystem::path& path);
std::string read_text(const std::filesystem::path& path);
/// Two-space indent, trailing newline.
std::string dump(const json& doc);
/// Writes through a temporary file and rename, so readers never see a partial file.
void write_atomic(const std::filesystem::path& path, std::string_view content);

Joint joint_from(const Node& n);
MuscleGroup muscle_from(const Node& n);

json to_json(const signal::RawCapture& raw);
signal::RawCapture raw_capture_from(const json& doc);

json to_json(const signal::GaitCycle& cycle);
signal::GaitCycle gait_cycle_from(const json& doc);

json to_json(const signal::PhaseLabels& labels);
signal::PhaseLabels phase_labels_from(const Node& n);

json to_json(const signal::GaitFeatures& f);
signal::GaitFeatures gait_features_from(const Node& n);

json to_json(const biomech::ForceTrajectory& f);
biomech::ForceTrajectory force_trajectory_from(const json& doc);

json to_json(const muscle::ApTrains& trains);
muscle::ApTrains ap_trains_from(const json& doc);

json to_json(const detect::ViewModel& model);
detect::ViewModel view_model_from(const json& doc);

json to_json(const detect::Dataset& data);
detect::Dataset dataset_from(const json& doc);

/// Histogram CSV with header "bin_start_pct,ap_count".
std::string histogram_csv(const std::vector<muscle::HistogramBin>& bins);

/// Shortest decimal form that parses back to the same double.
std::string format_number(double v);

}  // namespace gaitlab::io
