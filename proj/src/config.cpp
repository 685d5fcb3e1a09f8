#include "gaitlab/config.hpp"

#include <cmath>

#include "gaitlab/error.hpp"

namespace gaitlab {

using io::json;
using io::Node;

PipelineConfig::PipelineConfig() {
  for (MuscleGroup m : kMuscleGroups) muscles[m] = MuscleSettings{};
}

signal::SignalOptions PipelineConfig::signal_for(Joint placement) const {
  signal::SignalOptions o = signal;
  if (auto it = onset_offset.find(placement); it != onset_offset.end()) o.onset_offset = it->second;
  return o;
}

namespace {

signal::Axis axis_from(const Node& n) {
  const std::string s = n.string();
  if (s == "alpha") return signal::Axis::alpha;
  if (s == "beta") return signal::Axis::beta;
  if (s == "gamma") return signal::Axis::gamma;
  n.fail("expected alpha, beta or gamma");
}

std::string_view axis_name(signal::Axis a) {
  switch (a) {
    case signal::Axis::alpha:
      return "alpha";
    case signal::Axis::beta:
      return "beta";
    case signal::Axis::gamma:
      return "gamma";
  }
  return "beta";
}

template <typename F>
void optional_field(const Node& n, std::string_view key, F&& apply) {
  if (n.has(key)) apply(n.at(key));
}

void read_pool(const Node& n, MuscleSettings& s, bool allow_scale) {
  if (allow_scale) {
    n.only_keys({"count", "f0_smallest", "f0_largest", "t_peak", "max_force_ratio", "f_p0", "resting_length",
                 "force_scale"});
  } else {
    n.only_keys({"count", "f0_smallest", "f0_largest", "t_peak", "max_force_ratio", "f_p0", "resting_length"});
  }
  auto& p = s.pool;
  optional_field(n, "count", [&](const Node& v) {
    p.count = v.count();
    if (p.count == 0) v.fail("must be at least 1");
  });
  optional_field(n, "f0_smallest", [&](const Node& v) { p.f0_smallest = v.positive(); });
  optional_field(n, "f0_largest", [&](const Node& v) { p.f0_largest = v.positive(); });
  optional_field(n, "t_peak", [&](const Node& v) { p.t_peak = v.positive(); });
  optional_field(n, "max_force_ratio", [&](const Node& v) {
    p.max_force_ratio = v.number();
    if (p.max_force_ratio < 1.0) v.fail("must be >= 1");
  });
  optional_field(n, "f_p0", [&](const Node& v) {
    p.f_p0 = v.number();
    if (p.f_p0 < 0.0) v.fail("must be >= 0");
  });
  optional_field(n, "resting_length", [&](const Node& v) { p.resting_length = v.positive(); });
  optional_field(n, "force_scale", [&](const Node& v) { s.force_scale = v.positive(); });
  if (p.f0_largest < p.f0_smallest) n.at("f0_largest").fail("must be >= f0_smallest");
}

json pool_json(const MuscleSettings& s) {
  const auto& p = s.pool;
  json j = {{"count", p.count},         {"f0_smallest", p.f0_smallest}, {"f0_largest", p.f0_largest},
            {"t_peak", p.t_peak},       {"max_force_ratio", p.max_force_ratio},
            {"f_p0", p.f_p0},           {"resting_length", p.resting_length}};
  if (s.force_scale) j["force_scale"] = *s.force_scale;
  return j;
}

}  // namespace

PipelineConfig config_from_json(const json& doc) {
  const Node root(doc, "");
  io::check_schema(root);
  root.only_keys({"schema", "seed", "body", "anthropometry", "signal", "contact", "centre_of_mass", "insertions",
                  "cross_joint_angle_deg", "cycle_duration_s", "muscles", "length_curve", "length_gain",
                  "scheduler", "reference_load", "histogram_bins", "cv_folds", "train"});
  PipelineConfig cfg;
  optional_field(root, "seed", [&](const Node& v) { cfg.seed = v.u64(); });

  optional_field(root, "body", [&](const Node& n) {
    n.only_keys({"body_mass", "foot_length", "leg_length", "thigh_length", "heel_to_ankle", "ankle_to_foot_centre",
                 "knee_to_leg_centre", "hip_to_full_leg_centre"});
    auto& b = cfg.body;
    optional_field(n, "body_mass", [&](const Node& v) { b.body_mass = v.positive(); });
    optional_field(n, "foot_length", [&](const Node& v) { b.foot_length = v.positive(); });
    optional_field(n, "leg_length", [&](const Node& v) { b.leg_length = v.positive(); });
    optional_field(n, "thigh_length", [&](const Node& v) { b.thigh_length = v.positive(); });
    optional_field(n, "heel_to_ankle", [&](const Node& v) { b.heel_to_ankle = v.positive(); });
    optional_field(n, "ankle_to_foot_centre", [&](const Node& v) { b.ankle_to_foot_centre = v.positive(); });
    optional_field(n, "knee_to_leg_centre", [&](const Node& v) { b.knee_to_leg_centre = v.positive(); });
    optional_field(n, "hip_to_full_leg_centre", [&](const Node& v) { b.hip_to_full_leg_centre = v.positive(); });
    if (!(b.foot_length > b.heel_to_ankle)) throw SchemaError("body.foot_length", "must exceed heel_to_ankle");
  });

  optional_field(root, "anthropometry", [&](const Node& n) {
    n.only_keys({"feet_mass_fraction", "leg_mass_fraction", "thigh_mass_fraction", "feet_gyration_ratio",
                 "leg_gyration_ratio", "thigh_gyration_ratio"});
    auto& a = cfg.biomech.anthropometry;
    optional_field(n, "feet_mass_fraction", [&](const Node& v) { a.feet_mass_fraction = v.positive(); });
    optional_field(n, "leg_mass_fraction", [&](const Node& v) { a.leg_mass_fraction = v.positive(); });
    optional_field(n, "thigh_mass_fraction", [&](const Node& v) { a.thigh_mass_fraction = v.positive(); });
    optional_field(n, "feet_gyration_ratio", [&](const Node& v) { a.feet_gyration_ratio = v.positive(); });
    optional_field(n, "leg_gyration_ratio", [&](const Node& v) { a.leg_gyration_ratio = v.positive(); });
    optional_field(n, "thigh_gyration_ratio", [&](const Node& v) { a.thigh_gyration_ratio = v.positive(); });
  });

  optional_field(root, "signal", [&](const Node& n) {
    n.only_keys({"hampel_window", "hampel_threshold", "hampel_max_passes", "sagittal_axis", "min_peak_distance_s",
                 "min_peak_prominence", "boundary_tolerance", "onset_offset"});
    auto& s = cfg.signal;
    optional_field(n, "hampel_window", [&](const Node& v) {
      s.hampel_window = v.count();
      if (s.hampel_window < 3 || s.hampel_window % 2 == 0) v.fail("must be odd and >= 3");
    });
    optional_field(n, "hampel_threshold", [&](const Node& v) { s.hampel_threshold = v.positive(); });
    optional_field(n, "hampel_max_passes", [&](const Node& v) { s.hampel_max_passes = v.count(); });
    optional_field(n, "sagittal_axis", [&](const Node& v) { s.sagittal_axis = axis_from(v); });
    optional_field(n, "min_peak_distance_s", [&](const Node& v) { s.min_peak_distance_s = v.positive(); });
    optional_field(n, "min_peak_prominence", [&](const Node& v) {
      s.min_peak_prominence = v.number();
      if (s.min_peak_prominence < 0.0 || s.min_peak_prominence > 1.0) v.fail("must lie in [0, 1]");
    });
    optional_field(n, "boundary_tolerance", [&](const Node& v) { s.boundary_tolerance = v.positive(); });
    optional_field(n, "onset_offset", [&](const Node& o) {
      o.expect_object();
      for (const auto& [key, _] : o.value().items()) {
        const Node v = o.at(key);
        const auto j = parse_joint(key);
        if (!j) v.fail("unknown joint");
        const double off = v.number();
        if (off < 0.0 || off >= 1.0) v.fail("must lie in [0, 1)");
        cfg.onset_offset[*j] = off;
      }
    });
  });

  optional_field(root, "contact", [&](const Node& n) {
    n.only_keys({"threshold_fraction", "ground_height"});
    optional_field(n, "threshold_fraction",
                   [&](const Node& v) { cfg.biomech.contact.threshold_fraction = v.positive(); });
    optional_field(n, "ground_height", [&](const Node& v) { cfg.biomech.contact.ground_height = v.number(); });
  });

  optional_field(root, "centre_of_mass", [&](const Node& n) {
    n.only_keys({"amplitude_fraction", "phase"});
    optional_field(n, "amplitude_fraction",
                   [&](const Node& v) { cfg.biomech.centre_of_mass.amplitude_fraction = v.number(); });
    optional_field(n, "phase", [&](const Node& v) { cfg.biomech.centre_of_mass.phase = v.number(); });
  });

  optional_field(root, "insertions", [&](const Node& n) {
    n.expect_object();
    for (const auto& [key, _] : n.value().items()) {
      const Node e = n.at(key);
      const auto dot = key.find('.');
      const auto m = parse_muscle(key.substr(0, dot));
      const auto j = dot == std::string::npos ? std::nullopt : parse_joint(key.substr(dot + 1));
      if (!m || !j) e.fail("expected <muscle>.<joint>");
      e.only_keys({"distance", "angle_deg"});
      biomech::MuscleInsertion ins;
      try {
        ins = cfg.biomech.insertions.at(*m, *j);
      } catch (const DomainError&) {
        e.fail("this muscle does not act on that joint");
      }
      optional_field(e, "distance", [&](const Node& v) { ins.distance = v.positive(); });
      optional_field(e, "angle_deg", [&](const Node& v) {
        const double a = v.number();
        if (!(a > 0.0 && a < 180.0)) v.fail("must lie in (0, 180)");
        ins.angle = deg_to_rad(a);
      });
      cfg.biomech.insertions.set(*m, *j, ins);
    }
  });

  optional_field(root, "cross_joint_angle_deg",
                 [&](const Node& v) { cfg.biomech.cross_joint_angle = deg_to_rad(v.number()); });
  optional_field(root, "cycle_duration_s", [&](const Node& v) { cfg.biomech.cycle_duration_s = v.positive(); });

  optional_field(root, "muscles", [&](const Node& n) {
    n.expect_object();
    if (n.has("default")) {
      MuscleSettings base;
      read_pool(n.at("default"), base, false);
      for (auto& [_, s] : cfg.muscles) s.pool = base.pool;
    }
    for (const auto& [key, _] : n.value().items()) {
      if (key == "default") continue;
      const Node e = n.at(key);
      const auto m = parse_muscle(key);
      if (!m) e.fail("unknown muscle group");
      read_pool(e, cfg.muscles[*m], true);
    }
  });

  optional_field(root, "length_curve", [&](const Node& v) {
    const std::string s = v.string();
    if (s == "continuous") {
      cfg.length_curve = muscle::LengthCurve::continuous;
    } else if (s == "literal") {
      cfg.length_curve = muscle::LengthCurve::literal;
    } else {
      v.fail("expected continuous or literal");
    }
  });
  optional_field(root, "length_gain", [&](const Node& v) { cfg.length_model.gain = v.number(); });

  optional_field(root, "scheduler", [&](const Node& n) {
    n.only_keys({"band_fraction", "refractory_ms", "recruit_margin", "grid_ms", "refinement_passes"});
    auto& s = cfg.scheduler;
    optional_field(n, "band_fraction", [&](const Node& v) { s.band_fraction = v.number(); });
    optional_field(n, "refractory_ms", [&](const Node& v) { s.refractory_ms = v.number(); });
    optional_field(n, "recruit_margin", [&](const Node& v) { s.recruit_margin = v.number(); });
    optional_field(n, "grid_ms", [&](const Node& v) { s.grid_ms = v.positive(); });
    optional_field(n, "refinement_passes", [&](const Node& v) { s.refinement_passes = v.count(); });
    if (s.band_fraction < 0.0) n.at("band_fraction").fail("must be >= 0");
    if (s.refractory_ms < 0.0) n.at("refractory_ms").fail("must be >= 0");
    if (s.recruit_margin < 0.0) n.at("recruit_margin").fail("must be >= 0");
  });

  optional_field(root, "reference_load", [&](const Node& v) {
    cfg.reference_load = v.positive();
    if (cfg.reference_load > 1.0) v.fail("must not exceed 1");
  });
  optional_field(root, "histogram_bins", [&](const Node& v) {
    cfg.histogram_bins = v.count();
    if (cfg.histogram_bins == 0) v.fail("must be positive");
  });
  optional_field(root, "cv_folds", [&](const Node& v) {
    cfg.cv_folds = v.count();
    if (cfg.cv_folds < 2) v.fail("must be at least 2");
  });
  optional_field(root, "train", [&](const Node& n) {
    n.only_keys({"learning_rate", "batch_size", "epochs", "seed"});
    optional_field(n, "learning_rate", [&](const Node& v) { cfg.train.learning_rate = v.number(); });
    optional_field(n, "batch_size", [&](const Node& v) {
      cfg.train.batch_size = v.count();
      if (cfg.train.batch_size == 0) v.fail("must be positive");
    });
    optional_field(n, "epochs", [&](const Node& v) { cfg.train.epochs = v.count(); });
    optional_field(n, "seed", [&](const Node& v) { cfg.train.seed = v.u64(); });
  });

  cfg.body.validate();
  return cfg;
}

PipelineConfig load_config(const std::filesystem::path& path) { return config_from_json(io::read_json(path)); }

json to_json(const PipelineConfig& cfg) {
  const auto& b = cfg.body;
  const auto& a = cfg.biomech.anthropometry;
  const auto& s = cfg.signal;
  json offsets = json::object();
  for (const auto& [j, off] : cfg.onset_offset) offsets[std::string(to_string(j))] = off;
  json insertions = json::object();
  for (const auto& [m, j] : cfg.biomech.insertions.keys()) {
    const auto& ins = cfg.biomech.insertions.at(m, j);
    insertions[std::string(to_string(m)) + "." + std::string(to_string(j))] = {
        {"distance", ins.distance}, {"angle_deg", rad_to_deg(ins.angle)}};
  }
  json muscles = json::object();
  for (const auto& [m, ms] : cfg.muscles) muscles[std::string(to_string(m))] = pool_json(ms);
  json contact = {{"threshold_fraction", cfg.biomech.contact.threshold_fraction}};
  if (cfg.biomech.contact.ground_height) contact["ground_height"] = *cfg.biomech.contact.ground_height;

  return {
      {"schema", io::kSchema},
      {"seed", cfg.seed},
      {"body",
       {{"body_mass", b.body_mass},
        {"foot_length", b.foot_length},
        {"leg_length", b.leg_length},
        {"thigh_length", b.thigh_length},
        {"heel_to_ankle", b.heel_to_ankle},
        {"ankle_to_foot_centre", b.ankle_to_foot_centre},
        {"knee_to_leg_centre", b.knee_to_leg_centre},
        {"hip_to_full_leg_centre", b.hip_to_full_leg_centre}}},
      {"anthropometry",
       {{"feet_mass_fraction", a.feet_mass_fraction},
        {"leg_mass_fraction", a.leg_mass_fraction},
        {"thigh_mass_fraction", a.thigh_mass_fraction},
        {"feet_gyration_ratio", a.feet_gyration_ratio},
        {"leg_gyration_ratio", a.leg_gyration_ratio},
        {"thigh_gyration_ratio", a.thigh_gyration_ratio}}},
      {"signal",
       {{"hampel_window", s.hampel_window},
        {"hampel_threshold", s.hampel_threshold},
        {"hampel_max_passes", s.hampel_max_passes},
        {"sagittal_axis", axis_name(s.sagittal_axis)},
        {"min_peak_distance_s", s.min_peak_distance_s},
        {"min_peak_prominence", s.min_peak_prominence},
        {"boundary_tolerance", s.boundary_tolerance},
        {"onset_offset", offsets}}},
      {"contact", contact},
      {"centre_of_mass",
       {{"amplitude_fraction", cfg.biomech.centre_of_mass.amplitude_fraction},
        {"phase", cfg.biomech.centre_of_mass.phase}}},
      {"insertions", insertions},
      {"cross_joint_angle_deg", rad_to_deg(cfg.biomech.cross_joint_angle)},
      {"cycle_duration_s", cfg.biomech.cycle_duration_s},
      {"muscles", muscles},
      {"length_curve", cfg.length_curve == muscle::LengthCurve::literal ? "literal" : "continuous"},
      {"length_gain", cfg.length_model.gain},
      {"scheduler",
       {{"band_fraction", cfg.scheduler.band_fraction},
        {"refractory_ms", cfg.scheduler.refractory_ms},
        {"recruit_margin", cfg.scheduler.recruit_margin},
        {"grid_ms", cfg.scheduler.grid_ms},
        {"refinement_passes", cfg.scheduler.refinement_passes}}},
      {"reference_load", cfg.reference_load},
      {"histogram_bins", cfg.histogram_bins},
      {"cv_folds", cfg.cv_folds},
      {"train",
       {{"learning_rate", cfg.train.learning_rate},
        {"batch_size", cfg.train.batch_size},
        {"epochs", cfg.train.epochs},
        {"seed", cfg.train.seed}}},
  };
}

}  // namespace gaitlab
