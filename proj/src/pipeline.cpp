#include "gaitlab/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <future>
#include <random>
#include <set>

#include "gaitlab/error.hpp"
#include "gaitlab/hash.hpp"
#include "gaitlab/io.hpp"

namespace gaitlab::pipeline {

using io::json;

namespace {

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

std::string joint_file(std::string_view stem, Joint j) {
  return std::string(stem) + "_" + std::string(to_string(j)) + ".json";
}

std::string muscle_file(std::string_view stem, MuscleGroup m, std::string_view ext = ".json") {
  return std::string(stem) + "_" + std::string(to_string(m)) + std::string(ext);
}

// Collected outputs, written only once every stage has succeeded.
class Outputs {
 public:
  void add(std::string name, std::string content) { files_.emplace_back(std::move(name), std::move(content)); }
  void add_json(std::string name, const json& doc) { add(std::move(name), io::dump(doc)); }
  void commit(const fs::path& dir) const {
    fs::create_directories(dir);
    for (const auto& [name, content] : files_) io::write_atomic(dir / name, content);
  }

 private:
  std::vector<std::pair<std::string, std::string>> files_;
};

fs::path require_file(const fs::path& dir, const std::string& name) {
  const fs::path p = dir / name;
  if (!fs::is_regular_file(p)) throw ValidationError("missing input " + p.string());
  return p;
}

std::vector<double> theta_rad(const signal::GaitCycle& c) {
  std::vector<double> t(c.angles.size());
  std::transform(c.angles.begin(), c.angles.end(), t.begin(), deg_to_rad);
  return t;
}

const signal::GaitCycle& cycle_of(const kinematics::LimbCycles& cycles, Joint j) {
  switch (j) {
    case Joint::ankle:
      return cycles.ankle;
    case Joint::knee:
      return cycles.knee;
    case Joint::hip:
      return cycles.hip;
  }
  return cycles.ankle;
}

kinematics::LimbCycles limb_from(const std::map<Joint, signal::GaitCycle>& cycles) {
  for (Joint j : kJoints) {
    if (!cycles.count(j)) throw ValidationError("no " + std::string(to_string(j)) + " cycle available");
  }
  return {cycles.at(Joint::hip), cycles.at(Joint::knee), cycles.at(Joint::ankle)};
}

json histogram_counts(const std::vector<muscle::HistogramBin>& bins) {
  json a = json::array();
  for (const auto& b : bins) a.push_back(b.ap_count);
  return a;
}

}  // namespace

PreprocessResult preprocess(const std::vector<signal::RawCapture>& captures, const PipelineConfig& cfg) {
  if (captures.empty()) throw ValidationError("no captures given");
  PreprocessResult r;
  std::map<Joint, signal::RawCapture> denoised;
  for (const auto& raw : captures) {
    raw.validate();
    const Joint j = raw.placement_joint;
    if (denoised.count(j)) throw ValidationError("two captures for the " + std::string(to_string(j)) + " placement");
    const auto opts = cfg.signal_for(j);
    auto clean = signal::denoise(raw, opts);
    auto segs = signal::segment_steps(clean, opts);
    r.cycles[j] = signal::summarize_cycle(segs, clean, opts);
    r.segments[j] = std::move(segs);
    denoised.emplace(j, std::move(clean));
  }
  if (r.cycles.size() == kJoints.size()) {
    const auto limb = limb_from(r.cycles);
    r.phases = kinematics::classify_phases(limb, cfg.body, cfg.biomech.contact);
    for (const auto& [j, clean] : denoised) {
      r.features[j] = signal::extract_features(clean, r.segments.at(j), *r.phases, cfg.signal_for(j));
    }
  }
  return r;
}

Joint primary_joint(MuscleGroup m) {
  switch (m) {
    case MuscleGroup::gastrocnemius:
    case MuscleGroup::tibialis_anterior:
      return Joint::ankle;
    case MuscleGroup::quadriceps:
    case MuscleGroup::hamstrings:
      return Joint::knee;
    case MuscleGroup::gluteus:
    case MuscleGroup::iliopsoas:
      return Joint::hip;
  }
  return Joint::ankle;
}

muscle::MuscleAgentModel muscle_model(MuscleGroup m, const PipelineConfig& cfg) {
  auto model = muscle::make_muscle(m, cfg.muscles.at(m).pool);
  model.curve = cfg.length_curve;
  return model;
}

std::map<MuscleGroup, double> force_scales(const PipelineConfig& cfg) {
  std::map<MuscleGroup, double> scales;
  std::optional<biomech::LowerBodyForces> reference;
  for (MuscleGroup m : kMuscleGroups) {
    const auto& settings = cfg.muscles.at(m);
    if (settings.force_scale) {
      scales[m] = *settings.force_scale;
      continue;
    }
    if (!reference) {
      const auto gait = synthetic::synthesize_gait({}, cfg.body, cfg.biomech.contact.threshold_fraction);
      reference = biomech::simulate_lower_body(gait.cycles, cfg.body, cfg.biomech);
    }
    const auto& f = reference->at(m).forces;
    const double peak = *std::max_element(f.begin(), f.end());
    if (!(peak > 0.0)) throw ValidationError("reference gait gives no " + std::string(to_string(m)) + " force");
    scales[m] = cfg.reference_load * muscle_model(m, cfg).total_max_force() / peak;
  }
  return scales;
}

Stimulation stimulate(const biomech::LowerBodyForces& forces, const kinematics::LimbCycles& cycles,
                      const PipelineConfig& cfg, const std::map<MuscleGroup, double>& scales) {
  struct Job {
    biomech::ForceTrajectory target;
    muscle::ApTrains trains;
    std::vector<muscle::HistogramBin> histogram;
  };
  std::map<MuscleGroup, std::future<Job>> jobs;
  for (MuscleGroup m : kMuscleGroups) {
    jobs[m] = std::async(std::launch::async, [&, m] {
      Job job;
      job.target = forces.at(m);
      for (double& v : job.target.forces) v *= scales.at(m);
      const auto model = muscle_model(m, cfg);
      const auto lengths = cfg.length_model.lengths(m, theta_rad(cycle_of(cycles, primary_joint(m))));
      job.trains = muscle::reconstruct_ap_trains(model, job.target, lengths, cfg.scheduler);
      const double cycle_ms = job.target.dt * 1000.0 * static_cast<double>(job.target.forces.size());
      job.histogram = muscle::stimulation_histogram(job.trains.trains, cycle_ms, cfg.histogram_bins);
      return job;
    });
  }
  Stimulation s;
  // get() in a fixed order so the first failure reported is deterministic.
  std::exception_ptr first;
  for (auto& [m, f] : jobs) {
    try {
      Job job = f.get();
      s.targets[m] = std::move(job.target);
      s.trains[m] = std::move(job.trains);
      s.histograms[m] = std::move(job.histogram);
    } catch (...) {
      if (!first) first = std::current_exception();
    }
  }
  if (first) std::rethrow_exception(first);
  return s;
}

Simulation simulate(const kinematics::LimbCycles& cycles, double cycle_s, const PipelineConfig& cfg) {
  PipelineConfig c = cfg;
  c.biomech.cycle_duration_s = cycle_s;
  Simulation sim;
  sim.cycle_s = cycle_s;
  sim.forces = biomech::simulate_lower_body(cycles, c.body, c.biomech);
  sim.scales = force_scales(cfg);
  sim.stimulation = stimulate(sim.forces, cycles, c, sim.scales);
  return sim;
}

std::array<std::vector<double>, 3> joint_views(const signal::GaitCycle& cycle, const biomech::LowerBodyForces& forces,
                                               const std::map<MuscleGroup, muscle::ApTrains>& trains, double cycle_s) {
  std::array<std::vector<double>, 3> v;
  v[0] = cycle.angles;
  v[1].assign(kCycleLength, 0.0);
  v[2].assign(kCycleLength, 0.0);
  for (MuscleGroup m : muscles_for(cycle.joint)) {
    const auto& f = forces.at(m).forces;
    if (f.size() != kCycleLength) throw ShapeError("force trajectory length mismatch");
    for (std::size_t i = 0; i < kCycleLength; ++i) v[1][i] += f[i];
    const auto h = muscle::stimulation_histogram(trains.at(m).trains, cycle_s * 1000.0, kCycleLength);
    for (std::size_t i = 0; i < kCycleLength; ++i) v[2][i] += static_cast<double>(h[i].ap_count);
  }
  return v;
}

detect::Dataset synthesize_population(std::size_t persons, std::uint64_t seed, const PipelineConfig& cfg) {
  std::mt19937_64 g(seed);
  detect::Dataset data;
  const auto scales = force_scales(cfg);
  for (std::size_t p = 0; p < persons; ++p) {
    const bool pathological = p % 2 == 1;
    std::optional<synthetic::SyntheticGait> gait;
    BodyParams body;
    for (int attempt = 0; attempt < 1000 && !gait; ++attempt) {
      const auto shape = pathological ? synthetic::pathological_shape(g) : synthetic::random_shape(g);
      body = synthetic::random_body(g);
      try {
        gait = synthetic::synthesize_gait(shape, body, cfg.biomech.contact.threshold_fraction);
      } catch (const ValidationError&) {
      }
    }
    if (!gait) throw ValidationError("could not draw a feasible synthetic gait");
    PipelineConfig c = cfg;
    c.body = body;
    c.biomech.cycle_duration_s = synthetic::uniform(g, 1.0, 1.4);
    const auto forces = biomech::simulate_lower_body(gait->cycles, body, c.biomech);
    const auto stim = stimulate(forces, gait->cycles, c, scales);
    char id[32];
    std::snprintf(id, sizeof id, "p%03zu", p);
    for (Joint j : kJoints) {
      const auto views = joint_views(cycle_of(gait->cycles, j), forces, stim.trains, c.biomech.cycle_duration_s);
      for (std::size_t v = 0; v < 3; ++v) {
        data.samples.push_back({id, j, detect::kViews[v], views[v],
                                pathological ? detect::Label::pathological : detect::Label::normal});
      }
    }
  }
  return data;
}

// ---- commands ----

void cmd_preprocess(const std::vector<fs::path>& inputs, const fs::path& out, const PipelineConfig& cfg) {
  std::vector<signal::RawCapture> captures;
  for (const auto& p : inputs) {
    try {
      captures.push_back(io::raw_capture_from(io::read_json(p)));
    } catch (const SchemaError& e) {
      throw SchemaError(e.path, p.filename().string() + ": " + e.detail);
    }
  }
  const auto r = preprocess(captures, cfg);
  Outputs o;
  for (const auto& [j, c] : r.cycles) o.add_json(joint_file("cycle", j), io::to_json(c));
  if (r.phases) {
    o.add_json("phases.json", {{"schema", io::kSchema}, {"phases", io::to_json(*r.phases)}});
    for (const auto& [j, f] : r.features) {
      o.add_json(joint_file("features", j), {{"schema", io::kSchema},
                                             {"joint", to_string(j)},
                                             {"segments", r.segments.at(j).size()},
                                             {"features", io::to_json(f)}});
    }
  }
  o.commit(out);
}

void cmd_simulate(const fs::path& in, const fs::path& out, const PipelineConfig& cfg) {
  std::map<Joint, signal::GaitCycle> cycles;
  double cycle_sum = 0.0;
  std::size_t cycle_n = 0;
  for (Joint j : kJoints) {
    auto c = io::gait_cycle_from(io::read_json(require_file(in, joint_file("cycle", j))));
    if (c.joint != j) throw ValidationError(joint_file("cycle", j) + " holds a " + std::string(to_string(c.joint)) + " cycle");
    cycles[j] = std::move(c);
    const fs::path fp = in / joint_file("features", j);
    if (fs::is_regular_file(fp)) {
      const json doc = io::read_json(fp);
      const io::Node root(doc, "");
      io::check_schema(root);
      cycle_sum += io::gait_features_from(root.at("features")).time_per_step;
      ++cycle_n;
    }
  }
  const double cycle_s = cycle_n ? cycle_sum / static_cast<double>(cycle_n) : cfg.biomech.cycle_duration_s;
  const auto sim = simulate(limb_from(cycles), cycle_s, cfg);

  Outputs o;
  json scales = json::object();
  json counts = json::object();
  for (MuscleGroup m : kMuscleGroups) {
    o.add_json(muscle_file("forces", m), io::to_json(sim.forces.at(m)));
    o.add_json(muscle_file("aptrain", m), io::to_json(sim.stimulation.trains.at(m)));
    o.add(muscle_file("histogram", m, ".csv"), io::histogram_csv(sim.stimulation.histograms.at(m)));
    scales[std::string(to_string(m))] = sim.scales.at(m);
    counts[std::string(to_string(m))] = sim.stimulation.trains.at(m).total_count();
  }
  o.add_json("simulation.json", {{"schema", io::kSchema},
                                 {"kind", "simulation"},
                                 {"cycle_s", cycle_s},
                                 {"force_scale", scales},
                                 {"ap_count", counts}});
  o.commit(out);
}

void cmd_classify(const fs::path& in, const fs::path& models, const fs::path& out, const PipelineConfig& cfg,
                  const std::string& timestamp) {
  json input_hashes = json::object();
  auto load = [&](const std::string& name) {
    const fs::path p = require_file(in, name);
    const std::string text = io::read_text(p);
    input_hashes[name] = sha256_hex(text);
    try {
      return io::parse(text);
    } catch (const SchemaError& e) {
      throw SchemaError(e.path, name + ": " + e.detail);
    }
  };

  std::map<Joint, signal::GaitCycle> cycles;
  std::map<Joint, signal::GaitFeatures> features;
  for (Joint j : kJoints) {
    cycles[j] = io::gait_cycle_from(load(joint_file("cycle", j)));
    const json doc = load(joint_file("features", j));
    const io::Node root(doc, "");
    io::check_schema(root);
    features[j] = io::gait_features_from(root.at("features"));
  }
  const json phases_doc = load("phases.json");
  const io::Node phases_root(phases_doc, "");
  io::check_schema(phases_root);
  const auto phases = io::phase_labels_from(phases_root.at("phases"));

  biomech::LowerBodyForces forces;
  std::map<MuscleGroup, muscle::ApTrains> trains;
  for (MuscleGroup m : kMuscleGroups) {
    forces[m] = io::force_trajectory_from(load(muscle_file("forces", m)));
    trains[m] = io::ap_trains_from(load(muscle_file("aptrain", m)));
    if (forces[m].muscle != m || trains[m].muscle != m) throw ValidationError(std::string(to_string(m)) + " files name another muscle");
  }
  const double cycle_s = forces.at(MuscleGroup::gastrocnemius).dt * static_cast<double>(kCycleLength);

  json model_hashes = json::object();
  std::map<Joint, detect::JointModels> nets;
  for (Joint j : kJoints) {
    detect::JointModels jm;
    jm.joint = j;
    for (std::size_t v = 0; v < 3; ++v) {
      const std::string name = "model_" + std::string(to_string(j)) + "_" + std::string(detect::to_string(detect::kViews[v])) + ".json";
      const fs::path p = models / name;
      if (!fs::is_regular_file(p)) throw ModelError("missing model file " + p.string());
      const std::string text = io::read_text(p);
      model_hashes[name] = sha256_hex(text);
      json doc;
      try {
        doc = io::parse(text);
      } catch (const SchemaError& e) {
        throw ModelError(name + ": " + e.what());
      }
      auto vm = io::view_model_from(doc);
      if (vm.joint != j || vm.view != detect::kViews[v]) throw ModelError(name + ": joint or view does not match its file name");
      if (!vm.net.is_production()) throw ModelError(name + ": layer widths differ from the production architecture");
      jm.views[v] = std::move(vm);
    }
    nets[j] = std::move(jm);
  }

  json joints = json::object();
  std::string summary = "gaitlab " + std::string(kVersion) + " gait analysis\n";
  for (Joint j : kJoints) {
    const auto views = joint_views(cycles.at(j), forces, trains, cycle_s);
    const auto verdict = detect::ensemble_classify(nets.at(j), views[0], views[1], views[2]);
    json muscles = json::object();
    for (MuscleGroup m : muscles_for(j)) {
      const auto h = muscle::stimulation_histogram(trains.at(m).trains, cycle_s * 1000.0, cfg.histogram_bins);
      muscles[std::string(to_string(m))] = {{"dt", forces.at(m).dt},
                                            {"forces", forces.at(m).forces},
                                            {"ap_count", trains.at(m).total_count()},
                                            {"histogram", histogram_counts(h)}};
    }
    joints[std::string(to_string(j))] = {
        {"angles", cycles.at(j).angles},
        {"features", io::to_json(features.at(j))},
        {"muscles", muscles},
        {"verdict",
         {{"p_pathological", verdict.p_pathological},
          {"per_view", {{"angles", verdict.per_view[0]}, {"forces", verdict.per_view[1]}, {"stimuli", verdict.per_view[2]}}},
          {"label", detect::to_string(verdict.verdict())}}}};
    summary += std::string(to_string(j)) + ": " + std::string(detect::to_string(verdict.verdict())) +
               " (p_pathological " + fmt("%.3f", verdict.p_pathological) + "; angles " +
               fmt("%.3f", verdict.per_view[0]) + ", forces " + fmt("%.3f", verdict.per_view[1]) + ", stimuli " +
               fmt("%.3f", verdict.per_view[2]) + ")\n";
  }

  const json report = {
      {"schema", io::kSchema},
      {"kind", "analysis-report"},
      {"version", kVersion},
      {"generated_at", timestamp},
      {"seed", cfg.seed},
      {"provenance",
       {{"inputs", input_hashes}, {"models", model_hashes}, {"config_sha256", sha256_hex(io::dump(to_json(cfg)))}}},
      {"cycle_s", cycle_s},
      {"phases", io::to_json(phases)},
      {"joints", joints},
  };
  Outputs o;
  o.add_json("report.json", report);
  o.add("summary.txt", summary);
  o.commit(out);
}

void cmd_train(const fs::path& dataset, const fs::path& out, const PipelineConfig& cfg) {
  std::vector<fs::path> files;
  if (fs::is_directory(dataset)) {
    for (const auto& e : fs::directory_iterator(dataset)) {
      if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
  } else if (fs::is_regular_file(dataset)) {
    files.push_back(dataset);
  }
  if (files.empty()) throw ValidationError("no dataset files at " + dataset.string());
  detect::Dataset data;
  for (const auto& f : files) {
    try {
      auto part = io::dataset_from(io::read_json(f));
      data.samples.insert(data.samples.end(), part.samples.begin(), part.samples.end());
    } catch (const SchemaError& e) {
      throw SchemaError(e.path, f.filename().string() + ": " + e.detail);
    }
  }
  data.validate();

  detect::CvOptions cv;
  cv.folds = cfg.cv_folds;
  cv.seed = cfg.seed;
  cv.fit.train = cfg.train;
  cv.fit.init_seed = cfg.seed;
  const auto report = detect::person_cross_validate(data, cv);

  Outputs o;
  std::string csv = "joint,experiment_1,experiment_2,experiment_3,average,ensemble,persons\n";
  for (const auto& r : report.rows) {
    csv += std::string(to_string(r.joint));
    for (double a : r.experiment_accuracy) csv += "," + fmt("%.2f", a);
    csv += "," + fmt("%.2f", r.average) + "," + fmt("%.2f", r.ensemble) + "," + std::to_string(r.persons) + "\n";
  }
  csv += "overall,,,," + fmt("%.2f", report.overall) + ",,\n";
  o.add("cv_report.csv", csv);

  for (const auto& r : report.rows) {
    for (detect::View v : detect::kViews) {
      std::vector<const detect::Sample*> subset;
      for (const auto& s : data.samples) {
        if (s.joint == r.joint && s.view == v) subset.push_back(&s);
      }
      const auto vm = detect::fit_view(r.joint, v, subset, cv.fit);
      o.add_json("model_" + std::string(to_string(r.joint)) + "_" + std::string(detect::to_string(v)) + ".json",
                 io::to_json(vm));
    }
  }
  o.commit(out);
}

void cmd_report(const fs::path& report_path, const fs::path& out) {
  const json doc = io::read_json(report_path);
  const io::Node root(doc, "");
  io::check_schema(root);
  if (root.at("kind").string() != "analysis-report") root.at("kind").fail("expected analysis-report");
  const io::Node joints = root.at("joints");

  std::string angles = "pct";
  std::string verdicts = "joint,p_angles,p_forces,p_stimuli,p_pathological,verdict\n";
  std::vector<std::pair<std::string, std::vector<double>>> angle_cols;
  std::vector<std::pair<std::string, std::vector<double>>> force_cols;
  std::vector<std::pair<std::string, std::vector<double>>> hist_cols;
  for (Joint j : kJoints) {
    const std::string jn(to_string(j));
    if (!joints.has(jn)) continue;
    const io::Node jnode = joints.at(jn);
    angle_cols.emplace_back(jn, jnode.at("angles").numbers(kCycleLength));
    const io::Node v = jnode.at("verdict");
    const io::Node pv = v.at("per_view");
    verdicts += jn + "," + io::format_number(pv.at("angles").number()) + "," +
                io::format_number(pv.at("forces").number()) + "," + io::format_number(pv.at("stimuli").number()) +
                "," + io::format_number(v.at("p_pathological").number()) + "," + v.at("label").string() + "\n";
    const io::Node muscles = jnode.at("muscles");
    for (MuscleGroup m : muscles_for(j)) {
      const std::string mn(to_string(m));
      const io::Node mnode = muscles.at(mn);
      force_cols.emplace_back(mn, mnode.at("forces").numbers(kCycleLength));
      hist_cols.emplace_back(mn, mnode.at("histogram").numbers());
    }
  }
  auto table = [](std::string_view first, const std::vector<std::pair<std::string, std::vector<double>>>& cols,
                  auto&& row_label) {
    std::string s(first);
    for (const auto& [name, _] : cols) s += "," + name;
    s += "\n";
    const std::size_t rows = cols.empty() ? 0 : cols.front().second.size();
    for (std::size_t i = 0; i < rows; ++i) {
      s += row_label(i, rows);
      for (const auto& [name, values] : cols) {
        if (values.size() != rows) throw ValidationError("report columns differ in length at " + name);
        s += "," + io::format_number(values[i]);
      }
      s += "\n";
    }
    return s;
  };
  auto pct = [](std::size_t i, std::size_t rows) {
    return io::format_number(100.0 * static_cast<double>(i) / static_cast<double>(rows));
  };
  Outputs o;
  o.add("angles.csv", table("pct", angle_cols, pct));
  o.add("forces.csv", table("pct", force_cols, pct));
  o.add("histograms.csv", table("bin_start_pct", hist_cols, pct));
  o.add("verdicts.csv", verdicts);
  o.commit(out);
}

void cmd_synth(const fs::path& out, const PipelineConfig& cfg, const SynthOptions& opts) {
  std::mt19937_64 g(cfg.seed);
  std::optional<synthetic::SyntheticGait> drawn;
  for (int attempt = 0; attempt < 1000 && !drawn; ++attempt) {
    const auto shape = opts.pathological ? synthetic::pathological_shape(g) : synthetic::GaitShape{};
    try {
      drawn = synthetic::synthesize_gait(shape, cfg.body, cfg.biomech.contact.threshold_fraction);
    } catch (const ValidationError&) {
      if (!opts.pathological) throw;
    }
  }
  if (!drawn) throw ValidationError("could not draw a feasible pathological gait for this body");
  const auto& gait = *drawn;
  PipelineConfig written = cfg;
  Outputs o;
  for (Joint j : kJoints) {
    auto copts = opts.capture;
    copts.seed = cfg.seed * 3 + static_cast<std::uint64_t>(j);
    copts.sagittal_axis = cfg.signal.sagittal_axis;
    const auto cap = synthetic::synthesize_capture(cycle_of(gait.cycles, j), copts);
    written.onset_offset[j] = cap.onset_offset;
    o.add_json(joint_file("capture", j), io::to_json(cap.capture));
  }
  o.add_json("config.json", to_json(written));
  o.add_json("truth.json", {{"schema", io::kSchema},
                            {"kind", "synthetic-truth"},
                            {"pathological", opts.pathological},
                            {"phases", io::to_json(gait.labels)},
                            {"hip", gait.cycles.hip.angles},
                            {"knee", gait.cycles.knee.angles},
                            {"ankle", gait.cycles.ankle.angles}});
  o.commit(out);
}

void cmd_synth_dataset(const fs::path& out, std::size_t persons, const PipelineConfig& cfg) {
  const auto data = synthesize_population(persons, cfg.seed, cfg);
  Outputs o;
  o.add_json("dataset.json", io::to_json(data));
  o.commit(out);
}

}  // namespace gaitlab::pipeline
