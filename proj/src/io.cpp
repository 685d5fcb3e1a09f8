#include "gaitlab/io.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "gaitlab/error.hpp"

namespace gaitlab::io {

namespace fs = std::filesystem;

void Node::fail(const std::string& what) const { throw SchemaError(path_.empty() ? "$" : path_, what); }

void Node::expect_object() const {
  if (!v_.is_object()) fail("expected an object");
}

void Node::only_keys(std::initializer_list<std::string_view> allowed) const {
  expect_object();
  for (const auto& [key, _] : v_.items()) {
    bool ok = false;
    for (auto a : allowed) ok = ok || a == key;
    if (!ok) Node(v_[key], path_.empty() ? key : path_ + "." + key).fail("unknown field");
  }
}

bool Node::has(std::string_view key) const { return v_.is_object() && v_.contains(key); }

Node Node::at(std::string_view key) const {
  expect_object();
  const std::string child = path_.empty() ? std::string(key) : path_ + "." + std::string(key);
  auto it = v_.find(key);
  if (it == v_.end()) throw SchemaError(child, "missing required field");
  return Node(*it, child);
}

Node Node::at(std::size_t index) const {
  if (!v_.is_array()) fail("expected an array");
  return Node(v_.at(index), path_ + "[" + std::to_string(index) + "]");
}

std::size_t Node::size() const {
  if (!v_.is_array()) fail("expected an array");
  return v_.size();
}

double Node::number() const {
  if (!v_.is_number()) fail("expected a number");
  const double d = v_.get<double>();
  if (!std::isfinite(d)) fail("must be finite");
  return d;
}

double Node::positive() const {
  const double d = number();
  if (!(d > 0.0)) fail("must be positive");
  return d;
}

std::size_t Node::count() const {
  if (!v_.is_number_integer() || (v_.is_number_integer() && !v_.is_number_unsigned() && v_.get<std::int64_t>() < 0)) {
    fail("expected a non-negative integer");
  }
  return v_.get<std::size_t>();
}

std::uint64_t Node::u64() const {
  if (!v_.is_number_unsigned() && !(v_.is_number_integer() && v_.get<std::int64_t>() >= 0)) {
    fail("expected a non-negative integer");
  }
  return v_.get<std::uint64_t>();
}

bool Node::boolean() const {
  if (!v_.is_boolean()) fail("expected true or false");
  return v_.get<bool>();
}

std::string Node::string() const {
  if (!v_.is_string()) fail("expected a string");
  return v_.get<std::string>();
}

std::vector<double> Node::numbers() const {
  const std::size_t n = size();
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = at(i).number();
  return out;
}

std::vector<double> Node::numbers(std::size_t exact) const {
  if (size() != exact) {
    fail("expected " + std::to_string(exact) + " values, got " + std::to_string(size()));
  }
  return numbers();
}

void check_schema(const Node& root) {
  root.expect_object();
  const Node s = root.at("schema");
  if (s.string() != kSchema) s.fail("unsupported schema '" + s.string() + "', expected '" + std::string(kSchema) + "'");
}

json parse(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw SchemaError("$", std::string("invalid JSON: ") + e.what());
  }
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const fs::path& path) { return parse(read_text(path)); }

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

void write_atomic(const fs::path& path, std::string_view content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  static std::atomic<unsigned long> counter{0};
  const fs::path tmp = path.string() + ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw std::runtime_error("cannot move " + tmp.string() + " into place: " + ec.message());
  }
}

Joint joint_from(const Node& n) {
  const auto j = parse_joint(n.string());
  if (!j) n.fail("expected ankle, knee or hip");
  return *j;
}

MuscleGroup muscle_from(const Node& n) {
  const auto m = parse_muscle(n.string());
  if (!m) n.fail("unknown muscle group '" + n.string() + "'");
  return *m;
}

json to_json(const signal::RawCapture& raw) {
  json samples = json::array();
  for (const auto& s : raw.samples) {
    samples.push_back({{"t", s.t_ms}, {"alpha", s.alpha}, {"beta", s.beta}, {"gamma", s.gamma}});
  }
  return {{"schema", kSchema},
          {"placement_joint", to_string(raw.placement_joint)},
          {"sample_rate", raw.sample_rate},
          {"samples", samples}};
}

signal::RawCapture raw_capture_from(const json& doc) {
  const Node root(doc, "");
  check_schema(root);
  root.only_keys({"schema", "placement_joint", "sample_rate", "samples"});
  signal::RawCapture raw;
  raw.placement_joint = joint_from(root.at("placement_joint"));
  raw.sample_rate = root.at("sample_rate").positive();
  const Node samples = root.at("samples");
  const std::size_t n = samples.size();
  raw.samples.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Node s = samples.at(i);
    s.only_keys({"t", "alpha", "beta", "gamma"});
    raw.samples.push_back({s.at("t").number(), s.at("alpha").number(), s.at("beta").number(), s.at("gamma").number()});
  }
  raw.validate();
  return raw;
}

json to_json(const signal::GaitCycle& cycle) {
  return {{"schema", kSchema}, {"joint", to_string(cycle.joint)}, {"angles", cycle.angles}};
}

signal::GaitCycle gait_cycle_from(const json& doc) {
  const Node root(doc, "");
  check_schema(root);
  root.only_keys({"schema", "joint", "angles"});
  signal::GaitCycle c{joint_from(root.at("joint")), root.at("angles").numbers(kCycleLength)};
  c.validate();
  return c;
}

json to_json(const signal::PhaseLabels& labels) {
  json a = json::array();
  for (auto p : labels.labels) a.push_back(p == signal::Phase::stance ? "stance" : "swing");
  return a;
}

signal::PhaseLabels phase_labels_from(const Node& n) {
  if (n.size() != kCycleLength) n.fail("expected " + std::to_string(kCycleLength) + " labels");
  signal::PhaseLabels labels;
  for (std::size_t i = 0; i < kCycleLength; ++i) {
    const Node e = n.at(i);
    const std::string s = e.string();
    if (s == "stance") {
      labels.labels[i] = signal::Phase::stance;
    } else if (s == "swing") {
      labels.labels[i] = signal::Phase::swing;
    } else {
      e.fail("expected stance or swing");
    }
  }
  return labels;
}

json to_json(const signal::GaitFeatures& f) {
  return {{"min_angle", f.min_angle},
          {"max_angle", f.max_angle},
          {"step_count", f.step_count},
          {"stance_swing_ratio", f.stance_swing_ratio},
          {"speed", f.speed},
          {"time_per_step", f.time_per_step}};
}

signal::GaitFeatures gait_features_from(const Node& n) {
  n.only_keys({"min_angle", "max_angle", "step_count", "stance_swing_ratio", "speed", "time_per_step"});
  signal::GaitFeatures f;
  f.min_angle = n.at("min_angle").number();
  f.max_angle = n.at("max_angle").number();
  f.step_count = n.at("step_count").count();
  f.stance_swing_ratio = n.at("stance_swing_ratio").number();
  f.speed = n.at("speed").number();
  f.time_per_step = n.at("time_per_step").positive();
  return f;
}

json to_json(const biomech::ForceTrajectory& f) {
  return {{"schema", kSchema}, {"muscle", to_string(f.muscle)}, {"dt", f.dt}, {"forces", f.forces}};
}

biomech::ForceTrajectory force_trajectory_from(const json& doc) {
  const Node root(doc, "");
  check_schema(root);
  root.only_keys({"schema", "muscle", "dt", "forces"});
  biomech::ForceTrajectory f{muscle_from(root.at("muscle")), root.at("dt").positive(),
                             root.at("forces").numbers(kCycleLength)};
  f.validate();
  return f;
}

json to_json(const muscle::ApTrains& trains) {
  json list = json::array();
  for (std::size_t i = 0; i < trains.trains.size(); ++i) {
    list.push_back({{"mu_rank", i + 1}, {"times_ms", trains.trains[i]}});
  }
  return {{"schema", kSchema}, {"muscle", to_string(trains.muscle)}, {"trains", list}};
}

muscle::ApTrains ap_trains_from(const json& doc) {
  const Node root(doc, "");
  check_schema(root);
  root.only_keys({"schema", "muscle", "trains"});
  muscle::ApTrains out;
  out.muscle = muscle_from(root.at("muscle"));
  const Node list = root.at("trains");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const Node t = list.at(i);
    t.only_keys({"mu_rank", "times_ms"});
    if (t.at("mu_rank").count() != i + 1) t.at("mu_rank").fail("ranks must run 1, 2, 3, ... in order");
    auto times = t.at("times_ms").numbers();
    for (std::size_t k = 1; k < times.size(); ++k) {
      if (!(times[k] > times[k - 1])) t.at("times_ms").at(k).fail("times must be strictly increasing");
    }
    out.trains.push_back(std::move(times));
  }
  return out;
}

json to_json(const detect::ViewModel& model) {
  json layers = json::array();
  for (const auto& l : model.net.layers()) {
    layers.push_back({{"in", l.in}, {"out", l.out}, {"weights", l.weights}, {"biases", l.biases}});
  }
  return {{"schema", kSchema},
          {"kind", "view-model"},
          {"joint", to_string(model.joint)},
          {"view", detect::to_string(model.view)},
          {"seed", model.net.seed()},
          {"widths", model.net.widths()},
          {"normalizer", {{"mean", model.normalizer.mean}, {"scale", model.normalizer.scale}}},
          {"layers", layers}};
}

detect::ViewModel view_model_from(const json& doc) {
  try {
    const Node root(doc, "");
    check_schema(root);
    root.only_keys({"schema", "kind", "joint", "view", "seed", "widths", "normalizer", "layers"});
    if (root.at("kind").string() != "view-model") root.at("kind").fail("expected view-model");
    detect::ViewModel vm;
    vm.joint = joint_from(root.at("joint"));
    const Node view = root.at("view");
    const auto v = detect::parse_view(view.string());
    if (!v) view.fail("expected angles, forces or stimuli");
    vm.view = *v;
    const Node norm = root.at("normalizer");
    norm.only_keys({"mean", "scale"});
    vm.normalizer.mean = norm.at("mean").numbers(kCycleLength);
    vm.normalizer.scale = norm.at("scale").numbers(kCycleLength);
    std::vector<detect::Layer> layers;
    const Node list = root.at("layers");
    for (std::size_t i = 0; i < list.size(); ++i) {
      const Node l = list.at(i);
      l.only_keys({"in", "out", "weights", "biases"});
      detect::Layer layer;
      layer.in = l.at("in").count();
      layer.out = l.at("out").count();
      layer.weights = l.at("weights").numbers(layer.in * layer.out);
      layer.biases = l.at("biases").numbers(layer.out);
      layers.push_back(std::move(layer));
    }
    vm.net = detect::Mlp::from_layers(std::move(layers), root.at("seed").u64());
    const auto widths = root.at("widths");
    std::vector<std::size_t> declared;
    for (std::size_t i = 0; i < widths.size(); ++i) declared.push_back(widths.at(i).count());
    if (declared != vm.net.widths()) widths.fail("does not match the stored layers");
    if (vm.net.widths().front() != kCycleLength) widths.fail("input width must be 20");
    return vm;
  } catch (const SchemaError& e) {
    throw ModelError(std::string("model file: ") + e.what());
  }
}

json to_json(const detect::Dataset& data) {
  json samples = json::array();
  for (const auto& s : data.samples) {
    samples.push_back({{"person_id", s.person_id},
                       {"joint", to_string(s.joint)},
                       {"view", detect::to_string(s.view)},
                       {"values", s.values},
                       {"label", detect::to_string(s.label)}});
  }
  return {{"schema", kSchema}, {"kind", "dataset"}, {"samples", samples}};
}

detect::Dataset dataset_from(const json& doc) {
  const Node root(doc, "");
  check_schema(root);
  root.only_keys({"schema", "kind", "samples"});
  if (root.at("kind").string() != "dataset") root.at("kind").fail("expected dataset");
  detect::Dataset data;
  const Node list = root.at("samples");
  for (std::size_t i = 0; i < list.size(); ++i) {
    const Node s = list.at(i);
    s.only_keys({"person_id", "joint", "view", "values", "label"});
    detect::Sample sample;
    sample.person_id = s.at("person_id").string();
    if (sample.person_id.empty()) s.at("person_id").fail("must be non-empty");
    sample.joint = joint_from(s.at("joint"));
    const auto v = detect::parse_view(s.at("view").string());
    if (!v) s.at("view").fail("expected angles, forces or stimuli");
    sample.view = *v;
    sample.values = s.at("values").numbers(kCycleLength);
    const auto label = detect::parse_label(s.at("label").string());
    if (!label) s.at("label").fail("expected normal or pathological");
    sample.label = *label;
    data.samples.push_back(std::move(sample));
  }
  return data;
}

std::string format_number(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string histogram_csv(const std::vector<muscle::HistogramBin>& bins) {
  std::string out = "bin_start_pct,ap_count\n";
  for (const auto& b : bins) out += format_number(b.bin_start_pct) + "," + std::to_string(b.ap_count) + "\n";
  return out;
}

}  // namespace gaitlab::io
