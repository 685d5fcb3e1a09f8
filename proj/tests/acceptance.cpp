// Acceptance run: one PASS/FAIL line per primary criterion. Exit status is
// nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "cli_runner.hpp"
#include "fixtures.hpp"
#include "gaitlab/biomech.hpp"
#include "gaitlab/ensemble.hpp"
#include "gaitlab/error.hpp"
#include "gaitlab/io.hpp"
#include "gaitlab/kinematics.hpp"
#include "gaitlab/mlp.hpp"
#include "gaitlab/muscle.hpp"
#include "gaitlab/pipeline.hpp"
#include "gaitlab/synthetic.hpp"

using namespace gaitlab;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Closed-form examples and unit properties, run from the unit-test binaries.
// Randomised round trips and training are timed by their own criteria below.
Outcome equation_suite() {
  const char* binaries[] = {"test_kernels", "test_signal", "test_kinematics", "test_biomech", "test_muscle",
                            "test_detect"};
  const std::string exclude =
      " -tce='reconstruction round trip and size principle,training separates two clusters,"
      "person cross-validation on a separable population'";
  const auto t0 = Clock::now();
  std::size_t failed = 0;
  std::string which;
  for (const char* b : binaries) {
    const std::string cmd = cli::quote((fs::path(GAITLAB_TEST_BIN) / b).string()) + exclude + " >/dev/null 2>&1";
    if (std::system(cmd.c_str()) != 0) {
      ++failed;
      which += std::string(" ") + b;
    }
  }
  const double s = seconds_since(t0);
  return {failed == 0 && s < 1.0, fmt("%zu binaries failed%s; %.3f s (limit 1 s)", failed, which.c_str(), s)};
}

Outcome table2_constants() {
  const BodyParams body;  // 80 kg, foot 0.25 m
  const auto m = biomech::segment_masses(body);
  const double ankle = biomech::moment_of_inertia(Joint::ankle, body);
  const double feet_err = std::abs(m.feet - 1.16);
  const double ankle_err = std::abs(ankle - 1.16 * 0.3844 * 0.0625);
  return {feet_err <= 1e-9 && ankle_err <= 1e-9 && body.body_mass == 80.0 && body.foot_length == 0.25,
          fmt("feet %.12f kg (err %.1e); ankle inertia %.12f kg m^2 (err %.1e, rounds to %.5f)", m.feet, feet_err,
              ankle, ankle_err, ankle)};
}

Outcome boots_properties() {
  std::mt19937_64 rng(2024);
  const auto t0 = Clock::now();
  std::size_t negative = 0, formula = 0, clamp = 0;
  for (int i = 0; i < 1000; ++i) {
    biomech::JointAgent agent;
    agent.joint = Joint::knee;
    agent.dt = rng::uniform(rng, 0.01, 0.1);
    agent.inertia = rng::uniform(rng, 0.005, 0.5);
    agent.theta.resize(kCycleLength);
    for (double& v : agent.theta) v = rng::uniform(rng, -1.5, 1.5);
    biomech::MuscleInsertion ins;
    ins.distance = rng::uniform(rng, 0.01, 0.1);
    ins.angle = rng::uniform(rng, deg_to_rad(2.0), deg_to_rad(88.0));
    const auto torque = agent.net_torque();

    const auto bare = biomech::boots(agent, MuscleGroup::quadriceps, ins, biomech::EnvironmentalTorques(kCycleLength));
    std::vector<std::vector<double>> cols(static_cast<std::size_t>(rng::below(rng, 4) + 1),
                                          std::vector<double>(kCycleLength));
    for (auto& c : cols) {
      for (double& v : c) v = rng::uniform(rng, -200.0, 200.0);
    }
    const auto env = biomech::stack_sources(cols);
    const auto with_env = biomech::boots(agent, MuscleGroup::quadriceps, ins, env);
    // Environment that dominates the net torque at every step.
    std::vector<double> heavy(kCycleLength);
    for (std::size_t t = 0; t < kCycleLength; ++t) heavy[t] = torque[t] + rng::uniform(rng, 0.0, 100.0);
    const auto clamped = biomech::boots(agent, MuscleGroup::quadriceps, ins, biomech::stack_sources({heavy}));

    const double lever = ins.distance * std::sin(ins.angle);
    for (std::size_t t = 0; t < kCycleLength; ++t) {
      if (bare.forces[t] < 0 || with_env.forces[t] < 0 || clamped.forces[t] < 0) ++negative;
      const double hand = std::max(0.0, torque[t] / lever);
      if (std::abs(bare.forces[t] - hand) > 1e-9 * std::max(1.0, hand)) ++formula;
      if (clamped.forces[t] != 0.0) ++clamp;
    }
  }
  const double s = seconds_since(t0);
  return {negative == 0 && formula == 0 && clamp == 0 && s < 1.0,
          fmt("1000 cases: %zu negative, %zu off-formula, %zu unclamped; %.3f s (limit 1 s)", negative, formula,
              clamp, s)};
}

Outcome muscle_round_trip() {
  const auto m = muscle::make_muscle(MuscleGroup::gastrocnemius);
  std::mt19937_64 rng(31337);
  const auto t0 = Clock::now();
  std::size_t over = 0, order = 0, errors = 0;
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const auto c = fixtures::achievable_target(rng, m);
    try {
      const auto r = muscle::reconstruct_ap_trains(m, c.target, c.lengths);
      const auto back = muscle::forward_simulate(m, r.trains, c.lengths, c.target.dt);
      const double e = fixtures::relative_rms(back.forces, c.target.forces);
      worst = std::max(worst, e);
      over += e > 0.05;
      order += !fixtures::size_principle_holds(r.trains);
    } catch (const std::exception&) {
      ++errors;
    }
  }
  const double s = seconds_since(t0);
  return {m.motor_units.size() == 50 && over == 0 && order == 0 && errors == 0 && s < 30.0,
          fmt("%zu MUs; worst RMS %.2f%% of peak (limit 5%%); %zu over, %zu size-order violations, %zu errors; %.2f s "
              "(limit 30 s)",
              m.motor_units.size(), 100 * worst, over, order, errors, s)};
}

Outcome twitch_dominance() {
  std::mt19937_64 rng(8);
  std::size_t violations = 0, points = 0;
  for (int d = 0; d < 10; ++d) {
    muscle::MotorUnit mu;
    mu.f0 = rng::uniform(rng, 0.05, 5.0);
    mu.t_peak = rng::uniform(rng, 20.0, 100.0);
    for (double t = std::exp(1.0) + 1e-3; t <= 1000.0; t += 0.25) {
      ++points;
      violations += !(muscle::twitch_single(mu, t) < muscle::twitch_winter(mu, t));
    }
    ++points;
    violations += !(muscle::twitch_single(mu, 1000.0) < muscle::twitch_winter(mu, 1000.0));
  }
  return {violations == 0, fmt("10 draws, %zu points in (e, 1000] ms, %zu violations", points, violations)};
}

Outcome phase_accuracy() {
  std::mt19937_64 rng(50);
  std::size_t correct = 0, total = 0, pathological = 0;
  for (int g = 0; g < 50; ++g) {
    std::optional<synthetic::SyntheticGait> gait;
    BodyParams body;
    while (!gait) {
      const auto shape = g % 2 ? synthetic::pathological_shape(rng) : synthetic::random_shape(rng);
      body = synthetic::random_body(rng);
      try {
        gait = synthetic::synthesize_gait(shape, body);
      } catch (const ValidationError&) {
      }
    }
    pathological += g % 2;
    const auto labels = kinematics::classify_phases(gait->cycles, body);
    for (std::size_t i = 0; i < kCycleLength; ++i) {
      ++total;
      correct += labels.labels[i] == gait->labels.labels[i];
    }
  }
  const double acc = 100.0 * static_cast<double>(correct) / static_cast<double>(total);
  return {correct == total, fmt("50 generated gaits (%zu pathological, random bodies): %zu/%zu phases correct (%.2f%%)",
                                pathological, correct, total, acc)};
}

Outcome mlp_checks() {
  auto net = detect::Mlp::production(17);
  std::mt19937_64 rng(3);
  std::vector<std::vector<double>> xs;
  std::vector<int> ys;
  for (int i = 0; i < 6; ++i) {
    std::vector<double> x(kCycleLength);
    for (double& v : x) v = rng::uniform(rng, -2, 2);
    xs.push_back(x);
    ys.push_back(i % 2);
  }
  const auto g = net.gradient(xs, ys);
  std::size_t probes = 0;
  double worst = 0.0;
  for (int attempt = 0; attempt < 500 && probes < 20; ++attempt) {
    const auto i = static_cast<std::size_t>(rng::below(rng, net.parameter_count()));
    if (std::abs(g[i]) < 1e-6) continue;
    const double w = net.parameter(i), h = 1e-5;
    net.set_parameter(i, w + h);
    const double up = net.loss(xs, ys);
    net.set_parameter(i, w - h);
    const double down = net.loss(xs, ys);
    net.set_parameter(i, w);
    const double fd = (up - down) / (2 * h);
    worst = std::max(worst, std::abs(g[i] - fd) / std::max(std::abs(g[i]), std::abs(fd)));
    ++probes;
  }

  const auto data = fixtures::separable_dataset(20, 2, 404);
  detect::CvOptions o;  // production widths
  o.folds = 5;
  o.fit.train.epochs = 40;
  const auto t0 = Clock::now();
  const auto cv = detect::person_cross_validate(data, o);
  const double s = seconds_since(t0);
  double lowest = 100.0;
  for (const auto& row : cv.rows) {
    for (double a : row.experiment_accuracy) lowest = std::min(lowest, a);
    lowest = std::min(lowest, row.ensemble);
  }
  return {probes >= 10 && worst <= 1e-4 && lowest >= 95.0 && cv.overall >= 95.0,
          fmt("%zu probes, worst relative error %.2e (limit 1e-4); person CV (20 persons, 5 folds, production "
              "architecture) overall %.2f%%, lowest view/ensemble %.2f%% (limit 95%%); %.2f s",
              probes, worst, cv.overall, lowest, s)};
}

std::string strip_generated_at(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.find("\"generated_at\"") == std::string::npos) out += line + "\n";
  }
  return out;
}

Outcome end_to_end_determinism() {
  const auto root = cli::scratch("acceptance_determinism");
  auto q = [](const fs::path& p) { return cli::quote(p.string()); };
  if (cli::run("synth --seed 12 --noise 0.5 --spike-rate 0.01 --out " + q(root / "synth")).exit != 0) return {false, "synth failed"};
  if (cli::run("synth-dataset --persons 10 --seed 12 --out " + q(root / "data")).exit != 0) return {false, "synth-dataset failed"};
  io::write_atomic(root / "train.json", R"({"schema": "gaitlab/v1", "train": {"epochs": 3}})");
  if (cli::run("train --config " + q(root / "train.json") + " --dataset " + q(root / "data") + " --out " + q(root / "models")).exit != 0) {
    return {false, "train failed"};
  }
  const std::string config = " --config " + q(root / "synth" / "config.json");
  const std::string caps = q(root / "synth" / "capture_ankle.json") + " " + q(root / "synth" / "capture_knee.json") +
                           " " + q(root / "synth" / "capture_hip.json");
  std::string reports[2];
  for (int run = 0; run < 2; ++run) {
    const fs::path dir = root / ("run" + std::to_string(run));
    const auto a = cli::run("preprocess" + config + " --out " + q(dir / "stage") + " " + caps);
    const auto b = cli::run("simulate" + config + " --in " + q(dir / "stage") + " --out " + q(dir / "stage"));
    const auto c = cli::run("classify" + config + " --in " + q(dir / "stage") + " --models " + q(root / "models") +
                            " --out " + q(dir / "report"));
    if (a.exit || b.exit || c.exit) return {false, fmt("run %d failed: %s%s%s", run, a.output.c_str(), b.output.c_str(), c.output.c_str())};
    reports[run] = io::read_text(dir / "report" / "report.json");
  }
  // Intermediate artifacts must match too.
  std::size_t differing = 0, files = 0;
  for (const auto& e : fs::directory_iterator(root / "run0" / "stage")) {
    ++files;
    differing += io::read_text(e.path()) != io::read_text(root / "run1" / "stage" / e.path().filename());
  }
  const bool same = strip_generated_at(reports[0]) == strip_generated_at(reports[1]);
  return {same && differing == 0 && reports[0].find("generated_at") != std::string::npos,
          fmt("report.json %s modulo generated_at; %zu/%zu intermediate files differ",
              same ? "byte-identical" : "DIFFERS", differing, files)};
}

Outcome tibialis_weakness() {
  const PipelineConfig cfg;
  const auto gait = synthetic::synthesize_gait({}, cfg.body);
  const auto scales = pipeline::force_scales(cfg);
  const auto forces = biomech::simulate_lower_body(gait.cycles, cfg.body, cfg.biomech);
  auto weak = forces;
  for (double& f : weak.at(MuscleGroup::tibialis_anterior).forces) f *= 0.2;
  auto total = [](const std::vector<muscle::HistogramBin>& h) {
    std::size_t n = 0;
    for (const auto& b : h) n += b.ap_count;
    return n;
  };
  const auto base = pipeline::stimulate(forces, gait.cycles, cfg, scales);
  const auto test = pipeline::stimulate(weak, gait.cycles, cfg, scales);
  const auto n0 = total(base.histograms.at(MuscleGroup::tibialis_anterior));
  const auto n1 = total(test.histograms.at(MuscleGroup::tibialis_anterior));
  const double change = n0 ? std::abs(static_cast<double>(n1) - static_cast<double>(n0)) / static_cast<double>(n0) : 0.0;
  return {n0 > 0 && change > 0.25,
          fmt("tibialis anterior APs: healthy %zu, force x0.2 %zu, change %.1f%% (limit > 25%%)", n0, n1, 100 * change)};
}

}  // namespace

int main() {
  const std::pair<const char*, std::function<Outcome()>> criteria[] = {
      {"equation unit suite", equation_suite},
      {"segment constants for the 80 kg reference body", table2_constants},
      {"Boots properties", boots_properties},
      {"muscle round trip", muscle_round_trip},
      {"single twitch below Winter twitch", twitch_dominance},
      {"gait-phase classification", phase_accuracy},
      {"MLP gradient check and person CV", mlp_checks},
      {"end-to-end determinism", end_to_end_determinism},
      {"tibialis anterior weakness changes stimulation", tibialis_weakness},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    std::printf("%s  %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
