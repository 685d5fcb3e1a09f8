// gaitlab command-line front end.
//
// Exit codes: 0 success, 1 other failure, 2 invalid input, 3 infeasible
// muscle reconstruction, 4 model error.

#include <chrono>
#include <csignal>
#include <ctime>
#include <iostream>

#include <CLI11.hpp>
#include <httplib.h>

#include "gaitlab/config.hpp"
#include "gaitlab/error.hpp"
#include "gaitlab/ingest.hpp"
#include "gaitlab/kernels.hpp"
#include "gaitlab/pipeline.hpp"

namespace {

using namespace gaitlab;
namespace fs = std::filesystem;

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::validation:
      return 2;
    case ErrorKind::infeasible:
      return 3;
    case ErrorKind::model:
      return 4;
  }
  return 1;
}

std::string utc_now() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

httplib::Server* g_server = nullptr;

void stop_server(int) {
  if (g_server) g_server->stop();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gaitlab: gait analysis from joint-orientation captures"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(pipeline::kVersion));

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out;
  auto common = [&](CLI::App* sub, bool needs_out) {
    sub->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Seed for every random draw");
    auto* o = sub->add_option("--out", out, "Output directory");
    if (needs_out) o->required();
  };

  auto* pre = app.add_subcommand("preprocess", "Captures to gait cycles, features and phase labels");
  std::vector<std::string> captures;
  pre->add_option("captures", captures, "RawCapture JSON files, one per placement")->required();
  common(pre, true);

  auto* sim = app.add_subcommand("simulate", "Gait cycles to muscle forces and AP trains");
  std::string in_dir;
  sim->add_option("--in", in_dir, "Directory written by preprocess")->required()->check(CLI::ExistingDirectory);
  common(sim, true);

  auto* cls = app.add_subcommand("classify", "Ensemble verdict per joint");
  std::string models_dir;
  cls->add_option("--in", in_dir, "Directory holding preprocess and simulate outputs")->required()->check(CLI::ExistingDirectory);
  cls->add_option("--models", models_dir, "Directory written by train")->required();
  common(cls, true);

  auto* trn = app.add_subcommand("train", "Person-based cross-validation and final models");
  std::string dataset;
  trn->add_option("--dataset", dataset, "Dataset JSON file or directory")->required();
  common(trn, true);

  auto* srv = app.add_subcommand("serve", "Capture ingest endpoint and static client");
  int port = 8080;
  std::string host = "127.0.0.1";
  std::string static_dir;
  std::string inbox = "inbox";
  srv->add_option("--port", port, "TCP port")->check(CLI::Range(0, 65535));
  srv->add_option("--host", host, "Bind address");
  srv->add_option("--static", static_dir, "Directory served at /");
  srv->add_option("--inbox", inbox, "Where accepted captures are stored");
  common(srv, false);

  auto* rep = app.add_subcommand("report", "Analysis report to plot-ready CSV files");
  std::string report_path;
  rep->add_option("report", report_path, "report.json written by classify")->required()->check(CLI::ExistingFile);
  common(rep, true);

  auto* syn = app.add_subcommand("synth", "Synthetic captures for all three placements");
  bool pathological = false;
  synthetic::CaptureOptions capture;
  syn->add_flag("--pathological", pathological, "Draw a pathological gait shape");
  syn->add_option("--strides", capture.strides, "Strides per capture");
  syn->add_option("--stride-s", capture.stride_s, "Stride duration, seconds");
  syn->add_option("--rate", capture.sample_rate, "Samples per second");
  syn->add_option("--noise", capture.noise_deg, "Gaussian noise, degrees");
  syn->add_option("--spike-rate", capture.spike_rate, "Outlier probability per sample");
  common(syn, true);

  auto* syd = app.add_subcommand("synth-dataset", "Synthetic labelled population for train");
  std::size_t persons = 40;
  syd->add_option("--persons", persons, "Number of persons");
  common(syd, true);

  CLI11_PARSE(app, argc, argv);

  try {
    PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : load_config(config_path);
    if (seed) {
      cfg.seed = *seed;
      cfg.train.seed = *seed;
    }

    if (*pre) {
      std::vector<fs::path> paths(captures.begin(), captures.end());
      pipeline::cmd_preprocess(paths, out, cfg);
    } else if (*sim) {
      pipeline::cmd_simulate(in_dir, out, cfg);
    } else if (*cls) {
      pipeline::cmd_classify(in_dir, models_dir, out, cfg, utc_now());
      std::cout << io::read_text(fs::path(out) / "summary.txt");
    } else if (*trn) {
      pipeline::cmd_train(dataset, out, cfg);
      std::cout << io::read_text(fs::path(out) / "cv_report.csv");
    } else if (*srv) {
      auto server = ingest::make_server(static_dir, inbox);
      g_server = server.get();
      std::signal(SIGINT, stop_server);
      std::signal(SIGTERM, stop_server);
      std::cerr << "gaitlab serve on http://" << host << ":" << port << " (kernels: "
                << kernels::to_string(kernels::active_isa()) << ")\n";
      if (!server->listen(host, port)) {
        std::cerr << "error: cannot listen on " << host << ":" << port << "\n";
        return 1;
      }
    } else if (*rep) {
      pipeline::cmd_report(report_path, out);
    } else if (*syn) {
      pipeline::cmd_synth(out, cfg, {pathological, capture});
    } else if (*syd) {
      pipeline::cmd_synth_dataset(out, persons, cfg);
    }
  } catch (const SchemaError& e) {
    std::cerr << "error: invalid input at " << e.path << ": " << e.detail << "\n";
    return 2;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
