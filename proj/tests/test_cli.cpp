#include <filesystem>

#include <doctest.h>

#include "cli_runner.hpp"
#include "gaitlab/io.hpp"

using gaitlab::io::json;
namespace fs = std::filesystem;
using cli::quote;

namespace {

std::string p(const fs::path& path) { return quote(path.string()); }

std::string captures(const fs::path& dir) {
  return p(dir / "capture_ankle.json") + " " + p(dir / "capture_knee.json") + " " + p(dir / "capture_hip.json");
}

bool empty_or_missing(const fs::path& dir) { return !fs::exists(dir) || fs::is_empty(dir); }

}  // namespace

TEST_CASE("usage errors") {
  CHECK(cli::run("").exit != 0);
  CHECK(cli::run("frobnicate").exit != 0);
  CHECK(cli::run("preprocess").exit != 0);
  const auto v = cli::run("--version");
  CHECK(v.exit == 0);
  CHECK(v.output.find("1.0.0") != std::string::npos);
}

TEST_CASE("full pipeline on synthetic captures") {
  const auto root = cli::scratch("cli_full");
  REQUIRE(cli::run("synth --seed 3 --strides 10 --out " + p(root / "synth")).exit == 0);
  for (const char* f : {"capture_ankle.json", "capture_knee.json", "capture_hip.json", "config.json", "truth.json"}) {
    CHECK(fs::is_regular_file(root / "synth" / f));
  }
  const std::string config = " --config " + p(root / "synth" / "config.json");

  auto r = cli::run("preprocess" + config + " --out " + p(root / "pre") + " " + captures(root / "synth"));
  REQUIRE_MESSAGE(r.exit == 0, r.output);
  for (const char* j : {"ankle", "knee", "hip"}) {
    const json c = gaitlab::io::read_json(root / "pre" / (std::string("cycle_") + j + ".json"));
    CHECK(c["angles"].size() == 20);
    CHECK(fs::is_regular_file(root / "pre" / (std::string("features_") + j + ".json")));
  }
  // Recovered phases equal the generator's labels.
  const json truth = gaitlab::io::read_json(root / "synth" / "truth.json");
  const json phases = gaitlab::io::read_json(root / "pre" / "phases.json");
  CHECK(phases["phases"] == truth["phases"]);

  r = cli::run("simulate" + config + " --in " + p(root / "pre") + " --out " + p(root / "pre"));
  REQUIRE_MESSAGE(r.exit == 0, r.output);
  CHECK(fs::is_regular_file(root / "pre" / "forces_gastrocnemius.json"));
  CHECK(fs::is_regular_file(root / "pre" / "aptrain_iliopsoas.json"));
  CHECK(fs::is_regular_file(root / "pre" / "histogram_quadriceps.csv"));

  REQUIRE(cli::run("synth-dataset --persons 10 --seed 2 --out " + p(root / "data")).exit == 0);
  gaitlab::io::write_atomic(root / "train.json",
                            R"({"schema": "gaitlab/v1", "cv_folds": 5, "train": {"epochs": 3}})");
  r = cli::run("train --config " + p(root / "train.json") + " --dataset " + p(root / "data") + " --out " +
               p(root / "models"));
  REQUIRE_MESSAGE(r.exit == 0, r.output);
  CHECK(r.output.rfind("joint,experiment_1", 0) == 0);
  CHECK(fs::is_regular_file(root / "models" / "cv_report.csv"));
  CHECK(fs::is_regular_file(root / "models" / "model_knee_stimuli.json"));

  r = cli::run("classify" + config + " --in " + p(root / "pre") + " --models " + p(root / "models") + " --out " +
               p(root / "out"));
  REQUIRE_MESSAGE(r.exit == 0, r.output);
  const json report = gaitlab::io::read_json(root / "out" / "report.json");
  CHECK(report["schema"] == "gaitlab/v1");
  CHECK(report.contains("generated_at"));
  CHECK(fs::is_regular_file(root / "out" / "summary.txt"));

  r = cli::run("report " + p(root / "out" / "report.json") + " --out " + p(root / "csv"));
  REQUIRE_MESSAGE(r.exit == 0, r.output);
  for (const char* f : {"angles.csv", "forces.csv", "histograms.csv", "verdicts.csv"}) {
    CHECK(fs::is_regular_file(root / "csv" / f));
  }
  CHECK(gaitlab::io::read_text(root / "csv" / "angles.csv").rfind("pct,", 0) == 0);
}

TEST_CASE("pathological synthetic gait runs through simulate") {
  const auto root = cli::scratch("cli_path");
  for (int seed = 1; seed <= 6; ++seed) {
    const auto dir = root / std::to_string(seed);
    REQUIRE(cli::run("synth --pathological --seed " + std::to_string(seed) + " --out " + p(dir)).exit == 0);
    const std::string config = " --config " + p(dir / "config.json");
    auto r = cli::run("preprocess" + config + " --out " + p(dir / "pre") + " " + captures(dir));
    REQUIRE_MESSAGE(r.exit == 0, r.output);
    r = cli::run("simulate" + config + " --in " + p(dir / "pre") + " --out " + p(dir / "sim"));
    CHECK_MESSAGE(r.exit == 0, r.output);
  }
}

TEST_CASE("corrupt JSON exits 2 with a diagnostic and writes nothing") {
  const auto root = cli::scratch("cli_corrupt");
  REQUIRE(cli::run("synth --out " + p(root / "synth")).exit == 0);
  gaitlab::io::write_atomic(root / "synth" / "capture_hip.json", "{\"schema\": \"gaitlab/v1\", ");
  const auto r = cli::run("preprocess --out " + p(root / "pre") + " " + captures(root / "synth"));
  CHECK(r.exit == 2);
  CHECK(r.output.find("capture_hip.json") != std::string::npos);
  CHECK(r.output.find("invalid JSON") != std::string::npos);
  CHECK(empty_or_missing(root / "pre"));
}

TEST_CASE("schema violations name the field") {
  const auto root = cli::scratch("cli_schema");
  REQUIRE(cli::run("synth --out " + p(root / "synth")).exit == 0);
  json doc = gaitlab::io::read_json(root / "synth" / "capture_knee.json");
  doc["samples"][3]["t"] = doc["samples"][2]["t"];
  gaitlab::io::write_atomic(root / "synth" / "capture_knee.json", doc.dump());
  const auto r = cli::run("preprocess --out " + p(root / "pre") + " " + captures(root / "synth"));
  CHECK(r.exit == 2);
  CHECK(r.output.find("samples[3].t") != std::string::npos);
  CHECK(empty_or_missing(root / "pre"));
}

TEST_CASE("too-short capture reports no steps") {
  const auto root = cli::scratch("cli_short");
  REQUIRE(cli::run("synth --strides 1 --stride-s 0.3 --out " + p(root / "synth")).exit == 0);
  const auto r = cli::run("preprocess --out " + p(root / "pre") + " " + p(root / "synth" / "capture_knee.json"));
  CHECK(r.exit == 2);
  CHECK(r.output.find("step") != std::string::npos);
  CHECK(empty_or_missing(root / "pre"));
}

TEST_CASE("missing models exit 4") {
  const auto root = cli::scratch("cli_models");
  REQUIRE(cli::run("synth --out " + p(root / "synth")).exit == 0);
  const std::string config = " --config " + p(root / "synth" / "config.json");
  REQUIRE(cli::run("preprocess" + config + " --out " + p(root / "pre") + " " + captures(root / "synth")).exit == 0);
  REQUIRE(cli::run("simulate" + config + " --in " + p(root / "pre") + " --out " + p(root / "pre")).exit == 0);
  fs::create_directories(root / "nomodels");
  const auto r = cli::run("classify --in " + p(root / "pre") + " --models " + p(root / "nomodels") + " --out " +
                          p(root / "out"));
  CHECK(r.exit == 4);
  CHECK(empty_or_missing(root / "out"));
}

TEST_CASE("bad config exits 2 with its field path") {
  const auto root = cli::scratch("cli_config");
  gaitlab::io::write_atomic(root / "c.json", R"({"schema": "gaitlab/v1", "body": {"weight": 80}})");
  const auto r = cli::run("synth --config " + p(root / "c.json") + " --out " + p(root / "o"));
  CHECK(r.exit == 2);
  CHECK(r.output.find("body.weight") != std::string::npos);
  CHECK(empty_or_missing(root / "o"));
}

TEST_CASE("simulate rejects a missing cycle") {
  const auto root = cli::scratch("cli_missing");
  fs::create_directories(root / "pre");
  const auto r = cli::run("simulate --in " + p(root / "pre") + " --out " + p(root / "sim"));
  CHECK(r.exit == 2);
  CHECK(r.output.find("cycle_") != std::string::npos);
  CHECK(empty_or_missing(root / "sim"));
}
