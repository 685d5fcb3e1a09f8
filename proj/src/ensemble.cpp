#include "gaitlab/ensemble.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <set>

#include "gaitlab/error.hpp"
#include "gaitlab/random.hpp"

namespace gaitlab::detect {

std::string_view to_string(View v) {
  switch (v) {
    case View::angles:
      return "angles";
    case View::forces:
      return "forces";
    case View::stimuli:
      return "stimuli";
  }
  return "?";
}

std::optional<View> parse_view(std::string_view name) {
  for (View v : kViews) {
    if (to_string(v) == name) return v;
  }
  return std::nullopt;
}

std::string_view to_string(Label l) { return l == Label::normal ? "normal" : "pathological"; }

std::optional<Label> parse_label(std::string_view name) {
  if (name == "normal") return Label::normal;
  if (name == "pathological") return Label::pathological;
  return std::nullopt;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::normal:
      return "normal";
    case Verdict::pathological:
      return "pathological";
    case Verdict::inconclusive:
      return "inconclusive";
  }
  return "?";
}

void Dataset::validate() const {
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    const std::string at = "samples[" + std::to_string(i) + "]";
    if (s.person_id.empty()) throw SchemaError(at + ".person_id", "must be non-empty");
    if (s.values.size() != kCycleLength) {
      throw SchemaError(at + ".values", "expected " + std::to_string(kCycleLength) + " values, got " +
                                            std::to_string(s.values.size()));
    }
    for (std::size_t j = 0; j < s.values.size(); ++j) {
      if (!std::isfinite(s.values[j])) {
        throw SchemaError(at + ".values[" + std::to_string(j) + "]", "must be finite");
      }
    }
  }
}

std::vector<std::string> Dataset::persons() const {
  std::set<std::string> ids;
  for (const auto& s : samples) ids.insert(s.person_id);
  return {ids.begin(), ids.end()};
}

Normalizer Normalizer::fit(std::span<const std::vector<double>> xs) {
  if (xs.empty()) throw ValidationError("normalizer: no samples");
  const std::size_t n = xs.front().size();
  Normalizer z;
  z.mean.assign(n, 0.0);
  z.scale.assign(n, 0.0);
  for (const auto& x : xs) {
    if (x.size() != n) throw ShapeError("normalizer: inconsistent sample length");
    for (std::size_t j = 0; j < n; ++j) z.mean[j] += x[j];
  }
  const double count = static_cast<double>(xs.size());
  for (double& m : z.mean) m /= count;
  for (const auto& x : xs) {
    for (std::size_t j = 0; j < n; ++j) z.scale[j] += (x[j] - z.mean[j]) * (x[j] - z.mean[j]);
  }
  for (double& s : z.scale) {
    const double sd = std::sqrt(s / count);
    s = sd > 1e-12 ? 1.0 / sd : 0.0;
  }
  return z;
}

std::vector<double> Normalizer::apply(std::span<const double> x) const {
  if (x.size() != mean.size()) throw ShapeError("normalizer: input length mismatch");
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = (x[j] - mean[j]) * scale[j];
  return out;
}

double ViewModel::predict(std::span<const double> values) const { return net.forward(normalizer.apply(values)); }

Verdict EnsembleVerdict::verdict() const {
  if (p_pathological > 0.5) return Verdict::pathological;
  if (p_pathological < 0.5) return Verdict::normal;
  return Verdict::inconclusive;
}

EnsembleVerdict combine_views(Joint joint, const std::array<double, 3>& per_view) {
  EnsembleVerdict v;
  v.joint = joint;
  v.per_view = per_view;
  v.p_pathological = (per_view[0] + per_view[1] + per_view[2]) / 3.0;
  return v;
}

EnsembleVerdict ensemble_classify(const JointModels& models, std::span<const double> angles,
                                  std::span<const double> forces, std::span<const double> stimuli) {
  const std::array<std::span<const double>, 3> inputs{angles, forces, stimuli};
  std::array<double, 3> p{};
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& vm = models.views[i];
    if (vm.view != kViews[i] || vm.joint != models.joint) {
      throw ModelError("view network bound to the wrong joint or view");
    }
    p[i] = vm.predict(inputs[i]);
  }
  return combine_views(models.joint, p);
}

ViewModel fit_view(Joint joint, View view, std::span<const Sample* const> samples, const FitOptions& opts) {
  std::vector<std::vector<double>> raw;
  std::vector<int> ys;
  for (const Sample* s : samples) {
    if (s->joint != joint || s->view != view) throw ValidationError("fit_view: mixed joints or views");
    raw.push_back(s->values);
    ys.push_back(s->label == Label::pathological ? 1 : 0);
  }
  ViewModel vm;
  vm.joint = joint;
  vm.view = view;
  vm.normalizer = Normalizer::fit(raw);
  std::vector<std::vector<double>> xs;
  xs.reserve(raw.size());
  for (const auto& r : raw) xs.push_back(vm.normalizer.apply(r));
  vm.net = Mlp::with_widths(opts.widths, opts.init_seed);
  train(vm.net, xs, ys, opts.train);
  return vm;
}

std::vector<std::vector<std::string>> partition_persons(std::vector<std::string> persons, std::size_t folds,
                                                        std::uint64_t seed) {
  std::sort(persons.begin(), persons.end());
  persons.erase(std::unique(persons.begin(), persons.end()), persons.end());
  if (folds < 2) throw ValidationError("cross-validation needs at least 2 folds");
  if (persons.size() < folds) {
    throw ValidationError("cross-validation: " + std::to_string(persons.size()) + " persons for " +
                          std::to_string(folds) + " folds");
  }
  std::mt19937_64 g(seed);
  rng::shuffle(persons, g);
  std::vector<std::vector<std::string>> out(folds);
  for (std::size_t i = 0; i < persons.size(); ++i) out[i % folds].push_back(persons[i]);
  for (auto& f : out) std::sort(f.begin(), f.end());
  return out;
}

void check_no_leakage(std::span<const std::string> train_persons, std::span<const std::string> test_persons) {
  const std::set<std::string> train(train_persons.begin(), train_persons.end());
  for (const auto& p : test_persons) {
    if (train.count(p)) throw ValidationError("person '" + p + "' appears in both training and test folds");
  }
}

CvReport person_cross_validate(const Dataset& data, const CvOptions& opts) {
  data.validate();
  CvReport report;
  for (Joint joint : kJoints) {
    std::set<std::string> ids;
    for (const auto& s : data.samples) {
      if (s.joint == joint) ids.insert(s.person_id);
    }
    if (ids.empty()) continue;
    const auto folds = partition_persons({ids.begin(), ids.end()}, opts.folds, opts.seed);

    CvRow row;
    row.joint = joint;
    row.persons = ids.size();
    std::array<std::size_t, 3> correct{};
    std::array<std::size_t, 3> total{};
    std::size_t ens_correct = 0;
    std::size_t ens_total = 0;

    for (std::size_t f = 0; f < folds.size(); ++f) {
      const std::set<std::string> test(folds[f].begin(), folds[f].end());
      std::vector<std::string> train_ids;
      for (const auto& id : ids) {
        if (!test.count(id)) train_ids.push_back(id);
      }
      check_no_leakage(train_ids, folds[f]);

      // Per-person, per-view test probabilities for the ensemble column.
      std::map<std::string, std::array<std::vector<double>, 3>> probs;
      std::map<std::string, Label> truth;
      for (std::size_t v = 0; v < 3; ++v) {
        std::vector<const Sample*> train_set;
        std::vector<const Sample*> test_set;
        for (const auto& s : data.samples) {
          if (s.joint != joint || s.view != kViews[v]) continue;
          (test.count(s.person_id) ? test_set : train_set).push_back(&s);
        }
        if (train_set.empty() || test_set.empty()) continue;
        const ViewModel vm = fit_view(joint, kViews[v], train_set, opts.fit);
        for (const Sample* s : test_set) {
          const double p = vm.predict(s->values);
          const Label guess = p > 0.5 ? Label::pathological : Label::normal;
          correct[v] += guess == s->label && p != 0.5 ? 1 : 0;
          total[v] += 1;
          probs[s->person_id][v].push_back(p);
          truth[s->person_id] = s->label;
        }
      }
      for (const auto& [person, per_view] : probs) {
        std::array<double, 3> mean{0.5, 0.5, 0.5};
        for (std::size_t v = 0; v < 3; ++v) {
          if (per_view[v].empty()) continue;
          double s = 0.0;
          for (double p : per_view[v]) s += p;
          mean[v] = s / static_cast<double>(per_view[v].size());
        }
        const auto verdict = combine_views(joint, mean).verdict();
        const Verdict expected = truth[person] == Label::pathological ? Verdict::pathological : Verdict::normal;
        ens_correct += verdict == expected ? 1 : 0;
        ens_total += 1;
      }
    }
    for (std::size_t v = 0; v < 3; ++v) {
      row.experiment_accuracy[v] = total[v] ? 100.0 * static_cast<double>(correct[v]) / static_cast<double>(total[v]) : 0.0;
    }
    row.average = (row.experiment_accuracy[0] + row.experiment_accuracy[1] + row.experiment_accuracy[2]) / 3.0;
    row.ensemble = ens_total ? 100.0 * static_cast<double>(ens_correct) / static_cast<double>(ens_total) : 0.0;
    report.rows.push_back(row);
  }
  if (report.rows.empty()) throw ValidationError("cross-validation: dataset holds no samples");
  double sum = 0.0;
  for (const auto& r : report.rows) sum += r.average;
  report.overall = sum / static_cast<double>(report.rows.size());
  return report;
}

}  // namespace gaitlab::detect
