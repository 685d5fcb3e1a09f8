#include "gaitlab/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

#include "gaitlab/error.hpp"
#include "gaitlab/kernels.hpp"
#include "gaitlab/random.hpp"

namespace gaitlab::detect {

namespace {

void check_widths(const std::vector<std::size_t>& widths) {
  if (widths.size() < 2) throw ShapeError("network needs at least an input and an output width");
  if (widths.back() != 1) throw ShapeError("network output width must be 1");
  for (std::size_t w : widths) {
    if (w == 0) throw ShapeError("network widths must be positive");
  }
}

std::vector<Layer> empty_layers(const std::vector<std::size_t>& widths) {
  check_widths(widths);
  std::vector<Layer> layers;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    Layer l;
    l.in = widths[i];
    l.out = widths[i + 1];
    l.weights.assign(l.in * l.out, 0.0);
    l.biases.assign(l.out, 0.0);
    layers.push_back(std::move(l));
  }
  return layers;
}

// Softplus written to avoid overflow for large |z|.
double softplus(double z) { return z > 0.0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

}  // namespace

double logistic(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

Mlp Mlp::production(std::uint64_t seed) {
  return with_widths({kProductionWidths.begin(), kProductionWidths.end()}, seed);
}

Mlp Mlp::with_widths(std::vector<std::size_t> widths, std::uint64_t seed) {
  Mlp net;
  net.layers_ = empty_layers(widths);
  net.seed_ = seed;
  std::mt19937_64 g(seed);
  for (auto& l : net.layers_) {
    const double limit = std::sqrt(6.0 / static_cast<double>(l.in));
    for (double& w : l.weights) w = rng::uniform(g, -limit, limit);
  }
  return net;
}

Mlp Mlp::zeros(std::vector<std::size_t> widths) {
  Mlp net;
  net.layers_ = empty_layers(widths);
  return net;
}

Mlp Mlp::from_layers(std::vector<Layer> layers, std::uint64_t seed) {
  if (layers.empty()) throw ModelError("network has no layers");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& l = layers[i];
    const std::string where = "layer " + std::to_string(i);
    if (l.in == 0 || l.out == 0 || l.weights.size() != l.in * l.out || l.biases.size() != l.out) {
      throw ModelError(where + ": inconsistent shape");
    }
    if (i > 0 && layers[i - 1].out != l.in) throw ModelError(where + ": width does not chain");
    const auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(l.weights.begin(), l.weights.end(), finite) ||
        !std::all_of(l.biases.begin(), l.biases.end(), finite)) {
      throw ModelError(where + ": non-finite parameter");
    }
  }
  if (layers.back().out != 1) throw ModelError("network output width must be 1");
  Mlp net;
  net.layers_ = std::move(layers);
  net.seed_ = seed;
  return net;
}

std::vector<std::size_t> Mlp::widths() const {
  std::vector<std::size_t> w;
  if (layers_.empty()) return w;
  w.push_back(layers_.front().in);
  for (const auto& l : layers_) w.push_back(l.out);
  return w;
}

bool Mlp::is_production() const {
  const auto w = widths();
  return std::equal(w.begin(), w.end(), kProductionWidths.begin(), kProductionWidths.end());
}

double Mlp::logit(std::span<const double> x) const {
  if (layers_.empty()) throw ModelError("empty network");
  if (x.size() != layers_.front().in) {
    throw ShapeError("network expects " + std::to_string(layers_.front().in) + " inputs, got " +
                     std::to_string(x.size()));
  }
  std::vector<double> a(x.begin(), x.end());
  std::vector<double> next;
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const auto& l = layers_[k];
    next.assign(l.out, 0.0);
    for (std::size_t j = 0; j < l.out; ++j) {
      next[j] = l.biases[j] + kernels::dot(std::span<const double>(l.weights.data() + j * l.in, l.in), a);
      if (k + 1 < layers_.size()) next[j] = std::max(next[j], 0.0);
    }
    a.swap(next);
  }
  return a[0];
}

// Large logits round to exactly 0 or 1 in double; keep the output inside the open interval.
double Mlp::forward(std::span<const double> x) const {
  return std::clamp(logistic(logit(x)), std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

std::size_t Mlp::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers_) n += l.weights.size() + l.biases.size();
  return n;
}

double& Mlp::parameter_ref(std::size_t index) {
  for (auto& l : layers_) {
    if (index < l.weights.size()) return l.weights[index];
    index -= l.weights.size();
    if (index < l.biases.size()) return l.biases[index];
    index -= l.biases.size();
  }
  throw DomainError("parameter index out of range");
}

double Mlp::parameter(std::size_t index) const { return const_cast<Mlp*>(this)->parameter_ref(index); }

void Mlp::set_parameter(std::size_t index, double value) { parameter_ref(index) = value; }

double Mlp::loss(std::span<const std::vector<double>> xs, std::span<const int> ys) const {
  if (xs.size() != ys.size() || xs.empty()) throw ShapeError("loss: inputs and labels must match and be non-empty");
  double total = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double z = logit(xs[i]);
    total += softplus(z) - static_cast<double>(ys[i]) * z;
  }
  return total / static_cast<double>(xs.size());
}

void Mlp::accumulate_gradient(std::span<const double> x, int y, std::vector<double>& grad) const {
  if (x.size() != layers_.front().in) throw ShapeError("network input length mismatch");
  // Forward pass keeping every activation.
  std::vector<std::vector<double>> act(layers_.size() + 1);
  act[0].assign(x.begin(), x.end());
  for (std::size_t k = 0; k < layers_.size(); ++k) {
    const auto& l = layers_[k];
    act[k + 1].assign(l.out, 0.0);
    for (std::size_t j = 0; j < l.out; ++j) {
      double v = l.biases[j] + kernels::dot(std::span<const double>(l.weights.data() + j * l.in, l.in), act[k]);
      if (k + 1 < layers_.size()) v = std::max(v, 0.0);
      act[k + 1][j] = v;
    }
  }

  std::vector<std::size_t> offset(layers_.size());
  for (std::size_t k = 0, o = 0; k < layers_.size(); ++k) {
    offset[k] = o;
    o += layers_[k].weights.size() + layers_[k].biases.size();
  }

  std::vector<double> delta{logistic(act.back()[0]) - static_cast<double>(y)};
  for (std::size_t k = layers_.size(); k-- > 0;) {
    const auto& l = layers_[k];
    double* gw = grad.data() + offset[k];
    double* gb = gw + l.weights.size();
    std::vector<double> back(l.in, 0.0);
    for (std::size_t j = 0; j < l.out; ++j) {
      if (delta[j] == 0.0) continue;
      kernels::axpy(delta[j], act[k], std::span<double>(gw + j * l.in, l.in));
      gb[j] += delta[j];
      if (k > 0) kernels::axpy(delta[j], std::span<const double>(l.weights.data() + j * l.in, l.in), back);
    }
    if (k > 0) {
      for (std::size_t i = 0; i < l.in; ++i) {
        if (act[k][i] <= 0.0) back[i] = 0.0;
      }
    }
    delta.swap(back);
  }
}

std::vector<double> Mlp::gradient(std::span<const std::vector<double>> xs, std::span<const int> ys) const {
  if (xs.size() != ys.size() || xs.empty()) throw ShapeError("gradient: inputs and labels must match and be non-empty");
  std::vector<double> grad(parameter_count(), 0.0);
  for (std::size_t i = 0; i < xs.size(); ++i) accumulate_gradient(xs[i], ys[i], grad);
  const double scale = 1.0 / static_cast<double>(xs.size());
  for (double& g : grad) g *= scale;
  return grad;
}

TrainResult train(Mlp& net, std::span<const std::vector<double>> xs, std::span<const int> ys,
                  const TrainParams& params) {
  if (xs.empty()) throw ValidationError("training set is empty");
  if (xs.size() != ys.size()) throw ShapeError("training inputs and labels differ in count");
  std::size_t positives = 0;
  for (int y : ys) {
    if (y != 0 && y != 1) throw ValidationError("labels must be 0 or 1");
    positives += static_cast<std::size_t>(y);
  }
  if (positives == 0 || positives == ys.size()) throw ValidationError("training set holds a single class");
  if (params.batch_size == 0) throw ValidationError("batch size must be positive");

  std::mt19937_64 g(params.seed);
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  TrainResult result;
  std::vector<std::vector<double>> bx;
  std::vector<int> by;
  for (std::size_t epoch = 0; epoch < params.epochs; ++epoch) {
    rng::shuffle(order, g);
    for (std::size_t start = 0; start < order.size(); start += params.batch_size) {
      const std::size_t end = std::min(start + params.batch_size, order.size());
      bx.clear();
      by.clear();
      for (std::size_t i = start; i < end; ++i) {
        bx.push_back(xs[order[i]]);
        by.push_back(ys[order[i]]);
      }
      if (params.learning_rate == 0.0) continue;
      const auto grad = net.gradient(bx, by);
      for (std::size_t p = 0; p < grad.size(); ++p) {
        net.set_parameter(p, net.parameter(p) - params.learning_rate * grad[p]);
      }
    }
    result.loss_history.push_back(net.loss(xs, ys));
  }
  return result;
}

}  // namespace gaitlab::detect
