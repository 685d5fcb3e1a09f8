#pragma once

// Dense feedforward network: ReLU hidden layers, one logistic output,
// trained by mini-batch SGD on binary cross-entropy.

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace gaitlab::detect {

inline constexpr std::array<std::size_t, 8> kProductionWidths{20, 160, 160, 160, 100, 80, 50, 1};

struct Layer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;  // out x in, row-major
  std::vector<double> biases;   // out
};

class Mlp {
 public:
  /// Production widths, He-uniform weights, zero biases.
  static Mlp production(std::uint64_t seed);
  /// Any widths ending in 1; used by tests and small experiments.
  static Mlp with_widths(std::vector<std::size_t> widths, std::uint64_t seed);
  static Mlp zeros(std::vector<std::size_t> widths);
  /// Rebuilds a network from stored parameters; validates shapes and finiteness.
  static Mlp from_layers(std::vector<Layer> layers, std::uint64_t seed);

  /// Probability of the positive class. Throws ShapeError on a wrong input length.
  double forward(std::span<const double> x) const;
  /// Pre-sigmoid output.
  double logit(std::span<const double> x) const;

  std::vector<std::size_t> widths() const;
  bool is_production() const;
  const std::vector<Layer>& layers() const { return layers_; }
  std::uint64_t seed() const { return seed_; }

  /// Flat parameter view: every layer's weights then biases, in layer order.
  std::size_t parameter_count() const;
  double parameter(std::size_t index) const;
  void set_parameter(std::size_t index, double value);

  /// Mean binary cross-entropy over the batch.
  double loss(std::span<const std::vector<double>> xs, std::span<const int> ys) const;
  /// Gradient of `loss` in flat parameter order.
  std::vector<double> gradient(std::span<const std::vector<double>> xs, std::span<const int> ys) const;

 private:
  std::vector<Layer> layers_;
  std::uint64_t seed_ = 0;

  double& parameter_ref(std::size_t index);
  void accumulate_gradient(std::span<const double> x, int y, std::vector<double>& grad) const;
};

struct TrainParams {
  double learning_rate = 0.01;
  std::size_t batch_size = 16;
  std::size_t epochs = 200;
  std::uint64_t seed = 1;  // shuffling
};

struct TrainResult {
  std::vector<double> loss_history;  // full-data loss after each epoch
};

/// Labels are 0 or 1. Throws ValidationError on an empty or single-class set.
TrainResult train(Mlp& net, std::span<const std::vector<double>> xs, std::span<const int> ys,
                  const TrainParams& params = {});

double logistic(double z);

}  // namespace gaitlab::detect
