#pragma once

#include <cstdint>
#include <vector>

#include "corenet/dataset.hpp"
#include "corenet/network.hpp"

namespace corenet {

struct TrainConfig {
  std::size_t epochs = 30;
  double learning_rate = 0.001;
  std::size_t batch_size = 300;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;

  void validate() const;
};

struct TrainLog {
  std::vector<double> epoch_loss;
  double train_accuracy = 0.0;
};

// Trains a bias-embedded ReLU network with Adam on softmax cross-entropy over
// the kTrain rows of `data`. Single-threaded and deterministic given the seed.
// `layer_sizes` must start with data.dim() and end with data.num_classes.
Network train(const std::vector<std::size_t>& layer_sizes, const Dataset& data,
              const TrainConfig& config, TrainLog* log = nullptr);

// He-initialized network with zero biases.
Network init_network(const std::vector<std::size_t>& layer_sizes, std::uint64_t seed);

double accuracy(const Network& net, const Dataset& data);

}  // namespace corenet
