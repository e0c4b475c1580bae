#include "corenet/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "corenet/error.hpp"
#include "corenet/rng.hpp"

namespace corenet {

void TrainConfig::validate() const {
  if (epochs < 1) throw Error(ErrorKind::kInvalidArgument, "train: epochs must be >= 1");
  if (!(learning_rate > 0.0)) {
    throw Error(ErrorKind::kInvalidArgument, "train: learning rate must be positive");
  }
  if (batch_size < 1) throw Error(ErrorKind::kInvalidArgument, "train: batch size must be >= 1");
}

Network init_network(const std::vector<std::size_t>& layer_sizes, std::uint64_t seed) {
  if (layer_sizes.size() < 2) {
    throw Error(ErrorKind::kInvalidArgument, "init_network: at least two layers required");
  }
  RngStream rng(seed, StreamId{.purpose = 0x1417});
  std::vector<WeightMatrix> weights;
  for (std::size_t k = 0; k + 1 < layer_sizes.size(); ++k) {
    const std::size_t fan_in = layer_sizes[k];
    DenseMatrix w(layer_sizes[k + 1], fan_in + 1);
    const double scale = std::sqrt(2.0 / static_cast<double>(fan_in));
    for (std::size_t i = 0; i < w.rows(); ++i) {
      for (std::size_t j = 0; j < fan_in; ++j) w(i, j) = scale * rng.normal();
    }
    weights.emplace_back(std::move(w));
  }
  return Network(layer_sizes, std::move(weights), true);
}

double accuracy(const Network& net, const Dataset& data) {
  if (data.size() == 0) throw Error(ErrorKind::kInvalidArgument, "accuracy: empty data set");
  std::size_t correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    if (static_cast<int>(predict(net, data.point(i))) == data.labels[i]) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

namespace {

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
};

}  // namespace

Network train(const std::vector<std::size_t>& layer_sizes, const Dataset& data,
              const TrainConfig& config, TrainLog* log) {
  config.validate();
  if (layer_sizes.size() < 2 || layer_sizes.front() != data.dim() ||
      layer_sizes.back() != static_cast<std::size_t>(data.num_classes)) {
    throw Error(ErrorKind::kInvalidArgument,
                "train: architecture must start at the feature dimension and end at the class "
                "count");
  }
  const std::vector<std::size_t> train_rows = data.indices_of(Split::kTrain);
  if (train_rows.empty()) throw Error(ErrorKind::kInsufficientData, "train: empty train split");

  const Network init = init_network(layer_sizes, config.seed);
  std::vector<DenseMatrix> w;
  for (const auto& m : init.weights()) w.push_back(m.to_dense());
  const std::size_t layers = w.size();

  std::vector<DenseMatrix> grad;
  std::vector<AdamState> adam;
  for (const auto& m : w) {
    grad.emplace_back(m.rows(), m.cols());
    adam.push_back({std::vector<double>(m.data().size(), 0.0),
                    std::vector<double>(m.data().size(), 0.0)});
  }

  RngStream rng(config.seed, StreamId{.purpose = 0x5a4f});
  std::vector<std::size_t> order = train_rows;
  std::vector<Vector> acts(layers + 1);
  std::vector<Vector> deltas(layers);
  std::uint64_t step = 0;
  TrainLog local_log;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng.below(i)]);
    double epoch_loss = 0.0;

    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      for (auto& g : grad) std::fill(g.data().begin(), g.data().end(), 0.0);

      for (std::size_t b = start; b < end; ++b) {
        const std::size_t idx = order[b];
        const auto x = data.point(idx);
        acts[0].assign(x.begin(), x.end());
        acts[0].push_back(1.0);
        for (std::size_t k = 0; k < layers; ++k) {
          Vector z = matvec(w[k], acts[k]);
          if (k + 1 < layers) {
            for (double& v : z) v = std::max(v, 0.0);
            z.push_back(1.0);
          }
          acts[k + 1] = std::move(z);
        }
        // Softmax cross-entropy on the logits.
        const Vector& logits = acts[layers];
        const double mx = *std::max_element(logits.begin(), logits.end());
        double denom = 0.0;
        for (double v : logits) denom += std::exp(v - mx);
        const auto y = static_cast<std::size_t>(data.labels[idx]);
        epoch_loss += -(logits[y] - mx - std::log(denom));

        Vector& out_delta = deltas[layers - 1];
        out_delta.resize(logits.size());
        for (std::size_t c = 0; c < logits.size(); ++c) {
          out_delta[c] = std::exp(logits[c] - mx) / denom - (c == y ? 1.0 : 0.0);
        }
        for (std::size_t k = layers; k-- > 0;) {
          const Vector& d = deltas[k];
          const Vector& a = acts[k];
          for (std::size_t i = 0; i < d.size(); ++i) {
            if (d[i] == 0.0) continue;
            auto gr = grad[k].row(i);
            for (std::size_t j = 0; j < a.size(); ++j) gr[j] += d[i] * a[j];
          }
          if (k == 0) break;
          Vector& prev = deltas[k - 1];
          prev.assign(w[k].cols() - 1, 0.0);
          for (std::size_t i = 0; i < d.size(); ++i) {
            const auto wr = w[k].row(i);
            for (std::size_t j = 0; j < prev.size(); ++j) prev[j] += wr[j] * d[i];
          }
          for (std::size_t j = 0; j < prev.size(); ++j) {
            if (a[j] <= 0.0) prev[j] = 0.0;
          }
        }
      }

      ++step;
      const double inv_batch = 1.0 / static_cast<double>(end - start);
      const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(step));
      for (std::size_t k = 0; k < layers; ++k) {
        auto& params = w[k].data();
        const auto& g = grad[k].data();
        auto& [m, v] = adam[k];
        for (std::size_t p = 0; p < params.size(); ++p) {
          const double gp = g[p] * inv_batch;
          m[p] = config.beta1 * m[p] + (1.0 - config.beta1) * gp;
          v[p] = config.beta2 * v[p] + (1.0 - config.beta2) * gp * gp;
          params[p] -= config.learning_rate * (m[p] / bc1) /
                       (std::sqrt(v[p] / bc2) + config.adam_epsilon);
        }
      }
    }

    epoch_loss /= static_cast<double>(order.size());
    if (!std::isfinite(epoch_loss)) {
      std::ostringstream msg;
      msg << "train: non-finite loss at epoch " << epoch + 1;
      throw Error(ErrorKind::kDivergence, msg.str());
    }
    local_log.epoch_loss.push_back(epoch_loss);
  }

  std::vector<WeightMatrix> weights;
  for (auto& m : w) weights.emplace_back(std::move(m));
  Network net(layer_sizes, std::move(weights), true);
  if (log != nullptr) {
    local_log.train_accuracy = accuracy(net, data.split(Split::kTrain));
    *log = std::move(local_log);
  }
  return net;
}

}  // namespace corenet
