#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "vwss/data.hpp"
#include "vwss/ensemble.hpp"
#include "vwss/series.hpp"

namespace vwss {

/// Network shape: layer_sizes runs input width, hidden widths..., 1. Hidden
/// layers are ReLU, the output is a sigmoid. l2_per_layer holds one ridge
/// coefficient per weight layer (empty means all zero). The seed drives
/// weight initialization.
struct MlpConfig {
  std::vector<std::size_t> layer_sizes;
  std::vector<double> l2_per_layer;
  std::uint64_t seed = 1;
};

/// Optimization schedule: Adam with the usual moment decay rates, a seeded
/// shuffle of the sample order each epoch, and the final short mini-batch
/// kept rather than dropped.
struct TrainConfig {
  std::size_t epochs = 1;
  double learning_rate = 0.001;
  std::size_t batch_size = 72;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t shuffle_seed = 1;
};

/// Feedforward binary classifier. Forward output is clamped to
/// [1e-7, 1 - 1e-7] so the cross-entropy never sees an exact 0 or 1; the
/// backward pass treats a clamped output as locally constant.
class Mlp {
 public:
  explicit Mlp(MlpConfig cfg);

  /// Rebuilds a network from explicit parameters (deserialization).
  static Mlp from_parameters(MlpConfig cfg,
                             std::vector<std::vector<double>> weights,
                             std::vector<std::vector<double>> biases);

  const MlpConfig& config() const { return cfg_; }
  std::size_t input_width() const { return cfg_.layer_sizes.front(); }
  std::size_t weight_layers() const { return cfg_.layer_sizes.size() - 1; }

  /// Probability for one sample of input_width features.
  double forward(const double* x, std::size_t width) const;

  /// Probabilities for every row of x.
  ProbabilitySeries forward_matrix(const FeatureMatrix& x) const;

  struct Gradients {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
  };

  /// Mean binary cross-entropy over the batch plus the L2 penalty
  /// sum_l lambda_l * ||W_l||^2 (the penalty is not divided by the batch
  /// size), together with its exact gradient.
  std::pair<double, Gradients> loss_and_gradient(const FeatureMatrix& x,
                                                 const LabelSeries& y) const;

  // Parameter storage, row-major (out x in) per layer. Mutable access is for
  // the optimizer and tests.
  const std::vector<std::vector<double>>& weights() const { return weights_; }
  const std::vector<std::vector<double>>& biases() const { return biases_; }
  std::vector<std::vector<double>>& mutable_weights() { return weights_; }
  std::vector<std::vector<double>>& mutable_biases() { return biases_; }

 private:
  Mlp(MlpConfig cfg, std::vector<std::vector<double>> weights,
      std::vector<std::vector<double>> biases);

  MlpConfig cfg_;
  std::vector<std::vector<double>> weights_;
  std::vector<std::vector<double>> biases_;
};

/// Everything a training run produces: the per-epoch train/valid forecast
/// snapshots (epoch indices 1..N), per-epoch forecasts on an optional test
/// split, and the final network.
struct TrainRun {
  std::vector<EpochSnapshot> snapshots;
  std::vector<SnapshotRow> test_rows;
  Mlp model;
};

/// Trains for exactly cfg.epochs epochs, recording forecasts after each.
/// Bit-deterministic for fixed seeds. Throws DegenerateDataError when the
/// training labels hold a single class and DivergenceError (naming the
/// epoch) when a mini-batch loss stops being finite.
TrainRun train_run(const FeatureMatrix& x_train, const LabelSeries& y_train,
                   const FeatureMatrix& x_valid, const FeatureMatrix* x_test,
                   const MlpConfig& mlp_cfg, const TrainConfig& train_cfg);

/// The snapshot-only view of train_run for callers without a test split.
std::vector<EpochSnapshot> train_with_snapshots(const FeatureMatrix& x_train,
                                                const LabelSeries& y_train,
                                                const FeatureMatrix& x_valid,
                                                const MlpConfig& mlp_cfg,
                                                const TrainConfig& train_cfg);

/// Versioned JSON model file: layer sizes, parameters, and the feature
/// standardization fitted alongside the network (if any).
void save_model_json(const std::filesystem::path& path, const Mlp& mlp,
                     const std::optional<Standardizer>& standardizer);

struct LoadedModel {
  Mlp model;
  std::optional<Standardizer> standardizer;
};

LoadedModel load_model_json(const std::filesystem::path& path);

}  // namespace vwss
