// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vset/index.hpp"  // RowMatrixXd

namespace vset {

inline constexpr double kBnEpsilon = 1e-5;
inline constexpr double kBnMomentum = 0.1;

/// Fully-connected binary classifier: linear -> batchnorm -> ReLU ->
/// dropout per hidden layer, then linear -> logistic. All arithmetic is
/// double precision.
struct MLPModel {
  std::vector<Eigen::Index> layer_dims;  // {in, h1, ..., 1}
  std::vector<Eigen::MatrixXd> weights;  // [l]: dims[l+1] x dims[l]
  std::vector<Eigen::VectorXd> biases;
  // Batch normalization, one per hidden layer.
  std::vector<Eigen::VectorXd> bn_scale;
  std::vector<Eigen::VectorXd> bn_shift;
  std::vector<Eigen::VectorXd> bn_running_mean;
  std::vector<Eigen::VectorXd> bn_running_var;
  double dropout_rate = 0.3;
  double threshold = 0.5;  // tuned decision threshold

  std::size_t hidden_layers() const { return bn_scale.size(); }
  std::size_t parameter_count() const;
};

/// Closed-form trainable parameter count:
/// sum(n_in*n_out + n_out) over linear layers + 2*n_hidden per hidden
/// layer for the normalization affine.
std::size_t mlp_parameter_count(const std::vector<Eigen::Index>& dims);

/// Uniform fan-in initialization (bound sqrt(6/fan_in)), zero biases,
/// identity normalization. Deterministic per seed.
MLPModel init_model(const std::vector<Eigen::Index>& dims,
                    std::uint64_t seed);

enum class Mode { kTrain, kEval };

struct ForwardCache {
  std::vector<RowMatrixXd> inputs;  // input to each linear layer
  std::vector<RowMatrixXd> z;       // pre-normalization linear outputs
  std::vector<Eigen::RowVectorXd> mean, inv_std;
  std::vector<RowMatrixXd> xhat;
  std::vector<Eigen::ArrayXXd> relu_mask;     // 1 where activation passed
  std::vector<Eigen::ArrayXXd> dropout_mask;  // 0 or 1/(1-p)
  Eigen::VectorXd logits;
};

class Rng;

/// Eval mode: running statistics, no dropout; deterministic.
Eigen::VectorXd forward_eval(const MLPModel& model,
                             const Eigen::Ref<const RowMatrixXd>& batch);

/// Train mode: batch statistics and inverted dropout. Pass a null rng to
/// disable dropout (gradient checking). Running statistics are updated
/// when update_running is set.
Eigen::VectorXd forward_train(MLPModel& model,
                              const Eigen::Ref<const RowMatrixXd>& batch,
                              Rng* dropout_rng, ForwardCache& cache,
                              bool update_running = true);

Eigen::VectorXd forward(MLPModel& model,
                        const Eigen::Ref<const RowMatrixXd>& batch, Mode mode);

struct BceResult {
  double loss = 0.0;
  Eigen::VectorXd dlogits;  // dL/dz, already mean-reduced over the batch
};

/// Mean over the batch of -[w*y*log p + (1-y)*log(1-p)], probabilities
/// clamped to [1e-7, 1-1e-7]; the gradient is computed in the logit
/// formulation.
BceResult weighted_bce_loss(const Eigen::VectorXd& probabilities,
                            const Eigen::VectorXd& labels,
                            double positive_class_weight);

struct Gradients {
  std::vector<Eigen::MatrixXd> weights;
  std::vector<Eigen::VectorXd> biases;
  std::vector<Eigen::VectorXd> bn_scale;
  std::vector<Eigen::VectorXd> bn_shift;
};

/// Exact analytic gradients, including the batch-statistics terms.
Gradients backward(const MLPModel& model, const ForwardCache& cache,
                   const Eigen::VectorXd& dlogits);

struct TrainConfig {
  double learning_rate = 3e-4;
  double weight_decay = 1e-4;  // decoupled
  int batch_size = 2048;
  double plateau_factor = 0.5;
  int plateau_patience = 2;
  int early_stop_patience = 5;
  int max_epochs = 100;
  // <= 0 selects (#negatives / #positives) on the training split.
  double positive_class_weight = 0.0;
  std::uint64_t seed = 0;
};

TrainConfig train_config_from_json(const nlohmann::json& j);
nlohmann::json train_config_to_json(const TrainConfig& c);

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double learning_rate = 0.0;
};

struct TrainResult {
  MLPModel model;  // parameters from the best-validation-loss epoch
  std::vector<EpochStats> history;
  double best_val_loss = 0.0;
  int best_epoch = 0;
  double positive_class_weight = 0.0;  // the value actually used
};

/// AdamW (beta 0.9/0.999, eps 1e-8) with decoupled weight decay, seeded
/// shuffling, ReduceLROnPlateau and early stopping on validation loss.
TrainResult train(const MLPModel& initial,
                  const Eigen::Ref<const RowMatrixXd>& x,
                  const Eigen::VectorXd& y,
                  const std::vector<Eigen::Index>& train_rows,
                  const std::vector<Eigen::Index>& val_rows,
                  const TrainConfig& config);

/// F1-maximizing threshold over candidate cuts (midpoints of consecutive
/// distinct scores plus 0 and 1); ties resolve to the lower threshold.
double tune_threshold(const Eigen::VectorXd& probabilities,
                      const Eigen::VectorXd& labels);

struct Predictions {
  Eigen::VectorXd probabilities;
  std::vector<char> decisions;  // probability >= threshold
};

Predictions predict(const MLPModel& model, double threshold,
                    const Eigen::Ref<const RowMatrixXd>& x);

void save_model(const std::filesystem::path& path, const MLPModel& model,
                const nlohmann::json& config_echo);
MLPModel load_model(const std::filesystem::path& path);

}  // namespace vset
