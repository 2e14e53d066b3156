// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vset Contributors

#include "vset/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "vset/error.hpp"
#include "vset/io_util.hpp"
#include "vset/persistence.hpp"
#include "vset/rng.hpp"

namespace vset {

std::size_t mlp_parameter_count(const std::vector<Eigen::Index>& dims) {
  if (dims.size() < 2) {
    throw Error(Errc::kInvalidDims, "need at least input and output dims");
  }
  std::size_t count = 0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    count += static_cast<std::size_t>(dims[l]) *
                 static_cast<std::size_t>(dims[l + 1]) +
             static_cast<std::size_t>(dims[l + 1]);
  }
  for (std::size_t l = 1; l + 1 < dims.size(); ++l) {
    count += 2 * static_cast<std::size_t>(dims[l]);
  }
  return count;
}

std::size_t MLPModel::parameter_count() const {
  return mlp_parameter_count(layer_dims);
}

MLPModel init_model(const std::vector<Eigen::Index>& dims,
                    std::uint64_t seed) {
  if (dims.size() < 2 || dims.back() != 1) {
    throw Error(Errc::kInvalidDims, "dims must end in a single output unit");
  }
  for (auto d : dims) {
    if (d < 1) throw Error(Errc::kInvalidDims, "all dims must be positive");
  }

  MLPModel model;
  model.layer_dims = dims;
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const Eigen::Index fan_in = dims[l];
    const Eigen::Index fan_out = dims[l + 1];
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (Eigen::Index r = 0; r < fan_out; ++r) {
      for (Eigen::Index c = 0; c < fan_in; ++c) {
        w(r, c) = rng.uniform(-bound, bound);
      }
    }
    model.weights.push_back(std::move(w));
    model.biases.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  for (std::size_t l = 1; l + 1 < dims.size(); ++l) {
    model.bn_scale.push_back(Eigen::VectorXd::Ones(dims[l]));
    model.bn_shift.push_back(Eigen::VectorXd::Zero(dims[l]));
    model.bn_running_mean.push_back(Eigen::VectorXd::Zero(dims[l]));
    model.bn_running_var.push_back(Eigen::VectorXd::Ones(dims[l]));
  }
  return model;
}

namespace {

Eigen::VectorXd sigmoid(const Eigen::VectorXd& z) {
  return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}

void check_input(const MLPModel& model,
                 const Eigen::Ref<const RowMatrixXd>& batch) {
  if (batch.cols() != model.layer_dims.front()) {
    throw Error(Errc::kShapeMismatch,
                "batch has " + std::to_string(batch.cols()) +
                    " columns, model expects " +
                    std::to_string(model.layer_dims.front()));
  }
}

}  // namespace

Eigen::VectorXd forward_eval(const MLPModel& model,
                             const Eigen::Ref<const RowMatrixXd>& batch) {
  check_input(model, batch);
  RowMatrixXd a = batch;
  const std::size_t hidden = model.hidden_layers();
  for (std::size_t l = 0; l < hidden; ++l) {
    RowMatrixXd z = (a * model.weights[l].transpose()).rowwise() +
                    model.biases[l].transpose();
    const auto inv_std =
        (model.bn_running_var[l].array() + kBnEpsilon).sqrt().inverse();
    z = (((z.rowwise() - model.bn_running_mean[l].transpose()).array()
              .rowwise() *
          (inv_std * model.bn_scale[l].array()).transpose())
             .rowwise() +
         model.bn_shift[l].array().transpose())
            .matrix();
    a = z.cwiseMax(0.0);
  }
  const Eigen::VectorXd logits =
      (a * model.weights.back().transpose()).col(0).array() +
      model.biases.back()(0);
  return sigmoid(logits);
}

Eigen::VectorXd forward_train(MLPModel& model,
                              const Eigen::Ref<const RowMatrixXd>& batch,
                              Rng* dropout_rng, ForwardCache& cache,
                              bool update_running) {
  check_input(model, batch);
  if (batch.rows() < 2) {
    throw Error(Errc::kShapeMismatch,
                "train-mode forward needs a batch of at least 2 rows");
  }
  const std::size_t hidden = model.hidden_layers();
  const auto m = static_cast<double>(batch.rows());

  cache.inputs.assign(hidden + 1, {});
  cache.z.assign(hidden, {});
  cache.mean.assign(hidden, {});
  cache.inv_std.assign(hidden, {});
  cache.xhat.assign(hidden, {});
  cache.relu_mask.assign(hidden, {});
  cache.dropout_mask.assign(hidden, {});

  cache.inputs[0] = batch;
  for (std::size_t l = 0; l < hidden; ++l) {
    const RowMatrixXd& a_in = cache.inputs[l];
    RowMatrixXd z = (a_in * model.weights[l].transpose()).rowwise() +
                    model.biases[l].transpose();

    Eigen::RowVectorXd mean = z.colwise().mean();
    RowMatrixXd centered = z.rowwise() - mean;
    Eigen::RowVectorXd var = centered.array().square().colwise().sum() / m;
    Eigen::RowVectorXd inv_std =
        (var.array() + kBnEpsilon).sqrt().inverse();

    RowMatrixXd xhat =
        (centered.array().rowwise() * inv_std.array()).matrix();
    RowMatrixXd y =
        ((xhat.array().rowwise() * model.bn_scale[l].transpose().array())
             .rowwise() +
         model.bn_shift[l].transpose().array())
            .matrix();

    if (update_running) {
      const double unbias = m > 1.0 ? m / (m - 1.0) : 1.0;
      model.bn_running_mean[l] = (1.0 - kBnMomentum) *
                                     model.bn_running_mean[l] +
                                 kBnMomentum * mean.transpose();
      model.bn_running_var[l] =
          (1.0 - kBnMomentum) * model.bn_running_var[l] +
          kBnMomentum * (var.transpose() * unbias);
    }

    Eigen::ArrayXXd relu_mask = (y.array() > 0.0).cast<double>();
    RowMatrixXd a = y.cwiseMax(0.0);

    Eigen::ArrayXXd drop_mask;
    if (dropout_rng != nullptr && model.dropout_rate > 0.0) {
      const double keep = 1.0 - model.dropout_rate;
      drop_mask.resize(a.rows(), a.cols());
      for (Eigen::Index r = 0; r < a.rows(); ++r) {
        for (Eigen::Index c = 0; c < a.cols(); ++c) {
          drop_mask(r, c) =
              dropout_rng->uniform() < keep ? 1.0 / keep : 0.0;
        }
      }
      a = (a.array() * drop_mask).matrix();
    } else {
      drop_mask = Eigen::ArrayXXd::Ones(a.rows(), a.cols());
    }

    cache.z[l] = std::move(z);
    cache.mean[l] = std::move(mean);
    cache.inv_std[l] = std::move(inv_std);
    cache.xhat[l] = std::move(xhat);
    cache.relu_mask[l] = std::move(relu_mask);
    cache.dropout_mask[l] = std::move(drop_mask);
    cache.inputs[l + 1] = std::move(a);
  }

  cache.logits = (cache.inputs[hidden] * model.weights.back().transpose())
                     .col(0)
                     .array() +
                 model.biases.back()(0);
  return sigmoid(cache.logits);
}

Eigen::VectorXd forward(MLPModel& model,
                        const Eigen::Ref<const RowMatrixXd>& batch,
                        Mode mode) {
  if (mode == Mode::kEval) {
    return forward_eval(model, batch);
  }
  ForwardCache cache;
  Rng rng(0);
  return forward_train(model, batch, &rng, cache, /*update_running=*/true);
}

BceResult weighted_bce_loss(const Eigen::VectorXd& probabilities,
                            const Eigen::VectorXd& labels,
                            double positive_class_weight) {
  const auto n = probabilities.size();
  if (n != labels.size() || n == 0) {
    throw Error(Errc::kShapeMismatch, "probabilities/labels size mismatch");
  }
  const double w = positive_class_weight;
  const Eigen::ArrayXd p =
      probabilities.array().min(1.0 - 1e-7).max(1e-7);
  const Eigen::ArrayXd y = labels.array();

  BceResult out;
  out.loss = -(w * y * p.log() + (1.0 - y) * (1.0 - p).log()).mean();
  // d/dz of the per-sample loss with p = sigma(z):
  //   -w*y*(1-p) + (1-y)*p, then the 1/n of the mean.
  out.dlogits = ((-w * y * (1.0 - p) + (1.0 - y) * p) /
                 static_cast<double>(n))
                    .matrix();
  return out;
}

Gradients backward(const MLPModel& model, const ForwardCache& cache,
                   const Eigen::VectorXd& dlogits) {
  const std::size_t hidden = model.hidden_layers();
  if (cache.inputs.size() != hidden + 1) {
    throw Error(Errc::kShapeMismatch, "forward cache does not match model");
  }
  Gradients g;
  g.weights.resize(model.weights.size());
  g.biases.resize(model.biases.size());
  g.bn_scale.resize(hidden);
  g.bn_shift.resize(hidden);

  // Output layer.
  const RowMatrixXd& a_last = cache.inputs[hidden];
  g.weights.back() = dlogits.transpose() * a_last;
  g.biases.back() = Eigen::VectorXd::Constant(1, dlogits.sum());
  RowMatrixXd da = dlogits * model.weights.back();  // m x h_last

  for (std::size_t l = hidden; l-- > 0;) {
    const auto m = static_cast<double>(cache.z[l].rows());
    // Dropout, then ReLU.
    Eigen::ArrayXXd dy =
        da.array() * cache.dropout_mask[l] * cache.relu_mask[l];

    // Batch-normalization backward (batch statistics included).
    const Eigen::ArrayXd gamma = model.bn_scale[l].array();
    g.bn_scale[l] = (dy * cache.xhat[l].array()).colwise().sum().transpose();
    g.bn_shift[l] = dy.colwise().sum().transpose();

    Eigen::ArrayXXd dxhat = dy.rowwise() * gamma.transpose();
    const Eigen::ArrayXXd centered =
        cache.z[l].array().rowwise() - cache.mean[l].array();
    const Eigen::ArrayXd inv_std = cache.inv_std[l].transpose().array();

    Eigen::ArrayXd dvar =
        (dxhat * centered).colwise().sum().transpose() *
        (-0.5) * inv_std.pow(3);
    Eigen::ArrayXd dmean =
        -(dxhat.colwise().sum().transpose().array() * inv_std) +
        dvar * (-2.0 / m) * centered.colwise().sum().transpose().array();

    Eigen::ArrayXXd dz =
        (dxhat.rowwise() * inv_std.transpose()) +
        (centered.rowwise() * (dvar * (2.0 / m)).transpose()) ;
    dz = dz.rowwise() + (dmean / m).transpose();

    const RowMatrixXd dzm = dz.matrix();
    g.weights[l] = dzm.transpose() * cache.inputs[l];
    g.biases[l] = dzm.colwise().sum().transpose();
    if (l > 0) {
      da = dzm * model.weights[l];
    }
  }
  return g;
}

TrainConfig train_config_from_json(const nlohmann::json& j) {
  TrainConfig c;
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.weight_decay = j.value("weight_decay", c.weight_decay);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.plateau_factor = j.value("plateau_factor", c.plateau_factor);
  c.plateau_patience = j.value("plateau_patience", c.plateau_patience);
  c.early_stop_patience = j.value("early_stop_patience", c.early_stop_patience);
  c.max_epochs = j.value("max_epochs", c.max_epochs);
  c.positive_class_weight =
      j.value("positive_class_weight", c.positive_class_weight);
  c.seed = j.value("seed", c.seed);
  return c;
}

nlohmann::json train_config_to_json(const TrainConfig& c) {
  return nlohmann::json{{"learning_rate", c.learning_rate},
                        {"weight_decay", c.weight_decay},
                        {"batch_size", c.batch_size},
                        {"plateau_factor", c.plateau_factor},
                        {"plateau_patience", c.plateau_patience},
                        {"early_stop_patience", c.early_stop_patience},
                        {"max_epochs", c.max_epochs},
                        {"positive_class_weight", c.positive_class_weight},
                        {"seed", c.seed}};
}

namespace {

struct AdamState {
  std::vector<Eigen::MatrixXd> mw, vw;
  std::vector<Eigen::VectorXd> mb, vb, ms, vs, mh, vh;
  long step = 0;

  explicit AdamState(const MLPModel& model) {
    for (const auto& w : model.weights) {
      mw.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
      vw.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
    }
    for (const auto& b : model.biases) {
      mb.push_back(Eigen::VectorXd::Zero(b.size()));
      vb.push_back(Eigen::VectorXd::Zero(b.size()));
    }
    for (const auto& s : model.bn_scale) {
      ms.push_back(Eigen::VectorXd::Zero(s.size()));
      vs.push_back(Eigen::VectorXd::Zero(s.size()));
      mh.push_back(Eigen::VectorXd::Zero(s.size()));
      vh.push_back(Eigen::VectorXd::Zero(s.size()));
    }
  }
};

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

template <typename T>
void adam_update(T& param, const T& grad, T& m, T& v, double lr,
                 double weight_decay, long step) {
  m = kAdamBeta1 * m + (1.0 - kAdamBeta1) * grad;
  v = (kAdamBeta2 * v.array() +
       (1.0 - kAdamBeta2) * grad.array().square())
          .matrix();
  const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(step));
  const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(step));
  // Decoupled decay scales with the learning rate, so lr = 0 is a no-op.
  param.array() -= lr * ((m.array() / bc1) /
                             ((v.array() / bc2).sqrt() + kAdamEps) +
                         weight_decay * param.array());
}

void apply_gradients(MLPModel& model, const Gradients& g, AdamState& state,
                     double lr, double weight_decay) {
  ++state.step;
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    adam_update(model.weights[l], g.weights[l], state.mw[l], state.vw[l], lr,
                weight_decay, state.step);
    adam_update(model.biases[l], g.biases[l], state.mb[l], state.vb[l], lr,
                weight_decay, state.step);
  }
  for (std::size_t l = 0; l < model.bn_scale.size(); ++l) {
    adam_update(model.bn_scale[l], g.bn_scale[l], state.ms[l], state.vs[l],
                lr, weight_decay, state.step);
    adam_update(model.bn_shift[l], g.bn_shift[l], state.mh[l], state.vh[l],
                lr, weight_decay, state.step);
  }
}

double evaluate_loss(const MLPModel& model,
                     const Eigen::Ref<const RowMatrixXd>& x,
                     const Eigen::VectorXd& y,
                     const std::vector<Eigen::Index>& rows, double pos_weight,
                     int batch_size) {
  double total = 0.0;
  std::size_t done = 0;
  while (done < rows.size()) {
    const std::size_t take =
        std::min<std::size_t>(static_cast<std::size_t>(batch_size),
                              rows.size() - done);
    RowMatrixXd xb(static_cast<Eigen::Index>(take), x.cols());
    Eigen::VectorXd yb(static_cast<Eigen::Index>(take));
    for (std::size_t i = 0; i < take; ++i) {
      xb.row(static_cast<Eigen::Index>(i)) = x.row(rows[done + i]);
      yb[static_cast<Eigen::Index>(i)] = y[rows[done + i]];
    }
    const Eigen::VectorXd probs = forward_eval(model, xb);
    total += weighted_bce_loss(probs, yb, pos_weight).loss *
             static_cast<double>(take);
    done += take;
  }
  return total / static_cast<double>(rows.size());
}

}  // namespace

TrainResult train(const MLPModel& initial,
                  const Eigen::Ref<const RowMatrixXd>& x,
                  const Eigen::VectorXd& y,
                  const std::vector<Eigen::Index>& train_rows,
                  const std::vector<Eigen::Index>& val_rows,
                  const TrainConfig& config) {
  if (train_rows.empty() || val_rows.empty()) {
    throw Error(Errc::kEmptySplit, "train and validation splits must be "
                                   "non-empty");
  }
  if (config.batch_size < 2 || config.max_epochs < 1 ||
      config.plateau_patience < 1 || config.early_stop_patience < 1 ||
      config.learning_rate < 0.0) {
    throw Error(Errc::kInvalidConfig, "bad train config");
  }

  double pos_weight = config.positive_class_weight;
  if (pos_weight <= 0.0) {
    std::size_t pos = 0;
    for (auto r : train_rows) pos += (y[r] > 0.5) ? 1u : 0u;
    const std::size_t neg = train_rows.size() - pos;
    if (pos == 0 || neg == 0) {
      throw Error(Errc::kDegenerateLabels,
                  "training split needs both classes for the automatic "
                  "class weight");
    }
    pos_weight = static_cast<double>(neg) / static_cast<double>(pos);
  }

  TrainResult result;
  result.positive_class_weight = pos_weight;
  MLPModel model = initial;

  AdamState adam(model);
  Rng shuffle_rng(config.seed);
  Rng dropout_rng(splitmix64(config.seed ^ 0x5D7A9F4B2C31E08DULL));

  double lr = config.learning_rate;
  double best_val = std::numeric_limits<double>::infinity();
  int bad_early = 0;
  int bad_plateau = 0;

  std::vector<Eigen::Index> order = train_rows;
  for (int epoch = 1; epoch <= config.max_epochs; ++epoch) {
    shuffle_rng.shuffle(order);

    double train_loss_sum = 0.0;
    std::size_t seen = 0;
    std::size_t pos = 0;
    while (pos < order.size()) {
      const std::size_t take =
          std::min<std::size_t>(static_cast<std::size_t>(config.batch_size),
                                order.size() - pos);
      if (take < 2) break;  // batch statistics need at least 2 rows
      RowMatrixXd xb(static_cast<Eigen::Index>(take), x.cols());
      Eigen::VectorXd yb(static_cast<Eigen::Index>(take));
      for (std::size_t i = 0; i < take; ++i) {
        xb.row(static_cast<Eigen::Index>(i)) = x.row(order[pos + i]);
        yb[static_cast<Eigen::Index>(i)] = y[order[pos + i]];
      }
      pos += take;

      ForwardCache cache;
      const Eigen::VectorXd probs =
          forward_train(model, xb, &dropout_rng, cache);
      BceResult bce = weighted_bce_loss(probs, yb, pos_weight);
      if (!std::isfinite(bce.loss)) {
        throw Error(Errc::kNonFiniteLoss,
                    "epoch " + std::to_string(epoch) + ", batch at row " +
                        std::to_string(pos - take));
      }
      Gradients grads = backward(model, cache, bce.dlogits);
      apply_gradients(model, grads, adam, lr, config.weight_decay);
      train_loss_sum += bce.loss * static_cast<double>(take);
      seen += take;
    }

    const double train_loss =
        seen > 0 ? train_loss_sum / static_cast<double>(seen) : 0.0;
    const double val_loss = evaluate_loss(model, x, y, val_rows, pos_weight,
                                          config.batch_size);
    if (!std::isfinite(val_loss)) {
      throw Error(Errc::kNonFiniteLoss,
                  "validation loss at epoch " + std::to_string(epoch));
    }
    result.history.push_back({epoch, train_loss, val_loss, lr});

    if (val_loss < best_val) {
      best_val = val_loss;
      result.best_epoch = epoch;
      result.model = model;
      bad_early = 0;
      bad_plateau = 0;
    } else {
      ++bad_early;
      ++bad_plateau;
      if (bad_plateau >= config.plateau_patience) {
        lr *= config.plateau_factor;
        bad_plateau = 0;
      }
      if (bad_early >= config.early_stop_patience) {
        break;
      }
    }
  }

  result.best_val_loss = best_val;
  if (result.best_epoch == 0) {
    result.model = model;  // no epoch improved; keep the last state
  }
  return result;
}

double tune_threshold(const Eigen::VectorXd& probabilities,
                      const Eigen::VectorXd& labels) {
  const auto n = probabilities.size();
  if (n != labels.size() || n == 0) {
    throw Error(Errc::kShapeMismatch, "probabilities/labels size mismatch");
  }
  double total_pos = labels.sum();
  if (total_pos == 0.0 || total_pos == static_cast<double>(n)) {
    throw Error(Errc::kDegenerateLabels,
                "threshold tuning needs both classes");
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    return probabilities[a] > probabilities[b];
  });

  // Candidate thresholds from low to high so that ties keep the lowest.
  // For a candidate t, predictions are {p >= t}; F1 follows from the
  // cumulative positive count at the matching cut.
  struct Cut {
    double threshold;
    double tp;
    double predicted;
  };
  std::vector<Cut> cuts;
  cuts.reserve(static_cast<std::size_t>(n) + 2);

  // Walk descending scores accumulating TP at each distinct value.
  double tp = 0.0;
  std::size_t i = 0;
  std::vector<std::pair<double, double>> distinct;  // (score, cum tp)
  std::vector<double> cum_count;
  while (i < order.size()) {
    const double s = probabilities[order[i]];
    std::size_t j = i;
    while (j < order.size() && probabilities[order[j]] == s) {
      tp += labels[order[j]];
      ++j;
    }
    distinct.emplace_back(s, tp);
    cum_count.push_back(static_cast<double>(j));
    i = j;
  }

  // threshold 0: everything predicted positive.
  cuts.push_back({0.0, total_pos, static_cast<double>(n)});
  // midpoints between consecutive distinct scores, ascending.
  for (std::size_t k = distinct.size(); k-- > 1;) {
    const double mid = 0.5 * (distinct[k].first + distinct[k - 1].first);
    cuts.push_back({mid, distinct[k - 1].second, cum_count[k - 1]});
  }
  // threshold 1: only items with p >= 1.
  {
    double tp1 = 0.0, n1 = 0.0;
    if (!distinct.empty() && distinct[0].first >= 1.0) {
      tp1 = distinct[0].second;
      n1 = cum_count[0];
    }
    cuts.push_back({1.0, tp1, n1});
  }

  double best_f1 = -1.0;
  double best_threshold = 0.0;
  for (const auto& cut : cuts) {
    const double precision = cut.predicted > 0 ? cut.tp / cut.predicted : 0.0;
    const double recall = cut.tp / total_pos;
    const double f1 = (precision + recall) > 0
                          ? 2.0 * precision * recall / (precision + recall)
                          : 0.0;
    if (f1 > best_f1) {  // strictly better only: ties keep lower threshold
      best_f1 = f1;
      best_threshold = cut.threshold;
    }
  }
  return best_threshold;
}

Predictions predict(const MLPModel& model, double threshold,
                    const Eigen::Ref<const RowMatrixXd>& x) {
  Predictions out;
  out.probabilities = forward_eval(model, x);
  out.decisions.resize(static_cast<std::size_t>(out.probabilities.size()));
  for (Eigen::Index i = 0; i < out.probabilities.size(); ++i) {
    out.decisions[static_cast<std::size_t>(i)] =
        out.probabilities[i] >= threshold ? 1 : 0;
  }
  return out;
}

void save_model(const std::filesystem::path& path, const MLPModel& model,
                const nlohmann::json& config_echo) {
  std::vector<double> payload;
  payload.reserve(model.parameter_count());
  auto push_matrix = [&](const Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) payload.push_back(m(r, c));
    }
  };
  auto push_vector = [&](const Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) payload.push_back(v[i]);
  };
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    push_matrix(model.weights[l]);
    push_vector(model.biases[l]);
  }
  for (std::size_t l = 0; l < model.bn_scale.size(); ++l) {
    push_vector(model.bn_scale[l]);
    push_vector(model.bn_shift[l]);
    push_vector(model.bn_running_mean[l]);
    push_vector(model.bn_running_var[l]);
  }

  nlohmann::json meta{
      {"layer_dims", model.layer_dims},
      {"dropout_rate", model.dropout_rate},
      {"threshold", model.threshold},
      {"config", config_echo},
      {"param_order",
       "per linear layer: weight row-major then bias; per hidden layer: "
       "bn scale, shift, running mean, running variance"}};
  write_artifact(path, "model", meta, doubles_to_bytes(payload));
}

MLPModel load_model(const std::filesystem::path& path) {
  Artifact art = read_artifact(path, "model");
  const auto dims =
      art.metadata.at("layer_dims").get<std::vector<Eigen::Index>>();
  MLPModel model = init_model(dims, 0);
  model.dropout_rate = art.metadata.at("dropout_rate").get<double>();
  model.threshold = art.metadata.at("threshold").get<double>();

  std::vector<double> values(art.payload.size() / sizeof(double));
  bytes_to_doubles(art.payload, values);
  std::size_t off = 0;
  auto pull_matrix = [&](Eigen::MatrixXd& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = values.at(off++);
    }
  };
  auto pull_vector = [&](Eigen::VectorXd& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = values.at(off++);
  };
  for (std::size_t l = 0; l < model.weights.size(); ++l) {
    pull_matrix(model.weights[l]);
    pull_vector(model.biases[l]);
  }
  for (std::size_t l = 0; l < model.bn_scale.size(); ++l) {
    pull_vector(model.bn_scale[l]);
    pull_vector(model.bn_shift[l]);
    pull_vector(model.bn_running_mean[l]);
    pull_vector(model.bn_running_var[l]);
  }
  if (off != values.size()) {
    throw Error(Errc::kIntegrityError,
                path.string() + ": parameter payload length mismatch");
  }
  return model;
}

}  // namespace vset
