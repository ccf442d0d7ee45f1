#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cxr/imaging.hpp"

namespace cxr {

struct ConvBlockSpec {
  int filters = 8;
  int kernel_size = 3;  // odd; "same" zero padding

  bool operator==(const ConvBlockSpec&) const = default;
};

/// conv -> ReLU -> maxpool(2x2) per block, then flatten -> dense -> ReLU ->
/// dropout -> dense(1) -> sigmoid. dense_units == 0 drops the hidden layer,
/// leaving logistic regression on the flattened features.
struct ModelConfig {
  int input_side = 128;
  std::vector<ConvBlockSpec> conv_blocks = {{8, 3}, {16, 3}, {32, 3}};
  int dense_units = 64;
  double dropout_rate = 0.5;
  std::uint64_t seed = 1;

  /// Throws InvalidConfig.
  void validate() const;
};

struct TrainConfig {
  int epochs = 100;
  int batch_size = 16;
  double learning_rate = 0.01;
  int eval_every = 10;  // optimizer steps between evaluations
  std::uint64_t seed = 1;

  /// Throws InvalidConfig.
  void validate() const;
};

struct ConvLayout {
  int in_channels = 0;
  int out_channels = 0;
  int kernel = 0;
  int side = 0;  // input side; output side is side / 2 after pooling
  std::size_t weight_offset = 0;
  std::size_t bias_offset = 0;
};

struct DenseLayout {
  int inputs = 0;
  int outputs = 0;
  std::size_t weight_offset = 0;  // row-major [outputs][inputs]
  std::size_t bias_offset = 0;
};

/// All parameters live in one flat vector; the layout records where each
/// layer's tensors sit inside it.
class Model {
 public:
  explicit Model(ModelConfig cfg);

  const ModelConfig& config() const noexcept { return cfg_; }
  std::span<double> params() noexcept { return params_; }
  std::span<const double> params() const noexcept { return params_; }

  const std::vector<ConvLayout>& conv_layers() const noexcept { return conv_; }
  const std::optional<DenseLayout>& hidden() const noexcept { return hidden_; }
  const DenseLayout& head() const noexcept { return head_; }
  int flat_features() const noexcept { return flat_features_; }

  bool operator==(const Model& other) const { return params_ == other.params_; }

 private:
  ModelConfig cfg_;
  std::vector<ConvLayout> conv_;
  std::optional<DenseLayout> hidden_;
  DenseLayout head_;
  int flat_features_ = 0;
  std::vector<double> params_;
};

/// Fan-in scaled uniform init (+-sqrt(6 / fan_in)) for weights, zero biases.
Model build_model(const ModelConfig& cfg);

/// Inverted-dropout keep/scale factors, one vector of hidden units per sample:
/// each entry is 0 or 1 / (1 - rate).
struct DropoutMask {
  std::vector<std::vector<double>> scale;
};

DropoutMask sample_dropout(const Model& model, std::size_t batch_size, std::mt19937_64& rng);

/// Pre-sigmoid outputs. A null mask runs the inference path.
std::vector<double> forward_logits(const Model& model, std::span<const NormImage> batch,
                                   const DropoutMask* dropout = nullptr);

/// Probabilities strictly inside (0, 1).
std::vector<double> forward(const Model& model, std::span<const NormImage> batch,
                            const DropoutMask* dropout = nullptr);

inline constexpr double kProbClamp = 1e-12;

/// Mean binary cross-entropy with predictions clamped to [1e-12, 1 - 1e-12].
double bce_loss(std::span<const double> pred, std::span<const int> labels);

/// Fraction of items where (pred >= 0.5) equals the label.
double accuracy(std::span<const double> pred, std::span<const int> labels);

/// Loss of the batch and its exact gradient with respect to every parameter
/// (same layout as Model::params()).
double compute_gradients(const Model& model, std::span<const NormImage> batch,
                         std::span<const int> labels, const DropoutMask* dropout,
                         std::vector<double>& grad);

/// One plain SGD step. Returns the loss before the update. Throws
/// NonFiniteGradient, leaving the model untouched.
double backward_and_step(Model& model, std::span<const NormImage> batch,
                         std::span<const int> labels, double learning_rate,
                         const DropoutMask* dropout = nullptr);

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
};

/// Inference-mode loss and accuracy. Throws EmptyDataset.
Evaluation evaluate(const Model& model, std::span<const NormImage> images,
                    std::span<const int> labels);

struct TrainData {
  std::vector<NormImage> images;
  std::vector<int> labels;
};

struct RunPoint {
  std::int64_t step = 0;
  int epoch = 0;
  double train_loss = 0.0;
  double train_acc = 0.0;
  double val_loss = 0.0;
  double val_acc = 0.0;

  bool operator==(const RunPoint&) const = default;
};

struct RunLog {
  std::string run_id;
  std::string config_hash;
  std::vector<RunPoint> points;

  bool operator==(const RunLog&) const = default;
};

struct TrainResult {
  RunLog log;
  Model model;
};

/// Seeded mini-batch SGD. Training order is reshuffled every epoch and both
/// sets are evaluated after every eval_every-th step.
TrainResult train_model(const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                        const TrainData& train_set, const TrainData& val_set,
                        const std::string& run_id = "1");

RunLog train(const ModelConfig& model_cfg, const TrainConfig& train_cfg,
             const TrainData& train_set, const TrainData& val_set,
             const std::string& run_id = "1");

/// Canonical `key = value` text of both configs; the basis of config_hash.
std::string describe_config(const ModelConfig& model_cfg, const TrainConfig& train_cfg);
/// 16 hex digits of FNV-1a 64 over describe_config.
std::string config_hash(const ModelConfig& model_cfg, const TrainConfig& train_cfg);

/// `step,epoch,train_loss,train_acc,val_loss,val_acc`
void write_run_log_csv(const std::filesystem::path& path, const RunLog& log);
/// Run id is taken from a `run-<id>.csv` file name when present.
RunLog read_run_log_csv(const std::filesystem::path& path);

}  // namespace cxr
