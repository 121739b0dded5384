#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "typosearch/alphabet.hpp"
#include "typosearch/syngen.hpp"

namespace typosearch {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic>;
using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1>;

// Character-level classifier: one-hot characters -> stacked LSTM layers ->
// flattened top-layer sequence -> dense + ReLU (the embedding) -> logits.
struct ModelConfig {
  std::size_t max_seq_len = 32;
  std::size_t alphabet_size = 37;
  std::size_t hidden_size = 64;
  std::size_t num_layers = 2;
  std::size_t dense_size = 128;
  std::size_t num_classes = 1;
  std::size_t batch_size = 128;
  double learning_rate = 1e-3;
  std::size_t epochs = 50;
  std::uint64_t init_seed = 0;

  // s=69, h=256, dense=512, batch 128, 50 epochs, 23,349 classes.
  static ModelConfig full_scale();
  static ModelConfig desk_scale(std::size_t num_classes);

  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

// Adam moment constants.
inline constexpr double kAdamBeta1 = 0.9;
inline constexpr double kAdamBeta2 = 0.999;
inline constexpr double kAdamEpsilon = 1e-8;

// Gate blocks are stacked [input, forget, cell, output] along the rows.
struct LstmLayer {
  Matrix input_weights;      // 4h x input
  Matrix recurrent_weights;  // 4h x h
  Vector bias;               // 4h
};

struct ModelParams {
  ModelConfig config;
  std::vector<LstmLayer> lstm;
  Matrix dense_weights;   // dense x (s * h); columns ordered step-major
  Vector dense_bias;
  Matrix output_weights;  // classes x dense
  Vector output_bias;

  static ModelParams zeros(const ModelConfig& config);

  std::size_t parameter_count() const;
  bool all_finite() const;

  friend bool operator==(const ModelParams& a, const ModelParams& b);
};

struct TensorView {
  std::string name;
  double* data = nullptr;
  std::size_t rows = 0;
  std::size_t cols = 0;

  std::size_t size() const noexcept { return rows * cols; }
  std::span<double> values() const noexcept { return {data, size()}; }
};

// Every parameter tensor in a fixed order (layer by layer, then dense, then
// output).
std::vector<TensorView> tensors(ModelParams& params);

// Glorot-uniform weights, zero biases, forget-gate bias +1.
ModelParams init_params(const ModelConfig& config);

// Symbol indices for `batch` sequences, -1 marking padding. Sequences are
// truncated to max_seq_len.
struct EncodedBatch {
  std::size_t batch = 0;
  std::size_t seq_len = 0;
  std::size_t alphabet_size = 0;
  std::vector<std::int32_t> symbols;  // [b * seq_len + t]
  std::vector<std::size_t> labels;

  bool is_pad(std::size_t b, std::size_t t) const {
    return symbols[b * seq_len + t] < 0;
  }
  // Dense (seq_len x alphabet_size) view of one row.
  Matrix one_hot(std::size_t b) const;
};

// One-hot rows for canonical `text`, right-padded with zero rows to s.
Matrix encode(std::string_view text, const ModelConfig& config,
              const Alphabet& alphabet);

EncodedBatch encode_batch(std::span<const std::string> texts,
                          std::span<const std::size_t> labels,
                          const ModelConfig& config, const Alphabet& alphabet);

struct ForwardResult {
  Matrix logits;      // classes x batch
  Matrix embeddings;  // dense x batch, post-ReLU
};

ForwardResult forward(const ModelParams& params, const EncodedBatch& batch);

// Column-wise numerically stable softmax.
Matrix softmax(const Matrix& logits);

struct LossAndGradients {
  double loss = 0.0;
  ModelParams gradients;
};

// Mean cross-entropy over the batch and its exact gradient (backpropagation
// through every step of every layer). Throws Error(kTrainingDiverged) on a
// non-finite loss.
LossAndGradients loss_and_gradients(const ModelParams& params,
                                    const EncodedBatch& batch);

struct TrainingOptions {
  // Called after each epoch with (epoch index, mean training loss).
  std::function<void(std::size_t, double)> on_epoch;
};

struct TrainingResult {
  ModelParams params;
  std::vector<double> epoch_losses;
};

// Adam over seeded shuffled mini-batches. Deterministic for a given config.
TrainingResult train(std::span<const std::string> texts,
                     std::span<const std::size_t> labels,
                     const ModelConfig& config, const Alphabet& alphabet,
                     const TrainingOptions& options = {});
TrainingResult train(std::span<const SynthSample> dataset,
                     const ModelConfig& config, const Alphabet& alphabet,
                     const TrainingOptions& options = {});

// Embedding (post-ReLU dense activation) of a single canonical string.
Vector embed(const ModelParams& params, std::string_view text,
             const Alphabet& alphabet);

struct Checkpoint {
  ModelParams params;
  std::string alphabet;
  std::vector<double> loss_trace;
};

// Versioned header followed by little-endian float64 tensors with shapes.
void save_checkpoint(const Checkpoint& checkpoint, std::ostream& out);
std::string save_checkpoint_bytes(const Checkpoint& checkpoint);
void save_checkpoint_file(const Checkpoint& checkpoint,
                          const std::filesystem::path& path);
// Throws Error(kLoad) on any malformed, truncated or trailing input.
Checkpoint load_checkpoint(std::istream& in);
Checkpoint load_checkpoint_file(const std::filesystem::path& path);

// Digest of the serialized checkpoint bytes.
std::string checkpoint_digest(const Checkpoint& checkpoint);

}  // namespace typosearch
