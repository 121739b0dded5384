#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "typosearch/model.hpp"

namespace typosearch::testing {

// The configuration the gradient check runs on: s=8, f=12, h=8, dense=16,
// five classes.
inline ModelConfig tiny_config() {
  ModelConfig c;
  c.max_seq_len = 8;
  c.alphabet_size = 12;
  c.hidden_size = 8;
  c.num_layers = 2;
  c.dense_size = 16;
  c.num_classes = 5;
  c.batch_size = 5;
  c.epochs = 1;
  // Chosen so no dense pre-activation lies near the ReLU kink; see
  // relu_margin().
  c.init_seed = 12;
  return c;
}

inline const Alphabet& tiny_alphabet() {
  static const Alphabet alphabet("abcdefghijk ");
  return alphabet;
}

// Five labelled strings covering padding, truncation and repeated symbols.
inline EncodedBatch tiny_batch() {
  const std::vector<std::string> texts = {"abc", "hijk ab", "kkaab", "a", "jihgfedcba"};
  const std::vector<std::size_t> labels = {0, 1, 2, 3, 4};
  return encode_batch(texts, labels, tiny_config(), tiny_alphabet());
}

// Smallest |pre-activation| of the dense ReLU over the batch. A central
// difference is only meaningful when this is well above the step size.
inline double relu_margin(ModelParams params, const EncodedBatch& batch) {
  constexpr double kShift = 1000.0;
  params.dense_bias.array() += kShift;
  const Matrix shifted = forward(params, batch).embeddings;
  return (shifted.array() - kShift).abs().minCoeff();
}

struct GradientCheckResult {
  double max_relative_error = 0.0;
  std::string worst_tensor;
  std::size_t worst_index = 0;
  double worst_analytic = 0.0;
  double worst_numeric = 0.0;
  std::size_t checked = 0;
};

// Compares every analytic partial derivative with a central finite
// difference of step `eps`. The relative error is
// |a - n| / max(|a|, |n|, floor), so parameters whose gradient is
// exactly zero (unused symbols) do not divide by zero.
inline GradientCheckResult gradient_check(ModelParams params, const EncodedBatch& batch,
                                          double eps = 1e-4, double floor = 1e-12) {
  auto analytic = loss_and_gradients(params, batch).gradients;
  auto grads = tensors(analytic);
  auto views = tensors(params);
  GradientCheckResult result;
  for (std::size_t t = 0; t < views.size(); ++t) {
    auto values = views[t].values();
    auto g = grads[t].values();
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + eps;
      const double plus = loss_and_gradients(params, batch).loss;
      values[i] = saved - eps;
      const double minus = loss_and_gradients(params, batch).loss;
      values[i] = saved;
      const double numeric = (plus - minus) / (2 * eps);
      const double rel = std::abs(g[i] - numeric) /
                         std::max({std::abs(g[i]), std::abs(numeric), floor});
      ++result.checked;
      if (rel > result.max_relative_error) {
        result.max_relative_error = rel;
        result.worst_tensor = views[t].name;
        result.worst_index = i;
        result.worst_analytic = g[i];
        result.worst_numeric = numeric;
      }
    }
  }
  return result;
}

}  // namespace typosearch::testing
