#include "typosearch/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <iterator>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "binary_io.hpp"
#include "typosearch/digest.hpp"
#include "typosearch/error.hpp"
#include "typosearch/rng.hpp"

namespace typosearch {

// ---------------------------------------------------------------------------
// Configuration and parameters

ModelConfig ModelConfig::full_scale() {
  ModelConfig c;
  c.max_seq_len = 69;
  c.alphabet_size = 37;
  c.hidden_size = 256;
  c.num_layers = 2;
  c.dense_size = 512;
  c.num_classes = 23349;
  c.batch_size = 128;
  c.learning_rate = 1e-3;
  c.epochs = 50;
  return c;
}

ModelConfig ModelConfig::desk_scale(std::size_t num_classes) {
  ModelConfig c;
  c.max_seq_len = 32;
  c.alphabet_size = 37;
  c.hidden_size = 64;
  c.num_layers = 2;
  c.dense_size = 128;
  c.num_classes = num_classes;
  c.batch_size = 32;
  c.learning_rate = 1e-3;
  c.epochs = 15;
  return c;
}

void ModelConfig::validate() const {
  if (max_seq_len < 1 || alphabet_size < 1 || hidden_size < 1 ||
      num_layers < 1 || dense_size < 1 || num_classes < 1 || batch_size < 1) {
    throw Error(ErrorCode::kConfiguration, "model dimensions must all be >= 1");
  }
  if (!std::isfinite(learning_rate) || learning_rate < 0.0) {
    throw Error(ErrorCode::kConfiguration, "learning rate must be finite and >= 0");
  }
}

ModelParams ModelParams::zeros(const ModelConfig& config) {
  config.validate();
  const auto h = static_cast<Eigen::Index>(config.hidden_size);
  ModelParams p;
  p.config = config;
  for (std::size_t l = 0; l < config.num_layers; ++l) {
    const auto in = static_cast<Eigen::Index>(l == 0 ? config.alphabet_size
                                                     : config.hidden_size);
    p.lstm.push_back({Matrix::Zero(4 * h, in), Matrix::Zero(4 * h, h),
                      Vector::Zero(4 * h)});
  }
  const auto flat = static_cast<Eigen::Index>(config.max_seq_len * config.hidden_size);
  const auto dense = static_cast<Eigen::Index>(config.dense_size);
  const auto classes = static_cast<Eigen::Index>(config.num_classes);
  p.dense_weights = Matrix::Zero(dense, flat);
  p.dense_bias = Vector::Zero(dense);
  p.output_weights = Matrix::Zero(classes, dense);
  p.output_bias = Vector::Zero(classes);
  return p;
}

std::vector<TensorView> tensors(ModelParams& params) {
  std::vector<TensorView> out;
  auto add = [&](std::string name, auto& m) {
    out.push_back({std::move(name), m.data(), static_cast<std::size_t>(m.rows()),
                   static_cast<std::size_t>(m.cols())});
  };
  for (std::size_t l = 0; l < params.lstm.size(); ++l) {
    const std::string prefix = "lstm" + std::to_string(l) + ".";
    add(prefix + "input_weights", params.lstm[l].input_weights);
    add(prefix + "recurrent_weights", params.lstm[l].recurrent_weights);
    add(prefix + "bias", params.lstm[l].bias);
  }
  add("dense.weights", params.dense_weights);
  add("dense.bias", params.dense_bias);
  add("output.weights", params.output_weights);
  add("output.bias", params.output_bias);
  return out;
}

std::size_t ModelParams::parameter_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors(const_cast<ModelParams&>(*this))) n += t.size();
  return n;
}

bool ModelParams::all_finite() const {
  for (const auto& t : tensors(const_cast<ModelParams&>(*this))) {
    for (double v : t.values()) {
      if (!std::isfinite(v)) return false;
    }
  }
  return true;
}

bool operator==(const ModelParams& a, const ModelParams& b) {
  if (!(a.config == b.config)) return false;
  auto ta = tensors(const_cast<ModelParams&>(a));
  auto tb = tensors(const_cast<ModelParams&>(b));
  if (ta.size() != tb.size()) return false;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (ta[i].rows != tb[i].rows || ta[i].cols != tb[i].cols) return false;
    if (std::memcmp(ta[i].data, tb[i].data, ta[i].size() * sizeof(double)) != 0) {
      return false;
    }
  }
  return true;
}

ModelParams init_params(const ModelConfig& config) {
  ModelParams p = ModelParams::zeros(config);
  Rng rng(derive_seed(config.init_seed, "init"));
  auto glorot = [&](Matrix& m, std::size_t fan_in, std::size_t fan_out) {
    const double limit = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (Eigen::Index i = 0; i < m.size(); ++i) {
      m.data()[i] = (2.0 * uniform01(rng) - 1.0) * limit;
    }
  };
  const std::size_t h = config.hidden_size;
  for (std::size_t l = 0; l < p.lstm.size(); ++l) {
    auto& layer = p.lstm[l];
    glorot(layer.input_weights, static_cast<std::size_t>(layer.input_weights.cols()),
           4 * h);
    glorot(layer.recurrent_weights, h, 4 * h);
    layer.bias.segment(static_cast<Eigen::Index>(h), static_cast<Eigen::Index>(h))
        .setOnes();
  }
  glorot(p.dense_weights, config.max_seq_len * h, config.dense_size);
  glorot(p.output_weights, config.dense_size, config.num_classes);
  return p;
}

// ---------------------------------------------------------------------------
// Encoding

namespace {

void check_alphabet(const ModelConfig& config, const Alphabet& alphabet) {
  if (alphabet.size() != config.alphabet_size) {
    throw std::invalid_argument("alphabet has " + std::to_string(alphabet.size()) +
                                " symbols but the model expects " +
                                std::to_string(config.alphabet_size));
  }
}

void encode_symbols(std::string_view text, const ModelConfig& config,
                    const Alphabet& alphabet, std::int32_t* out) {
  const std::string canonical = alphabet.canonicalize(text);
  const std::size_t s = config.max_seq_len;
  const std::size_t n = std::min(canonical.size(), s);
  for (std::size_t t = 0; t < n; ++t) {
    out[t] = static_cast<std::int32_t>(*alphabet.index_of(canonical[t]));
  }
  std::fill(out + n, out + s, -1);
}

}  // namespace

Matrix EncodedBatch::one_hot(std::size_t b) const {
  Matrix m = Matrix::Zero(static_cast<Eigen::Index>(seq_len),
                          static_cast<Eigen::Index>(alphabet_size));
  for (std::size_t t = 0; t < seq_len; ++t) {
    const auto sym = symbols[b * seq_len + t];
    if (sym >= 0) m(static_cast<Eigen::Index>(t), sym) = 1.0;
  }
  return m;
}

Matrix encode(std::string_view text, const ModelConfig& config,
              const Alphabet& alphabet) {
  check_alphabet(config, alphabet);
  EncodedBatch batch;
  batch.batch = 1;
  batch.seq_len = config.max_seq_len;
  batch.alphabet_size = config.alphabet_size;
  batch.symbols.resize(config.max_seq_len);
  encode_symbols(text, config, alphabet, batch.symbols.data());
  return batch.one_hot(0);
}

EncodedBatch encode_batch(std::span<const std::string> texts,
                          std::span<const std::size_t> labels,
                          const ModelConfig& config, const Alphabet& alphabet) {
  check_alphabet(config, alphabet);
  if (!labels.empty() && labels.size() != texts.size()) {
    throw std::invalid_argument("encode_batch: texts and labels differ in size");
  }
  EncodedBatch batch;
  batch.batch = texts.size();
  batch.seq_len = config.max_seq_len;
  batch.alphabet_size = config.alphabet_size;
  batch.symbols.resize(texts.size() * config.max_seq_len);
  for (std::size_t b = 0; b < texts.size(); ++b) {
    encode_symbols(texts[b], config, alphabet,
                   batch.symbols.data() + b * config.max_seq_len);
  }
  batch.labels.assign(labels.begin(), labels.end());
  return batch;
}

// ---------------------------------------------------------------------------
// Forward / backward

namespace {

using StepView = Eigen::Map<Matrix, 0, Eigen::OuterStride<>>;
using ConstStepView = Eigen::Map<const Matrix, 0, Eigen::OuterStride<>>;

// Sequence matrices hold one column per (sample b, step t) at b * s + t, so a
// sample's top-layer outputs are contiguous (the flattened dense input) and a
// single step across the batch is a strided view.
StepView step_view(Matrix& m, std::size_t t, std::size_t s, std::size_t batch) {
  return StepView(m.data() + static_cast<Eigen::Index>(t) * m.rows(), m.rows(),
                  static_cast<Eigen::Index>(batch),
                  Eigen::OuterStride<>(m.rows() * static_cast<Eigen::Index>(s)));
}

ConstStepView step_view(const Matrix& m, std::size_t t, std::size_t s,
                        std::size_t batch) {
  return ConstStepView(m.data() + static_cast<Eigen::Index>(t) * m.rows(), m.rows(),
                       static_cast<Eigen::Index>(batch),
                       Eigen::OuterStride<>(m.rows() * static_cast<Eigen::Index>(s)));
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

struct LayerCache {
  Matrix gates;      // 4h x (B*s), activated [i f g o]
  Matrix cell;       // h x (B*s)
  Matrix cell_tanh;  // h x (B*s)
  Matrix hidden;     // h x (B*s)
};

struct ForwardCache {
  std::vector<LayerCache> layers;
  Matrix dense_pre;
  Matrix embeddings;
  Matrix logits;
};

void check_batch(const ModelParams& params, const EncodedBatch& batch) {
  const auto& c = params.config;
  if (batch.seq_len != c.max_seq_len || batch.alphabet_size != c.alphabet_size ||
      batch.symbols.size() != batch.batch * batch.seq_len || batch.batch == 0) {
    throw std::invalid_argument("encoded batch does not match the model config");
  }
  for (auto sym : batch.symbols) {
    if (sym >= static_cast<std::int32_t>(c.alphabet_size)) {
      throw std::invalid_argument("symbol outside the model alphabet");
    }
  }
}

void forward_pass(const ModelParams& params, const EncodedBatch& batch,
                  ForwardCache& cache) {
  check_batch(params, batch);
  const auto& cfg = params.config;
  const std::size_t s = cfg.max_seq_len;
  const std::size_t nb = batch.batch;
  const auto h = static_cast<Eigen::Index>(cfg.hidden_size);
  const auto cols = static_cast<Eigen::Index>(nb * s);

  cache.layers.resize(cfg.num_layers);
  for (std::size_t l = 0; l < cfg.num_layers; ++l) {
    const auto& layer = params.lstm[l];
    auto& lc = cache.layers[l];
    lc.gates.resize(4 * h, cols);
    if (l == 0) {
      // One-hot input: W x is a column lookup.
      lc.gates.colwise() = layer.bias;
      for (Eigen::Index col = 0; col < cols; ++col) {
        const auto sym = batch.symbols[static_cast<std::size_t>(col)];
        if (sym >= 0) lc.gates.col(col) += layer.input_weights.col(sym);
      }
    } else {
      lc.gates.noalias() = layer.input_weights * cache.layers[l - 1].hidden;
      lc.gates.colwise() += layer.bias;
    }
    lc.cell.resize(h, cols);
    lc.cell_tanh.resize(h, cols);
    lc.hidden.resize(h, cols);

    for (std::size_t t = 0; t < s; ++t) {
      StepView z = step_view(lc.gates, t, s, nb);
      if (t > 0) {
        z.noalias() += layer.recurrent_weights *
                       step_view(std::as_const(lc.hidden), t - 1, s, nb);
      }
      for (std::size_t b = 0; b < nb; ++b) {
        const auto col = static_cast<Eigen::Index>(b * s + t);
        double* g = lc.gates.col(col).data();
        double* c = lc.cell.col(col).data();
        double* ct = lc.cell_tanh.col(col).data();
        double* hv = lc.hidden.col(col).data();
        const double* c_prev = t > 0 ? lc.cell.col(col - 1).data() : nullptr;
        for (Eigen::Index j = 0; j < h; ++j) {
          const double i_g = sigmoid(g[j]);
          const double f_g = sigmoid(g[h + j]);
          const double c_g = std::tanh(g[2 * h + j]);
          const double o_g = sigmoid(g[3 * h + j]);
          g[j] = i_g;
          g[h + j] = f_g;
          g[2 * h + j] = c_g;
          g[3 * h + j] = o_g;
          const double cell = (c_prev ? f_g * c_prev[j] : 0.0) + i_g * c_g;
          c[j] = cell;
          ct[j] = std::tanh(cell);
          hv[j] = o_g * ct[j];
        }
      }
    }
  }

  const auto& top = cache.layers.back().hidden;
  Eigen::Map<const Matrix> flat(top.data(), h * static_cast<Eigen::Index>(s),
                                static_cast<Eigen::Index>(nb));
  cache.dense_pre.noalias() = params.dense_weights * flat;
  cache.dense_pre.colwise() += params.dense_bias;
  cache.embeddings = cache.dense_pre.cwiseMax(0.0);
  cache.logits.noalias() = params.output_weights * cache.embeddings;
  cache.logits.colwise() += params.output_bias;
}

// Softmax probabilities in place and the mean cross-entropy.
double softmax_cross_entropy(Matrix& logits, const std::vector<std::size_t>& labels) {
  double loss = 0.0;
  for (Eigen::Index b = 0; b < logits.cols(); ++b) {
    auto col = logits.col(b);
    const double mx = col.maxCoeff();
    const double lse = mx + std::log((col.array() - mx).exp().sum());
    loss += lse - col(static_cast<Eigen::Index>(labels[static_cast<std::size_t>(b)]));
    col = (col.array() - lse).exp().matrix();
  }
  return loss / static_cast<double>(logits.cols());
}

void backward_pass(const ModelParams& params, const EncodedBatch& batch,
                   ForwardCache& cache, ModelParams& grad) {
  const auto& cfg = params.config;
  const std::size_t s = cfg.max_seq_len;
  const std::size_t nb = batch.batch;
  const auto h = static_cast<Eigen::Index>(cfg.hidden_size);
  const auto cols = static_cast<Eigen::Index>(nb * s);
  const double inv_b = 1.0 / static_cast<double>(nb);

  // cache.logits holds softmax probabilities here.
  Matrix dlogits = cache.logits;
  for (std::size_t b = 0; b < nb; ++b) {
    dlogits(static_cast<Eigen::Index>(batch.labels[b]), static_cast<Eigen::Index>(b)) -= 1.0;
  }
  dlogits *= inv_b;

  grad.output_weights.noalias() = dlogits * cache.embeddings.transpose();
  grad.output_bias = dlogits.rowwise().sum();
  Matrix dpre = params.output_weights.transpose() * dlogits;
  dpre.array() *= (cache.dense_pre.array() > 0.0).cast<double>();

  const auto& top = cache.layers.back().hidden;
  Eigen::Map<const Matrix> flat(top.data(), h * static_cast<Eigen::Index>(s),
                                static_cast<Eigen::Index>(nb));
  grad.dense_weights.noalias() = dpre * flat.transpose();
  grad.dense_bias = dpre.rowwise().sum();

  Matrix dhidden(h, cols);
  {
    Eigen::Map<Matrix> dflat(dhidden.data(), h * static_cast<Eigen::Index>(s),
                             static_cast<Eigen::Index>(nb));
    dflat.noalias() = params.dense_weights.transpose() * dpre;
  }

  Matrix dz(4 * h, cols);
  Matrix dh_next(h, static_cast<Eigen::Index>(nb));
  Matrix dc_next(h, static_cast<Eigen::Index>(nb));
  Matrix h_prev(h, cols);
  for (std::size_t l = cfg.num_layers; l-- > 0;) {
    const auto& layer = params.lstm[l];
    auto& lg = grad.lstm[l];
    const auto& lc = cache.layers[l];
    dh_next.setZero();
    dc_next.setZero();

    for (std::size_t t = s; t-- > 0;) {
      for (std::size_t b = 0; b < nb; ++b) {
        const auto col = static_cast<Eigen::Index>(b * s + t);
        const double* g = lc.gates.col(col).data();
        const double* ct = lc.cell_tanh.col(col).data();
        const double* c_prev = t > 0 ? lc.cell.col(col - 1).data() : nullptr;
        const double* dh_above = dhidden.col(col).data();
        double* dhn = dh_next.col(static_cast<Eigen::Index>(b)).data();
        double* dcn = dc_next.col(static_cast<Eigen::Index>(b)).data();
        double* d = dz.col(col).data();
        for (Eigen::Index j = 0; j < h; ++j) {
          const double i_g = g[j];
          const double f_g = g[h + j];
          const double c_g = g[2 * h + j];
          const double o_g = g[3 * h + j];
          const double dh = dh_above[j] + dhn[j];
          const double dc = dh * o_g * (1.0 - ct[j] * ct[j]) + dcn[j];
          d[j] = dc * c_g * i_g * (1.0 - i_g);
          d[h + j] = (c_prev ? dc * c_prev[j] : 0.0) * f_g * (1.0 - f_g);
          d[2 * h + j] = dc * i_g * (1.0 - c_g * c_g);
          d[3 * h + j] = dh * ct[j] * o_g * (1.0 - o_g);
          dcn[j] = dc * f_g;
        }
      }
      if (t > 0) {
        dh_next.noalias() = layer.recurrent_weights.transpose() *
                            step_view(std::as_const(dz), t, s, nb);
      }
    }

    // h_prev(:, b*s + t) = hidden(:, b*s + t - 1), zero at t = 0.
    for (std::size_t b = 0; b < nb; ++b) {
      const auto base = static_cast<Eigen::Index>(b * s);
      h_prev.col(base).setZero();
      if (s > 1) {
        h_prev.middleCols(base + 1, static_cast<Eigen::Index>(s - 1)) =
            lc.hidden.middleCols(base, static_cast<Eigen::Index>(s - 1));
      }
    }
    lg.recurrent_weights.noalias() = dz * h_prev.transpose();
    lg.bias = dz.rowwise().sum();
    if (l == 0) {
      lg.input_weights.setZero();
      for (Eigen::Index col = 0; col < cols; ++col) {
        const auto sym = batch.symbols[static_cast<std::size_t>(col)];
        if (sym >= 0) lg.input_weights.col(sym) += dz.col(col);
      }
    } else {
      const auto& below = cache.layers[l - 1].hidden;
      lg.input_weights.noalias() = dz * below.transpose();
      dhidden.noalias() = layer.input_weights.transpose() * dz;
    }
  }
}

}  // namespace

Matrix softmax(const Matrix& logits) {
  Matrix out = logits;
  for (Eigen::Index b = 0; b < out.cols(); ++b) {
    auto col = out.col(b);
    const double mx = col.maxCoeff();
    col = (col.array() - mx).exp().matrix();
    col /= col.sum();
  }
  return out;
}

ForwardResult forward(const ModelParams& params, const EncodedBatch& batch) {
  ForwardCache cache;
  forward_pass(params, batch, cache);
  return {std::move(cache.logits), std::move(cache.embeddings)};
}

LossAndGradients loss_and_gradients(const ModelParams& params,
                                    const EncodedBatch& batch) {
  if (batch.labels.size() != batch.batch) {
    throw std::invalid_argument("loss_and_gradients: batch has no labels");
  }
  for (auto label : batch.labels) {
    if (label >= params.config.num_classes) {
      throw std::invalid_argument("label outside the model's classes");
    }
  }
  ForwardCache cache;
  forward_pass(params, batch, cache);
  LossAndGradients out;
  out.loss = softmax_cross_entropy(cache.logits, batch.labels);
  if (!std::isfinite(out.loss)) {
    throw Error(ErrorCode::kTrainingDiverged, "non-finite loss");
  }
  out.gradients = ModelParams::zeros(params.config);
  backward_pass(params, batch, cache, out.gradients);
  return out;
}

// ---------------------------------------------------------------------------
// Training

TrainingResult train(std::span<const std::string> texts,
                     std::span<const std::size_t> labels,
                     const ModelConfig& config, const Alphabet& alphabet,
                     const TrainingOptions& options) {
  config.validate();
  check_alphabet(config, alphabet);
  if (texts.empty()) throw Error(ErrorCode::kConfiguration, "empty training set");
  if (texts.size() != labels.size()) {
    throw std::invalid_argument("train: texts and labels differ in size");
  }
  for (auto label : labels) {
    if (label >= config.num_classes) {
      throw Error(ErrorCode::kConfiguration,
                  "label " + std::to_string(label) + " outside " +
                      std::to_string(config.num_classes) + " classes");
    }
  }

  const std::size_t n = texts.size();
  const std::size_t s = config.max_seq_len;
  EncodedBatch all = encode_batch(texts, labels, config, alphabet);

  TrainingResult result;
  result.params = init_params(config);
  ModelParams m = ModelParams::zeros(config);
  ModelParams v = ModelParams::zeros(config);
  auto p_tensors = tensors(result.params);
  auto m_tensors = tensors(m);
  auto v_tensors = tensors(v);

  Rng rng(derive_seed(config.init_seed, "shuffle"));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});

  EncodedBatch batch;
  batch.seq_len = s;
  batch.alphabet_size = config.alphabet_size;
  double beta1_pow = 1.0;
  double beta2_pow = 1.0;

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    shuffle(std::span<std::size_t>(order), rng);
    double epoch_loss = 0.0;
    std::size_t batch_index = 0;
    for (std::size_t start = 0; start < n; start += config.batch_size, ++batch_index) {
      const std::size_t count = std::min(config.batch_size, n - start);
      batch.batch = count;
      batch.symbols.resize(count * s);
      batch.labels.resize(count);
      for (std::size_t b = 0; b < count; ++b) {
        const std::size_t src = order[start + b];
        std::copy_n(all.symbols.begin() + static_cast<std::ptrdiff_t>(src * s), s,
                    batch.symbols.begin() + static_cast<std::ptrdiff_t>(b * s));
        batch.labels[b] = all.labels[src];
      }

      LossAndGradients lg;
      try {
        lg = loss_and_gradients(result.params, batch);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kTrainingDiverged) throw;
        throw Error(ErrorCode::kTrainingDiverged,
                    "training diverged at epoch " + std::to_string(epoch) +
                        ", batch " + std::to_string(batch_index));
      }
      epoch_loss += lg.loss * static_cast<double>(count);

      beta1_pow *= kAdamBeta1;
      beta2_pow *= kAdamBeta2;
      const double lr = config.learning_rate;
      auto g_tensors = tensors(lg.gradients);
      for (std::size_t k = 0; k < p_tensors.size(); ++k) {
        double* p = p_tensors[k].data;
        double* mk = m_tensors[k].data;
        double* vk = v_tensors[k].data;
        const double* g = g_tensors[k].data;
        const std::size_t size = p_tensors[k].size();
        for (std::size_t i = 0; i < size; ++i) {
          mk[i] = kAdamBeta1 * mk[i] + (1.0 - kAdamBeta1) * g[i];
          vk[i] = kAdamBeta2 * vk[i] + (1.0 - kAdamBeta2) * g[i] * g[i];
          const double m_hat = mk[i] / (1.0 - beta1_pow);
          const double v_hat = vk[i] / (1.0 - beta2_pow);
          p[i] -= lr * m_hat / (std::sqrt(v_hat) + kAdamEpsilon);
        }
      }
    }
    const double mean_loss = epoch_loss / static_cast<double>(n);
    result.epoch_losses.push_back(mean_loss);
    if (options.on_epoch) options.on_epoch(epoch, mean_loss);
  }
  return result;
}

TrainingResult train(std::span<const SynthSample> dataset,
                     const ModelConfig& config, const Alphabet& alphabet,
                     const TrainingOptions& options) {
  std::vector<std::string> texts;
  std::vector<std::size_t> labels;
  texts.reserve(dataset.size());
  labels.reserve(dataset.size());
  for (const auto& sample : dataset) {
    texts.push_back(sample.text);
    labels.push_back(sample.label);
  }
  return train(texts, labels, config, alphabet, options);
}

Vector embed(const ModelParams& params, std::string_view text,
             const Alphabet& alphabet) {
  const std::string one[1] = {std::string(text)};
  auto batch = encode_batch(one, {}, params.config, alphabet);
  ForwardCache cache;
  forward_pass(params, batch, cache);
  return cache.embeddings.col(0);
}

// ---------------------------------------------------------------------------
// Checkpoints

namespace {

constexpr std::string_view kCheckpointMagic = "TYPOCKPT";
constexpr std::uint32_t kCheckpointVersion = 1;

using detail::put_f64;
using detail::put_u32;
using detail::put_u64;
using detail::Reader;

nlohmann::json config_to_json(const ModelConfig& c) {
  return {{"max_seq_len", c.max_seq_len},     {"alphabet_size", c.alphabet_size},
          {"hidden_size", c.hidden_size},     {"num_layers", c.num_layers},
          {"dense_size", c.dense_size},       {"num_classes", c.num_classes},
          {"batch_size", c.batch_size},       {"learning_rate", c.learning_rate},
          {"epochs", c.epochs},               {"init_seed", c.init_seed}};
}

ModelConfig config_from_json(const nlohmann::json& j) {
  ModelConfig c;
  c.max_seq_len = j.at("max_seq_len").get<std::size_t>();
  c.alphabet_size = j.at("alphabet_size").get<std::size_t>();
  c.hidden_size = j.at("hidden_size").get<std::size_t>();
  c.num_layers = j.at("num_layers").get<std::size_t>();
  c.dense_size = j.at("dense_size").get<std::size_t>();
  c.num_classes = j.at("num_classes").get<std::size_t>();
  c.batch_size = j.at("batch_size").get<std::size_t>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.epochs = j.at("epochs").get<std::size_t>();
  c.init_seed = j.at("init_seed").get<std::uint64_t>();
  return c;
}

std::string loss_trace_digest(const std::vector<double>& trace) {
  std::string bytes;
  for (double v : trace) put_f64(bytes, v);
  return digest_hex(bytes);
}

}  // namespace

std::string save_checkpoint_bytes(const Checkpoint& checkpoint) {
  nlohmann::json header = {
      {"config", config_to_json(checkpoint.params.config)},
      {"alphabet", checkpoint.alphabet},
      {"epochs_trained", checkpoint.loss_trace.size()},
      {"loss_trace", checkpoint.loss_trace},
      {"loss_trace_digest", loss_trace_digest(checkpoint.loss_trace)},
      {"threads", 1},
  };
  const std::string header_text = header.dump();

  std::string out;
  out.append(kCheckpointMagic);
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(header_text.size()));
  out.append(header_text);

  auto views = tensors(const_cast<ModelParams&>(checkpoint.params));
  put_u32(out, static_cast<std::uint32_t>(views.size()));
  for (const auto& t : views) {
    put_u32(out, static_cast<std::uint32_t>(t.name.size()));
    out.append(t.name);
    put_u64(out, t.rows);
    put_u64(out, t.cols);
    for (double v : t.values()) put_f64(out, v);
  }
  return out;
}

void save_checkpoint(const Checkpoint& checkpoint, std::ostream& out) {
  const auto bytes = save_checkpoint_bytes(checkpoint);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

void save_checkpoint_file(const Checkpoint& checkpoint,
                          const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
  save_checkpoint(checkpoint, out);
  if (!out) throw Error(ErrorCode::kIo, "error writing " + path.string());
}

Checkpoint load_checkpoint(std::istream& in) {
  const std::string bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  Reader r(bytes, "checkpoint");
  if (r.take(kCheckpointMagic.size()) != kCheckpointMagic) {
    throw Error(ErrorCode::kLoad, "not a typosearch checkpoint");
  }
  if (auto version = r.u32(); version != kCheckpointVersion) {
    throw Error(ErrorCode::kLoad, "unsupported checkpoint version " +
                                      std::to_string(version));
  }
  const std::uint32_t header_len = r.u32();
  Checkpoint ckpt;
  try {
    auto header = nlohmann::json::parse(r.take(header_len));
    ckpt.params = ModelParams::zeros(config_from_json(header.at("config")));
    ckpt.alphabet = header.at("alphabet").get<std::string>();
    ckpt.loss_trace = header.at("loss_trace").get<std::vector<double>>();
    if (header.at("loss_trace_digest").get<std::string>() !=
        loss_trace_digest(ckpt.loss_trace)) {
      throw Error(ErrorCode::kLoad, "loss trace digest mismatch");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kLoad, std::string("checkpoint header: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kLoad) throw;
    throw Error(ErrorCode::kLoad, e.what());
  }

  auto views = tensors(ckpt.params);
  if (r.u32() != views.size()) throw Error(ErrorCode::kLoad, "tensor count mismatch");
  for (auto& t : views) {
    const auto name_len = r.u32();
    if (r.take(name_len) != t.name) {
      throw Error(ErrorCode::kLoad, "unexpected tensor, wanted " + t.name);
    }
    const auto rows = r.u64();
    const auto cols = r.u64();
    if (rows != t.rows || cols != t.cols) {
      throw Error(ErrorCode::kLoad, "shape mismatch for " + t.name);
    }
    for (double& v : t.values()) v = r.f64();
  }
  if (!r.done()) throw Error(ErrorCode::kLoad, "trailing bytes after checkpoint");
  if (!ckpt.params.all_finite()) throw Error(ErrorCode::kLoad, "non-finite parameters");
  return ckpt;
}

Checkpoint load_checkpoint_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return load_checkpoint(in);
}

std::string checkpoint_digest(const Checkpoint& checkpoint) {
  return digest_hex(save_checkpoint_bytes(checkpoint));
}

}  // namespace typosearch
