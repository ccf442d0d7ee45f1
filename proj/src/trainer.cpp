#include "cxr/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/core.h>

#include "cxr/error.hpp"

namespace cxr {

namespace {

// Four independent partial sums; keeps the compiler free to vectorize
// without reassociating a single accumulator.
double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    s0 += a[i] * b[i];
    s1 += a[i + 1] * b[i + 1];
    s2 += a[i + 2] * b[i + 2];
    s3 += a[i + 3] * b[i + 3];
  }
  for (; i < n; ++i) s0 += a[i] * b[i];
  return (s0 + s1) + (s2 + s3);
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double open_unit(double p) {
  return std::clamp(p, std::numeric_limits<double>::min(), std::nextafter(1.0, 0.0));
}

struct ConvTrace {
  std::vector<double> input;  // in_channels x side x side
  std::vector<double> act;    // out_channels x side x side, after ReLU
  std::vector<double> pooled; // out_channels x side/2 x side/2
  std::vector<int> argmax;    // per pooled cell, index into act
};

// Per-sample activations kept for the backward pass.
struct Trace {
  std::vector<ConvTrace> conv;
  std::vector<double> flat;
  std::vector<double> hidden;   // after ReLU
  std::vector<double> dropped;  // hidden scaled by the dropout mask
  double logit = 0.0;
};

// Scratch buffers for the backward pass, sized once per call.
struct BackScratch {
  std::vector<double> d_pooled;
  std::vector<double> d_act;
  std::vector<double> d_input;
  std::vector<double> d_flat;
  std::vector<double> d_hidden;
};

void conv_forward(const ConvLayout& L, std::span<const double> params, const double* in,
                  double* out) {
  const int S = L.side;
  const std::size_t plane = static_cast<std::size_t>(S) * S;
  const int pad = L.kernel / 2;
  const double* W = params.data() + L.weight_offset;
  const double* B = params.data() + L.bias_offset;
  for (int oc = 0; oc < L.out_channels; ++oc) {
    double* dst_plane = out + oc * plane;
    std::fill(dst_plane, dst_plane + plane, B[oc]);
    for (int ic = 0; ic < L.in_channels; ++ic) {
      const double* src_plane = in + ic * plane;
      for (int ky = 0; ky < L.kernel; ++ky) {
        const int dy = ky - pad;
        const int y_lo = std::max(0, -dy);
        const int y_hi = std::min(S, S - dy);
        for (int kx = 0; kx < L.kernel; ++kx) {
          const int dx = kx - pad;
          const int x_lo = std::max(0, -dx);
          const int x_hi = std::min(S, S - dx);
          const double w = W[((static_cast<std::size_t>(oc) * L.in_channels + ic) * L.kernel + ky) * L.kernel + kx];
          for (int y = y_lo; y < y_hi; ++y) {
            const double* src = src_plane + static_cast<std::size_t>(y + dy) * S + dx;
            double* dst = dst_plane + static_cast<std::size_t>(y) * S;
            for (int x = x_lo; x < x_hi; ++x) dst[x] += w * src[x];
          }
        }
      }
    }
  }
  const std::size_t n = plane * L.out_channels;
  for (std::size_t i = 0; i < n; ++i) out[i] = out[i] > 0.0 ? out[i] : 0.0;
}

void maxpool_forward(int channels, int side, const double* act, double* pooled, int* argmax) {
  const int half = side / 2;
  for (int c = 0; c < channels; ++c) {
    const std::size_t base = static_cast<std::size_t>(c) * side * side;
    for (int py = 0; py < half; ++py) {
      for (int px = 0; px < half; ++px) {
        std::size_t best = base + static_cast<std::size_t>(2 * py) * side + 2 * px;
        const std::size_t cands[3] = {best + 1, best + side, best + side + 1};
        for (std::size_t idx : cands) {
          if (act[idx] > act[best]) best = idx;
        }
        const std::size_t o = (static_cast<std::size_t>(c) * half + py) * half + px;
        pooled[o] = act[best];
        argmax[o] = static_cast<int>(best);
      }
    }
  }
}

void prepare_trace(const Model& model, Trace& t) {
  const auto& layers = model.conv_layers();
  t.conv.resize(layers.size());
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& L = layers[i];
    const std::size_t plane = static_cast<std::size_t>(L.side) * L.side;
    const std::size_t pooled = plane / 4;
    t.conv[i].input.resize(plane * L.in_channels);
    t.conv[i].act.resize(plane * L.out_channels);
    t.conv[i].pooled.resize(pooled * L.out_channels);
    t.conv[i].argmax.resize(pooled * L.out_channels);
  }
  t.flat.resize(static_cast<std::size_t>(model.flat_features()));
  if (model.hidden()) {
    t.hidden.resize(static_cast<std::size_t>(model.hidden()->outputs));
    t.dropped.resize(t.hidden.size());
  }
}

void check_input(const Model& model, const NormImage& img) {
  const int side = model.config().input_side;
  if (img.width() != side || img.height() != side) {
    throw Error(ErrorKind::ShapeMismatch, fmt::format("expected {}x{} input, got {}x{}", side,
                                                      side, img.width(), img.height()));
  }
}

double forward_one(const Model& model, const NormImage& img, const std::vector<double>* scale,
                   Trace& t) {
  check_input(model, img);
  const auto params = model.params();
  const auto values = img.values();

  const auto& layers = model.conv_layers();
  if (layers.empty()) {
    std::copy(values.begin(), values.end(), t.flat.begin());
  } else {
    std::copy(values.begin(), values.end(), t.conv[0].input.begin());
  }
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const auto& L = layers[i];
    auto& ct = t.conv[i];
    conv_forward(L, params, ct.input.data(), ct.act.data());
    double* next = (i + 1 < layers.size()) ? t.conv[i + 1].input.data() : t.flat.data();
    maxpool_forward(L.out_channels, L.side, ct.act.data(), ct.pooled.data(), ct.argmax.data());
    std::copy(ct.pooled.begin(), ct.pooled.end(), next);
  }

  const double* features = t.flat.data();
  std::size_t n_features = t.flat.size();
  if (const auto& H = model.hidden()) {
    const double* W = params.data() + H->weight_offset;
    const double* B = params.data() + H->bias_offset;
    for (int j = 0; j < H->outputs; ++j) {
      const double pre = B[j] + dot(W + static_cast<std::size_t>(j) * H->inputs, t.flat.data(),
                                    static_cast<std::size_t>(H->inputs));
      t.hidden[j] = pre > 0.0 ? pre : 0.0;
      t.dropped[j] = scale ? t.hidden[j] * (*scale)[j] : t.hidden[j];
    }
    features = t.dropped.data();
    n_features = t.dropped.size();
  }
  const auto& O = model.head();
  t.logit = params[O.bias_offset] + dot(params.data() + O.weight_offset, features, n_features);
  return t.logit;
}

// Accumulates d(loss)/d(params) for one sample given d(loss)/d(logit).
void backward_one(const Model& model, const Trace& t, const std::vector<double>* scale,
                  double d_logit, std::span<double> grad, BackScratch& s) {
  const auto params = model.params();
  const auto& O = model.head();
  const auto& H = model.hidden();

  const std::vector<double>& head_in = H ? t.dropped : t.flat;
  axpy(d_logit, head_in.data(), grad.data() + O.weight_offset, head_in.size());
  grad[O.bias_offset] += d_logit;

  s.d_flat.assign(t.flat.size(), 0.0);
  if (H) {
    s.d_hidden.resize(t.hidden.size());
    const double* Wo = params.data() + O.weight_offset;
    for (std::size_t j = 0; j < t.hidden.size(); ++j) {
      double d = d_logit * Wo[j];
      if (scale) d *= (*scale)[j];
      s.d_hidden[j] = t.hidden[j] > 0.0 ? d : 0.0;
    }
    const double* W = params.data() + H->weight_offset;
    double* dW = grad.data() + H->weight_offset;
    for (int j = 0; j < H->outputs; ++j) {
      const double d = s.d_hidden[j];
      if (d == 0.0) continue;
      grad[H->bias_offset + j] += d;
      const std::size_t row = static_cast<std::size_t>(j) * H->inputs;
      axpy(d, t.flat.data(), dW + row, static_cast<std::size_t>(H->inputs));
      axpy(d, W + row, s.d_flat.data(), static_cast<std::size_t>(H->inputs));
    }
  } else {
    axpy(d_logit, params.data() + O.weight_offset, s.d_flat.data(), s.d_flat.size());
  }

  const auto& layers = model.conv_layers();
  s.d_pooled = s.d_flat;
  for (std::size_t li = layers.size(); li-- > 0;) {
    const auto& L = layers[li];
    const auto& ct = t.conv[li];
    const int S = L.side;
    const std::size_t plane = static_cast<std::size_t>(S) * S;
    const int pad = L.kernel / 2;

    // Unpool through the recorded argmax, then gate by ReLU.
    s.d_act.assign(ct.act.size(), 0.0);
    for (std::size_t o = 0; o < s.d_pooled.size(); ++o) {
      s.d_act[static_cast<std::size_t>(ct.argmax[o])] += s.d_pooled[o];
    }
    for (std::size_t i = 0; i < s.d_act.size(); ++i) {
      if (!(ct.act[i] > 0.0)) s.d_act[i] = 0.0;
    }

    const bool need_input_grad = li > 0;
    if (need_input_grad) s.d_input.assign(ct.input.size(), 0.0);
    const double* W = params.data() + L.weight_offset;
    double* dW = grad.data() + L.weight_offset;
    for (int oc = 0; oc < L.out_channels; ++oc) {
      const double* d_out = s.d_act.data() + oc * plane;
      double bias_sum = 0.0;
      for (std::size_t i = 0; i < plane; ++i) bias_sum += d_out[i];
      grad[L.bias_offset + oc] += bias_sum;
      for (int ic = 0; ic < L.in_channels; ++ic) {
        const double* in_plane = ct.input.data() + ic * plane;
        double* d_in_plane = need_input_grad ? s.d_input.data() + ic * plane : nullptr;
        for (int ky = 0; ky < L.kernel; ++ky) {
          const int dy = ky - pad;
          const int y_lo = std::max(0, -dy);
          const int y_hi = std::min(S, S - dy);
          for (int kx = 0; kx < L.kernel; ++kx) {
            const int dx = kx - pad;
            const int x_lo = std::max(0, -dx);
            const int x_hi = std::min(S, S - dx);
            const std::size_t widx =
                ((static_cast<std::size_t>(oc) * L.in_channels + ic) * L.kernel + ky) * L.kernel + kx;
            const double w = W[widx];
            double acc = 0.0;
            const auto span_len = static_cast<std::size_t>(x_hi - x_lo);
            for (int y = y_lo; y < y_hi; ++y) {
              const double* g = d_out + static_cast<std::size_t>(y) * S + x_lo;
              const std::size_t src_off = static_cast<std::size_t>(y + dy) * S + x_lo + dx;
              acc += dot(g, in_plane + src_off, span_len);
              if (d_in_plane) axpy(w, g, d_in_plane + src_off, span_len);
            }
            dW[widx] += acc;
          }
        }
      }
    }
    if (need_input_grad) s.d_pooled.swap(s.d_input);
  }
}

std::vector<const NormImage*> pointers(std::span<const NormImage> batch) {
  std::vector<const NormImage*> out;
  out.reserve(batch.size());
  for (const auto& img : batch) out.push_back(&img);
  return out;
}

const std::vector<double>* mask_for(const DropoutMask* dropout, std::size_t i) {
  if (dropout == nullptr || dropout->scale.empty()) return nullptr;
  return &dropout->scale.at(i);
}

std::vector<double> logits_of(const Model& model, std::span<const NormImage* const> batch,
                              const DropoutMask* dropout) {
  Trace t;
  prepare_trace(model, t);
  std::vector<double> out;
  out.reserve(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    out.push_back(forward_one(model, *batch[i], mask_for(dropout, i), t));
  }
  return out;
}

void check_lengths(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorKind::LengthMismatch, fmt::format("{} predictions vs {} labels", a, b));
  }
}

double gradients_of(const Model& model, std::span<const NormImage* const> batch,
                    std::span<const int> labels, const DropoutMask* dropout,
                    std::vector<double>& grad) {
  check_lengths(batch.size(), labels.size());
  if (batch.empty()) throw Error(ErrorKind::EmptyDataset, "empty batch");
  grad.assign(model.params().size(), 0.0);

  Trace t;
  prepare_trace(model, t);
  BackScratch scratch;
  std::vector<double> probs(batch.size());
  const double inv_n = 1.0 / static_cast<double>(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto* scale = mask_for(dropout, i);
    const double p = open_unit(sigmoid(forward_one(model, *batch[i], scale, t)));
    probs[i] = p;
    // d/dz of the clamped cross-entropy: zero where the clamp is active.
    const bool clamped = p < kProbClamp || p > 1.0 - kProbClamp;
    const double d_logit = clamped ? 0.0 : (p - labels[i]) * inv_n;
    backward_one(model, t, scale, d_logit, grad, scratch);
  }
  return bce_loss(probs, labels);
}

double step_with(Model& model, std::span<const NormImage* const> batch,
                 std::span<const int> labels, double learning_rate, const DropoutMask* dropout) {
  std::vector<double> grad;
  const double loss = gradients_of(model, batch, labels, dropout, grad);
  for (std::size_t i = 0; i < grad.size(); ++i) {
    if (!std::isfinite(grad[i])) {
      throw Error(ErrorKind::NonFiniteGradient, fmt::format("parameter {} has gradient {}", i, grad[i]));
    }
  }
  auto params = model.params();
  for (std::size_t i = 0; i < grad.size(); ++i) params[i] -= learning_rate * grad[i];
  return loss;
}

Evaluation evaluate_ptrs(const Model& model, std::span<const NormImage* const> images,
                         std::span<const int> labels) {
  if (images.empty()) throw Error(ErrorKind::EmptyDataset, "nothing to evaluate");
  check_lengths(images.size(), labels.size());
  std::vector<double> probs = logits_of(model, images, nullptr);
  for (double& p : probs) p = open_unit(sigmoid(p));
  return {bce_loss(probs, labels), accuracy(probs, labels)};
}

}  // namespace

void ModelConfig::validate() const {
  if (input_side < 1) throw Error(ErrorKind::InvalidConfig, "input_side must be >= 1");
  const long long divisor = 1LL << conv_blocks.size();
  if (input_side % divisor != 0) {
    throw Error(ErrorKind::InvalidConfig,
                fmt::format("input_side {} is not divisible by 2^{} = {}", input_side,
                            conv_blocks.size(), divisor));
  }
  for (const auto& b : conv_blocks) {
    if (b.filters < 1) throw Error(ErrorKind::InvalidConfig, "conv filters must be >= 1");
    if (b.kernel_size < 1 || b.kernel_size % 2 == 0) {
      throw Error(ErrorKind::InvalidConfig,
                  fmt::format("kernel size {} must be odd and positive", b.kernel_size));
    }
  }
  if (dense_units < 0) throw Error(ErrorKind::InvalidConfig, "dense_units must be >= 0");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0)) {
    throw Error(ErrorKind::InvalidConfig, fmt::format("dropout_rate {} not in [0,1)", dropout_rate));
  }
}

void TrainConfig::validate() const {
  if (epochs < 1) throw Error(ErrorKind::InvalidConfig, "epochs must be >= 1");
  if (batch_size < 1) throw Error(ErrorKind::InvalidConfig, "batch_size must be >= 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw Error(ErrorKind::InvalidConfig, "learning_rate must be positive");
  }
  if (eval_every < 1) throw Error(ErrorKind::InvalidConfig, "eval_every must be >= 1");
}

Model::Model(ModelConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  std::size_t offset = 0;
  int channels = 1;
  int side = cfg_.input_side;
  for (const auto& block : cfg_.conv_blocks) {
    ConvLayout L;
    L.in_channels = channels;
    L.out_channels = block.filters;
    L.kernel = block.kernel_size;
    L.side = side;
    L.weight_offset = offset;
    offset += static_cast<std::size_t>(L.out_channels) * L.in_channels * L.kernel * L.kernel;
    L.bias_offset = offset;
    offset += static_cast<std::size_t>(L.out_channels);
    conv_.push_back(L);
    channels = block.filters;
    side /= 2;
  }
  flat_features_ = channels * side * side;

  int head_inputs = flat_features_;
  if (cfg_.dense_units > 0) {
    DenseLayout H;
    H.inputs = flat_features_;
    H.outputs = cfg_.dense_units;
    H.weight_offset = offset;
    offset += static_cast<std::size_t>(H.inputs) * H.outputs;
    H.bias_offset = offset;
    offset += static_cast<std::size_t>(H.outputs);
    hidden_ = H;
    head_inputs = H.outputs;
  }
  head_.inputs = head_inputs;
  head_.outputs = 1;
  head_.weight_offset = offset;
  offset += static_cast<std::size_t>(head_inputs);
  head_.bias_offset = offset;
  offset += 1;
  params_.assign(offset, 0.0);
}

Model build_model(const ModelConfig& cfg) {
  Model model(cfg);
  std::mt19937_64 rng(cfg.seed);
  auto params = model.params();
  auto init = [&](std::size_t offset, std::size_t count, int fan_in) {
    const double limit = std::sqrt(6.0 / fan_in);
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (std::size_t i = 0; i < count; ++i) params[offset + i] = dist(rng);
  };
  for (const auto& L : model.conv_layers()) {
    init(L.weight_offset, L.bias_offset - L.weight_offset, L.in_channels * L.kernel * L.kernel);
  }
  if (const auto& H = model.hidden()) {
    init(H->weight_offset, H->bias_offset - H->weight_offset, H->inputs);
  }
  init(model.head().weight_offset, static_cast<std::size_t>(model.head().inputs), model.head().inputs);
  return model;
}

DropoutMask sample_dropout(const Model& model, std::size_t batch_size, std::mt19937_64& rng) {
  DropoutMask mask;
  const double rate = model.config().dropout_rate;
  const auto units = static_cast<std::size_t>(model.hidden() ? model.hidden()->outputs : 0);
  const double keep_scale = 1.0 / (1.0 - rate);
  std::bernoulli_distribution keep(1.0 - rate);
  mask.scale.assign(batch_size, std::vector<double>(units, 1.0));
  for (auto& s : mask.scale) {
    for (double& v : s) v = keep(rng) ? keep_scale : 0.0;
  }
  return mask;
}

std::vector<double> forward_logits(const Model& model, std::span<const NormImage> batch,
                                   const DropoutMask* dropout) {
  const auto ptrs = pointers(batch);
  return logits_of(model, ptrs, dropout);
}

std::vector<double> forward(const Model& model, std::span<const NormImage> batch,
                            const DropoutMask* dropout) {
  std::vector<double> out = forward_logits(model, batch, dropout);
  for (double& v : out) v = open_unit(sigmoid(v));
  return out;
}

double bce_loss(std::span<const double> pred, std::span<const int> labels) {
  check_lengths(pred.size(), labels.size());
  if (pred.empty()) return 0.0;
  double sum = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double p = std::clamp(pred[i], kProbClamp, 1.0 - kProbClamp);
    sum -= labels[i] == 1 ? std::log(p) : std::log1p(-p);
  }
  return sum / static_cast<double>(pred.size());
}

double accuracy(std::span<const double> pred, std::span<const int> labels) {
  check_lengths(pred.size(), labels.size());
  if (pred.empty()) return 0.0;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    hits += static_cast<int>(pred[i] >= 0.5) == labels[i];
  }
  return static_cast<double>(hits) / static_cast<double>(pred.size());
}

double compute_gradients(const Model& model, std::span<const NormImage> batch,
                         std::span<const int> labels, const DropoutMask* dropout,
                         std::vector<double>& grad) {
  const auto ptrs = pointers(batch);
  return gradients_of(model, ptrs, labels, dropout, grad);
}

double backward_and_step(Model& model, std::span<const NormImage> batch,
                         std::span<const int> labels, double learning_rate,
                         const DropoutMask* dropout) {
  const auto ptrs = pointers(batch);
  return step_with(model, ptrs, labels, learning_rate, dropout);
}

Evaluation evaluate(const Model& model, std::span<const NormImage> images,
                    std::span<const int> labels) {
  const auto ptrs = pointers(images);
  return evaluate_ptrs(model, ptrs, labels);
}

TrainResult train_model(const ModelConfig& model_cfg, const TrainConfig& train_cfg,
                        const TrainData& train_set, const TrainData& val_set,
                        const std::string& run_id) {
  train_cfg.validate();
  if (train_set.images.empty()) throw Error(ErrorKind::EmptyDataset, "empty training set");
  if (val_set.images.empty()) throw Error(ErrorKind::EmptyDataset, "empty validation set");
  check_lengths(train_set.images.size(), train_set.labels.size());
  check_lengths(val_set.images.size(), val_set.labels.size());

  Model model = build_model(model_cfg);
  RunLog log;
  log.run_id = run_id;
  log.config_hash = config_hash(model_cfg, train_cfg);

  const auto train_ptrs = pointers(train_set.images);
  const auto val_ptrs = pointers(val_set.images);
  std::mt19937_64 rng(train_cfg.seed);
  std::vector<std::size_t> order(train_set.images.size());
  std::iota(order.begin(), order.end(), std::size_t{0});

  const auto batch_size = static_cast<std::size_t>(train_cfg.batch_size);
  const bool use_dropout = model_cfg.dropout_rate > 0.0 && model.hidden().has_value();
  std::vector<const NormImage*> batch;
  std::vector<int> labels;
  std::int64_t step = 0;
  for (int epoch = 1; epoch <= train_cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t end = std::min(order.size(), start + batch_size);
      batch.clear();
      labels.clear();
      for (std::size_t i = start; i < end; ++i) {
        batch.push_back(train_ptrs[order[i]]);
        labels.push_back(train_set.labels[order[i]]);
      }
      DropoutMask mask;
      if (use_dropout) mask = sample_dropout(model, batch.size(), rng);
      try {
        step_with(model, batch, labels, train_cfg.learning_rate, use_dropout ? &mask : nullptr);
      } catch (const Error& e) {
        if (e.kind() != ErrorKind::NonFiniteGradient) throw;
        throw Error(ErrorKind::NonFiniteGradient,
                    fmt::format("run {} step {}: {}", run_id, step + 1, e.what()));
      }
      ++step;
      if (step % train_cfg.eval_every == 0) {
        const Evaluation tr = evaluate_ptrs(model, train_ptrs, train_set.labels);
        const Evaluation va = evaluate_ptrs(model, val_ptrs, val_set.labels);
        log.points.push_back({step, epoch, tr.loss, tr.accuracy, va.loss, va.accuracy});
      }
    }
  }
  return {std::move(log), std::move(model)};
}

RunLog train(const ModelConfig& model_cfg, const TrainConfig& train_cfg,
             const TrainData& train_set, const TrainData& val_set, const std::string& run_id) {
  return train_model(model_cfg, train_cfg, train_set, val_set, run_id).log;
}

std::string describe_config(const ModelConfig& m, const TrainConfig& t) {
  std::string blocks;
  for (std::size_t i = 0; i < m.conv_blocks.size(); ++i) {
    if (i > 0) blocks += ',';
    blocks += fmt::format("{}x{}", m.conv_blocks[i].filters, m.conv_blocks[i].kernel_size);
  }
  std::string out;
  out += fmt::format("model.input_side = {}\n", m.input_side);
  out += fmt::format("model.conv_blocks = {}\n", blocks);
  out += fmt::format("model.dense_units = {}\n", m.dense_units);
  out += fmt::format("model.dropout_rate = {}\n", m.dropout_rate);
  out += fmt::format("model.seed = {}\n", m.seed);
  out += fmt::format("train.epochs = {}\n", t.epochs);
  out += fmt::format("train.batch_size = {}\n", t.batch_size);
  out += fmt::format("train.learning_rate = {}\n", t.learning_rate);
  out += fmt::format("train.eval_every = {}\n", t.eval_every);
  out += fmt::format("train.seed = {}\n", t.seed);
  return out;
}

std::string config_hash(const ModelConfig& model_cfg, const TrainConfig& train_cfg) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : describe_config(model_cfg, train_cfg)) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return fmt::format("{:016x}", h);
}

}  // namespace cxr
