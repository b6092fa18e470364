#include "fedclave/model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstring>
#include <fstream>
#include <numeric>

#include "fedclave/random.hpp"

namespace fedclave {

namespace {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;

// Column-major views: the row-major 784x200 w1 is the column-major 200x784
// matrix mapping an input column to hidden pre-activations, likewise for w2.
template <typename T>
auto hidden_weights(const BasicModelParams<T>& p) {
  return Eigen::Map<const Mat<T>>(p.w1().data(), kHiddenDim, kInputDim);
}
template <typename T>
auto hidden_bias(const BasicModelParams<T>& p) {
  return Eigen::Map<const Vec<T>>(p.b1().data(), kHiddenDim);
}
template <typename T>
auto output_weights(const BasicModelParams<T>& p) {
  return Eigen::Map<const Mat<T>>(p.w2().data(), kOutputDim, kHiddenDim);
}
template <typename T>
auto output_bias(const BasicModelParams<T>& p) {
  return Eigen::Map<const Vec<T>>(p.b2().data(), kOutputDim);
}

template <typename T>
struct Workspace {
  Mat<T> x;
  Mat<T> pre_hidden;
  Mat<T> hidden;
  Mat<T> logits;
  Mat<T> dlogits;
  Mat<T> dhidden;
};

template <typename T>
void gather(const Samples& data, std::span<const std::size_t> batch, Mat<T>& x) {
  x.resize(kInputDim, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t b = 0; b < batch.size(); ++b) {
    const auto img = data.image(batch[b]);
    T* col = x.col(static_cast<Eigen::Index>(b)).data();
    for (std::size_t i = 0; i < kInputDim; ++i) col[i] = static_cast<T>(img[i]);
  }
}

template <typename T>
void forward(const BasicModelParams<T>& p, Workspace<T>& ws) {
  ws.pre_hidden.noalias() = hidden_weights(p) * ws.x;
  ws.pre_hidden.colwise() += hidden_bias(p);
  ws.hidden = ws.pre_hidden.cwiseMax(T{0});
  ws.logits.noalias() = output_weights(p) * ws.hidden;
  ws.logits.colwise() += output_bias(p);
}

// Writes log-sum-exp shifted probabilities into `probs` (may alias logits)
// and returns the summed cross-entropy.
template <typename T>
double softmax_xent(const Mat<T>& logits, const Samples& data,
                    std::span<const std::size_t> batch, Mat<T>* probs) {
  double total = 0.0;
  for (Eigen::Index b = 0; b < logits.cols(); ++b) {
    const auto z = logits.col(b);
    const T zmax = z.maxCoeff();
    const T lse = zmax + std::log((z.array() - zmax).exp().sum());
    const auto y = static_cast<Eigen::Index>(data.label(batch[static_cast<std::size_t>(b)]));
    total += static_cast<double>(lse - z(y));
    if (probs) probs->col(b) = (z.array() - lse).exp().matrix();
  }
  return total;
}

template <typename T>
double loss_grad_into(const BasicModelParams<T>& p, const Samples& data,
                      std::span<const std::size_t> batch, Workspace<T>& ws,
                      BasicModelParams<T>& grads) {
  if (batch.empty()) throw Error(ErrorCode::kEmptyInput, "empty batch");
  gather(data, batch, ws.x);
  forward(p, ws);

  const auto n = static_cast<Eigen::Index>(batch.size());
  ws.dlogits.resize(static_cast<Eigen::Index>(kOutputDim), n);
  const double loss = softmax_xent(ws.logits, data, batch, &ws.dlogits) / static_cast<double>(n);
  if (!std::isfinite(loss)) {
    throw Error(ErrorCode::kNonFiniteLoss, "non-finite training loss");
  }
  const T inv_n = T{1} / static_cast<T>(n);
  for (Eigen::Index b = 0; b < n; ++b) {
    ws.dlogits(static_cast<Eigen::Index>(data.label(batch[static_cast<std::size_t>(b)])), b) -= T{1};
  }
  ws.dlogits *= inv_n;

  Eigen::Map<Mat<T>> g_w2(grads.w2().data(), kOutputDim, kHiddenDim);
  Eigen::Map<Vec<T>> g_b2(grads.b2().data(), kOutputDim);
  Eigen::Map<Mat<T>> g_w1(grads.w1().data(), kHiddenDim, kInputDim);
  Eigen::Map<Vec<T>> g_b1(grads.b1().data(), kHiddenDim);

  g_w2.noalias() = ws.dlogits * ws.hidden.transpose();
  g_b2 = ws.dlogits.rowwise().sum();
  ws.dhidden.noalias() = output_weights(p).transpose() * ws.dlogits;
  ws.dhidden = (ws.pre_hidden.array() > T{0}).select(ws.dhidden, T{0});
  g_w1.noalias() = ws.dhidden * ws.x.transpose();
  g_b1 = ws.dhidden.rowwise().sum();
  return loss;
}

std::vector<std::size_t> iota_indices(std::size_t n) {
  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  return idx;
}

constexpr std::size_t kEvalChunk = 512;

// Calls fn(logits, chunk_indices) for consecutive chunks of data.
template <typename Fn>
void for_each_chunk(const ModelParams& params, const Samples& data, Fn&& fn) {
  Workspace<float> ws;
  std::vector<std::size_t> chunk;
  for (std::size_t start = 0; start < data.size(); start += kEvalChunk) {
    const auto end = std::min(data.size(), start + kEvalChunk);
    chunk.resize(end - start);
    std::iota(chunk.begin(), chunk.end(), start);
    gather(data, chunk, ws.x);
    forward(params, ws);
    fn(ws.logits, std::span<const std::size_t>(chunk));
  }
}

}  // namespace

void TrainConfig::validate() const {
  if (!(learning_rate >= 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning_rate", "must be a finite non-negative number");
  }
  if (epochs < 1) throw ConfigError("epochs", "must be at least 1");
  if (batch_size < 1) throw ConfigError("batch_size", "must be at least 1");
}

ModelParams init_params(std::uint64_t seed) {
  ModelParams p;
  Rng rng(derive_seed(seed, Stream::kModelInit));
  const double bound1 = 1.0 / std::sqrt(static_cast<double>(kInputDim));
  const double bound2 = 1.0 / std::sqrt(static_cast<double>(kHiddenDim));
  for (auto& w : p.w1()) w = static_cast<float>((2.0 * uniform_unit(rng) - 1.0) * bound1);
  for (auto& w : p.w2()) w = static_cast<float>((2.0 * uniform_unit(rng) - 1.0) * bound2);
  return p;
}

template <typename T>
LossGrad<T> forward_loss_grad(const BasicModelParams<T>& params, const Samples& data,
                              std::span<const std::size_t> batch) {
  Workspace<T> ws;
  LossGrad<T> out;
  out.loss = loss_grad_into(params, data, batch, ws, out.grads);
  return out;
}

template <typename T>
LossGrad<T> forward_loss_grad(const BasicModelParams<T>& params, const Samples& data) {
  const auto idx = iota_indices(data.size());
  return forward_loss_grad(params, data, std::span<const std::size_t>(idx));
}

template LossGrad<float> forward_loss_grad(const BasicModelParams<float>&, const Samples&,
                                           std::span<const std::size_t>);
template LossGrad<double> forward_loss_grad(const BasicModelParams<double>&, const Samples&,
                                            std::span<const std::size_t>);
template LossGrad<float> forward_loss_grad(const BasicModelParams<float>&, const Samples&);
template LossGrad<double> forward_loss_grad(const BasicModelParams<double>&, const Samples&);

double mean_loss(const ModelParams& params, const Samples& data) {
  if (data.empty()) throw Error(ErrorCode::kEmptyInput, "mean_loss on empty data");
  double total = 0.0;
  for_each_chunk(params, data, [&](const Mat<float>& logits, std::span<const std::size_t> chunk) {
    total += softmax_xent<float>(logits, data, chunk, nullptr);
  });
  const double loss = total / static_cast<double>(data.size());
  if (!std::isfinite(loss)) throw Error(ErrorCode::kNonFiniteLoss, "non-finite loss");
  return loss;
}

std::vector<double> predict_proba(const ModelParams& params, ImageView image) {
  Samples one;
  one.push_back(image, 0);
  std::vector<double> out(kOutputDim);
  for_each_chunk(params, one, [&](const Mat<float>& logits, std::span<const std::size_t>) {
    Vec<double> z = logits.col(0).cast<double>();
    const double zmax = z.maxCoeff();
    const double lse = zmax + std::log((z.array() - zmax).exp().sum());
    for (std::size_t k = 0; k < kOutputDim; ++k) {
      out[k] = std::exp(z(static_cast<Eigen::Index>(k)) - lse);
    }
  });
  return out;
}

ModelParams train_epochs(const ModelParams& params, const Samples& data, const TrainConfig& cfg,
                         TrainStats* stats) {
  cfg.validate();
  if (data.empty()) throw Error(ErrorCode::kEmptyInput, "train_epochs on empty data");
  ModelParams p = params;
  ModelParams grads;
  Workspace<float> ws;
  Rng rng(cfg.seed);
  auto order = iota_indices(data.size());
  const auto lr = static_cast<float>(cfg.learning_rate);
  const auto batch_size = static_cast<std::size_t>(cfg.batch_size);
  double epoch_loss = 0.0;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    shuffle(std::span<std::size_t>(order), rng);
    epoch_loss = 0.0;
    std::size_t batches = 0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const auto len = std::min(batch_size, order.size() - start);
      const std::span<const std::size_t> batch(order.data() + start, len);
      epoch_loss += loss_grad_into(p, data, batch, ws, grads);
      ++batches;
      auto w = p.flat();
      const auto g = std::as_const(grads).flat();
      for (std::size_t i = 0; i < kParamCount; ++i) w[i] -= lr * g[i];
    }
    epoch_loss /= static_cast<double>(batches);
  }
  if (!p.all_finite()) throw Error(ErrorCode::kNonFiniteLoss, "parameters diverged");
  if (stats) stats->last_epoch_loss = epoch_loss;
  return p;
}

std::size_t count_correct(const ModelParams& params, const Samples& data) {
  std::size_t correct = 0;
  for_each_chunk(params, data, [&](const Mat<float>& logits, std::span<const std::size_t> chunk) {
    for (Eigen::Index b = 0; b < logits.cols(); ++b) {
      Eigen::Index best = 0;
      for (Eigen::Index k = 1; k < logits.rows(); ++k) {
        if (logits(k, b) > logits(best, b)) best = k;
      }
      if (best == data.label(chunk[static_cast<std::size_t>(b)])) ++correct;
    }
  });
  return correct;
}

double evaluate(const ModelParams& params, const Samples& data) {
  if (data.empty()) throw Error(ErrorCode::kEmptyInput, "evaluate on empty data");
  return static_cast<double>(count_correct(params, data)) / static_cast<double>(data.size());
}

namespace {
constexpr char kCheckpointMagic[4] = {'F', 'C', 'M', 'P'};

void put_le32(std::ostream& out, std::uint32_t v) {
  const char bytes[4] = {static_cast<char>(v & 0xff), static_cast<char>((v >> 8) & 0xff),
                         static_cast<char>((v >> 16) & 0xff), static_cast<char>((v >> 24) & 0xff)};
  out.write(bytes, 4);
}

std::uint32_t get_le32(const unsigned char* b) {
  return std::uint32_t{b[0]} | (std::uint32_t{b[1]} << 8) | (std::uint32_t{b[2]} << 16) |
         (std::uint32_t{b[3]} << 24);
}
}  // namespace

void save_params(const ModelParams& params, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(kCheckpointMagic, 4);
  put_le32(out, static_cast<std::uint32_t>(kParamCount));
  for (const float v : params.flat()) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    put_le32(out, bits);
  }
  if (!out) throw Error(ErrorCode::kIoError, "failed writing " + path.string());
}

ModelParams load_params(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + path.string());
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  if (bytes.size() < 8 || std::memcmp(bytes.data(), kCheckpointMagic, 4) != 0) {
    throw Error(ErrorCode::kBadCheckpoint, "bad checkpoint header in " + path.string());
  }
  const auto dim = get_le32(bytes.data() + 4);
  if (dim != kParamCount || bytes.size() != 8 + 4 * static_cast<std::size_t>(dim)) {
    throw Error(ErrorCode::kBadCheckpoint, "checkpoint dimension mismatch in " + path.string());
  }
  std::vector<float> flat(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const auto bits = get_le32(bytes.data() + 8 + 4 * i);
    std::memcpy(&flat[i], &bits, sizeof bits);
  }
  return ModelParams::unflatten(std::move(flat));
}

}  // namespace fedclave
