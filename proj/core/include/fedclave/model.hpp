#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <new>
#include <span>
#include <string>
#include <vector>

#include "fedclave/data_ingest.hpp"
#include "fedclave/errors.hpp"

namespace fedclave {

inline constexpr std::size_t kInputDim = kImagePixels;
inline constexpr std::size_t kHiddenDim = 200;
inline constexpr std::size_t kOutputDim = kNumLabels;

inline constexpr std::size_t kW1Size = kInputDim * kHiddenDim;
inline constexpr std::size_t kB1Size = kHiddenDim;
inline constexpr std::size_t kW2Size = kHiddenDim * kOutputDim;
inline constexpr std::size_t kB2Size = kOutputDim;
inline constexpr std::size_t kParamCount = kW1Size + kB1Size + kW2Size + kB2Size;
static_assert(kParamCount == 159010);

// Cache-line aligned storage. Vectorized kernels peel elements according to
// the runtime address, so a fixed alignment keeps results bit-reproducible.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlignment{64};

  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U>&) noexcept {}

  T* allocate(std::size_t n) { return static_cast<T*>(::operator new(n * sizeof(T), kAlignment)); }
  void deallocate(T* p, std::size_t) noexcept { ::operator delete(p, kAlignment); }

  template <typename U>
  bool operator==(const AlignedAllocator<U>&) const noexcept {
    return true;
  }
};

// Parameters of the 784-200-10 ReLU network as one flat vector laid out
// [w1 | b1 | w2 | b2]. w1 is row-major 784x200 (input x hidden) and w2 is
// row-major 200x10, so w1[i * 200 + j] connects pixel i to hidden unit j.
template <typename T>
class BasicModelParams {
 public:
  using value_type = T;

  BasicModelParams() : values_(kParamCount, T{0}) {}

  // Throws Error{kSizeMismatch} unless flat.size() == kParamCount.
  static BasicModelParams unflatten(std::vector<T> flat);
  std::vector<T> flatten() const { return {values_.begin(), values_.end()}; }

  std::span<T> flat() noexcept { return values_; }
  std::span<const T> flat() const noexcept { return values_; }

  std::span<T> w1() noexcept { return flat().subspan(0, kW1Size); }
  std::span<T> b1() noexcept { return flat().subspan(kW1Size, kB1Size); }
  std::span<T> w2() noexcept { return flat().subspan(kW1Size + kB1Size, kW2Size); }
  std::span<T> b2() noexcept { return flat().subspan(kW1Size + kB1Size + kW2Size, kB2Size); }
  std::span<const T> w1() const noexcept { return flat().subspan(0, kW1Size); }
  std::span<const T> b1() const noexcept { return flat().subspan(kW1Size, kB1Size); }
  std::span<const T> w2() const noexcept { return flat().subspan(kW1Size + kB1Size, kW2Size); }
  std::span<const T> b2() const noexcept {
    return flat().subspan(kW1Size + kB1Size + kW2Size, kB2Size);
  }

  template <typename U>
  BasicModelParams<U> cast() const {
    BasicModelParams<U> out;
    auto dst = out.flat();
    for (std::size_t i = 0; i < kParamCount; ++i) dst[i] = static_cast<U>(values_[i]);
    return out;
  }

  bool all_finite() const;

  friend bool operator==(const BasicModelParams&, const BasicModelParams&) = default;

 private:
  explicit BasicModelParams(const std::vector<T>& values)
      : values_(values.begin(), values.end()) {}

  std::vector<T, AlignedAllocator<T>> values_;
};

// Training runs in single precision; the double instantiation exists for
// gradient checking against finite differences.
using ModelParams = BasicModelParams<float>;

template <typename T>
BasicModelParams<T> BasicModelParams<T>::unflatten(std::vector<T> flat) {
  if (flat.size() != kParamCount) {
    throw Error(ErrorCode::kSizeMismatch, "expected " + std::to_string(kParamCount) +
                                              " parameters, got " + std::to_string(flat.size()));
  }
  return BasicModelParams(flat);
}

template <typename T>
bool BasicModelParams<T>::all_finite() const {
  for (const T v : values_) {
    if (!std::isfinite(v)) return false;
  }
  return true;
}

struct TrainConfig {
  double learning_rate = 0.01;
  int epochs = 10;
  int batch_size = 64;
  std::uint64_t seed = 42;

  // Throws ConfigError naming the field.
  void validate() const;
};

// U(-1/sqrt(fan_in), 1/sqrt(fan_in)) weights, zero biases.
ModelParams init_params(std::uint64_t seed);

template <typename T>
struct LossGrad {
  double loss = 0.0;
  BasicModelParams<T> grads;
};

// Mean softmax cross-entropy over the selected samples and its exact
// gradient. Throws Error{kEmptyInput} for an empty batch and
// Error{kNonFiniteLoss} if the loss overflows.
template <typename T>
LossGrad<T> forward_loss_grad(const BasicModelParams<T>& params, const Samples& data,
                              std::span<const std::size_t> batch);
template <typename T>
LossGrad<T> forward_loss_grad(const BasicModelParams<T>& params, const Samples& data);

// Mean cross-entropy over all of `data` (forward pass only).
double mean_loss(const ModelParams& params, const Samples& data);

// Softmax probabilities for one image.
std::vector<double> predict_proba(const ModelParams& params, ImageView image);

struct TrainStats {
  // Mean of the per-batch losses over the final epoch.
  double last_epoch_loss = 0.0;
};

// Plain mini-batch SGD; the sample order is reshuffled every epoch from
// cfg.seed. The last batch of an epoch may be short.
ModelParams train_epochs(const ModelParams& params, const Samples& data, const TrainConfig& cfg,
                         TrainStats* stats = nullptr);

// Fraction of samples whose argmax logit (lowest index on ties) equals the label.
double evaluate(const ModelParams& params, const Samples& data);
std::size_t count_correct(const ModelParams& params, const Samples& data);

// Little-endian file: 4-byte magic "FCMP", uint32 parameter count, then
// kParamCount float32 values. Throws Error{kIoError | kBadCheckpoint}.
void save_params(const ModelParams& params, const std::filesystem::path& path);
ModelParams load_params(const std::filesystem::path& path);

}  // namespace fedclave
