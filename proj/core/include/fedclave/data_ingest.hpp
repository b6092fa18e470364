#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace fedclave {

inline constexpr std::size_t kImageSide = 28;
inline constexpr std::size_t kImagePixels = kImageSide * kImageSide;
inline constexpr int kNumLabels = 10;

using Image = std::array<float, kImagePixels>;
using ImageView = std::span<const float, kImagePixels>;

// Column-of-images store: pixels of sample i occupy
// [i * kImagePixels, (i + 1) * kImagePixels), row-major within the image.
class Samples {
 public:
  Samples() = default;

  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }

  ImageView image(std::size_t i) const {
    return ImageView(pixels_.data() + i * kImagePixels, kImagePixels);
  }
  std::uint8_t label(std::size_t i) const { return labels_[i]; }

  void reserve(std::size_t n);
  void push_back(ImageView image, std::uint8_t label);
  void append(const Samples& other);

  std::span<const float> pixels() const noexcept { return pixels_; }
  std::span<const std::uint8_t> labels() const noexcept { return labels_; }

  // Label counts indexed 0..9.
  std::array<std::size_t, kNumLabels> label_histogram() const;

  friend bool operator==(const Samples&, const Samples&) = default;

 private:
  std::vector<float> pixels_;
  std::vector<std::uint8_t> labels_;
};

struct RawDataset {
  std::string name;
  Samples train;
  Samples test;
};

// Decoded IDX payloads. Images are normalized to [0, 1].
using IdxImages = std::vector<Image>;
using IdxLabels = std::vector<std::uint8_t>;
using IdxContent = std::variant<IdxImages, IdxLabels>;

inline constexpr std::uint32_t kIdxLabelMagic = 0x00000801;
inline constexpr std::uint32_t kIdxImageMagic = 0x00000803;

// Throws Error{kUnknownMagic | kTruncatedPayload | kDimensionMismatch}.
IdxContent parse_idx(std::span<const std::uint8_t> bytes);
IdxImages parse_idx_images(std::span<const std::uint8_t> bytes);
IdxLabels parse_idx_labels(std::span<const std::uint8_t> bytes);

// Inverse of parse_idx. Pixels are quantized with round(p * 255).
std::vector<std::uint8_t> encode_idx_images(std::span<const Image> images);
std::vector<std::uint8_t> encode_idx_labels(std::span<const std::uint8_t> labels);

bool is_known_dataset(std::string_view name);

struct LoadOptions {
  // Enforce 60000 train / 10000 test samples.
  bool require_published_sizes = true;
};

// Reads <root>/<name>/{train,t10k}-{images-idx3,labels-idx1}-ubyte.
// Throws Error{kMissingFile} naming the absent path, Error{kSizeMismatch}
// when image/label counts disagree or differ from the published sizes.
RawDataset load_dataset(std::string_view name, const std::filesystem::path& root);
RawDataset load_dataset(std::string_view name, const std::filesystem::path& root,
                        const LoadOptions& options);

// Procedural ten-class glyph dataset. Deterministic in `seed`.
RawDataset synth_dataset(std::uint64_t seed, std::size_t per_label);
RawDataset synth_dataset(std::uint64_t seed, std::size_t per_label,
                         std::size_t test_per_label);

}  // namespace fedclave
