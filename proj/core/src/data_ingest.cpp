#include "fedclave/data_ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>

#include "fedclave/errors.hpp"
#include "fedclave/random.hpp"

namespace fedclave {

void Samples::reserve(std::size_t n) {
  pixels_.reserve(n * kImagePixels);
  labels_.reserve(n);
}

void Samples::push_back(ImageView image, std::uint8_t label) {
  pixels_.insert(pixels_.end(), image.begin(), image.end());
  labels_.push_back(label);
}

void Samples::append(const Samples& other) {
  pixels_.insert(pixels_.end(), other.pixels_.begin(), other.pixels_.end());
  labels_.insert(labels_.end(), other.labels_.begin(), other.labels_.end());
}

std::array<std::size_t, kNumLabels> Samples::label_histogram() const {
  std::array<std::size_t, kNumLabels> hist{};
  for (const auto y : labels_) ++hist[y];
  return hist;
}

namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void write_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

void require_bytes(std::span<const std::uint8_t> bytes, std::size_t needed,
                   const char* what) {
  if (bytes.size() < needed) {
    throw Error(ErrorCode::kTruncatedPayload,
                std::string("IDX ") + what + ": need " + std::to_string(needed) +
                    " bytes, have " + std::to_string(bytes.size()));
  }
}

IdxLabels decode_labels(std::span<const std::uint8_t> bytes) {
  require_bytes(bytes, 8, "label header");
  const std::size_t count = read_be32(bytes, 4);
  require_bytes(bytes, 8 + count, "label payload");
  IdxLabels labels(bytes.begin() + 8, bytes.begin() + 8 + static_cast<std::ptrdiff_t>(count));
  for (const auto y : labels) {
    if (y >= kNumLabels) {
      throw Error(ErrorCode::kDimensionMismatch,
                  "IDX label out of range: " + std::to_string(y));
    }
  }
  return labels;
}

IdxImages decode_images(std::span<const std::uint8_t> bytes) {
  require_bytes(bytes, 16, "image header");
  const std::size_t count = read_be32(bytes, 4);
  const std::size_t rows = read_be32(bytes, 8);
  const std::size_t cols = read_be32(bytes, 12);
  if (rows != kImageSide || cols != kImageSide) {
    throw Error(ErrorCode::kDimensionMismatch,
                "IDX images must be 28x28, got " + std::to_string(rows) + "x" +
                    std::to_string(cols));
  }
  require_bytes(bytes, 16 + count * kImagePixels, "image payload");
  IdxImages images(count);
  const std::uint8_t* src = bytes.data() + 16;
  for (auto& img : images) {
    for (auto& px : img) px = static_cast<float>(*src++) / 255.0f;
  }
  return images;
}

}  // namespace

IdxContent parse_idx(std::span<const std::uint8_t> bytes) {
  require_bytes(bytes, 4, "magic");
  const auto magic = read_be32(bytes, 0);
  if (magic == kIdxLabelMagic) return decode_labels(bytes);
  if (magic == kIdxImageMagic) return decode_images(bytes);
  throw Error(ErrorCode::kUnknownMagic, "unknown IDX magic " + std::to_string(magic));
}

IdxImages parse_idx_images(std::span<const std::uint8_t> bytes) {
  auto content = parse_idx(bytes);
  if (auto* images = std::get_if<IdxImages>(&content)) return std::move(*images);
  throw Error(ErrorCode::kUnknownMagic, "expected IDX image file (magic 0x803)");
}

IdxLabels parse_idx_labels(std::span<const std::uint8_t> bytes) {
  auto content = parse_idx(bytes);
  if (auto* labels = std::get_if<IdxLabels>(&content)) return std::move(*labels);
  throw Error(ErrorCode::kUnknownMagic, "expected IDX label file (magic 0x801)");
}

std::vector<std::uint8_t> encode_idx_images(std::span<const Image> images) {
  std::vector<std::uint8_t> out;
  out.reserve(16 + images.size() * kImagePixels);
  write_be32(out, kIdxImageMagic);
  write_be32(out, static_cast<std::uint32_t>(images.size()));
  write_be32(out, kImageSide);
  write_be32(out, kImageSide);
  for (const auto& img : images) {
    for (const auto px : img) {
      out.push_back(static_cast<std::uint8_t>(std::lround(std::clamp(px, 0.0f, 1.0f) * 255.0f)));
    }
  }
  return out;
}

std::vector<std::uint8_t> encode_idx_labels(std::span<const std::uint8_t> labels) {
  std::vector<std::uint8_t> out;
  out.reserve(8 + labels.size());
  write_be32(out, kIdxLabelMagic);
  write_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.insert(out.end(), labels.begin(), labels.end());
  return out;
}

bool is_known_dataset(std::string_view name) {
  return name == "mnist" || name == "fashion-mnist" || name == "kmnist" ||
         name == "synthetic";
}

namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kMissingFile, "missing dataset file: " + path.string());
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Samples load_partition(const std::filesystem::path& dir, const std::string& prefix,
                       std::size_t expected) {
  const auto image_path = dir / (prefix + "-images-idx3-ubyte");
  const auto label_path = dir / (prefix + "-labels-idx1-ubyte");
  // Check both before parsing so the error names whichever is absent.
  for (const auto& p : {image_path, label_path}) {
    if (!std::filesystem::exists(p)) {
      throw Error(ErrorCode::kMissingFile, "missing dataset file: " + p.string());
    }
  }
  const auto images = parse_idx_images(read_file(image_path));
  const auto labels = parse_idx_labels(read_file(label_path));
  if (images.size() != labels.size()) {
    throw Error(ErrorCode::kSizeMismatch,
                prefix + ": " + std::to_string(images.size()) + " images vs " +
                    std::to_string(labels.size()) + " labels");
  }
  if (expected != 0 && images.size() != expected) {
    throw Error(ErrorCode::kSizeMismatch,
                prefix + ": expected " + std::to_string(expected) + " samples, found " +
                    std::to_string(images.size()));
  }
  Samples out;
  out.reserve(images.size());
  for (std::size_t i = 0; i < images.size(); ++i) out.push_back(images[i], labels[i]);
  return out;
}

}  // namespace

RawDataset load_dataset(std::string_view name, const std::filesystem::path& root) {
  return load_dataset(name, root, LoadOptions{});
}

RawDataset load_dataset(std::string_view name, const std::filesystem::path& root,
                        const LoadOptions& options) {
  if (name == "synthetic" || !is_known_dataset(name)) {
    throw Error(ErrorCode::kMissingFile,
                "no IDX files for dataset '" + std::string(name) + "'");
  }
  const auto dir = root / std::string(name);
  RawDataset ds;
  ds.name = std::string(name);
  ds.train = load_partition(dir, "train", options.require_published_sizes ? 60000 : 0);
  ds.test = load_partition(dir, "t10k", options.require_published_sizes ? 10000 : 0);
  return ds;
}

namespace {

// Each label is a filled disc at its own anchor plus a short stroke whose
// direction depends on the label. Anchors avoid the rotation center so that
// rotated glyphs collide with other labels' glyphs, not with themselves.
struct GlyphSpec {
  int row;
  int col;
  int stroke_dr;
  int stroke_dc;
};

constexpr std::array<GlyphSpec, kNumLabels> kGlyphs{{
    {6, 6, 0, 1},
    {6, 14, 1, 0},
    {6, 21, 1, 1},
    {14, 5, -1, 1},
    {14, 22, 0, -1},
    {21, 6, -1, 0},
    {21, 14, 0, 1},
    {21, 21, -1, -1},
    {10, 17, 1, -1},
    {18, 10, -1, 1},
}};

Image render_glyph(int label, Rng& rng) {
  Image img{};
  const auto& g = kGlyphs[static_cast<std::size_t>(label)];
  const int jr = static_cast<int>(uniform_index(rng, 3)) - 1;
  const int jc = static_cast<int>(uniform_index(rng, 3)) - 1;
  const double intensity = 0.7 + 0.3 * uniform_unit(rng);
  auto paint = [&](int r, int c, double v) {
    if (r < 0 || c < 0 || r >= static_cast<int>(kImageSide) || c >= static_cast<int>(kImageSide)) {
      return;
    }
    auto& px = img[static_cast<std::size_t>(r) * kImageSide + static_cast<std::size_t>(c)];
    px = std::max(px, static_cast<float>(v));
  };
  const int cr = g.row + jr;
  const int cc = g.col + jc;
  for (int dr = -3; dr <= 3; ++dr) {
    for (int dc = -3; dc <= 3; ++dc) {
      if (dr * dr + dc * dc <= 6) paint(cr + dr, cc + dc, intensity);
    }
  }
  for (int step = 4; step <= 9; ++step) {
    paint(cr + step * g.stroke_dr, cc + step * g.stroke_dc, intensity);
  }
  for (auto& px : img) {
    px = std::min(1.0f, px + static_cast<float>(0.15 * uniform_unit(rng)));
  }
  return img;
}

Samples synth_partition(Rng& rng, std::size_t per_label) {
  Samples out;
  out.reserve(per_label * kNumLabels);
  for (std::size_t i = 0; i < per_label; ++i) {
    for (int y = 0; y < kNumLabels; ++y) {
      out.push_back(render_glyph(y, rng), static_cast<std::uint8_t>(y));
    }
  }
  return out;
}

}  // namespace

RawDataset synth_dataset(std::uint64_t seed, std::size_t per_label) {
  return synth_dataset(seed, per_label, per_label);
}

RawDataset synth_dataset(std::uint64_t seed, std::size_t per_label,
                         std::size_t test_per_label) {
  RawDataset ds;
  ds.name = "synthetic";
  Rng train_rng(derive_seed(seed, Stream::kSynthetic, {0}));
  Rng test_rng(derive_seed(seed, Stream::kSynthetic, {1}));
  ds.train = synth_partition(train_rng, per_label);
  ds.test = synth_partition(test_rng, test_per_label);
  return ds;
}

}  // namespace fedclave
