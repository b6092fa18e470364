#include "fedclave/heterogeneity.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

#include "fedclave/errors.hpp"

namespace fedclave {

namespace {

constexpr std::array<std::pair<ScenarioKind, std::string_view>, 6> kScenarioNames{{
    {ScenarioKind::kConceptShiftFeatures, "concept-shift-features"},
    {ScenarioKind::kConceptShiftLabels, "concept-shift-labels"},
    {ScenarioKind::kFeaturesDistributionSkew, "features-distribution-skew"},
    {ScenarioKind::kLabelsDistributionSkew, "labels-distribution-skew"},
    {ScenarioKind::kQuantitySkew, "quantity-skew"},
    {ScenarioKind::kIid, "iid"},
}};

// floor(count * fraction) with a guard against fractions like 0.7 whose
// product lands a hair below the intended integer.
std::size_t scaled_count(std::size_t count, double fraction) {
  return static_cast<std::size_t>(std::floor(static_cast<double>(count) * fraction + 1e-9));
}

bool valid_label(int y) { return y >= 0 && y < kNumLabels; }

}  // namespace

std::string_view scenario_name(ScenarioKind kind) {
  for (const auto& [k, name] : kScenarioNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

ScenarioKind parse_scenario(std::string_view name) {
  for (const auto& [k, n] : kScenarioNames) {
    if (n == name) return k;
  }
  throw ConfigError("scenario", "unknown scenario '" + std::string(name) + "'");
}

std::size_t HeterogeneityScenario::class_count() const {
  switch (kind) {
    case ScenarioKind::kConceptShiftFeatures: return rotations.size();
    case ScenarioKind::kConceptShiftLabels: return swaps.size();
    case ScenarioKind::kFeaturesDistributionSkew: return morphology.size();
    case ScenarioKind::kLabelsDistributionSkew: return dominant.size();
    case ScenarioKind::kQuantitySkew: return fractions.size();
    case ScenarioKind::kIid: return 1;
  }
  return 0;
}

void HeterogeneityScenario::validate() const {
  auto fail = [](const std::string& msg) { throw Error(ErrorCode::kInvalidScenario, msg); };
  if (class_count() == 0) fail("scenario has no heterogeneity classes");
  for (const int deg : rotations) {
    if (deg != 0 && deg != 90 && deg != 180 && deg != 270) {
      throw Error(ErrorCode::kInvalidAngle, "rotation must be 0/90/180/270, got " +
                                                std::to_string(deg));
    }
  }
  for (const auto& [a, b] : swaps) {
    if (!valid_label(a) || !valid_label(b) || a == b) fail("invalid swap pair");
  }
  for (const auto& d : dominant) {
    if (!valid_label(d[0]) || !valid_label(d[1]) || d[0] == d[1]) {
      fail("invalid dominant label pair");
    }
  }
  if (kind == ScenarioKind::kLabelsDistributionSkew && !(retain >= 0.0 && retain <= 1.0)) {
    fail("retain must lie in [0, 1]");
  }
  for (const double f : fractions) {
    if (!(f > 0.0 && f <= 1.0)) fail("volume fraction must lie in (0, 1]");
  }
}

HeterogeneityScenario default_scenario(ScenarioKind kind) {
  HeterogeneityScenario s;
  s.kind = kind;
  switch (kind) {
    case ScenarioKind::kConceptShiftFeatures:
      s.rotations = {0, 90, 180, 270};
      break;
    case ScenarioKind::kConceptShiftLabels:
      s.swaps = {{1, 7}, {2, 7}, {4, 7}, {3, 8}, {5, 6}, {7, 9}};
      break;
    case ScenarioKind::kFeaturesDistributionSkew:
      s.morphology = {MorphologyOp::kNone, MorphologyOp::kErode, MorphologyOp::kDilate};
      break;
    case ScenarioKind::kLabelsDistributionSkew:
      for (int c = 0; c < 4; ++c) s.dominant.push_back({2 * c, 2 * c + 1});
      break;
    case ScenarioKind::kQuantitySkew:
      // Linear from 0.2 to 1.0; the endpoint is exact so it passes the (0, 1] check.
      s.fractions = {0.2, 0.2 + 0.8 / 3.0, 0.2 + 1.6 / 3.0, 1.0};
      break;
    case ScenarioKind::kIid:
      break;
  }
  return s;
}

Image apply_rotation(ImageView img, int degrees) {
  if (degrees != 0 && degrees != 90 && degrees != 180 && degrees != 270) {
    throw Error(ErrorCode::kInvalidAngle,
                "rotation must be 0/90/180/270, got " + std::to_string(degrees));
  }
  constexpr std::size_t n = kImageSide;
  Image out{};
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t dr = r;
      std::size_t dc = c;
      switch (degrees) {
        case 90: dr = c; dc = n - 1 - r; break;
        case 180: dr = n - 1 - r; dc = n - 1 - c; break;
        case 270: dr = n - 1 - c; dc = r; break;
        default: break;
      }
      out[dr * n + dc] = img[r * n + c];
    }
  }
  return out;
}

int apply_label_swap(int label, std::pair<int, int> pair) {
  if (label == pair.first) return pair.second;
  if (label == pair.second) return pair.first;
  return label;
}

Image apply_morphology(ImageView img, MorphologyOp op) {
  Image out{};
  if (op == MorphologyOp::kNone) {
    std::copy(img.begin(), img.end(), out.begin());
    return out;
  }
  const int n = static_cast<int>(kImageSide);
  const bool erode = op == MorphologyOp::kErode;
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      float acc = erode ? 1.0f : 0.0f;
      for (int dr = -1; dr <= 1; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int rr = r + dr;
          const int cc = c + dc;
          const bool inside = rr >= 0 && cc >= 0 && rr < n && cc < n;
          const float v = inside ? img[static_cast<std::size_t>(rr * n + cc)] : 0.0f;
          acc = erode ? std::min(acc, v) : std::max(acc, v);
        }
      }
      out[static_cast<std::size_t>(r * n + c)] = acc;
    }
  }
  return out;
}

Samples apply_label_skew(const Samples& samples, std::array<int, 2> dominant, double retain,
                         Rng& rng) {
  std::array<std::vector<std::size_t>, kNumLabels> by_label;
  for (std::size_t i = 0; i < samples.size(); ++i) by_label[samples.label(i)].push_back(i);

  std::vector<char> keep(samples.size(), 0);
  for (int y = 0; y < kNumLabels; ++y) {
    auto& idx = by_label[static_cast<std::size_t>(y)];
    const bool is_dominant = y == dominant[0] || y == dominant[1];
    if (is_dominant) {
      for (const auto i : idx) keep[i] = 1;
      continue;
    }
    const auto kept = scaled_count(idx.size(), retain);
    shuffle(std::span<std::size_t>(idx), rng);
    for (std::size_t j = 0; j < kept; ++j) keep[idx[j]] = 1;
  }

  Samples out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (keep[i]) out.push_back(samples.image(i), samples.label(i));
  }
  return out;
}

Samples apply_quantity_skew(const Samples& samples, double fraction) {
  const auto hist = samples.label_histogram();
  std::array<std::size_t, kNumLabels> quota{};
  for (int y = 0; y < kNumLabels; ++y) {
    quota[static_cast<std::size_t>(y)] = scaled_count(hist[static_cast<std::size_t>(y)], fraction);
  }
  Samples out;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    auto& q = quota[samples.label(i)];
    if (q == 0) continue;
    --q;
    out.push_back(samples.image(i), samples.label(i));
  }
  return out;
}

namespace {

Samples transform_samples(const Samples& in, const HeterogeneityScenario& s,
                          std::size_t het_class, Rng& rng) {
  switch (s.kind) {
    case ScenarioKind::kIid:
      return in;
    case ScenarioKind::kConceptShiftFeatures: {
      Samples out;
      out.reserve(in.size());
      for (std::size_t i = 0; i < in.size(); ++i) {
        out.push_back(apply_rotation(in.image(i), s.rotations[het_class]), in.label(i));
      }
      return out;
    }
    case ScenarioKind::kConceptShiftLabels: {
      Samples out;
      out.reserve(in.size());
      for (std::size_t i = 0; i < in.size(); ++i) {
        const auto y = apply_label_swap(in.label(i), s.swaps[het_class]);
        out.push_back(in.image(i), static_cast<std::uint8_t>(y));
      }
      return out;
    }
    case ScenarioKind::kFeaturesDistributionSkew: {
      Samples out;
      out.reserve(in.size());
      for (std::size_t i = 0; i < in.size(); ++i) {
        out.push_back(apply_morphology(in.image(i), s.morphology[het_class]), in.label(i));
      }
      return out;
    }
    case ScenarioKind::kLabelsDistributionSkew:
      return apply_label_skew(in, s.dominant[het_class], s.retain, rng);
    case ScenarioKind::kQuantitySkew:
      return apply_quantity_skew(in, s.fractions[het_class]);
  }
  return in;
}

std::array<std::vector<std::size_t>, kNumLabels> shuffled_by_label(const Samples& samples,
                                                                   std::uint64_t seed,
                                                                   Stream stream) {
  std::array<std::vector<std::size_t>, kNumLabels> by_label;
  for (std::size_t i = 0; i < samples.size(); ++i) by_label[samples.label(i)].push_back(i);
  for (std::size_t y = 0; y < by_label.size(); ++y) {
    Rng rng(derive_seed(seed, stream, {y}));
    shuffle(std::span<std::size_t>(by_label[y]), rng);
  }
  return by_label;
}

}  // namespace

std::vector<ClientDataset> partition_clients(const RawDataset& data,
                                             const HeterogeneityScenario& scenario,
                                             std::size_t n_clients, std::size_t per_label,
                                             std::size_t test_per_label, std::uint64_t seed) {
  scenario.validate();
  const std::size_t k = scenario.class_count();
  if (n_clients == 0 || n_clients % k != 0) {
    throw Error(ErrorCode::kNotDivisible, std::to_string(n_clients) +
                                              " clients not divisible into " +
                                              std::to_string(k) + " classes");
  }
  if (per_label == 0) {
    throw Error(ErrorCode::kInsufficientData, "per_label must be at least 1");
  }

  const auto train_idx = shuffled_by_label(data.train, seed, Stream::kPartition);
  const auto test_idx = shuffled_by_label(data.test, seed, Stream::kTestPool);
  for (int y = 0; y < kNumLabels; ++y) {
    const auto have = train_idx[static_cast<std::size_t>(y)].size();
    if (have < n_clients * per_label) {
      throw Error(ErrorCode::kInsufficientData,
                  "label " + std::to_string(y) + ": need " + std::to_string(n_clients * per_label) +
                      " train samples, have " + std::to_string(have));
    }
    const auto have_test = test_idx[static_cast<std::size_t>(y)].size();
    if (have_test < k * test_per_label) {
      throw Error(ErrorCode::kInsufficientData,
                  "label " + std::to_string(y) + ": need " + std::to_string(k * test_per_label) +
                      " test samples, have " + std::to_string(have_test));
    }
  }

  // One transformed test pool per class.
  std::vector<Samples> pools(k);
  for (std::size_t c = 0; c < k; ++c) {
    Samples raw;
    raw.reserve(test_per_label * kNumLabels);
    for (std::size_t y = 0; y < kNumLabels; ++y) {
      for (std::size_t j = 0; j < test_per_label; ++j) {
        const auto i = test_idx[y][c * test_per_label + j];
        raw.push_back(data.test.image(i), data.test.label(i));
      }
    }
    Rng rng(derive_seed(seed, Stream::kTestPool, {0xC1A55, c}));
    pools[c] = transform_samples(raw, scenario, c, rng);
  }

  const std::size_t per_class = n_clients / k;
  std::vector<ClientDataset> clients(n_clients);
  for (std::size_t id = 0; id < n_clients; ++id) {
    auto& cd = clients[id];
    cd.client_id = static_cast<int>(id);
    const std::size_t cls = id / per_class;
    cd.het_class = static_cast<int>(cls);
    Samples raw;
    raw.reserve(per_label * kNumLabels);
    for (std::size_t y = 0; y < kNumLabels; ++y) {
      for (std::size_t j = 0; j < per_label; ++j) {
        const auto i = train_idx[y][id * per_label + j];
        cd.source_indices.push_back(i);
        raw.push_back(data.train.image(i), data.train.label(i));
      }
    }
    Rng rng(derive_seed(seed, Stream::kClientTransform, {id}));
    cd.train = transform_samples(raw, scenario, cls, rng);
    cd.test = pools[cls];
  }
  return clients;
}

void write_partition_manifest(std::ostream& out, std::span<const ClientDataset> clients) {
  out << std::left << std::setw(10) << "client_id" << std::setw(10) << "het_class"
      << std::setw(11) << "train_size" << "test_size\n";
  for (const auto& c : clients) {
    out << std::left << std::setw(10) << c.client_id << std::setw(10) << c.het_class
        << std::setw(11) << c.train.size() << c.test.size() << '\n';
  }
}

}  // namespace fedclave
