#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fedclave/data_ingest.hpp"
#include "fedclave/random.hpp"

namespace fedclave {

enum class ScenarioKind {
  kConceptShiftFeatures,
  kConceptShiftLabels,
  kFeaturesDistributionSkew,
  kLabelsDistributionSkew,
  kQuantitySkew,
  kIid,
};

std::string_view scenario_name(ScenarioKind kind);
// Throws ConfigError("scenario", ...) on an unknown name.
ScenarioKind parse_scenario(std::string_view name);

enum class MorphologyOp { kNone, kErode, kDilate };

// One heterogeneity class per entry of the kind-specific list; the number of
// classes K is the length of that list (1 for iid).
struct HeterogeneityScenario {
  ScenarioKind kind = ScenarioKind::kIid;
  std::vector<int> rotations;                    // degrees
  std::vector<std::pair<int, int>> swaps;        // label pairs
  std::vector<MorphologyOp> morphology;
  std::vector<std::array<int, 2>> dominant;      // labels kept in full
  double retain = 0.001;                         // fraction of other labels kept
  std::vector<double> fractions;                 // per-label volume fraction

  std::size_t class_count() const;
  // Throws Error{kInvalidScenario} if parameters are inconsistent.
  void validate() const;
};

// The parameterization used in the comparative evaluation:
//   concept-shift-features  rotations {0, 90, 180, 270}
//   concept-shift-labels    swaps (1,7) (2,7) (4,7) (3,8) (5,6) (7,9)
//   features-distribution   none / erode / dilate
//   labels-distribution     class c keeps {2c, 2c+1}, others at `retain`
//   quantity-skew           fractions {0.2, 0.4667, 0.7333, 1.0}
HeterogeneityScenario default_scenario(ScenarioKind kind);

struct ClientDataset {
  int client_id = 0;
  Samples train;
  Samples test;
  int het_class = 0;
  // Indices into the source train partition (before skew down-sampling).
  std::vector<std::size_t> source_indices;
};

// Client c * n/K .. (c+1) * n/K - 1 get class c. Train samples are drawn
// disjointly per label; each class has one test pool shared by its members.
// Throws Error{kNotDivisible | kInsufficientData}.
std::vector<ClientDataset> partition_clients(const RawDataset& data,
                                             const HeterogeneityScenario& scenario,
                                             std::size_t n_clients, std::size_t per_label,
                                             std::size_t test_per_label, std::uint64_t seed);

// Clockwise: a 90 degree turn maps (r, c) to (c, 27 - r).
// Throws Error{kInvalidAngle} unless degrees is 0, 90, 180 or 270.
Image apply_rotation(ImageView img, int degrees);

int apply_label_swap(int label, std::pair<int, int> pair);

// 3x3 square element, one pass, out-of-bounds neighbours read as 0.
Image apply_morphology(ImageView img, MorphologyOp op);

// Keeps every sample of the dominant labels and floor(count * retain) samples
// of each other label, picked by a draw from `rng`. Order of kept samples
// follows the input.
Samples apply_label_skew(const Samples& samples, std::array<int, 2> dominant, double retain,
                         Rng& rng);

// Keeps the first floor(count * fraction) samples of each label.
Samples apply_quantity_skew(const Samples& samples, double fraction);

// Text table "client_id het_class train_size test_size".
void write_partition_manifest(std::ostream& out, std::span<const ClientDataset> clients);

}  // namespace fedclave
