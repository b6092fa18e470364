#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fedclave {

// Counts n_ij of items with true class i and predicted cluster j. Label
// values are compacted to 0..|U|-1 and 0..|V|-1 in order of first appearance.
struct ContingencyTable {
  std::vector<std::vector<std::size_t>> counts;
  std::vector<std::size_t> row_sums;
  std::vector<std::size_t> col_sums;
  std::size_t total = 0;

  // Throws Error{kLengthMismatch | kTooFewItems}.
  static ContingencyTable build(std::span<const int> truth, std::span<const int> pred);
};

// Adjusted Rand Index; 1.0 when both partitions are trivially identical
// (single cluster or all singletons on both sides).
double adjusted_rand_index(std::span<const int> truth, std::span<const int> pred);

// Adjusted Mutual Information with arithmetic-mean normalization and the
// exact hypergeometric expected MI. Both partitions single-cluster gives 1.0;
// a vanishing normalizer gives 1.0 for identical partitions and 0.0 otherwise.
double adjusted_mutual_information(std::span<const int> truth, std::span<const int> pred);

struct HomogeneityCompleteness {
  double homogeneity = 0.0;
  double completeness = 0.0;
  double v_measure = 0.0;
};

// hom = 1 when H(truth) = 0, cmplt = 1 when H(pred) = 0, vm = 0 when both are 0.
HomogeneityCompleteness homogeneity_completeness_v(std::span<const int> truth,
                                                   std::span<const int> pred);

struct MetricsReport {
  double ari = 0.0;
  double ami = 0.0;
  double homogeneity = 0.0;
  double completeness = 0.0;
  double v_measure = 0.0;
};

MetricsReport clustering_metrics(std::span<const int> truth, std::span<const int> pred);

}  // namespace fedclave
