#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace fedclave {

using Point = std::vector<double>;

struct KMeansOptions {
  int n_init = 10;
  int max_iter = 300;
};

struct KMeansResult {
  std::vector<Point> centroids;
  std::vector<int> assignment;  // per point, in [0, k)
  double inertia = 0.0;         // sum of squared distances to assigned centroid
  // Inertia after each assignment step of the winning restart.
  std::vector<double> inertia_trace;
  int iterations = 0;
};

double squared_distance(std::span<const double> a, std::span<const double> b);

// Lloyd's algorithm with k-means++ seeding, keeping the restart with the
// lowest inertia. An emptied cluster is reseeded at the point farthest from
// its current centroid. Deterministic in `seed`.
// Throws Error{kTooFewPoints} unless 1 <= k <= points.size().
KMeansResult kmeans(std::span<const Point> points, int k, std::uint64_t seed,
                    const KMeansOptions& options = {});

}  // namespace fedclave
