#include "fedclave/kmeans.hpp"

#include <algorithm>
#include <limits>

#include "fedclave/errors.hpp"
#include "fedclave/random.hpp"

namespace fedclave {

double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

namespace {

std::vector<Point> plus_plus_seeds(std::span<const Point> points, int k, Rng& rng) {
  const auto n = points.size();
  std::vector<Point> centers;
  centers.push_back(points[uniform_index(rng, n)]);
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(points[i], centers[0]);
  while (static_cast<int>(centers.size()) < k) {
    double total = 0.0;
    for (const double v : d2) total += v;
    std::size_t pick = 0;
    if (total > 0.0) {
      const double target = uniform_unit(rng) * total;
      double run = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        run += d2[i];
        if (run > target && d2[i] > 0.0) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<std::size_t>(uniform_index(rng, n));
    }
    centers.push_back(points[pick]);
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(points[i], centers.back()));
    }
  }
  return centers;
}

// Assigns each point to its nearest centroid (lowest index on ties); returns
// the inertia and fills `dist` with each point's squared distance.
double assign(std::span<const Point> points, const std::vector<Point>& centroids,
              std::vector<int>& labels, std::vector<double>& dist) {
  double inertia = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < centroids.size(); ++c) {
      const double d = squared_distance(points[i], centroids[c]);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    labels[i] = best;
    dist[i] = best_d;
    inertia += best_d;
  }
  return inertia;
}

// Moves the farthest point of a multi-member cluster into each empty
// cluster. Returns the updated inertia.
double repair_empty(std::span<const Point> points, std::vector<Point>& centroids,
                    std::vector<int>& labels, std::vector<double>& dist, double inertia) {
  const auto k = centroids.size();
  std::vector<std::size_t> counts(k, 0);
  for (const int l : labels) ++counts[static_cast<std::size_t>(l)];
  for (std::size_t c = 0; c < k; ++c) {
    if (counts[c] != 0) continue;
    std::size_t far = points.size();
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (counts[static_cast<std::size_t>(labels[i])] < 2) continue;
      if (far == points.size() || dist[i] > dist[far]) far = i;
    }
    if (far == points.size()) break;
    --counts[static_cast<std::size_t>(labels[far])];
    ++counts[c];
    labels[far] = static_cast<int>(c);
    centroids[c] = points[far];
    inertia -= dist[far];
    dist[far] = 0.0;
  }
  return inertia;
}

void update_centroids(std::span<const Point> points, const std::vector<int>& labels,
                      std::vector<Point>& centroids) {
  const auto dim = points.front().size();
  std::vector<Point> sums(centroids.size(), Point(dim, 0.0));
  std::vector<std::size_t> counts(centroids.size(), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    auto& s = sums[static_cast<std::size_t>(labels[i])];
    for (std::size_t j = 0; j < dim; ++j) s[j] += points[i][j];
    ++counts[static_cast<std::size_t>(labels[i])];
  }
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    if (counts[c] == 0) continue;
    const double inv = 1.0 / static_cast<double>(counts[c]);
    for (std::size_t j = 0; j < dim; ++j) centroids[c][j] = sums[c][j] * inv;
  }
}

KMeansResult lloyd(std::span<const Point> points, int k, Rng& rng, const KMeansOptions& opt) {
  KMeansResult r;
  r.centroids = plus_plus_seeds(points, k, rng);
  r.assignment.assign(points.size(), -1);
  std::vector<int> labels(points.size());
  std::vector<double> dist(points.size());
  for (int it = 0; it < opt.max_iter; ++it) {
    double inertia = assign(points, r.centroids, labels, dist);
    inertia = repair_empty(points, r.centroids, labels, dist, inertia);
    r.inertia_trace.push_back(inertia);
    r.iterations = it + 1;
    const bool stable = labels == r.assignment;
    r.assignment = labels;
    r.inertia = inertia;
    if (stable) return r;
    update_centroids(points, labels, r.centroids);
  }
  // Iteration cap reached: make the assignment consistent with the centroids.
  r.inertia = assign(points, r.centroids, r.assignment, dist);
  return r;
}

}  // namespace

KMeansResult kmeans(std::span<const Point> points, int k, std::uint64_t seed,
                    const KMeansOptions& options) {
  if (k < 1 || points.size() < static_cast<std::size_t>(k)) {
    throw Error(ErrorCode::kTooFewPoints, "k-means needs 1 <= k <= #points (k=" +
                                              std::to_string(k) + ", points=" +
                                              std::to_string(points.size()) + ")");
  }
  KMeansResult best;
  bool have_best = false;
  for (int restart = 0; restart < std::max(options.n_init, 1); ++restart) {
    Rng rng(derive_seed(seed, Stream::kKMeans, {static_cast<std::uint64_t>(restart)}));
    auto r = lloyd(points, k, rng, options);
    if (!have_best || r.inertia < best.inertia) {
      best = std::move(r);
      have_best = true;
    }
  }
  return best;
}

}  // namespace fedclave
