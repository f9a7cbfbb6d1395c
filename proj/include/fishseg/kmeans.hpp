#pragma once

// Lloyd's k-means over unit-scaled RGB features.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "fishseg/image.hpp"
#include "fishseg/preprocess.hpp"

namespace fishseg {

enum class KMeansInit { plusplus, random_points };

struct KMeansOptions {
  int max_iter = 100;
  double tol = 1e-6;
  KMeansInit init = KMeansInit::plusplus;
};

struct ClusterModel {
  int k = 0;
  std::vector<Point3> centroids;
  std::vector<int> labels;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  /// Objective after every centroid update, in iteration order.
  std::vector<double> history;
};

inline double squared_distance(const Point3& a, const Point3& b) {
  const double d0 = a[0] - b[0];
  const double d1 = a[1] - b[1];
  const double d2 = a[2] - b[2];
  return d0 * d0 + d1 * d1 + d2 * d2;
}

inline double distance(const Point3& a, const Point3& b) { return std::sqrt(squared_distance(a, b)); }

/// Nearest centroid per point; ties go to the lowest centroid index.
inline std::vector<int> assign(std::span<const Point3> points, std::span<const Point3> centroids) {
  if (centroids.empty()) throw ArgumentError("assign: empty centroid set");
  std::vector<int> labels(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    int best = 0;
    double best_d = squared_distance(points[i], centroids[0]);
    for (std::size_t c = 1; c < centroids.size(); ++c) {
      const double d = squared_distance(points[i], centroids[c]);
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(c);
      }
    }
    labels[i] = best;
  }
  return labels;
}

/// Cluster means. An empty cluster is re-seeded to the point farthest from its
/// own (freshly updated) centroid, lowest index on ties; each point is used at
/// most once when several clusters are empty.
inline std::vector<Point3> update_centroids(std::span<const Point3> points,
                                            std::span<const int> labels, int k) {
  if (k < 1) throw ArgumentError("update_centroids: k must be >= 1");
  if (labels.size() != points.size()) throw ArgumentError("update_centroids: label count mismatch");

  std::vector<Point3> sums(static_cast<std::size_t>(k), Point3{0.0, 0.0, 0.0});
  std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const int l = labels[i];
    if (l < 0 || l >= k) throw ArgumentError("update_centroids: label out of range");
    for (int d = 0; d < 3; ++d) sums[l][d] += points[i][d];
    ++counts[l];
  }

  std::vector<Point3> centroids(static_cast<std::size_t>(k), Point3{0.0, 0.0, 0.0});
  bool any_empty = false;
  for (int c = 0; c < k; ++c) {
    if (counts[c] == 0) {
      any_empty = true;
      continue;
    }
    for (int d = 0; d < 3; ++d) centroids[c][d] = sums[c][d] / static_cast<double>(counts[c]);
  }
  if (!any_empty || points.empty()) return centroids;

  std::vector<double> far(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    far[i] = squared_distance(points[i], centroids[labels[i]]);
  }
  for (int c = 0; c < k; ++c) {
    if (counts[c] != 0) continue;
    std::size_t pick = 0;
    for (std::size_t i = 1; i < far.size(); ++i) {
      if (far[i] > far[pick]) pick = i;
    }
    centroids[c] = points[pick];
    far[pick] = -1.0;
  }
  return centroids;
}

inline double objective(std::span<const Point3> points, std::span<const int> labels,
                        std::span<const Point3> centroids) {
  if (labels.size() != points.size()) throw ArgumentError("objective: label count mismatch");
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    total += squared_distance(points[i], centroids[static_cast<std::size_t>(labels[i])]);
  }
  return total;
}

namespace detail {

// 53-bit uniform in [0, 1) straight from the engine, identical on every platform.
inline double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
  return std::min(n - 1, static_cast<std::size_t>(uniform01(rng) * static_cast<double>(n)));
}

inline std::vector<Point3> seed_plusplus(std::span<const Point3> points, int k,
                                         std::mt19937_64& rng) {
  const std::size_t n = points.size();
  std::vector<Point3> centroids;
  centroids.reserve(static_cast<std::size_t>(k));
  centroids.push_back(points[uniform_index(rng, n)]);

  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) d2[i] = squared_distance(points[i], centroids[0]);

  while (centroids.size() < static_cast<std::size_t>(k)) {
    double total = 0.0;
    for (double d : d2) total += d;
    std::size_t pick = 0;
    if (total <= 0.0) {
      pick = uniform_index(rng, n);
    } else {
      const double target = uniform01(rng) * total;
      double acc = 0.0;
      pick = n;
      std::size_t last_positive = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (d2[i] <= 0.0) continue;
        last_positive = i;
        acc += d2[i];
        if (acc > target) {
          pick = i;
          break;
        }
      }
      if (pick == n) pick = last_positive;
    }
    centroids.push_back(points[pick]);
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], squared_distance(points[i], centroids.back()));
    }
  }
  return centroids;
}

inline std::vector<Point3> seed_random(std::span<const Point3> points, int k,
                                       std::mt19937_64& rng) {
  std::vector<std::size_t> idx(points.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::vector<Point3> centroids;
  for (int c = 0; c < k; ++c) {
    const std::size_t j = c + uniform_index(rng, idx.size() - c);
    std::swap(idx[c], idx[j]);
    centroids.push_back(points[idx[c]]);
  }
  return centroids;
}

}  // namespace detail

/// One seeded Lloyd run. Stops when labels repeat, when the objective drops by
/// less than `tol`, or after `max_iter` updates. Bit-reproducible per seed.
inline ClusterModel kmeans(std::span<const Point3> points, int k, std::uint64_t seed,
                           const KMeansOptions& opts = {}) {
  if (k < 1) throw ArgumentError("kmeans: k must be >= 1, got " + std::to_string(k));
  if (static_cast<std::size_t>(k) > points.size()) {
    throw ArgumentError("kmeans: k = " + std::to_string(k) + " exceeds point count " +
                        std::to_string(points.size()));
  }
  if (opts.max_iter < 1) throw ArgumentError("kmeans: max_iter must be >= 1");
  if (!(opts.tol >= 0.0)) throw ArgumentError("kmeans: tol must be >= 0");

  std::mt19937_64 rng(seed);
  ClusterModel model;
  model.k = k;
  model.centroids = opts.init == KMeansInit::plusplus ? detail::seed_plusplus(points, k, rng)
                                                      : detail::seed_random(points, k, rng);
  model.labels = assign(points, model.centroids);

  double previous = std::numeric_limits<double>::infinity();
  for (int it = 1; it <= opts.max_iter; ++it) {
    model.centroids = update_centroids(points, model.labels, k);
    model.objective = objective(points, model.labels, model.centroids);
    model.history.push_back(model.objective);
    model.iterations = it;
    if (previous - model.objective < opts.tol) {
      model.converged = true;
      break;
    }
    auto next = assign(points, model.centroids);
    if (next == model.labels) {
      model.converged = true;
      break;
    }
    model.labels = std::move(next);
    previous = model.objective;
  }
  return model;
}

/// Runs `restarts` seeds (seed, seed + 1, ...) and keeps the lowest objective,
/// earliest run on ties.
inline ClusterModel kmeans_best_of(std::span<const Point3> points, int k, std::uint64_t seed,
                                   int restarts, const KMeansOptions& opts = {}) {
  if (restarts < 1) throw ArgumentError("kmeans: restarts must be >= 1");
  ClusterModel best = kmeans(points, k, seed, opts);
  for (int r = 1; r < restarts; ++r) {
    ClusterModel m = kmeans(points, k, seed + static_cast<std::uint64_t>(r), opts);
    if (m.objective < best.objective) best = std::move(m);
  }
  return best;
}

/// Paints every pixel with its centroid color.
inline RasterImage reconstruct_segmented(const ClusterModel& model, int w, int h) {
  if (w <= 0 || h <= 0 ||
      model.labels.size() != static_cast<std::size_t>(w) * static_cast<std::size_t>(h)) {
    throw ArgumentError("reconstruct_segmented: " + std::to_string(model.labels.size()) +
                        " labels cannot form " + std::to_string(w) + "x" + std::to_string(h));
  }
  std::vector<Rgb> palette;
  palette.reserve(model.centroids.size());
  for (const auto& c : model.centroids) palette.push_back(to_rgb(c));
  RasterImage out(w, h);
  for (std::size_t i = 0; i < model.labels.size(); ++i) out[i] = palette[model.labels[i]];
  return out;
}

}  // namespace fishseg
