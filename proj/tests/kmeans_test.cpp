#include <gtest/gtest.h>

#include <random>
#include <set>

#include "fishseg/kmeans.hpp"
#include "test_support.hpp"

using namespace fishseg;

TEST(Assign, NearestCentroid) {
  const std::vector<Point3> c{{0, 0, 0}, {1, 1, 1}};
  const std::vector<Point3> p{{0, 0, 0}};
  EXPECT_EQ(assign(p, c), std::vector<int>{0});
}

TEST(Assign, TieGoesToLowestIndex) {
  const std::vector<Point3> c{{0, 0, 0}, {1, 1, 1}};
  const std::vector<Point3> p{{0.5, 0.5, 0.5}};
  EXPECT_EQ(assign(p, c), std::vector<int>{0});
}

TEST(Assign, EuclideanDistance) {
  const std::vector<Point3> c{{0, 0, 0}, {0.5, 0, 0}};
  const std::vector<Point3> p{{0.2, 0, 0}};
  EXPECT_NEAR(distance(p[0], c[0]), 0.2, 1e-15);
  EXPECT_NEAR(distance(p[0], c[1]), 0.3, 1e-15);
  EXPECT_EQ(assign(p, c), std::vector<int>{0});
}

TEST(Assign, EmptyCentroidsRejected) {
  const std::vector<Point3> p{{0, 0, 0}};
  EXPECT_THROW(assign(p, {}), ArgumentError);
}

TEST(Assign, ScaleInvariant) {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 50; ++trial) {
    auto pts = support::random_points(40, rng);
    auto cs = support::random_points(5, rng);
    const auto labels = assign(pts, cs);
    for (double scale : {0.5, 3.0, 17.0}) {
      auto sp = pts;
      auto sc = cs;
      for (auto& p : sp) for (auto& v : p) v *= scale;
      for (auto& p : sc) for (auto& v : p) v *= scale;
      EXPECT_EQ(assign(sp, sc), labels);
    }
  }
}

TEST(UpdateCentroids, MeanOfMembers) {
  const std::vector<Point3> p{{0, 0, 0}, {1, 1, 1}};
  const std::vector<int> l{0, 0};
  const auto c = update_centroids(p, l, 1);
  EXPECT_EQ(c[0], (Point3{0.5, 0.5, 0.5}));
}

TEST(UpdateCentroids, SingletonClusters) {
  const std::vector<Point3> p{{0.1, 0.2, 0.3}, {0.9, 0.8, 0.7}, {0.4, 0.4, 0.4}};
  const std::vector<int> l{0, 1, 2};
  EXPECT_EQ(update_centroids(p, l, 3), p);
}

TEST(UpdateCentroids, HandComputedMeans) {
  const std::vector<Point3> p{{0, 0, 0}, {0.2, 0, 0}, {1, 0, 0}};
  const std::vector<int> l{0, 0, 1};
  const auto c = update_centroids(p, l, 2);
  EXPECT_NEAR(c[0][0], 0.1, 1e-15);
  EXPECT_EQ(c[1], (Point3{1, 0, 0}));
}

TEST(UpdateCentroids, EmptyClusterReseededToFarthestPoint) {
  // Cluster 0 holds everything; its mean is 0.3, so the point at 1.0 is farthest.
  const std::vector<Point3> p{{0, 0, 0}, {0.2, 0, 0}, {1, 0, 0}, {0.0, 0, 0}};
  const std::vector<int> l{0, 0, 0, 0};
  const auto c = update_centroids(p, l, 3);
  EXPECT_NEAR(c[0][0], 0.3, 1e-15);
  EXPECT_EQ(c[1], (Point3{1, 0, 0}));
  // Next farthest: the two zeros tie at 0.3, lowest index wins.
  EXPECT_EQ(c[2], (Point3{0, 0, 0}));
}

TEST(Objective, Values) {
  const std::vector<Point3> p{{0, 0, 0}, {1, 1, 1}};
  EXPECT_EQ(objective(p, std::vector<int>{0, 1}, p), 0.0);

  const std::vector<Point3> one{{1, 0, 0}};
  const std::vector<Point3> origin{{0, 0, 0}};
  EXPECT_EQ(objective(one, std::vector<int>{0}, origin), 1.0);

  const std::vector<Point3> two{{0.2, 0, 0}, {0, 0.3, 0}};
  EXPECT_NEAR(objective(two, std::vector<int>{0, 0}, origin), 0.13, 1e-15);
}

TEST(KMeans, SeparableClusters) {
  const std::vector<Point3> p{{0, 0, 0}, {0, 0, 0}, {1, 1, 1}, {1, 1, 1}};
  const auto m = kmeans(p, 2, 0);
  const std::set<Point3> centroids(m.centroids.begin(), m.centroids.end());
  EXPECT_EQ(centroids, (std::set<Point3>{{0, 0, 0}, {1, 1, 1}}));
  EXPECT_EQ(m.objective, 0.0);
  EXPECT_TRUE(m.converged);
}

TEST(KMeans, SingleClusterIsGlobalMean) {
  std::mt19937_64 rng(5);
  const auto p = support::random_points(100, rng);
  Point3 mean{0, 0, 0};
  for (const auto& q : p) for (int d = 0; d < 3; ++d) mean[d] += q[d] / p.size();
  const auto m = kmeans(p, 1, 77);
  EXPECT_LE(m.iterations, 2);
  EXPECT_TRUE(m.converged);
  for (int d = 0; d < 3; ++d) EXPECT_NEAR(m.centroids[0][d], mean[d], 1e-12);
}

TEST(KMeans, SixPointFixtureMatchesExhaustiveOptimum) {
  const std::vector<Point3> p{{0.10, 0.20, 0.10}, {0.15, 0.25, 0.05}, {0.30, 0.10, 0.20},
                              {0.80, 0.70, 0.90}, {0.65, 0.90, 0.75}, {0.45, 0.50, 0.40}};
  const double optimum = support::brute_force_two_means(p);
  const auto m = kmeans_best_of(p, 2, 0, 10);
  EXPECT_NEAR(m.objective, optimum, 1e-9);
}

TEST(KMeans, ArgumentErrors) {
  const std::vector<Point3> p{{0, 0, 0}, {1, 1, 1}};
  EXPECT_THROW(kmeans(p, 3, 0), ArgumentError);
  EXPECT_THROW(kmeans(p, 0, 0), ArgumentError);
  EXPECT_THROW(kmeans(p, 1, 0, {.max_iter = 0}), ArgumentError);
  EXPECT_THROW(kmeans(p, 1, 0, {.tol = -1.0}), ArgumentError);
}

TEST(KMeans, ObjectiveNonIncreasing) {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto p = support::random_points(200, rng);
    const auto m = kmeans(p, 8, trial, {.tol = 0.0});
    for (std::size_t i = 1; i < m.history.size(); ++i) EXPECT_LE(m.history[i], m.history[i - 1]);
  }
}

TEST(KMeans, DeterministicPerSeed) {
  std::mt19937_64 rng(8);
  const auto p = support::random_points(300, rng);
  for (KMeansInit init : {KMeansInit::plusplus, KMeansInit::random_points}) {
    const auto a = kmeans(p, 6, 1234, {.init = init});
    const auto b = kmeans(p, 6, 1234, {.init = init});
    EXPECT_EQ(a.labels, b.labels);
    EXPECT_EQ(a.centroids, b.centroids);
    EXPECT_EQ(a.iterations, b.iterations);
  }
}

TEST(KMeans, ConvergedCentroidsAreMembersMean) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = support::random_points(150, rng);
    const auto m = kmeans(p, 5, trial, {.tol = 0.0});
    ASSERT_TRUE(m.converged);
    for (int c = 0; c < 5; ++c) {
      Point3 sum{0, 0, 0};
      int n = 0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        if (m.labels[i] != c) continue;
        for (int d = 0; d < 3; ++d) sum[d] += p[i][d];
        ++n;
      }
      if (n == 0) continue;
      for (int d = 0; d < 3; ++d) EXPECT_NEAR(m.centroids[c][d], sum[d] / n, 1e-12);
    }
    for (int l : m.labels) EXPECT_LT(l, 5);
  }
}

TEST(KMeans, SmallInstancesMatchBruteForce) {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> size(2, 8);
  for (int trial = 0; trial < 25; ++trial) {
    const auto p = support::random_points(static_cast<std::size_t>(size(rng)), rng);
    EXPECT_NEAR(kmeans_best_of(p, 2, 1000 * trial, 10).objective, support::brute_force_two_means(p),
                1e-9);
  }
}

TEST(Reconstruct, SingleCentroidIsConstant) {
  std::mt19937_64 rng(4);
  const RasterImage img = support::random_rgb(6, 5, rng);
  const auto m = kmeans(reshape_to_features(img), 1, 0);
  const RasterImage out = reconstruct_segmented(m, 6, 5);
  for (const auto& px : out) EXPECT_EQ(px, out[0]);
}

TEST(Reconstruct, ZeroObjectiveReproducesImage) {
  RasterImage img(2, 2);
  img[0] = img[1] = {0, 0, 0};
  img[2] = img[3] = {255, 255, 255};
  const auto m = kmeans(reshape_to_features(img), 2, 3);
  EXPECT_EQ(reconstruct_segmented(m, 2, 2), img);
}

TEST(Reconstruct, AtMostKColors) {
  std::mt19937_64 rng(17);
  for (int k : {1, 2, 5, 8}) {
    const RasterImage img = support::random_rgb(20, 15, rng);
    const auto m = kmeans(reshape_to_features(img), k, k);
    const RasterImage out = reconstruct_segmented(m, 20, 15);
    std::set<std::tuple<int, int, int>> colors;
    for (const auto& px : out) colors.insert({px.r, px.g, px.b});
    EXPECT_LE(colors.size(), static_cast<std::size_t>(k));
  }
}

TEST(Reconstruct, DimensionMismatch) {
  const std::vector<Point3> p{{0, 0, 0}, {1, 1, 1}};
  EXPECT_THROW(reconstruct_segmented(kmeans(p, 1, 0), 3, 1), ArgumentError);
}
