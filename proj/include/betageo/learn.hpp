#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "betageo/fit.hpp"
#include "betageo/manifold.hpp"
#include "betageo/stats.hpp"

namespace betageo::learn {

/// Which distance/mean pair the classifiers use: the Fisher-Rao geometry or
/// the plain Euclidean one on the (x, y) parameters.
enum class Geometry { riemannian, euclidean };

struct KnnConfig {
  int k = 7;  // positive and odd
  Geometry geometry = Geometry::riemannian;
  ShootingConfig shooting = {};
};

struct KMeansConfig {
  int n_clusters = 2;
  Geometry geometry = Geometry::riemannian;
  int max_iterations = 100;
  std::uint64_t seed = 0;
  int n_init = 10;
  ShootingConfig shooting = {};
  stats::KarcherConfig karcher = {};
};

struct KMeansResult {
  std::vector<int> assignments;
  std::vector<BetaPoint> centroids;
  double inertia = 0.0;
  /// Inertia after each assignment pass of the winning restart (diagnostic;
  /// non-increasing).
  std::vector<double> inertia_trace;
  int iterations = 0;
};

struct CvReport {
  std::vector<double> per_fold_accuracy;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;  // population std over folds
  std::vector<std::pair<std::string, int>> fold_assignments;  // id -> fold
};

/// Distance between two cohort points under the chosen geometry.
double point_distance(const BetaPoint& a, const BetaPoint& b,
                      Geometry geometry, const ShootingConfig& cfg = {});

/// Mean of a point set under the chosen geometry (Frechet or arithmetic).
BetaPoint geometry_mean(std::span<const BetaPoint> points, Geometry geometry,
                        const stats::KarcherConfig& karcher = {});

/// Majority label among the k nearest training points. Distance ties break
/// toward the smaller training index.
std::vector<std::string> knn_classify(std::span<const fit::FittedSubject> train,
                                      std::span<const BetaPoint> test_points,
                                      const KnnConfig& cfg);

/// Nearest-class-centroid classification: one (Frechet or arithmetic) mean
/// per class, test points labeled by the closest centroid.
std::vector<std::string> supervised_kmeans(
    std::span<const fit::FittedSubject> train,
    std::span<const BetaPoint> test_points, Geometry geometry,
    const ShootingConfig& shooting = {},
    const stats::KarcherConfig& karcher = {});

/// Lloyd iterations with k-means++ seeding under the chosen geometry; best of
/// n_init restarts by inertia. Deterministic given the seed.
KMeansResult unsupervised_kmeans(std::span<const BetaPoint> points,
                                 const KMeansConfig& cfg);

/// Best accuracy over all cluster-index -> label mappings (exhaustive; at
/// most 8 clusters/labels).
double clustering_accuracy(std::span<const int> assignments,
                           std::span<const std::string> labels);

/// Stratified fold index per subject; class proportions preserved within one
/// subject, deterministic given the seed.
std::vector<int> stratified_folds(std::span<const fit::FittedSubject> cohort,
                                  int folds, std::uint64_t seed);

CvReport cross_validate_knn(std::span<const fit::FittedSubject> cohort,
                            const KnnConfig& cfg, int folds,
                            std::uint64_t seed);

CvReport cross_validate_skm(std::span<const fit::FittedSubject> cohort,
                            Geometry geometry, int folds, std::uint64_t seed,
                            const ShootingConfig& shooting = {},
                            const stats::KarcherConfig& karcher = {});

}  // namespace betageo::learn
