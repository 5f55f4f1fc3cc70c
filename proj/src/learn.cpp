#include "betageo/learn.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "betageo/random.hpp"

namespace betageo::learn {

namespace {

std::vector<std::string> distinct_labels(
    std::span<const fit::FittedSubject> subjects) {
  std::vector<std::string> labels;
  for (const auto& s : subjects) {
    if (std::find(labels.begin(), labels.end(), s.label) == labels.end()) {
      labels.push_back(s.label);
    }
  }
  return labels;
}

// Majority vote over neighbors sorted by (distance, train index); label ties
// break toward the label holding the best-ranked neighbor.
std::string vote(const std::vector<std::pair<double, std::size_t>>& nearest,
                 std::span<const fit::FittedSubject> train, int k) {
  std::map<std::string, int> counts;
  std::map<std::string, int> best_rank;
  for (int r = 0; r < k; ++r) {
    const std::string& label = train[nearest[r].second].label;
    counts[label] += 1;
    if (!best_rank.count(label)) best_rank[label] = r;
  }
  std::string winner;
  int winner_count = -1, winner_rank = 0;
  for (const auto& [label, count] : counts) {
    const int rank = best_rank[label];
    if (count > winner_count ||
        (count == winner_count && rank < winner_rank)) {
      winner = label;
      winner_count = count;
      winner_rank = rank;
    }
  }
  return winner;
}

void validate_knn(const KnnConfig& cfg, std::size_t train_size) {
  if (cfg.k < 1 || cfg.k % 2 == 0) {
    throw std::invalid_argument("knn: k must be a positive odd integer");
  }
  if (static_cast<std::size_t>(cfg.k) > train_size) {
    throw std::invalid_argument("knn: k=" + std::to_string(cfg.k) +
                                " exceeds the training set size " +
                                std::to_string(train_size));
  }
}

std::vector<std::string> knn_from_distances(
    std::span<const fit::FittedSubject> train,
    const std::vector<std::vector<double>>& dist,  // [test][train]
    const KnnConfig& cfg) {
  std::vector<std::string> out;
  out.reserve(dist.size());
  for (const auto& row : dist) {
    std::vector<std::pair<double, std::size_t>> order;
    order.reserve(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) order.emplace_back(row[j], j);
    std::sort(order.begin(), order.end());
    out.push_back(vote(order, train, cfg.k));
  }
  return out;
}

// Index of the closest centroid; ties toward the smaller index.
std::size_t nearest_index(const BetaPoint& p,
                          std::span<const BetaPoint> centroids,
                          Geometry geometry, const ShootingConfig& cfg,
                          double* best_distance = nullptr) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < centroids.size(); ++c) {
    const double d = point_distance(p, centroids[c], geometry, cfg);
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  if (best_distance) *best_distance = best_d;
  return best;
}

BetaPoint cluster_mean(std::span<const BetaPoint> members, Geometry geometry,
                       const stats::KarcherConfig& karcher,
                       const BetaPoint* warm_start) {
  if (geometry == Geometry::euclidean) {
    double sx = 0.0, sy = 0.0;
    for (const BetaPoint& p : members) {
      sx += p.x();
      sy += p.y();
    }
    const double n = static_cast<double>(members.size());
    return {sx / n, sy / n};
  }
  const stats::MeanResult r =
      warm_start ? stats::frechet_mean(members, karcher, *warm_start)
                 : stats::frechet_mean(members, karcher);
  return r.mean;  // best iterate even when not converged
}

struct RestartOutcome {
  std::vector<int> assignments;
  std::vector<BetaPoint> centroids;
  double inertia = std::numeric_limits<double>::infinity();
  std::vector<double> trace;
  int iterations = 0;
};

}  // namespace

double point_distance(const BetaPoint& a, const BetaPoint& b,
                      Geometry geometry, const ShootingConfig& cfg) {
  if (geometry == Geometry::euclidean) {
    const double dx = a.x() - b.x();
    const double dy = a.y() - b.y();
    return std::sqrt(dx * dx + dy * dy);
  }
  return distance(a, b, cfg);
}

BetaPoint geometry_mean(std::span<const BetaPoint> points, Geometry geometry,
                        const stats::KarcherConfig& karcher) {
  if (points.empty()) throw std::invalid_argument("geometry_mean: empty point set");
  return cluster_mean(points, geometry, karcher, nullptr);
}

std::vector<std::string> knn_classify(std::span<const fit::FittedSubject> train,
                                      std::span<const BetaPoint> test_points,
                                      const KnnConfig& cfg) {
  if (train.empty()) throw std::invalid_argument("knn: empty training set");
  validate_knn(cfg, train.size());
  std::vector<std::vector<double>> dist(test_points.size());
  for (std::size_t i = 0; i < test_points.size(); ++i) {
    dist[i].reserve(train.size());
    for (const auto& t : train) {
      dist[i].push_back(
          point_distance(test_points[i], t.point, cfg.geometry, cfg.shooting));
    }
  }
  return knn_from_distances(train, dist, cfg);
}

std::vector<std::string> supervised_kmeans(
    std::span<const fit::FittedSubject> train,
    std::span<const BetaPoint> test_points, Geometry geometry,
    const ShootingConfig& shooting, const stats::KarcherConfig& karcher) {
  if (train.empty()) {
    throw std::invalid_argument("supervised_kmeans: empty training set");
  }
  const std::vector<std::string> labels = distinct_labels(train);
  std::vector<BetaPoint> centroids;
  centroids.reserve(labels.size());
  for (const std::string& label : labels) {
    std::vector<BetaPoint> members;
    for (const auto& s : train) {
      if (s.label == label) members.push_back(s.point);
    }
    if (members.empty()) {
      throw std::invalid_argument("supervised_kmeans: empty class " + label);
    }
    centroids.push_back(cluster_mean(members, geometry, karcher, nullptr));
  }
  std::vector<std::string> out;
  out.reserve(test_points.size());
  for (const BetaPoint& p : test_points) {
    out.push_back(labels[nearest_index(p, centroids, geometry, shooting)]);
  }
  return out;
}

KMeansResult unsupervised_kmeans(std::span<const BetaPoint> points,
                                 const KMeansConfig& cfg) {
  const std::size_t n = points.size();
  if (cfg.n_clusters < 1 ||
      static_cast<std::size_t>(cfg.n_clusters) > n) {
    throw std::invalid_argument(
        "unsupervised_kmeans: n_clusters must be in [1, n_points]");
  }
  if (cfg.max_iterations < 1 || cfg.n_init < 1) {
    throw std::invalid_argument("unsupervised_kmeans: invalid iteration budget");
  }
  const std::size_t k = static_cast<std::size_t>(cfg.n_clusters);

  // Point-to-point distances (k-means++ seeds are data points); filled on
  // demand and shared across restarts.
  std::vector<std::vector<double>> p2p(n);
  const auto point_to_point = [&](std::size_t i, std::size_t j) {
    if (i == j) return 0.0;
    if (p2p[i].empty()) {
      p2p[i].assign(n, std::numeric_limits<double>::quiet_NaN());
    }
    double& slot = p2p[i][j];
    if (std::isnan(slot)) {
      slot = point_distance(points[i], points[j], cfg.geometry, cfg.shooting);
    }
    return slot;
  };

  RestartOutcome best;
  for (int restart = 0; restart < cfg.n_init; ++restart) {
    std::mt19937_64 gen =
        rng::make_stream(cfg.seed, static_cast<std::uint64_t>(restart));

    // k-means++ seeding: first seed uniform, then D^2 sampling.
    std::vector<std::size_t> seeds;
    seeds.push_back(rng::uniform_below(gen, n));
    std::vector<double> d2(n);
    for (std::size_t i = 0; i < n; ++i) {
      const double d = point_to_point(i, seeds[0]);
      d2[i] = d * d;
    }
    while (seeds.size() < k) {
      const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
      std::size_t pick;
      if (total > 0.0) {
        const double target = rng::uniform01(gen) * total;
        double cum = 0.0;
        pick = n - 1;
        for (std::size_t i = 0; i < n; ++i) {
          cum += d2[i];
          if (cum > target) {
            pick = i;
            break;
          }
        }
      } else {
        pick = rng::uniform_below(gen, n);
      }
      seeds.push_back(pick);
      for (std::size_t i = 0; i < n; ++i) {
        const double d = point_to_point(i, pick);
        d2[i] = std::min(d2[i], d * d);
      }
    }
    std::vector<BetaPoint> centroids;
    centroids.reserve(k);
    for (std::size_t s : seeds) centroids.push_back(points[s]);

    std::vector<int> assignments(n, -1);
    std::vector<double> assigned_d(n, 0.0);
    std::vector<double> trace;
    int iterations = 0;

    for (int it = 0; it < cfg.max_iterations; ++it) {
      iterations = it + 1;
      std::vector<int> next(n);
      for (std::size_t i = 0; i < n; ++i) {
        next[i] = static_cast<int>(nearest_index(
            points[i], centroids, cfg.geometry, cfg.shooting, &assigned_d[i]));
      }

      // Empty-cluster repair: reseed with the point farthest from its
      // centroid (only stealing from clusters that keep >= 2 members).
      std::vector<int> sizes(k, 0);
      for (int a : next) sizes[a] += 1;
      for (std::size_t c = 0; c < k; ++c) {
        if (sizes[c] > 0) continue;
        std::size_t far = n;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (sizes[next[i]] < 2) continue;
          if (assigned_d[i] > far_d) {
            far_d = assigned_d[i];
            far = i;
          }
        }
        if (far == n) break;  // nothing stealable
        sizes[next[far]] -= 1;
        next[far] = static_cast<int>(c);
        sizes[c] = 1;
        assigned_d[far] =
            point_distance(points[far], centroids[c], cfg.geometry, cfg.shooting);
      }

      double j = 0.0;
      for (std::size_t i = 0; i < n; ++i) j += assigned_d[i] * assigned_d[i];
      trace.push_back(j);

      if (next == assignments) break;
      assignments = std::move(next);

      for (std::size_t c = 0; c < k; ++c) {
        std::vector<BetaPoint> members;
        for (std::size_t i = 0; i < n; ++i) {
          if (assignments[i] == static_cast<int>(c)) members.push_back(points[i]);
        }
        centroids[c] =
            cluster_mean(members, cfg.geometry, cfg.karcher, &centroids[c]);
      }
    }

    double inertia = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = point_distance(points[i], centroids[assignments[i]],
                                      cfg.geometry, cfg.shooting);
      inertia += d * d;
    }
    if (inertia < best.inertia) {
      best.assignments = assignments;
      best.centroids = centroids;
      best.inertia = inertia;
      best.trace = trace;
      best.iterations = iterations;
    }
  }

  KMeansResult result{std::move(best.assignments), std::move(best.centroids),
                      best.inertia, std::move(best.trace), best.iterations};
  return result;
}

double clustering_accuracy(std::span<const int> assignments,
                           std::span<const std::string> labels) {
  if (assignments.size() != labels.size()) {
    throw std::invalid_argument("clustering_accuracy: length mismatch");
  }
  if (assignments.empty()) {
    throw std::invalid_argument("clustering_accuracy: empty input");
  }
  std::vector<std::string> names;
  std::vector<int> label_ids(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) {
    auto it = std::find(names.begin(), names.end(), labels[i]);
    if (it == names.end()) {
      names.push_back(labels[i]);
      it = std::prev(names.end());
    }
    label_ids[i] = static_cast<int>(it - names.begin());
  }
  int n_clusters = 0;
  for (int a : assignments) {
    if (a < 0) throw std::invalid_argument("clustering_accuracy: negative cluster index");
    n_clusters = std::max(n_clusters, a + 1);
  }
  const int side = std::max(n_clusters, static_cast<int>(names.size()));
  if (side > 8) {
    throw std::invalid_argument(
        "clustering_accuracy: exhaustive matching supports at most 8 clusters");
  }
  // counts padded to a square so permutations handle k != #labels
  std::vector<std::vector<long>> counts(side, std::vector<long>(side, 0));
  for (std::size_t i = 0; i < assignments.size(); ++i) {
    counts[assignments[i]][label_ids[i]] += 1;
  }
  std::vector<int> perm(side);
  std::iota(perm.begin(), perm.end(), 0);
  long best = 0;
  do {
    long hits = 0;
    for (int c = 0; c < side; ++c) hits += counts[c][perm[c]];
    best = std::max(best, hits);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return static_cast<double>(best) / static_cast<double>(assignments.size());
}

std::vector<int> stratified_folds(std::span<const fit::FittedSubject> cohort,
                                  int folds, std::uint64_t seed) {
  if (folds < 2) throw std::invalid_argument("cross-validation needs folds >= 2");
  const std::vector<std::string> labels = distinct_labels(cohort);
  std::vector<int> fold_of(cohort.size(), -1);
  std::size_t offset = 0;
  for (std::size_t c = 0; c < labels.size(); ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < cohort.size(); ++i) {
      if (cohort[i].label == labels[c]) members.push_back(i);
    }
    if (members.size() < static_cast<std::size_t>(folds)) {
      throw std::invalid_argument("class '" + labels[c] + "' has " +
                                  std::to_string(members.size()) +
                                  " members, fewer than " +
                                  std::to_string(folds) + " folds");
    }
    std::mt19937_64 gen = rng::make_stream(seed, c);
    rng::shuffle(gen, members);
    // rotate the dealing start across classes to keep global fold sizes even
    for (std::size_t j = 0; j < members.size(); ++j) {
      fold_of[members[j]] = static_cast<int>((offset + j) % folds);
    }
    offset = (offset + members.size()) % folds;
  }
  return fold_of;
}

namespace {

CvReport run_cv(std::span<const fit::FittedSubject> cohort, int folds,
                std::uint64_t seed,
                const std::function<std::vector<std::string>(
                    const std::vector<fit::FittedSubject>&,
                    const std::vector<BetaPoint>&)>& classify) {
  const std::vector<int> fold_of = stratified_folds(cohort, folds, seed);
  CvReport report;
  report.per_fold_accuracy.reserve(folds);
  for (int f = 0; f < folds; ++f) {
    std::vector<fit::FittedSubject> train;
    std::vector<BetaPoint> test_points;
    std::vector<std::string> test_labels;
    for (std::size_t i = 0; i < cohort.size(); ++i) {
      if (fold_of[i] == f) {
        test_points.push_back(cohort[i].point);
        test_labels.push_back(cohort[i].label);
      } else {
        train.push_back(cohort[i]);
      }
    }
    const std::vector<std::string> predicted = classify(train, test_points);
    int hits = 0;
    for (std::size_t i = 0; i < predicted.size(); ++i) {
      if (predicted[i] == test_labels[i]) ++hits;
    }
    report.per_fold_accuracy.push_back(static_cast<double>(hits) /
                                       static_cast<double>(predicted.size()));
  }
  double mean = 0.0;
  for (double a : report.per_fold_accuracy) mean += a;
  mean /= static_cast<double>(folds);
  double var = 0.0;
  for (double a : report.per_fold_accuracy) var += (a - mean) * (a - mean);
  report.mean_accuracy = mean;
  report.std_accuracy = std::sqrt(var / static_cast<double>(folds));
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    report.fold_assignments.emplace_back(cohort[i].id, fold_of[i]);
  }
  return report;
}

}  // namespace

CvReport cross_validate_knn(std::span<const fit::FittedSubject> cohort,
                            const KnnConfig& cfg, int folds,
                            std::uint64_t seed) {
  // validate k against the smallest training fold up front
  const std::size_t n = cohort.size();
  const std::size_t max_fold = (n + static_cast<std::size_t>(folds) - 1) /
                               static_cast<std::size_t>(folds);
  if (cfg.k < 1 || cfg.k % 2 == 0) {
    throw std::invalid_argument("knn: k must be a positive odd integer");
  }
  if (n < max_fold || static_cast<std::size_t>(cfg.k) > n - max_fold) {
    throw std::invalid_argument(
        "knn: k=" + std::to_string(cfg.k) +
        " exceeds the smallest training fold (" + std::to_string(n - max_fold) +
        " subjects)");
  }
  return run_cv(cohort, folds, seed,
                [&](const std::vector<fit::FittedSubject>& train,
                    const std::vector<BetaPoint>& test) {
                  return knn_classify(train, test, cfg);
                });
}

CvReport cross_validate_skm(std::span<const fit::FittedSubject> cohort,
                            Geometry geometry, int folds, std::uint64_t seed,
                            const ShootingConfig& shooting,
                            const stats::KarcherConfig& karcher) {
  return run_cv(cohort, folds, seed,
                [&](const std::vector<fit::FittedSubject>& train,
                    const std::vector<BetaPoint>& test) {
                  return supervised_kmeans(train, test, geometry, shooting,
                                           karcher);
                });
}

}  // namespace betageo::learn
