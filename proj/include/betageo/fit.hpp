#pragma once

#include <span>
#include <string>
#include <vector>

#include "betageo/manifold.hpp"

namespace betageo::fit {

/// One subject: id, class label, raw sample values (variable length).
struct SubjectRecord {
  std::string id;
  std::string label;
  std::vector<double> samples;
};

/// Clamp-and-rescale bounds p < q.
struct NormalizationConfig {
  double lower;
  double upper;
};

enum class FitMethod { newton, moments_fallback };

struct FitResult {
  BetaPoint point;
  double log_likelihood;
  FitMethod method;
  int iterations;
};

struct FittedSubject {
  std::string id;
  std::string label;
  BetaPoint point;
};

struct FitExclusion {
  std::string id;
  std::string label;
  std::string reason;
};

/// Cohort after normalization + ML fit; degenerate subjects end up in
/// `exclusions` instead of being dropped silently.
struct FittedCohort {
  std::vector<FittedSubject> subjects;
  std::vector<FitExclusion> exclusions;
};

/// Relative area change per cell: (a1 - a0) / a0.
std::vector<double> area_strain(std::span<const double> areas_t0,
                                std::span<const double> areas_t1);

/// x -> (min(max(x, p), q) - p) / (q - p); clamps out-of-range values.
std::vector<double> normalize(std::span<const double> samples,
                              const NormalizationConfig& cfg);

/// Maximum-likelihood beta fit of samples in [0, 1]. Exact 0/1 values are
/// shrunk to [eps, 1-eps], eps = 1/(2n), before taking logs. Newton on the
/// digamma system from a method-of-moments start; falls back to the moments
/// estimate (flagged) if Newton fails. Throws DegenerateSampleError when the
/// sample cannot identify a beta law.
FitResult fit_beta_mle(std::span<const double> samples);

/// Expand binned data into fit_beta_mle input: each bin center repeated by
/// its count. For cohorts that only ship histograms, not raw values.
std::vector<double> samples_from_histogram(std::span<const double> bin_centers,
                                           std::span<const long> counts);

/// Normalize and fit every record, preserving order.
FittedCohort fit_cohort(std::span<const SubjectRecord> records,
                        const NormalizationConfig& cfg);

/// Cohort-level bounds [0, max sample over the population] (the CTh-style
/// normalization; leaks the population maximum across any train/test split,
/// so it is opt-in).
NormalizationConfig population_max_bounds(std::span<const SubjectRecord> records);

}  // namespace betageo::fit
