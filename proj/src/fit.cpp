#include "betageo/fit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "betageo/errors.hpp"
#include "betageo/specfun.hpp"

namespace betageo::fit {

namespace {

constexpr int kMaxNewtonIterations = 50;
constexpr double kGradientTolerance = 1e-8;

struct LogMoments {
  double mean_log_t;
  double mean_log_1mt;
  double mean;
  double variance;  // population variance
  std::size_t n;
};

// Sorting first makes every statistic independent of sample order.
LogMoments log_moments(std::span<const double> samples) {
  std::vector<double> t(samples.begin(), samples.end());
  std::sort(t.begin(), t.end());

  const std::size_t n = t.size();
  if (n < 2) throw DegenerateSampleError("fit_beta_mle: need at least 2 samples");
  for (double v : t) {
    if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
      throw std::invalid_argument("fit_beta_mle: samples must lie in [0, 1]");
    }
  }
  if (t.front() == t.back()) {
    throw DegenerateSampleError("fit_beta_mle: all samples identical");
  }
  const bool all_boundary = std::all_of(
      t.begin(), t.end(), [](double v) { return v == 0.0 || v == 1.0; });
  if (all_boundary) {
    throw DegenerateSampleError("fit_beta_mle: all samples at 0 or 1");
  }

  // Boundary atoms carry no finite log-likelihood; shrink them inward.
  const double eps = 1.0 / (2.0 * static_cast<double>(n));
  for (double& v : t) {
    if (v == 0.0) v = eps;
    if (v == 1.0) v = 1.0 - eps;
  }

  LogMoments m{0.0, 0.0, 0.0, 0.0, n};
  for (double v : t) {
    m.mean_log_t += std::log(v);
    m.mean_log_1mt += std::log1p(-v);
    m.mean += v;
  }
  const double dn = static_cast<double>(n);
  m.mean_log_t /= dn;
  m.mean_log_1mt /= dn;
  m.mean /= dn;
  for (double v : t) m.variance += (v - m.mean) * (v - m.mean);
  m.variance /= dn;
  if (!(m.variance > 0.0)) {
    throw DegenerateSampleError("fit_beta_mle: zero sample variance");
  }
  return m;
}

// x = m(m(1-m)/v - 1), y = (1-m)(m(1-m)/v - 1); always positive for data in
// (0,1) with positive variance.
std::array<double, 2> moments_estimate(const LogMoments& m) {
  const double common = m.mean * (1.0 - m.mean) / m.variance - 1.0;
  const double floor = 1e-8;
  return {std::max(m.mean * common, floor),
          std::max((1.0 - m.mean) * common, floor)};
}

double mean_log_likelihood(double x, double y, const LogMoments& m) {
  const double phi = specfun::log_gamma(x + y) - specfun::log_gamma(x) -
                     specfun::log_gamma(y);
  return (x - 1.0) * m.mean_log_t + (y - 1.0) * m.mean_log_1mt + phi;
}

}  // namespace

std::vector<double> area_strain(std::span<const double> areas_t0,
                                std::span<const double> areas_t1) {
  if (areas_t0.size() != areas_t1.size()) {
    throw std::invalid_argument("area_strain: mismatched cell counts");
  }
  std::vector<double> strain;
  strain.reserve(areas_t0.size());
  for (std::size_t k = 0; k < areas_t0.size(); ++k) {
    if (!(areas_t0[k] > 0.0) || !(areas_t1[k] > 0.0)) {
      throw std::invalid_argument("area_strain: areas must be positive (cell " +
                                  std::to_string(k) + ")");
    }
    strain.push_back((areas_t1[k] - areas_t0[k]) / areas_t0[k]);
  }
  return strain;
}

std::vector<double> normalize(std::span<const double> samples,
                              const NormalizationConfig& cfg) {
  if (!(cfg.lower < cfg.upper)) {
    throw std::invalid_argument("normalize: bounds must satisfy p < q");
  }
  const double width = cfg.upper - cfg.lower;
  std::vector<double> out;
  out.reserve(samples.size());
  for (double s : samples) {
    out.push_back((std::min(std::max(s, cfg.lower), cfg.upper) - cfg.lower) /
                  width);
  }
  return out;
}

FitResult fit_beta_mle(std::span<const double> samples) {
  const LogMoments m = log_moments(samples);
  const auto [x0, y0] = moments_estimate(m);

  // Newton on the stationarity system
  //   psi(x) - psi(x+y) = mean ln t,   psi(y) - psi(x+y) = mean ln(1-t).
  // The Hessian of the mean log-likelihood is minus the Fisher matrix, so the
  // Newton solve reuses the metric.
  double x = x0, y = y0;
  double gx = m.mean_log_t - (specfun::digamma(x) - specfun::digamma(x + y));
  double gy = m.mean_log_1mt - (specfun::digamma(y) - specfun::digamma(x + y));
  double gnorm = std::hypot(gx, gy);

  int it = 0;
  bool stalled = false;
  for (; it < kMaxNewtonIterations && gnorm > kGradientTolerance; ++it) {
    const double tx = specfun::trigamma(x);
    const double ty = specfun::trigamma(y);
    const double ts = specfun::trigamma(x + y);
    const double ixx = tx - ts, iyy = ty - ts, ixy = -ts;
    const double det = ixx * iyy - ixy * ixy;
    if (!(det > 0.0)) {
      stalled = true;
      break;
    }
    const double du = (iyy * gx - ixy * gy) / det;
    const double dv = (-ixy * gx + ixx * gy) / det;

    // Keep the iterate in the quadrant and the gradient shrinking.
    double step = 1.0;
    double nx = 0.0, ny = 0.0, ngx = 0.0, ngy = 0.0, ngnorm = 0.0;
    bool ok = false;
    for (int halvings = 0; halvings < 60; ++halvings) {
      nx = x + step * du;
      ny = y + step * dv;
      if (nx > 0.0 && ny > 0.0) {
        ngx = m.mean_log_t - (specfun::digamma(nx) - specfun::digamma(nx + ny));
        ngy = m.mean_log_1mt -
              (specfun::digamma(ny) - specfun::digamma(nx + ny));
        ngnorm = std::hypot(ngx, ngy);
        if (ngnorm <= gnorm) {
          ok = true;
          break;
        }
      }
      step *= 0.5;
    }
    if (!ok) {
      stalled = true;
      break;
    }
    x = nx;
    y = ny;
    gx = ngx;
    gy = ngy;
    gnorm = ngnorm;
  }

  if (!stalled && gnorm <= kGradientTolerance) {
    return {BetaPoint(x, y), static_cast<double>(m.n) * mean_log_likelihood(x, y, m),
            FitMethod::newton, it};
  }
  return {BetaPoint(x0, y0),
          static_cast<double>(m.n) * mean_log_likelihood(x0, y0, m),
          FitMethod::moments_fallback, it};
}

std::vector<double> samples_from_histogram(std::span<const double> bin_centers,
                                           std::span<const long> counts) {
  if (bin_centers.size() != counts.size()) {
    throw std::invalid_argument("samples_from_histogram: mismatched lengths");
  }
  std::vector<double> samples;
  for (std::size_t b = 0; b < bin_centers.size(); ++b) {
    if (counts[b] < 0) {
      throw std::invalid_argument("samples_from_histogram: negative count");
    }
    samples.insert(samples.end(), static_cast<std::size_t>(counts[b]),
                   bin_centers[b]);
  }
  return samples;
}

FittedCohort fit_cohort(std::span<const SubjectRecord> records,
                        const NormalizationConfig& cfg) {
  FittedCohort cohort;
  for (const SubjectRecord& rec : records) {
    if (rec.samples.empty()) {
      cohort.exclusions.push_back({rec.id, rec.label, "no samples"});
      continue;
    }
    const std::vector<double> scaled = normalize(rec.samples, cfg);
    try {
      const FitResult fitted = fit_beta_mle(scaled);
      cohort.subjects.push_back({rec.id, rec.label, fitted.point});
    } catch (const DegenerateSampleError& e) {
      cohort.exclusions.push_back({rec.id, rec.label, e.what()});
    }
  }
  return cohort;
}

NormalizationConfig population_max_bounds(
    std::span<const SubjectRecord> records) {
  double max_value = 0.0;
  bool any = false;
  for (const SubjectRecord& rec : records) {
    for (double s : rec.samples) {
      max_value = any ? std::max(max_value, s) : s;
      any = true;
    }
  }
  if (!any || !(max_value > 0.0)) {
    throw std::invalid_argument(
        "population_max_bounds: need a positive population maximum");
  }
  return {0.0, max_value};
}

}  // namespace betageo::fit
