#include "betageo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace betageo::stats {

namespace {

constexpr double kDomainFloor = 1e-6;

void validate(std::span<const BetaPoint> points, const KarcherConfig& cfg) {
  if (points.empty()) {
    throw std::invalid_argument("frechet_mean: empty point set");
  }
  if (!(cfg.step_size > 0.0) || cfg.step_size > 1.0) {
    throw std::invalid_argument("frechet_mean: step size must be in (0, 1]");
  }
  if (cfg.max_iterations < 1 || !(cfg.gradient_tolerance > 0.0)) {
    throw std::invalid_argument("frechet_mean: invalid iteration budget or tolerance");
  }
}

BetaPoint euclidean_average(std::span<const BetaPoint> points) {
  double sx = 0.0, sy = 0.0;
  for (const BetaPoint& p : points) {
    sx += p.x();
    sy += p.y();
  }
  const double n = static_cast<double>(points.size());
  return {std::max(sx / n, kDomainFloor), std::max(sy / n, kDomainFloor)};
}

struct Pull {
  double gu = 0.0, gv = 0.0;  // mean log, a tangent vector at the estimate
  double functional = 0.0;    // sum of squared distances
};

Pull pull_at(const BetaPoint& at, std::span<const BetaPoint> points,
             const ShootingConfig& shooting) {
  Pull r;
  for (const BetaPoint& p : points) {
    const TangentVector w = log_map(at, p, shooting);
    r.gu += w.u;
    r.gv += w.v;
    r.functional += inner(w, w);
  }
  const double n = static_cast<double>(points.size());
  r.gu /= n;
  r.gv /= n;
  return r;
}

}  // namespace

MeanResult frechet_mean(std::span<const BetaPoint> points,
                        const KarcherConfig& cfg) {
  validate(points, cfg);
  return frechet_mean(points, cfg, euclidean_average(points));
}

MeanResult frechet_mean(std::span<const BetaPoint> points,
                        const KarcherConfig& cfg, const BetaPoint& initial) {
  validate(points, cfg);

  BetaPoint mean = initial;
  Pull cur = pull_at(mean, points, cfg.shooting);

  MeanResult result{mean, 0, 0.0, false, {}};
  result.functional_trace.push_back(cur.functional);

  for (int it = 0; it < cfg.max_iterations; ++it) {
    const double gnorm = norm(TangentVector{mean, cur.gu, cur.gv});
    if (gnorm <= cfg.gradient_tolerance) {
      result.mean = mean;
      result.iterations_used = it;
      result.final_gradient_norm = gnorm;
      result.converged = true;
      return result;
    }

    // Step tau along the mean log; halve while the functional increases or
    // the exponential escapes.
    double step = cfg.step_size;
    bool accepted = false;
    for (int halvings = 0; halvings < 30; ++halvings) {
      BetaPoint candidate = mean;
      try {
        candidate = exp_map(mean, {mean, step * cur.gu, step * cur.gv},
                            cfg.shooting.steps);
      } catch (const BoundaryEscapeError&) {
        step *= 0.5;
        continue;
      }
      const Pull next = pull_at(candidate, points, cfg.shooting);
      if (next.functional <= cur.functional + 1e-12 * (1.0 + cur.functional)) {
        mean = candidate;
        cur = next;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // stuck: report the best iterate
      result.mean = mean;
      result.iterations_used = it;
      result.final_gradient_norm = gnorm;
      result.converged = false;
      return result;
    }
    result.functional_trace.push_back(cur.functional);
  }

  result.mean = mean;
  result.iterations_used = cfg.max_iterations;
  result.final_gradient_norm = norm(TangentVector{mean, cur.gu, cur.gv});
  result.converged = result.final_gradient_norm <= cfg.gradient_tolerance;
  return result;
}

double frechet_variance(std::span<const BetaPoint> points,
                        const BetaPoint& mean, const ShootingConfig& cfg) {
  if (points.empty()) {
    throw std::invalid_argument("frechet_variance: empty point set");
  }
  double acc = 0.0;
  for (const BetaPoint& p : points) {
    const double d = distance(mean, p, cfg);
    acc += d * d;
  }
  return acc / static_cast<double>(points.size());
}

}  // namespace betageo::stats
