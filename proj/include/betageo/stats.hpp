#pragma once

#include <span>
#include <vector>

#include "betageo/manifold.hpp"

namespace betageo::stats {

struct KarcherConfig {
  double step_size = 1.0;           // tau in (0, 1]
  int max_iterations = 100;
  double gradient_tolerance = 1e-6;  // metric norm of the mean log
  ShootingConfig shooting = {};
};

struct MeanResult {
  BetaPoint mean;
  int iterations_used = 0;
  double final_gradient_norm = 0.0;
  bool converged = false;
  /// Frechet functional sum d^2(mean, B_i) at the initial point and after
  /// each accepted update (diagnostic; non-increasing).
  std::vector<double> functional_trace;
};

/// Karcher flow: mean <- exp_mean((tau/n) sum log_mean(B_i)), started from the
/// Euclidean parameter average. Non-convergence is reported via `converged`,
/// not thrown.
MeanResult frechet_mean(std::span<const BetaPoint> points,
                        const KarcherConfig& cfg = {});

/// Same flow from an explicit starting point (warm starts, uniqueness checks).
MeanResult frechet_mean(std::span<const BetaPoint> points,
                        const KarcherConfig& cfg, const BetaPoint& initial);

/// (1/n) sum d^2(mean, B_i).
double frechet_variance(std::span<const BetaPoint> points,
                        const BetaPoint& mean,
                        const ShootingConfig& cfg = {});

}  // namespace betageo::stats
