#pragma once

#include <array>
#include <vector>

#include "betageo/errors.hpp"

namespace betageo {

/// A point of the beta family B(x, y); both shape parameters strictly positive.
class BetaPoint {
 public:
  BetaPoint(double x, double y);

  double x() const noexcept { return x_; }
  double y() const noexcept { return y_; }

  friend bool operator==(const BetaPoint& a, const BetaPoint& b) noexcept {
    return a.x_ == b.x_ && a.y_ == b.y_;
  }

 private:
  double x_;
  double y_;
};

/// Tangent vector (u, v) attached to a base point.
struct TangentVector {
  BetaPoint base;
  double u = 0.0;
  double v = 0.0;
};

/// Fisher metric matrix at a point, together with its determinant
/// d(x,y) = psi'(x)psi'(y) - psi'(x+y)(psi'(x)+psi'(y)).
struct MetricMatrix {
  double gxx;
  double gxy;
  double gyy;
  double det;
};

/// Coefficients of the geodesic system
///   x'' + a_x x'^2 + b_x x'y' + c_x y'^2 = 0
///   y'' + a_y y'^2 + b_y x'y' + c_y x'^2 = 0
/// where (a_y, b_y, c_y) are (a, b, c) with the roles of x and y swapped.
struct ChristoffelCoefficients {
  double a_x, b_x, c_x;
  double a_y, b_y, c_y;
};

/// Discretized geodesic on [0, 1]: times, points and velocities, same length.
struct GeodesicPath {
  std::vector<double> times;
  std::vector<BetaPoint> points;
  std::vector<std::array<double, 2>> velocities;

  const BetaPoint& start() const { return points.front(); }
  const BetaPoint& end() const { return points.back(); }
};

/// Shooting-solver knobs for the logarithm map / distance.
struct ShootingConfig {
  int steps = 100;            // RK4 steps per exponential evaluation
  int max_iterations = 50;    // Newton iterations
  double tolerance = 1e-6;    // endpoint residual, parameter space
};

/// Log-partition phi(x,y) = lnGamma(x+y) - lnGamma(x) - lnGamma(y).
double log_partition(const BetaPoint& p);

/// Fisher information matrix I(x,y) = -Hess phi.
MetricMatrix metric_matrix(const BetaPoint& p);

/// Metric inner product of two tangent vectors at the same base point.
double inner(const TangentVector& a, const TangentVector& b);

/// Metric norm sqrt(inner(w, w)).
double norm(const TangentVector& w);

ChristoffelCoefficients christoffel_coefficients(const BetaPoint& p);

/// Integrate the geodesic with given start and initial velocity over [0, 1]
/// with fixed-step RK4. Throws BoundaryEscapeError if the trajectory leaves
/// the positive quadrant (guard 1e-8).
GeodesicPath geodesic_ivp(const BetaPoint& start, const TangentVector& velocity,
                          int steps = 100);

/// Riemannian exponential: endpoint of the unit-time geodesic.
BetaPoint exp_map(const BetaPoint& start, const TangentVector& velocity,
                  int steps = 100);

/// Riemannian logarithm: initial velocity whose geodesic reaches `end`.
/// Shooting (Newton on the initial velocity, finite-difference Jacobian,
/// damped steps). Unique by the Hadamard property.
TangentVector log_map(const BetaPoint& start, const BetaPoint& end,
                      const ShootingConfig& cfg = {});

/// Geodesic (Fisher-Rao) distance: the metric norm of the logarithm.
double distance(const BetaPoint& p, const BetaPoint& q,
                const ShootingConfig& cfg = {});

/// Sectional curvature K(x,y); strictly negative everywhere.
double sectional_curvature(const BetaPoint& p);

/// Metric-orthonormal basis of the tangent space at p; the first vector
/// points along the diagonal so the basis respects the swap isometry there.
std::array<TangentVector, 2> orthonormal_basis(const BetaPoint& p);

}  // namespace betageo
