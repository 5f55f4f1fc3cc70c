#include <doctest.h>

#include <cmath>

#include "betageo/manifold.hpp"
#include "betageo/random.hpp"
#include "support/oracles.hpp"

using namespace betageo;

namespace {

BetaPoint random_point(std::mt19937_64& gen, double lo, double hi) {
  const double x = std::exp(rng::uniform(gen, std::log(lo), std::log(hi)));
  const double y = std::exp(rng::uniform(gen, std::log(lo), std::log(hi)));
  return {x, y};
}

// Random tangent vector with metric norm drawn from (0, max_norm].
TangentVector random_velocity(std::mt19937_64& gen, const BetaPoint& p,
                              double max_norm) {
  const double angle = rng::uniform(gen, 0.0, 2.0 * M_PI);
  const TangentVector dir{p, std::cos(angle), std::sin(angle)};
  const double target = max_norm * (1.0 - rng::uniform01(gen));
  const double scale = target / norm(dir);
  return {p, dir.u * scale, dir.v * scale};
}

double speed_spread(const GeodesicPath& path) {
  double lo = 1e300, hi = 0.0;
  for (std::size_t i = 0; i < path.points.size(); ++i) {
    const double s = inner({path.points[i], path.velocities[i][0],
                            path.velocities[i][1]},
                           {path.points[i], path.velocities[i][0],
                            path.velocities[i][1]});
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  return (hi - lo) / std::max(hi, 1e-300);
}

}  // namespace

TEST_CASE("zero velocity gives a constant path") {
  const BetaPoint p(2.3, 0.7);
  const GeodesicPath path = geodesic_ivp(p, {p, 0.0, 0.0}, 50);
  REQUIRE(path.points.size() == 51);
  for (const BetaPoint& q : path.points) {
    CHECK(q.x() == p.x());
    CHECK(q.y() == p.y());
  }
  CHECK(exp_map(p, {p, 0.0, 0.0}) == p);
}

TEST_CASE("the diagonal is a geodesic") {
  for (double a : {0.5, 1.0, 2.0}) {
    for (double w : {-0.4, 0.9, 2.0}) {
      const BetaPoint start(a, a);
      const GeodesicPath path = geodesic_ivp(start, {start, w, w}, 100);
      double worst = 0.0;
      for (const BetaPoint& q : path.points) {
        worst = std::max(worst, std::abs(q.x() - q.y()));
      }
      CHECK(worst < 1e-9);
    }
  }
}

TEST_CASE("geodesics have constant speed") {
  std::mt19937_64 gen = rng::make_stream(31, 0);
  double worst = 0.0;
  for (int i = 0; i < 50; ++i) {
    const BetaPoint p = random_point(gen, 0.3, 15.0);
    const TangentVector w = random_velocity(gen, p, 2.0);
    try {
      const GeodesicPath path = geodesic_ivp(p, w, 100);
      worst = std::max(worst, speed_spread(path));
      REQUIRE(path.times.front() == 0.0);
      REQUIRE(path.times.back() == 1.0);
      for (std::size_t k = 1; k < path.times.size(); ++k) {
        REQUIRE(path.times[k] > path.times[k - 1]);
      }
    } catch (const BoundaryEscapeError&) {
      // extreme draw; constant-speed claim only concerns completed paths
    }
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("unit-time homogeneity: w once equals w/2 chained twice") {
  std::mt19937_64 gen = rng::make_stream(32, 0);
  for (int i = 0; i < 20; ++i) {
    const BetaPoint p = random_point(gen, 0.4, 10.0);
    const TangentVector w = random_velocity(gen, p, 1.5);
    const BetaPoint direct = exp_map(p, w);
    const GeodesicPath half = geodesic_ivp(p, {p, 0.5 * w.u, 0.5 * w.v}, 100);
    const BetaPoint mid = half.end();
    const BetaPoint chained = exp_map(
        mid, {mid, half.velocities.back()[0], half.velocities.back()[1]});
    CHECK(std::hypot(direct.x() - chained.x(), direct.y() - chained.y()) <
          1e-6);
  }
}

TEST_CASE("step doubling moves the endpoint by less than 1e-7") {
  // unit-ball shots; the RK4 error grows like a high power of the speed
  std::mt19937_64 gen = rng::make_stream(33, 0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const BetaPoint p = random_point(gen, 0.5, 10.0);
    const TangentVector w = random_velocity(gen, p, 1.0);
    const BetaPoint e100 = exp_map(p, w, 100);
    const BetaPoint e200 = exp_map(p, w, 200);
    worst = std::max(worst,
                     std::hypot(e100.x() - e200.x(), e100.y() - e200.y()));
  }
  CHECK(worst < 1e-7);
}

TEST_CASE("boundary escape carries the last valid state") {
  const BetaPoint p(1.0, 1.0);
  try {
    exp_map(p, {p, -1000.0, 0.0});
    FAIL("expected BoundaryEscapeError");
  } catch (const BoundaryEscapeError& e) {
    CHECK(e.time() >= 0.0);
    CHECK(e.time() < 1.0);
    CHECK(e.last_state()[0] > 0.0);
    CHECK(e.last_state()[1] > 0.0);
  }
}

TEST_CASE("log is a right inverse of exp") {
  std::mt19937_64 gen = rng::make_stream(34, 0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const BetaPoint p = random_point(gen, 0.2, 20.0);
    const TangentVector w = random_velocity(gen, p, 2.0);
    BetaPoint q = p;
    try {
      q = exp_map(p, w);
    } catch (const BoundaryEscapeError&) {
      continue;
    }
    const TangentVector back = log_map(p, q);
    worst = std::max(worst, std::hypot(back.u - w.u, back.v - w.v));
  }
  CHECK(worst < 1e-5);
}

TEST_CASE("log of the base point is zero, diagonal logs are diagonal") {
  const BetaPoint p(3.1, 0.8);
  const TangentVector zero = log_map(p, p);
  CHECK(zero.u == 0.0);
  CHECK(zero.v == 0.0);

  const TangentVector d = log_map(BetaPoint(1.5, 1.5), BetaPoint(6.0, 6.0));
  CHECK(d.u == doctest::Approx(d.v).epsilon(1e-7));
  CHECK(d.u > 0.0);
}

TEST_CASE("distance: identity, symmetry, swap isometry") {
  const BetaPoint p(2.0, 5.0);
  CHECK(distance(p, p) == 0.0);

  std::mt19937_64 gen = rng::make_stream(35, 0);
  double worst_sym = 0.0, worst_swap = 0.0;
  for (int i = 0; i < 100; ++i) {
    const BetaPoint a = random_point(gen, 0.3, 15.0);
    const BetaPoint b = random_point(gen, 0.3, 15.0);
    const double dab = distance(a, b);
    worst_sym = std::max(worst_sym, std::abs(dab - distance(b, a)));
    const double dswap =
        distance(BetaPoint(a.y(), a.x()), BetaPoint(b.y(), b.x()));
    worst_swap = std::max(worst_swap, std::abs(dab - dswap));
    CHECK(dab > 0.0);
  }
  CHECK(worst_sym < 1e-5);
  CHECK(worst_swap < 1e-5);
}

TEST_CASE("triangle inequality with numerical slack") {
  std::mt19937_64 gen = rng::make_stream(36, 0);
  double worst = 0.0;
  for (int i = 0; i < 100; ++i) {
    const BetaPoint a = random_point(gen, 0.3, 15.0);
    const BetaPoint b = random_point(gen, 0.3, 15.0);
    const BetaPoint c = random_point(gen, 0.3, 15.0);
    worst = std::max(worst,
                     distance(a, c) - distance(a, b) - distance(b, c));
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("distance agrees with quadrature along the geodesic") {
  std::mt19937_64 gen = rng::make_stream(37, 0);
  double worst = 0.0;
  for (int i = 0; i < 20; ++i) {
    const BetaPoint a = random_point(gen, 0.4, 12.0);
    const BetaPoint b = random_point(gen, 0.4, 12.0);
    if (a == b) continue;
    const double d = distance(a, b);
    const TangentVector w = log_map(a, b);
    const double len = oracles::path_length_quadrature(geodesic_ivp(a, w, 100));
    worst = std::max(worst, std::abs(d - len) / std::max(1e-12, d));
  }
  CHECK(worst < 1e-6);
}

TEST_CASE("shooting failure is reported with its residual") {
  ShootingConfig strangled;
  strangled.max_iterations = 1;
  try {
    log_map(BetaPoint(0.5, 0.5), BetaPoint(20.0, 20.0), strangled);
    FAIL("expected BvpConvergenceError");
  } catch (const BvpConvergenceError& e) {
    CHECK(e.residual() > 0.0);
  }
  CHECK_THROWS_AS(log_map(BetaPoint(1, 1), BetaPoint(2, 2),
                          ShootingConfig{0, 50, 1e-6}),
                  std::invalid_argument);
}
