#include "betageo/manifold.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>

#include "betageo/specfun.hpp"

namespace betageo {

namespace {

constexpr double kBoundaryGuard = 1e-8;
// Beyond this the determinant d(x,y) cancels below double precision and the
// geodesic coefficients cannot be trusted; treated like a boundary escape.
constexpr double kFarGuard = 1e12;

// Polygamma values shared by the metric and the Christoffel coefficients.
struct Polygammas {
  double tx, ty, ts;  // psi' at x, y, x+y
  double ux, uy, us;  // psi'' at x, y, x+y
  double det;         // d(x,y)
};

Polygammas polygammas_at(double x, double y) {
  Polygammas pg;
  specfun::trigamma_tetragamma(x, pg.tx, pg.ux);
  specfun::trigamma_tetragamma(y, pg.ty, pg.uy);
  specfun::trigamma_tetragamma(x + y, pg.ts, pg.us);
  pg.det = pg.tx * pg.ty - pg.ts * (pg.tx + pg.ty);
  return pg;
}

ChristoffelCoefficients christoffel_from(const Polygammas& pg, double x,
                                         double y) {
  if (!(pg.det > 0.0)) {
    throw std::runtime_error(
        "christoffel_coefficients: metric determinant non-positive at (" +
        std::to_string(x) + ", " + std::to_string(y) + ")");
  }
  const double d = pg.det;
  ChristoffelCoefficients c;
  c.a_x = (pg.ux * pg.ty - pg.ux * pg.ts - pg.ty * pg.us) / (2.0 * d);
  c.b_x = -pg.us * pg.ty / d;
  c.c_x = (pg.uy * pg.ts - pg.ty * pg.us) / (2.0 * d);
  c.a_y = (pg.uy * pg.tx - pg.uy * pg.ts - pg.tx * pg.us) / (2.0 * d);
  c.b_y = -pg.us * pg.tx / d;
  c.c_y = (pg.ux * pg.ts - pg.tx * pg.us) / (2.0 * d);
  return c;
}

struct State {
  double x, y, u, v;
};

// Geodesic equation right-hand side; empty when a stage point is outside the
// guarded quadrant.
std::optional<State> rhs(const State& s) {
  if (s.x <= kBoundaryGuard || s.y <= kBoundaryGuard || s.x >= kFarGuard ||
      s.y >= kFarGuard) {
    return std::nullopt;
  }
  const Polygammas pg = polygammas_at(s.x, s.y);
  // d(x,y) is a difference of near-equal products in the far corners of the
  // quadrant; once it has cancelled away, the state is outside the
  // numerically valid region.
  if (!(pg.det > 1e-13 * pg.tx * pg.ty)) return std::nullopt;
  const ChristoffelCoefficients c = christoffel_from(pg, s.x, s.y);
  State d;
  d.x = s.u;
  d.y = s.v;
  d.u = -(c.a_x * s.u * s.u + c.b_x * s.u * s.v + c.c_x * s.v * s.v);
  d.v = -(c.a_y * s.v * s.v + c.b_y * s.u * s.v + c.c_y * s.u * s.u);
  return d;
}

State axpy(const State& s, double h, const State& d) {
  return {s.x + h * d.x, s.y + h * d.y, s.u + h * d.u, s.v + h * d.v};
}

// One classical RK4 step; empty on boundary escape at any stage.
std::optional<State> rk4_step(const State& s, double h) {
  const auto k1 = rhs(s);
  if (!k1) return std::nullopt;
  const auto k2 = rhs(axpy(s, 0.5 * h, *k1));
  if (!k2) return std::nullopt;
  const auto k3 = rhs(axpy(s, 0.5 * h, *k2));
  if (!k3) return std::nullopt;
  const auto k4 = rhs(axpy(s, h, *k3));
  if (!k4) return std::nullopt;
  State out;
  out.x = s.x + h / 6.0 * (k1->x + 2.0 * k2->x + 2.0 * k3->x + k4->x);
  out.y = s.y + h / 6.0 * (k1->y + 2.0 * k2->y + 2.0 * k3->y + k4->y);
  out.u = s.u + h / 6.0 * (k1->u + 2.0 * k2->u + 2.0 * k3->u + k4->u);
  out.v = s.v + h / 6.0 * (k1->v + 2.0 * k2->v + 2.0 * k3->v + k4->v);
  if (out.x <= kBoundaryGuard || out.y <= kBoundaryGuard ||
      out.x >= kFarGuard || out.y >= kFarGuard) {
    return std::nullopt;
  }
  return out;
}

// Core integrator; records the path only when asked. Empty result means the
// trajectory escaped; *escape_time / *escape_state then hold the last valid
// sample.
std::optional<State> integrate(const State& start, int steps,
                               GeodesicPath* path, double* escape_time,
                               State* escape_state) {
  const double h = 1.0 / steps;
  State s = start;
  if (path) {
    path->times.reserve(steps + 1);
    path->points.reserve(steps + 1);
    path->velocities.reserve(steps + 1);
    path->times.push_back(0.0);
    path->points.emplace_back(s.x, s.y);
    path->velocities.push_back({s.u, s.v});
  }
  for (int i = 0; i < steps; ++i) {
    const auto next = rk4_step(s, h);
    if (!next) {
      if (escape_time) *escape_time = i * h;
      if (escape_state) *escape_state = s;
      return std::nullopt;
    }
    s = *next;
    if (path) {
      path->times.push_back(i + 1 == steps ? 1.0 : (i + 1) * h);
      path->points.emplace_back(s.x, s.y);
      path->velocities.push_back({s.u, s.v});
    }
  }
  return s;
}

void require_same_base(const BetaPoint& base, const TangentVector& w,
                       const char* fn) {
  if (!(w.base == base)) {
    throw std::invalid_argument(std::string(fn) +
                                ": tangent vector attached to a different "
                                "base point");
  }
}

[[noreturn]] void throw_escape(const char* fn, double t, const State& s) {
  throw BoundaryEscapeError(
      std::string(fn) + ": geodesic escaped the positive quadrant after t=" +
          std::to_string(t),
      t, {s.x, s.y, s.u, s.v});
}

// Non-throwing exponential for the shooting loop.
std::optional<std::array<double, 2>> try_exp(const BetaPoint& start, double u,
                                             double v, int steps) {
  const auto end = integrate({start.x(), start.y(), u, v}, steps, nullptr,
                             nullptr, nullptr);
  if (!end) return std::nullopt;
  return std::array<double, 2>{end->x, end->y};
}

}  // namespace

BetaPoint::BetaPoint(double x, double y) : x_(x), y_(y) {
  if (!std::isfinite(x) || !std::isfinite(y) || x <= 0.0 || y <= 0.0) {
    throw std::domain_error("BetaPoint: parameters must be finite and > 0, got (" +
                            std::to_string(x) + ", " + std::to_string(y) + ")");
  }
}

double log_partition(const BetaPoint& p) {
  return specfun::log_gamma(p.x() + p.y()) - specfun::log_gamma(p.x()) -
         specfun::log_gamma(p.y());
}

MetricMatrix metric_matrix(const BetaPoint& p) {
  const Polygammas pg = polygammas_at(p.x(), p.y());
  return {pg.tx - pg.ts, -pg.ts, pg.ty - pg.ts, pg.det};
}

double inner(const TangentVector& a, const TangentVector& b) {
  if (!(a.base == b.base)) {
    throw std::invalid_argument("inner: tangent vectors at different base points");
  }
  const MetricMatrix g = metric_matrix(a.base);
  return g.gxx * a.u * b.u + g.gxy * (a.u * b.v + a.v * b.u) +
         g.gyy * a.v * b.v;
}

double norm(const TangentVector& w) { return std::sqrt(inner(w, w)); }

ChristoffelCoefficients christoffel_coefficients(const BetaPoint& p) {
  return christoffel_from(polygammas_at(p.x(), p.y()), p.x(), p.y());
}

GeodesicPath geodesic_ivp(const BetaPoint& start, const TangentVector& velocity,
                          int steps) {
  require_same_base(start, velocity, "geodesic_ivp");
  if (steps < 1) throw std::invalid_argument("geodesic_ivp: steps must be >= 1");
  GeodesicPath path;
  double t_esc = 0.0;
  State s_esc{};
  const auto end = integrate({start.x(), start.y(), velocity.u, velocity.v},
                             steps, &path, &t_esc, &s_esc);
  if (!end) throw_escape("geodesic_ivp", t_esc, s_esc);
  return path;
}

BetaPoint exp_map(const BetaPoint& start, const TangentVector& velocity,
                  int steps) {
  require_same_base(start, velocity, "exp_map");
  if (steps < 1) throw std::invalid_argument("exp_map: steps must be >= 1");
  double t_esc = 0.0;
  State s_esc{};
  const auto end = integrate({start.x(), start.y(), velocity.u, velocity.v},
                             steps, nullptr, &t_esc, &s_esc);
  if (!end) throw_escape("exp_map", t_esc, s_esc);
  return {end->x, end->y};
}

TangentVector log_map(const BetaPoint& start, const BetaPoint& end,
                      const ShootingConfig& cfg) {
  if (cfg.steps < 1 || cfg.max_iterations < 1 || !(cfg.tolerance > 0.0)) {
    throw std::invalid_argument("log_map: invalid shooting configuration");
  }
  if (start == end) return {start, 0.0, 0.0};

  const double dx = end.x() - start.x();
  const double dy = end.y() - start.y();

  // First guess: the parameter-space chord, rescaled so that its metric norm
  // at the start matches a first-order distance estimate (chord norm under
  // the metric at the segment midpoint).
  const MetricMatrix g_start = metric_matrix(start);
  const BetaPoint mid(0.5 * (start.x() + end.x()), 0.5 * (start.y() + end.y()));
  const MetricMatrix g_mid = metric_matrix(mid);
  const auto chord_norm = [&](const MetricMatrix& g) {
    return std::sqrt(g.gxx * dx * dx + 2.0 * g.gxy * dx * dy + g.gyy * dy * dy);
  };
  const double norm_at_start = chord_norm(g_start);
  const double estimate = chord_norm(g_mid);
  double wu = dx, wv = dy;
  if (norm_at_start > 0.0) {
    wu *= estimate / norm_at_start;
    wv *= estimate / norm_at_start;
  }

  const auto residual_of = [&](double u, double v) -> double {
    const auto hit = try_exp(start, u, v, cfg.steps);
    if (!hit) return std::numeric_limits<double>::infinity();
    const double rx = (*hit)[0] - end.x();
    const double ry = (*hit)[1] - end.y();
    return std::sqrt(rx * rx + ry * ry);
  };

  // One damped Newton update on w; returns false when the iteration cannot
  // make progress (escape, singular Jacobian, or stalled damping).
  const auto newton_step = [&](double& u, double& v, double& res) -> bool {
    const auto at = try_exp(start, u, v, cfg.steps);
    if (!at) return false;
    const double rx = (*at)[0] - end.x();
    const double ry = (*at)[1] - end.y();

    // Finite-difference Jacobian of w -> exp(start, w).
    const double scale = std::max(1.0, std::sqrt(u * u + v * v));
    const double h = 1e-6 * scale;
    const auto pu = try_exp(start, u + h, v, cfg.steps);
    const auto mu = try_exp(start, u - h, v, cfg.steps);
    const auto pv = try_exp(start, u, v + h, cfg.steps);
    const auto mv = try_exp(start, u, v - h, cfg.steps);
    if (!pu || !mu || !pv || !mv) return false;
    const double j11 = ((*pu)[0] - (*mu)[0]) / (2.0 * h);
    const double j21 = ((*pu)[1] - (*mu)[1]) / (2.0 * h);
    const double j12 = ((*pv)[0] - (*mv)[0]) / (2.0 * h);
    const double j22 = ((*pv)[1] - (*mv)[1]) / (2.0 * h);
    const double det = j11 * j22 - j12 * j21;
    if (det == 0.0 || !std::isfinite(det)) return false;
    const double du = -(j22 * rx - j12 * ry) / det;
    const double dv = -(-j21 * rx + j11 * ry) / det;

    // Damped update: halve until the residual stops increasing.
    double step = 1.0;
    double cand_res = residual_of(u + du, v + dv);
    int halvings = 0;
    while (cand_res > res && halvings < 30) {
      step *= 0.5;
      cand_res = residual_of(u + step * du, v + step * dv);
      ++halvings;
    }
    if (cand_res > res) return false;
    u += step * du;
    v += step * dv;
    res = cand_res;
    return true;
  };

  double best_res = residual_of(wu, wv);
  int it = 0;
  for (; it < cfg.max_iterations && best_res > cfg.tolerance; ++it) {
    if (!newton_step(wu, wv, best_res)) break;
  }
  if (best_res <= cfg.tolerance && best_res > 0.0 && it < cfg.max_iterations) {
    // polish: one more quadratic step drives the residual far below the
    // stopping tolerance, which downstream inversion bounds rely on
    newton_step(wu, wv, best_res);
  }

  if (!(best_res <= cfg.tolerance)) {
    throw BvpConvergenceError(
        "log_map: shooting did not converge (residual " +
            std::to_string(best_res) + " after " + std::to_string(it) +
            " iterations)",
        best_res, it);
  }
  return {start, wu, wv};
}

double distance(const BetaPoint& p, const BetaPoint& q,
                const ShootingConfig& cfg) {
  if (p == q) return 0.0;
  // Constant speed makes the length integral collapse to the initial speed.
  return norm(log_map(p, q, cfg));
}

double sectional_curvature(const BetaPoint& p) {
  const Polygammas pg = polygammas_at(p.x(), p.y());
  // K = psi''(x) psi''(y) psi''(x+y) (F(x)+F(y)-F(x+y)) / (4 d^2), F = psi'/psi''
  const double fx = pg.tx / pg.ux;
  const double fy = pg.ty / pg.uy;
  const double fs = pg.ts / pg.us;
  return pg.ux * pg.uy * pg.us * (fx + fy - fs) / (4.0 * pg.det * pg.det);
}

std::array<TangentVector, 2> orthonormal_basis(const BetaPoint& p) {
  const MetricMatrix g = metric_matrix(p);
  const auto dot = [&](double u1, double v1, double u2, double v2) {
    return g.gxx * u1 * u2 + g.gxy * (u1 * v2 + v1 * u2) + g.gyy * v1 * v2;
  };
  // Gram-Schmidt seeded with the diagonal direction, so the basis commutes
  // with the (x, y) swap isometry at diagonal points.
  const double s1 = std::sqrt(dot(1.0, 1.0, 1.0, 1.0));
  const double e1u = 1.0 / s1, e1v = 1.0 / s1;
  double e2u = 1.0, e2v = -1.0;
  const double proj = dot(e2u, e2v, e1u, e1v);
  e2u -= proj * e1u;
  e2v -= proj * e1v;
  const double s2 = std::sqrt(dot(e2u, e2v, e2u, e2v));
  return {TangentVector{p, e1u, e1v}, TangentVector{p, e2u / s2, e2v / s2}};
}

}  // namespace betageo
