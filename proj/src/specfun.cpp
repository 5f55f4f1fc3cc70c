#include "betageo/specfun.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace betageo::specfun {

namespace {

constexpr double kShiftThreshold = 10.0;
constexpr double kMinArgument = 1e-300;
constexpr double kHalfLogTwoPi = 0.91893853320467274178;  // ln(2*pi)/2

void require_positive(double x, const char* fn) {
  // !(x >= kMinArgument) also catches NaN.
  if (!(x >= kMinArgument) || !std::isfinite(x)) {
    throw std::domain_error(std::string(fn) +
                            ": argument must be positive, got " +
                            std::to_string(x));
  }
}

}  // namespace

double log_gamma(double x) {
  require_positive(x, "log_gamma");
  // lnGamma(x) = lnGamma(x+n) - sum ln(x+k)
  double shift = 0.0;
  while (x < kShiftThreshold) {
    shift -= std::log(x);
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Stirling: B_{2k} / (2k(2k-1) x^{2k-1})
  const double series =
      inv * (1.0 / 12 +
             inv2 * (-1.0 / 360 +
                     inv2 * (1.0 / 1260 +
                             inv2 * (-1.0 / 1680 +
                                     inv2 * (1.0 / 1188 +
                                             inv2 * (-691.0 / 360360 +
                                                     inv2 * (1.0 / 156)))))));
  return shift + (x - 0.5) * std::log(x) - x + kHalfLogTwoPi + series;
}

double digamma(double x) {
  require_positive(x, "digamma");
  // psi(x) = psi(x+n) - sum 1/(x+k)
  double shift = 0.0;
  while (x < kShiftThreshold) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // B_{2k} / (2k x^{2k})
  const double series =
      inv2 * (1.0 / 12 +
              inv2 * (-1.0 / 120 +
                      inv2 * (1.0 / 252 +
                              inv2 * (-1.0 / 240 +
                                      inv2 * (1.0 / 132 +
                                              inv2 * (-691.0 / 32760 +
                                                      inv2 * (1.0 / 12)))))));
  return shift + std::log(x) - 0.5 * inv - series;
}

namespace {

// Asymptotic tails at x >= 10: B_{2k}/x^{2k+1} and (2k+1) B_{2k}/x^{2k+2}.
inline double trigamma_tail(double inv, double inv2) {
  const double series =
      inv * inv2 *
      (1.0 / 6 +
       inv2 * (-1.0 / 30 +
               inv2 * (1.0 / 42 +
                       inv2 * (-1.0 / 30 +
                               inv2 * (5.0 / 66 +
                                       inv2 * (-691.0 / 2730 +
                                               inv2 * (7.0 / 6)))))));
  return inv + 0.5 * inv2 + series;
}

inline double tetragamma_tail(double inv, double inv2) {
  const double series =
      inv2 * inv2 *
      (1.0 / 2 -
       inv2 * (1.0 / 6 -
               inv2 * (1.0 / 6 -
                       inv2 * (3.0 / 10 -
                               inv2 * (5.0 / 6 -
                                       inv2 * (691.0 / 210 -
                                               inv2 * (35.0 / 2)))))));
  return -inv2 - inv * inv2 - series;
}

}  // namespace

double trigamma(double x) {
  require_positive(x, "trigamma");
  // psi'(x) = psi'(x+n) + sum 1/(x+k)^2
  double shift = 0.0;
  while (x < kShiftThreshold) {
    const double inv = 1.0 / x;
    shift += inv * inv;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  return shift + trigamma_tail(inv, inv * inv);
}

double tetragamma(double x) {
  require_positive(x, "tetragamma");
  // psi''(x) = psi''(x+n) - sum 2/(x+k)^3
  double shift = 0.0;
  while (x < kShiftThreshold) {
    const double inv = 1.0 / x;
    shift -= 2.0 * (inv * inv) * inv;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  return shift + tetragamma_tail(inv, inv * inv);
}

void trigamma_tetragamma(double x, double& tri, double& tet) {
  require_positive(x, "trigamma_tetragamma");
  double shift1 = 0.0;
  double shift2 = 0.0;
  while (x < kShiftThreshold) {
    const double inv = 1.0 / x;
    const double inv2 = inv * inv;
    shift1 += inv2;
    shift2 -= 2.0 * inv2 * inv;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  tri = shift1 + trigamma_tail(inv, inv2);
  tet = shift2 + tetragamma_tail(inv, inv2);
}

}  // namespace betageo::specfun
