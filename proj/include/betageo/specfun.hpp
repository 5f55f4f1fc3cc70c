#pragma once

namespace betageo::specfun {

// Derivatives of ln Gamma. All four reject non-positive (or sub-1e-300, or
// non-finite) arguments with std::domain_error. Evaluation shifts the
// argument above 10 by the exact recurrences, then sums the Bernoulli
// asymptotic series; absolute accuracy is ~1e-14 for moderate arguments.

/// ln Gamma(x), x > 0.
double log_gamma(double x);

/// psi(x) = d/dx ln Gamma(x).
double digamma(double x);

/// psi'(x); strictly positive on x > 0.
double trigamma(double x);

/// psi''(x); strictly negative on x > 0.
double tetragamma(double x);

/// psi'(x) and psi''(x) together, sharing the recurrence shift. Bit-identical
/// to the scalar versions; used on the geodesic right-hand side where both
/// derivatives are needed at three arguments per evaluation.
void trigamma_tetragamma(double x, double& tri, double& tet);

}  // namespace betageo::specfun
