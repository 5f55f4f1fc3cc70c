#pragma once

#include <array>
#include <stdexcept>
#include <string>

namespace betageo {

/// Geodesic integration left the valid parameter quadrant. Carries the last
/// state (x, y, u, v) accepted before the guard tripped and its time.
class BoundaryEscapeError : public std::runtime_error {
 public:
  BoundaryEscapeError(const std::string& msg, double time,
                      std::array<double, 4> last_state)
      : std::runtime_error(msg), time_(time), last_state_(last_state) {}

  double time() const noexcept { return time_; }
  const std::array<double, 4>& last_state() const noexcept { return last_state_; }

 private:
  double time_;
  std::array<double, 4> last_state_;  // x, y, u, v
};

/// The shooting solver for the logarithm map did not reach the residual
/// tolerance within its iteration budget.
class BvpConvergenceError : public std::runtime_error {
 public:
  BvpConvergenceError(const std::string& msg, double residual, int iterations)
      : std::runtime_error(msg), residual_(residual), iterations_(iterations) {}

  double residual() const noexcept { return residual_; }
  int iterations() const noexcept { return iterations_; }

 private:
  double residual_;
  int iterations_;
};

/// Sample set cannot support a beta fit (constant data, boundary atoms, ...).
class DegenerateSampleError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace betageo
