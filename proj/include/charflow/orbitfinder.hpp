#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "charflow/dynamics.hpp"

namespace charflow {

/// Closed characteristic (τ, y): y(τ) = y(0) for the flow of J∇F on Σ.
struct ClosedCharacteristic {
  Vector y0;
  double period_tau = 0.0;
  int multiplicity_m = 1;
  std::string prime_id;
  /// Samples over one full period [0, τ], uniformly spaced, with velocities.
  std::vector<double> times;
  std::vector<Vector> points;
  std::vector<Vector> velocities;
  double action_A = 0.0;
  /// |φ_τ(y0) - y0| after refinement.
  double residual = 0.0;
  /// max |j - 1| along the samples.
  double surface_drift = 0.0;
  /// Newton steps taken by shoot (0 for analytic or directly built orbits).
  int newton_iterations = 0;
};

/// Samples per prime period stored on every orbit (and used for dedupe).
inline constexpr int kOrbitSamples = 512;

/// Integrates the orbit through y0 over [0, period] and fills samples,
/// velocities, residual and action.
ClosedCharacteristic make_orbit(const SurfaceModel& s, const Vector& y0, double period,
                                int multiplicity = 1, const FlowOptions& opt = {});

/// A(y) = ½∫₀^τ Jy·ẏ dt by periodic trapezoidal quadrature over the samples.
double action(const ClosedCharacteristic& orbit);

/// m-th iterate: same image, period and action multiplied by m.
ClosedCharacteristic iterate(const ClosedCharacteristic& orbit, int m);

struct EllipsoidOrbits {
  std::vector<ClosedCharacteristic> orbits;
  /// Some r_j²/r_k² (j ≠ k) is rational with small denominator, so further
  /// orbit tori exist that are not enumerated.
  bool rational_ratios = false;
};

/// The n planar circles of an ellipsoid, sorted by action.
EllipsoidOrbits analytic_ellipsoid_orbits(const Vector& axes);

/// Whether x is within 1e-12 (relative) of p/q for some q ≤ max_den.
bool is_rational_ratio(double x, int max_den = 64);

struct ShootOptions {
  int max_iterations = 40;
  /// Closure residual target |φ_T(y) - y|.
  double tol = 1e-9;
  /// Divisors tested when extracting the prime period.
  int max_divisor = 12;
  /// Relative closure tolerance for a divisor to count as closing.
  double divisor_tol = 1e-6;
  FlowOptions flow{};
};

/// Damped Newton (Levenberg-Marquardt) on the closure map, with a moving
/// section through the current iterate orthogonal to the flow and the
/// surface constraint j = 1. Returns the prime orbit.
ClosedCharacteristic shoot(const SurfaceModel& s, const Vector& seed, double period_guess,
                           const ShootOptions& opt = {});

/// Euclidean distance from p to the sampled image of the orbit, using cubic
/// Hermite interpolation between samples.
double distance_to_image(const ClosedCharacteristic& orbit, const Vector& p);

/// Geometric distinctness: images farther apart than tol (relative to the
/// orbit scale), or prime actions differing by more than action_tol.
bool distinct(const ClosedCharacteristic& a, const ClosedCharacteristic& b, double tol = 1e-6,
              double action_tol = 1e-8);

struct SurveyOptions {
  int seeds = 48;
  /// Period window; non-positive values select [2πd², 2πR²].
  double t_min = 0.0;
  double t_max = 0.0;
  int period_scan = 3;
  std::uint64_t seed = 0;
  /// More than this many distinct orbits sharing one action is a family.
  int family_threshold = 3;
  /// Worker threads (0: CHARFLOW_THREADS or hardware concurrency).
  unsigned threads = 0;
  ShootOptions shoot{};
};

struct SurveyResult {
  std::vector<ClosedCharacteristic> orbits;
  bool family = false;
  int attempts = 0;
  int converged = 0;
  int failures = 0;
  double t_min = 0.0;
  double t_max = 0.0;
  std::vector<std::string> diagnostics;
};

SurveyResult survey(const SurfaceModel& s, const SurveyOptions& opt = {});

/// Number of worker threads: CHARFLOW_THREADS if set, else hardware.
unsigned worker_threads(unsigned requested = 0);

}  // namespace charflow
