#pragma once

#include <vector>

#include "charflow/surface.hpp"

namespace charflow {

struct FlowOptions {
  double abs_tol = 1e-11;
  double rel_tol = 1e-11;
  /// Number of uniform output intervals on [0, t_end]; integration steps are
  /// clipped to land on every output time.
  int samples = 256;
  HamiltonianSpec hamiltonian{};
  /// Radial reprojection x <- x / j(x) after each accepted step.
  bool project = true;
  double min_step = 1e-13;
  long max_steps = 20'000'000;
  /// Pre-projection |j - 1| above this aborts the integration.
  double max_energy_drift = 1e-6;
};

/// Trajectory of ẋ = J ∇H(x) started on Σ.
struct FlowResult {
  Vector end_point;
  std::vector<double> times;
  std::vector<Vector> points;
  /// max over accepted steps of |j(x) - 1| before reprojection.
  double energy_drift = 0.0;
  double t_end = 0.0;
};

/// Fundamental solution γ(t) of ż = J H''(x(t)) z along an orbit, γ(0) = I.
struct SymplecticPath {
  std::vector<double> times;
  std::vector<Matrix> matrices;
  /// Set when the path linearizes a 2-homogeneous Hamiltonian on a closed
  /// orbit: the base point is then an extra fixed vector of every iterate of
  /// the monodromy, beyond the flow direction.
  bool radial_kernel = false;
  /// Orbit base point and flow direction there (empty for abstract paths).
  Vector base_point;
  Vector flow_direction;

  Eigen::Index dim() const { return matrices.empty() ? 0 : matrices.front().rows(); }
  double t_end() const { return times.empty() ? 0.0 : times.back(); }
  const Matrix& end() const { return matrices.back(); }
};

/// Flow of ẋ = J ∇H(x) from y0 ∈ Σ for time t_end (either sign).
FlowResult flow(const SurfaceModel& s, const VectorRef& y0, double t_end,
                const FlowOptions& opt = {});

/// Joint integration of orbit and fundamental matrix; both outputs share the
/// same time grid.
struct FlowWithPath {
  FlowResult orbit;
  SymplecticPath path;
};
FlowWithPath flow_with_path(const SurfaceModel& s, const VectorRef& y0, double t_end,
                            const FlowOptions& opt = {});

/// Linearized path along a previously computed orbit. The joint system is
/// re-integrated from the orbit's first sample on the orbit's time grid.
SymplecticPath linearized_path(const SurfaceModel& s, const FlowResult& orbit,
                               const FlowOptions& opt = {}, double symplectic_bound = 1e-7);

/// End point and monodromy only (no samples), used inside Newton loops.
struct EndState {
  Vector point;
  Matrix monodromy;
  double energy_drift = 0.0;
};
EndState flow_end_state(const SurfaceModel& s, const VectorRef& y0, double t_end,
                        const FlowOptions& opt = {});

/// Vector field J ∇H(x).
Vector vector_field(const SurfaceModel& s, const HamiltonianSpec& h, const VectorRef& x);

/// max_k ||γ_kᵀ J γ_k - J||.
double max_symplectic_defect(const SymplecticPath& path);

}  // namespace charflow
