#pragma once

// Oracles and path builders shared by the test suites and the acceptance run.

#include <cmath>
#include <initializer_list>
#include <numbers>
#include <vector>

#include "charflow/maslov.hpp"
#include "charflow/orbitfinder.hpp"
#include "charflow/paths.hpp"
#include "charflow/spectral.hpp"

namespace charflow::testing {

inline Vector vec(std::initializer_list<double> v) {
  Vector out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) out(k++) = x;
  return out;
}

// Oracle for R(2πρt): i₁ = 2E(ρ) - 1 with E the ceiling.
inline long planar_index(double rho) {
  const double r = std::abs(rho - std::round(rho)) < 1e-9 ? std::round(rho) : rho;
  return 2 * static_cast<long>(std::ceil(r)) - 1;
}

// Ellipsoid oracle (axes sorted ascending, as the orbits are): i(y_k, m) = Σ_l [2E(m r_k²/r_l²) - 1].
inline long ellipsoid_index(const Vector& axes, Eigen::Index k, int m) {
  long acc = 0;
  for (Eigen::Index l = 0; l < axes.size(); ++l) {
    acc += planar_index(m * axes(k) * axes(k) / (axes(l) * axes(l)));
  }
  return acc;
}

// ν(y_k, m) = 2·#{l : m r_k²/r_l² ∈ Z} - 1 after removing the radial direction.
inline int ellipsoid_nullity(const Vector& axes, Eigen::Index k, int m) {
  int resonant = 0;
  for (Eigen::Index l = 0; l < axes.size(); ++l) {
    const double q = m * axes(k) * axes(k) / (axes(l) * axes(l));
    if (std::abs(q - std::round(q)) < 1e-9) ++resonant;
  }
  return 2 * resonant - 1;
}

inline double ellipsoid_mean(const Vector& axes, Eigen::Index k) {
  double acc = 0.0;
  for (Eigen::Index l = 0; l < axes.size(); ++l) acc += 2.0 * axes(k) * axes(k) / (axes(l) * axes(l));
  return acc;
}

// An Sp(2) block: a rotation by 2πρ followed by exp(X), on a fixed grid.
inline SymplecticPath block(double rho, const Matrix& x) {
  return concatenate(rotation_path(rho, 240), exp_path(x, 40));
}

// A normal-form path in Sp(4): a forced block ending at N₁(1, b) or I and a
// transverse block of the expected case, conjugated by a random symplectic.
struct NormalFormSpec {
  double forced_rho;
  double forced_shear;
  double rho;
  Matrix gen;
  CaseKind expect;
};

inline std::vector<NormalFormSpec> normal_form_specs() {
  std::vector<NormalFormSpec> specs;
  for (double fr : {1.0, 2.0}) {
    for (double fs : {0.0, 0.4}) {
      // Case1: -I then a shear of either sign or none.
      for (double s : {-0.3, 0.0, 0.5}) specs.push_back({fr, fs, 0.5 + (s < 0 ? 1 : 0), shear_generator(s), CaseKind::Case1});
      // Case2: generic rotations.
      for (double r : {0.37, 1.81, -0.62}) specs.push_back({fr, fs, r, Matrix::Zero(2, 2), CaseKind::Case2});
      // Case3 and Case4: identity then a shear.
      specs.push_back({fr, fs, 1.0, Matrix::Zero(2, 2), CaseKind::Case3});
      specs.push_back({fr, fs, 2.0, shear_generator(0.35), CaseKind::Case3});
      specs.push_back({fr, fs, 1.0, shear_generator(-0.45), CaseKind::Case4});
      // Hyperbolic, positive and negative trace.
      specs.push_back({fr, fs, 1.0, hyperbolic_generator(0.8), CaseKind::Hyperbolic});
      specs.push_back({fr, fs, 0.5, hyperbolic_generator(-0.6), CaseKind::Hyperbolic});
      specs.push_back({fr, fs, 2.5, hyperbolic_generator(1.1), CaseKind::Hyperbolic});
    }
  }
  // Two more rotations bring the total to 50.
  specs.push_back({1.0, 0.0, 3.3, Matrix::Zero(2, 2), CaseKind::Case2});
  specs.push_back({1.0, 0.4, -1.71, Matrix::Zero(2, 2), CaseKind::Case2});
  return specs;
}

inline SymplecticPath normal_form_path(const NormalFormSpec& sp, unsigned long long seed) {
  SymplecticPath path = direct_sum(block(sp.forced_rho, shear_generator(sp.forced_shear)), block(sp.rho, sp.gen));
  // Forced plane: the first conjugate pair, as for an orbit path.
  path.base_point = vec({1.0, 0.0, 0.0, 0.0});
  path.flow_direction = vec({0.0, 0.0, 1.0, 0.0});
  if (sp.forced_shear == 0.0) path.radial_kernel = true;
  return conjugate(path, random_symplectic(2, 0.15, seed));
}

}  // namespace charflow::testing
