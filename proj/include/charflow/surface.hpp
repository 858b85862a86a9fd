#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace charflow {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using VectorRef = Eigen::Ref<const Eigen::VectorXd>;

enum class SurfaceKind { Ellipsoid, Perturbed };

/// Compact star-shaped hypersurface Σ = j⁻¹(1) in R^{2n}, described by its
/// gauge function j.
///
/// Ellipsoid:  j(x)² = Σ_k (x_k² + x_{n+k}²) / r_k².
/// Perturbed:  j(x) = j_e(x) · (1 + ε p(x/|x|)) with j_e the ellipsoid gauge
///             and p an even polynomial on the unit sphere. With u = x/|x|
///             and m = 2n, the coefficient list is read as
///               c[k]          · u_k²          for 0 ≤ k < m,
///               c[m + k]      · u_k⁴          for 0 ≤ k < m,
///               c[2m + idx]   · u_a² u_b²     for a < b (lexicographic),
///             and missing trailing coefficients are zero.
struct SurfaceModel {
  int dim_n = 0;
  SurfaceKind kind = SurfaceKind::Ellipsoid;
  Vector axes;                  // r_1..r_n
  double epsilon = 0.0;         // perturbation amplitude
  std::vector<double> coeffs;   // perturbation coefficients

  Eigen::Index dim() const { return 2 * dim_n; }
};

/// Maximum number of perturbation coefficients for half-dimension n.
std::size_t perturbation_coeff_count(int n);

SurfaceModel make_ellipsoid(const Vector& axes);
SurfaceModel make_sphere(int n, double radius);
/// Builds a perturbed gauge; rejects ε for which 1 + ε p ≤ 0 somewhere on a
/// dense sphere sample (star-shapedness would fail).
SurfaceModel make_perturbed(const Vector& axes, double epsilon, std::vector<double> coeffs);

/// Largest |ε| keeping 1 + ε p > 0 on the sample used by make_perturbed, for
/// the sign of ε given (returns +inf if p never has the harmful sign).
double perturbation_limit(const Vector& axes, const std::vector<double>& coeffs, double sign);

double gauge(const SurfaceModel& s, const VectorRef& x);
/// ∇j(x); x ≠ 0.
Vector gauge_grad(const SurfaceModel& s, const VectorRef& x);
/// Hessian of the computational Hamiltonian F = j²/2; x ≠ 0.
Matrix gauge_hess(const SurfaceModel& s, const VectorRef& x);

/// j, ∇j and ∇²j at one point.
struct GaugeJet {
  double value = 0.0;
  Vector grad;
  Matrix hess;
};
GaugeJet gauge_jet(const SurfaceModel& s, const VectorRef& x);

/// Radial projection x / j(x) onto Σ.
Vector project_to_surface(const SurfaceModel& s, const VectorRef& x);

/// H(x) = scale · j(x)^alpha. F = j²/2 is {alpha = 2, scale = 1/2}; the
/// variational Hamiltonian j^α is {alpha, 1}.
struct HamiltonianSpec {
  double alpha = 2.0;
  double scale = 0.5;
};
Vector hamiltonian_grad(const SurfaceModel& s, const HamiltonianSpec& h, const VectorRef& x);
Matrix hamiltonian_hess(const SurfaceModel& s, const HamiltonianSpec& h, const VectorRef& x);

struct NormalSupport {
  Vector normal;
  double support = 0.0;
};
/// Unit outer normal n(y) and support distance d(y) = n(y)·y for y ∈ Σ.
NormalSupport normal_and_support(const SurfaceModel& s, const VectorRef& y,
                                 double on_surface_tol = 1e-9);

struct SurfaceMetrics {
  double inner_radius_r = 0.0;
  double outer_radius_R = 0.0;
  double support_dist_d = 0.0;
};

inline constexpr int kMinMetricBudget = 256;

/// Estimates r, R, d. Ellipsoids use closed forms; perturbed gauges use
/// low-discrepancy sampling of the unit sphere followed by projected
/// gradient refinement of the best candidates.
SurfaceMetrics metrics(const SurfaceModel& s, int budget = 10000, std::uint64_t seed = 0);

/// Pinching predicate R² < 2 d².
inline bool pinched(const SurfaceMetrics& m) {
  return m.outer_radius_R * m.outer_radius_R < 2.0 * m.support_dist_d * m.support_dist_d;
}

/// Deterministic, seeded low-discrepancy points on the unit sphere S^{dim-1}
/// (dim even): shifted Halton points pushed through Box-Muller pairs.
std::vector<Vector> sphere_points(Eigen::Index dim, int count, std::uint64_t seed);

}  // namespace charflow
