#pragma once

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "charflow/dynamics.hpp"

namespace charflow {

enum class Classification { Elliptic, Hyperbolic, Mixed, DegenerateBeyondForced };

std::string to_string(Classification c);
Classification classification_from_string(const std::string& s);

enum class CaseKind { Case1, Case2, Case3, Case4, Hyperbolic, Other };

/// Basic normal form of the non-trivial Sp(2) factor of an Sp(4) monodromy.
/// `b` is the nilpotent sign of N₁(±1, b) for Case1/Case3; `theta` ∈ (0, 2π)
/// for Case2.
struct CaseTag {
  CaseKind kind = CaseKind::Other;
  int b = 0;
  double theta = 0.0;

  friend bool operator==(const CaseTag&, const CaseTag&) = default;
};

std::string to_string(const CaseTag& tag);
CaseTag case_tag_from_string(const std::string& s);

struct SpectralTolerances {
  /// |λ - 1| below this counts toward the eigenvalue-1 multiplicity.
  double unit_eigen = 1e-6;
  /// Eigenvalues with |λ - 1| in [unit_eigen, ambiguity) count only if the
  /// rank of (M - I)^k confirms them; otherwise they raise a boundary error.
  double ambiguity = 1e-4;
  /// Relative singular-value threshold for that rank test.
  double rank = 1e-9;
  /// ||λ| - 1| below this puts λ on the unit circle.
  double unit_circle = 1e-6;
  /// Spectrum symmetry defect above this is an instability error.
  double symmetry = 1e-6;
  /// |tr M₂ ∓ 2| below this makes a 2×2 factor parabolic; up to
  /// trace_ambiguity it is a boundary error.
  double parabolic_trace = 1e-8;
  double trace_ambiguity = 1e-6;
  /// ||M₂ ∓ I|| below this means the nilpotent part vanishes (b = 0).
  double nilpotent = 1e-6;
};

struct FloquetData {
  Matrix monodromy;
  std::vector<std::complex<double>> multipliers;
  /// Algebraic multiplicity of the eigenvalue 1.
  int nullity_nu = 0;
  Classification classification = Classification::Mixed;
  bool elliptic = false;
  bool hyperbolic = false;
  bool nondegenerate = false;
  /// max over λ of the distance from 1/λ (and from conj λ) to the spectrum.
  double symmetry_defect = 0.0;
  /// Two vectors spanning the plane the autonomous flow forces into the
  /// eigenvalue-1 subspace: the base point and the flow direction. Empty for
  /// abstract paths.
  Matrix forced_plane;
  std::optional<CaseTag> case_tag;
};

/// Floquet data of the path at time τ (the stored sample closest to τ must be
/// within 1e-9·τ of it).
FloquetData floquet(const SymplecticPath& path, double period_tau, const SpectralTolerances& tol = {});

/// Floquet data of a bare symplectic matrix.
FloquetData floquet_of_matrix(const Matrix& m, const Matrix& forced_plane = Matrix(),
                              const SpectralTolerances& tol = {});

/// Algebraic multiplicity of the eigenvalue 1 of m; throws BoundaryError when
/// an eigenvalue in the ambiguity band is not confirmed by the rank test.
int unit_multiplicity(const Matrix& m, const SpectralTolerances& tol = {});

/// Sp(4) basic normal-form case of the monodromy.
CaseTag normal_form_case(const FloquetData& data, const SpectralTolerances& tol = {});

/// Case tag of a 2×2 symplectic factor in standard coordinates.
CaseTag classify_sp2(const Matrix& m2, const SpectralTolerances& tol = {});

/// The 2×2 restriction of m to its non-forced symplectic plane, in a
/// symplectic basis of that plane.
Matrix transverse_block(const FloquetData& data, const SpectralTolerances& tol = {});

struct RotationAngle {
  double theta = 0.0;
  /// Best rational approximation p/q of θ/π with q ≤ max_den.
  long p = 0;
  long q = 1;
  double error = 0.0;
};

RotationAngle rotation_angle(const FloquetData& data, int max_den = 64);
RotationAngle rational_approximation(double theta, int max_den = 64);

}  // namespace charflow
