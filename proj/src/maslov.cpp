#include "charflow/maslov.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "charflow/errors.hpp"

namespace charflow {
namespace {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * kPi;

// Index computation.
//
// In the eigenbasis of the Hermitian form -iJ a symplectic γ becomes a
// pseudo-unitary Γ = [[A, B], [C, D]] for diag(I, -I). Its Redheffer
// transform
//     U = [[-A⁻¹B, A⁻¹], [D - CA⁻¹B, CA⁻¹]],  (ξ₋, η₊) ↦ (ξ₊, η₋),
// is unitary, and γx = ωx exactly when U agrees with
// U_ω = [[0, ω̄], [ω, 0]] on (ξ₋, ξ₊ ω). So ker(γ - ω) is the eigenvalue-1
// space of W = (U_ω* U)*, and i_ω counts, with orientation, how the
// eigenphases of W wind through 1:
//     i_ω = (Φ(T) - Σ_j f_j(T)) / 2π + n,
// where Φ is the continuous lift of arg det W with Φ(0) = 0 and f_j ∈ (0, 2π]
// are the endpoint eigenphases, a phase at 0 counting as 2π. The + n and
// the 2π convention reproduce i₁(R(2πρ·)) = 2⌊ρ⌋ + 1, i₁(R(2π·)) = 1 and
// i_ω(const I) = 0 for ω ≠ 1.
class WindingTracker {
 public:
  WindingTracker(Eigen::Index n, double phi, const IndexTolerances& tol)
      : n_(n), tol_(tol), omega_(std::polar(1.0, phi)) {
    q_ = CMatrix::Zero(2 * n, 2 * n);
    const double s = 1.0 / std::sqrt(2.0);
    for (Eigen::Index k = 0; k < n; ++k) {
      q_(k, k) = s;
      q_(n + k, k) = Complex(0, -s);
      q_(k, n + k) = s;
      q_(n + k, n + k) = Complex(0, s);
    }
  }

  CMatrix winding_unitary(const Matrix& g) const {
    const Eigen::Index n = n_;
    const CMatrix big = q_.adjoint() * g.cast<Complex>() * q_;
    const CMatrix a = big.topLeftCorner(n, n);
    const CMatrix b = big.topRightCorner(n, n);
    const CMatrix c = big.bottomLeftCorner(n, n);
    const CMatrix d = big.bottomRightCorner(n, n);
    Eigen::PartialPivLU<CMatrix> lu(a);
    const CMatrix ainv = lu.inverse();
    CMatrix u(2 * n, 2 * n);
    u.topLeftCorner(n, n) = -ainv * b;
    u.topRightCorner(n, n) = ainv;
    u.bottomLeftCorner(n, n) = d - c * ainv * b;
    u.bottomRightCorner(n, n) = c * ainv;
    // (U_ω* U)*: U_ω* U swaps the halves of U and scales them by ω̄, ω.
    CMatrix uw(2 * n, 2 * n);
    uw.topRows(n) = std::conj(omega_) * u.bottomRows(n);
    uw.bottomRows(n) = omega_ * u.topRows(n);
    return uw.adjoint();
  }

  void start(const Matrix& g) {
    w_ = winding_unitary(g);
    phase_ = 0.0;
    // Reference the lift to the starting point.
    const Complex det = w_.determinant();
    phase_ = std::arg(det);
  }

  void advance(const Matrix& g) {
    const CMatrix w = winding_unitary(g);
    const double jump = (w - w_).norm();
    if (jump > tol_.max_jump) {
      throw SamplingError("path is under-sampled for the index computation (jump " +
                          std::to_string(jump) + ")");
    }
    Eigen::ComplexEigenSolver<CMatrix> es(w_.adjoint() * w, false);
    double inc = 0.0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) inc += std::arg(es.eigenvalues()(k));
    phase_ += inc;
    w_ = w;
  }

  IndexNullity finish() const {
    Eigen::ComplexEigenSolver<CMatrix> es(w_, false);
    double sum = 0.0;
    int kernel = 0;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
      const double a = std::arg(es.eigenvalues()(k));
      const double mag = std::abs(a);
      if (mag < tol_.kernel_phase) {
        ++kernel;
        sum += kTwoPi;
      } else if (mag < tol_.ambiguity) {
        throw BoundaryError("path endpoint is ambiguously close to a degeneracy", mag);
      } else {
        sum += a > 0 ? a : a + kTwoPi;
      }
    }
    const double raw = (phase_ - sum) / kTwoPi + static_cast<double>(n_);
    const double rounded = std::round(raw);
    if (std::abs(raw - rounded) > 1e-6) {
      throw InstabilityError("non-integral index estimate " + std::to_string(raw));
    }
    IndexNullity out;
    out.index = static_cast<long>(rounded);
    out.kernel_dim = kernel;
    out.nullity = kernel;
    return out;
  }

 private:
  Eigen::Index n_;
  IndexTolerances tol_;
  Complex omega_;
  CMatrix q_;
  CMatrix w_;
  double phase_ = 0.0;
};

void check_path(const SymplecticPath& path) {
  if (path.matrices.size() < 2) throw PreconditionError("index needs a path with at least two samples");
  if (path.dim() % 2 != 0) throw PreconditionError("path matrices must have even size");
  const Matrix& g0 = path.matrices.front();
  if ((g0 - Matrix::Identity(g0.rows(), g0.cols())).cwiseAbs().maxCoeff() > 1e-10) {
    throw PreconditionError("symplectic path must start at the identity");
  }
}

bool is_one(double phi) { return std::abs(std::remainder(phi, kTwoPi)) < 1e-15; }

// Orbit convention: the radial direction of a 2-homogeneous flow is an extra
// eigenvector for ω = 1 only.
int adjust_nullity(const SymplecticPath& path, double phi, int kernel) {
  if (path.radial_kernel && is_one(phi)) {
    if (kernel < 1) throw InstabilityError("radial kernel vector missing from the monodromy");
    return kernel - 1;
  }
  return kernel;
}

}  // namespace

IndexNullity omega_index(const SymplecticPath& path, double phi, const IndexTolerances& tol) {
  check_path(path);
  const Eigen::Index n = path.dim() / 2;
  WindingTracker tracker(n, phi, tol);
  tracker.start(path.matrices.front());
  for (std::size_t k = 1; k < path.matrices.size(); ++k) tracker.advance(path.matrices[k]);
  IndexNullity out = tracker.finish();
  out.nullity = adjust_nullity(path, phi, out.kernel_dim);
  return out;
}

IndexNullity maslov_index(const SymplecticPath& path, const IndexTolerances& tol) {
  return omega_index(path, 0.0, tol);
}

SymplecticPath iterate_path(const SymplecticPath& path, int m) {
  if (m < 1) throw PreconditionError("iterate count must be positive");
  if (path.matrices.empty()) throw PreconditionError("empty path");
  SymplecticPath out = path;
  const Matrix end = path.end();
  const double t_end = path.t_end();
  Matrix power = end;
  for (int r = 1; r < m; ++r) {
    for (std::size_t k = 1; k < path.matrices.size(); ++k) {
      out.times.push_back(r * t_end + path.times[k]);
      out.matrices.push_back(path.matrices[k] * power);
    }
    power = end * power;
  }
  return out;
}

std::vector<IndexNullity> direct_iterate_indices(const SymplecticPath& prime, int m_max,
                                                 const IndexTolerances& tol) {
  check_path(prime);
  const Eigen::Index n = prime.dim() / 2;
  WindingTracker tracker(n, 0.0, tol);
  tracker.start(prime.matrices.front());
  std::vector<IndexNullity> out;
  const Matrix end = prime.end();
  Matrix power = Matrix::Identity(end.rows(), end.cols());
  try {
    for (int m = 1; m <= m_max; ++m) {
      if (power.norm() * end.norm() > tol.direct_norm_limit) break;
      for (std::size_t k = 1; k < prime.matrices.size(); ++k) {
        tracker.advance(prime.matrices[k] * power);
      }
      IndexNullity r = tracker.finish();
      r.nullity = adjust_nullity(prime, 0.0, r.kernel_dim);
      out.push_back(r);
      power = end * power;
    }
  } catch (const SamplingError&) {
    // Later iterates fall back to the Bott splitting.
  }
  return out;
}

IndexNullity bott_iterate_index(const SymplecticPath& prime, int m, const IndexTolerances& tol) {
  if (m < 1) throw PreconditionError("iterate count must be positive");
  IndexNullity total;
  // i_ω = i_ω̄ for real paths: pair the roots e^{±2πik/m}.
  for (int k = 0; 2 * k <= m; ++k) {
    const IndexNullity r = omega_index(prime, kTwoPi * k / m, tol);
    const int weight = (k == 0 || 2 * k == m) ? 1 : 2;
    total.index += weight * r.index;
    total.kernel_dim += weight * r.kernel_dim;
  }
  total.nullity = adjust_nullity(prime, 0.0, total.kernel_dim);
  return total;
}

double mean_index(const SymplecticPath& prime, const IndexTolerances& tol) {
  check_path(prime);
  Eigen::EigenSolver<Matrix> es(prime.end(), false);
  std::vector<double> cuts = {0.0, kPi};
  for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k) {
    const Complex z = es.eigenvalues()(k);
    if (std::abs(std::abs(z) - 1.0) < 1e-6) {
      cuts.push_back(std::abs(std::arg(z)));
    }
  }
  std::sort(cuts.begin(), cuts.end());
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double len = cuts[k + 1] - cuts[k];
    if (len < 1e-12) continue;
    const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
    acc += len * static_cast<double>(omega_index(prime, mid, tol).index);
  }
  // i_ω = i_ω̄, so the average over [0, π] is the average over the circle.
  return acc / kPi;
}

std::pair<double, double> regression_slope(const std::vector<long>& values, int first_m) {
  const std::size_t count = values.size();
  if (count < 2) return {0.0, 0.0};
  double mx = 0, my = 0;
  for (std::size_t k = 0; k < count; ++k) {
    mx += first_m + static_cast<double>(k);
    my += static_cast<double>(values[k]);
  }
  mx /= count;
  my /= count;
  double sxx = 0, sxy = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double dx = first_m + static_cast<double>(k) - mx;
    sxx += dx * dx;
    sxy += dx * (static_cast<double>(values[k]) - my);
  }
  const double slope = sxy / sxx;
  double rss = 0;
  for (std::size_t k = 0; k < count; ++k) {
    const double dx = first_m + static_cast<double>(k) - mx;
    const double r = static_cast<double>(values[k]) - my - slope * dx;
    rss += r * r;
  }
  const double se = count > 2 ? std::sqrt(rss / static_cast<double>(count - 2) / sxx) : 0.0;
  return {slope, se};
}

IndexRecord index_sequence(const SymplecticPath& prime, int m_max, IterationRoute route,
                           const IndexTolerances& tol) {
  if (m_max < 2) throw PreconditionError("m_max must be at least 2");
  check_path(prime);
  IndexRecord rec;
  rec.n = static_cast<int>(prime.dim() / 2);
  std::vector<IndexNullity> rows;
  if (route != IterationRoute::Bott) rows = direct_iterate_indices(prime, m_max, tol);
  if (route == IterationRoute::Direct && static_cast<int>(rows.size()) < m_max) {
    throw SamplingError("direct iteration stopped at m = " + std::to_string(rows.size() + 1));
  }
  for (int m = static_cast<int>(rows.size()) + 1; m <= m_max; ++m) {
    rows.push_back(bott_iterate_index(prime, m, tol));
  }
  for (int m = 1; m <= m_max; ++m) {
    IterateIndex it;
    it.m = m;
    it.i_maslov = rows[m - 1].index;
    it.nu = rows[m - 1].nullity;
    it.i_viterbo = it.i_maslov - rec.n;
    rec.iterates.push_back(it);
  }
  rec.i_maslov_1 = rec.iterates.front().i_maslov;
  rec.nu_1 = rec.iterates.front().nu;
  rec.i_viterbo_1 = rec.iterates.front().i_viterbo;
  rec.mean_index = mean_index(prime, tol);
  const int first = std::max(1, m_max / 2);
  std::vector<long> tail;
  for (int m = first; m <= m_max; ++m) tail.push_back(rec.iterates[m - 1].i_viterbo);
  std::tie(rec.mean_index_regression, rec.regression_error) = regression_slope(tail, first);
  return rec;
}

long ceil_int(double a) {
  // A measured angle that lands on an integer must not round up past it.
  const double r = std::round(a);
  if (std::abs(a - r) <= 1e-9 * std::max(1.0, std::abs(a))) return static_cast<long>(r);
  return static_cast<long>(std::ceil(a));
}

long iterate_index_formula(const CaseTag& tag, long i1, std::optional<double> theta, int m) {
  if (m < 1) throw ParameterError("iterate count must be positive");
  switch (tag.kind) {
    case CaseKind::Case1: {
      const long base = m * (i1 + 3) - 3;
      if (tag.b == 1) return base;
      if (tag.b == 0 || tag.b == -1) return base - (m % 2 == 0 ? 1 : 0);
      throw ParameterError("Case1 needs b in {-1, 0, 1}");
    }
    case CaseKind::Case2:
      if (!theta) throw ParameterError("Case2 iteration formula needs the rotation angle");
      return m * (i1 + 2) + 2 * ceil_int(m * *theta / kTwoPi) - 4;
    case CaseKind::Case3:
      return m * (i1 + 4) - 4;
    case CaseKind::Case4:
    case CaseKind::Hyperbolic:
      return m * (i1 + 3) - 3;
    case CaseKind::Other:
      break;
  }
  throw CaseError("no iteration formula for an unrecognized normal form");
}

double mean_index_formula(const CaseTag& tag, long i1, std::optional<double> theta) {
  const double i = static_cast<double>(i1);
  switch (tag.kind) {
    case CaseKind::Case1:
    case CaseKind::Case4:
    case CaseKind::Hyperbolic:
      return i + 3.0;
    case CaseKind::Case2:
      if (!theta) throw ParameterError("Case2 mean index needs the rotation angle");
      return i + 2.0 + *theta / kPi;
    case CaseKind::Case3:
      return i + 4.0;
    case CaseKind::Other:
      break;
  }
  throw CaseError("no mean-index formula for an unrecognized normal form");
}

}  // namespace charflow
