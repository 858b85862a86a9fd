#include "charflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "charflow/errors.hpp"
#include "charflow/symplectic.hpp"

namespace charflow {
namespace {

using Complex = std::complex<double>;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  return a < 0 ? a + kTwoPi : a;
}

std::vector<Complex> eigenvalues(const Matrix& m) {
  Eigen::EigenSolver<Matrix> es(m, false);
  if (es.info() != Eigen::Success) throw InstabilityError("eigenvalue computation failed");
  std::vector<Complex> out(es.eigenvalues().begin(), es.eigenvalues().end());
  std::sort(out.begin(), out.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
  return out;
}

double distance_to_set(Complex z, const std::vector<Complex>& set) {
  double best = std::numeric_limits<double>::infinity();
  for (Complex w : set) best = std::min(best, std::abs(z - w));
  return best;
}

// Symplectic basis (e, f) of the ω-complement of span(forced), ω(e, f) = 1.
std::pair<Vector, Vector> complement_basis(const Matrix& forced) {
  const Vector a = forced.col(0);
  const Vector b = forced.col(1);
  const double c = omega(a, b);
  if (std::abs(c) < 1e-12 * a.norm() * b.norm()) {
    throw InstabilityError("forced plane is not symplectic");
  }
  const Eigen::Index dim = a.size();
  std::vector<Vector> w;
  for (Eigen::Index i = 0; i < dim; ++i) {
    Vector v = Vector::Unit(dim, i);
    const Vector proj = (omega(v, b) / c) * a + (omega(a, v) / c) * b;
    w.push_back(v - proj);
  }
  double best = 0.0;
  std::size_t bi = 0, bj = 1;
  for (std::size_t i = 0; i < w.size(); ++i) {
    for (std::size_t j = i + 1; j < w.size(); ++j) {
      const double o = std::abs(omega(w[i], w[j]));
      if (o > best) {
        best = o;
        bi = i;
        bj = j;
      }
    }
  }
  return {w[bi], w[bj] / omega(w[bi], w[bj])};
}

std::pair<Vector, Vector> symplectic_pair(const Vector& u1, const Vector& u2) {
  const double o = omega(u1, u2);
  if (std::abs(o) < 1e-10) throw InstabilityError("invariant plane is not symplectic");
  return {u1, u2 / o};
}

// Coordinates of m restricted to span(e, f) with ω(e, f) = 1.
Matrix restrict_to(const Matrix& m, const Vector& e, const Vector& f) {
  const Vector me = m * e;
  const Vector mf = m * f;
  Matrix out(2, 2);
  out << omega(me, f), omega(mf, f), omega(e, me), omega(e, mf);
  return out;
}

Matrix sym(const Matrix& a) { return 0.5 * (a + a.transpose()); }

}  // namespace

std::string to_string(Classification c) {
  switch (c) {
    case Classification::Elliptic: return "elliptic";
    case Classification::Hyperbolic: return "hyperbolic";
    case Classification::Mixed: return "mixed";
    case Classification::DegenerateBeyondForced: return "degenerate-beyond-forced";
  }
  return "mixed";
}

Classification classification_from_string(const std::string& s) {
  for (auto c : {Classification::Elliptic, Classification::Hyperbolic, Classification::Mixed,
                 Classification::DegenerateBeyondForced}) {
    if (to_string(c) == s) return c;
  }
  throw ConfigError("unknown classification '" + s + "'");
}

std::string to_string(const CaseTag& tag) {
  switch (tag.kind) {
    case CaseKind::Case1: return "Case1(b=" + std::to_string(tag.b) + ")";
    case CaseKind::Case2: {
      char buf[64];
      std::snprintf(buf, sizeof buf, "Case2(theta=%.17g)", tag.theta);
      return buf;
    }
    case CaseKind::Case3: return "Case3(b=" + std::to_string(tag.b) + ")";
    case CaseKind::Case4: return "Case4";
    case CaseKind::Hyperbolic: return "Hyperbolic";
    case CaseKind::Other: return "Other";
  }
  return "Other";
}

CaseTag case_tag_from_string(const std::string& s) {
  CaseTag t;
  if (s == "Case4") {
    t.kind = CaseKind::Case4;
  } else if (s == "Hyperbolic") {
    t.kind = CaseKind::Hyperbolic;
  } else if (s == "Other") {
    t.kind = CaseKind::Other;
  } else if (s.rfind("Case1(b=", 0) == 0 || s.rfind("Case3(b=", 0) == 0) {
    t.kind = s[4] == '1' ? CaseKind::Case1 : CaseKind::Case3;
    t.b = std::stoi(s.substr(8));
  } else if (s.rfind("Case2(theta=", 0) == 0) {
    t.kind = CaseKind::Case2;
    t.theta = std::stod(s.substr(12));
  } else {
    throw ConfigError("unknown case tag '" + s + "'");
  }
  return t;
}

int unit_multiplicity(const Matrix& m, const SpectralTolerances& tol) {
  const auto ev = eigenvalues(m);
  int candidates = 0;
  double nearest_outside = std::numeric_limits<double>::infinity();
  for (Complex z : ev) {
    const double d = std::abs(z - 1.0);
    if (d < tol.ambiguity) {
      ++candidates;
    }
    if (d >= tol.unit_eigen) nearest_outside = std::min(nearest_outside, d);
  }
  if (candidates == 0) return 0;
  if (nearest_outside >= tol.ambiguity) return candidates;
  // Some eigenvalue near 1 is outside the clear radius. A perturbed Jordan
  // block at 1 splits like sqrt(noise), so decide by the rank of (M - I)^k on
  // the candidate cluster instead of by eigenvalue distance.
  const Matrix a = m - Matrix::Identity(m.rows(), m.cols());
  Matrix p = Matrix::Identity(m.rows(), m.cols());
  for (int k = 0; k < candidates; ++k) p = p * a;
  Eigen::JacobiSVD<Matrix> svd(p);
  const double thr = tol.rank * std::pow(std::max(1.0, a.norm()), candidates);
  int nullity = 0;
  for (double sv : svd.singularValues()) {
    if (sv < thr) ++nullity;
  }
  if (nullity != candidates) {
    throw BoundaryError("eigenvalue within " + std::to_string(nearest_outside) +
                            " of 1 is neither clearly 1 nor clearly separated",
                        nearest_outside);
  }
  return candidates;
}

FloquetData floquet_of_matrix(const Matrix& m, const Matrix& forced_plane,
                              const SpectralTolerances& tol) {
  if (m.rows() != m.cols() || m.rows() % 2 != 0) {
    throw PreconditionError("monodromy must be square of even size");
  }
  FloquetData out;
  out.monodromy = m;
  out.forced_plane = forced_plane;
  out.multipliers = eigenvalues(m);
  for (Complex z : out.multipliers) {
    const double inv = distance_to_set(1.0 / z, out.multipliers) / std::max(1.0, std::abs(1.0 / z));
    const double cj = distance_to_set(std::conj(z), out.multipliers) / std::max(1.0, std::abs(z));
    out.symmetry_defect = std::max({out.symmetry_defect, inv, cj});
  }
  if (out.symmetry_defect > tol.symmetry) {
    throw InstabilityError("multiplier spectrum is not symplectic (defect " +
                           std::to_string(out.symmetry_defect) + ")");
  }
  out.nullity_nu = unit_multiplicity(m, tol);
  int on_circle = 0;
  for (Complex z : out.multipliers) {
    if (std::abs(std::abs(z) - 1.0) < tol.unit_circle) ++on_circle;
  }
  const int dim = static_cast<int>(m.rows());
  out.elliptic = on_circle == dim;
  out.hyperbolic = out.nullity_nu == 2 && on_circle == 2;
  out.nondegenerate = out.nullity_nu == 2;
  if (out.nullity_nu > 2) {
    out.classification = Classification::DegenerateBeyondForced;
  } else if (out.elliptic) {
    out.classification = Classification::Elliptic;
  } else if (out.hyperbolic) {
    out.classification = Classification::Hyperbolic;
  } else {
    out.classification = Classification::Mixed;
  }
  if (dim == 4) {
    try {
      out.case_tag = normal_form_case(out, tol);
    } catch (const BoundaryError&) {
      out.case_tag.reset();
    } catch (const InstabilityError&) {
      out.case_tag.reset();
    }
  }
  return out;
}

FloquetData floquet(const SymplecticPath& path, double period_tau, const SpectralTolerances& tol) {
  if (path.matrices.empty()) throw PreconditionError("empty symplectic path");
  std::size_t k = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < path.times.size(); ++i) {
    const double d = std::abs(path.times[i] - period_tau);
    if (d < best) {
      best = d;
      k = i;
    }
  }
  if (best > 1e-9 * std::max(1.0, std::abs(period_tau))) {
    throw PreconditionError("path does not contain a sample at the requested period");
  }
  Matrix forced;
  if (path.base_point.size() == path.dim() && path.flow_direction.size() == path.dim()) {
    forced.resize(path.dim(), 2);
    forced.col(0) = path.base_point;
    forced.col(1) = path.flow_direction;
  }
  return floquet_of_matrix(path.matrices[k], forced, tol);
}

Matrix transverse_block(const FloquetData& data, const SpectralTolerances&) {
  const Matrix& m = data.monodromy;
  if (m.rows() != 4) throw UnsupportedError("normal forms are implemented for n = 2 only");
  if (data.forced_plane.cols() == 2) {
    auto [e, f] = complement_basis(data.forced_plane);
    return restrict_to(m, e, f);
  }
  if (data.nullity_nu != 2) {
    throw CaseError("transverse block of an abstract path needs a double eigenvalue 1");
  }
  // The generalized 1-eigenspace is 2-dimensional, so range((M - I)²) is the
  // invariant complement.
  const Matrix a = m - Matrix::Identity(4, 4);
  Eigen::JacobiSVD<Matrix> svd(a * a, Eigen::ComputeFullU);
  auto [e, f] = symplectic_pair(svd.matrixU().col(0), svd.matrixU().col(1));
  return restrict_to(m, e, f);
}

CaseTag classify_sp2(const Matrix& m2, const SpectralTolerances& tol) {
  const double t = m2.trace();
  const Matrix j2 = standard_j(1);
  CaseTag tag;
  auto parabolic = [&](double target) {
    const double gap = std::abs(t - target);
    if (gap < tol.parabolic_trace) return true;
    if (gap < tol.trace_ambiguity) {
      throw BoundaryError("trace " + std::to_string(t) + " is ambiguously close to " +
                              std::to_string(target),
                          gap);
    }
    return false;
  };
  if (parabolic(-2.0)) {
    tag.kind = CaseKind::Case1;
    const Matrix n = m2 + Matrix::Identity(2, 2);
    if (n.norm() < tol.nilpotent) {
      tag.b = 0;
    } else {
      tag.b = sym(j2 * n).trace() > 0 ? 1 : -1;
    }
    return tag;
  }
  if (parabolic(2.0)) {
    const Matrix n = m2 - Matrix::Identity(2, 2);
    if (n.norm() < tol.nilpotent) {
      tag.kind = CaseKind::Case3;
      tag.b = 0;
    } else if (sym(j2 * n).trace() > 0) {
      tag.kind = CaseKind::Case3;
      tag.b = 1;
    } else {
      tag.kind = CaseKind::Case4;
    }
    return tag;
  }
  if (std::abs(t) > 2.0) {
    tag.kind = CaseKind::Hyperbolic;
    return tag;
  }
  // Elliptic: θ is the angle of the eigenvalue whose eigenvector has positive
  // Krein type, so that R(θ) reports θ.
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(m2.cast<Complex>());
  for (int k = 0; k < 2; ++k) {
    const Eigen::VectorXcd v = es.eigenvectors().col(k);
    const Complex krein = v.dot(j2.cast<Complex>() * v);  // v* J v
    if (krein.imag() > 0) {
      tag.kind = CaseKind::Case2;
      tag.theta = wrap_angle(std::arg(es.eigenvalues()(k)));
      return tag;
    }
  }
  throw BoundaryError("elliptic factor without a positive Krein eigenvector", 0.0);
}

CaseTag normal_form_case(const FloquetData& data, const SpectralTolerances& tol) {
  const Matrix& m = data.monodromy;
  if (m.rows() != 4) throw UnsupportedError("normal forms are implemented for n = 2 only");
  if (data.forced_plane.cols() == 2 || data.nullity_nu == 2) {
    return classify_sp2(transverse_block(data, tol), tol);
  }
  CaseTag tag;
  if (data.nullity_nu == 4) {
    const Matrix a = m - Matrix::Identity(4, 4);
    const double thr = tol.nilpotent * std::max(1.0, m.norm());
    Eigen::SelfAdjointEigenSolver<Matrix> es(sym(standard_j(2) * a));
    int pos = 0, neg = 0;
    for (double l : es.eigenvalues()) {
      if (l > thr) ++pos;
      if (l < -thr) ++neg;
    }
    const bool square_zero = (a * a).norm() < thr;
    if (square_zero && pos == 1 && neg == 0) {
      tag.kind = CaseKind::Case3;
      tag.b = 0;
    } else if (square_zero && pos == 2 && neg == 0) {
      tag.kind = CaseKind::Case3;
      tag.b = 1;
    } else if (square_zero && pos == 1 && neg == 1) {
      tag.kind = CaseKind::Case4;
    }
  }
  return tag;
}

RotationAngle rational_approximation(double theta, int max_den) {
  RotationAngle out;
  out.theta = theta;
  const double x = theta / std::numbers::pi;
  out.error = std::numeric_limits<double>::infinity();
  for (long q = 1; q <= max_den; ++q) {
    const long p = std::lround(x * static_cast<double>(q));
    const double err = std::abs(x - static_cast<double>(p) / static_cast<double>(q));
    if (err < out.error - 1e-15) {
      out.error = err;
      out.p = p;
      out.q = q;
    }
  }
  return out;
}

RotationAngle rotation_angle(const FloquetData& data, int max_den) {
  if (!data.case_tag || data.case_tag->kind != CaseKind::Case2) {
    throw CaseError("rotation angle requires a Case2 monodromy");
  }
  return rational_approximation(data.case_tag->theta, max_den);
}

}  // namespace charflow
