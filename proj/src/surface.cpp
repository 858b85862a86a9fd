#include "charflow/surface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "charflow/errors.hpp"

namespace charflow {
namespace {

constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37,
                           41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89};

double radical_inverse(std::uint64_t index, int base) {
  double inv = 1.0 / base;
  double f = inv;
  double out = 0.0;
  while (index > 0) {
    out += f * static_cast<double>(index % base);
    index /= base;
    f *= inv;
  }
  return out;
}

// Diagonal of the ellipsoid quadratic form, one entry per coordinate.
Vector ellipsoid_diag(const SurfaceModel& s) {
  Vector d(s.dim());
  for (int k = 0; k < s.dim_n; ++k) {
    d(k) = d(s.dim_n + k) = 1.0 / (s.axes(k) * s.axes(k));
  }
  return d;
}

struct PolyJet {
  double value = 0.0;
  Vector grad;
  Matrix hess;
};

// p(u) and its Euclidean derivatives as a polynomial on R^m.
PolyJet perturbation_poly(const std::vector<double>& c, const Vector& u, bool need_hess) {
  const Eigen::Index m = u.size();
  PolyJet out;
  out.grad = Vector::Zero(m);
  if (need_hess) out.hess = Matrix::Zero(m, m);
  auto coeff = [&](std::size_t k) { return k < c.size() ? c[k] : 0.0; };
  for (Eigen::Index k = 0; k < m; ++k) {
    const double a2 = coeff(k);
    const double a4 = coeff(m + k);
    const double uk = u(k);
    out.value += a2 * uk * uk + a4 * uk * uk * uk * uk;
    out.grad(k) += 2.0 * a2 * uk + 4.0 * a4 * uk * uk * uk;
    if (need_hess) out.hess(k, k) += 2.0 * a2 + 12.0 * a4 * uk * uk;
  }
  std::size_t idx = 2 * m;
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = a + 1; b < m; ++b, ++idx) {
      const double w = coeff(idx);
      if (w == 0.0) continue;
      const double ua = u(a), ub = u(b);
      out.value += w * ua * ua * ub * ub;
      out.grad(a) += 2.0 * w * ua * ub * ub;
      out.grad(b) += 2.0 * w * ua * ua * ub;
      if (need_hess) {
        out.hess(a, a) += 2.0 * w * ub * ub;
        out.hess(b, b) += 2.0 * w * ua * ua;
        out.hess(a, b) += 4.0 * w * ua * ub;
        out.hess(b, a) += 4.0 * w * ua * ub;
      }
    }
  }
  return out;
}

double poly_extreme(const std::vector<double>& coeffs, Eigen::Index dim, double sign) {
  // min of sign * p over the sphere: sample, then refine the best few points.
  const auto pts = sphere_points(dim, 10000, 0x5eed);
  std::vector<std::pair<double, std::size_t>> vals;
  vals.reserve(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    vals.emplace_back(sign * perturbation_poly(coeffs, pts[i], false).value, i);
  }
  std::partial_sort(vals.begin(), vals.begin() + 8, vals.end());
  double best = vals.front().first;
  for (int c = 0; c < 8; ++c) {
    Vector u = pts[vals[c].second];
    double f = vals[c].first;
    double step = 0.1;
    for (int it = 0; it < 400 && step > 1e-14; ++it) {
      const PolyJet pj = perturbation_poly(coeffs, u, false);
      Vector g = sign * pj.grad;
      g -= g.dot(u) * u;
      if (g.norm() < 1e-14) break;
      Vector trial = (u - step * g).normalized();
      const double ft = sign * perturbation_poly(coeffs, trial, false).value;
      if (ft < f) {
        u = trial;
        f = ft;
        step *= 1.5;
      } else {
        step *= 0.5;
      }
    }
    best = std::min(best, f);
  }
  return sign * best;
}

}  // namespace

std::size_t perturbation_coeff_count(int n) {
  const std::size_t m = 2 * static_cast<std::size_t>(n);
  return 2 * m + m * (m - 1) / 2;
}

SurfaceModel make_ellipsoid(const Vector& axes) {
  if (axes.size() < 1) throw ConfigError("ellipsoid needs at least one axis");
  if ((axes.array() <= 0.0).any() || !axes.allFinite()) {
    throw ConfigError("ellipsoid axes must be positive and finite");
  }
  SurfaceModel s;
  s.dim_n = static_cast<int>(axes.size());
  s.kind = SurfaceKind::Ellipsoid;
  s.axes = axes;
  return s;
}

SurfaceModel make_sphere(int n, double radius) {
  return make_ellipsoid(Vector::Constant(n, radius));
}

double perturbation_limit(const Vector& axes, const std::vector<double>& coeffs, double sign) {
  const double pmin = poly_extreme(coeffs, 2 * axes.size(), sign >= 0 ? 1.0 : -1.0);
  // 1 + eps * p > 0 fails first where eps * p is most negative.
  const double worst = sign >= 0 ? pmin : -pmin;
  if (worst >= 0.0) return std::numeric_limits<double>::infinity();
  return 1.0 / -worst;
}

SurfaceModel make_perturbed(const Vector& axes, double epsilon, std::vector<double> coeffs) {
  SurfaceModel s = make_ellipsoid(axes);
  if (coeffs.size() > perturbation_coeff_count(s.dim_n)) {
    throw ConfigError("too many perturbation coefficients for n = " + std::to_string(s.dim_n));
  }
  s.kind = SurfaceKind::Perturbed;
  s.epsilon = epsilon;
  s.coeffs = std::move(coeffs);
  if (epsilon != 0.0) {
    const double limit = perturbation_limit(axes, s.coeffs, epsilon > 0 ? 1.0 : -1.0);
    if (std::abs(epsilon) >= limit) {
      // Locate a witness direction for the error message.
      const auto pts = sphere_points(s.dim(), 10000, 0x5eed);
      Vector witness = pts.front();
      double worst = std::numeric_limits<double>::infinity();
      for (const auto& u : pts) {
        const double g = 1.0 + epsilon * perturbation_poly(s.coeffs, u, false).value;
        if (g < worst) {
          worst = g;
          witness = u;
        }
      }
      throw StarShapeError("perturbation epsilon " + std::to_string(epsilon) +
                               " exceeds the star-shapedness limit " + std::to_string(limit),
                           witness);
    }
  }
  return s;
}

GaugeJet gauge_jet(const SurfaceModel& s, const VectorRef& x) {
  const Vector dq = ellipsoid_diag(s);
  const double q = x.dot(dq.cwiseProduct(x));
  if (!(q > 0.0)) throw DomainError("gauge derivatives are undefined at the origin");
  GaugeJet out;
  const double j0 = std::sqrt(q);
  const Vector dx = dq.cwiseProduct(x);
  const Vector grad0 = dx / j0;
  Matrix hess0 = Matrix(dq.asDiagonal()) / j0 - dx * dx.transpose() / (j0 * j0 * j0);
  if (s.kind == SurfaceKind::Ellipsoid || s.epsilon == 0.0) {
    out.value = j0;
    out.grad = grad0;
    out.hess = std::move(hess0);
    return out;
  }
  const double rho = x.norm();
  const Vector u = x / rho;
  const PolyJet pj = perturbation_poly(s.coeffs, u, true);
  const double eps = s.epsilon;
  const double g = 1.0 + eps * pj.value;
  const Eigen::Index m = x.size();
  const Matrix proj = Matrix::Identity(m, m) - u * u.transpose();
  const Vector grad_g = eps * (proj * pj.grad) / rho;
  const double au = pj.grad.dot(u);
  Matrix t = -(pj.grad * u.transpose() + u * pj.grad.transpose()) +
             3.0 * au * (u * u.transpose());
  t.diagonal().array() -= au;
  const Matrix hess_g = eps * (proj * pj.hess * proj + t) / (rho * rho);

  out.value = j0 * g;
  out.grad = g * grad0 + j0 * grad_g;
  out.hess = g * hess0 + grad0 * grad_g.transpose() + grad_g * grad0.transpose() + j0 * hess_g;
  return out;
}

double gauge(const SurfaceModel& s, const VectorRef& x) {
  const Vector dq = ellipsoid_diag(s);
  const double q = x.dot(dq.cwiseProduct(x));
  if (q <= 0.0) return 0.0;
  const double j0 = std::sqrt(q);
  if (s.kind == SurfaceKind::Ellipsoid || s.epsilon == 0.0) return j0;
  const Vector u = x.normalized();
  return j0 * (1.0 + s.epsilon * perturbation_poly(s.coeffs, u, false).value);
}

Vector gauge_grad(const SurfaceModel& s, const VectorRef& x) { return gauge_jet(s, x).grad; }

Matrix gauge_hess(const SurfaceModel& s, const VectorRef& x) {
  if (s.kind == SurfaceKind::Ellipsoid || s.epsilon == 0.0) {
    if (x.isZero(0.0)) throw DomainError("gauge derivatives are undefined at the origin");
    return ellipsoid_diag(s).asDiagonal();
  }
  return hamiltonian_hess(s, HamiltonianSpec{}, x);
}

Vector project_to_surface(const SurfaceModel& s, const VectorRef& x) {
  const double j = gauge(s, x);
  if (!(j > 0.0)) throw DomainError("cannot project the origin onto the surface");
  return x / j;
}

Vector hamiltonian_grad(const SurfaceModel& s, const HamiltonianSpec& h, const VectorRef& x) {
  const GaugeJet g = gauge_jet(s, x);
  return h.scale * h.alpha * std::pow(g.value, h.alpha - 1.0) * g.grad;
}

Matrix hamiltonian_hess(const SurfaceModel& s, const HamiltonianSpec& h, const VectorRef& x) {
  const GaugeJet g = gauge_jet(s, x);
  const double c = h.scale * h.alpha;
  Matrix out = c * (h.alpha - 1.0) * std::pow(g.value, h.alpha - 2.0) * (g.grad * g.grad.transpose()) +
               c * std::pow(g.value, h.alpha - 1.0) * g.hess;
  return 0.5 * (out + out.transpose());
}

NormalSupport normal_and_support(const SurfaceModel& s, const VectorRef& y, double on_surface_tol) {
  const GaugeJet g = gauge_jet(s, y);
  if (std::abs(g.value - 1.0) >= on_surface_tol) {
    throw PreconditionError("point is not on the surface: |j(y) - 1| = " +
                            std::to_string(std::abs(g.value - 1.0)));
  }
  NormalSupport out;
  out.normal = g.grad.normalized();
  out.support = out.normal.dot(y);
  if (!(out.support > 0.0)) {
    throw StarShapeError("non-positive support distance", Vector(y));
  }
  return out;
}

std::vector<Vector> sphere_points(Eigen::Index dim, int count, std::uint64_t seed) {
  if (dim % 2 != 0 || dim / 2 > static_cast<Eigen::Index>(std::size(kPrimes))) {
    throw PreconditionError("sphere_points needs an even dimension supported by the Halton table");
  }
  std::mt19937_64 rng(seed);
  std::vector<double> shift(dim);
  for (auto& v : shift) v = static_cast<double>(rng() >> 11) * 0x1.0p-53;
  std::vector<Vector> out;
  out.reserve(count);
  constexpr double kTwoPi = 6.283185307179586476925286766559;
  for (int i = 0; i < count; ++i) {
    Vector p(dim);
    for (Eigen::Index k = 0; k < dim; k += 2) {
      double h1 = radical_inverse(i + 1, kPrimes[k]) + shift[k];
      double h2 = radical_inverse(i + 1, kPrimes[k + 1]) + shift[k + 1];
      h1 -= std::floor(h1);
      h2 -= std::floor(h2);
      h1 = std::max(h1, 1e-300);
      const double r = std::sqrt(-2.0 * std::log(h1));
      p(k) = r * std::cos(kTwoPi * h2);
      p(k + 1) = r * std::sin(kTwoPi * h2);
    }
    const double nrm = p.norm();
    if (nrm < 1e-12) {
      p.setZero();
      p(0) = 1.0;
    } else {
      p /= nrm;
    }
    out.push_back(std::move(p));
  }
  return out;
}

namespace {

// Minimizes objective(u) over the unit sphere by projected gradient descent
// with an adaptive step.
template <typename Objective>
double refine_on_sphere(Vector u, double f, Objective&& objective) {
  double step = 0.05;
  for (int it = 0; it < 500 && step > 1e-15; ++it) {
    auto [val, grad] = objective(u);
    f = val;
    grad -= grad.dot(u) * u;
    if (grad.norm() < 1e-15) break;
    const Vector trial = (u - step * grad).normalized();
    const double ft = objective(trial).first;
    if (ft < f) {
      u = trial;
      step *= 1.5;
    } else {
      step *= 0.5;
    }
  }
  return objective(u).first;
}

}  // namespace

SurfaceMetrics metrics(const SurfaceModel& s, int budget, std::uint64_t seed) {
  if (budget < kMinMetricBudget) {
    throw PreconditionError("metrics budget must be at least " + std::to_string(kMinMetricBudget));
  }
  SurfaceMetrics m;
  if (s.kind == SurfaceKind::Ellipsoid || s.epsilon == 0.0) {
    m.inner_radius_r = s.axes.minCoeff();
    m.outer_radius_R = s.axes.maxCoeff();
    m.support_dist_d = s.axes.minCoeff();
    return m;
  }
  // On the unit sphere: |y| = 1/j(u) and d(y) = 1/|∇j(u)| (∇j is 0-homogeneous).
  const auto pts = sphere_points(s.dim(), budget, seed);
  std::vector<double> jv(pts.size()), gv(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const GaugeJet g = gauge_jet(s, pts[i]);
    if (!(g.value > 0.0)) throw StarShapeError("gauge vanishes on a sampled ray", pts[i]);
    jv[i] = g.value;
    gv[i] = g.grad.norm();
    if (!(g.value / gv[i] > 0.0)) throw StarShapeError("non-positive support distance", pts[i]);
  }
  auto best_indices = [&](const std::vector<double>& v, double sign) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::partial_sort(idx.begin(), idx.begin() + 8, idx.end(),
                      [&](std::size_t a, std::size_t b) { return sign * v[a] < sign * v[b]; });
    idx.resize(8);
    return idx;
  };
  auto j_obj = [&](double sign) {
    return [&s, sign](const Vector& u) {
      const GaugeJet g = gauge_jet(s, u);
      return std::pair<double, Vector>(sign * g.value, sign * g.grad);
    };
  };
  auto grad_obj = [&s](const Vector& u) {
    const GaugeJet g = gauge_jet(s, u);
    // -|∇j|²/2 so that minimizing maximizes |∇j|.
    return std::pair<double, Vector>(-0.5 * g.grad.squaredNorm(), -(g.hess * g.grad));
  };

  double jmin = std::numeric_limits<double>::infinity();
  for (auto i : best_indices(jv, 1.0)) jmin = std::min(jmin, refine_on_sphere(pts[i], jv[i], j_obj(1.0)));
  double jmax = -std::numeric_limits<double>::infinity();
  for (auto i : best_indices(jv, -1.0)) jmax = std::max(jmax, -refine_on_sphere(pts[i], -jv[i], j_obj(-1.0)));
  double gmax2 = 0.0;
  for (auto i : best_indices(gv, -1.0)) {
    gmax2 = std::max(gmax2, -2.0 * refine_on_sphere(pts[i], -0.5 * gv[i] * gv[i], grad_obj));
  }
  if (!(jmin > 0.0)) throw StarShapeError("gauge vanishes near a sampled ray", pts.front());
  // |∇j(u)| ≥ ∇j(u)·u = j(u) on the unit sphere, so d ≤ r always.
  gmax2 = std::max(gmax2, jmax * jmax);
  m.inner_radius_r = 1.0 / jmax;
  m.outer_radius_R = 1.0 / jmin;
  m.support_dist_d = 1.0 / std::sqrt(gmax2);
  return m;
}

}  // namespace charflow
