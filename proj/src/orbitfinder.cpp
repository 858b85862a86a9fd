#include "charflow/orbitfinder.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <numbers>
#include <optional>
#include <thread>

#include "charflow/errors.hpp"
#include "charflow/symplectic.hpp"

namespace charflow {
namespace {

constexpr double kPi = std::numbers::pi;

double closure_residual(const Vector& a, const Vector& b) { return (a - b).norm(); }

// Cubic Hermite point on the segment between samples k and k+1.
Vector hermite(const ClosedCharacteristic& o, std::size_t k, double s) {
  const double h = o.times[k + 1] - o.times[k];
  const double s2 = s * s, s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * o.points[k] + h10 * h * o.velocities[k] + h01 * o.points[k + 1] +
         h11 * h * o.velocities[k + 1];
}

double segment_distance(const ClosedCharacteristic& o, std::size_t k, const Vector& p) {
  // Golden-section search; the distance is unimodal on a short arc.
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 0.0, b = 1.0;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = (hermite(o, k, c) - p).squaredNorm();
  double fd = (hermite(o, k, d) - p).squaredNorm();
  for (int it = 0; it < 60; ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = (hermite(o, k, c) - p).squaredNorm();
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = (hermite(o, k, d) - p).squaredNorm();
    }
  }
  const double ends = std::min((o.points[k] - p).squaredNorm(), (o.points[k + 1] - p).squaredNorm());
  return std::sqrt(std::min({fc, fd, ends}));
}

struct Attempt {
  Vector x;
  double t = 0.0;
  EndState end;
  double residual = 0.0;
  int iterations = 0;
};

Attempt evaluate(const SurfaceModel& s, const Vector& x, double t, const FlowOptions& fo) {
  Attempt a;
  a.x = x;
  a.t = t;
  a.end = flow_end_state(s, x, t, fo);
  a.residual = closure_residual(a.end.point, x);
  return a;
}

// Levenberg-Marquardt on (x, T) ↦ φ_T(x) - x with the section and surface
// rows appended.
Attempt refine(const SurfaceModel& s, const Vector& seed, double guess, const ShootOptions& opt) {
  const FlowOptions& fo = opt.flow;
  const double t_floor = 0.3 * guess;
  const Eigen::Index dim = s.dim();
  Attempt cur = evaluate(s, project_to_surface(s, seed), guess, fo);
  std::vector<double> history{cur.residual};
  double mu = 1e-3;
  for (int it = 0; it < opt.max_iterations && cur.residual >= opt.tol; ++it) {
    const Vector f0 = vector_field(s, fo.hamiltonian, cur.x);
    const Vector ft = vector_field(s, fo.hamiltonian, cur.end.point);
    if (f0.norm() < 1e-12) throw SectionError("flow is tangent to the section (vanishing field)");
    const Vector g = gauge_grad(s, cur.x);
    Matrix jac = Matrix::Zero(dim + 2, dim + 1);
    jac.topLeftCorner(dim, dim) = cur.end.monodromy - Matrix::Identity(dim, dim);
    jac.topRightCorner(dim, 1) = ft;
    jac.block(dim, 0, 1, dim) = f0.transpose() / f0.norm();
    jac.block(dim + 1, 0, 1, dim) = g.transpose() / g.norm();
    Vector rhs = Vector::Zero(dim + 2);
    rhs.head(dim) = -(cur.end.point - cur.x);
    const Matrix jtj = jac.transpose() * jac;
    const Vector jtr = jac.transpose() * rhs;
    bool accepted = false;
    for (int tries = 0; tries < 12 && !accepted; ++tries) {
      Matrix lhs = jtj;
      lhs.diagonal() += mu * (jtj.diagonal().array() + 1e-12).matrix();
      const Vector delta = lhs.ldlt().solve(jtr);
      const double t_new = cur.t + delta(dim);
      if (!(t_new > t_floor) || !delta.allFinite()) {
        mu *= 4.0;
        continue;
      }
      Attempt trial;
      try {
        trial = evaluate(s, project_to_surface(s, cur.x + delta.head(dim)), t_new, fo);
      } catch (const IntegrationError&) {
        mu *= 4.0;
        continue;
      }
      if (trial.residual < cur.residual) {
        cur = std::move(trial);
        mu = std::max(mu / 3.0, 1e-12);
        accepted = true;
      } else {
        mu *= 4.0;
      }
    }
    history.push_back(cur.residual);
    if (!accepted) break;
    cur.iterations = it + 1;
  }
  if (!(cur.residual < opt.tol)) {
    throw ConvergenceError("shooting did not converge (residual " + std::to_string(cur.residual) + ")",
                           history);
  }
  return cur;
}

}  // namespace

ClosedCharacteristic make_orbit(const SurfaceModel& s, const Vector& y0, double period, int multiplicity,
                                const FlowOptions& opt) {
  FlowOptions fo = opt;
  fo.samples = kOrbitSamples * std::max(1, multiplicity);
  const FlowResult fr = flow(s, y0, period, fo);
  ClosedCharacteristic o;
  o.y0 = y0;
  o.period_tau = period;
  o.multiplicity_m = multiplicity;
  o.times = fr.times;
  o.points = fr.points;
  for (const auto& p : o.points) {
    o.velocities.push_back(vector_field(s, opt.hamiltonian, p));
    o.surface_drift = std::max(o.surface_drift, std::abs(gauge(s, p) - 1.0));
  }
  o.residual = closure_residual(fr.end_point, y0);
  o.action_A = action(o);
  return o;
}

double action(const ClosedCharacteristic& orbit) {
  if (orbit.points.size() < 2) throw PreconditionError("orbit has no samples");
  // Periodic trapezoid rule: the last sample repeats the first.
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < orbit.points.size(); ++k) {
    const double h = orbit.times[k + 1] - orbit.times[k];
    const double fa = apply_j(orbit.points[k]).dot(orbit.velocities[k]);
    const double fb = apply_j(orbit.points[k + 1]).dot(orbit.velocities[k + 1]);
    acc += 0.5 * h * (fa + fb);
  }
  return 0.5 * acc;
}

ClosedCharacteristic iterate(const ClosedCharacteristic& orbit, int m) {
  if (m < 1) throw PreconditionError("iterate count must be positive");
  ClosedCharacteristic out = orbit;
  const std::size_t per = orbit.points.size() - 1;
  for (int r = 1; r < m; ++r) {
    for (std::size_t k = 1; k <= per; ++k) {
      out.times.push_back(r * orbit.period_tau + orbit.times[k]);
      out.points.push_back(orbit.points[k]);
      out.velocities.push_back(orbit.velocities[k]);
    }
  }
  out.period_tau = m * orbit.period_tau;
  out.multiplicity_m = m * orbit.multiplicity_m;
  out.action_A = action(out);
  return out;
}

bool is_rational_ratio(double x, int max_den) {
  for (int q = 1; q <= max_den; ++q) {
    const double p = std::round(x * q);
    if (std::abs(x - p / q) < 1e-12 * std::max(1.0, std::abs(x))) return true;
  }
  return false;
}

EllipsoidOrbits analytic_ellipsoid_orbits(const Vector& axes) {
  if (axes.size() < 1 || (axes.array() <= 0.0).any()) {
    throw PreconditionError("ellipsoid axes must be positive");
  }
  const Eigen::Index n = axes.size();
  EllipsoidOrbits out;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index k = j + 1; k < n; ++k) {
      if (is_rational_ratio(axes(j) * axes(j) / (axes(k) * axes(k)))) out.rational_ratios = true;
    }
  }
  std::vector<Eigen::Index> order(n);
  for (Eigen::Index k = 0; k < n; ++k) order[k] = k;
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return axes(a) < axes(b); });
  for (Eigen::Index k : order) {
    const double r = axes(k);
    ClosedCharacteristic o;
    o.period_tau = 2.0 * kPi * r * r;
    o.y0 = Vector::Zero(2 * n);
    o.y0(k) = r;
    for (int i = 0; i <= kOrbitSamples; ++i) {
      const double t = o.period_tau * i / kOrbitSamples;
      const double a = t / (r * r);
      Vector p = Vector::Zero(2 * n), v = Vector::Zero(2 * n);
      p(k) = r * std::cos(a);
      p(n + k) = r * std::sin(a);
      v(k) = -std::sin(a) / r;
      v(n + k) = std::cos(a) / r;
      o.times.push_back(t);
      o.points.push_back(p);
      o.velocities.push_back(v);
    }
    o.action_A = action(o);
    o.prime_id = "y" + std::to_string(out.orbits.size() + 1);
    out.orbits.push_back(std::move(o));
  }
  return out;
}

ClosedCharacteristic shoot(const SurfaceModel& s, const Vector& seed, double period_guess,
                           const ShootOptions& opt) {
  if (!(period_guess > 0.0)) throw PreconditionError("period guess must be positive");
  if (std::abs(gauge(s, seed) - 1.0) > 1e-8) throw PreconditionError("seed is not on the surface");
  Attempt a = refine(s, seed, period_guess, opt);
  int steps = a.iterations;
  // Prime period: the largest divisor k with closure at T/k.
  for (int k = opt.max_divisor; k >= 2; --k) {
    const double tk = a.t / k;
    const Vector end = flow(s, a.x, tk, FlowOptions{.samples = 1}).end_point;
    if (closure_residual(end, a.x) < opt.divisor_tol * std::max(1.0, a.x.norm())) {
      ShootOptions o = opt;
      o.max_divisor = 0;
      a = refine(s, a.x, tk, o);
      steps += a.iterations;
      break;
    }
  }
  ClosedCharacteristic out = make_orbit(s, a.x, a.t, 1, opt.flow);
  out.newton_iterations = steps;
  return out;
}

double distance_to_image(const ClosedCharacteristic& orbit, const Vector& p) {
  const std::size_t count = orbit.points.size();
  if (count < 2) throw PreconditionError("orbit has no samples");
  // Candidate segments around the closest few samples.
  std::vector<std::pair<double, std::size_t>> near;
  near.reserve(count);
  for (std::size_t k = 0; k < count; ++k) near.emplace_back((orbit.points[k] - p).squaredNorm(), k);
  const std::size_t keep = std::min<std::size_t>(4, count);
  std::partial_sort(near.begin(), near.begin() + keep, near.end());
  double best = std::sqrt(near.front().first);
  for (std::size_t c = 0; c < keep; ++c) {
    const std::size_t k = near[c].second;
    if (k + 1 < count) best = std::min(best, segment_distance(orbit, k, p));
    if (k >= 1) best = std::min(best, segment_distance(orbit, k - 1, p));
  }
  return best;
}

bool distinct(const ClosedCharacteristic& a, const ClosedCharacteristic& b, double tol, double action_tol) {
  const double pa = a.action_A / a.multiplicity_m;
  const double pb = b.action_A / b.multiplicity_m;
  if (std::abs(pa - pb) > action_tol * std::max(std::abs(pa), std::abs(pb))) return true;
  double scale = 0.0;
  for (const auto& p : a.points) scale = std::max(scale, p.norm());
  for (const auto& p : b.points) scale = std::max(scale, p.norm());
  const double gap = std::max(distance_to_image(b, a.y0), distance_to_image(a, b.y0));
  return gap > tol * scale;
}

unsigned worker_threads(unsigned requested) {
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  unsigned cap = hw;
  if (const char* env = std::getenv("CHARFLOW_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) cap = static_cast<unsigned>(v);
  }
  if (requested == 0) return cap;
  return std::min(requested, cap);
}

SurveyResult survey(const SurfaceModel& s, const SurveyOptions& opt) {
  SurveyResult out;
  const SurfaceMetrics m = metrics(s);
  out.t_min = opt.t_min > 0 ? opt.t_min : 2.0 * kPi * m.support_dist_d * m.support_dist_d;
  out.t_max = opt.t_max > 0 ? opt.t_max : 2.0 * kPi * m.outer_radius_R * m.outer_radius_R;
  if (!(out.t_min > 0.0) || out.t_max < out.t_min) throw PreconditionError("invalid period window");

  const auto dirs = sphere_points(s.dim(), opt.seeds, opt.seed);
  std::vector<double> guesses;
  const int scan = std::max(1, opt.period_scan);
  for (int i = 0; i < scan; ++i) {
    const double f = scan == 1 ? 0.5 : static_cast<double>(i) / (scan - 1);
    guesses.push_back(out.t_min * std::pow(out.t_max / out.t_min, f));
  }
  // Identical guesses (degenerate window) are tried once.
  guesses.erase(std::unique(guesses.begin(), guesses.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-12 * b; }),
                guesses.end());

  const std::size_t tasks = dirs.size() * guesses.size();
  std::vector<std::optional<ClosedCharacteristic>> found(tasks);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t t = next++; t < tasks; t = next++) {
      const Vector seed = project_to_surface(s, dirs[t / guesses.size()]);
      try {
        found[t] = shoot(s, seed, guesses[t % guesses.size()], opt.shoot);
      } catch (const ConvergenceError&) {
      } catch (const IntegrationError&) {
      } catch (const SectionError&) {
      }
    }
  };
  const unsigned nthreads = std::min<unsigned>(worker_threads(opt.threads), static_cast<unsigned>(tasks));
  if (nthreads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }

  out.attempts = static_cast<int>(tasks);
  // Dedupe in task order so the result does not depend on scheduling.
  std::vector<ClosedCharacteristic> kept;
  for (auto& f : found) {
    if (!f) {
      ++out.failures;
      continue;
    }
    ++out.converged;
    bool fresh = true;
    for (const auto& k : kept) {
      if (!distinct(*f, k)) {
        fresh = false;
        break;
      }
    }
    if (fresh) kept.push_back(std::move(*f));
  }
  // Families: many distinct orbits at one action collapse to a representative.
  std::vector<ClosedCharacteristic> collapsed;
  std::vector<bool> used(kept.size(), false);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (used[i]) continue;
    std::vector<std::size_t> cls{i};
    for (std::size_t j = i + 1; j < kept.size(); ++j) {
      if (!used[j] && std::abs(kept[j].action_A - kept[i].action_A) <= 1e-8 * kept[i].action_A) {
        cls.push_back(j);
      }
    }
    if (static_cast<int>(cls.size()) > opt.family_threshold) {
      out.family = true;
      for (auto j : cls) used[j] = true;
      out.diagnostics.push_back("family: " + std::to_string(cls.size()) +
                                " distinct orbits share action " + std::to_string(kept[i].action_A));
    }
    // Equal-action orbits below the threshold stay individually.
    used[i] = true;
    collapsed.push_back(kept[i]);
  }
  std::stable_sort(collapsed.begin(), collapsed.end(),
                   [](const auto& a, const auto& b) { return a.action_A < b.action_A; });
  for (std::size_t i = 0; i < collapsed.size(); ++i) collapsed[i].prime_id = "y" + std::to_string(i + 1);
  out.orbits = std::move(collapsed);
  return out;
}

}  // namespace charflow
