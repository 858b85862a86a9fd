#include "charflow/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "charflow/errors.hpp"
#include "charflow/symplectic.hpp"

namespace charflow {
namespace {

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

// State layout: [x (m) | column-major γ (m*m), optional].
class AugmentedSystem {
 public:
  AugmentedSystem(const SurfaceModel& s, const HamiltonianSpec& h, bool with_matrix)
      : s_(s), h_(h), with_matrix_(with_matrix), m_(s.dim()) {}

  Eigen::Index size() const { return with_matrix_ ? m_ + m_ * m_ : m_; }

  void rhs(const Vector& y, Vector& dy) const {
    const auto x = y.head(m_);
    dy.resize(size());
    const GaugeJet g = gauge_jet(s_, x);
    const double c = h_.scale * h_.alpha;
    const double jp1 = std::pow(g.value, h_.alpha - 1.0);
    const Vector grad = c * jp1 * g.grad;
    dy.head(m_) = apply_j(grad);
    if (!with_matrix_) return;
    Matrix hess;
    if (s_.kind == SurfaceKind::Ellipsoid && h_.alpha == 2.0) {
      hess = 2.0 * h_.scale * gauge_hess(s_, x);
    } else {
      hess = c * (h_.alpha - 1.0) * std::pow(g.value, h_.alpha - 2.0) * (g.grad * g.grad.transpose()) +
             c * jp1 * g.hess;
    }
    const Eigen::Map<const Matrix> gam(y.data() + m_, m_, m_);
    Eigen::Map<Matrix> dgam(dy.data() + m_, m_, m_);
    const Matrix hg = hess * gam;
    const Eigen::Index n = m_ / 2;
    // J (H γ): top rows get -bottom, bottom rows get top.
    dgam.topRows(n) = -hg.bottomRows(n);
    dgam.bottomRows(n) = hg.topRows(n);
  }

 private:
  const SurfaceModel& s_;
  HamiltonianSpec h_;
  bool with_matrix_;
  Eigen::Index m_;
};

struct Integration {
  std::vector<double> times;
  std::vector<Vector> states;
  double drift = 0.0;
};

Integration integrate(const SurfaceModel& s, const Vector& y0, double t_end, const FlowOptions& opt,
                      bool with_matrix, int samples) {
  if (std::abs(gauge(s, y0) - 1.0) > 1e-8) {
    throw PreconditionError("flow start point is not on the surface");
  }
  AugmentedSystem sys(s, opt.hamiltonian, with_matrix);
  const Eigen::Index m = s.dim();
  Vector y(sys.size());
  y.head(m) = y0;
  if (with_matrix) {
    Eigen::Map<Matrix>(y.data() + m, m, m).setIdentity();
  }
  Integration out;
  out.times.push_back(0.0);
  out.states.push_back(y);
  if (t_end == 0.0) return out;

  samples = std::max(samples, 1);
  const double dir = t_end > 0 ? 1.0 : -1.0;
  const double span = std::abs(t_end);
  auto output_time = [&](int k) { return k == samples ? span : span * k / samples; };

  Vector k1, k2, k3, k4, k5, k6, k7, tmp, y5, err;
  double t = 0.0;  // elapsed |time|
  double h = std::min(span / samples, 1e-2 * std::max(span, 1.0));
  int next_out = 1;
  long steps = 0;
  const double pow_exp = 1.0 / 5.0;
  while (next_out <= samples) {
    if (++steps > opt.max_steps) throw IntegrationError("maximum step count exceeded");
    const double target = output_time(next_out);
    bool clipped = false;
    double hs = h;
    if (t + hs >= target - 1e-14 * std::max(1.0, span)) {
      hs = target - t;
      clipped = true;
    }
    const double hd = dir * hs;
    sys.rhs(y, k1);
    tmp = y + hd * a21 * k1;
    sys.rhs(tmp, k2);
    tmp = y + hd * (a31 * k1 + a32 * k2);
    sys.rhs(tmp, k3);
    tmp = y + hd * (a41 * k1 + a42 * k2 + a43 * k3);
    sys.rhs(tmp, k4);
    tmp = y + hd * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
    sys.rhs(tmp, k5);
    tmp = y + hd * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
    sys.rhs(tmp, k6);
    y5 = y + hd * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    sys.rhs(y5, k7);
    err = hd * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
    const Vector scale =
        (opt.abs_tol + opt.rel_tol * y.cwiseAbs().cwiseMax(y5.cwiseAbs()).array()).matrix();
    const double en = std::sqrt((err.cwiseQuotient(scale)).squaredNorm() / err.size());
    if (!std::isfinite(en)) throw IntegrationError("non-finite state during integration");
    if (en <= 1.0) {
      t = clipped ? target : t + hs;
      y = y5;
      const double j = gauge(s, y.head(m));
      out.drift = std::max(out.drift, std::abs(j - 1.0));
      if (std::abs(j - 1.0) > opt.max_energy_drift) {
        throw IntegrationError("energy drift " + std::to_string(std::abs(j - 1.0)) +
                               " exceeds bound");
      }
      if (opt.project) y.head(m) /= j;
      if (clipped) {
        out.times.push_back(dir * t);
        out.states.push_back(y);
        ++next_out;
      }
      const double fac = en > 0 ? 0.9 * std::pow(en, -pow_exp) : 5.0;
      if (!clipped) h = hs * std::clamp(fac, 0.2, 5.0);
      else h = std::max(h, hs) * std::clamp(fac, 0.2, 1.0) ;
    } else {
      h = hs * std::clamp(0.9 * std::pow(en, -pow_exp), 0.1, 0.9);
      if (h < opt.min_step) throw IntegrationError("step size underflow at t = " + std::to_string(dir * t));
    }
  }
  return out;
}

}  // namespace

Vector vector_field(const SurfaceModel& s, const HamiltonianSpec& h, const VectorRef& x) {
  return apply_j(hamiltonian_grad(s, h, x));
}

FlowResult flow(const SurfaceModel& s, const VectorRef& y0, double t_end, const FlowOptions& opt) {
  Integration run = integrate(s, y0, t_end, opt, false, opt.samples);
  FlowResult out;
  out.times = std::move(run.times);
  out.points = std::move(run.states);
  out.end_point = out.points.back();
  out.energy_drift = run.drift;
  out.t_end = t_end;
  return out;
}

FlowWithPath flow_with_path(const SurfaceModel& s, const VectorRef& y0, double t_end,
                            const FlowOptions& opt) {
  Integration run = integrate(s, y0, t_end, opt, true, opt.samples);
  const Eigen::Index m = s.dim();
  FlowWithPath out;
  out.orbit.times = run.times;
  out.orbit.energy_drift = run.drift;
  out.orbit.t_end = t_end;
  out.path.times = std::move(run.times);
  out.path.radial_kernel = opt.hamiltonian.alpha == 2.0;
  out.path.base_point = y0;
  out.path.flow_direction = vector_field(s, opt.hamiltonian, y0);
  for (const auto& st : run.states) {
    out.orbit.points.push_back(st.head(m));
    out.path.matrices.push_back(Eigen::Map<const Matrix>(st.data() + m, m, m));
  }
  out.orbit.end_point = out.orbit.points.back();
  return out;
}

SymplecticPath linearized_path(const SurfaceModel& s, const FlowResult& orbit,
                               const FlowOptions& opt, double symplectic_bound) {
  if (orbit.points.empty()) throw PreconditionError("empty orbit");
  FlowOptions o = opt;
  o.samples = static_cast<int>(orbit.times.size()) - 1;
  FlowWithPath run = flow_with_path(s, orbit.points.front(), orbit.t_end, o);
  for (std::size_t k = 0; k < run.orbit.points.size() && k < orbit.points.size(); ++k) {
    const double gap = (run.orbit.points[k] - orbit.points[k]).norm();
    if (gap > 1e-6 * std::max(1.0, orbit.points[k].norm())) {
      throw PreconditionError("orbit samples do not come from this surface's flow");
    }
  }
  for (const auto& g : run.path.matrices) {
    const double bound = symplectic_bound * std::max(1.0, g.squaredNorm());
    if (symplectic_defect(g) > bound) {
      throw InstabilityError("symplecticity defect " + std::to_string(symplectic_defect(g)) +
                             " above bound");
    }
  }
  return std::move(run.path);
}

EndState flow_end_state(const SurfaceModel& s, const VectorRef& y0, double t_end,
                        const FlowOptions& opt) {
  Integration run = integrate(s, y0, t_end, opt, true, 1);
  const Eigen::Index m = s.dim();
  EndState out;
  out.point = run.states.back().head(m);
  out.monodromy = Eigen::Map<const Matrix>(run.states.back().data() + m, m, m);
  out.energy_drift = run.drift;
  return out;
}

double max_symplectic_defect(const SymplecticPath& path) {
  double worst = 0.0;
  for (const auto& g : path.matrices) worst = std::max(worst, symplectic_defect(g));
  return worst;
}

}  // namespace charflow
