#include "charflow/identities.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "charflow/errors.hpp"

namespace charflow {
namespace {

constexpr double kPi = std::numbers::pi;

bool even(long v) { return v % 2 == 0; }

int parity_sign(long v) { return even(v) ? 1 : -1; }

VerdictEntry entry(const std::string& name, double lhs, double rhs, double tol) {
  VerdictEntry e;
  e.name = name;
  e.lhs = lhs;
  e.rhs = rhs;
  e.tol = tol;
  return e;
}

VerdictEntry not_met(VerdictEntry e, const std::string& why) {
  e.status = Status::HypothesisNotMet;
  e.evidence["reason"] = why;
  return e;
}

void fail(VerdictEntry& e, const CheckContext& c) {
  e.status = Status::Fail;
  e.diagnosis = (c.survey_failures > 0 || c.family) ? "survey-incomplete" : "identity-violated";
}

}  // namespace

Rational Rational::make(long long num, long long den) {
  if (den == 0) throw ParameterError("rational with zero denominator");
  if (den < 0) {
    num = -num;
    den = -den;
  }
  const long long g = std::gcd(num < 0 ? -num : num, den);
  return Rational{num / (g == 0 ? 1 : g), den / (g == 0 ? 1 : g)};
}

std::string Rational::str() const {
  if (den == 1) return std::to_string(num);
  return std::to_string(num) + "/" + std::to_string(den);
}

Rational Rational::parse(const std::string& s) {
  try {
    const auto slash = s.find('/');
    if (slash == std::string::npos) return make(std::stoll(s), 1);
    return make(std::stoll(s.substr(0, slash)), std::stoll(s.substr(slash + 1)));
  } catch (const std::logic_error&) {
    throw ParameterError("not a rational: '" + s + "'");
  }
}

Rational operator+(const Rational& a, const Rational& b) {
  return Rational::make(a.num * b.den + b.num * a.den, a.den * b.den);
}

Rational operator/(const Rational& a, long long k) { return Rational::make(a.num, a.den * k); }

Rational chi_hat_nondegenerate(const IndexRecord& index) {
  if (index.iterates.size() < 2) throw PreconditionError("χ̂ needs the first two iterates");
  for (const auto& it : index.iterates) {
    if (it.nu != 1) {
      throw UnsupportedError("iterate " + std::to_string(it.m) +
                             " is degenerate; supply critical type numbers instead");
    }
  }
  const long i1 = index.iterates[0].i_viterbo;
  const long i2 = index.iterates[1].i_viterbo;
  const Rational sign = Rational::make(parity_sign(i1), 1);
  return even(i2 - i1) ? sign : sign / 2;
}

Rational chi_hat_table(int period_k, const std::vector<TableRow>& rows) {
  if (period_k < 1) throw TableError("the period K must be positive");
  if (static_cast<int>(rows.size()) != period_k) {
    throw TableError("expected one row per iterate m = 1.." + std::to_string(period_k));
  }
  Rational acc;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const TableRow& row = rows[r];
    const std::string where = "row m=" + std::to_string(row.m) + ": ";
    if (row.m != static_cast<int>(r) + 1) throw TableError(where + "rows must list m = 1..K in order");
    const auto& k = row.k;
    for (long v : k) {
      if (v < 0) throw TableError(where + "critical type numbers are non-negative");
    }
    auto nonzero = [&](std::size_t lo, std::size_t hi) {
      for (std::size_t l = lo; l < std::min(hi, k.size()); ++l) {
        if (k[l] != 0) return true;
      }
      return false;
    };
    if (!k.empty() && k[0] > 1) throw TableError(where + "clause (ends): k_0 must be 0 or 1");
    if (!k.empty() && k[0] == 1 && nonzero(1, k.size())) {
      throw TableError(where + "clause (i): k_0 = 1 requires every other k_l = 0");
    }
    if (row.nu) {
      const int nu = *row.nu;
      if (nu < 1) throw TableError(where + "nullity must be positive");
      const std::size_t top = static_cast<std::size_t>(nu - 1);
      if (nonzero(top + 1, k.size())) throw TableError(where + "clause (ends): k_l = 0 for l > ν - 1");
      const long ktop = top < k.size() ? k[top] : 0;
      if (ktop > 1) throw TableError(where + "clause (ends): k_{ν-1} must be 0 or 1");
      if (ktop == 1 && nonzero(0, top)) {
        throw TableError(where + "clause (ii): k_{ν-1} = 1 requires every other k_l = 0");
      }
      if (top >= 2 && nonzero(1, top) && ((!k.empty() && k[0] != 0) || ktop != 0)) {
        throw TableError(where + "clause (iii): an interior k_l ≥ 1 requires k_0 = k_{ν-1} = 0");
      }
      if (nu <= 3) {
        const auto count = std::count_if(k.begin(), k.end(), [](long v) { return v != 0; });
        if (count > 1) throw TableError(where + "clause (iv): at most one nonzero k_l when ν ≤ 3");
      }
    }
    for (std::size_t l = 0; l < k.size(); ++l) {
      acc = acc + Rational::make(parity_sign(row.index + static_cast<long>(l)) * k[l], 1);
    }
  }
  return acc / period_k;
}

bool all_iterates_nondegenerate(const OrbitDossier& d) {
  if (d.index.iterates.empty()) return false;
  return std::all_of(d.index.iterates.begin(), d.index.iterates.end(), [](const auto& it) { return it.nu == 1; });
}

OrbitDossier analyze_orbit(const SurfaceModel& s, const SurfaceMetrics& metrics, const ClosedCharacteristic& orbit,
                           const AnalyzeOptions& opt) {
  OrbitDossier d;
  d.orbit = orbit;
  FlowOptions fo = opt.flow;
  fo.samples = std::max(fo.samples, kOrbitSamples);
  for (;;) {
    const SymplecticPath path = flow_with_path(s, orbit.y0, orbit.period_tau, fo).path;
    try {
      d.index = index_sequence(path, opt.m_max, IterationRoute::Auto, opt.index);
      d.floquet = floquet(path, orbit.period_tau, opt.spectral);
      break;
    } catch (const SamplingError&) {
      if (fo.samples >= 16 * kOrbitSamples) throw;
      fo.samples *= 2;
    }
  }
  if (all_iterates_nondegenerate(d)) d.chi_hat = chi_hat_nondegenerate(d.index);
  if (d.floquet.case_tag && d.floquet.case_tag->kind == CaseKind::Case2) d.rotation = rotation_angle(d.floquet);
  const double lo = kPi * metrics.support_dist_d * metrics.support_dist_d;
  const double hi = kPi * metrics.outer_radius_R * metrics.outer_radius_R;
  for (int m = 1; m <= opt.m_max; ++m) {
    const double a = m * orbit.action_A;
    if (a >= lo * (1 - 1e-9) && a <= hi * (1 + 1e-9)) d.eligible_iterates.push_back(m);
  }
  return d;
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Pass:
      return "pass";
    case Status::Fail:
      return "fail";
    case Status::HypothesisNotMet:
      return "hypothesis-not-met";
  }
  return "fail";
}

Status status_from_string(const std::string& s) {
  if (s == "pass") return Status::Pass;
  if (s == "fail") return Status::Fail;
  if (s == "hypothesis-not-met") return Status::HypothesisNotMet;
  throw ParameterError("unknown status '" + s + "'");
}

int VerdictReport::exit_code() const {
  for (const auto& e : entries) {
    if (e.status == Status::Fail) return 1;
  }
  return 0;
}

const VerdictEntry* VerdictReport::find(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

ResonanceSums resonance_check(const std::vector<OrbitDossier>& ds) {
  std::vector<std::string> missing;
  for (const auto& d : ds) {
    if (!d.chi_hat) missing.push_back(d.orbit.prime_id + ".chi_hat");
  }
  if (!missing.empty()) throw IncompleteDossierError("dossiers lack χ̂", missing);
  ResonanceSums out;
  for (const auto& d : ds) {
    const double mean = d.index.mean_index;
    if (mean > 0) {
      out.positive += d.chi_hat->value() / mean;
      out.positive_members.push_back(d.orbit.prime_id);
    } else if (mean < 0) {
      out.negative += d.chi_hat->value() / mean;
      out.negative_members.push_back(d.orbit.prime_id);
    }
  }
  return out;
}

double sum_inverse_mean(const std::vector<OrbitDossier>& ds) {
  double acc = 0.0;
  for (const auto& d : ds) {
    if (!(d.index.mean_index > 0)) throw PreconditionError("mean index of " + d.orbit.prime_id + " is not positive");
    acc += 1.0 / d.index.mean_index;
  }
  return acc;
}

double psi_value(double action, int m, double alpha) {
  if (!(action > 0)) throw PreconditionError("action must be positive");
  if (m < 1) throw PreconditionError("iterate count must be positive");
  if (!(alpha > 1 && alpha < 2)) throw PreconditionError("alpha must lie in (1, 2)");
  return -(1 - alpha / 2) * std::pow((2 / alpha) * m * action, -alpha / (2 - alpha));
}

long MorseSeries::coeff_m(int q) const {
  if (q < q_lo || q > q_reliable) return 0;
  return m[static_cast<std::size_t>(q - q_lo)];
}

long MorseSeries::coeff_u(int q) const {
  if (q < q_lo || q > q_reliable) return 0;
  return u[static_cast<std::size_t>(q - q_lo)];
}

MorseSeries morse_series(const std::vector<OrbitDossier>& ds, int n, int q_top) {
  MorseSeries out;
  out.q_reliable = q_top;
  for (const auto& d : ds) {
    const double mean = d.index.mean_index;
    if (!(mean > 0)) {
      throw HypothesisError("orbit " + d.orbit.prime_id + " has non-positive mean index");
    }
    const double m_max = static_cast<double>(d.index.iterates.size());
    const long cover = static_cast<long>(std::floor((m_max + 1) * mean - 2 * n)) - 1;
    out.q_reliable = static_cast<int>(std::min<long>(out.q_reliable, cover));
  }
  std::vector<std::pair<int, bool>> hits;  // (degree, β = 1)
  int lowest = 0;
  for (const auto& d : ds) {
    const long i1 = d.index.i_viterbo_1;
    for (const auto& it : d.index.iterates) {
      if (it.i_viterbo > out.q_reliable) continue;
      if (it.nu != 1) {
        throw UnsupportedError("iterate " + std::to_string(it.m) + " of " + d.orbit.prime_id +
                               " is degenerate and contributes to the window");
      }
      hits.emplace_back(static_cast<int>(it.i_viterbo), even(it.i_viterbo - i1));
      lowest = std::min(lowest, static_cast<int>(it.i_viterbo));
    }
  }
  out.q_lo = lowest;
  const int len = std::max(0, out.q_reliable - out.q_lo + 1);
  out.m.assign(static_cast<std::size_t>(len), 0);
  out.u.assign(static_cast<std::size_t>(len), 0);
  for (const auto& [q, beta] : hits) {
    if (beta) ++out.m[static_cast<std::size_t>(q - out.q_lo)];
  }
  long prev = 0;
  for (int q = out.q_lo; q <= out.q_reliable; ++q) {
    const long d = out.coeff_m(q) - ((q >= 0 && q % 2 == 0) ? 1 : 0);
    const long uq = d - prev;
    out.u[static_cast<std::size_t>(q - out.q_lo)] = uq;
    prev = uq;
  }
  return out;
}

VerdictEntry check_resonance_pos(const std::vector<OrbitDossier>& ds, const CheckContext& c) {
  VerdictEntry e = entry("resonance_pos", 0.0, 0.5, c.tol);
  if (c.family) return not_met(e, "orbit family: finitely many orbits not available");
  ResonanceSums sums;
  try {
    sums = resonance_check(ds);
  } catch (const IncompleteDossierError& err) {
    e = not_met(e, err.what());
    e.evidence["missing"] = err.missing();
    return e;
  }
  e.lhs = sums.positive;
  nlohmann::json terms = nlohmann::json::array();
  for (const auto& d : ds) {
    if (d.index.mean_index > 0) {
      terms.push_back({{"prime_id", d.orbit.prime_id},
                       {"chi_hat", d.chi_hat->str()},
                       {"mean_index", d.index.mean_index},
                       {"term", d.chi_hat->value() / d.index.mean_index}});
    }
  }
  e.evidence["terms"] = terms;
  if (std::abs(e.lhs - e.rhs) > c.tol) fail(e, c);
  return e;
}

VerdictEntry check_resonance_zero(const std::vector<OrbitDossier>& ds, const CheckContext& c) {
  VerdictEntry e = entry("resonance_zero", 0.0, 0.0, c.tol);
  if (c.family) return not_met(e, "orbit family: finitely many orbits not available");
  ResonanceSums sums;
  try {
    sums = resonance_check(ds);
  } catch (const IncompleteDossierError& err) {
    e = not_met(e, err.what());
    e.evidence["missing"] = err.missing();
    return e;
  }
  e.lhs = sums.negative;
  e.evidence["members"] = sums.negative_members;
  e.evidence["vacuous"] = sums.negative_members.empty();
  if (std::abs(e.lhs) > c.tol) fail(e, c);
  return e;
}

VerdictEntry check_sum_inverse_mean(const std::vector<OrbitDossier>& ds, const CheckContext& c) {
  VerdictEntry e = entry("sum_inverse_mean", 0.0, 0.5, c.tol);
  if (c.family) return not_met(e, "orbit family: finitely many orbits not available");
  try {
    e.lhs = sum_inverse_mean(ds);
  } catch (const PreconditionError& err) {
    return not_met(e, err.what());
  }
  e.evidence["orbits"] = ds.size();
  if (e.lhs < e.rhs - c.tol) fail(e, c);
  return e;
}

VerdictEntry check_cor_3_11(const std::vector<OrbitDossier>& ds, const CheckContext& c) {
  VerdictEntry e = entry("cor_3_11", static_cast<double>(ds.size()), 2.0, 0.0);
  std::vector<std::string> above;
  for (const auto& d : ds) {
    if (d.index.mean_index > 2 + c.tol) above.push_back(d.orbit.prime_id);
  }
  e.evidence["mean_index_above_2"] = above;
  if (c.family) {
    e.evidence["family"] = true;
    return e;
  }
  if (above.empty()) return not_met(e, "no orbit has mean index above 2");
  if (ds.size() < 2) {
    e.status = Status::Fail;
    e.diagnosis = "survey-incomplete";
  }
  return e;
}

VerdictEntry check_gamma_consistent(const std::vector<OrbitDossier>& ds, const CheckContext& c) {
  VerdictEntry e = entry("gamma_consistent", 0.0, 0.0, c.tol);
  if (ds.empty()) return not_met(e, "no orbits");
  std::vector<double> ratios;
  nlohmann::json per = nlohmann::json::array();
  for (const auto& d : ds) {
    if (!(d.index.mean_index > 0)) return not_met(e, "mean index of " + d.orbit.prime_id + " is not positive");
    ratios.push_back(d.orbit.action_A / d.index.mean_index);
    per.push_back({{"prime_id", d.orbit.prime_id}, {"action_over_mean_index", ratios.back()}});
  }
  const auto [mn, mx] = std::minmax_element(ratios.begin(), ratios.end());
  const double common = std::accumulate(ratios.begin(), ratios.end(), 0.0) / ratios.size();
  const double lo = kPi * c.metrics.inner_radius_r * c.metrics.inner_radius_r / (2 * c.n);
  const double hi = kPi * c.metrics.outer_radius_R * c.metrics.outer_radius_R / (2 * c.n);
  e.lhs = *mx - *mn;
  e.rhs = 0.0;
  e.tol = c.tol * common;
  e.evidence["values"] = per;
  e.evidence["common"] = common;
  e.evidence["interval"] = {lo, hi};
  const bool inside = common >= lo * (1 - c.tol) && common <= hi * (1 + c.tol);
  e.evidence["in_interval"] = inside;
  if (e.lhs > e.tol || !inside) fail(e, c);
  return e;
}

VerdictEntry check_action_lower_bound(const std::vector<OrbitDossier>& ds, const CheckContext& c) {
  const double bound = kPi * c.metrics.support_dist_d * c.metrics.support_dist_d;
  VerdictEntry e = entry("action_lower_bound", 0.0, bound, c.action_tol);
  if (ds.empty()) return not_met(e, "no orbits");
  double lowest = std::numeric_limits<double>::infinity();
  nlohmann::json per = nlohmann::json::array();
  std::vector<std::string> violators;
  for (const auto& d : ds) {
    lowest = std::min(lowest, d.orbit.action_A);
    per.push_back({{"prime_id", d.orbit.prime_id},
                   {"action", d.orbit.action_A},
                   {"eligible_iterates", d.eligible_iterates}});
    if (d.orbit.action_A < bound - c.action_tol) violators.push_back(d.orbit.prime_id);
  }
  e.lhs = lowest;
  e.evidence["orbits"] = per;
  e.evidence["window"] = {bound, kPi * c.metrics.outer_radius_R * c.metrics.outer_radius_R};
  if (!violators.empty()) {
    e.status = Status::Fail;
    e.diagnosis = "identity-violated";
    e.evidence["violators"] = violators;
  }
  return e;
}

VerdictEntry check_morse_nonneg(const std::vector<OrbitDossier>& ds, const CheckContext& c) {
  VerdictEntry e = entry("morse_nonneg", 0.0, 0.0, 0.0);
  if (c.family) return not_met(e, "orbit family: finitely many orbits not available");
  MorseSeries ms;
  try {
    ms = morse_series(ds, c.n, c.q_max);
  } catch (const UnsupportedError& err) {
    return not_met(e, err.what());
  } catch (const HypothesisError& err) {
    return not_met(e, err.what());
  }
  const int lo = c.q_min;
  const int hi = std::min(c.q_max, ms.q_reliable);
  long min_u = std::numeric_limits<long>::max();
  nlohmann::json mq = nlohmann::json::array(), uq = nlohmann::json::array();
  for (int q = lo; q <= hi; ++q) {
    mq.push_back(ms.coeff_m(q));
    uq.push_back(ms.coeff_u(q));
    min_u = std::min(min_u, ms.coeff_u(q));
  }
  e.lhs = hi >= lo ? static_cast<double>(min_u) : 0.0;
  e.evidence["window"] = {lo, hi};
  e.evidence["m"] = mq;
  e.evidence["u"] = uq;
  // Bottom monotonicity: lowest nonzero m_p at p < 0 forces m_{p+1} ≥ m_p.
  nlohmann::json bottom = {{"applicable", false}};
  bool bottom_ok = true;
  for (int q = ms.q_lo; q <= ms.q_reliable; ++q) {
    if (ms.coeff_m(q) > 0) {
      if (q < 0 && q + 1 <= ms.q_reliable) {
        bottom = {{"applicable", true}, {"p", q}, {"m_p", ms.coeff_m(q)}, {"m_p1", ms.coeff_m(q + 1)}};
        bottom_ok = ms.coeff_m(q + 1) >= ms.coeff_m(q);
      }
      break;
    }
  }
  e.evidence["bottom_monotone"] = bottom;
  if (hi < lo) return not_met(e, "reliable window is empty; increase m_max");
  if (min_u < 0 || !bottom_ok) fail(e, c);
  return e;
}

VerdictEntry check_pinching(const std::vector<OrbitDossier>&, const CheckContext& c) {
  const double r2 = c.metrics.outer_radius_R * c.metrics.outer_radius_R;
  const double d2 = 2 * c.metrics.support_dist_d * c.metrics.support_dist_d;
  VerdictEntry e = entry("pinching", r2, d2, 0.0);
  if (!(r2 < d2)) return not_met(e, "R^2 >= 2 d^2");
  return e;
}

VerdictEntry check_dyn_convex(const std::vector<OrbitDossier>& ds, const CheckContext& c) {
  VerdictEntry e = entry("dyn_convex", 0.0, c.n, 0.0);
  if (ds.empty()) return not_met(e, "no orbits");
  long lowest = std::numeric_limits<long>::max();
  int verified = std::numeric_limits<int>::max();
  nlohmann::json failures = nlohmann::json::array();
  for (const auto& d : ds) {
    verified = std::min(verified, static_cast<int>(d.index.iterates.size()));
    for (const auto& it : d.index.iterates) {
      lowest = std::min(lowest, it.i_maslov);
      if (it.i_maslov < c.n) failures.push_back({{"prime_id", d.orbit.prime_id}, {"m", it.m}, {"index", it.i_maslov}});
    }
  }
  e.lhs = static_cast<double>(lowest);
  e.evidence["verified_up_to_m"] = verified;
  e.evidence["failures"] = failures;
  if (!failures.empty()) {
    e.status = Status::Fail;
    e.diagnosis = "identity-violated";
  }
  return e;
}

VerdictEntry check_thm_1_1(const std::vector<OrbitDossier>& ds, const CheckContext& c) {
  VerdictEntry e = entry("thm_1_1", static_cast<double>(ds.size()), 2.0, 0.0);
  const double r2 = c.metrics.outer_radius_R * c.metrics.outer_radius_R;
  const double d2 = 2 * c.metrics.support_dist_d * c.metrics.support_dist_d;
  std::vector<std::string> unmet;
  if (c.family || ds.size() != 2) unmet.push_back("count: exactly two prime orbits");
  if (!(r2 < d2)) unmet.push_back("pinching: R^2 < 2 d^2");
  e.evidence["R2"] = r2;
  e.evidence["two_d2"] = d2;
  if (!unmet.empty()) {
    e = not_met(e, "hypotheses not met");
    e.evidence["unmet"] = unmet;
    return e;
  }
  nlohmann::json cls = nlohmann::json::array();
  bool ok = true;
  for (const auto& d : ds) {
    cls.push_back({{"prime_id", d.orbit.prime_id}, {"classification", to_string(d.floquet.classification)}});
    ok = ok && d.floquet.elliptic;
  }
  e.evidence["classifications"] = cls;
  if (!ok) fail(e, c);
  return e;
}

VerdictEntry check_multiplicity(const std::vector<OrbitDossier>& ds, const CheckContext& c) {
  VerdictEntry e = entry("multiplicity", static_cast<double>(ds.size()), 0.0, 0.0);
  const bool nondegenerate =
      !ds.empty() && std::all_of(ds.begin(), ds.end(), [](const auto& d) { return all_iterates_nondegenerate(d); });
  int bound = (c.n + 1) / 2 + 1;
  if (nondegenerate || c.n == 3 || c.n == 4) bound = std::max(bound, c.n);
  e.rhs = bound;
  e.evidence["nondegenerate"] = nondegenerate;
  const VerdictEntry dc = check_dyn_convex(ds, c);
  if (dc.status != Status::Pass) return not_met(e, "dynamical convexity not verified");
  if (c.family) {
    e.evidence["family"] = true;
    return e;
  }
  if (static_cast<int>(ds.size()) < bound) {
    e.status = Status::Fail;
    e.diagnosis = "survey-incomplete";
  }
  return e;
}

VerdictEntry check_iteration_formulas(const std::vector<OrbitDossier>& ds, const CheckContext&) {
  VerdictEntry e = entry("iteration_formulas", 0.0, 0.0, 0.0);
  int checked = 0;
  nlohmann::json mismatches = nlohmann::json::array();
  for (const auto& d : ds) {
    if (d.index.n != 2 || !d.floquet.case_tag || d.floquet.case_tag->kind == CaseKind::Other) continue;
    const CaseTag& tag = *d.floquet.case_tag;
    const std::optional<double> theta =
        tag.kind == CaseKind::Case2 ? std::optional<double>(tag.theta) : std::nullopt;
    ++checked;
    for (const auto& it : d.index.iterates) {
      const long f = iterate_index_formula(tag, d.index.i_viterbo_1, theta, it.m);
      if (f != it.i_viterbo) {
        mismatches.push_back({{"prime_id", d.orbit.prime_id}, {"m", it.m}, {"formula", f}, {"index", it.i_viterbo}});
      }
    }
  }
  e.lhs = static_cast<double>(mismatches.size());
  e.evidence["orbits_checked"] = checked;
  e.evidence["mismatches"] = mismatches;
  if (checked == 0) return not_met(e, "no Sp(4) orbit with a recognized case tag");
  if (!mismatches.empty()) {
    e.status = Status::Fail;
    e.diagnosis = "identity-violated";
  }
  return e;
}

VerdictEntry check_viterbo_shift(const std::vector<OrbitDossier>& ds, const CheckContext& c) {
  VerdictEntry e = entry("viterbo_shift", 0.0, 0.0, 0.0);
  long bad = 0, total = 0;
  for (const auto& d : ds) {
    if (d.index.i_viterbo_1 != d.index.i_maslov_1 - c.n) ++bad;
    for (const auto& it : d.index.iterates) {
      ++total;
      if (it.i_viterbo != it.i_maslov - c.n) ++bad;
    }
  }
  e.lhs = static_cast<double>(bad);
  e.evidence["records"] = total;
  if (bad > 0) {
    e.status = Status::Fail;
    e.diagnosis = "identity-violated";
  }
  return e;
}

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names{
      "resonance_pos", "resonance_zero",     "morse_nonneg", "gamma_consistent", "action_lower_bound",
      "pinching",      "dyn_convex",         "thm_1_1",      "sum_inverse_mean", "cor_3_11",
      "multiplicity",  "iteration_formulas", "viterbo_shift"};
  return names;
}

VerdictReport run_checks(const std::vector<OrbitDossier>& ds, const CheckContext& c,
                         const std::vector<std::string>& names) {
  using Check = VerdictEntry (*)(const std::vector<OrbitDossier>&, const CheckContext&);
  const std::vector<std::pair<std::string, Check>> table{
      {"resonance_pos", check_resonance_pos},
      {"resonance_zero", check_resonance_zero},
      {"morse_nonneg", check_morse_nonneg},
      {"gamma_consistent", check_gamma_consistent},
      {"action_lower_bound", check_action_lower_bound},
      {"pinching", check_pinching},
      {"dyn_convex", check_dyn_convex},
      {"thm_1_1", check_thm_1_1},
      {"sum_inverse_mean", check_sum_inverse_mean},
      {"cor_3_11", check_cor_3_11},
      {"multiplicity", check_multiplicity},
      {"iteration_formulas", check_iteration_formulas},
      {"viterbo_shift", check_viterbo_shift},
  };
  std::vector<std::string> wanted;
  for (const auto& n : names) {
    if (n == "all") {
      wanted = check_names();
      break;
    }
    if (std::find(check_names().begin(), check_names().end(), n) == check_names().end()) {
      throw ParameterError("unknown check '" + n + "'");
    }
    wanted.push_back(n);
  }
  VerdictReport report;
  // Report order is fixed regardless of the order requested.
  for (const auto& [name, fn] : table) {
    if (std::find(wanted.begin(), wanted.end(), name) != wanted.end()) report.entries.push_back(fn(ds, c));
  }
  return report;
}

}  // namespace charflow
