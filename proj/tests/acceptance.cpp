// Acceptance run: one PASS/FAIL line per criterion on stdout, details on
// stderr. Exit status 0 only when every criterion passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "charflow/commands.hpp"
#include "charflow/errors.hpp"
#include "charflow/identities.hpp"
#include "charflow/io.hpp"
#include "charflow/symplectic.hpp"
#include "support.hpp"

using namespace charflow;
using namespace charflow::testing;
using std::numbers::pi;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kSphereActionTol = 1e-8;
constexpr double kSphereGammaTol = 1e-6;
constexpr double kSphereSeconds = 10.0;
constexpr double kResonanceOracleTol = 1e-9;
constexpr double kResonancePipelineTol = 1e-6;
constexpr double kResonanceSeconds = 120.0;
constexpr int kFormulaMaxIterate = 20;
constexpr double kActionSlack = 1e-8;
constexpr double kSymplecticTol = 1e-7;
constexpr double kSymmetryTol = 1e-7;
constexpr double kDriftPerTimeTol = 1e-9;
constexpr double kFiniteDifferenceTol = 1e-6;
constexpr double kNearLimitPeriodCap = 12.0;

struct Outcome {
  bool pass = true;
  std::string detail;
};

std::ostream& log() { return std::cerr; }

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// A surface with its survey and analyzed dossiers. Orbits whose analysis
// fails are kept in the survey and listed in `unanalyzed`.
struct CorpusEntry {
  std::string name;
  SurfaceModel surface;
  SurfaceMetrics metrics;
  SurveyResult survey;
  std::vector<OrbitDossier> dossiers;
  std::vector<std::string> unanalyzed;
};

CorpusEntry build_entry(const std::string& name, const SurfaceModel& s, int seeds = 24, double t_max = 0.0) {
  CorpusEntry e;
  e.name = name;
  e.surface = s;
  e.metrics = metrics(s);
  SurveyOptions so;
  so.seeds = seeds;
  so.t_max = t_max;
  e.survey = survey(s, so);
  for (const auto& o : e.survey.orbits) {
    try {
      e.dossiers.push_back(analyze_orbit(s, e.metrics, o));
    } catch (const Error& err) {
      e.unanalyzed.push_back(o.prime_id + ": " + err.what());
    }
  }
  return e;
}

std::vector<double> perturbation_coeffs() {
  std::vector<double> c(perturbation_coeff_count(2), 0.0);
  c[0] = 0.3;
  c[5] = -0.2;
  c[11] = 0.2;
  return c;
}

std::vector<CorpusEntry> build_corpus() {
  std::vector<CorpusEntry> corpus;
  corpus.push_back(build_entry("ellipsoid(1,1.2)", make_ellipsoid(vec({1.0, 1.2}))));
  corpus.push_back(build_entry("ellipsoid(1,1.5)", make_ellipsoid(vec({1.0, 1.5}))));
  corpus.push_back(build_entry("ellipsoid(1,2^1/4)", make_ellipsoid(vec({1.0, std::pow(2.0, 0.25)}))));
  corpus.push_back(build_entry("ellipsoid(1,3^1/4)", make_ellipsoid(vec({1.0, std::pow(3.0, 0.25)}))));
  corpus.push_back(build_entry("ellipsoid(1,5^1/4)", make_ellipsoid(vec({1.0, std::pow(5.0, 0.25)}))));
  corpus.push_back(build_entry("ellipsoid(1,1.1,1.2)", make_ellipsoid(vec({1.0, 1.1, 1.2}))));
  corpus.push_back(build_entry("sphere(2)", make_sphere(2, 1.0)));
  const Vector axes = vec({1.0, 1.3});
  const auto c = perturbation_coeffs();
  corpus.push_back(build_entry("perturbed(eps=0.1)", make_perturbed(axes, 0.1, c)));
  // Toward the star-shape limit R grows without bound, so the period window
  // is capped; the short orbits are the ones the action bound is about.
  const double limit = perturbation_limit(axes, c, 1.0);
  for (double frac : {0.5, 0.9, 0.99}) {
    const double eps = frac * limit;
    std::ostringstream name;
    name << "perturbed(eps=" << eps << ", " << frac << " of limit)";
    corpus.push_back(build_entry(name.str(), make_perturbed(axes, eps, c), 8, kNearLimitPeriodCap));
  }
  return corpus;
}

const CorpusEntry& find(const std::vector<CorpusEntry>& corpus, const std::string& name) {
  for (const auto& e : corpus) {
    if (e.name == name) return e;
  }
  throw Error("corpus entry " + name + " missing");
}

// 1. Sphere actions and A/î.
Outcome sphere_values() {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  double worst_action = 0.0, worst_gamma = 0.0;
  for (int n : {2, 3}) {
    for (double r : {1.0, 2.0, 3.7}) {
      const SurfaceModel s = make_sphere(n, r);
      SurveyOptions so;
      so.seeds = 8;
      const SurveyResult res = survey(s, so);
      if (res.orbits.empty()) {
        out.pass = false;
        log() << "  sphere n=" << n << " R=" << r << ": no orbit found\n";
        continue;
      }
      const double expect = pi * r * r;
      for (const auto& o : res.orbits) {
        const double da = std::abs(o.action_A - expect);
        const double dg = std::abs(o.action_A / (2.0 * n) - expect / (2.0 * n));
        worst_action = std::max(worst_action, da);
        worst_gamma = std::max(worst_gamma, dg);
        if (da > kSphereActionTol || dg > kSphereGammaTol) out.pass = false;
      }
    }
  }
  const double t = seconds_since(t0);
  if (t > kSphereSeconds) out.pass = false;
  std::ostringstream d;
  d << "max |A - piR^2| = " << worst_action << ", max |A/i - piR^2/2n| = " << worst_gamma << ", " << t << " s";
  out.detail = d.str();
  return out;
}

// 2. Resonance identity on random irrational ellipsoids.
Vector random_axes(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> u(1.05, 2.0);
  for (;;) {
    std::vector<double> a{1.0};
    for (int k = 1; k < n; ++k) a.push_back(u(rng));
    std::sort(a.begin(), a.end());
    bool ok = true;
    for (int k = 0; k < n && ok; ++k) {
      for (int l = k + 1; l < n && ok; ++l) {
        const double q = a[l] * a[l] / (a[k] * a[k]);
        ok = q > 1.0 + 1e-3 && !is_rational_ratio(q, 64);
      }
    }
    if (!ok) continue;
    Vector v(n);
    for (int k = 0; k < n; ++k) v(k) = a[static_cast<std::size_t>(k)];
    return v;
  }
}

IndexRecord oracle_record(const Vector& axes, Eigen::Index k) {
  IndexRecord r;
  r.n = static_cast<int>(axes.size());
  for (int m = 1; m <= 2; ++m) {
    IterateIndex it;
    it.m = m;
    it.i_maslov = ellipsoid_index(axes, k, m);
    it.nu = ellipsoid_nullity(axes, k, m);
    it.i_viterbo = it.i_maslov - r.n;
    r.iterates.push_back(it);
  }
  r.i_maslov_1 = r.iterates[0].i_maslov;
  r.i_viterbo_1 = r.iterates[0].i_viterbo;
  r.nu_1 = r.iterates[0].nu;
  r.mean_index = ellipsoid_mean(axes, k);
  return r;
}

Outcome resonance_identity(std::vector<IndexRecord>& records) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome out;
  std::mt19937_64 rng(20240611);
  double worst_oracle = 0.0, worst_pipeline = 0.0;
  int surfaces = 0;
  for (const auto& [n, count] : std::vector<std::pair<int, int>>{{2, 10}, {3, 5}}) {
    for (int t = 0; t < count; ++t) {
      const Vector axes = random_axes(rng, n);
      ++surfaces;
      double oracle_sum = 0.0;
      for (Eigen::Index k = 0; k < axes.size(); ++k) {
        const IndexRecord r = oracle_record(axes, k);
        oracle_sum += chi_hat_nondegenerate(r).value() / r.mean_index;
      }
      const SurfaceModel s = make_ellipsoid(axes);
      const SurfaceMetrics sm = metrics(s);
      std::vector<OrbitDossier> ds;
      for (const auto& o : analytic_ellipsoid_orbits(axes).orbits) ds.push_back(analyze_orbit(s, sm, o));
      for (const auto& d : ds) records.push_back(d.index);
      double pipeline_sum = std::numeric_limits<double>::quiet_NaN();
      try {
        pipeline_sum = resonance_check(ds).positive;
      } catch (const IncompleteDossierError& e) {
        log() << "  resonance: " << e.what() << "\n";
      }
      const double eo = std::abs(oracle_sum - 0.5);
      const double ep = std::abs(pipeline_sum - 0.5);
      worst_oracle = std::max(worst_oracle, eo);
      worst_pipeline = std::isnan(ep) ? std::numeric_limits<double>::infinity() : std::max(worst_pipeline, ep);
      if (!(eo < kResonanceOracleTol) || !(ep < kResonancePipelineTol)) {
        out.pass = false;
        log() << "  resonance: axes " << axes.transpose() << " oracle " << oracle_sum << " pipeline " << pipeline_sum
              << "\n";
      }
    }
  }
  const double t = seconds_since(t0);
  if (t > kResonanceSeconds) out.pass = false;
  std::ostringstream d;
  d << surfaces << " ellipsoids, max oracle error " << worst_oracle << ", max pipeline error " << worst_pipeline << ", "
    << t << " s";
  out.detail = d.str();
  return out;
}

// 3. Iteration formulas on surveyed Sp(4) orbits and constructed paths.
Outcome iteration_formulas(const std::vector<CorpusEntry>& corpus, std::vector<IndexRecord>& records) {
  Outcome out;
  int orbits_checked = 0, mismatches = 0;
  for (const auto& e : corpus) {
    for (const auto& d : e.dossiers) {
      if (d.index.n != 2 || !d.floquet.case_tag || d.floquet.case_tag->kind == CaseKind::Other) continue;
      const CaseTag& tag = *d.floquet.case_tag;
      const std::optional<double> theta = tag.kind == CaseKind::Case2 ? std::optional<double>(tag.theta) : std::nullopt;
      ++orbits_checked;
      for (const auto& it : d.index.iterates) {
        if (it.m > kFormulaMaxIterate) break;
        if (iterate_index_formula(tag, d.index.i_viterbo_1, theta, it.m) != it.i_viterbo) {
          ++mismatches;
          log() << "  formula: " << e.name << " " << d.orbit.prime_id << " m=" << it.m << "\n";
        }
      }
    }
  }
  int paths = 0, untagged = 0;
  const auto specs = normal_form_specs();
  for (std::size_t k = 0; k < specs.size(); ++k) {
    const SymplecticPath path = normal_form_path(specs[k], 100 + k + 1);
    const FloquetData fd = floquet(path, path.t_end());
    ++paths;
    if (!fd.case_tag || fd.case_tag->kind != specs[k].expect) {
      ++untagged;
      log() << "  formula: constructed path " << k + 1 << " has the wrong case tag\n";
      continue;
    }
    const IndexRecord rec = index_sequence(path, kFormulaMaxIterate);
    records.push_back(rec);
    const std::optional<double> theta =
        fd.case_tag->kind == CaseKind::Case2 ? std::optional<double>(fd.case_tag->theta) : std::nullopt;
    for (const auto& it : rec.iterates) {
      if (iterate_index_formula(*fd.case_tag, rec.i_viterbo_1, theta, it.m) != it.i_viterbo) {
        ++mismatches;
        log() << "  formula: constructed path " << k + 1 << " m=" << it.m << "\n";
      }
    }
  }
  out.pass = mismatches == 0 && untagged == 0 && orbits_checked > 0 && paths == 50;
  std::ostringstream d;
  d << orbits_checked << " surveyed orbits, " << paths << " constructed paths, " << mismatches << " mismatches";
  out.detail = d.str();
  return out;
}

// 4. i(y^m) = i(y, m) - n on every record produced.
Outcome viterbo_shift(const std::vector<CorpusEntry>& corpus, const std::vector<IndexRecord>& extra) {
  Outcome out;
  long checked = 0, bad = 0;
  auto visit = [&](const IndexRecord& r) {
    ++checked;
    if (r.i_viterbo_1 != r.i_maslov_1 - r.n) ++bad;
    for (const auto& it : r.iterates) {
      ++checked;
      if (it.i_viterbo != it.i_maslov - r.n) ++bad;
    }
  };
  for (const auto& e : corpus) {
    for (const auto& d : e.dossiers) visit(d.index);
  }
  for (const auto& r : extra) visit(r);
  out.pass = bad == 0 && checked > 0;
  out.detail = std::to_string(checked) + " index values, " + std::to_string(bad) + " violations";
  return out;
}

// 5. A ≥ πd² on every surveyed orbit.
Outcome action_bound(const std::vector<CorpusEntry>& corpus) {
  Outcome out;
  int orbits = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& e : corpus) {
    const double bound = pi * e.metrics.support_dist_d * e.metrics.support_dist_d;
    if (e.survey.orbits.empty()) {
      out.pass = false;
      log() << "  action: " << e.name << " produced no orbits\n";
    }
    for (const auto& o : e.survey.orbits) {
      ++orbits;
      worst = std::min(worst, o.action_A - bound);
      if (o.action_A < bound - kActionSlack) {
        out.pass = false;
        log() << "  action: " << e.name << " " << o.prime_id << " A = " << o.action_A << " < " << bound << "\n";
      }
    }
  }
  std::ostringstream d;
  d << orbits << " orbits on " << corpus.size() << " surfaces, min A - pi d^2 = " << worst;
  out.detail = d.str();
  return out;
}

// 6. Pinched-surface verdict.
Outcome pinched_verdict(const std::vector<CorpusEntry>& corpus) {
  Outcome out;
  const CorpusEntry& pinched = find(corpus, "ellipsoid(1,1.2)");
  CheckContext c;
  c.n = 2;
  c.metrics = pinched.metrics;
  const VerdictEntry v = check_thm_1_1(pinched.dossiers, c);
  bool elliptic = pinched.dossiers.size() == 2;
  for (const auto& d : pinched.dossiers) elliptic = elliptic && d.floquet.elliptic;
  const double r2 = pinched.metrics.outer_radius_R * pinched.metrics.outer_radius_R;
  const double d2 = 2 * pinched.metrics.support_dist_d * pinched.metrics.support_dist_d;

  const CorpusEntry& wide = find(corpus, "ellipsoid(1,1.5)");
  c.metrics = wide.metrics;
  const VerdictEntry w = check_thm_1_1(wide.dossiers, c);

  out.pass = pinched.survey.orbits.size() == 2 && !pinched.survey.family && r2 < d2 && elliptic &&
             v.status == Status::Pass && w.status == Status::HypothesisNotMet;
  std::ostringstream d;
  d << "(1,1.2): " << pinched.survey.orbits.size() << " orbits, R^2 = " << r2 << " vs 2d^2 = " << d2
    << ", verdict " << to_string(v.status) << "; (1,1.5): " << to_string(w.status);
  out.detail = d.str();
  return out;
}

// 7. Morse-series coefficients on irrational ellipsoids.
Outcome morse_nonnegative(const std::vector<CorpusEntry>& corpus) {
  Outcome out;
  std::ostringstream d;
  for (const std::string name : {"ellipsoid(1,2^1/4)", "ellipsoid(1,3^1/4)", "ellipsoid(1,5^1/4)"}) {
    const CorpusEntry& e = find(corpus, name);
    CheckContext c;
    c.n = 2;
    c.metrics = e.metrics;
    c.q_min = 0;
    c.q_max = 20;
    const VerdictEntry v = check_morse_nonneg(e.dossiers, c);
    const MorseSeries ms = morse_series(e.dossiers, 2, 20);
    const bool covered = ms.q_reliable >= 20;
    const bool bottom = !v.evidence["bottom_monotone"]["applicable"].get<bool>() || v.status == Status::Pass;
    if (v.status != Status::Pass || !covered || !bottom) out.pass = false;
    d << name << " min U = " << v.lhs << (covered ? "" : " (window not covered)") << "; ";
  }
  out.detail = d.str();
  return out;
}

// 8. Numerical hygiene across the corpus.
Outcome hygiene(const std::vector<CorpusEntry>& corpus) {
  Outcome out;
  double symp = 0.0, sym = 0.0, drift = 0.0, fd_err = 0.0;
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g(0.0, 1.0);
  int orbits = 0;
  std::string symp_at, sym_at;
  for (const auto& e : corpus) {
    for (const auto& d : e.dossiers) {
      if (d.floquet.symmetry_defect > sym) {
        sym = d.floquet.symmetry_defect;
        sym_at = e.name + " " + d.orbit.prime_id;
      }
    }
    for (const auto& o : e.survey.orbits) {
      ++orbits;
      FlowOptions fo;
      fo.samples = 512;
      const FlowWithPath fp = flow_with_path(e.surface, o.y0, o.period_tau, fo);
      const double sd = max_symplectic_defect(fp.path);
      if (sd > symp) {
        symp = sd;
        symp_at = e.name + " " + o.prime_id;
      }
      // Drift of the unprojected flow over one period.
      FlowOptions raw;
      raw.project = false;
      raw.max_energy_drift = 1.0;
      const FlowResult fr = flow(e.surface, o.y0, o.period_tau, raw);
      drift = std::max(drift, std::abs(gauge(e.surface, fr.end_point) - 1.0) / o.period_tau);
    }
    // Central differences of j, ∇j and ∇F (F = j²/2) at random points.
    for (int k = 0; k < 8; ++k) {
      Vector x(e.surface.dim());
      for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = g(rng);
      x *= 0.5 + 0.5 * std::abs(g(rng));
      const double h = 1e-5 * x.norm();
      const GaugeJet jet = gauge_jet(e.surface, x);
      const Matrix hess_f = gauge_hess(e.surface, x);
      Vector fd_grad(x.size());
      Matrix fd_hess_j(x.size(), x.size()), fd_hess_f(x.size(), x.size());
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        Vector xp = x, xm = x;
        xp(i) += h;
        xm(i) -= h;
        fd_grad(i) = (gauge(e.surface, xp) - gauge(e.surface, xm)) / (2 * h);
        fd_hess_j.col(i) = (gauge_grad(e.surface, xp) - gauge_grad(e.surface, xm)) / (2 * h);
        fd_hess_f.col(i) = (hamiltonian_grad(e.surface, HamiltonianSpec{}, xp) -
                            hamiltonian_grad(e.surface, HamiltonianSpec{}, xm)) / (2 * h);
      }
      fd_err = std::max(fd_err, (fd_grad - jet.grad).norm() / jet.grad.norm());
      fd_err = std::max(fd_err, (fd_hess_j - jet.hess).norm() / jet.hess.norm());
      fd_err = std::max(fd_err, (fd_hess_f - hess_f).norm() / hess_f.norm());
    }
  }
  out.pass = symp < kSymplecticTol && sym < kSymmetryTol && drift < kDriftPerTimeTol && fd_err < kFiniteDifferenceTol;
  std::ostringstream d;
  d << orbits << " orbits; symplectic " << symp << " (" << symp_at << "), symmetry " << sym << " (" << sym_at << ")" << ", drift/time " << drift << ", finite differences " << fd_err;
  out.detail = d.str();
  return out;
}

// 9. Byte-identical artifacts across runs with different thread counts.
Outcome determinism() {
  Outcome out;
  const fs::path root = fs::temp_directory_path() / ("charflow_acceptance_" + std::to_string(::getpid()));
  fs::create_directories(root);
  const std::vector<std::pair<std::string, std::string>> configs{
      {"pinched", "{\"n\": 2, \"kind\": \"ellipsoid\", \"axes\": [1, 1.2]}\n"},
      {"perturbed", "{\"n\": 2, \"kind\": \"perturbed\", \"axes\": [1, 1.3], \"perturbation\": {\"epsilon\": 0.1, "
                    "\"coeffs\": [0.3, 0, 0, 0, 0, -0.2, 0, 0, 0, 0, 0, 0.2]}}\n"}};
  const char* saved = std::getenv("CHARFLOW_THREADS");
  const std::string saved_value = saved ? saved : "";
  int files = 0, differing = 0;
  std::ostringstream err;
  for (const auto& [name, text] : configs) {
    std::vector<std::string> contents[2];
    for (int run = 0; run < 2; ++run) {
      // The second run is single-threaded.
      if (run == 1) {
        ::setenv("CHARFLOW_THREADS", "1", 1);
      } else if (saved) {
        ::setenv("CHARFLOW_THREADS", saved_value.c_str(), 1);
      } else {
        ::unsetenv("CHARFLOW_THREADS");
      }
      const fs::path dir = root / (name + std::to_string(run));
      fs::create_directories(dir);
      CommandOptions opt;
      opt.config = (dir / "surface.json").string();
      std::ofstream(opt.config) << text;
      opt.seed = 3;
      opt.out = (dir / "db.json").string();
      int rc = cmd_survey(opt, err);
      opt.db = opt.out;
      opt.out = (dir / "dossiers.json").string();
      rc = rc == 0 ? cmd_analyze(opt, err) : rc;
      opt.db = opt.out;
      opt.out = (dir / "report.json").string();
      if (rc == 0) cmd_verify(opt, err);
      for (const char* f : {"db.json", "dossiers.json", "report.json"}) {
        const fs::path p = dir / f;
        contents[run].push_back(fs::exists(p) ? read_file(p.string()) : std::string());
      }
    }
    for (std::size_t k = 0; k < contents[0].size(); ++k) {
      ++files;
      if (contents[0][k].empty() || contents[0][k] != contents[1][k]) ++differing;
    }
  }
  if (saved) {
    ::setenv("CHARFLOW_THREADS", saved_value.c_str(), 1);
  } else {
    ::unsetenv("CHARFLOW_THREADS");
  }
  fs::remove_all(root);
  out.pass = differing == 0;
  out.detail = std::to_string(files) + " artifacts compared, " + std::to_string(differing) + " differ";
  return out;
}

}  // namespace

int main() {
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<std::string> titles{
      "sphere action and A/mean index",
      "resonance identity on irrational ellipsoids",
      "iteration formulas match index sequences",
      "Viterbo shift i(y^m) = i(y,m) - n",
      "action lower bound A >= pi d^2",
      "pinched-surface ellipticity verdict",
      "Morse-series coefficients non-negative",
      "numerical hygiene",
      "determinism of survey/analyze/verify"};
  std::vector<IndexRecord> records;
  std::vector<CorpusEntry> corpus;
  std::vector<std::function<Outcome()>> criteria{
      [] { return sphere_values(); },
      [&] { return resonance_identity(records); },
      [&] { return iteration_formulas(corpus, records); },
      [&] { return viterbo_shift(corpus, records); },
      [&] { return action_bound(corpus); },
      [&] { return pinched_verdict(corpus); },
      [&] { return morse_nonnegative(corpus); },
      [&] { return hygiene(corpus); },
      [] { return determinism(); }};

  bool all = true;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    if (k == 2) {
      const auto tc = std::chrono::steady_clock::now();
      corpus = build_corpus();
      log() << "corpus: " << corpus.size() << " surfaces surveyed in " << seconds_since(tc) << " s\n";
      for (const auto& e : corpus) {
        log() << "  " << e.name << ": " << e.survey.orbits.size() << " orbits"
              << (e.survey.family ? " (family)" : "") << ", " << e.survey.failures << " failed shoots\n";
        for (const auto& u : e.unanalyzed) log() << "    not analyzed: " << u << "\n";
      }
    }
    Outcome o;
    try {
      o = criteria[k]();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    all = all && o.pass;
    std::cout << "criterion " << k + 1 << ": " << (o.pass ? "PASS" : "FAIL") << "  " << titles[k] << "  ["
              << o.detail << "]" << std::endl;
  }
  log() << "total " << seconds_since(t0) << " s\n";
  return all ? 0 : 1;
}
