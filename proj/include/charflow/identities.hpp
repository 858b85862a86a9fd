#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "charflow/maslov.hpp"
#include "charflow/orbitfinder.hpp"
#include "charflow/spectral.hpp"
#include "charflow/surface.hpp"

namespace charflow {

/// Exact rational with a positive, reduced denominator.
struct Rational {
  long long num = 0;
  long long den = 1;

  static Rational make(long long num, long long den);
  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  std::string str() const;
  static Rational parse(const std::string& s);
  friend bool operator==(const Rational&, const Rational&) = default;
};

Rational operator+(const Rational& a, const Rational& b);
Rational operator/(const Rational& a, long long k);

/// χ̂ of an orbit whose iterates are all non-degenerate, from i(y) and i(y²).
Rational chi_hat_nondegenerate(const IndexRecord& index);

/// One iterate of a critical type number table: i(y^m), optionally ν(y^m),
/// and k_0, k_1, ...
struct TableRow {
  int m = 1;
  long index = 0;
  std::optional<int> nu;
  std::vector<long> k;
};

/// (1/K) Σ_m Σ_l (-1)^{i(y^m)+l} k_l(y^m) over m = 1..K, after validating
/// each row. Violations raise TableError naming the clause:
///   (ends)  k_l = 0 outside [0, ν-1]; k_0 and k_{ν-1} are 0 or 1,
///   (i)     k_0 = 1 forces the others to vanish,
///   (ii)    k_{ν-1} = 1 forces the others to vanish,
///   (iii)   an interior k_l ≥ 1 forces k_0 = k_{ν-1} = 0,
///   (iv)    at most one nonzero entry when ν ≤ 3.
/// Without ν only the k_0 clauses apply.
Rational chi_hat_table(int period_k, const std::vector<TableRow>& rows);

/// Everything computed about one prime orbit.
struct OrbitDossier {
  ClosedCharacteristic orbit;
  FloquetData floquet;
  IndexRecord index;
  std::optional<Rational> chi_hat;
  std::optional<RotationAngle> rotation;
  /// Iterates m ≤ m_max whose action m·A lies in [πd², πR²].
  std::vector<int> eligible_iterates;
};

struct AnalyzeOptions {
  int m_max = 20;
  FlowOptions flow{};
  SpectralTolerances spectral{};
  IndexTolerances index{};
};

/// Linearized flow → Floquet data → index sequence → χ̂ for one orbit.
OrbitDossier analyze_orbit(const SurfaceModel& s, const SurfaceMetrics& metrics, const ClosedCharacteristic& orbit,
                           const AnalyzeOptions& opt = {});

/// Whether every stored iterate has ν(y, m) = 1.
bool all_iterates_nondegenerate(const OrbitDossier& d);

enum class Status { Pass, Fail, HypothesisNotMet };
std::string to_string(Status s);
Status status_from_string(const std::string& s);

/// One check with its numeric evidence.
struct VerdictEntry {
  std::string name;
  Status status = Status::Pass;
  double lhs = 0.0;
  double rhs = 0.0;
  double tol = 0.0;
  /// For failures: "identity-violated" or "survey-incomplete".
  std::string diagnosis;
  nlohmann::json evidence = nlohmann::json::object();
};

struct VerdictReport {
  std::vector<VerdictEntry> entries;
  /// 0 when every entry passes or is hypothesis-not-met, 1 otherwise.
  int exit_code() const;
  const VerdictEntry* find(const std::string& name) const;
};

struct ResonanceSums {
  double positive = 0.0;
  double negative = 0.0;
  std::vector<std::string> positive_members;
  std::vector<std::string> negative_members;
};

/// Σ χ̂/î split by the sign of î. Throws IncompleteDossierError when χ̂ is
/// missing anywhere.
ResonanceSums resonance_check(const std::vector<OrbitDossier>& ds);

/// Σ 1/î over the dossiers; every î must be positive.
double sum_inverse_mean(const std::vector<OrbitDossier>& ds);

/// ψ(A, m) = -(1 - α/2)((2/α) m A)^{-α/(2-α)}.
double psi_value(double action, int m, double alpha);

struct MorseSeries {
  int q_lo = 0;      // lowest degree with any contribution (or 0)
  int q_reliable = 0;  // every degree ≤ this is complete
  std::vector<long> m;  // m_q for q = q_lo .. q_reliable
  std::vector<long> u;  // u_q for q = q_lo .. q_reliable
  long coeff_m(int q) const;
  long coeff_u(int q) const;
};

/// m_q = #{(j, m) : i(y_j^m) = q, β = 1} with β = (-1)^{i(y^m) - i(y)}, and
/// U from (1 + t)U = M - 1/(1 - t²) divided from the bottom. The reliable
/// top degree is min(q_top, floor((m_max + 1) î_min - 2n) - 1). Throws
/// HypothesisError if some î ≤ 0 and UnsupportedError for a degenerate
/// contributing iterate.
MorseSeries morse_series(const std::vector<OrbitDossier>& ds, int n, int q_top);

/// What the report needs to know besides the dossiers.
struct CheckContext {
  int n = 2;
  SurfaceMetrics metrics;
  double tol = 1e-6;
  /// Absolute slack for A ≥ πd².
  double action_tol = 1e-8;
  int q_min = -2;
  int q_max = 20;
  /// Survey caveats: a continuum family or failed shoots.
  bool family = false;
  int survey_failures = 0;
};

VerdictEntry check_resonance_pos(const std::vector<OrbitDossier>& ds, const CheckContext& c);
VerdictEntry check_resonance_zero(const std::vector<OrbitDossier>& ds, const CheckContext& c);
VerdictEntry check_sum_inverse_mean(const std::vector<OrbitDossier>& ds, const CheckContext& c);
VerdictEntry check_cor_3_11(const std::vector<OrbitDossier>& ds, const CheckContext& c);
VerdictEntry check_gamma_consistent(const std::vector<OrbitDossier>& ds, const CheckContext& c);
VerdictEntry check_action_lower_bound(const std::vector<OrbitDossier>& ds, const CheckContext& c);
VerdictEntry check_morse_nonneg(const std::vector<OrbitDossier>& ds, const CheckContext& c);
VerdictEntry check_pinching(const std::vector<OrbitDossier>& ds, const CheckContext& c);
VerdictEntry check_dyn_convex(const std::vector<OrbitDossier>& ds, const CheckContext& c);
VerdictEntry check_thm_1_1(const std::vector<OrbitDossier>& ds, const CheckContext& c);
VerdictEntry check_multiplicity(const std::vector<OrbitDossier>& ds, const CheckContext& c);
VerdictEntry check_iteration_formulas(const std::vector<OrbitDossier>& ds, const CheckContext& c);
VerdictEntry check_viterbo_shift(const std::vector<OrbitDossier>& ds, const CheckContext& c);

/// All check names in report order.
const std::vector<std::string>& check_names();

/// Runs the named checks ("all" expands to every check). Unknown names raise
/// ParameterError.
VerdictReport run_checks(const std::vector<OrbitDossier>& ds, const CheckContext& c,
                         const std::vector<std::string>& names);

}  // namespace charflow
