#include "charflow/io.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include "charflow/errors.hpp"

namespace charflow {
namespace {

using nlohmann::json;

[[noreturn]] void bad_key(const std::string& origin, const std::string& key, const std::string& why) {
  throw ConfigError(origin + ": key '" + key + "': " + why);
}

// `path` names the key in messages when `j` is a nested object.
const json& require(const json& j, const std::string& origin, const std::string& key, const std::string& path = "") {
  if (!j.is_object() || !j.contains(key)) bad_key(origin, path.empty() ? key : path, "missing");
  return j.at(key);
}

double number(const json& v, const std::string& origin, const std::string& key) {
  if (!v.is_number()) bad_key(origin, key, "expected a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& origin, const std::string& key) {
  if (!v.is_number_integer()) bad_key(origin, key, "expected an integer");
  return v.get<int>();
}

std::vector<double> numbers(const json& v, const std::string& origin, const std::string& key) {
  if (!v.is_array()) bad_key(origin, key, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], origin, key + "[" + std::to_string(i) + "]"));
  return out;
}

json vector_json(const Vector& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

Vector vector_from(const json& a) {
  Vector v(static_cast<Eigen::Index>(a.size()));
  for (std::size_t i = 0; i < a.size(); ++i) v(static_cast<Eigen::Index>(i)) = a[i].get<double>();
  return v;
}

void check_schema(const json& j, const std::string& kind) {
  if (!j.is_object() || j.value("schema", "") != kSchemaVersion) {
    throw ConfigError("unsupported or missing schema version (expected \"" + std::string(kSchemaVersion) + "\")");
  }
  if (j.value("kind", "") != kind) throw ConfigError("expected a " + kind + " file");
}

json optional_string(const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); }

}  // namespace

std::string fnv1a64(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw ConfigError("write failed for '" + tmp.string() + "'");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw ConfigError("cannot move output into place at '" + path + "'");
  }
}

SurfaceConfig parse_surface_config(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) + ": malformed JSON");
  }
  if (!j.is_object()) throw ConfigError(origin + ": top level must be an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "n" && key != "kind" && key != "axes" && key != "perturbation" && key != "survey") {
      bad_key(origin, key, "unknown key");
    }
  }
  SurfaceConfig cfg;
  const int n = integer(require(j, origin, "n"), origin, "n");
  if (n < 1) bad_key(origin, "n", "must be positive");
  const json& kind = require(j, origin, "kind");
  if (!kind.is_string() || (kind != "ellipsoid" && kind != "perturbed")) {
    bad_key(origin, "kind", "expected \"ellipsoid\" or \"perturbed\"");
  }
  const std::vector<double> axes = numbers(require(j, origin, "axes"), origin, "axes");
  if (static_cast<int>(axes.size()) != n) bad_key(origin, "axes", "expected " + std::to_string(n) + " entries");
  for (double a : axes) {
    if (!(a > 0)) bad_key(origin, "axes", "entries must be positive");
  }
  Vector av(n);
  for (int k = 0; k < n; ++k) av(k) = axes[static_cast<std::size_t>(k)];
  cfg.canonical = {{"n", n}, {"kind", kind.get<std::string>()}, {"axes", axes}};
  if (kind == "perturbed") {
    const json& p = require(j, origin, "perturbation");
    if (!p.is_object()) bad_key(origin, "perturbation", "expected an object");
    for (const auto& [key, v] : p.items()) {
      if (key != "epsilon" && key != "coeffs") bad_key(origin, "perturbation." + key, "unknown key");
    }
    const double eps = number(require(p, origin, "epsilon", "perturbation.epsilon"), origin, "perturbation.epsilon");
    const std::vector<double> coeffs =
        numbers(require(p, origin, "coeffs", "perturbation.coeffs"), origin, "perturbation.coeffs");
    if (coeffs.size() > perturbation_coeff_count(n)) {
      bad_key(origin, "perturbation.coeffs",
              "at most " + std::to_string(perturbation_coeff_count(n)) + " coefficients for n = " + std::to_string(n));
    }
    cfg.surface = make_perturbed(av, eps, coeffs);
    cfg.canonical["perturbation"] = {{"epsilon", eps}, {"coeffs", coeffs}};
  } else {
    if (j.contains("perturbation")) bad_key(origin, "perturbation", "only allowed for kind \"perturbed\"");
    cfg.surface = make_ellipsoid(av);
  }
  if (j.contains("survey")) {
    const json& s = j.at("survey");
    if (!s.is_object()) bad_key(origin, "survey", "expected an object");
    for (const auto& [key, v] : s.items()) {
      const std::string k = "survey." + key;
      if (key == "seeds") {
        cfg.seeds = integer(v, origin, k);
        if (*cfg.seeds < 1) bad_key(origin, k, "must be positive");
      } else if (key == "period_scan") {
        cfg.period_scan = integer(v, origin, k);
        if (*cfg.period_scan < 1) bad_key(origin, k, "must be positive");
      } else if (key == "t_min") {
        cfg.t_min = number(v, origin, k);
        if (!(*cfg.t_min > 0)) bad_key(origin, k, "must be positive");
      } else if (key == "t_max") {
        cfg.t_max = number(v, origin, k);
      } else {
        bad_key(origin, k, "unknown key");
      }
    }
    if (cfg.t_min && cfg.t_max && *cfg.t_max < *cfg.t_min) bad_key(origin, "survey.t_max", "must be ≥ t_min");
  }
  cfg.hash = fnv1a64(cfg.canonical.dump());
  return cfg;
}

SurfaceConfig load_surface_config(const std::string& path) { return parse_surface_config(read_file(path), path); }

json database_to_json(const SurfaceConfig& cfg, const SurveyResult& res, std::uint64_t seed,
                      const SurveyOptions& opt) {
  json orbits = json::array();
  for (const auto& o : res.orbits) {
    orbits.push_back({{"prime_id", o.prime_id},
                      {"y0", vector_json(o.y0)},
                      {"period", o.period_tau},
                      {"multiplicity", o.multiplicity_m},
                      {"action", o.action_A},
                      {"residual", o.residual},
                      {"surface_drift", o.surface_drift},
                      {"newton_iterations", o.newton_iterations}});
  }
  return {{"schema", kSchemaVersion},
          {"kind", "orbit-database"},
          {"surface_hash", cfg.hash},
          {"surface", cfg.canonical},
          {"seed", seed},
          {"survey",
           {{"seeds", opt.seeds},
            {"period_scan", opt.period_scan},
            {"t_min", res.t_min},
            {"t_max", res.t_max},
            {"attempts", res.attempts},
            {"converged", res.converged},
            {"failures", res.failures},
            {"family", res.family},
            {"diagnostics", res.diagnostics}}},
          {"orbits", orbits}};
}

OrbitDatabase database_from_json(const json& j) {
  check_schema(j, "orbit-database");
  OrbitDatabase db;
  try {
    db.surface_hash = j.at("surface_hash").get<std::string>();
    db.seed = j.at("seed").get<std::uint64_t>();
    const json& s = j.at("survey");
    db.survey.t_min = s.at("t_min").get<double>();
    db.survey.t_max = s.at("t_max").get<double>();
    db.survey.attempts = s.at("attempts").get<int>();
    db.survey.converged = s.at("converged").get<int>();
    db.survey.failures = s.at("failures").get<int>();
    db.survey.family = s.at("family").get<bool>();
    db.survey.diagnostics = s.at("diagnostics").get<std::vector<std::string>>();
    for (const json& o : j.at("orbits")) {
      ClosedCharacteristic c;
      c.prime_id = o.at("prime_id").get<std::string>();
      c.y0 = vector_from(o.at("y0"));
      c.period_tau = o.at("period").get<double>();
      c.multiplicity_m = o.at("multiplicity").get<int>();
      c.action_A = o.at("action").get<double>();
      c.residual = o.at("residual").get<double>();
      c.surface_drift = o.at("surface_drift").get<double>();
      c.newton_iterations = o.at("newton_iterations").get<int>();
      db.survey.orbits.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed orbit database: ") + e.what());
  }
  return db;
}

json dossier_to_json(const OrbitDossier& d) {
  const FloquetData& f = d.floquet;
  json mono = json::array();
  for (Eigen::Index r = 0; r < f.monodromy.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < f.monodromy.cols(); ++c) row.push_back(f.monodromy(r, c));
    mono.push_back(row);
  }
  json mult = json::array();
  for (const auto& z : f.multipliers) mult.push_back({z.real(), z.imag()});
  json rotation = nullptr;
  if (d.rotation) {
    rotation = {{"theta", d.rotation->theta}, {"p", d.rotation->p}, {"q", d.rotation->q}, {"error", d.rotation->error}};
  }
  json iterates = json::array();
  for (const auto& it : d.index.iterates) {
    iterates.push_back({{"m", it.m}, {"i", it.i_maslov}, {"nu", it.nu}, {"i_viterbo", it.i_viterbo}});
  }
  return {{"prime_id", d.orbit.prime_id},
          {"y0", vector_json(d.orbit.y0)},
          {"period", d.orbit.period_tau},
          {"multiplicity", d.orbit.multiplicity_m},
          {"action", d.orbit.action_A},
          {"residual", d.orbit.residual},
          {"floquet",
           {{"monodromy", mono},
            {"multipliers", mult},
            {"nullity", f.nullity_nu},
            {"classification", to_string(f.classification)},
            {"elliptic", f.elliptic},
            {"hyperbolic", f.hyperbolic},
            {"nondegenerate", f.nondegenerate},
            {"symmetry_defect", f.symmetry_defect},
            {"case_tag", f.case_tag ? json(to_string(*f.case_tag)) : json(nullptr)},
            {"rotation", rotation}}},
          {"index",
           {{"n", d.index.n},
            {"i1", d.index.i_maslov_1},
            {"nu1", d.index.nu_1},
            {"i_viterbo_1", d.index.i_viterbo_1},
            {"mean_index", d.index.mean_index},
            {"mean_index_regression", d.index.mean_index_regression},
            {"regression_error", d.index.regression_error},
            {"iterates", iterates}}},
          {"chi_hat", optional_string(d.chi_hat ? std::optional<std::string>(d.chi_hat->str()) : std::nullopt)},
          {"eligible_iterates", d.eligible_iterates}};
}

OrbitDossier dossier_from_json(const json& j) {
  OrbitDossier d;
  try {
    d.orbit.prime_id = j.at("prime_id").get<std::string>();
    d.orbit.y0 = vector_from(j.at("y0"));
    d.orbit.period_tau = j.at("period").get<double>();
    d.orbit.multiplicity_m = j.at("multiplicity").get<int>();
    d.orbit.action_A = j.at("action").get<double>();
    d.orbit.residual = j.at("residual").get<double>();
    const json& f = j.at("floquet");
    const json& mono = f.at("monodromy");
    const auto dim = static_cast<Eigen::Index>(mono.size());
    d.floquet.monodromy.resize(dim, dim);
    for (Eigen::Index r = 0; r < dim; ++r) {
      for (Eigen::Index c = 0; c < dim; ++c) d.floquet.monodromy(r, c) = mono[r][c].get<double>();
    }
    for (const json& z : f.at("multipliers")) d.floquet.multipliers.emplace_back(z[0].get<double>(), z[1].get<double>());
    d.floquet.nullity_nu = f.at("nullity").get<int>();
    d.floquet.classification = classification_from_string(f.at("classification").get<std::string>());
    d.floquet.elliptic = f.at("elliptic").get<bool>();
    d.floquet.hyperbolic = f.at("hyperbolic").get<bool>();
    d.floquet.nondegenerate = f.at("nondegenerate").get<bool>();
    d.floquet.symmetry_defect = f.at("symmetry_defect").get<double>();
    if (!f.at("case_tag").is_null()) d.floquet.case_tag = case_tag_from_string(f.at("case_tag").get<std::string>());
    if (!f.at("rotation").is_null()) {
      const json& r = f.at("rotation");
      d.rotation = RotationAngle{r.at("theta").get<double>(), r.at("p").get<long>(), r.at("q").get<long>(),
                                 r.at("error").get<double>()};
    }
    const json& ix = j.at("index");
    d.index.n = ix.at("n").get<int>();
    d.index.i_maslov_1 = ix.at("i1").get<long>();
    d.index.nu_1 = ix.at("nu1").get<int>();
    d.index.i_viterbo_1 = ix.at("i_viterbo_1").get<long>();
    d.index.mean_index = ix.at("mean_index").get<double>();
    d.index.mean_index_regression = ix.at("mean_index_regression").get<double>();
    d.index.regression_error = ix.at("regression_error").get<double>();
    for (const json& it : ix.at("iterates")) {
      d.index.iterates.push_back(IterateIndex{it.at("m").get<int>(), it.at("i").get<long>(), it.at("nu").get<int>(),
                                              it.at("i_viterbo").get<long>()});
    }
    if (!j.at("chi_hat").is_null()) d.chi_hat = Rational::parse(j.at("chi_hat").get<std::string>());
    d.eligible_iterates = j.at("eligible_iterates").get<std::vector<int>>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed dossier: ") + e.what());
  }
  return d;
}

json dossier_file_to_json(const DossierFile& f) {
  json ds = json::array();
  for (const auto& d : f.dossiers) ds.push_back(dossier_to_json(d));
  return {{"schema", kSchemaVersion},
          {"kind", "dossiers"},
          {"surface_hash", f.surface_hash},
          {"database_hash", f.database_hash},
          {"m_max", f.m_max},
          {"survey", {{"family", f.family}, {"failures", f.survey_failures}}},
          {"dossiers", ds}};
}

DossierFile dossier_file_from_json(const json& j) {
  check_schema(j, "dossiers");
  DossierFile f;
  try {
    f.surface_hash = j.at("surface_hash").get<std::string>();
    f.database_hash = j.at("database_hash").get<std::string>();
    f.m_max = j.at("m_max").get<int>();
    f.family = j.at("survey").at("family").get<bool>();
    f.survey_failures = j.at("survey").at("failures").get<int>();
    for (const json& d : j.at("dossiers")) f.dossiers.push_back(dossier_from_json(d));
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed dossier file: ") + e.what());
  }
  return f;
}

json report_to_json(const VerdictReport& r, const std::string& surface_hash, const std::string& dossier_hash,
                    const std::vector<std::string>& requested) {
  json checks = json::object();
  for (const auto& e : r.entries) {
    checks[e.name] = {{"pass", e.status == Status::Pass},
                      {"status", to_string(e.status)},
                      {"lhs", e.lhs},
                      {"rhs", e.rhs},
                      {"tol", e.tol},
                      {"diagnosis", e.diagnosis},
                      {"evidence", e.evidence}};
  }
  return {{"schema", kSchemaVersion},
          {"kind", "verdict-report"},
          {"surface_hash", surface_hash},
          {"dossier_hash", dossier_hash},
          {"checks_requested", requested},
          {"checks", checks},
          {"exit_code", r.exit_code()}};
}

namespace {

struct Row {
  std::string prime_id;
  double action, period;
  long i1;
  int nu1;
  double mean_index;
  std::string chi_hat, case_tag, classification;
};

Row row_of(const OrbitDossier& d) {
  return Row{d.orbit.prime_id,
             d.orbit.action_A,
             d.orbit.period_tau,
             d.index.i_maslov_1,
             d.index.nu_1,
             d.index.mean_index,
             d.chi_hat ? d.chi_hat->str() : "",
             d.floquet.case_tag ? to_string(*d.floquet.case_tag) : "",
             to_string(d.floquet.classification)};
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string table_csv(const std::vector<OrbitDossier>& ds) {
  std::string out = std::string(kTableHeader) + "\n";
  for (const auto& d : ds) {
    const Row r = row_of(d);
    out += csv_field(r.prime_id) + "," + format_double(r.action) + "," + format_double(r.period) + "," +
           std::to_string(r.i1) + "," + std::to_string(r.nu1) + "," + format_double(r.mean_index) + "," +
           csv_field(r.chi_hat) + "," + csv_field(r.case_tag) + "," + csv_field(r.classification) + "\n";
  }
  return out;
}

json table_json(const std::vector<OrbitDossier>& ds) {
  json rows = json::array();
  for (const auto& d : ds) {
    const Row r = row_of(d);
    rows.push_back({{"prime_id", r.prime_id},
                    {"action", r.action},
                    {"period", r.period},
                    {"i1", r.i1},
                    {"nu1", r.nu1},
                    {"mean_index", r.mean_index},
                    {"chi_hat", d.chi_hat ? json(r.chi_hat) : json(nullptr)},
                    {"case", d.floquet.case_tag ? json(r.case_tag) : json(nullptr)},
                    {"classification", r.classification}});
  }
  return rows;
}

}  // namespace charflow
