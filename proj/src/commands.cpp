#include "charflow/commands.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <optional>
#include <ostream>
#include <thread>

#include "charflow/errors.hpp"
#include "charflow/identities.hpp"
#include "charflow/io.hpp"

namespace charflow {
namespace {

void require_path(const std::string& value, const char* flag) {
  if (value.empty()) throw ParameterError(std::string("missing required option ") + flag);
}

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const StaleDatabaseError& e) {
    err << "error: stale input: " << e.what() << "\n";
  } catch (const IncompleteDossierError& e) {
    err << "error: " << e.what() << ":";
    for (const auto& m : e.missing()) err << " " << m;
    err << "\n";
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
  }
  return kExitUsage;
}

nlohmann::json load_json(const std::string& path) {
  const std::string text = read_file(path);
  try {
    return nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error&) {
    throw ConfigError("'" + path + "' is not valid JSON");
  }
}

}  // namespace

int cmd_survey(const CommandOptions& opt, std::ostream& err) {
  return guarded(err, [&] {
    require_path(opt.config, "--config");
    require_path(opt.out, "--out");
    const SurfaceConfig cfg = load_surface_config(opt.config);
    SurveyOptions so;
    so.seed = opt.seed;
    so.seeds = opt.seeds > 0 ? opt.seeds : cfg.seeds.value_or(so.seeds);
    so.period_scan = cfg.period_scan.value_or(so.period_scan);
    so.t_min = cfg.t_min.value_or(0.0);
    so.t_max = cfg.t_max.value_or(0.0);
    const SurveyResult res = survey(cfg.surface, so);
    for (const auto& d : res.diagnostics) err << "note: " << d << "\n";
    if (res.failures > 0) {
      err << "note: " << res.failures << " of " << res.attempts << " shooting attempts did not converge\n";
    }
    write_atomic(opt.out, dump(database_to_json(cfg, res, opt.seed, so)));
    return kExitOk;
  });
}

int cmd_analyze(const CommandOptions& opt, std::ostream& err) {
  return guarded(err, [&] {
    require_path(opt.config, "--config");
    require_path(opt.db, "--db");
    require_path(opt.out, "--out");
    if (opt.m_max < 2) throw ParameterError("--m-max must be at least 2");
    const SurfaceConfig cfg = load_surface_config(opt.config);
    const std::string db_text = read_file(opt.db);
    nlohmann::json db_json;
    try {
      db_json = nlohmann::json::parse(db_text);
    } catch (const nlohmann::json::parse_error&) {
      throw ConfigError("'" + opt.db + "' is not valid JSON");
    }
    const OrbitDatabase db = database_from_json(db_json);
    if (db.surface_hash != cfg.hash) {
      throw StaleDatabaseError("database surface hash " + db.surface_hash + " does not match config hash " + cfg.hash);
    }
    const auto& orbits = db.survey.orbits;
    if (orbits.empty()) err << "warning: the orbit database is empty\n";
    const SurfaceMetrics sm = metrics(cfg.surface);
    AnalyzeOptions ao;
    ao.m_max = opt.m_max;

    std::vector<std::optional<OrbitDossier>> out(orbits.size());
    std::vector<std::string> failures(orbits.size());
    std::atomic<std::size_t> next{0};
    auto work = [&] {
      for (std::size_t k = next++; k < orbits.size(); k = next++) {
        try {
          out[k] = analyze_orbit(cfg.surface, sm, orbits[k], ao);
        } catch (const std::exception& e) {
          failures[k] = e.what();
        }
      }
    };
    const unsigned nthreads = std::min<unsigned>(worker_threads(), static_cast<unsigned>(std::max<std::size_t>(1, orbits.size())));
    if (nthreads <= 1) {
      work();
    } else {
      std::vector<std::thread> pool;
      for (unsigned i = 0; i < nthreads; ++i) pool.emplace_back(work);
      for (auto& t : pool) t.join();
    }
    DossierFile f;
    f.surface_hash = cfg.hash;
    f.database_hash = fnv1a64(db_text);
    f.m_max = opt.m_max;
    f.family = db.survey.family;
    f.survey_failures = db.survey.failures;
    for (std::size_t k = 0; k < orbits.size(); ++k) {
      if (!failures[k].empty()) throw Error("analysis of " + orbits[k].prime_id + " failed: " + failures[k]);
      f.dossiers.push_back(std::move(*out[k]));
    }
    write_atomic(opt.out, dump(dossier_file_to_json(f)));
    return kExitOk;
  });
}

int cmd_verify(const CommandOptions& opt, std::ostream& err) {
  return guarded(err, [&] {
    require_path(opt.config, "--config");
    require_path(opt.db, "--db");
    require_path(opt.out, "--out");
    if (!(opt.tol > 0)) throw ParameterError("--tol must be positive");
    const SurfaceConfig cfg = load_surface_config(opt.config);
    const std::string text = read_file(opt.db);
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error&) {
      throw ConfigError("'" + opt.db + "' is not valid JSON");
    }
    const DossierFile f = dossier_file_from_json(j);
    if (f.surface_hash != cfg.hash) {
      throw StaleDatabaseError("dossier surface hash " + f.surface_hash + " does not match config hash " + cfg.hash);
    }
    CheckContext c;
    c.n = cfg.surface.dim_n;
    c.metrics = metrics(cfg.surface);
    c.tol = opt.tol;
    c.family = f.family;
    c.survey_failures = f.survey_failures;
    const VerdictReport report = run_checks(f.dossiers, c, opt.checks);
    write_atomic(opt.out, dump(report_to_json(report, cfg.hash, fnv1a64(text), opt.checks)));
    for (const auto& e : report.entries) {
      err << e.name << ": " << to_string(e.status);
      if (!e.diagnosis.empty()) err << " (" << e.diagnosis << ")";
      err << "\n";
    }
    return report.exit_code();
  });
}

int cmd_table(const CommandOptions& opt, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    require_path(opt.db, "--db");
    if (opt.format != "csv" && opt.format != "json") throw ParameterError("--format must be csv or json");
    const DossierFile f = dossier_file_from_json(load_json(opt.db));
    const std::string text = opt.format == "csv" ? table_csv(f.dossiers) : dump(table_json(f.dossiers));
    if (opt.out.empty()) {
      out << text;
    } else {
      write_atomic(opt.out, text);
    }
    return kExitOk;
  });
}

}  // namespace charflow
