#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "charflow/commands.hpp"
#include "charflow/io.hpp"

using namespace charflow;
namespace fs = std::filesystem;

namespace {

struct Workspace {
  fs::path dir;
  Workspace() {
    dir = fs::temp_directory_path() / ("charflow_cli_" + std::to_string(std::rand()) + "_" +
                                       std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    fs::create_directories(dir);
  }
  ~Workspace() { fs::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path(name)) << text;
    return path(name);
  }
};

std::string ellipsoid_config(const std::string& axes) {
  return "{\"n\": 2, \"kind\": \"ellipsoid\", \"axes\": [" + axes + "]}\n";
}

// survey + analyze into ws; returns the dossier path.
std::string pipeline(const Workspace& ws, const std::string& config, const std::string& tag) {
  CommandOptions opt;
  opt.config = config;
  opt.out = ws.path(tag + "_db.json");
  std::ostringstream err;
  REQUIRE(cmd_survey(opt, err) == kExitOk);
  opt.db = opt.out;
  opt.out = ws.path(tag + "_dossiers.json");
  REQUIRE(cmd_analyze(opt, err) == kExitOk);
  return opt.out;
}

nlohmann::json load(const std::string& path) { return nlohmann::json::parse(read_file(path)); }

}  // namespace

TEST_CASE("survey writes an orbit database") {
  Workspace ws;
  const std::string cfg = ws.write("e.json", ellipsoid_config("1, 1.2"));
  CommandOptions opt;
  opt.config = cfg;
  opt.out = ws.path("db.json");
  std::ostringstream err;
  REQUIRE(cmd_survey(opt, err) == kExitOk);
  const auto db = load(opt.out);
  CHECK(db["schema"] == kSchemaVersion);
  CHECK(db["kind"] == "orbit-database");
  REQUIRE(db["orbits"].size() == 2);
  CHECK(db["orbits"][0]["action"].get<double>() == doctest::Approx(M_PI).epsilon(1e-8));
  CHECK(db["orbits"][1]["action"].get<double>() == doctest::Approx(1.44 * M_PI).epsilon(1e-8));
  CHECK(db["surface_hash"] == parse_surface_config(read_file(cfg)).hash);
}

TEST_CASE("survey of the round sphere reports a family") {
  Workspace ws;
  CommandOptions opt;
  opt.config = ws.write("s.json", ellipsoid_config("1, 1"));
  opt.out = ws.path("db.json");
  std::ostringstream err;
  REQUIRE(cmd_survey(opt, err) == kExitOk);
  CHECK(err.str().find("family") != std::string::npos);
  const auto db = load(opt.out);
  CHECK(db["survey"]["family"] == true);
  CHECK(db["orbits"].size() == 1);
}

TEST_CASE("config errors") {
  Workspace ws;
  std::ostringstream err;
  CommandOptions opt;
  opt.out = ws.path("db.json");

  opt.config = ws.write("bad.json", "{\"n\": 2,\n  \"kind\": }\n");
  CHECK(cmd_survey(opt, err) == kExitUsage);
  CHECK(err.str().find("bad.json:2:") != std::string::npos);

  err.str("");
  opt.config = ws.write("axes.json", "{\"n\": 2, \"kind\": \"ellipsoid\", \"axes\": [1, -1]}");
  CHECK(cmd_survey(opt, err) == kExitUsage);
  CHECK(err.str().find("axes") != std::string::npos);

  err.str("");
  opt.config = ws.path("missing.json");
  CHECK(cmd_survey(opt, err) == kExitUsage);
  CHECK(!fs::exists(opt.out));
}

TEST_CASE("surface config parsing") {
  const std::string perturbed =
      "{\"n\": 2, \"kind\": \"perturbed\", \"axes\": [1, 1.3],\n"
      " \"perturbation\": {\"epsilon\": 0.1, \"coeffs\": [0.3, 0, 0, 0, 0, -0.2]}}";
  const SurfaceConfig cfg = parse_surface_config(perturbed);
  CHECK(cfg.surface.epsilon == 0.1);
  CHECK(cfg.surface.coeffs.size() == 6);
  CHECK(cfg.hash.size() == 16);
  // Formatting does not change the canonical form or its hash.
  const SurfaceConfig same = parse_surface_config(
      "{\"perturbation\": {\"coeffs\": [0.3, 0, 0, 0, 0, -0.2], \"epsilon\": 0.1}, \"axes\": [1.0, 1.30], "
      "\"kind\": \"perturbed\", \"n\": 2}");
  CHECK(same.hash == cfg.hash);
  CHECK(parse_surface_config(ellipsoid_config("1, 1.2")).hash != cfg.hash);

  auto message = [](const std::string& text) -> std::string {
    try {
      parse_surface_config(text, "cfg");
    } catch (const std::exception& e) {
      return e.what();
    }
    return "";
  };
  CHECK(message("{\"n\": 2, \"kind\": \"perturbed\", \"axes\": [1, 1.3], \"perturbation\": {\"coeffs\": []}}")
            .find("perturbation.epsilon") != std::string::npos);
  CHECK(message("{\"n\": 2, \"kind\": \"perturbed\", \"axes\": [1, 1.3], "
                "\"perturbation\": {\"epsilon\": 0.1, \"coeffs\": [], \"extra\": 1}}")
            .find("perturbation.extra") != std::string::npos);
  CHECK(message("{\"n\": 2, \"kind\": \"ellipsoid\", \"axes\": [1, 1.3], \"perturbation\": {}}")
            .find("perturbation") != std::string::npos);
  CHECK(message("{\"n\": 2, \"kind\": \"torus\", \"axes\": [1, 1.3]}").find("kind") != std::string::npos);
  CHECK(message("{\"n\": 3, \"kind\": \"ellipsoid\", \"axes\": [1, 1.3]}").find("axes") != std::string::npos);
  CHECK(message("{\"n\": 2, \"kind\": \"ellipsoid\", \"axes\": [1, 1.3], \"colour\": 1}").find("colour") !=
        std::string::npos);
  CHECK(message("{\"n\": 2, \"kind\": \"perturbed\", \"axes\": [1, 1.3], "
                "\"perturbation\": {\"epsilon\": 100, \"coeffs\": [0.3, 0, 0, 0, 0, -0.2]}}") != "");
}

TEST_CASE("perturbed surfaces run through the pipeline") {
  Workspace ws;
  const std::string cfg = ws.write(
      "p.json",
      "{\"n\": 2, \"kind\": \"perturbed\", \"axes\": [1, 1.3], \"perturbation\": {\"epsilon\": 0.1, "
      "\"coeffs\": [0.3, 0, 0, 0, 0, -0.2, 0, 0, 0, 0, 0, 0.2]}, \"survey\": {\"seeds\": 12}}\n");
  const auto dossiers = load(pipeline(ws, cfg, "p"));
  REQUIRE(dossiers["dossiers"].size() >= 2);
  CommandOptions opt;
  opt.config = cfg;
  opt.db = ws.path("p_dossiers.json");
  opt.out = ws.path("report.json");
  opt.checks = {"action_lower_bound", "viterbo_shift", "iteration_formulas"};
  std::ostringstream err;
  CHECK(cmd_verify(opt, err) == kExitOk);
  for (const auto& [name, entry] : load(opt.out)["checks"].items()) {
    INFO(name);
    CHECK(entry["status"] == "pass");
  }
}

TEST_CASE("analyze builds dossiers") {
  Workspace ws;
  const std::string cfg = ws.write("e.json", ellipsoid_config("1, 1.189207115002721"));
  const auto dossiers = load(pipeline(ws, cfg, "e"));
  CHECK(dossiers["kind"] == "dossiers");
  REQUIRE(dossiers["dossiers"].size() == 2);
  for (const auto& d : dossiers["dossiers"]) {
    CHECK(d["floquet"]["classification"] == "elliptic");
    CHECK(d["chi_hat"] == "1");
    for (const auto& it : d["index"]["iterates"]) CHECK(it["nu"] == 1);
  }
  const double sum = 1 / dossiers["dossiers"][0]["index"]["mean_index"].get<double>() +
                     1 / dossiers["dossiers"][1]["index"]["mean_index"].get<double>();
  CHECK(std::abs(sum - 0.5) < 1e-6);
}

TEST_CASE("analyze of an empty database warns") {
  Workspace ws;
  CommandOptions opt;
  opt.config = ws.write("e.json", ellipsoid_config("1, 1.2"));
  const SurfaceConfig cfg = load_surface_config(opt.config);
  SurveyOptions so;
  opt.db = ws.write("db.json", dump(database_to_json(cfg, SurveyResult{}, 0, so)));
  opt.out = ws.path("dossiers.json");
  std::ostringstream err;
  CHECK(cmd_analyze(opt, err) == kExitOk);
  CHECK(err.str().find("warning") != std::string::npos);
  CHECK(load(opt.out)["dossiers"].empty());
}

TEST_CASE("analyze of the sphere marks the orbit degenerate") {
  Workspace ws;
  const auto dossiers = load(pipeline(ws, ws.write("s.json", ellipsoid_config("1, 1")), "s"));
  REQUIRE(dossiers["dossiers"].size() == 1);
  const auto& d = dossiers["dossiers"][0];
  CHECK(d["floquet"]["classification"] == "degenerate-beyond-forced");
  CHECK(d["chi_hat"].is_null());
}

TEST_CASE("stale inputs are rejected") {
  Workspace ws;
  const std::string cfg = ws.write("e.json", ellipsoid_config("1, 1.2"));
  const std::string dossiers = pipeline(ws, cfg, "e");
  CommandOptions opt;
  opt.config = ws.write("other.json", ellipsoid_config("1, 1.3"));
  opt.db = ws.path("e_db.json");
  opt.out = ws.path("x.json");
  std::ostringstream err;
  CHECK(cmd_analyze(opt, err) == kExitUsage);
  CHECK(err.str().find("stale") != std::string::npos);
  opt.db = dossiers;
  CHECK(cmd_verify(opt, err) == kExitUsage);
  CHECK(!fs::exists(opt.out));
}

TEST_CASE("verify exit codes") {
  Workspace ws;
  std::ostringstream err;

  const std::string cfg = ws.write("e.json", ellipsoid_config("1, 1.2"));
  CommandOptions opt;
  opt.config = cfg;
  const std::string pinched = pipeline(ws, cfg, "e");
  opt.db = pinched;
  opt.out = ws.path("report.json");
  CHECK(cmd_verify(opt, err) == kExitOk);
  const auto report = load(opt.out);
  CHECK(report["kind"] == "verdict-report");
  for (const auto& [name, entry] : report["checks"].items()) {
    INFO(name);
    CHECK(entry["status"] == "pass");
  }

  const std::string wide = ws.write("w.json", ellipsoid_config("1, 1.5"));
  opt.config = wide;
  opt.db = pipeline(ws, wide, "w");
  opt.checks = {"thm_1_1"};
  CHECK(cmd_verify(opt, err) == kExitOk);
  CHECK(load(opt.out)["checks"]["thm_1_1"]["status"] == "hypothesis-not-met");

  // Flip χ̂ of the first orbit.
  opt.config = cfg;
  auto corrupted = load(pinched);
  corrupted["dossiers"][0]["chi_hat"] = "-1";
  opt.db = ws.write("corrupted.json", dump(corrupted));
  opt.checks = {"resonance_pos"};
  CHECK(cmd_verify(opt, err) == kExitIdentityFailed);
  const auto bad = load(opt.out);
  CHECK(bad["checks"]["resonance_pos"]["status"] == "fail");
  CHECK(bad["checks"]["resonance_pos"]["diagnosis"] == "identity-violated");
  CHECK(bad["exit_code"] == 1);

  opt.checks = {"no_such_check"};
  CHECK(cmd_verify(opt, err) == kExitUsage);
  opt.checks = {"all"};
  opt.tol = -1;
  CHECK(cmd_verify(opt, err) == kExitUsage);
}

TEST_CASE("table output") {
  Workspace ws;
  const std::string cfg = ws.write("e.json", ellipsoid_config("1, 1.2"));
  CommandOptions opt;
  opt.db = pipeline(ws, cfg, "e");
  std::ostringstream out, err;
  REQUIRE(cmd_table(opt, out, err) == kExitOk);
  std::istringstream lines(out.str());
  std::string header, row1, row2, extra;
  std::getline(lines, header);
  std::getline(lines, row1);
  std::getline(lines, row2);
  CHECK(header == "prime_id,action,period,i1,nu1,mean_index,chi_hat,case,classification");
  CHECK(row1.rfind("y1,", 0) == 0);
  CHECK(row2.rfind("y2,", 0) == 0);
  CHECK(!std::getline(lines, extra));

  opt.format = "json";
  std::ostringstream jout;
  REQUIRE(cmd_table(opt, jout, err) == kExitOk);
  const auto rows = nlohmann::json::parse(jout.str());
  REQUIRE(rows.size() == 2);
  const auto dossiers = load(opt.db);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(rows[k]["prime_id"] == dossiers["dossiers"][k]["prime_id"]);
    CHECK(rows[k]["chi_hat"] == dossiers["dossiers"][k]["chi_hat"]);
    CHECK(rows[k]["i1"] == dossiers["dossiers"][k]["index"]["i1"]);
  }
  CHECK(nlohmann::json::parse(dump(rows)) == rows);

  opt.format = "xml";
  CHECK(cmd_table(opt, jout, err) == kExitUsage);
}

TEST_CASE("outputs are byte-identical across runs") {
  Workspace ws;
  const std::string cfg = ws.write("e.json", ellipsoid_config("1, 1.3"));
  const std::string a = pipeline(ws, cfg, "a");
  const std::string b = pipeline(ws, cfg, "b");
  CHECK(read_file(ws.path("a_db.json")) == read_file(ws.path("b_db.json")));
  CHECK(read_file(a) != "");
  // The dossier records the database hash; identical databases give identical dossiers.
  CHECK(read_file(a) == read_file(b));
  CommandOptions opt;
  opt.config = cfg;
  std::ostringstream err;
  opt.db = a;
  opt.out = ws.path("ra.json");
  cmd_verify(opt, err);
  opt.db = b;
  opt.out = ws.path("rb.json");
  cmd_verify(opt, err);
  CHECK(read_file(ws.path("ra.json")) == read_file(ws.path("rb.json")));
}

#ifdef CHARFLOW_CLI_PATH
TEST_CASE("executable argument handling") {
  const std::string exe = CHARFLOW_CLI_PATH;
  auto run = [&](const std::string& args) {
    const int status = std::system((exe + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
  };
  CHECK(run("") == kExitUsage);
  CHECK(run("frobnicate") == kExitUsage);
  CHECK(run("survey --config") == kExitUsage);
  CHECK(run("table --db x.json --format xml") == kExitUsage);
  CHECK(run("--help") == kExitOk);
}
#endif
