#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "charflow/identities.hpp"
#include "charflow/orbitfinder.hpp"
#include "charflow/surface.hpp"

namespace charflow {

inline constexpr const char* kSchemaVersion = "v1";

/// A parsed surface config: the model, its canonical JSON form and the
/// FNV-1a hash of that form.
struct SurfaceConfig {
  SurfaceModel surface;
  nlohmann::json canonical;
  std::string hash;
  /// Optional "survey" block: seeds, period_scan, t_min, t_max.
  std::optional<int> seeds;
  std::optional<int> period_scan;
  std::optional<double> t_min;
  std::optional<double> t_max;
};

/// Parses {"n", "kind", "axes", "perturbation": {"epsilon", "coeffs"}}.
/// Syntax errors report line and column; schema errors name the key.
SurfaceConfig parse_surface_config(const std::string& text, const std::string& origin = "config");
SurfaceConfig load_surface_config(const std::string& path);

/// 64-bit FNV-1a of the bytes, as 16 lowercase hex digits.
std::string fnv1a64(const std::string& bytes);

std::string read_file(const std::string& path);
/// Writes through a temporary file in the same directory and renames it.
void write_atomic(const std::string& path, const std::string& content);
/// Stable serialization used for every artifact (two-space indent, newline).
std::string dump(const nlohmann::json& j);

struct OrbitDatabase {
  std::string surface_hash;
  std::uint64_t seed = 0;
  SurveyResult survey;
};

nlohmann::json database_to_json(const SurfaceConfig& cfg, const SurveyResult& res, std::uint64_t seed,
                                const SurveyOptions& opt);
OrbitDatabase database_from_json(const nlohmann::json& j);

struct DossierFile {
  std::string surface_hash;
  std::string database_hash;
  int m_max = 0;
  bool family = false;
  int survey_failures = 0;
  std::vector<OrbitDossier> dossiers;
};

nlohmann::json dossier_to_json(const OrbitDossier& d);
OrbitDossier dossier_from_json(const nlohmann::json& j);
nlohmann::json dossier_file_to_json(const DossierFile& f);
DossierFile dossier_file_from_json(const nlohmann::json& j);

nlohmann::json report_to_json(const VerdictReport& r, const std::string& surface_hash,
                              const std::string& dossier_hash, const std::vector<std::string>& requested);

/// Column order of the orbit table.
inline constexpr const char* kTableHeader = "prime_id,action,period,i1,nu1,mean_index,chi_hat,case,classification";

std::string table_csv(const std::vector<OrbitDossier>& ds);
nlohmann::json table_json(const std::vector<OrbitDossier>& ds);

/// Shortest decimal form that reads back to the same double.
std::string format_double(double x);

}  // namespace charflow
