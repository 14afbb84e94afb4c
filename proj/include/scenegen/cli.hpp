#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "scenegen/error.hpp"
#include "scenegen/registry.hpp"

namespace scenegen {

namespace fs = std::filesystem;

inline constexpr const char* kDefaultDatabaseUrl = "http://models.gazebosim.org";

enum ExitCode : int { kExitOk = 0, kExitSampling = 1, kExitUsage = 2, kExitIo = 3 };

int exit_code_for(ErrorKind kind);

struct RunConfig {
  fs::path descriptor_path;
  fs::path scenario_path;
  fs::path out_dir;
  std::optional<std::uint64_t> seed;  // entropy when absent
  int num_scenes = 1;
  int max_attempts = 2000;
  int jobs = 0;  // 0: one per hardware thread
  bool offline = false;
  bool force = false;
  bool json = false;
  fs::path cache_dir;           // default_cache_dir() when empty
  fs::path registry_path;       // next to the descriptor when empty
  std::vector<fs::path> model_paths;
  std::optional<std::string> database_url = kDefaultDatabaseUrl;
};

fs::path default_cache_dir();
fs::path default_registry_path(const fs::path& descriptor_path);

/// Resolves and analyses every descriptor entry, then writes the registry.
Registry cmd_models(const RunConfig& config, std::ostream& out);

/// Loads the registry, rebuilding it when missing, stale, or built from a
/// different descriptor.
Registry ensure_registry(const RunConfig& config, std::ostream& log);

/// Samples and emits `num_scenes` scenes into `<out_dir>/scene_<k>` using
/// seeds seed, seed+1, ... Returns the process exit code.
int cmd_generate(const RunConfig& config, std::ostream& out, std::ostream& err);

/// Redraws `<scene_dir>/scene.svg` from scene.json.
void cmd_plot(const fs::path& scene_dir);

struct AuditReport {
  std::size_t total = 0;
  std::size_t analysed = 0;
  std::size_t unsupported = 0;  // collision geometry this tool cannot measure
  std::size_t failed = 0;       // could not fetch or parse
  std::vector<std::string> unsupported_models;
};

/// Counts models of a database (or a local directory of model folders) whose
/// collision geometry is unsupported.
AuditReport audit_models(const std::vector<std::string>& names, const std::optional<fs::path>& models_root,
                         const std::optional<std::string>& database_url, const fs::path& cache_dir, bool offline,
                         std::ostream& log);

/// Model names listed by a database's database.config.
std::vector<std::string> database_model_names(const std::string& database_url, const fs::path& cache_dir,
                                              bool offline);

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace scenegen
