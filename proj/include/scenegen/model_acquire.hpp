#pragma once

#include <atomic>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "scenegen/descriptor.hpp"

namespace scenegen {

namespace fs = std::filesystem;

/// Where model files come from.
///  - LocalDir: a directory holding `<name>/model.sdf` style model folders.
///  - RemoteDatabase: a base URL; model `name` lives at `<base>/<name>/model.tar.gz`,
///    or at `base` with "{name}" substituted when the base contains that marker.
///  - RemoteUrl: enables per-entry `url` downloads into cache_dir.
struct ModelSource {
  enum class Kind { LocalDir, RemoteDatabase, RemoteUrl };
  Kind kind = Kind::LocalDir;
  std::string base;
  fs::path cache_dir;
};

struct ResolvedModel {
  ModelEntry entry;
  fs::path root_dir;                  // empty for MISSION_ONLY
  std::optional<fs::path> sdf_path;   // absent for MISSION_ONLY

  bool operator==(const ResolvedModel&) const = default;
};

/// Retrieves URL contents. http(s) requests count as network use; file:// does
/// not. In offline mode any network request throws NetworkError.
class Fetcher {
 public:
  explicit Fetcher(bool offline = false) : offline_(offline) {}

  std::string get(const std::string& url);
  std::size_t network_requests() const { return network_requests_.load(); }
  bool offline() const { return offline_; }

 private:
  bool offline_;
  std::atomic<std::size_t> network_requests_{0};
};

/// Downloads and unpacks an archive under `<cache_dir>/.archives/<hash(url)>/`.
/// A second call with the same url is served from the cache.
fs::path fetch_archive(const std::string& url, const fs::path& cache_dir, Fetcher& fetcher);

/// The SDF file of a model directory: the newest file model.config declares,
/// else model.sdf, else the only *.sdf present.
std::optional<fs::path> find_model_sdf(const fs::path& model_dir);

std::string database_model_url(const std::string& base, const std::string& name);

ResolvedModel resolve_model(const ModelEntry& entry, std::span<const ModelSource> sources,
                            Fetcher& fetcher);

/// Sources implied by a descriptor: its models_dir (resolved against base_dir),
/// extra local model paths, the cache, and an optional database URL.
std::vector<ModelSource> sources_for(const ModelDescriptor& descriptor, const fs::path& base_dir,
                                     const std::vector<fs::path>& model_paths,
                                     const fs::path& cache_dir,
                                     const std::optional<std::string>& database_url);

}  // namespace scenegen
