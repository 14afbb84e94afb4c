#include "scenegen/model_acquire.hpp"

#include <algorithm>
#include <random>
#include <thread>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "httplib.h"

#include "scenegen/archive.hpp"
#include "scenegen/error.hpp"
#include "scenegen/util.hpp"
#include "scenegen/xml.hpp"

namespace scenegen {
namespace {

constexpr int kMaxArchiveDepth = 4;

std::string unique_suffix() {
  static std::atomic<unsigned> counter{0};
  const auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
  return hex64(fnv1a64(std::to_string(tid) + ":" + std::to_string(counter++) + ":" +
                       std::to_string(std::random_device{}())))
      .substr(0, 10);
}

bool looks_like_model_dir(const fs::path& dir) {
  return fs::exists(dir / "model.config") || find_model_sdf(dir).has_value();
}

// Finds the model folder inside an unpacked archive.
std::optional<fs::path> locate_model_root(const fs::path& dir, const std::string& name, int depth) {
  if (looks_like_model_dir(dir)) return dir;
  if (depth >= kMaxArchiveDepth) return std::nullopt;
  std::vector<fs::path> subdirs;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_directory()) subdirs.push_back(e.path());
  }
  std::sort(subdirs.begin(), subdirs.end());
  for (const auto& sub : subdirs) {
    if (sub.filename() == name) {
      if (auto r = locate_model_root(sub, name, depth + 1)) return r;
    }
  }
  if (subdirs.size() == 1) return locate_model_root(subdirs.front(), name, depth + 1);
  return std::nullopt;
}

// Copies `src` to `<cache_dir>/<name>` via a temp directory and rename.
fs::path install_into_cache(const fs::path& src, const fs::path& cache_dir, const std::string& name) {
  const fs::path target = cache_dir / name;
  if (fs::exists(target)) return target;
  const fs::path tmp = cache_dir / (".install-" + name + "-" + unique_suffix());
  fs::create_directories(cache_dir);
  fs::copy(src, tmp, fs::copy_options::recursive);
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove_all(tmp);
    if (!fs::exists(target)) {
      throw Error(ErrorKind::Io, "cannot install model into cache: " + ec.message());
    }
  }
  return target;
}

fs::path cache_dir_of(std::span<const ModelSource> sources) {
  for (const auto& s : sources) {
    if (!s.cache_dir.empty()) return s.cache_dir;
  }
  return {};
}

ResolvedModel with_sdf(const ModelEntry& entry, const fs::path& dir) {
  auto sdf = find_model_sdf(dir);
  if (!sdf) throw ModelNotFound("model '" + entry.name + "' at " + dir.string() + " has no SDF file");
  return ResolvedModel{entry, dir, *sdf};
}

ResolvedModel from_archive(const ModelEntry& entry, const std::string& url, const fs::path& cache_dir,
                           Fetcher& fetcher) {
  const fs::path unpacked = fetch_archive(url, cache_dir, fetcher);
  auto root = locate_model_root(unpacked, entry.name, 0);
  if (!root) throw ArchiveError("archive from " + url + " does not contain an SDF model");
  return with_sdf(entry, install_into_cache(*root, cache_dir, entry.name));
}

}  // namespace

std::string Fetcher::get(const std::string& url) {
  if (url.rfind("file://", 0) == 0) {
    const std::string path = url.substr(7);
    if (!fs::exists(path)) throw NetworkError("file not found: " + url);
    return read_file(path);
  }
  const bool https = url.rfind("https://", 0) == 0;
  if (!https && url.rfind("http://", 0) != 0) throw NetworkError("unsupported URL scheme: " + url);
  if (offline_) throw NetworkError("offline mode: refusing to fetch " + url);

  const std::size_t host_begin = https ? 8 : 7;
  const std::size_t path_begin = url.find('/', host_begin);
  const std::string origin = url.substr(0, path_begin);
  const std::string path = path_begin == std::string::npos ? "/" : url.substr(path_begin);

  ++network_requests_;
  httplib::Client client(origin);
  client.set_follow_location(true);
  client.set_connection_timeout(10);
  client.set_read_timeout(60);
  auto res = client.Get(path);
  if (!res) {
    throw NetworkError("request to " + url + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw NetworkError("request to " + url + " returned HTTP " + std::to_string(res->status));
  }
  return std::move(res->body);
}

fs::path fetch_archive(const std::string& url, const fs::path& cache_dir, Fetcher& fetcher) {
  if (cache_dir.empty()) throw Error(ErrorKind::Usage, "no cache directory configured for " + url);
  const fs::path archives = cache_dir / ".archives";
  const fs::path dir = archives / hex64(fnv1a64(url));
  if (fs::is_directory(dir)) return dir;

  const std::string bytes = fetcher.get(url);
  fs::create_directories(archives);
  const fs::path tmp = archives / (".tmp-" + unique_suffix());
  try {
    unpack_archive(bytes, tmp);
  } catch (...) {
    fs::remove_all(tmp);
    throw;
  }
  std::error_code ec;
  fs::rename(tmp, dir, ec);
  if (ec) {
    fs::remove_all(tmp);
    if (!fs::is_directory(dir)) throw Error(ErrorKind::Io, "cannot populate cache: " + ec.message());
  }
  return dir;
}

std::optional<fs::path> find_model_sdf(const fs::path& model_dir) {
  if (!fs::is_directory(model_dir)) return std::nullopt;
  const fs::path config = model_dir / "model.config";
  if (fs::exists(config)) {
    try {
      const auto tree = xml::parse(read_file(config), config.string());
      std::optional<fs::path> best;
      double best_version = -1;
      if (auto model = tree.get_child_optional("model")) {
        for (const auto& [tag, node] : *model) {
          if (tag != "sdf") continue;
          const fs::path candidate = model_dir / xml::trimmed_text(node);
          if (!fs::is_regular_file(candidate)) continue;
          const double version = parse_number(xml::attr(node, "version").value_or("0")).value_or(0);
          if (version > best_version) {
            best_version = version;
            best = candidate;
          }
        }
      }
      if (best) return best;
    } catch (const Error&) {
      // an unreadable model.config falls through to the filename convention
    }
  }
  if (fs::is_regular_file(model_dir / "model.sdf")) return model_dir / "model.sdf";
  std::vector<fs::path> sdfs;
  for (const auto& e : fs::directory_iterator(model_dir)) {
    if (e.is_regular_file() && e.path().extension() == ".sdf") sdfs.push_back(e.path());
  }
  if (sdfs.size() == 1) return sdfs.front();
  return std::nullopt;
}

std::string database_model_url(const std::string& base, const std::string& name) {
  const std::string marker = "{name}";
  if (auto pos = base.find(marker); pos != std::string::npos) {
    std::string url = base;
    url.replace(pos, marker.size(), name);
    return url;
  }
  std::string b = base;
  while (!b.empty() && b.back() == '/') b.pop_back();
  return b + "/" + name + "/model.tar.gz";
}

ResolvedModel resolve_model(const ModelEntry& entry, std::span<const ModelSource> sources,
                            Fetcher& fetcher) {
  if (entry.kind == ModelKind::MissionOnly) return ResolvedModel{entry, {}, std::nullopt};

  const fs::path cache_dir = cache_dir_of(sources);

  // 1. local directories
  const bool local_allowed = entry.kind == ModelKind::GazeboModel || !entry.url;
  if (local_allowed) {
    for (const auto& s : sources) {
      if (s.kind != ModelSource::Kind::LocalDir) continue;
      const fs::path dir = fs::path(s.base) / entry.name;
      if (looks_like_model_dir(dir)) return with_sdf(entry, dir);
    }
  }
  if (entry.kind == ModelKind::CustomModel && !entry.url) {
    throw ModelNotFound("custom model '" + entry.name + "' not found in models_dir");
  }

  // 2. cache
  if (!cache_dir.empty() && looks_like_model_dir(cache_dir / entry.name)) {
    return with_sdf(entry, cache_dir / entry.name);
  }

  // 3. remote
  if (entry.url) {
    if (cache_dir.empty()) throw Error(ErrorKind::Usage, "no cache directory for model '" + entry.name + "'");
    return from_archive(entry, *entry.url, cache_dir, fetcher);
  }
  for (const auto& s : sources) {
    if (s.kind != ModelSource::Kind::RemoteDatabase) continue;
    const fs::path cache = s.cache_dir.empty() ? cache_dir : s.cache_dir;
    if (cache.empty()) throw Error(ErrorKind::Usage, "no cache directory for model '" + entry.name + "'");
    return from_archive(entry, database_model_url(s.base, entry.name), cache, fetcher);
  }
  throw ModelNotFound("model '" + entry.name +
                      "' not found locally or in the cache and no model database is configured");
}

std::vector<ModelSource> sources_for(const ModelDescriptor& descriptor, const fs::path& base_dir,
                                     const std::vector<fs::path>& model_paths,
                                     const fs::path& cache_dir,
                                     const std::optional<std::string>& database_url) {
  std::vector<ModelSource> sources;
  if (descriptor.models_dir) {
    fs::path dir = *descriptor.models_dir;
    if (dir.is_relative()) dir = base_dir / dir;
    sources.push_back({ModelSource::Kind::LocalDir, dir.lexically_normal().string(), cache_dir});
  }
  for (const auto& p : model_paths) {
    sources.push_back({ModelSource::Kind::LocalDir, p.string(), cache_dir});
  }
  sources.push_back({ModelSource::Kind::RemoteUrl, "", cache_dir});
  if (database_url) sources.push_back({ModelSource::Kind::RemoteDatabase, *database_url, cache_dir});
  return sources;
}

}  // namespace scenegen
