#include "scenegen/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <random>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "scenegen/descriptor.hpp"
#include "scenegen/dsl.hpp"
#include "scenegen/emit.hpp"
#include "scenegen/model_acquire.hpp"
#include "scenegen/sampler.hpp"
#include "scenegen/sdf_geom.hpp"
#include "scenegen/util.hpp"
#include "scenegen/xml.hpp"

namespace scenegen {

namespace {

std::string descriptor_hash(const fs::path& path) { return hex64(fnv1a64(read_file(path))); }

fs::path cache_dir_of(const RunConfig& c) { return c.cache_dir.empty() ? default_cache_dir() : c.cache_dir; }

fs::path registry_path_of(const RunConfig& c) {
  return c.registry_path.empty() ? default_registry_path(c.descriptor_path) : c.registry_path;
}

std::string fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

void print_table(const std::vector<ModelSpec>& specs, std::ostream& out) {
  char line[256];
  std::snprintf(line, sizeof line, "%-20s %-14s %8s %8s %8s %8s\n", "type", "kind", "width", "length", "height",
                "dynamic");
  out << line;
  for (const auto& s : specs) {
    std::snprintf(line, sizeof line, "%-20s %-14s %8s %8s %8s %8s\n", s.name.c_str(),
                  std::string(to_string(s.kind)).c_str(), fixed(s.width, 3).c_str(), fixed(s.length, 3).c_str(),
                  fixed(s.height, 3).c_str(), s.dynamic_size ? "yes" : "no");
    out << line;
  }
}

struct SceneResult {
  std::uint64_t seed = 0;
  fs::path dir;
  std::size_t objects = 0;
  std::optional<ErrorKind> error;
  std::string message;
};

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Sampling: return kExitSampling;
    case ErrorKind::Usage: return kExitUsage;
    case ErrorKind::Io: return kExitIo;
  }
  return kExitIo;
}

fs::path default_cache_dir() {
  if (const char* v = std::getenv("SCENEGEN_CACHE"); v && *v) return v;
  if (const char* v = std::getenv("XDG_CACHE_HOME"); v && *v) return fs::path(v) / "scenegen";
  if (const char* v = std::getenv("HOME"); v && *v) return fs::path(v) / ".cache" / "scenegen";
  return fs::temp_directory_path() / "scenegen-cache";
}

fs::path default_registry_path(const fs::path& descriptor_path) {
  return descriptor_path.parent_path() / (descriptor_path.stem().string() + ".registry.yaml");
}

Registry cmd_models(const RunConfig& config, std::ostream& out) {
  const ModelDescriptor descriptor = load_descriptor(config.descriptor_path.string());
  const fs::path base_dir = fs::absolute(config.descriptor_path).parent_path();
  const fs::path cache = cache_dir_of(config);
  const auto sources = sources_for(descriptor, base_dir, config.model_paths, cache, config.database_url);
  Fetcher fetcher(config.offline);

  std::vector<ModelSpec> specs;
  for (const auto& entry : descriptor.models) {
    try {
      specs.push_back(build_model_spec(entry, resolve_model(entry, sources, fetcher)));
    } catch (const UnsupportedGeometry& e) {
      throw UnsupportedGeometry(e.shape() + " (model '" + entry.name + "')");
    } catch (const Error& e) {
      if (std::string(e.what()).find(entry.name) != std::string::npos) throw;
      throw Error(e.kind(), "model '" + entry.name + "': " + e.what());
    }
  }
  Registry registry(specs);
  save_registry(registry.specs(), registry_path_of(config), descriptor_hash(config.descriptor_path));
  print_table(registry.specs(), out);
  return registry;
}

Registry ensure_registry(const RunConfig& config, std::ostream& log) {
  const fs::path path = registry_path_of(config);
  if (fs::exists(path)) {
    try {
      LoadedRegistry loaded = load_registry_file(path);
      if (loaded.descriptor_hash == descriptor_hash(config.descriptor_path)) return Registry(std::move(loaded.specs));
      log << "registry " << path.string() << " was built from a different descriptor; rebuilding\n";
    } catch (const RegistryError& e) {
      log << e.what() << "; rebuilding\n";
    }
  }
  return cmd_models(config, log);
}

int cmd_generate(const RunConfig& config, std::ostream& out, std::ostream& err) {
  if (config.num_scenes < 1) throw Error(ErrorKind::Usage, "--num-scenes must be >= 1");
  if (config.max_attempts < 1) throw Error(ErrorKind::Usage, "--max-attempts must be >= 1");

  const Registry registry = ensure_registry(config, err);
  const std::string scenario_text = read_file(config.scenario_path);
  dsl::ScenarioAst ast;
  try {
    ast = dsl::parse_scenario(scenario_text, type_resolver(registry));
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.column(), e.message() + " [" + config.scenario_path.string() + "]");
  }

  std::optional<std::string> world_template;
  const ModelDescriptor descriptor = load_descriptor(config.descriptor_path.string());
  if (descriptor.world) {
    fs::path p = *descriptor.world;
    if (p.is_relative()) p = fs::absolute(config.descriptor_path).parent_path() / p;
    world_template = read_file(p);
  }

  std::uint64_t seed;
  if (config.seed) {
    seed = *config.seed;
  } else {
    std::random_device rd;
    seed = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
  }
  err << "seed: " << seed << "\n";

  std::vector<SceneResult> results(static_cast<std::size_t>(config.num_scenes));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next++) < results.size();) {
      SceneResult& r = results[k];
      r.seed = seed + k;
      r.dir = config.out_dir / ("scene_" + std::to_string(k));
      try {
        const ConcreteScene scene = sample_scene(ast, registry, r.seed, config.max_attempts);
        write_output_tree(emit_scene(scene, world_template), r.dir, config.force);
        r.objects = scene.objects.size();
      } catch (const Error& e) {
        r.error = e.kind();
        r.message = e.what();
      } catch (const std::exception& e) {
        r.error = ErrorKind::Io;
        r.message = e.what();
      }
    }
  };
  unsigned jobs = config.jobs > 0 ? static_cast<unsigned>(config.jobs) : std::max(1u, std::thread::hardware_concurrency());
  jobs = std::min<unsigned>(jobs, static_cast<unsigned>(results.size()));
  std::vector<std::thread> threads;
  for (unsigned i = 1; i < jobs; ++i) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();

  int code = kExitOk;
  bool any_ok = false;
  for (const auto& r : results) {
    if (r.error) {
      err << "scene " << r.dir.filename().string() << " (seed " << r.seed << "): " << r.message << "\n";
      if (code == kExitOk) code = exit_code_for(*r.error);
      continue;
    }
    any_ok = true;
    if (config.json) {
      out << nlohmann::json{{"seed", r.seed}, {"objects", r.objects}, {"path", r.dir.string()}}.dump() << "\n";
    } else {
      out << r.dir.string() << ": " << r.objects << " objects (seed " << r.seed << ")\n";
    }
  }
  if (any_ok) (config.json ? err : out) << "To use the generated models: " << model_path_hint(config.out_dir / "scene_0") << "\n";
  return code;
}

void cmd_plot(const fs::path& scene_dir) {
  const fs::path record = scene_dir / "scene.json";
  if (!fs::exists(record)) throw Error(ErrorKind::Io, "no scene record at " + record.string());
  write_file_atomic(scene_dir / "scene.svg", emit_plot_svg(scene_from_json(read_file(record))));
}

std::vector<std::string> database_model_names(const std::string& database_url, const fs::path& cache_dir,
                                              bool offline) {
  (void)cache_dir;
  Fetcher fetcher(offline);
  std::string base = database_url;
  while (!base.empty() && base.back() == '/') base.pop_back();
  const xml::Tree doc = xml::parse(fetcher.get(base + "/database.config"), "database.config");
  std::vector<std::string> names;
  if (auto models = doc.get_child_optional("database.models")) {
    for (const auto& [tag, node] : *models) {
      if (tag != "uri") continue;
      std::string uri = xml::trimmed_text(node);
      if (auto p = uri.find("://"); p != std::string::npos) uri = uri.substr(p + 3);
      if (!uri.empty()) names.push_back(uri);
    }
  }
  return names;
}

AuditReport audit_models(const std::vector<std::string>& names, const std::optional<fs::path>& models_root,
                         const std::optional<std::string>& database_url, const fs::path& cache_dir, bool offline,
                         std::ostream& log) {
  std::vector<ModelSource> sources;
  if (models_root) sources.push_back({ModelSource::Kind::LocalDir, models_root->string(), cache_dir});
  if (database_url) sources.push_back({ModelSource::Kind::RemoteDatabase, *database_url, cache_dir});
  Fetcher fetcher(offline);

  AuditReport report;
  for (const auto& name : names) {
    ++report.total;
    ModelEntry entry;
    entry.name = name;
    try {
      const ResolvedModel resolved = resolve_model(entry, sources, fetcher);
      if (!resolved.sdf_path) throw ModelNotFound("no SDF file");
      const ParsedModel parsed = parse_model_sdf(read_file(*resolved.sdf_path));
      model_footprint(parsed.collisions, model_mesh_resolver(resolved.root_dir));
      ++report.analysed;
    } catch (const UnsupportedGeometry& e) {
      ++report.analysed;
      ++report.unsupported;
      report.unsupported_models.push_back(name);
      log << name << ": " << e.what() << "\n";
    } catch (const Error& e) {
      ++report.failed;
      log << name << ": failed: " << e.what() << "\n";
    }
  }
  return report;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generate simulation worlds from probabilistic scenario descriptions"};
  app.require_subcommand(1);
  RunConfig config;
  std::string database_url = kDefaultDatabaseUrl;
  std::uint64_t seed = 0;

  auto add_model_options = [&](CLI::App* cmd) {
    cmd->add_option("-d,--descriptor", config.descriptor_path, "Model descriptor YAML")->required();
    cmd->add_option("--cache-dir", config.cache_dir, "Download cache directory");
    cmd->add_option("--registry", config.registry_path, "Registry file (default: next to the descriptor)");
    cmd->add_option("--model-path", config.model_paths, "Extra local model directories");
    cmd->add_option("--database-url", database_url, "Model database base URL");
    cmd->add_flag("--offline", config.offline, "Never use the network");
  };

  CLI::App* models = app.add_subcommand("models", "Resolve models and build the registry");
  add_model_options(models);

  CLI::App* generate = app.add_subcommand("generate", "Sample scenes and write worlds");
  add_model_options(generate);
  generate->add_option("-s,--scenario", config.scenario_path, "Scenario file")->required();
  generate->add_option("-o,--out", config.out_dir, "Output directory")->required();
  CLI::Option* seed_opt = generate->add_option("--seed", seed, "Base seed (default: random, always printed)");
  generate->add_option("--num-scenes", config.num_scenes, "Number of scenes")->check(CLI::PositiveNumber);
  generate->add_option("--max-attempts", config.max_attempts, "Rejection sampling budget per scene")
      ->check(CLI::PositiveNumber);
  generate->add_option("-j,--jobs", config.jobs, "Worker threads (default: all cores)");
  generate->add_flag("--force", config.force, "Replace outputs in non-empty scene directories");
  generate->add_flag("--json", config.json, "One JSON summary line per scene on stdout");

  CLI::App* plot = app.add_subcommand("plot", "Redraw scene.svg from a scene directory");
  fs::path scene_dir;
  plot->add_option("scene_dir", scene_dir, "Scene directory")->required();

  CLI::App* audit = app.add_subcommand("audit", "Count database models with unsupported collision geometry");
  std::optional<fs::path> audit_root;
  std::vector<std::string> audit_names;
  std::string audit_db;
  audit->add_option("--models-root", audit_root, "Local directory of model folders");
  audit->add_option("--database-url", audit_db, "Model database to list and download");
  audit->add_option("--model", audit_names, "Only these models");
  audit->add_option("--cache-dir", config.cache_dir, "Download cache directory");
  audit->add_flag("--offline", config.offline, "Never use the network");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  config.database_url = database_url.empty() ? std::nullopt : std::optional<std::string>(database_url);
  if (*seed_opt) config.seed = seed;

  try {
    if (*models) {
      cmd_models(config, out);
      out << "registry written to " << registry_path_of(config).string() << "\n";
      return kExitOk;
    }
    if (*generate) return cmd_generate(config, out, err);
    if (*plot) {
      cmd_plot(scene_dir);
      return kExitOk;
    }
    if (*audit) {
      if (!audit_root && audit_db.empty()) throw Error(ErrorKind::Usage, "audit needs --models-root or --database-url");
      const fs::path cache = cache_dir_of(config);
      std::optional<std::string> db = audit_db.empty() ? std::nullopt : std::optional<std::string>(audit_db);
      if (audit_names.empty()) {
        if (audit_root) {
          for (const auto& d : fs::directory_iterator(*audit_root)) {
            if (d.is_directory() && find_model_sdf(d.path())) audit_names.push_back(d.path().filename().string());
          }
          std::sort(audit_names.begin(), audit_names.end());
        } else {
          audit_names = database_model_names(*db, cache, config.offline);
        }
      }
      const AuditReport r = audit_models(audit_names, audit_root, db, cache, config.offline, err);
      out << nlohmann::json{{"total", r.total},
                            {"analysed", r.analysed},
                            {"unsupported", r.unsupported},
                            {"failed", r.failed},
                            {"unsupported_models", r.unsupported_models}}
                 .dump()
          << "\n";
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}

}  // namespace scenegen
