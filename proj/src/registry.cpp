#include "scenegen/registry.hpp"

#include <cctype>
#include <cmath>

#include <yaml-cpp/yaml.h>

#include "scenegen/error.hpp"
#include "scenegen/sdf_geom.hpp"
#include "scenegen/util.hpp"

namespace scenegen {
namespace fs = std::filesystem;

namespace {

bool capitalized(std::string_view s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s.front()));
}

std::string req_scalar(const YAML::Node& node, const char* key, const std::string& where) {
  auto child = node[key];
  if (!child || !child.IsScalar()) throw RegistryError(where + ": missing '" + key + "'");
  return child.Scalar();
}

double req_number(const YAML::Node& node, const char* key, const std::string& where) {
  auto v = parse_number(req_scalar(node, key, where));
  if (!v) throw RegistryError(where + ": '" + key + "' is not a number");
  return *v;
}

bool req_bool(const YAML::Node& node, const char* key, const std::string& where) {
  const std::string s = req_scalar(node, key, where);
  if (s == "true") return true;
  if (s == "false") return false;
  throw RegistryError(where + ": '" + key + "' is not a boolean");
}

std::optional<double> opt_number(const YAML::Node& node, const char* key) {
  if (!node[key]) return std::nullopt;
  return parse_number(node[key].Scalar());
}

}  // namespace

std::string dsl_type_name(std::string_view entry_name) {
  std::string out;
  bool upper_next = true;
  for (char c : entry_name) {
    if (c == '_' || c == '-' || c == ' ') {
      upper_next = true;
      continue;
    }
    if (!std::isalnum(static_cast<unsigned char>(c))) {
      throw DescriptorError(std::string(entry_name),
                            "model name cannot be mapped to a type name (character '" +
                                std::string(1, c) + "')");
    }
    out += upper_next ? static_cast<char>(std::toupper(static_cast<unsigned char>(c))) : c;
    upper_next = false;
  }
  if (out.empty() || std::isdigit(static_cast<unsigned char>(out.front()))) {
    throw DescriptorError(std::string(entry_name), "model name cannot be mapped to a type name");
  }
  return out;
}

std::string file_hash(const fs::path& path) { return hex64(fnv1a64(read_file(path))); }

ModelSpec build_model_spec(const ModelEntry& entry, const ResolvedModel& resolved) {
  if (resolved.entry.name != entry.name) {
    throw Error(ErrorKind::Usage, "resolved model '" + resolved.entry.name + "' does not match entry '" +
                                      entry.name + "'");
  }
  ModelSpec spec;
  spec.name = dsl_type_name(entry.name);
  spec.entry_name = entry.name;
  spec.kind = entry.kind;
  spec.source = resolved;
  spec.heading_offset = entry.heading.value_or(0.0);

  if (entry.kind == ModelKind::MissionOnly) {
    if (entry.width.has_value() != entry.length.has_value()) {
      throw DescriptorError(entry.name, "MISSION_ONLY models need both width and length, or neither");
    }
    spec.width = entry.width.value_or(kMissionDefaultSize);
    spec.length = entry.length.value_or(kMissionDefaultSize);
    spec.dynamic_size = entry.dynamic_size.value_or(false);
    return spec;
  }

  if (!resolved.sdf_path) throw ModelNotFound("model '" + entry.name + "' has no SDF file");
  const std::string sdf_text = read_file(*resolved.sdf_path);
  spec.source_hash = hex64(fnv1a64(sdf_text));
  FootprintInfo info;
  try {
    const ParsedModel parsed = parse_model_sdf(sdf_text);
    info = model_footprint(parsed.collisions, model_mesh_resolver(resolved.root_dir));
  } catch (const Error& e) {
    throw Error(e.kind(), "model '" + entry.name + "': " + e.what());
  }

  spec.collidable = !info.empty;
  spec.width = entry.width.value_or(info.empty ? kMissionDefaultSize : info.width);
  spec.length = entry.length.value_or(info.empty ? kMissionDefaultSize : info.length);
  spec.height = info.height;
  spec.z_offset = info.z_offset;
  spec.dynamic_size = entry.dynamic_size.value_or(classify_dynamic_size(info));
  if (!(spec.width > 0) || !(spec.length > 0)) {
    throw GeometryError("model '" + entry.name + "' has a degenerate footprint (" +
                        format_number(spec.width) + " x " + format_number(spec.length) + ")");
  }
  return spec;
}

ModelSpec wall_spec() {
  ModelSpec spec;
  spec.name = "Wall";
  spec.entry_name = "wall";
  spec.kind = ModelKind::CustomModel;
  spec.builtin = true;
  spec.width = spec.length = spec.height = 1.0;
  spec.z_offset = -0.5;
  spec.dynamic_size = true;
  spec.source.entry = ModelEntry{"wall", ModelKind::CustomModel, {}, {}, {}, {}, true};
  return spec;
}

Registry::Registry(std::vector<ModelSpec> specs) : specs_(std::move(specs)) {
  const bool has_wall =
      std::any_of(specs_.begin(), specs_.end(), [](const ModelSpec& s) { return s.builtin && s.name == "Wall"; });
  if (!has_wall) specs_.push_back(wall_spec());
  std::map<std::string, std::string> entries;
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    const ModelSpec& s = specs_[i];
    if (auto [it, fresh] = by_name_.emplace(s.name, i); !fresh) {
      throw DescriptorError(s.entry_name, "type name '" + s.name + "' collides with model '" +
                                              specs_[it->second].entry_name + "'");
    }
    if (auto [it, fresh] = entries.emplace(s.entry_name, s.name); !fresh) {
      throw DescriptorError(s.entry_name, "duplicate model name");
    }
  }
  // a lowercase key shared by two type names resolves to nothing
  for (std::size_t i = 0; i < specs_.size(); ++i) {
    auto [it, fresh] = by_lower_.emplace(to_lower(specs_[i].name), i);
    if (!fresh) it->second.reset();
  }
}

const ModelSpec* Registry::find(std::string_view type_name) const {
  if (auto it = by_name_.find(type_name); it != by_name_.end()) return &specs_[it->second];
  if (!capitalized(type_name)) return nullptr;
  if (auto it = by_lower_.find(to_lower(type_name)); it != by_lower_.end() && it->second) {
    return &specs_[*it->second];
  }
  return nullptr;
}

const ModelSpec* Registry::find_entry(std::string_view entry_name) const {
  for (const auto& s : specs_) {
    if (s.entry_name == entry_name) return &s;
  }
  return nullptr;
}

void save_registry(const std::vector<ModelSpec>& specs, const fs::path& path, const std::string& descriptor_hash) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "version" << YAML::Value << kRegistryVersion;
  out << YAML::Key << "descriptor_hash" << YAML::Value << YAML::DoubleQuoted << descriptor_hash;
  out << YAML::Key << "models" << YAML::Value << YAML::BeginSeq;
  for (const auto& s : specs) {
    const ModelEntry& e = s.source.entry;
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << s.name;
    out << YAML::Key << "entry_name" << YAML::Value << YAML::DoubleQuoted << s.entry_name;
    out << YAML::Key << "kind" << YAML::Value << std::string(to_string(s.kind));
    out << YAML::Key << "builtin" << YAML::Value << (s.builtin ? "true" : "false");
    out << YAML::Key << "width" << YAML::Value << format_number(s.width);
    out << YAML::Key << "length" << YAML::Value << format_number(s.length);
    out << YAML::Key << "height" << YAML::Value << format_number(s.height);
    out << YAML::Key << "z_offset" << YAML::Value << format_number(s.z_offset);
    out << YAML::Key << "heading_offset" << YAML::Value << format_number(s.heading_offset);
    out << YAML::Key << "dynamic_size" << YAML::Value << (s.dynamic_size ? "true" : "false");
    out << YAML::Key << "collidable" << YAML::Value << (s.collidable ? "true" : "false");
    out << YAML::Key << "root_dir" << YAML::Value << YAML::DoubleQuoted << s.source.root_dir.string();
    out << YAML::Key << "sdf_path" << YAML::Value << YAML::DoubleQuoted
        << (s.source.sdf_path ? s.source.sdf_path->string() : std::string());
    out << YAML::Key << "source_hash" << YAML::Value << YAML::DoubleQuoted << s.source_hash;
    out << YAML::Key << "entry" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << e.name;
    out << YAML::Key << "type" << YAML::Value << std::string(to_string(e.kind));
    if (e.url) out << YAML::Key << "url" << YAML::Value << YAML::DoubleQuoted << *e.url;
    if (e.width) out << YAML::Key << "width" << YAML::Value << format_number(*e.width);
    if (e.length) out << YAML::Key << "length" << YAML::Value << format_number(*e.length);
    if (e.heading) out << YAML::Key << "heading" << YAML::Value << format_number(*e.heading);
    if (e.dynamic_size) out << YAML::Key << "dynamic_size" << YAML::Value << (*e.dynamic_size ? "true" : "false");
    out << YAML::EndMap;
    out << YAML::EndMap;
  }
  out << YAML::EndSeq << YAML::EndMap;
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  write_file_atomic(path, std::string(out.c_str()) + "\n");
}

LoadedRegistry load_registry_file(const fs::path& path) {
  if (!fs::exists(path)) throw RegistryError("registry file not found: " + path.string());
  const std::string text = read_file(path);
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw RegistryError("corrupt registry " + path.string() + ": " + e.what());
  }
  LoadedRegistry out;
  if (!root || root.IsNull()) return out;
  if (!root.IsMap()) throw RegistryError("corrupt registry " + path.string());
  if (!root["version"] || root["version"].Scalar() != std::to_string(kRegistryVersion)) {
    throw RegistryError("registry " + path.string() + " has an unsupported version; regenerate it with `models`");
  }
  if (root["descriptor_hash"]) out.descriptor_hash = root["descriptor_hash"].Scalar();
  const YAML::Node models = root["models"];
  if (!models) return out;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const YAML::Node m = models[i];
    const std::string where = path.string() + ": models[" + std::to_string(i) + "]";
    ModelSpec s;
    s.name = req_scalar(m, "name", where);
    s.entry_name = req_scalar(m, "entry_name", where);
    auto kind = model_kind_from_string(req_scalar(m, "kind", where));
    if (!kind) throw RegistryError(where + ": bad kind");
    s.kind = *kind;
    s.builtin = req_bool(m, "builtin", where);
    s.width = req_number(m, "width", where);
    s.length = req_number(m, "length", where);
    s.height = req_number(m, "height", where);
    s.z_offset = req_number(m, "z_offset", where);
    s.heading_offset = req_number(m, "heading_offset", where);
    s.dynamic_size = req_bool(m, "dynamic_size", where);
    s.collidable = req_bool(m, "collidable", where);
    s.source.root_dir = req_scalar(m, "root_dir", where);
    if (const std::string sdf = req_scalar(m, "sdf_path", where); !sdf.empty()) s.source.sdf_path = sdf;
    s.source_hash = req_scalar(m, "source_hash", where);
    const YAML::Node e = m["entry"];
    if (!e || !e.IsMap()) throw RegistryError(where + ": missing 'entry'");
    s.source.entry.name = req_scalar(e, "name", where);
    auto ekind = model_kind_from_string(req_scalar(e, "type", where));
    if (!ekind) throw RegistryError(where + ": bad entry type");
    s.source.entry.kind = *ekind;
    if (e["url"]) s.source.entry.url = e["url"].Scalar();
    s.source.entry.width = opt_number(e, "width");
    s.source.entry.length = opt_number(e, "length");
    s.source.entry.heading = opt_number(e, "heading");
    if (e["dynamic_size"]) s.source.entry.dynamic_size = e["dynamic_size"].Scalar() == "true";

    if (s.source.sdf_path) {
      if (!fs::exists(*s.source.sdf_path)) {
        throw StaleRegistryError("registry is stale: " + s.source.sdf_path->string() +
                                 " no longer exists; regenerate it with `models`");
      }
      if (file_hash(*s.source.sdf_path) != s.source_hash) {
        throw StaleRegistryError("registry is stale: " + s.source.sdf_path->string() +
                                 " changed since the registry was built; regenerate it with `models`");
      }
    }
    out.specs.push_back(std::move(s));
  }
  return out;
}

std::vector<ModelSpec> load_registry(const fs::path& path) { return load_registry_file(path).specs; }

}  // namespace scenegen
