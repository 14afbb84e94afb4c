#include "scenegen/descriptor.hpp"

#include <cmath>
#include <set>

#include <yaml-cpp/yaml.h>

#include "scenegen/error.hpp"
#include "scenegen/util.hpp"

namespace scenegen {
namespace {

const std::set<std::string> kTopKeys = {"models", "models_dir", "world"};
const std::set<std::string> kEntryKeys = {"name",   "type",    "url",    "width",
                                          "length", "heading", "dynamic_size"};

std::string entry_path(std::size_t index, std::string_view key = {}) {
  std::string path = "models[" + std::to_string(index) + "]";
  if (!key.empty()) path += "." + std::string(key);
  return path;
}

std::string scalar(const YAML::Node& node, const std::string& path) {
  if (!node.IsScalar()) throw DescriptorError(path, "expected a scalar");
  return node.Scalar();
}

double positive_number(const YAML::Node& node, const std::string& path) {
  auto value = parse_number(scalar(node, path));
  if (!value || !std::isfinite(*value)) throw DescriptorError(path, "expected a number");
  if (!(*value > 0.0)) throw DescriptorError(path, "must be > 0");
  return *value;
}

double finite_number(const YAML::Node& node, const std::string& path) {
  auto value = parse_number(scalar(node, path));
  if (!value || !std::isfinite(*value)) throw DescriptorError(path, "expected a number");
  return *value;
}

bool boolean(const YAML::Node& node, const std::string& path) {
  const std::string text = to_lower(scalar(node, path));
  if (text == "true" || text == "yes" || text == "on") return true;
  if (text == "false" || text == "no" || text == "off") return false;
  throw DescriptorError(path, "expected a boolean");
}

ModelEntry parse_entry(const YAML::Node& node, std::size_t index) {
  if (!node.IsMap()) throw DescriptorError(entry_path(index), "expected a mapping");
  for (const auto& kv : node) {
    const std::string key = kv.first.as<std::string>();
    if (!kEntryKeys.count(key)) throw DescriptorError(entry_path(index, key), "unknown key");
  }
  ModelEntry entry;
  if (!node["name"]) throw DescriptorError(entry_path(index, "name"), "missing required key");
  entry.name = scalar(node["name"], entry_path(index, "name"));
  if (entry.name.empty()) throw DescriptorError(entry_path(index, "name"), "must be nonempty");

  if (!node["type"]) throw DescriptorError(entry_path(index, "type"), "missing required key");
  const std::string type = scalar(node["type"], entry_path(index, "type"));
  auto kind = model_kind_from_string(type);
  if (!kind) {
    throw DescriptorError(entry_path(index, "type"),
                          "unknown model type '" + type + "' for model '" + entry.name + "'");
  }
  entry.kind = *kind;

  if (node["url"]) {
    entry.url = scalar(node["url"], entry_path(index, "url"));
    if (entry.kind != ModelKind::CustomModel) {
      throw DescriptorError(entry_path(index, "url"), "only valid for CUSTOM_MODEL entries");
    }
  }
  if (node["width"]) entry.width = positive_number(node["width"], entry_path(index, "width"));
  if (node["length"]) entry.length = positive_number(node["length"], entry_path(index, "length"));
  if (node["heading"]) entry.heading = finite_number(node["heading"], entry_path(index, "heading"));
  if (node["dynamic_size"]) {
    entry.dynamic_size = boolean(node["dynamic_size"], entry_path(index, "dynamic_size"));
  }
  return entry;
}

}  // namespace

std::string_view to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::GazeboModel: return "GAZEBO_MODEL";
    case ModelKind::CustomModel: return "CUSTOM_MODEL";
    case ModelKind::MissionOnly: return "MISSION_ONLY";
  }
  return "?";
}

std::optional<ModelKind> model_kind_from_string(std::string_view text) {
  if (text == "GAZEBO_MODEL") return ModelKind::GazeboModel;
  if (text == "CUSTOM_MODEL") return ModelKind::CustomModel;
  if (text == "MISSION_ONLY") return ModelKind::MissionOnly;
  return std::nullopt;
}

const ModelEntry* ModelDescriptor::find(std::string_view name) const {
  for (const auto& m : models) {
    if (m.name == name) return &m;
  }
  return nullptr;
}

ModelDescriptor parse_descriptor(std::string_view yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(yaml_text));
  } catch (const YAML::Exception& e) {
    throw DescriptorError("", std::string("malformed YAML: ") + e.what());
  }
  if (!root.IsMap()) throw DescriptorError("", "descriptor must be a mapping with a 'models' key");
  for (const auto& kv : root) {
    const std::string key = kv.first.as<std::string>();
    if (!kTopKeys.count(key)) throw DescriptorError(key, "unknown key");
  }

  ModelDescriptor d;
  const YAML::Node models = root["models"];
  if (!models) throw DescriptorError("models", "missing required key");
  if (!models.IsSequence()) throw DescriptorError("models", "expected a list");

  std::set<std::string> seen;
  for (std::size_t i = 0; i < models.size(); ++i) {
    ModelEntry entry = parse_entry(models[i], i);
    if (!seen.insert(entry.name).second) {
      throw DescriptorError(entry_path(i, "name"), "duplicate model name '" + entry.name + "'");
    }
    d.models.push_back(std::move(entry));
  }
  if (root["models_dir"]) d.models_dir = scalar(root["models_dir"], "models_dir");
  if (root["world"]) d.world = scalar(root["world"], "world");

  for (std::size_t i = 0; i < d.models.size(); ++i) {
    const auto& m = d.models[i];
    if (m.kind == ModelKind::CustomModel && !m.url && !d.models_dir) {
      throw DescriptorError(entry_path(i),
                            "CUSTOM_MODEL '" + m.name + "' has no url and models_dir is not set");
    }
  }
  return d;
}

ModelDescriptor load_descriptor(const std::string& path) {
  std::string text;
  try {
    text = read_file(path);
  } catch (const Error&) {
    throw Error(ErrorKind::Io, "cannot read descriptor " + path);
  }
  return parse_descriptor(text);
}

std::string serialize_descriptor(const ModelDescriptor& descriptor) {
  YAML::Emitter out;
  out << YAML::BeginMap;
  out << YAML::Key << "models" << YAML::Value << YAML::BeginSeq;
  for (const auto& m : descriptor.models) {
    out << YAML::BeginMap;
    out << YAML::Key << "name" << YAML::Value << YAML::DoubleQuoted << m.name;
    out << YAML::Key << "type" << YAML::Value << std::string(to_string(m.kind));
    if (m.url) out << YAML::Key << "url" << YAML::Value << YAML::DoubleQuoted << *m.url;
    if (m.width) out << YAML::Key << "width" << YAML::Value << format_number(*m.width);
    if (m.length) out << YAML::Key << "length" << YAML::Value << format_number(*m.length);
    if (m.heading) out << YAML::Key << "heading" << YAML::Value << format_number(*m.heading);
    if (m.dynamic_size) {
      out << YAML::Key << "dynamic_size" << YAML::Value << (*m.dynamic_size ? "true" : "false");
    }
    out << YAML::EndMap;
  }
  out << YAML::EndSeq;
  if (descriptor.models_dir) {
    out << YAML::Key << "models_dir" << YAML::Value << YAML::DoubleQuoted << *descriptor.models_dir;
  }
  if (descriptor.world) {
    out << YAML::Key << "world" << YAML::Value << YAML::DoubleQuoted << *descriptor.world;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace scenegen
