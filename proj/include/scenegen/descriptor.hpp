#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace scenegen {

enum class ModelKind { GazeboModel, CustomModel, MissionOnly };

std::string_view to_string(ModelKind kind);
std::optional<ModelKind> model_kind_from_string(std::string_view text);

/// One model a scenario may instantiate, as declared by the user.
struct ModelEntry {
  std::string name;
  ModelKind kind = ModelKind::GazeboModel;
  std::optional<std::string> url;      // CUSTOM_MODEL only
  std::optional<double> width;         // meters, x-extent override
  std::optional<double> length;        // meters, y-extent override
  std::optional<double> heading;       // radians, model heading offset
  std::optional<bool> dynamic_size;    // overrides the geometric classification

  bool operator==(const ModelEntry&) const = default;
};

struct ModelDescriptor {
  std::vector<ModelEntry> models;  // declaration order is processing order
  std::optional<std::string> models_dir;
  std::optional<std::string> world;

  const ModelEntry* find(std::string_view name) const;
  bool operator==(const ModelDescriptor&) const = default;
};

/// Parses and validates a descriptor document. Throws DescriptorError carrying
/// the offending key path for every rejection.
ModelDescriptor parse_descriptor(std::string_view yaml_text);

/// Loads a descriptor from disk. Relative models_dir/world paths are left as
/// written; callers resolve them against the descriptor's directory.
ModelDescriptor load_descriptor(const std::string& path);

std::string serialize_descriptor(const ModelDescriptor& descriptor);

}  // namespace scenegen
