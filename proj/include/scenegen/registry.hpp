#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scenegen/descriptor.hpp"
#include "scenegen/model_acquire.hpp"

namespace scenegen {

/// A placement model the scenario language can instantiate.
struct ModelSpec {
  std::string name;        // DSL type name, e.g. CafeTable
  std::string entry_name;  // descriptor name, e.g. cafe_table; used for emission
  ModelKind kind = ModelKind::GazeboModel;
  bool builtin = false;
  double width = 0;   // x-extent, meters
  double length = 0;  // y-extent, meters
  double height = 0;
  double z_offset = 0;
  double heading_offset = 0;  // radians
  bool dynamic_size = false;
  bool collidable = true;  // false when every collision geometry is empty
  ResolvedModel source;
  std::string source_hash;  // hash of the SDF file the footprint came from

  bool mission_only() const { return kind == ModelKind::MissionOnly; }
  bool operator==(const ModelSpec&) const = default;
};

inline constexpr double kMissionDefaultSize = 0.1;
inline constexpr int kRegistryVersion = 1;

/// cafe_table -> CafeTable, LampAndStand -> LampAndStand.
std::string dsl_type_name(std::string_view entry_name);

ModelSpec build_model_spec(const ModelEntry& entry, const ResolvedModel& resolved);

/// The built-in resizable 1 m unit box used for room walls.
ModelSpec wall_spec();

/// Immutable lookup over model specs. Always contains Wall.
class Registry {
 public:
  Registry() : Registry(std::vector<ModelSpec>{}) {}
  explicit Registry(std::vector<ModelSpec> specs);

  /// Exact type name, or a unique case-insensitive match for capitalized names
  /// (so Lampandstand finds LampAndStand).
  const ModelSpec* find(std::string_view type_name) const;
  const ModelSpec* find_entry(std::string_view entry_name) const;
  const std::vector<ModelSpec>& specs() const { return specs_; }

 private:
  std::vector<ModelSpec> specs_;
  std::map<std::string, std::size_t, std::less<>> by_name_;
  std::map<std::string, std::optional<std::size_t>, std::less<>> by_lower_;
};

std::string file_hash(const std::filesystem::path& path);

/// Persists specs as YAML. `descriptor_hash` lets callers detect that the
/// descriptor changed since the registry was built.
void save_registry(const std::vector<ModelSpec>& specs, const std::filesystem::path& path,
                   const std::string& descriptor_hash = "");

struct LoadedRegistry {
  std::vector<ModelSpec> specs;
  std::string descriptor_hash;
};

/// Throws StaleRegistryError when a recorded SDF file changed or vanished.
LoadedRegistry load_registry_file(const std::filesystem::path& path);
std::vector<ModelSpec> load_registry(const std::filesystem::path& path);

}  // namespace scenegen
