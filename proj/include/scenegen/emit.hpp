#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scenegen/registry.hpp"
#include "scenegen/sampler.hpp"

namespace scenegen {

namespace fs = std::filesystem;

inline constexpr const char* kSdfVersion = "1.6";

/// A model directory destined for `<out>/models/<name>`: either generated
/// files or a copy of an existing directory.
struct ModelDirOutput {
  std::string name;
  std::optional<fs::path> copy_from;
  std::map<std::string, std::string> files;  // relative path -> contents

  bool operator==(const ModelDirOutput&) const = default;
};

struct WorldDocument {
  std::string xml;
  std::vector<ModelDirOutput> referenced_models;
};

std::string default_world_template();

/// Builds the world file. Unscaled models enter through `<include>`, scaled
/// models through generated directories, walls as inline static models.
WorldDocument emit_world(const ConcreteScene& scene, const std::optional<std::string>& template_text = std::nullopt);

/// "<entry>_scaled_<scale with 2 decimals>"
std::string scaled_model_name(const std::string& entry_name, double scale);

/// Copies the model's SDF with every geometry and pose offset multiplied by
/// `scale`. `name` defaults to scaled_model_name().
ModelDirOutput emit_scaled_model(const ModelSpec& spec, double scale, const std::string& name = "");

std::string model_config_xml(const std::string& name, const std::string& description);

std::string emit_mission_yaml(const ConcreteScene& scene);

std::string emit_plot_svg(const ConcreteScene& scene);

/// scene.json: everything needed to redraw or inspect a scene without resampling.
std::string scene_to_json(const ConcreteScene& scene);
ConcreteScene scene_from_json(const std::string& text);

struct SceneOutputs {
  WorldDocument world;
  std::string mission;
  std::string svg;
  std::string record;
};

SceneOutputs emit_scene(const ConcreteScene& scene, const std::optional<std::string>& template_text = std::nullopt);

/// Writes scene.world, models/, mission.yaml, scene.svg and scene.json.
/// Refuses a non-empty out_dir unless `force`, which replaces only those outputs.
void write_output_tree(const SceneOutputs& outputs, const fs::path& out_dir, bool force);

std::string model_path_hint(const fs::path& out_dir);

}  // namespace scenegen
