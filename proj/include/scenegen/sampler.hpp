#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "scenegen/dsl.hpp"
#include "scenegen/rect.hpp"
#include "scenegen/registry.hpp"

namespace scenegen {

/// Seeded generator with platform-independent derived distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1).
  double unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  /// Uniform in [lo, hi]; returns lo when lo == hi.
  double uniform(double lo, double hi) { return lo + (hi - lo) * unit(); }
  std::size_t index(std::size_t n) { return static_cast<std::size_t>(unit() * static_cast<double>(n)); }

 private:
  std::mt19937_64 engine_;
};

inline constexpr double kMinScale = 0.5;
inline constexpr double kMaxScale = 2.0;
inline constexpr double kWallThickness = 0.1;
inline constexpr double kWallHeight = 1.0;
inline constexpr int kDefaultMaxAttempts = 2000;
inline constexpr double kDefaultWorkspaceSize = 10.0;

struct Dims {
  double width = 0, length = 0, height = 0;
  bool operator==(const Dims&) const = default;
};

struct SceneObject {
  std::string instance_name;
  ModelSpec spec;
  Point2 position;
  double z = 0;        // elevation of the footprint's bottom
  double heading = 0;  // normalized to (-pi, pi]
  double scale = 1;
  bool allow_collisions = false;
  bool mission_only = false;
  std::optional<Dims> custom_dims;  // walls
  bool is_ego = false;
  bool room_wall = false;  // created by create_room; walls never collide with each other

  double width() const { return custom_dims ? custom_dims->width : scale * spec.width; }
  double length() const { return custom_dims ? custom_dims->length : scale * spec.length; }
  double height() const { return custom_dims ? custom_dims->height : scale * spec.height; }

  bool operator==(const SceneObject&) const = default;
};

struct ConcreteScene {
  std::vector<SceneObject> objects;
  OrientedRect workspace;
  std::uint64_t seed = 0;
  int attempts = 0;

  bool operator==(const ConcreteScene&) const = default;
};

using Value = std::variant<double, bool, Point2, OrientedRect>;

std::string describe(const Value& v);

/// Bindings visible while evaluating one sampling attempt.
struct Env {
  std::map<std::string, Value, std::less<>> vars;
  std::map<std::string, std::size_t, std::less<>> object_index;
  std::vector<SceneObject> objects;
  OrientedRect workspace;
  std::optional<std::size_t> ego;

  Env();
  const SceneObject* object(std::string_view name) const;
};

Value evaluate_expr(const dsl::Expr& e, const Env& env, Rng& rng);

/// Resolves an instance's specifiers into a placed object. Specifier
/// expressions are evaluated left to right; `with` and `facing` are applied
/// before the position specifier that may depend on them.
SceneObject place_instance(const dsl::stmt::Instance& decl, const ModelSpec& spec, const Env& env, Rng& rng);

OrientedRect rect_of(const SceneObject& o);

std::vector<SceneObject> expand_create_room(const dsl::stmt::CreateRoom& room, const Env& env, Rng& rng,
                                            const ModelSpec& wall, int room_index = 0);

/// Description of the first broken collision/containment constraint, if any.
std::optional<std::string> first_violation(const ConcreteScene& scene);

bool collision_exempt(const SceneObject& a, const SceneObject& b);

ConcreteScene sample_scene(const dsl::ScenarioAst& ast, const Registry& registry, std::uint64_t seed,
                           int max_attempts = kDefaultMaxAttempts);

dsl::TypeResolver type_resolver(const Registry& registry);

}  // namespace scenegen
