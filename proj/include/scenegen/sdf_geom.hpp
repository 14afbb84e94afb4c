#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Geometry>

namespace scenegen {

using Vec3 = Eigen::Vector3d;

/// SDF pose: translation plus fixed-axis roll/pitch/yaw (R = Rz·Ry·Rx).
struct Pose {
  double x = 0, y = 0, z = 0;
  double roll = 0, pitch = 0, yaw = 0;

  Vec3 translation() const { return {x, y, z}; }
  Eigen::Matrix3d rotation() const;
  /// Maps a point from this pose's child frame into its parent frame.
  Vec3 apply(const Vec3& p) const { return rotation() * p + translation(); }

  static Pose from(const Vec3& t, const Eigen::Matrix3d& r);
  static Pose parse(std::string_view text);

  bool operator==(const Pose&) const = default;
};

/// parent ∘ child: `child` expressed in the frame described by `parent`.
Pose compose(const Pose& parent, const Pose& child);

namespace shape {
struct Empty {
  bool operator==(const Empty&) const = default;
};
struct Box {
  double sx, sy, sz;
  bool operator==(const Box&) const = default;
};
struct Cylinder {
  double radius, length;
  bool operator==(const Cylinder&) const = default;
};
struct Sphere {
  double radius;
  bool operator==(const Sphere&) const = default;
};
struct Mesh {
  std::string uri;
  Vec3 scale = Vec3::Ones();
  bool operator==(const Mesh&) const = default;
};
}  // namespace shape

using Shape = std::variant<shape::Empty, shape::Box, shape::Cylinder, shape::Sphere, shape::Mesh>;

struct CollisionGeometry {
  Shape shape;
  Pose pose;  // link pose composed with the collision pose, in the model frame
  std::string name;

  bool operator==(const CollisionGeometry&) const = default;
};

struct ParsedModel {
  std::string name;
  std::vector<CollisionGeometry> collisions;
  std::vector<CollisionGeometry> visuals;
};

/// Reads every <collision> (and, for emission, every <visual>) of an SDF model.
ParsedModel parse_model_sdf(std::string_view xml_text);

struct Aabb3 {
  Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

  static Aabb3 empty() { return {}; }
  bool is_empty() const { return !(min.x() <= max.x()); }
  void extend(const Vec3& p) {
    min = min.cwiseMin(p);
    max = max.cwiseMax(p);
  }
  void extend(const Aabb3& b) {
    if (b.is_empty()) return;
    extend(b.min);
    extend(b.max);
  }
  Vec3 extent() const { return is_empty() ? Vec3::Zero() : Vec3(max - min); }
  bool contains(const Aabb3& inner, double tol = 0) const;
};

/// Maps a mesh URI (model://name/..., file://..., or a relative path) to a file.
using MeshResolver = std::function<std::filesystem::path(const std::string& uri)>;

/// Resolver for meshes of a model rooted at `model_root`; `model://other/...`
/// resolves to a sibling directory of the root.
MeshResolver model_mesh_resolver(const std::filesystem::path& model_root);

/// Model-frame bounding box of one geometry. Boxes transform their 8 corners;
/// spheres and cylinders use their exact rotated extents; meshes transform every
/// scaled vertex.
Aabb3 geometry_bbox(const CollisionGeometry& g, const MeshResolver& resolve_mesh = {});

std::vector<Vec3> load_mesh_vertices(const std::filesystem::path& path);

struct FootprintInfo {
  double length = 0;    // y-extent
  double width = 0;     // x-extent
  double height = 0;    // z-extent
  double z_offset = 0;  // min z of the model's box
  bool simple_single_geometry = false;
  bool empty = true;    // every geometry was Empty (or there were none)

  bool operator==(const FootprintInfo&) const = default;
};

FootprintInfo model_footprint(const std::vector<CollisionGeometry>& geoms,
                              const MeshResolver& resolve_mesh = {});

bool classify_dynamic_size(const FootprintInfo& info);

std::string_view shape_name(const Shape& s);

}  // namespace scenegen
