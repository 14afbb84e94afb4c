#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "scenegen/sampler.hpp"

namespace fs = std::filesystem;

namespace testing {

fs::path fixture(const std::string& rel);

/// Registry built offline from a fixture descriptor and its local models.
scenegen::Registry fixture_registry(const std::string& descriptor_rel);

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const fs::path& path() const { return path_; }
  fs::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  fs::path path_;
};

void write_text(const fs::path& p, const std::string& text);

// ---------------------------------------------------------------------------
// Plain 3D math, independent of the library's Eigen-based poses.

struct V3 {
  double x, y, z;
};

struct RawPose {
  double x, y, z, roll, pitch, yaw;
};

/// Rotates by roll about x, then pitch about y, then yaw about z, then translates.
V3 apply_pose(const RawPose& p, V3 v);

struct Bounds3 {
  V3 min{1e300, 1e300, 1e300};
  V3 max{-1e300, -1e300, -1e300};
  void add(V3 v);
};

// ---------------------------------------------------------------------------
// Random SDF models

struct RawGeometry {
  enum Kind { Box, Cylinder, Sphere } kind;
  double a = 0, b = 0, c = 0;  // box sizes / cylinder radius,length / sphere radius
  RawPose link, collision;
};

std::string sdf_for(const std::vector<RawGeometry>& geoms, const std::string& name = "random_model");

std::vector<RawGeometry> random_geometries(std::mt19937_64& rng, bool boxes_only, int count);

/// Extremes of `per_shape` random surface points of every geometry, each point
/// pushed through the collision pose and then the link pose.
Bounds3 sampled_bounds(const std::vector<RawGeometry>& geoms, std::mt19937_64& rng, std::size_t per_shape);

/// Extremes of every box corner pushed through both poses.
Bounds3 box_corner_bounds(const std::vector<RawGeometry>& geoms);

// ---------------------------------------------------------------------------
// Meshes

struct Triangle {
  std::array<V3, 3> v;
};

std::vector<Triangle> sample_mesh();
void write_stl_ascii(const fs::path& p, const std::vector<Triangle>& tris);
void write_stl_binary(const fs::path& p, const std::vector<Triangle>& tris);
void write_obj(const fs::path& p, const std::vector<Triangle>& tris);
/// Collada with the given unit (meters per unit); coordinates are stored in
/// Y_UP axes when `y_up`.
void write_dae(const fs::path& p, const std::vector<Triangle>& tris, double meter, bool y_up);

// ---------------------------------------------------------------------------
// 2D oracles

struct Poly {
  std::vector<std::array<double, 2>> pts;  // counterclockwise
};

Poly rect_poly(double cx, double cy, double heading, double half_w, double half_l);

/// Signed distance from the origin to the Minkowski difference a - b:
/// positive gap when disjoint, negative penetration depth when overlapping.
double signed_separation(const Poly& a, const Poly& b);

/// Overlap by sampling: points spread along both perimeters (plus the centers)
/// tested for strict containment in the other rectangle.
bool monte_carlo_overlap(const Poly& a, const Poly& b, std::size_t samples, std::mt19937_64& rng);

double intersection_area(const Poly& a, const Poly& b);

/// Independent re-check of a sampled scene: polygon clipping for overlaps,
/// local coordinates for containment. Empty when the scene is valid.
std::vector<std::string> recheck_scene(const scenegen::ConcreteScene& scene);

}  // namespace testing

namespace testing {

using FileList = std::vector<std::pair<std::string, std::string>>;  // path, contents

std::string make_tar_gz(const FileList& files);
/// Zip with stored (uncompressed) entries.
std::string make_zip(const FileList& files);

}  // namespace testing
