#include "scenegen/sdf_geom.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <sstream>

#include "scenegen/error.hpp"
#include "scenegen/util.hpp"
#include "scenegen/xml.hpp"

namespace scenegen {
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

double positive_child(const xml::Tree& node, const char* tag, const std::string& shape) {
  auto child = node.get_child_optional(tag);
  if (!child) throw GeometryError(shape + " geometry is missing <" + tag + ">");
  auto v = parse_number(xml::trimmed_text(*child));
  if (!v || !std::isfinite(*v) || !(*v > 0)) {
    throw GeometryError(shape + " <" + tag + "> must be a positive number");
  }
  return *v;
}

Vec3 parse_vec3(const std::string& text, const std::string& what) {
  std::istringstream in(text);
  std::vector<double> values;
  std::string tok;
  while (in >> tok) {
    auto v = parse_number(tok);
    if (!v || !std::isfinite(*v)) throw GeometryError("bad number '" + tok + "' in " + what);
    values.push_back(*v);
  }
  if (values.size() != 3) throw GeometryError(what + " needs 3 numbers");
  return {values[0], values[1], values[2]};
}

// Returns nullopt for the shapes this tool cannot footprint when `strict` is false.
std::optional<Shape> parse_geometry(const xml::Tree& geometry, bool strict) {
  for (const auto& [tag, node] : geometry) {
    if (tag == "<xmlattr>" || tag == "<xmlcomment>") continue;
    if (tag == "empty") return shape::Empty{};
    if (tag == "box") {
      auto size = node.get_child_optional("size");
      if (!size) throw GeometryError("box geometry is missing <size>");
      Vec3 s = parse_vec3(xml::trimmed_text(*size), "box <size>");
      if (!(s.minCoeff() > 0)) throw GeometryError("box <size> must be positive");
      return shape::Box{s.x(), s.y(), s.z()};
    }
    if (tag == "cylinder") {
      return shape::Cylinder{positive_child(node, "radius", "cylinder"),
                             positive_child(node, "length", "cylinder")};
    }
    if (tag == "sphere") return shape::Sphere{positive_child(node, "radius", "sphere")};
    if (tag == "mesh") {
      shape::Mesh mesh;
      auto uri = node.get_child_optional("uri");
      if (!uri) throw GeometryError("mesh geometry is missing <uri>");
      mesh.uri = xml::trimmed_text(*uri);
      if (auto scale = node.get_child_optional("scale")) {
        mesh.scale = parse_vec3(xml::trimmed_text(*scale), "mesh <scale>");
      }
      return mesh;
    }
    if (strict) throw UnsupportedGeometry(tag);
    return std::nullopt;
  }
  if (strict) throw GeometryError("<geometry> element has no shape");
  return std::nullopt;
}

Pose pose_of(const xml::Tree& node) {
  auto p = node.get_child_optional("pose");
  if (!p) return {};
  Pose pose = Pose::parse(xml::trimmed_text(*p));
  if (xml::attr(*p, "degrees").value_or("false") == "true") {
    pose.roll *= kPi / 180;
    pose.pitch *= kPi / 180;
    pose.yaw *= kPi / 180;
  }
  return pose;
}

fs::path lower_ext(const fs::path& p) { return to_lower(p.extension().string()); }

// --- meshes ---------------------------------------------------------------

std::vector<Vec3> load_stl(const fs::path& path) {
  const std::string data = read_file(path);
  std::vector<Vec3> out;
  if (data.size() >= 84) {
    std::uint32_t count = 0;
    std::memcpy(&count, data.data() + 80, 4);
    if (data.size() == 84 + std::size_t(count) * 50) {
      out.reserve(std::size_t(count) * 3);
      for (std::uint32_t t = 0; t < count; ++t) {
        const char* tri = data.data() + 84 + std::size_t(t) * 50 + 12;
        for (int v = 0; v < 3; ++v) {
          float xyz[3];
          std::memcpy(xyz, tri + v * 12, 12);
          out.emplace_back(xyz[0], xyz[1], xyz[2]);
        }
      }
      return out;
    }
  }
  if (data.compare(0, 5, "solid") != 0) throw MeshError("corrupt or truncated STL file " + path.string());
  std::istringstream in(data);
  std::string tok;
  while (in >> tok) {
    if (tok != "vertex") continue;
    std::string a, b, c;
    if (!(in >> a >> b >> c)) throw MeshError("truncated ASCII STL vertex in " + path.string());
    auto x = parse_number(a), y = parse_number(b), z = parse_number(c);
    if (!x || !y || !z) throw MeshError("bad ASCII STL vertex in " + path.string());
    out.emplace_back(*x, *y, *z);
  }
  if (out.empty()) throw MeshError("STL file " + path.string() + " has no vertices");
  return out;
}

std::vector<Vec3> load_obj(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::vector<Vec3> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.size() < 2 || line[0] != 'v' || (line[1] != ' ' && line[1] != '\t')) continue;
    std::istringstream ls(line.substr(2));
    std::string a, b, c;
    if (!(ls >> a >> b >> c)) throw MeshError(path.string() + ":" + std::to_string(lineno) + ": truncated vertex");
    auto x = parse_number(a), y = parse_number(b), z = parse_number(c);
    if (!x || !y || !z) throw MeshError(path.string() + ":" + std::to_string(lineno) + ": bad vertex");
    out.emplace_back(*x, *y, *z);
  }
  if (out.empty()) throw MeshError("OBJ file " + path.string() + " has no vertices");
  return out;
}

void collect(const xml::Tree& node, const std::string& tag, std::vector<const xml::Tree*>& out) {
  for (const auto& [t, child] : node) {
    if (t == tag) out.push_back(&child);
    if (t != "<xmlattr>") collect(child, tag, out);
  }
}

std::vector<Vec3> load_collada(const fs::path& path) {
  const auto doc = xml::parse(read_file(path), path.string());
  auto root = doc.get_child_optional("COLLADA");
  if (!root) throw MeshError(path.string() + " is not a COLLADA document");

  double unit = 1.0;
  bool y_up = false;
  if (auto asset = root->get_child_optional("asset")) {
    if (auto u = asset->get_child_optional("unit")) {
      if (auto m = xml::attr(*u, "meter")) unit = parse_number(*m).value_or(1.0);
    }
    if (auto up = asset->get_child_optional("up_axis")) y_up = xml::trimmed_text(*up) == "Y_UP";
  }

  std::vector<const xml::Tree*> meshes;
  collect(*root, "mesh", meshes);
  std::vector<Vec3> out;
  for (const xml::Tree* mesh : meshes) {
    std::string position_id;
    if (auto vertices = mesh->get_child_optional("vertices")) {
      for (const auto& [t, input] : *vertices) {
        if (t == "input" && xml::attr(input, "semantic") == "POSITION") {
          position_id = xml::attr(input, "source").value_or("");
          if (!position_id.empty() && position_id.front() == '#') position_id.erase(0, 1);
        }
      }
    }
    for (const auto& [t, source] : *mesh) {
      if (t != "source") continue;
      const std::string id = xml::attr(source, "id").value_or("");
      const bool is_position = position_id.empty() ? to_lower(id).find("position") != std::string::npos
                                                   : id == position_id;
      if (!is_position) continue;
      auto fa = source.get_child_optional("float_array");
      if (!fa) continue;
      std::size_t stride = 3;
      if (auto acc = source.get_child_optional("technique_common.accessor")) {
        stride = static_cast<std::size_t>(parse_number(xml::attr(*acc, "stride").value_or("3")).value_or(3));
      }
      if (stride < 3) throw MeshError("COLLADA position stride < 3 in " + path.string());
      std::istringstream in(xml::trimmed_text(*fa));
      std::vector<double> values;
      std::string tok;
      while (in >> tok) {
        auto v = parse_number(tok);
        if (!v) throw MeshError("bad number in COLLADA float_array of " + path.string());
        values.push_back(*v);
      }
      if (values.size() % stride != 0) throw MeshError("truncated COLLADA float_array in " + path.string());
      for (std::size_t i = 0; i + 2 < values.size(); i += stride) {
        Vec3 p(values[i], values[i + 1], values[i + 2]);
        if (y_up) p = Vec3(p.x(), -p.z(), p.y());
        out.push_back(p * unit);
      }
    }
  }
  if (out.empty()) throw MeshError("COLLADA file " + path.string() + " has no position arrays");
  return out;
}

}  // namespace

Eigen::Matrix3d Pose::rotation() const {
  return (Eigen::AngleAxisd(yaw, Vec3::UnitZ()) * Eigen::AngleAxisd(pitch, Vec3::UnitY()) *
          Eigen::AngleAxisd(roll, Vec3::UnitX()))
      .toRotationMatrix();
}

Pose Pose::from(const Vec3& t, const Eigen::Matrix3d& r) {
  Pose p;
  p.x = t.x();
  p.y = t.y();
  p.z = t.z();
  const double s = std::clamp(-r(2, 0), -1.0, 1.0);
  p.pitch = std::asin(s);
  if (std::abs(s) < 1.0 - 1e-12) {
    p.roll = std::atan2(r(2, 1), r(2, 2));
    p.yaw = std::atan2(r(1, 0), r(0, 0));
  } else {
    p.roll = 0;
    p.yaw = std::atan2(-r(0, 1), r(1, 1));
  }
  return p;
}

Pose Pose::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::vector<double> v;
  std::string tok;
  while (in >> tok) {
    auto n = parse_number(tok);
    if (!n || !std::isfinite(*n)) throw GeometryError("bad number '" + tok + "' in <pose>");
    v.push_back(*n);
  }
  if (v.size() != 6) throw GeometryError("<pose> needs 6 numbers, got " + std::to_string(v.size()));
  return Pose{v[0], v[1], v[2], v[3], v[4], v[5]};
}

Pose compose(const Pose& parent, const Pose& child) {
  const bool parent_unrotated = parent.roll == 0 && parent.pitch == 0 && parent.yaw == 0;
  const bool child_unrotated = child.roll == 0 && child.pitch == 0 && child.yaw == 0;
  if (parent_unrotated) {
    Pose p = child;
    p.x += parent.x;
    p.y += parent.y;
    p.z += parent.z;
    return p;
  }
  const Eigen::Matrix3d r = parent.rotation();
  const Vec3 t = r * child.translation() + parent.translation();
  if (child_unrotated) {
    Pose p = parent;
    p.x = t.x();
    p.y = t.y();
    p.z = t.z();
    return p;
  }
  return Pose::from(t, r * child.rotation());
}

bool Aabb3::contains(const Aabb3& inner, double tol) const {
  if (inner.is_empty()) return true;
  if (is_empty()) return false;
  return (min.array() <= inner.min.array() + tol).all() && (inner.max.array() <= max.array() + tol).all();
}

std::string_view shape_name(const Shape& s) {
  static constexpr std::string_view kNames[] = {"empty", "box", "cylinder", "sphere", "mesh"};
  return kNames[s.index()];
}

ParsedModel parse_model_sdf(std::string_view xml_text) {
  const auto doc = xml::parse(xml_text, "SDF model");
  auto sdf = doc.get_child_optional("sdf");
  if (!sdf) throw GeometryError("SDF document has no <sdf> root");
  auto model = sdf->get_child_optional("model");
  if (!model) throw GeometryError("SDF document has no <model>");

  ParsedModel out;
  out.name = xml::attr(*model, "name").value_or("");
  for (const auto& [tag, node] : *model) {
    if (tag == "model" || tag == "include") {
      throw GeometryError("nested <" + tag + "> elements are not supported");
    }
    if (tag != "link") continue;
    const Pose link_pose = pose_of(node);
    for (const auto& [ctag, child] : node) {
      if (ctag != "collision" && ctag != "visual") continue;
      auto geometry = child.get_child_optional("geometry");
      if (!geometry) throw GeometryError("<" + ctag + "> without <geometry>");
      const bool is_collision = ctag == "collision";
      auto shape = parse_geometry(*geometry, is_collision);
      if (!shape) continue;
      CollisionGeometry g{*shape, compose(link_pose, pose_of(child)),
                          xml::attr(child, "name").value_or("")};
      (is_collision ? out.collisions : out.visuals).push_back(std::move(g));
    }
  }
  return out;
}

MeshResolver model_mesh_resolver(const fs::path& model_root) {
  return [model_root](const std::string& uri) -> fs::path {
    if (uri.rfind("model://", 0) == 0) {
      const std::string rest = uri.substr(8);
      const auto slash = rest.find('/');
      const std::string name = rest.substr(0, slash);
      const std::string tail = slash == std::string::npos ? "" : rest.substr(slash + 1);
      const fs::path sibling = model_root.parent_path() / name / tail;
      if (fs::exists(sibling)) return sibling;
      return model_root / tail;
    }
    if (uri.rfind("file://", 0) == 0) return fs::path(uri.substr(7));
    const fs::path p(uri);
    return p.is_absolute() ? p : model_root / p;
  };
}

std::vector<Vec3> load_mesh_vertices(const fs::path& path) {
  const fs::path ext = lower_ext(path);
  if (!fs::exists(path)) throw MeshError("mesh file not found: " + path.string());
  if (ext == ".stl") return load_stl(path);
  if (ext == ".obj") return load_obj(path);
  if (ext == ".dae") return load_collada(path);
  throw MeshError("unsupported mesh format '" + ext.string() + "': " + path.string());
}

Aabb3 geometry_bbox(const CollisionGeometry& g, const MeshResolver& resolve_mesh) {
  Aabb3 box;
  const Eigen::Matrix3d r = g.pose.rotation();
  const Vec3 t = g.pose.translation();
  std::visit(
      [&](const auto& s) {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, shape::Box>) {
          const Vec3 half(s.sx / 2, s.sy / 2, s.sz / 2);
          for (int i = 0; i < 8; ++i) {
            const Vec3 corner((i & 1) ? half.x() : -half.x(), (i & 2) ? half.y() : -half.y(),
                              (i & 4) ? half.z() : -half.z());
            box.extend(Vec3(r * corner + t));
          }
        } else if constexpr (std::is_same_v<S, shape::Sphere>) {
          box.extend(Vec3(t - Vec3::Constant(s.radius)));
          box.extend(Vec3(t + Vec3::Constant(s.radius)));
        } else if constexpr (std::is_same_v<S, shape::Cylinder>) {
          const Vec3 axis = r.col(2);
          Vec3 half;
          for (int i = 0; i < 3; ++i) {
            const double a = axis[i];
            half[i] = std::abs(a) * s.length / 2 + s.radius * std::sqrt(std::max(0.0, 1 - a * a));
          }
          box.extend(Vec3(t - half));
          box.extend(Vec3(t + half));
        } else if constexpr (std::is_same_v<S, shape::Mesh>) {
          const fs::path file = resolve_mesh ? resolve_mesh(s.uri) : fs::path(s.uri);
          for (const Vec3& v : load_mesh_vertices(file)) box.extend(Vec3(r * v.cwiseProduct(s.scale) + t));
        }
      },
      g.shape);
  return box;
}

FootprintInfo model_footprint(const std::vector<CollisionGeometry>& geoms, const MeshResolver& resolve_mesh) {
  Aabb3 all;
  for (const auto& g : geoms) all.extend(geometry_bbox(g, resolve_mesh));
  FootprintInfo info;
  info.simple_single_geometry =
      geoms.size() == 1 && !std::holds_alternative<shape::Mesh>(geoms.front().shape);
  info.empty = all.is_empty();
  if (!info.empty) {
    const Vec3 e = all.extent();
    info.width = e.x();
    info.length = e.y();
    info.height = e.z();
    info.z_offset = all.min.z();
  }
  return info;
}

bool classify_dynamic_size(const FootprintInfo& info) { return info.simple_single_geometry; }

}  // namespace scenegen
