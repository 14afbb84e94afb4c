#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <numbers>
#include <sstream>

#include "scenegen/descriptor.hpp"
#include "scenegen/model_acquire.hpp"

#ifndef SCENEGEN_FIXTURES
#error "SCENEGEN_FIXTURES must point at tests/fixtures"
#endif

namespace testing {

fs::path fixture(const std::string& rel) { return fs::path(SCENEGEN_FIXTURES) / rel; }

scenegen::Registry fixture_registry(const std::string& descriptor_rel) {
  const fs::path path = fixture(descriptor_rel);
  const auto descriptor = scenegen::load_descriptor(path.string());
  TempDir cache;
  const auto sources = scenegen::sources_for(descriptor, path.parent_path(), {}, cache.path(), std::nullopt);
  scenegen::Fetcher fetcher(true);
  std::vector<scenegen::ModelSpec> specs;
  for (const auto& entry : descriptor.models) {
    specs.push_back(scenegen::build_model_spec(entry, scenegen::resolve_model(entry, sources, fetcher)));
  }
  return scenegen::Registry(std::move(specs));
}

TempDir::TempDir() {
  static std::mt19937_64 rng{std::random_device{}()};
  for (;;) {
    char name[64];
    std::snprintf(name, sizeof name, "scenegen-test-%016llx", static_cast<unsigned long long>(rng()));
    path_ = fs::temp_directory_path() / name;
    if (fs::create_directory(path_)) return;
  }
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

void write_text(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << text;
}

V3 apply_pose(const RawPose& p, V3 v) {
  // roll about x
  double y = v.y * std::cos(p.roll) - v.z * std::sin(p.roll);
  double z = v.y * std::sin(p.roll) + v.z * std::cos(p.roll);
  v = {v.x, y, z};
  // pitch about y
  double x = v.x * std::cos(p.pitch) + v.z * std::sin(p.pitch);
  z = -v.x * std::sin(p.pitch) + v.z * std::cos(p.pitch);
  v = {x, v.y, z};
  // yaw about z
  x = v.x * std::cos(p.yaw) - v.y * std::sin(p.yaw);
  y = v.x * std::sin(p.yaw) + v.y * std::cos(p.yaw);
  return {x + p.x, y + p.y, v.z + p.z};
}

void Bounds3::add(V3 v) {
  min = {std::min(min.x, v.x), std::min(min.y, v.y), std::min(min.z, v.z)};
  max = {std::max(max.x, v.x), std::max(max.y, v.y), std::max(max.z, v.z)};
}

namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string pose_str(const RawPose& p) {
  return num(p.x) + " " + num(p.y) + " " + num(p.z) + " " + num(p.roll) + " " + num(p.pitch) + " " + num(p.yaw);
}

bool same_pose(const RawPose& a, const RawPose& b) {
  return a.x == b.x && a.y == b.y && a.z == b.z && a.roll == b.roll && a.pitch == b.pitch && a.yaw == b.yaw;
}

RawPose random_pose(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> t(-1, 1), r(-std::numbers::pi, std::numbers::pi);
  return {t(rng), t(rng), t(rng), r(rng), r(rng), r(rng)};
}

V3 surface_point(const RawGeometry& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  switch (g.kind) {
    case RawGeometry::Box: {
      const double ab = g.a * g.b, bc = g.b * g.c, ac = g.a * g.c;
      const double pick = u(rng) * (ab + bc + ac);
      const double s1 = u(rng) - 0.5, s2 = u(rng) - 0.5, side = u(rng) < 0.5 ? -0.5 : 0.5;
      if (pick < ab) return {s1 * g.a, s2 * g.b, side * g.c};
      if (pick < ab + bc) return {side * g.a, s1 * g.b, s2 * g.c};
      return {s1 * g.a, side * g.b, s2 * g.c};
    }
    case RawGeometry::Cylinder: {
      const double r = g.a, l = g.b;
      const double side_area = 2 * std::numbers::pi * r * l, cap_area = 2 * std::numbers::pi * r * r;
      const double theta = 2 * std::numbers::pi * u(rng);
      if (u(rng) * (side_area + cap_area) < side_area) {
        return {r * std::cos(theta), r * std::sin(theta), (u(rng) - 0.5) * l};
      }
      const double rho = r * std::sqrt(u(rng));
      return {rho * std::cos(theta), rho * std::sin(theta), u(rng) < 0.5 ? -l / 2 : l / 2};
    }
    case RawGeometry::Sphere: {
      std::normal_distribution<double> n(0, 1);
      V3 v{n(rng), n(rng), n(rng)};
      const double len = std::sqrt(v.x * v.x + v.y * v.y + v.z * v.z);
      return {g.a * v.x / len, g.a * v.y / len, g.a * v.z / len};
    }
  }
  return {0, 0, 0};
}

}  // namespace

std::string sdf_for(const std::vector<RawGeometry>& geoms, const std::string& name) {
  std::ostringstream s;
  s << "<?xml version=\"1.0\"?>\n<sdf version=\"1.6\">\n  <model name=\"" << name << "\">\n";
  for (std::size_t i = 0; i < geoms.size();) {
    std::size_t j = i;
    s << "    <link name=\"link_" << i << "\">\n      <pose>" << pose_str(geoms[i].link) << "</pose>\n";
    for (; j < geoms.size() && same_pose(geoms[j].link, geoms[i].link); ++j) {
      const RawGeometry& g = geoms[j];
      s << "      <collision name=\"c" << j << "\">\n        <pose>" << pose_str(g.collision)
        << "</pose>\n        <geometry>\n";
      switch (g.kind) {
        case RawGeometry::Box:
          s << "          <box><size>" << num(g.a) << " " << num(g.b) << " " << num(g.c) << "</size></box>\n";
          break;
        case RawGeometry::Cylinder:
          s << "          <cylinder><radius>" << num(g.a) << "</radius><length>" << num(g.b)
            << "</length></cylinder>\n";
          break;
        case RawGeometry::Sphere:
          s << "          <sphere><radius>" << num(g.a) << "</radius></sphere>\n";
          break;
      }
      s << "        </geometry>\n      </collision>\n";
    }
    s << "    </link>\n";
    i = j;
  }
  s << "  </model>\n</sdf>\n";
  return s.str();
}

std::vector<RawGeometry> random_geometries(std::mt19937_64& rng, bool boxes_only, int count) {
  std::uniform_real_distribution<double> size(0.1, 2.0), u(0, 1);
  std::vector<RawGeometry> out;
  for (int i = 0; i < count; ++i) {
    RawGeometry g;
    g.kind = boxes_only ? RawGeometry::Box : static_cast<RawGeometry::Kind>(static_cast<int>(u(rng) * 3) % 3);
    g.a = size(rng), g.b = size(rng), g.c = size(rng);
    g.link = (i > 0 && u(rng) < 0.5) ? out.back().link : random_pose(rng);
    g.collision = random_pose(rng);
    out.push_back(g);
  }
  return out;
}

namespace {

// Affine map of a pose, tabulated from apply_pose on the basis vectors.
struct Affine {
  V3 t, cx, cy, cz;
  explicit Affine(const RawPose& p)
      : t(apply_pose(p, {0, 0, 0})),
        cx(minus(apply_pose(p, {1, 0, 0}), t)),
        cy(minus(apply_pose(p, {0, 1, 0}), t)),
        cz(minus(apply_pose(p, {0, 0, 1}), t)) {}
  static V3 minus(V3 a, V3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
  V3 operator()(V3 v) const {
    return {t.x + cx.x * v.x + cy.x * v.y + cz.x * v.z, t.y + cx.y * v.x + cy.y * v.y + cz.y * v.z,
            t.z + cx.z * v.x + cy.z * v.y + cz.z * v.z};
  }
};

}  // namespace

Bounds3 sampled_bounds(const std::vector<RawGeometry>& geoms, std::mt19937_64& rng, std::size_t per_shape) {
  Bounds3 b;
  for (const auto& g : geoms) {
    const Affine link(g.link), collision(g.collision);
    for (std::size_t i = 0; i < per_shape; ++i) b.add(link(collision(surface_point(g, rng))));
  }
  return b;
}

Bounds3 box_corner_bounds(const std::vector<RawGeometry>& geoms) {
  Bounds3 b;
  for (const auto& g : geoms) {
    for (int k = 0; k < 8; ++k) {
      V3 c{(k & 1 ? 0.5 : -0.5) * g.a, (k & 2 ? 0.5 : -0.5) * g.b, (k & 4 ? 0.5 : -0.5) * g.c};
      b.add(apply_pose(g.link, apply_pose(g.collision, c)));
    }
  }
  return b;
}

std::vector<Triangle> sample_mesh() {
  // Coordinates are multiples of 1/64 so that float32 storage is exact.
  const V3 p[] = {{-0.375, 0.25, 0.0},   {0.5, -0.125, 0.0625}, {0.125, 0.75, 0.0},
                  {-0.25, -0.5, 0.125}, {0.0, 0.0, 1.25},      {0.25, 0.125, -0.1875}};
  const int f[][3] = {{0, 1, 4}, {1, 2, 4}, {2, 0, 4}, {0, 3, 1}, {3, 5, 1}, {5, 2, 1}, {0, 2, 5}, {3, 0, 5}};
  std::vector<Triangle> tris;
  for (const auto& t : f) tris.push_back({{p[t[0]], p[t[1]], p[t[2]]}});
  return tris;
}

void write_stl_ascii(const fs::path& p, const std::vector<Triangle>& tris) {
  std::ostringstream s;
  s << "solid sample\n";
  for (const auto& t : tris) {
    s << "  facet normal 0 0 0\n    outer loop\n";
    for (const auto& v : t.v) s << "      vertex " << num(v.x) << " " << num(v.y) << " " << num(v.z) << "\n";
    s << "    endloop\n  endfacet\n";
  }
  s << "endsolid sample\n";
  write_text(p, s.str());
}

void write_stl_binary(const fs::path& p, const std::vector<Triangle>& tris) {
  std::string data(80, '\0');
  std::memcpy(data.data(), "binary sample", 13);
  auto put_u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) data.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
  };
  auto put_f32 = [&](float f) {
    std::uint32_t bits;
    std::memcpy(&bits, &f, 4);
    put_u32(bits);
  };
  put_u32(static_cast<std::uint32_t>(tris.size()));
  for (const auto& t : tris) {
    for (int i = 0; i < 3; ++i) put_f32(0);
    for (const auto& v : t.v) {
      put_f32(static_cast<float>(v.x));
      put_f32(static_cast<float>(v.y));
      put_f32(static_cast<float>(v.z));
    }
    data.push_back(0);
    data.push_back(0);
  }
  write_text(p, data);
}

void write_obj(const fs::path& p, const std::vector<Triangle>& tris) {
  std::ostringstream s;
  s << "# sample mesh\no sample\n";
  for (const auto& t : tris) {
    for (const auto& v : t.v) s << "v " << num(v.x) << " " << num(v.y) << " " << num(v.z) << "\n";
  }
  s << "vn 0 0 1\nvt 0 0\n";
  for (std::size_t i = 0; i < tris.size(); ++i) {
    s << "f " << 3 * i + 1 << "/1/1 " << 3 * i + 2 << "/1/1 " << 3 * i + 3 << "/1/1\n";
  }
  write_text(p, s.str());
}

void write_dae(const fs::path& p, const std::vector<Triangle>& tris, double meter, bool y_up) {
  std::ostringstream floats;
  std::size_t n = 0;
  for (const auto& t : tris) {
    for (const auto& v : t.v) {
      V3 w = y_up ? V3{v.x, v.z, -v.y} : v;
      floats << num(w.x / meter) << " " << num(w.y / meter) << " " << num(w.z / meter) << " ";
      ++n;
    }
  }
  std::ostringstream indices;
  for (std::size_t i = 0; i < n; ++i) indices << i << " ";
  std::ostringstream s;
  s << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n"
    << "<COLLADA xmlns=\"http://www.collada.org/2005/11/COLLADASchema\" version=\"1.4.1\">\n"
    << "  <asset>\n    <unit name=\"unit\" meter=\"" << num(meter) << "\"/>\n    <up_axis>"
    << (y_up ? "Y_UP" : "Z_UP") << "</up_axis>\n  </asset>\n"
    << "  <library_geometries>\n    <geometry id=\"sample\" name=\"sample\">\n      <mesh>\n"
    << "        <source id=\"sample-normals\">\n          <float_array id=\"sample-normals-array\" count=\"3\">0 0 1</float_array>\n"
    << "        </source>\n"
    << "        <source id=\"sample-pos\">\n          <float_array id=\"sample-pos-array\" count=\"" << 3 * n << "\">"
    << floats.str() << "</float_array>\n"
    << "          <technique_common>\n            <accessor source=\"#sample-pos-array\" count=\"" << n
    << "\" stride=\"3\">\n              <param name=\"X\" type=\"float\"/>\n              <param name=\"Y\" type=\"float\"/>\n"
    << "              <param name=\"Z\" type=\"float\"/>\n            </accessor>\n          </technique_common>\n"
    << "        </source>\n"
    << "        <vertices id=\"sample-vertices\">\n          <input semantic=\"POSITION\" source=\"#sample-pos\"/>\n"
    << "        </vertices>\n"
    << "        <triangles count=\"" << tris.size() << "\">\n"
    << "          <input semantic=\"VERTEX\" source=\"#sample-vertices\" offset=\"0\"/>\n"
    << "          <p>" << indices.str() << "</p>\n        </triangles>\n"
    << "      </mesh>\n    </geometry>\n  </library_geometries>\n</COLLADA>\n";
  write_text(p, s.str());
}

// ---------------------------------------------------------------------------

namespace {

using P2 = std::array<double, 2>;

double cross(P2 o, P2 a, P2 b) { return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]); }

double segment_distance(P2 p, P2 a, P2 b) {
  const double dx = b[0] - a[0], dy = b[1] - a[1];
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0 ? ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / len2 : 0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(p[0] - (a[0] + t * dx), p[1] - (a[1] + t * dy));
}

std::vector<P2> convex_hull(std::vector<P2> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<P2> h(2 * pts.size());
  std::size_t k = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    while (k >= 2 && cross(h[k - 2], h[k - 1], pts[i]) <= 0) --k;
    h[k++] = pts[i];
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i > 0; --i) {
    while (k >= t && cross(h[k - 2], h[k - 1], pts[i - 1]) <= 0) --k;
    h[k++] = pts[i - 1];
  }
  h.resize(k - 1);
  return h;
}

bool strictly_inside(const Poly& poly, P2 p) {
  const auto& v = poly.pts;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (cross(v[i], v[(i + 1) % v.size()], p) <= 0) return false;
  }
  return true;
}

P2 perimeter_point(const Poly& poly, double t) {
  const auto& v = poly.pts;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const P2 a = v[i], b = v[(i + 1) % v.size()];
    const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
    if (t <= len || i + 1 == v.size()) {
      const double s = len > 0 ? std::min(t / len, 1.0) : 0;
      return {a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])};
    }
    t -= len;
  }
  return v.front();
}

double perimeter(const Poly& poly) {
  double p = 0;
  for (std::size_t i = 0; i < poly.pts.size(); ++i) {
    const P2 a = poly.pts[i], b = poly.pts[(i + 1) % poly.pts.size()];
    p += std::hypot(b[0] - a[0], b[1] - a[1]);
  }
  return p;
}

P2 centroid(const Poly& poly) {
  P2 c{0, 0};
  for (const auto& p : poly.pts) c = {c[0] + p[0], c[1] + p[1]};
  return {c[0] / poly.pts.size(), c[1] / poly.pts.size()};
}

}  // namespace

Poly rect_poly(double cx, double cy, double heading, double half_w, double half_l) {
  const double rx = std::cos(heading), ry = std::sin(heading);  // local +x
  const double fx = -std::sin(heading), fy = std::cos(heading);  // local +y
  Poly p;
  const double su[] = {-1, 1, 1, -1}, sv[] = {-1, -1, 1, 1};
  for (int i = 0; i < 4; ++i) {
    p.pts.push_back({cx + su[i] * half_w * rx + sv[i] * half_l * fx, cy + su[i] * half_w * ry + sv[i] * half_l * fy});
  }
  return p;
}

double signed_separation(const Poly& a, const Poly& b) {
  std::vector<P2> diff;
  for (const auto& p : a.pts) {
    for (const auto& q : b.pts) diff.push_back({p[0] - q[0], p[1] - q[1]});
  }
  const auto hull = convex_hull(diff);
  const P2 origin{0, 0};
  double dist = 1e300;
  bool inside = true;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const P2 u = hull[i], v = hull[(i + 1) % hull.size()];
    dist = std::min(dist, segment_distance(origin, u, v));
    if (cross(u, v, origin) <= 0) inside = false;
  }
  return inside ? -dist : dist;
}

bool monte_carlo_overlap(const Poly& a, const Poly& b, std::size_t samples, std::mt19937_64& rng) {
  if (strictly_inside(b, centroid(a)) || strictly_inside(a, centroid(b))) return true;
  std::uniform_real_distribution<double> u(0, 1);
  const double pa = perimeter(a), pb = perimeter(b);
  for (std::size_t i = 0; i < samples / 2; ++i) {
    if (strictly_inside(b, perimeter_point(a, u(rng) * pa))) return true;
    if (strictly_inside(a, perimeter_point(b, u(rng) * pb))) return true;
  }
  return false;
}

double intersection_area(const Poly& a, const Poly& b) {
  std::vector<P2> out = a.pts;
  for (std::size_t i = 0; i < b.pts.size() && !out.empty(); ++i) {
    const P2 e0 = b.pts[i], e1 = b.pts[(i + 1) % b.pts.size()];
    std::vector<P2> in = std::move(out);
    out.clear();
    for (std::size_t j = 0; j < in.size(); ++j) {
      const P2 cur = in[j], prev = in[(j + in.size() - 1) % in.size()];
      const double dc = cross(e0, e1, cur), dp = cross(e0, e1, prev);
      if (dc >= 0) {
        if (dp < 0) {
          const double t = dp / (dp - dc);
          out.push_back({prev[0] + t * (cur[0] - prev[0]), prev[1] + t * (cur[1] - prev[1])});
        }
        out.push_back(cur);
      } else if (dp >= 0) {
        const double t = dp / (dp - dc);
        out.push_back({prev[0] + t * (cur[0] - prev[0]), prev[1] + t * (cur[1] - prev[1])});
      }
    }
  }
  double area = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const P2 p = out[i], q = out[(i + 1) % out.size()];
    area += p[0] * q[1] - q[0] * p[1];
  }
  return std::abs(area) / 2;
}

std::vector<std::string> recheck_scene(const scenegen::ConcreteScene& scene) {
  std::vector<std::string> problems;
  const auto& ws = scene.workspace;
  const double cw = std::cos(ws.heading), sw = std::sin(ws.heading);
  std::vector<Poly> polys;
  for (const auto& o : scene.objects) {
    polys.push_back(rect_poly(o.position.x, o.position.y, o.heading, o.width() / 2, o.length() / 2));
    for (const auto& c : polys.back().pts) {
      const double dx = c[0] - ws.center.x, dy = c[1] - ws.center.y;
      const double u = dx * cw + dy * sw, v = -dx * sw + dy * cw;
      if (std::abs(u) > ws.half_width + 1e-9 || std::abs(v) > ws.half_length + 1e-9) {
        problems.push_back(o.instance_name + " leaves the workspace");
        break;
      }
    }
  }
  for (std::size_t i = 0; i < polys.size(); ++i) {
    for (std::size_t j = i + 1; j < polys.size(); ++j) {
      const auto& a = scene.objects[i];
      const auto& b = scene.objects[j];
      if (a.allow_collisions || b.allow_collisions || (a.room_wall && b.room_wall)) continue;
      if (intersection_area(polys[i], polys[j]) > 1e-8) {
        problems.push_back(a.instance_name + " overlaps " + b.instance_name);
      }
    }
  }
  return problems;
}

}  // namespace testing

#include <zlib.h>

#include "scenegen/archive.hpp"

namespace testing {

std::string make_tar_gz(const FileList& files) {
  std::string tar;
  for (const auto& [name, data] : files) {
    std::string h(512, '\0');
    std::memcpy(h.data(), name.data(), std::min<std::size_t>(name.size(), 100));
    std::snprintf(h.data() + 100, 8, "%07o", 0644);
    std::snprintf(h.data() + 108, 8, "%07o", 0);
    std::snprintf(h.data() + 116, 8, "%07o", 0);
    std::snprintf(h.data() + 124, 12, "%011o", static_cast<unsigned>(data.size()));
    std::snprintf(h.data() + 136, 12, "%011o", 0);
    std::memset(h.data() + 148, ' ', 8);
    h[156] = '0';
    std::memcpy(h.data() + 257, "ustar", 6);
    h[263] = '0';
    h[264] = '0';
    unsigned sum = 0;
    for (unsigned char c : h) sum += c;
    std::snprintf(h.data() + 148, 8, "%06o", sum);
    tar += h;
    tar += data;
    tar.append((512 - data.size() % 512) % 512, '\0');
  }
  tar.append(1024, '\0');
  return scenegen::gzip_compress(tar);
}

std::string make_zip(const FileList& files) {
  std::string out, central;
  auto u16 = [](std::string& s, unsigned v) {
    s.push_back(static_cast<char>(v & 0xff));
    s.push_back(static_cast<char>((v >> 8) & 0xff));
  };
  auto u32 = [&](std::string& s, unsigned long v) {
    u16(s, v & 0xffff);
    u16(s, (v >> 16) & 0xffff);
  };
  for (const auto& [name, data] : files) {
    const unsigned long crc = crc32(0L, reinterpret_cast<const Bytef*>(data.data()), static_cast<uInt>(data.size()));
    const unsigned long offset = out.size();
    u32(out, 0x04034b50);
    u16(out, 20), u16(out, 0), u16(out, 0), u16(out, 0), u16(out, 0);
    u32(out, crc), u32(out, data.size()), u32(out, data.size());
    u16(out, name.size()), u16(out, 0);
    out += name + data;
    u32(central, 0x02014b50);
    u16(central, 20), u16(central, 20), u16(central, 0), u16(central, 0), u16(central, 0), u16(central, 0);
    u32(central, crc), u32(central, data.size()), u32(central, data.size());
    u16(central, name.size()), u16(central, 0), u16(central, 0), u16(central, 0), u16(central, 0);
    u32(central, 0), u32(central, offset);
    central += name;
  }
  const unsigned long cd_offset = out.size();
  out += central;
  u32(out, 0x06054b50);
  u16(out, 0), u16(out, 0), u16(out, files.size()), u16(out, files.size());
  u32(out, central.size()), u32(out, cd_offset), u16(out, 0);
  return out;
}

}  // namespace testing
