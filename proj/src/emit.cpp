#include "scenegen/emit.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

#include "scenegen/error.hpp"
#include "scenegen/sdf_geom.hpp"
#include "scenegen/util.hpp"
#include "scenegen/xml.hpp"

namespace scenegen {

using xml::Tree;
using json = nlohmann::json;

namespace {

std::string pose_text(double x, double y, double z, double yaw) {
  return format_number(x) + " " + format_number(y) + " " + format_number(z) + " 0 0 " + format_number(yaw);
}

std::string join_numbers(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += ' ';
    out += format_number(v[i]);
  }
  return out;
}

std::vector<double> split_numbers(const std::string& text, const std::string& what) {
  std::vector<double> out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    auto v = parse_number(tok);
    if (!v) throw EmitError("bad number '" + tok + "' in " + what);
    out.push_back(*v);
  }
  return out;
}

Tree text_node(const std::string& text) {
  Tree t;
  t.put_value(text);
  return t;
}

Tree box_geometry(double sx, double sy, double sz) {
  Tree geometry;
  geometry.add_child("box.size", text_node(join_numbers({sx, sy, sz})));
  return geometry;
}

Tree wall_model(const SceneObject& o, const std::string& name) {
  Tree model;
  model.put("<xmlattr>.name", name);
  model.add_child("static", text_node("true"));
  model.add_child("pose", text_node(pose_text(o.position.x, o.position.y, o.z, o.heading)));
  Tree link;
  link.put("<xmlattr>.name", "link");
  for (const char* part : {"collision", "visual"}) {
    Tree node;
    node.put("<xmlattr>.name", part);
    node.add_child("pose", text_node(pose_text(0, 0, o.height() / 2, 0)));
    node.add_child("geometry", box_geometry(o.width(), o.length(), o.height()));
    link.add_child(part, node);
  }
  model.add_child("link", link);
  return model;
}

Tree include_node(const std::string& uri, const std::string& name, const std::string& pose) {
  Tree inc;
  inc.add_child("uri", text_node(uri));
  inc.add_child("name", text_node(name));
  inc.add_child("pose", text_node(pose));
  return inc;
}

void scale_pose(Tree& pose, double scale) {
  auto v = split_numbers(pose.data(), "pose");
  if (v.size() != 6) throw EmitError("pose needs 6 numbers, got '" + pose.data() + "'");
  for (int i = 0; i < 3; ++i) v[i] *= scale;
  pose.put_value(join_numbers(v));
}

void scale_geometry(Tree& geometry, double scale) {
  for (auto& [tag, shape] : geometry) {
    if (tag == "box") {
      auto& size = shape.get_child("size");
      auto v = split_numbers(size.data(), "box size");
      for (auto& x : v) x *= scale;
      size.put_value(join_numbers(v));
    } else if (tag == "cylinder" || tag == "sphere") {
      for (const char* key : {"radius", "length"}) {
        if (auto child = shape.get_child_optional(key)) {
          child->put_value(format_number(split_numbers(child->data(), key).at(0) * scale));
        }
      }
    } else if (tag == "mesh") {
      std::vector<double> v{1, 1, 1};
      if (auto s = shape.get_child_optional("scale")) v = split_numbers(s->data(), "mesh scale");
      for (auto& x : v) x *= scale;
      shape.put_child("scale", text_node(join_numbers(v)));
    }
  }
}

void scale_subtree(Tree& node, double scale) {
  for (auto& [tag, child] : node) {
    if (tag == "pose") scale_pose(child, scale);
    else if (tag == "geometry") scale_geometry(child, scale);
    else if (tag != "<xmlattr>") scale_subtree(child, scale);
  }
}

std::string yaml_key(const std::string& s) {
  const bool plain = !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) {
    return std::isalnum(c) || c == '_' || c == '-' || c == '.';
  }) && !std::isdigit(static_cast<unsigned char>(s[0]));
  if (plain) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string default_world_template() {
  return R"(<?xml version="1.0"?>
<sdf version="1.6">
  <world name="default">
    <light name="sun" type="directional">
      <cast_shadows>true</cast_shadows>
      <pose>0 0 10 0 0 0</pose>
      <diffuse>0.8 0.8 0.8 1</diffuse>
      <specular>0.2 0.2 0.2 1</specular>
      <direction>-0.5 0.1 -0.9</direction>
    </light>
    <model name="ground_plane">
      <static>true</static>
      <link name="link">
        <collision name="collision">
          <geometry>
            <plane>
              <normal>0 0 1</normal>
              <size>100 100</size>
            </plane>
          </geometry>
        </collision>
        <visual name="visual">
          <geometry>
            <plane>
              <normal>0 0 1</normal>
              <size>100 100</size>
            </plane>
          </geometry>
        </visual>
      </link>
    </model>
  </world>
</sdf>
)";
}

std::string scaled_model_name(const std::string& entry_name, double scale) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", scale);
  return entry_name + "_scaled_" + buf;
}

std::string model_config_xml(const std::string& name, const std::string& description) {
  Tree config;
  Tree model;
  model.add_child("name", text_node(name));
  model.add_child("version", text_node("1.0"));
  Tree sdf = text_node("model.sdf");
  sdf.put("<xmlattr>.version", kSdfVersion);
  model.add_child("sdf", sdf);
  model.add_child("description", text_node(description));
  config.add_child("model", model);
  return xml::write(config);
}

ModelDirOutput emit_scaled_model(const ModelSpec& spec, double scale, const std::string& name) {
  if (!spec.dynamic_size) throw ScaleError("model " + spec.entry_name + " is not resizable");
  if (!(scale >= kMinScale && scale <= kMaxScale)) {
    throw ScaleError("scale " + format_number(scale) + " for " + spec.entry_name + " is outside [0.5, 2.0]");
  }
  if (!spec.source.sdf_path) throw EmitError("model " + spec.entry_name + " has no SDF to rescale");
  const std::string text = read_file(*spec.source.sdf_path);
  const std::string out_name = name.empty() ? scaled_model_name(spec.entry_name, scale) : name;

  Tree tree = xml::parse(text, spec.source.sdf_path->string());
  Tree& model = tree.get_child("sdf.model");
  model.put("<xmlattr>.name", out_name);
  scale_subtree(model, scale);
  tree.put("sdf.<xmlattr>.version", kSdfVersion);

  ModelDirOutput out;
  out.name = out_name;
  out.files["model.sdf"] = xml::write(tree);
  out.files["model.config"] =
      model_config_xml(out_name, spec.entry_name + " scaled by " + format_number(scale));
  return out;
}

WorldDocument emit_world(const ConcreteScene& scene, const std::optional<std::string>& template_text) {
  Tree doc = xml::parse(template_text ? *template_text : default_world_template(), "world template");
  auto world = doc.get_child_optional("sdf.world");
  if (!world) throw Error(ErrorKind::Usage, "world template has no <sdf><world> element");

  WorldDocument out;
  std::set<std::string> names;
  for (const auto& [tag, child] : *world) {
    if (tag == "model" || tag == "include") {
      if (auto n = child.get_optional<std::string>(tag == "model" ? "<xmlattr>.name" : "name")) names.insert(*n);
    }
  }
  std::map<std::string, int> counters;
  std::map<std::string, std::string> scaled_names;  // "<entry>|<scale>" -> model name
  std::set<std::string> dirs;

  auto claim = [&](const std::string& name) {
    if (!names.insert(name).second) throw EmitError("duplicate model name '" + name + "' in world");
    return name;
  };

  for (const SceneObject& o : scene.objects) {
    if (o.mission_only) continue;
    const std::string& entry = o.spec.entry_name;
    const std::string instance = claim(entry + "_" + std::to_string(counters[entry]++));
    if (o.custom_dims || o.spec.builtin) {
      world->add_child("model", wall_model(o, instance));
      continue;
    }
    const double yaw = o.heading + o.spec.heading_offset;
    const double z = o.z - o.spec.z_offset * o.scale;
    std::string model_name = entry;
    if (o.scale != 1.0) {
      const std::string key = entry + "|" + format_number(o.scale);
      auto it = scaled_names.find(key);
      if (it == scaled_names.end()) {
        std::string base = scaled_model_name(entry, o.scale), candidate = base;
        for (int k = 1; dirs.count(candidate); ++k) candidate = base + "_" + std::to_string(k);
        dirs.insert(candidate);
        out.referenced_models.push_back(emit_scaled_model(o.spec, o.scale, candidate));
        it = scaled_names.emplace(key, candidate).first;
      }
      model_name = it->second;
    }
    // custom models ship with the scene; scaled copies may still use their meshes
    if (o.spec.kind == ModelKind::CustomModel && dirs.insert(entry).second) {
      ModelDirOutput copy;
      copy.name = entry;
      copy.copy_from = o.spec.source.root_dir;
      out.referenced_models.push_back(std::move(copy));
    }
    world->add_child("include", include_node("model://" + model_name, instance, pose_text(o.position.x, o.position.y, z, yaw)));
  }
  out.xml = xml::write(doc);
  return out;
}

std::string emit_mission_yaml(const ConcreteScene& scene) {
  std::vector<std::string> order;
  std::map<std::string, std::string> groups;
  for (const SceneObject& o : scene.objects) {
    if (!o.mission_only) continue;
    const std::string& key = o.spec.entry_name;
    if (!groups.count(key)) order.push_back(key);
    groups[key] += "- heading: " + format_number(o.heading + o.spec.heading_offset) + "\n  x: " +
                   format_number(o.position.x) + "\n  y: " + format_number(o.position.y) + "\n  z: " +
                   format_float(o.z) + "\n";
  }
  if (order.empty()) return "{}\n";
  std::string out;
  for (const auto& key : order) out += yaml_key(key) + ":\n" + groups[key];
  return out;
}

std::string emit_plot_svg(const ConcreteScene& scene) {
  constexpr double kMargin = 0.5;
  constexpr double kPixelsPerMeter = 60;
  double min_x = 1e300, min_y = 1e300, max_x = -1e300, max_y = -1e300;
  auto grow = [&](const OrientedRect& r) {
    for (const Point2& c : r.corners()) {
      min_x = std::min(min_x, c.x), max_x = std::max(max_x, c.x);
      min_y = std::min(min_y, c.y), max_y = std::max(max_y, c.y);
    }
  };
  grow(scene.workspace);
  for (const auto& o : scene.objects) grow(rect_of(o));
  min_x -= kMargin, min_y -= kMargin, max_x += kMargin, max_y += kMargin;
  const double w = max_x - min_x, h = max_y - min_y;
  auto deg = [](double rad) { return format_number(rad * 180.0 / std::numbers::pi); };
  auto f = [](double v) { return format_number(v); };

  auto rect = [&](const OrientedRect& r, const std::string& cls, bool tick) {
    std::string s = "    <g transform=\"translate(" + f(r.center.x) + " " + f(r.center.y) + ") rotate(" +
                    deg(r.heading) + ")\">\n      <rect class=\"" + cls + "\" x=\"" + f(-r.half_width) +
                    "\" y=\"" + f(-r.half_length) + "\" width=\"" + f(2 * r.half_width) + "\" height=\"" +
                    f(2 * r.half_length) + "\"/>\n";
    if (tick) s += "      <line class=\"heading\" x1=\"0\" y1=\"0\" x2=\"0\" y2=\"" + f(r.half_length) + "\"/>\n";
    return s + "    </g>\n";
  };

  std::string s = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + f(std::round(w * kPixelsPerMeter)) +
       "\" height=\"" + f(std::round(h * kPixelsPerMeter)) + "\" viewBox=\"" + f(min_x) + " " + f(-max_y) + " " +
       f(w) + " " + f(h) + "\">\n";
  s += "  <style>\n"
       "    .workspace { fill: none; stroke: black; stroke-width: 0.04; }\n"
       "    .object { fill: #e06666; fill-opacity: 0.6; stroke: #990000; stroke-width: 0.02; }\n"
       "    .ego { fill: #6fa8dc; stroke: #073763; }\n"
       "    .heading { stroke: black; stroke-width: 0.02; }\n"
       "    text { font-family: sans-serif; font-size: 0.2px; text-anchor: middle; }\n"
       "  </style>\n";
  s += "  <g transform=\"matrix(1 0 0 -1 0 0)\">\n";
  s += rect(scene.workspace, "workspace", false);
  for (const auto& o : scene.objects) s += rect(rect_of(o), o.is_ego ? "object ego" : "object", true);
  s += "  </g>\n  <g class=\"labels\">\n";
  for (const auto& o : scene.objects) {
    s += "    <text x=\"" + f(o.position.x) + "\" y=\"" + f(-o.position.y) + "\">" + xml_escape(o.instance_name) +
         "</text>\n";
  }
  s += "  </g>\n</svg>\n";
  return s;
}

std::string scene_to_json(const ConcreteScene& scene) {
  json objects = json::array();
  for (const auto& o : scene.objects) {
    json spec = {{"name", o.spec.name},
                 {"entry_name", o.spec.entry_name},
                 {"kind", std::string(to_string(o.spec.kind))},
                 {"builtin", o.spec.builtin},
                 {"width", o.spec.width},
                 {"length", o.spec.length},
                 {"height", o.spec.height},
                 {"z_offset", o.spec.z_offset},
                 {"heading_offset", o.spec.heading_offset},
                 {"dynamic_size", o.spec.dynamic_size},
                 {"collidable", o.spec.collidable}};
    json obj = {{"instance_name", o.instance_name},
                {"spec", spec},
                {"x", o.position.x},
                {"y", o.position.y},
                {"z", o.z},
                {"heading", o.heading},
                {"scale", o.scale},
                {"allow_collisions", o.allow_collisions},
                {"mission_only", o.mission_only},
                {"is_ego", o.is_ego},
                {"room_wall", o.room_wall}};
    if (o.custom_dims) {
      obj["custom_dims"] = {o.custom_dims->width, o.custom_dims->length, o.custom_dims->height};
    }
    objects.push_back(std::move(obj));
  }
  const auto& ws = scene.workspace;
  json doc = {{"seed", scene.seed},
              {"attempts", scene.attempts},
              {"workspace",
               {{"x", ws.center.x}, {"y", ws.center.y}, {"heading", ws.heading},
                {"half_width", ws.half_width}, {"half_length", ws.half_length}}},
              {"objects", objects}};
  return doc.dump(2) + "\n";
}

ConcreteScene scene_from_json(const std::string& text) {
  ConcreteScene scene;
  try {
    const json doc = json::parse(text);
    scene.seed = doc.at("seed").get<std::uint64_t>();
    scene.attempts = doc.at("attempts").get<int>();
    const json& ws = doc.at("workspace");
    scene.workspace = {{ws.at("x").get<double>(), ws.at("y").get<double>()}, ws.at("heading").get<double>(),
                       ws.at("half_width").get<double>(), ws.at("half_length").get<double>()};
    for (const json& obj : doc.at("objects")) {
      SceneObject o;
      const json& spec = obj.at("spec");
      o.spec.name = spec.at("name").get<std::string>();
      o.spec.entry_name = spec.at("entry_name").get<std::string>();
      auto kind = model_kind_from_string(spec.at("kind").get<std::string>());
      if (!kind) throw EmitError("unknown model kind in scene record");
      o.spec.kind = *kind;
      o.spec.builtin = spec.at("builtin").get<bool>();
      o.spec.width = spec.at("width").get<double>();
      o.spec.length = spec.at("length").get<double>();
      o.spec.height = spec.at("height").get<double>();
      o.spec.z_offset = spec.at("z_offset").get<double>();
      o.spec.heading_offset = spec.at("heading_offset").get<double>();
      o.spec.dynamic_size = spec.at("dynamic_size").get<bool>();
      o.spec.collidable = spec.at("collidable").get<bool>();
      o.instance_name = obj.at("instance_name").get<std::string>();
      o.position = {obj.at("x").get<double>(), obj.at("y").get<double>()};
      o.z = obj.at("z").get<double>();
      o.heading = obj.at("heading").get<double>();
      o.scale = obj.at("scale").get<double>();
      o.allow_collisions = obj.at("allow_collisions").get<bool>();
      o.mission_only = obj.at("mission_only").get<bool>();
      o.is_ego = obj.at("is_ego").get<bool>();
      o.room_wall = obj.at("room_wall").get<bool>();
      if (obj.contains("custom_dims")) {
        const auto& d = obj.at("custom_dims");
        o.custom_dims = Dims{d.at(0).get<double>(), d.at(1).get<double>(), d.at(2).get<double>()};
      }
      scene.objects.push_back(std::move(o));
    }
  } catch (const json::exception& e) {
    throw EmitError(std::string("malformed scene record: ") + e.what());
  }
  return scene;
}

SceneOutputs emit_scene(const ConcreteScene& scene, const std::optional<std::string>& template_text) {
  return {emit_world(scene, template_text), emit_mission_yaml(scene), emit_plot_svg(scene), scene_to_json(scene)};
}

void write_output_tree(const SceneOutputs& outputs, const fs::path& out_dir, bool force) {
  static const char* const kOutputs[] = {"scene.world", "mission.yaml", "scene.svg", "scene.json", "models"};
  std::error_code ec;
  try {
    if (fs::exists(out_dir) && !fs::is_empty(out_dir)) {
      if (!force) throw EmitError("output directory " + out_dir.string() + " is not empty (use --force to overwrite)");
      for (const char* name : kOutputs) fs::remove_all(out_dir / name);
    }
    fs::create_directories(out_dir / "models");
    for (const auto& m : outputs.world.referenced_models) {
      const fs::path dest = out_dir / "models" / m.name;
      if (m.copy_from) {
        fs::copy(*m.copy_from, dest, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
      }
      for (const auto& [rel, content] : m.files) {
        fs::create_directories((dest / rel).parent_path());
        write_file_atomic(dest / rel, content);
      }
    }
  } catch (const fs::filesystem_error& e) {
    throw EmitError(e.what());
  }
  write_file_atomic(out_dir / "scene.world", outputs.world.xml);
  write_file_atomic(out_dir / "mission.yaml", outputs.mission);
  write_file_atomic(out_dir / "scene.svg", outputs.svg);
  write_file_atomic(out_dir / "scene.json", outputs.record);
}

std::string model_path_hint(const fs::path& out_dir) {
  return "export GAZEBO_MODEL_PATH=" + fs::absolute(out_dir / "models").string() + ":$GAZEBO_MODEL_PATH";
}

}  // namespace scenegen
