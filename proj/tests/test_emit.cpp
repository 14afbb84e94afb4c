#include <doctest.h>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <yaml-cpp/yaml.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "scenegen/emit.hpp"
#include "scenegen/error.hpp"
#include "scenegen/model_acquire.hpp"
#include "scenegen/sdf_geom.hpp"
#include "scenegen/util.hpp"
#include "support.hpp"

using namespace scenegen;
namespace pt = boost::property_tree;

namespace {

const Registry& fetch_registry() {
  static const Registry reg = testing::fixture_registry("fetch/descriptor.yaml");
  return reg;
}

const Registry& stacking_registry() {
  static const Registry reg = testing::fixture_registry("stacking/descriptor.yaml");
  return reg;
}

ConcreteScene sample(const std::string& text, std::uint64_t seed = 1, const Registry& reg = fetch_registry()) {
  return sample_scene(dsl::parse_scenario(text, type_resolver(reg)), reg, seed);
}

pt::ptree parse_xml(const std::string& text) {
  std::istringstream in(text);
  pt::ptree t;
  pt::read_xml(in, t, pt::xml_parser::trim_whitespace);
  return t;
}

std::vector<double> numbers(const std::string& text) {
  std::istringstream in(text);
  std::vector<double> out;
  for (double v; in >> v;) out.push_back(v);
  return out;
}

std::size_t occurrences(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

ModelSpec spec_for_sdf(const testing::TempDir& dir, const std::string& name, const std::string& collision) {
  testing::write_text(dir / (name + "/model.sdf"),
                      "<?xml version='1.0'?><sdf version='1.5'><model name='" + name +
                          "'><link name='link'><pose>0 0 0.1 0 0 0</pose><collision name='c'>" + collision +
                          "</collision><visual name='v'>" + collision + "</visual></link></model></sdf>");
  ModelEntry e{name, ModelKind::CustomModel};
  e.dynamic_size = true;
  return build_model_spec(e, ResolvedModel{e, dir / name, dir / (name + "/model.sdf")});
}

}  // namespace

TEST_SUITE("emit") {
  TEST_CASE("world poses reproduce the scene") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto scene = sample(read_file(testing::fixture("fetch/fetch_mission.scn")), seed);
      const auto doc = parse_xml(emit_world(scene).xml);
      const auto& world = doc.get_child("sdf.world");
      std::map<std::string, std::vector<double>> poses;
      std::size_t walls = 0;
      for (const auto& [tag, child] : world) {
        if (tag == "include") poses[child.get<std::string>("name")] = numbers(child.get<std::string>("pose"));
        if (tag == "model" && child.get<std::string>("<xmlattr>.name").rfind("wall_", 0) == 0) {
          ++walls;
          CHECK(child.get<bool>("static"));
        }
      }
      CHECK(walls == 7);
      CHECK(poses.size() == 4);
      std::map<std::string, int> counters;
      for (const auto& o : scene.objects) {
        if (o.mission_only || o.room_wall) continue;
        const std::string name = o.spec.entry_name + "_" + std::to_string(counters[o.spec.entry_name]++);
        REQUIRE(poses.count(name));
        const auto& p = poses[name];
        REQUIRE(p.size() == 6);
        CHECK(p[0] == doctest::Approx(o.position.x).epsilon(1e-12));
        CHECK(p[1] == doctest::Approx(o.position.y).epsilon(1e-12));
        CHECK(p[2] == doctest::Approx(o.z - o.spec.z_offset).epsilon(1e-12));
        CHECK(std::abs(p[5] - (o.heading + o.spec.heading_offset)) < 1e-12);
      }
      CHECK(bool(world.get_child_optional("light")));
      CHECK(doc.get<std::string>("sdf.<xmlattr>.version") == kSdfVersion);
    }
  }

  TEST_CASE("wall models") {
    const auto scene = sample("create_room(2, 3, x=1, y=0, sides='N')");
    const auto doc = parse_xml(emit_world(scene).xml);
    for (const auto& [tag, child] : doc.get_child("sdf.world")) {
      if (tag != "model" || child.get<std::string>("<xmlattr>.name") != "wall_0") continue;
      CHECK(numbers(child.get<std::string>("pose")) == std::vector<double>{1, 0.95, 0, 0, 0, 0});
      const auto& link = child.get_child("link");
      CHECK(numbers(link.get<std::string>("collision.geometry.box.size")) == std::vector<double>{3, 0.1, 1});
      CHECK(numbers(link.get<std::string>("collision.pose")) == std::vector<double>{0, 0, 0.5, 0, 0, 0});
      CHECK(bool(link.get_child_optional("visual.geometry.box")));
      return;
    }
    FAIL("no wall_0 in world");
  }

  TEST_CASE("templates") {
    const auto scene = sample("t = CafeTable at 0 @ 0");
    const std::string tmpl = read_file(testing::fixture("fetch/empty_world.world"));
    const auto doc = parse_xml(emit_world(scene, tmpl).xml);
    std::size_t includes = 0;
    for (const auto& [tag, child] : doc.get_child("sdf.world")) includes += tag == "include";
    CHECK(includes == 3);
    CHECK_THROWS_AS(emit_world(scene, std::string("<sdf version='1.6'><model name='x'/></sdf>")), Error);
    CHECK_THROWS_AS(emit_world(scene, std::string("<sdf><world name='w'><model name='cafe_table_0'/></world></sdf>")),
                    EmitError);
    CHECK_THROWS_AS(emit_world(scene, std::string("<sdf><world")), Error);
  }

  TEST_CASE("scaled models") {
    testing::TempDir dir;
    CHECK(scaled_model_name("cube", 1.5) == "cube_scaled_1.50");
    CHECK(scaled_model_name("cube", 0.5) == "cube_scaled_0.50");

    const ModelSpec box = spec_for_sdf(dir, "box", "<pose>0 0 0.5 0 0 0</pose><geometry><box><size>1 1 1</size></box></geometry>");
    const auto out = emit_scaled_model(box, 2);
    CHECK(out.name == "box_scaled_2.00");
    REQUIRE(out.files.count("model.sdf"));
    REQUIRE(out.files.count("model.config"));
    const auto sdf = parse_xml(out.files.at("model.sdf"));
    CHECK(sdf.get<std::string>("sdf.<xmlattr>.version") == "1.6");
    CHECK(sdf.get<std::string>("sdf.model.<xmlattr>.name") == "box_scaled_2.00");
    CHECK(numbers(sdf.get<std::string>("sdf.model.link.collision.geometry.box.size")) == std::vector<double>{2, 2, 2});
    CHECK(numbers(sdf.get<std::string>("sdf.model.link.collision.pose"))[2] == doctest::Approx(1));
    CHECK(numbers(sdf.get<std::string>("sdf.model.link.pose"))[2] == doctest::Approx(0.2));
    CHECK(numbers(sdf.get<std::string>("sdf.model.link.visual.geometry.box.size")) == std::vector<double>{2, 2, 2});
    const auto config = parse_xml(out.files.at("model.config"));
    CHECK(config.get<std::string>("model.sdf") == "model.sdf");

    const ModelSpec cyl = spec_for_sdf(dir, "cyl", "<geometry><cylinder><radius>0.1</radius><length>0.25</length></cylinder></geometry>");
    const auto c = parse_xml(emit_scaled_model(cyl, 2).files.at("model.sdf"));
    CHECK(c.get<double>("sdf.model.link.collision.geometry.cylinder.radius") == doctest::Approx(0.2));
    CHECK(c.get<double>("sdf.model.link.collision.geometry.cylinder.length") == doctest::Approx(0.5));

    testing::write_obj(dir / "mesh/m.obj", testing::sample_mesh());
    const ModelSpec mesh = spec_for_sdf(dir, "mesh", "<geometry><mesh><uri>model://mesh/m.obj</uri></mesh></geometry>");
    const auto m = parse_xml(emit_scaled_model(mesh, 1.5).files.at("model.sdf"));
    CHECK(numbers(m.get<std::string>("sdf.model.link.collision.geometry.mesh.scale")) ==
          std::vector<double>{1.5, 1.5, 1.5});

    CHECK_THROWS_AS(emit_scaled_model(box, 3), ScaleError);
    CHECK_THROWS_AS(emit_scaled_model(box, 0.4), ScaleError);
    ModelSpec rigid = box;
    rigid.dynamic_size = false;
    CHECK_THROWS_AS(emit_scaled_model(rigid, 1.5), ScaleError);
  }

  TEST_CASE("scaled models measure as scaled footprints") {
    testing::TempDir dir;
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> scales(kMinScale, kMaxScale);
    for (int i = 0; i < 50; ++i) {
      const auto raw = testing::random_geometries(rng, i % 2 == 0, 1 + static_cast<int>(rng() % 3));
      const std::string name = "m" + std::to_string(i);
      testing::write_text(dir / (name + "/model.sdf"), testing::sdf_for(raw, name));
      ModelEntry e{name, ModelKind::CustomModel};
      e.dynamic_size = true;
      const ModelSpec spec = build_model_spec(e, ResolvedModel{e, dir / name, dir / (name + "/model.sdf")});
      const double k = scales(rng);
      const auto scaled = emit_scaled_model(spec, k);
      const auto info = model_footprint(parse_model_sdf(scaled.files.at("model.sdf")).collisions);
      CHECK(info.width == doctest::Approx(spec.width * k).epsilon(1e-9));
      CHECK(info.length == doctest::Approx(spec.length * k).epsilon(1e-9));
      CHECK(info.height == doctest::Approx(spec.height * k).epsilon(1e-9));
      CHECK(info.z_offset == doctest::Approx(spec.z_offset * k).epsilon(1e-9));
    }
  }

  TEST_CASE("scaled objects in a world") {
    const auto& reg = stacking_registry();
    const auto scene = sample("a = Cube at 0 @ 0, with width 0.3\nb = Cube at 1 @ 0, with width 0.3\nc = Cube at 2 @ 0", 1, reg);
    const auto doc = emit_world(scene);
    std::vector<std::string> names;
    for (const auto& m : doc.referenced_models) names.push_back(m.name);
    CHECK(names == std::vector<std::string>{"cube_scaled_1.50", "cube"});
    CHECK(occurrences(doc.xml, "model://cube_scaled_1.50") == 2);
    CHECK(occurrences(doc.xml, "model://cube<") == 1);
  }

  TEST_CASE("mission yaml") {
    const auto scene = sample("ego = Fetch at 0 @ 0\nw = Waypoint at 1 @ 2.5\nWaypoint at -1 @ 0, facing 90 deg\nCafeTable at 3 @ 3");
    const std::string yaml = emit_mission_yaml(scene);
    CHECK(yaml ==
          "fetch:\n- heading: -1.57\n  x: 0\n  y: 0\n  z: 0.0\n"
          "waypoint:\n- heading: 0\n  x: 1\n  y: 2.5\n  z: 0.0\n"
          "- heading: 1.5707963267948966\n  x: -1\n  y: 0\n  z: 0.0\n");
    const YAML::Node doc = YAML::Load(yaml);
    CHECK(doc.size() == 2);
    CHECK(doc["waypoint"].size() == 2);
    CHECK(doc["waypoint"][1]["heading"].as<double>() == doctest::Approx(std::numbers::pi / 2));
    CHECK(emit_mission_yaml(sample("CafeTable")) == "{}\n");
  }

  TEST_CASE("plot") {
    const auto scene = sample("ego = Fetch at 0 @ 0\nt = CafeTable at 2 @ 2, facing 90 deg\nCafeTable at -2 @ 2");
    const std::string svg = emit_plot_svg(scene);
    const auto doc = parse_xml(svg);
    CHECK(bool(doc.get_child_optional("svg")));
    CHECK(occurrences(svg, "<rect class=\"object") == 3);
    CHECK(occurrences(svg, "<rect class=\"object ego\"") == 1);
    CHECK(occurrences(svg, "<rect class=\"workspace\"") == 1);
    CHECK(occurrences(svg, "rotate(90)") == 1);
    CHECK(occurrences(svg, "<line class=\"heading\"") == 3);
    CHECK(svg.find(">t</text>") != std::string::npos);
  }

  TEST_CASE("scene record round trip") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto scene = sample(read_file(testing::fixture("fetch/fetch_mission.scn")), seed);
      const auto back = scene_from_json(scene_to_json(scene));
      REQUIRE(back.objects.size() == scene.objects.size());
      CHECK(back.seed == scene.seed);
      CHECK(back.workspace == scene.workspace);
      for (std::size_t i = 0; i < scene.objects.size(); ++i) {
        CHECK(back.objects[i].position == scene.objects[i].position);
        CHECK(back.objects[i].heading == scene.objects[i].heading);
        CHECK(back.objects[i].width() == scene.objects[i].width());
      }
      CHECK(emit_plot_svg(back) == emit_plot_svg(scene));
      CHECK(emit_mission_yaml(back) == emit_mission_yaml(scene));
    }
    CHECK_THROWS_AS(scene_from_json("{"), EmitError);
    CHECK_THROWS_AS(scene_from_json("{\"objects\": 3}"), EmitError);
  }

  TEST_CASE("output tree") {
    testing::TempDir dir;
    const auto scene = sample(read_file(testing::fixture("stacking/stacking.scn")), 1, stacking_registry());
    const auto outputs = emit_scene(scene);
    const fs::path out = dir / "out";
    write_output_tree(outputs, out, false);
    for (const char* f : {"scene.world", "mission.yaml", "scene.svg", "scene.json", "models/cube/model.sdf"}) {
      CHECK_MESSAGE(fs::exists(out / f), f);
    }
    CHECK(read_file(out / "scene.world") == outputs.world.xml);

    const auto doc = parse_xml(outputs.world.xml);
    for (const auto& [tag, child] : doc.get_child("sdf.world")) {
      if (tag == "include" && child.get<std::string>("name") == "cube_0") {
        CHECK(numbers(child.get<std::string>("pose"))[2] == doctest::Approx(0.975));
      }
    }

    CHECK_THROWS_AS(write_output_tree(outputs, out, false), EmitError);
    testing::write_text(out / "notes.txt", "keep");
    testing::write_text(out / "models/stale/model.sdf", "old");
    write_output_tree(outputs, out, true);
    CHECK(read_file(out / "notes.txt") == "keep");
    CHECK_FALSE(fs::exists(out / "models/stale"));
    CHECK(fs::exists(out / "scene.world"));

    CHECK(model_path_hint(out) == "export GAZEBO_MODEL_PATH=" + fs::absolute(out / "models").string() + ":$GAZEBO_MODEL_PATH");
  }
}
