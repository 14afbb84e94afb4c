#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "scenegen/descriptor.hpp"
#include "scenegen/error.hpp"
#include "scenegen/util.hpp"
#include "support.hpp"

using namespace scenegen;

TEST_SUITE("util") {
  TEST_CASE("format_number gives the shortest round-trip text") {
    CHECK(format_number(0.0) == "0");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(1.0) == "1");
    CHECK(format_number(-1.57) == "-1.57");
    CHECK(format_number(0.1 + 0.2) == "0.30000000000000004");
    CHECK(format_float(0.0) == "0.0");
    CHECK(format_float(2.0) == "2.0");
    CHECK(format_float(0.25) == "0.25");
  }

  TEST_CASE("format_number round-trips random doubles") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> mag(-30, 30);
    for (int i = 0; i < 20000; ++i) {
      const double v = (rng() & 1 ? 1 : -1) * std::pow(10.0, mag(rng)) * (1 + (rng() % 1000) / 997.0);
      auto back = parse_number(format_number(v));
      REQUIRE(back);
      CHECK(*back == v);
    }
  }

  TEST_CASE("parse_number") {
    CHECK(parse_number(" 2.5 ") == 2.5);
    CHECK(parse_number("+3") == 3.0);
    CHECK(parse_number("1e-3") == 1e-3);
    CHECK_FALSE(parse_number("abc"));
    CHECK_FALSE(parse_number("1.5x"));
    CHECK_FALSE(parse_number(""));
  }
}

TEST_SUITE("descriptor") {
  TEST_CASE("the Fetch descriptor parses with its overrides") {
    const auto d = load_descriptor(testing::fixture("fetch/descriptor.yaml").string());
    REQUIRE(d.models.size() == 6);
    const ModelEntry& fetch = d.models[0];
    CHECK(fetch.name == "fetch");
    CHECK(fetch.kind == ModelKind::MissionOnly);
    CHECK(fetch.width == 0.57);
    CHECK(fetch.length == 0.53);
    CHECK(fetch.heading == -1.57);
    CHECK(d.models[1].kind == ModelKind::MissionOnly);
    CHECK_FALSE(d.models[1].width);
    CHECK(d.models[2].name == "cafe_table");
    CHECK(d.models[2].kind == ModelKind::GazeboModel);
    CHECK(d.models[4].name == "LampAndStand");
    CHECK(d.models[5].kind == ModelKind::CustomModel);
    CHECK(d.models[5].dynamic_size == false);
    CHECK(d.models_dir == "models/");
    CHECK(d.world == "empty_world.world");
    CHECK(d.find("bookshelf") == &d.models[3]);
    CHECK(d.find("missing") == nullptr);
  }

  TEST_CASE("empty model list") {
    CHECK(parse_descriptor("models: []\n").models.empty());
  }

  TEST_CASE("rejections carry the key path") {
    auto rejects = [](const std::string& yaml, const std::string& path) {
      try {
        parse_descriptor(yaml);
        FAIL("accepted: " << yaml);
      } catch (const DescriptorError& e) {
        CHECK(e.key_path() == path);
        CHECK(e.kind() == ErrorKind::Usage);
      }
    };
    rejects("models:\n- name: cube\n  type: GAZEBO_MODEL\n- name: cube\n  type: GAZEBO_MODEL\n", "models[1].name");
    rejects("models:\n- type: GAZEBO_MODEL\n", "models[0].name");
    rejects("models:\n- name: a\n", "models[0].type");
    rejects("models:\n- name: a\n  type: ROBOT\n", "models[0].type");
    rejects("models:\n- name: a\n  type: MISSION_ONLY\n  width: 0\n", "models[0].width");
    rejects("models:\n- name: a\n  type: MISSION_ONLY\n  length: -2\n", "models[0].length");
    rejects("models:\n- name: a\n  type: MISSION_ONLY\n  dynamc_size: true\n", "models[0].dynamc_size");
    rejects("models:\n- name: a\n  type: GAZEBO_MODEL\n  url: http://x/a.zip\n", "models[0].url");
    rejects("models:\n- name: a\n  type: CUSTOM_MODEL\n", "models[0]");
    rejects("models: []\nworlds: x\n", "worlds");
    rejects("models:\n- name: a\n  type: MISSION_ONLY\n  dynamic_size: maybe\n", "models[0].dynamic_size");
  }

  TEST_CASE("the unknown-type error names the entry") {
    try {
      parse_descriptor("models:\n- name: mystery\n  type: ROBOT\n");
      FAIL("accepted");
    } catch (const DescriptorError& e) {
      CHECK(std::string(e.what()).find("mystery") != std::string::npos);
    }
  }

  TEST_CASE("malformed YAML is a descriptor error") {
    CHECK_THROWS_AS(parse_descriptor("models: [\n"), DescriptorError);
    CHECK_THROWS_AS(parse_descriptor("- just\n- a list\n"), DescriptorError);
  }

  TEST_CASE("booleans accept the YAML spellings") {
    const auto d = parse_descriptor(
        "models:\n- name: a\n  type: MISSION_ONLY\n  dynamic_size: False\n"
        "- name: b\n  type: MISSION_ONLY\n  dynamic_size: yes\n");
    CHECK(d.models[0].dynamic_size == false);
    CHECK(d.models[1].dynamic_size == true);
  }

  TEST_CASE("serialize then parse is the identity") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> dim(0.01, 10), ang(-4, 4);
    const ModelKind kinds[] = {ModelKind::GazeboModel, ModelKind::CustomModel, ModelKind::MissionOnly};
    for (int round = 0; round < 200; ++round) {
      ModelDescriptor d;
      if (rng() & 1) d.models_dir = "models dir/" + std::to_string(round);
      if (rng() & 1) d.world = "worlds/w" + std::to_string(round) + ".world";
      const int n = static_cast<int>(rng() % 6);
      for (int i = 0; i < n; ++i) {
        ModelEntry e;
        e.name = "m" + std::to_string(i) + (rng() & 1 ? "_x" : "");
        e.kind = kinds[rng() % 3];
        if (e.kind == ModelKind::CustomModel) {
          if (rng() & 1) e.url = "file:///tmp/m" + std::to_string(i) + ".tar.gz";
          else d.models_dir = "models/";
        }
        if (rng() & 1) e.width = dim(rng);
        if (rng() & 1) e.length = dim(rng);
        if (rng() & 1) e.heading = ang(rng);
        if (rng() & 1) e.dynamic_size = static_cast<bool>(rng() & 1);
        d.models.push_back(e);
      }
      const std::string text = serialize_descriptor(d);
      CAPTURE(text);
      CHECK(parse_descriptor(text) == d);
    }
  }
}
