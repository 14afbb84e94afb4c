#include "scenegen/sampler.hpp"

#include <cmath>
#include <numbers>

#include "scenegen/error.hpp"
#include "scenegen/util.hpp"

namespace scenegen {

using namespace dsl;

namespace {

constexpr double kScaleSlack = 1e-12;

OrientedRect default_workspace() {
  return {{0, 0}, 0, kDefaultWorkspaceSize / 2, kDefaultWorkspaceSize / 2};
}

double as_number(const Value& v, std::string_view what) {
  if (auto d = std::get_if<double>(&v)) return *d;
  throw EvalError(std::string(what) + " must be a number, got " + describe(v));
}

bool as_bool(const Value& v, std::string_view what) {
  if (auto b = std::get_if<bool>(&v)) return *b;
  throw EvalError(std::string(what) + " must be True or False, got " + describe(v));
}

Point2 as_point(const Value& v, std::string_view what) {
  if (auto p = std::get_if<Point2>(&v)) return *p;
  throw EvalError(std::string(what) + " must be a point (x @ y), got " + describe(v));
}

std::string at(const SourcePos& p) {
  return " (line " + std::to_string(p.line) + ", column " + std::to_string(p.column) + ")";
}

Value binary(BinOp op, const Value& l, const Value& r, const SourcePos& pos) {
  const auto* ln = std::get_if<double>(&l);
  const auto* rn = std::get_if<double>(&r);
  const auto* lp = std::get_if<Point2>(&l);
  const auto* rp = std::get_if<Point2>(&r);
  switch (op) {
    case BinOp::Add:
      if (ln && rn) return *ln + *rn;
      if (lp && rp) return *lp + *rp;
      break;
    case BinOp::Sub:
      if (ln && rn) return *ln - *rn;
      if (lp && rp) return *lp - *rp;
      break;
    case BinOp::Mul:
      if (ln && rn) return *ln * *rn;
      if (lp && rn) return *lp * *rn;
      if (ln && rp) return *rp * *ln;
      break;
    case BinOp::Div:
      if (rn && *rn == 0.0 && (ln || lp)) throw EvalError("division by zero" + at(pos));
      if (ln && rn) return *ln / *rn;
      if (lp && rn) return *lp * (1.0 / *rn);
      break;
  }
  throw EvalError("unsupported operands " + describe(l) + " and " + describe(r) + at(pos));
}

Point2 uniform_in(const OrientedRect& region, Rng& rng) {
  const double u = rng.uniform(-region.half_width, region.half_width);
  const double v = rng.uniform(-region.half_length, region.half_length);
  return region.center + heading_right(region.heading) * u + heading_dir(region.heading) * v;
}

// Evaluated form of one specifier.
struct Resolved {
  const Specifier* spec;
  std::optional<Value> value;
  std::optional<Point2> point;           // point operand
  const SceneObject* object = nullptr;   // object operand
};

}  // namespace

std::string describe(const Value& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, double>) return "number " + format_number(x);
        else if constexpr (std::is_same_v<T, bool>) return x ? "True" : "False";
        else if constexpr (std::is_same_v<T, Point2>) return "point " + format_number(x.x) + " @ " + format_number(x.y);
        else return "region";
      },
      v);
}

Env::Env() : workspace(default_workspace()) {}

const SceneObject* Env::object(std::string_view name) const {
  auto it = object_index.find(name);
  return it == object_index.end() ? nullptr : &objects[it->second];
}

Value evaluate_expr(const Expr& e, const Env& env, Rng& rng) {
  return std::visit(
      [&](const auto& x) -> Value {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, expr::Num>) return x.value;
        else if constexpr (std::is_same_v<T, expr::Bool>) return x.value;
        else if constexpr (std::is_same_v<T, expr::Point>) {
          const double px = as_number(evaluate_expr(*x.x, env, rng), "point x");
          const double py = as_number(evaluate_expr(*x.y, env, rng), "point y");
          return Point2{px, py};
        } else if constexpr (std::is_same_v<T, expr::Range>) {
          const double lo = as_number(evaluate_expr(*x.lo, env, rng), "Range bound");
          const double hi = as_number(evaluate_expr(*x.hi, env, rng), "Range bound");
          if (lo > hi) {
            throw EvalError("Range(" + format_number(lo) + ", " + format_number(hi) + ") has lo > hi" + at(e.pos));
          }
          return rng.uniform(lo, hi);
        } else if constexpr (std::is_same_v<T, expr::Uniform>) {
          const std::size_t k = rng.index(x.options.size());
          return evaluate_expr(*x.options[k], env, rng);
        } else if constexpr (std::is_same_v<T, expr::Deg>) {
          return as_number(evaluate_expr(*x.inner, env, rng), "deg operand") * std::numbers::pi / 180.0;
        } else if constexpr (std::is_same_v<T, expr::Binary>) {
          Value l = evaluate_expr(*x.lhs, env, rng);
          Value r = evaluate_expr(*x.rhs, env, rng);
          return binary(x.op, l, r, e.pos);
        } else if constexpr (std::is_same_v<T, expr::Neg>) {
          Value v = evaluate_expr(*x.inner, env, rng);
          if (auto d = std::get_if<double>(&v)) return -*d;
          if (auto p = std::get_if<Point2>(&v)) return *p * -1.0;
          throw EvalError("cannot negate " + describe(v) + at(e.pos));
        } else if constexpr (std::is_same_v<T, expr::Var>) {
          if (x.name == "workspace") return env.workspace;
          if (auto it = env.vars.find(x.name); it != env.vars.end()) return it->second;
          if (const SceneObject* o = env.object(x.name)) return o->position;
          throw EvalError("'" + x.name + "' is not bound" + at(e.pos));
        } else if constexpr (std::is_same_v<T, expr::AttrRef>) {
          const SceneObject* o = env.object(x.object);
          if (!o) throw EvalError("object '" + x.object + "' is not placed yet" + at(e.pos));
          switch (x.attr) {
            case Attr::Position: return o->position;
            case Attr::Heading: return o->heading;
            case Attr::Width: return o->width();
            case Attr::Length: return o->length();
            case Attr::Height: return o->height();
            case Attr::Z: return o->z;
          }
          return 0.0;
        } else if constexpr (std::is_same_v<T, expr::Region>) {
          const Point2 c = as_point(evaluate_expr(*x.center, env, rng), "region center");
          const double h = as_number(evaluate_expr(*x.heading, env, rng), "region heading");
          const double w = as_number(evaluate_expr(*x.width, env, rng), "region width");
          const double l = as_number(evaluate_expr(*x.length, env, rng), "region length");
          if (!(w > 0) || !(l > 0)) throw EvalError("region width and length must be > 0" + at(e.pos));
          return OrientedRect{c, h, w / 2, l / 2};
        }
      },
      e.node);
}

SceneObject place_instance(const stmt::Instance& decl, const ModelSpec& spec, const Env& env, Rng& rng) {
  SceneObject obj;
  obj.instance_name = decl.internal_name;
  obj.spec = spec;
  obj.mission_only = spec.mission_only();
  obj.is_ego = decl.name && *decl.name == "ego";
  obj.allow_collisions = !spec.collidable;

  // 1. evaluate every specifier expression in source order
  std::vector<Resolved> resolved;
  for (const auto& s : decl.specifiers) {
    Resolved r{&s, {}, {}, nullptr};
    if (s.operand.object) {
      r.object = env.object(*s.operand.object);
      if (!r.object) throw EvalError("object '" + *s.operand.object + "' is not placed yet" + at(s.pos));
    } else if (s.operand.point) {
      r.point = as_point(evaluate_expr(*s.operand.point, env, rng), "operand");
    }
    if (s.value) r.value = evaluate_expr(*s.value, env, rng);
    resolved.push_back(std::move(r));
  }

  // 2. properties
  std::optional<double> req_width, req_length;
  for (const auto& r : resolved) {
    if (r.spec->kind != SpecKind::With) continue;
    const std::string& prop = r.spec->name;
    if (prop == "allowCollisions") obj.allow_collisions = as_bool(*r.value, "allowCollisions");
    else if (prop == "z") obj.z = as_number(*r.value, "z");
    else if (prop == "width") req_width = as_number(*r.value, "width");
    else if (prop == "length") req_length = as_number(*r.value, "length");
  }
  if (req_width || req_length) {
    if ((req_width && !(*req_width > 0)) || (req_length && !(*req_length > 0))) {
      throw ScaleError("requested size of '" + decl.internal_name + "' must be > 0");
    }
    if (spec.builtin) {
      obj.custom_dims = Dims{req_width.value_or(spec.width), req_length.value_or(spec.length), spec.height};
    } else {
      const double scale = req_width ? *req_width / spec.width : *req_length / spec.length;
      if (req_width && req_length && std::abs(*req_length / spec.length - scale) > 1e-9 * scale) {
        throw ScaleError("'" + decl.internal_name + "': width and length imply different scales; resizing is uniform");
      }
      if (!spec.dynamic_size && std::abs(scale - 1) > kScaleSlack) {
        throw ScaleError("model " + spec.name + " is not resizable (dynamic_size is false)");
      }
      if (scale < kMinScale - kScaleSlack || scale > kMaxScale + kScaleSlack) {
        throw ScaleError("'" + decl.internal_name + "': scale " + format_number(scale) +
                         " is outside [0.5, 2.0]");
      }
      obj.scale = std::abs(scale - 1) <= kScaleSlack ? 1.0 : scale;
    }
  }

  // 3. heading
  for (const auto& r : resolved) {
    if (r.spec->kind == SpecKind::Facing) obj.heading = as_number(*r.value, "facing");
  }

  // 4. position
  const Resolved* position = nullptr;
  for (const auto& r : resolved) {
    if (is_position_specifier(r.spec->kind)) position = &r;
  }
  if (!position) {
    obj.position = uniform_in(env.workspace, rng);
  } else {
    const Resolved& r = *position;
    const double self_w = obj.width(), self_l = obj.length();
    switch (r.spec->kind) {
      case SpecKind::At: obj.position = as_point(*r.value, "at"); break;
      case SpecKind::OffsetBy: {
        if (!env.ego) throw EvalError("'offset by' needs ego to be defined first" + at(r.spec->pos));
        const SceneObject& ego = env.objects[*env.ego];
        obj.position = ego.position + rotate(as_point(*r.value, "offset"), ego.heading);
        break;
      }
      case SpecKind::InRegion: {
        OrientedRect region;
        if (r.spec->name == "workspace") {
          region = env.workspace;
        } else {
          auto it = env.vars.find(r.spec->name);
          if (it == env.vars.end() || !std::holds_alternative<OrientedRect>(it->second)) {
            throw EvalError("'" + r.spec->name + "' is not a region" + at(r.spec->pos));
          }
          region = std::get<OrientedRect>(it->second);
        }
        obj.position = uniform_in(region, rng);
        break;
      }
      case SpecKind::AheadOf:
      case SpecKind::Behind: {
        const double sign = r.spec->kind == SpecKind::AheadOf ? 1.0 : -1.0;
        if (r.object) {
          const double d = r.value ? as_number(*r.value, "distance") : (r.object->length() + self_l) / 2;
          obj.position = r.object->position + heading_dir(r.object->heading) * (sign * d);
        } else {
          const double d = r.value ? as_number(*r.value, "distance") : self_l / 2;
          obj.position = *r.point + heading_dir(obj.heading) * (sign * d);
        }
        break;
      }
      case SpecKind::LeftOf:
      case SpecKind::RightOf: {
        const double sign = r.spec->kind == SpecKind::RightOf ? 1.0 : -1.0;
        if (r.object) {
          const double d = r.object->width() / 2 + self_w / 2;
          obj.position = r.object->position + heading_right(r.object->heading) * (sign * d);
        } else {
          obj.position = *r.point + heading_right(obj.heading) * (sign * self_w / 2);
        }
        break;
      }
      default: break;
    }
  }
  obj.heading = normalize_heading(obj.heading);
  if (!std::isfinite(obj.position.x) || !std::isfinite(obj.position.y) || !std::isfinite(obj.heading)) {
    throw EvalError("'" + decl.internal_name + "' has a non-finite placement");
  }
  return obj;
}

OrientedRect rect_of(const SceneObject& o) { return {o.position, o.heading, o.width() / 2, o.length() / 2}; }

std::vector<SceneObject> expand_create_room(const stmt::CreateRoom& room, const Env& env, Rng& rng,
                                            const ModelSpec& wall, int room_index) {
  const double length = as_number(evaluate_expr(*room.length, env, rng), "room length");
  const double width = as_number(evaluate_expr(*room.width, env, rng), "room width");
  const double x = as_number(evaluate_expr(*room.x, env, rng), "room x");
  const double y = as_number(evaluate_expr(*room.y, env, rng), "room y");
  if (!(length > 0) || !(width > 0)) throw EvalError("create_room dimensions must be > 0");
  if (!valid_sides(room.sides)) {
    throw EvalError("create_room sides '" + room.sides + "' must be a nonempty combination of N, S, W, E without repeats");
  }
  const double t = kWallThickness;
  std::vector<SceneObject> walls;
  for (char side : room.sides) {
    SceneObject w;
    w.spec = wall;
    w.instance_name = "room" + std::to_string(room_index) + "_" + side;
    w.room_wall = true;
    switch (side) {
      case 'N':
        w.position = {x, y + length / 2 - t / 2};
        w.custom_dims = Dims{width, t, kWallHeight};
        break;
      case 'S':
        w.position = {x, y - length / 2 + t / 2};
        w.custom_dims = Dims{width, t, kWallHeight};
        break;
      case 'E':
        w.position = {x + width / 2 - t / 2, y};
        w.custom_dims = Dims{t, length, kWallHeight};
        break;
      case 'W':
        w.position = {x - width / 2 + t / 2, y};
        w.custom_dims = Dims{t, length, kWallHeight};
        break;
    }
    walls.push_back(std::move(w));
  }
  return walls;
}

bool collision_exempt(const SceneObject& a, const SceneObject& b) {
  return a.allow_collisions || b.allow_collisions || (a.room_wall && b.room_wall);
}

std::optional<std::string> first_violation(const ConcreteScene& scene) {
  const auto& objs = scene.objects;
  for (const auto& o : objs) {
    if (!rect_contains(scene.workspace, rect_of(o))) {
      return "object '" + o.instance_name + "' is not inside the workspace";
    }
  }
  for (std::size_t i = 0; i < objs.size(); ++i) {
    for (std::size_t j = i + 1; j < objs.size(); ++j) {
      if (collision_exempt(objs[i], objs[j])) continue;
      if (rects_intersect(rect_of(objs[i]), rect_of(objs[j]))) {
        return "objects '" + objs[i].instance_name + "' and '" + objs[j].instance_name + "' collide";
      }
    }
  }
  return std::nullopt;
}

namespace {

ConcreteScene attempt(const ScenarioAst& ast, const Registry& registry, Rng& rng) {
  Env env;
  int rooms = 0;
  const ModelSpec* wall = registry.find("Wall");
  for (const auto& st : ast.statements) {
    std::visit(
        [&](const auto& s) {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, stmt::Assign>) {
            env.vars[s.name] = evaluate_expr(*s.value, env, rng);
          } else if constexpr (std::is_same_v<T, stmt::Workspace>) {
            Value v = evaluate_expr(*s.region, env, rng);
            if (!std::holds_alternative<OrientedRect>(v)) throw EvalError("Workspace needs a region, got " + describe(v));
            env.workspace = std::get<OrientedRect>(v);
          } else if constexpr (std::is_same_v<T, stmt::CreateRoom>) {
            for (auto& w : expand_create_room(s, env, rng, *wall, rooms)) {
              env.object_index[w.instance_name] = env.objects.size();
              env.objects.push_back(std::move(w));
            }
            ++rooms;
          } else if constexpr (std::is_same_v<T, stmt::Instance>) {
            const ModelSpec* spec = registry.find(s.type_name);
            if (!spec) throw EvalError("unknown model type '" + s.type_name + "'");
            SceneObject obj = place_instance(s, *spec, env, rng);
            if (obj.is_ego) env.ego = env.objects.size();
            env.object_index[obj.instance_name] = env.objects.size();
            env.objects.push_back(std::move(obj));
          } else if constexpr (std::is_same_v<T, stmt::PropertySet>) {
            auto it = env.object_index.find(s.object);
            if (it == env.object_index.end()) throw EvalError("object '" + s.object + "' is not placed yet");
            Value v = evaluate_expr(*s.value, env, rng);
            SceneObject& o = env.objects[it->second];
            if (s.property == "allowCollisions") o.allow_collisions = as_bool(v, "allowCollisions");
            else o.z = as_number(v, "z");
          }
        },
        st.node);
  }
  ConcreteScene scene;
  scene.objects = std::move(env.objects);
  scene.workspace = env.workspace;
  return scene;
}

}  // namespace

ConcreteScene sample_scene(const ScenarioAst& ast, const Registry& registry, std::uint64_t seed, int max_attempts) {
  if (max_attempts < 1) throw Error(ErrorKind::Usage, "max_attempts must be >= 1");
  Rng rng(seed);
  std::string last_violation;
  for (int n = 1; n <= max_attempts; ++n) {
    ConcreteScene scene = attempt(ast, registry, rng);
    auto violation = first_violation(scene);
    if (!violation) {
      scene.seed = seed;
      scene.attempts = n;
      return scene;
    }
    last_violation = *violation;
  }
  throw UnsatisfiableError("no valid scene after " + std::to_string(max_attempts) +
                           " attempts; last attempt failed because " + last_violation);
}

dsl::TypeResolver type_resolver(const Registry& registry) {
  return [&registry](std::string_view name) -> std::optional<std::string> {
    if (const ModelSpec* s = registry.find(name)) return s->name;
    return std::nullopt;
  };
}

}  // namespace scenegen
