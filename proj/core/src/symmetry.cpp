#include "rair/symmetry.hpp"

#include <cmath>
#include <numbers>

#include "rair/error.hpp"

namespace rair {

namespace {

constexpr double kAxisEps = 1e-12;

bool is_axis_direction(Vec2 d) { return std::abs(d.x) < kAxisEps || std::abs(d.y) < kAxisEps; }

bool is_quarter_turn(double angle) {
  const double quarters = angle / (std::numbers::pi / 2.0);
  return std::abs(quarters - std::round(quarters)) < 1e-12;
}

Vec2 unit(Vec2 d) {
  const double n = std::hypot(d.x, d.y);
  if (!(n > 0.0) || !std::isfinite(n)) throw Error("direction vector must be non-zero and finite");
  return {d.x / n, d.y / n};
}

Vec2 reflect_point(Vec2 p, Vec2 point, Vec2 dir) {
  const double rx = p.x - point.x;
  const double ry = p.y - point.y;
  const double along = rx * dir.x + ry * dir.y;
  // p' = point + 2 (r.d) d - r
  return {point.x + 2.0 * along * dir.x - rx, point.y + 2.0 * along * dir.y - ry};
}

}  // namespace

std::string to_string(SymmetryKind k) {
  switch (k) {
    case SymmetryKind::Translation: return "translation";
    case SymmetryKind::Rotation: return "rotation";
    case SymmetryKind::Reflection: return "reflection";
    case SymmetryKind::GlideReflection: return "glide_reflection";
  }
  return "unknown";
}

SymmetryOp SymmetryOp::translate(Vec2 t) {
  SymmetryOp op;
  op.kind = SymmetryKind::Translation;
  op.translation = t;
  op.axis_aligned = is_axis_direction(t);
  return op;
}

SymmetryOp SymmetryOp::rotate(double angle_rad, Vec2 center) {
  SymmetryOp op;
  op.kind = SymmetryKind::Rotation;
  op.angle = angle_rad;
  op.center = center;
  op.axis_aligned = is_quarter_turn(angle_rad);
  return op;
}

SymmetryOp SymmetryOp::rotate_degrees(double degrees, Vec2 center) {
  // exact quarter turns avoid cos(pi/2) != 0 noise
  SymmetryOp op = rotate(degrees * std::numbers::pi / 180.0, center);
  op.axis_aligned = std::fmod(std::abs(degrees), 90.0) == 0.0;
  return op;
}

SymmetryOp SymmetryOp::reflect(Vec2 point, Vec2 direction) {
  SymmetryOp op;
  op.kind = SymmetryKind::Reflection;
  op.line_point = point;
  op.line_direction = unit(direction);
  op.axis_aligned = is_axis_direction(direction);
  return op;
}

SymmetryOp SymmetryOp::glide(Vec2 point, Vec2 direction, double distance) {
  SymmetryOp op = reflect(point, direction);
  op.kind = SymmetryKind::GlideReflection;
  op.glide_distance = distance;
  return op;
}

Vec2 SymmetryOp::map(Vec2 p) const {
  switch (kind) {
    case SymmetryKind::Translation:
      return {p.x + translation.x, p.y + translation.y};
    case SymmetryKind::Rotation: {
      double c = std::cos(angle);
      double s = std::sin(angle);
      if (axis_aligned) {
        // snap quarter turns to exact integers so bin centers map to bin centers
        c = std::round(c);
        s = std::round(s);
      }
      const double rx = p.x - center.x;
      const double ry = p.y - center.y;
      return {center.x + c * rx - s * ry, center.y + s * rx + c * ry};
    }
    case SymmetryKind::Reflection:
      if (axis_aligned) {
        if (std::abs(line_direction.y) < kAxisEps) return {p.x, 2.0 * line_point.y - p.y};
        return {2.0 * line_point.x - p.x, p.y};
      }
      return reflect_point(p, line_point, line_direction);
    case SymmetryKind::GlideReflection: {
      Vec2 q;
      if (axis_aligned) {
        q = std::abs(line_direction.y) < kAxisEps ? Vec2{p.x, 2.0 * line_point.y - p.y}
                                                  : Vec2{2.0 * line_point.x - p.x, p.y};
      } else {
        q = reflect_point(p, line_point, line_direction);
      }
      return {q.x + glide_distance * line_direction.x, q.y + glide_distance * line_direction.y};
    }
  }
  return p;
}

std::vector<EntityView> apply(const SymmetryOp& op, std::span<const EntityView> entities) {
  std::vector<EntityView> out(entities.begin(), entities.end());
  for (auto& e : out) {
    if (e.dims < 2) throw Error("symmetry operations need 2D entities");
    const Vec2 q = op.map({e.position[0], e.position[1]});
    e.position[0] = q.x;
    e.position[1] = q.y;
  }
  return out;
}

std::vector<EntityView> apply_twice(const SymmetryOp& op, std::span<const EntityView> entities) {
  const auto once = rair::apply(op, entities);
  return rair::apply(op, once);
}

bool check_invariance(const PhiSpec& spec, const SymmetryOp& op, std::span<const EntityView> entities) {
  if (entities.empty()) throw Error("no entities");
  const double before = rair_reward(entities, spec);
  const auto moved = rair::apply(op, entities);
  const double after = rair_reward(moved, spec);
  return std::abs(before - after) <= kInvarianceTolerance;
}

bool check_favoring(const PhiSpec& spec, const SymmetryOp& /*op*/, std::span<const EntityView> base,
                    std::span<const EntityView> scrambled) {
  if (base.size() != scrambled.size()) throw Error("base and scrambled configurations differ in entity count");
  return rair_reward(base, spec) > rair_reward(scrambled, spec);
}

}  // namespace rair
