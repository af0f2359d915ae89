#pragma once

// 2D symmetry operations on entity configurations and the invariance /
// favoring checks for the regularity reward.

#include <span>
#include <string>
#include <vector>

#include "rair/reward.hpp"

namespace rair {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

enum class SymmetryKind { Translation, Rotation, Reflection, GlideReflection };

std::string to_string(SymmetryKind k);

struct SymmetryOp {
  SymmetryKind kind = SymmetryKind::Translation;
  bool axis_aligned = false;
  Vec2 translation;        // Translation
  double angle = 0.0;      // Rotation, radians counter-clockwise
  Vec2 center;             // Rotation
  Vec2 line_point;         // Reflection / GlideReflection
  Vec2 line_direction{1.0, 0.0};
  double glide_distance = 0.0;  // GlideReflection, along line_direction

  static SymmetryOp translate(Vec2 t);
  static SymmetryOp rotate(double angle_rad, Vec2 center);
  static SymmetryOp rotate_degrees(double degrees, Vec2 center);
  static SymmetryOp reflect(Vec2 point, Vec2 direction);
  static SymmetryOp glide(Vec2 point, Vec2 direction, double distance);

  // axis_aligned is derived from the parameters: translations along one axis,
  // rotations by multiples of 90 degrees, lines parallel to an axis.
  Vec2 map(Vec2 p) const;
};

// Transformed copies; colors and frozen flags are preserved, coordinates
// beyond the first two are left untouched.
std::vector<EntityView> apply(const SymmetryOp& op, std::span<const EntityView> entities);

// Composition op∘op.
std::vector<EntityView> apply_twice(const SymmetryOp& op, std::span<const EntityView> entities);

inline constexpr double kInvarianceTolerance = 1e-12;

bool check_invariance(const PhiSpec& spec, const SymmetryOp& op, std::span<const EntityView> entities);

// base: first half A, second half op(A). scrambled: A plus generic points.
bool check_favoring(const PhiSpec& spec, const SymmetryOp& op, std::span<const EntityView> base,
                    std::span<const EntityView> scrambled);

}  // namespace rair
