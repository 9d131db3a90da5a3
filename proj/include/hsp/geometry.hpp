#pragma once

// Implicit scatterer shapes and probe-point sequences.
//
// A shape is described by a signed-distance-like function: negative inside,
// zero on the boundary, positive outside. Balls are exact. Ellipsoids use a
// Newton projection onto the surface. The peanut is a smooth union of two
// equal balls (polynomial smooth-min with blend width 0.2 * radius); its
// value is a true distance only away from the neck.

#include <string>
#include <vector>

#include "hsp/vec.hpp"

namespace hsp::geometry {

enum class ShapeKind { Ball, Ellipsoid, Peanut };

std::string to_string(ShapeKind kind);
ShapeKind shape_kind_from_string(const std::string& name);

struct ShapeSpec {
    ShapeKind kind = ShapeKind::Ball;
    Vec3 center{};
    // Ball: {radius}. Ellipsoid: {a, b, c}. Peanut: {radius, half_separation}.
    std::vector<double> params{1.0};

    static ShapeSpec ball(Vec3 center, double radius);
    static ShapeSpec ellipsoid(Vec3 center, Vec3 semi_axes);
    static ShapeSpec peanut(Vec3 center, double radius, double half_separation);

    // Throws ConfigError on non-positive radii or wrong parameter count.
    void validate() const;

    // Axis-aligned bounding box (lower, upper).
    std::pair<Vec3, Vec3> bounding_box() const;
    double diameter() const;
};

struct SurfacePoint {
    Vec3 position;
    Vec3 normal;
};

struct ProbePath {
    SurfacePoint anchor;
    std::vector<int> indices;
    std::vector<Vec3> points;
};

inline constexpr double kNormalTolerance = 1e-8;

double signed_distance(const ShapeSpec& shape, const Vec3& x);

// Cheap implicit function with the same sign as signed_distance and
// |value| <= true distance (1-Lipschitz). Used in inner loops.
double implicit_value(const ShapeSpec& shape, const Vec3& x);

bool inside(const ShapeSpec& shape, const Vec3& x);

// Outward unit normal at a point within kNormalTolerance of the boundary.
Vec3 normal_at(const ShapeSpec& shape, const Vec3& x);

// Closest boundary point and its outward normal.
SurfacePoint project_to_boundary(const ShapeSpec& shape, const Vec3& x);

// Boundary point hit by the ray center + t*dir, t > 0, with its normal.
// Used to produce candidate anchors from an enclosing sphere.
SurfacePoint boundary_point_along_ray(const ShapeSpec& shape, const Vec3& dir);

// z_j = anchor.position + anchor.normal / j for j = j_min..j_max.
// Throws GeometryError naming the first j whose point is not strictly exterior.
ProbePath probe_path(const ShapeSpec& shape, const SurfacePoint& anchor, int j_min, int j_max);

// Same without the exterior check (anchor need not lie on a shape).
ProbePath probe_path(const SurfacePoint& anchor, int j_min, int j_max);

}  // namespace hsp::geometry
