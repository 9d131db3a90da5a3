#include "hsp/quadrature.hpp"

#include <limits>

namespace hsp::quad {

Region shape_region(const geometry::ShapeSpec& shape) {
    auto [lo, hi] = shape.bounding_box();
    // Pad slightly so boundary cells are cut, never clipped by the box.
    const Vec3 pad = Vec3{1.0, 1.0, 1.0} * (1e-3 * shape.diameter());
    return {[shape](const Vec3& x) { return geometry::implicit_value(shape, x); }, lo - pad, hi + pad};
}

Region ball_region(const Vec3& center, double radius) {
    const Vec3 r = Vec3{1.0, 1.0, 1.0} * (radius * (1.0 + 1e-3));
    return {[center, radius](const Vec3& x) { return norm(x - center) - radius; }, center - r, center + r};
}

Region halfspace_region(const Vec3& point, const Vec3& normal) {
    const Vec3 n = normalized(normal);
    constexpr double big = std::numeric_limits<double>::max() / 4;
    return {[point, n](const Vec3& x) { return dot(x - point, n); }, Vec3{-big, -big, -big}, Vec3{big, big, big}};
}

Region intersect(const Region& a, const Region& b) {
    Region r;
    for (int ax = 0; ax < 3; ++ax) {
        r.lo[ax] = std::max(a.lo[ax], b.lo[ax]);
        r.hi[ax] = std::min(a.hi[ax], b.hi[ax]);
    }
    r.value = [fa = a.value, fb = b.value](const Vec3& x) { return std::max(fa(x), fb(x)); };
    return r;
}

}  // namespace hsp::quad
