#include "hsp/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

#include "hsp/errors.hpp"

namespace hsp::geometry {

namespace {

struct Closest {
    Vec3 point;
    double distance;  // unsigned
};

// ---------------------------------------------------------------------------
// Ellipsoid closest point (robust bisection on the Lagrange multiplier).
// Semi-axes sorted e0 >= e1 >= e2, query y in the first octant.

double robust_length(double a, double b) { return std::hypot(a, b); }
double robust_length(double a, double b, double c) { return std::hypot(a, b, c); }

double root_2d(double r0, double z0, double z1, double g) {
    const double n0 = r0 * z0;
    double s0 = z1 - 1.0;
    double s1 = g < 0.0 ? 0.0 : robust_length(n0, z1) - 1.0;
    double s = 0.0;
    for (int i = 0; i < 1100; ++i) {
        s = 0.5 * (s0 + s1);
        if (s == s0 || s == s1) break;
        const double a = n0 / (s + r0), b = z1 / (s + 1.0);
        const double gg = a * a + b * b - 1.0;
        if (gg > 0.0) s0 = s;
        else if (gg < 0.0) s1 = s;
        else break;
    }
    return s;
}

double root_3d(double r0, double r1, double z0, double z1, double z2, double g) {
    const double n0 = r0 * z0, n1 = r1 * z1;
    double s0 = z2 - 1.0;
    double s1 = g < 0.0 ? 0.0 : robust_length(n0, n1, z2) - 1.0;
    double s = 0.0;
    for (int i = 0; i < 1100; ++i) {
        s = 0.5 * (s0 + s1);
        if (s == s0 || s == s1) break;
        const double a = n0 / (s + r0), b = n1 / (s + r1), c = z2 / (s + 1.0);
        const double gg = a * a + b * b + c * c - 1.0;
        if (gg > 0.0) s0 = s;
        else if (gg < 0.0) s1 = s;
        else break;
    }
    return s;
}

// e0 >= e1, y >= 0. Writes the closest point into x.
double ellipse_distance(double e0, double e1, double y0, double y1, double& x0, double& x1) {
    if (y1 > 0.0) {
        if (y0 > 0.0) {
            const double z0 = y0 / e0, z1 = y1 / e1;
            const double g = z0 * z0 + z1 * z1 - 1.0;
            if (g != 0.0) {
                const double r0 = (e0 / e1) * (e0 / e1);
                const double s = root_2d(r0, z0, z1, g);
                x0 = r0 * y0 / (s + r0);
                x1 = y1 / (s + 1.0);
                return std::hypot(x0 - y0, x1 - y1);
            }
            x0 = y0;
            x1 = y1;
            return 0.0;
        }
        x0 = 0.0;
        x1 = e1;
        return std::abs(y1 - e1);
    }
    const double numer0 = e0 * y0, denom0 = e0 * e0 - e1 * e1;
    if (numer0 < denom0) {
        const double xde0 = numer0 / denom0;
        x0 = e0 * xde0;
        x1 = e1 * std::sqrt(1.0 - xde0 * xde0);
        return std::hypot(x0 - y0, x1);
    }
    x0 = e0;
    x1 = 0.0;
    return std::abs(y0 - e0);
}

double ellipsoid_distance(const std::array<double, 3>& e, const std::array<double, 3>& y,
                          std::array<double, 3>& x) {
    if (y[2] > 0.0) {
        if (y[1] > 0.0) {
            if (y[0] > 0.0) {
                const double z0 = y[0] / e[0], z1 = y[1] / e[1], z2 = y[2] / e[2];
                const double g = z0 * z0 + z1 * z1 + z2 * z2 - 1.0;
                if (g != 0.0) {
                    const double r0 = (e[0] / e[2]) * (e[0] / e[2]);
                    const double r1 = (e[1] / e[2]) * (e[1] / e[2]);
                    const double s = root_3d(r0, r1, z0, z1, z2, g);
                    x[0] = r0 * y[0] / (s + r0);
                    x[1] = r1 * y[1] / (s + r1);
                    x[2] = y[2] / (s + 1.0);
                    return std::hypot(x[0] - y[0], x[1] - y[1], x[2] - y[2]);
                }
                x = y;
                return 0.0;
            }
            x[0] = 0.0;
            return ellipse_distance(e[1], e[2], y[1], y[2], x[1], x[2]);
        }
        if (y[0] > 0.0) {
            x[1] = 0.0;
            return ellipse_distance(e[0], e[2], y[0], y[2], x[0], x[2]);
        }
        x[0] = 0.0;
        x[1] = 0.0;
        x[2] = e[2];
        return std::abs(y[2] - e[2]);
    }
    const double denom0 = e[0] * e[0] - e[2] * e[2];
    const double denom1 = e[1] * e[1] - e[2] * e[2];
    const double numer0 = e[0] * y[0], numer1 = e[1] * y[1];
    if (numer0 < denom0 && numer1 < denom1) {
        const double xde0 = numer0 / denom0, xde1 = numer1 / denom1;
        const double discr = 1.0 - xde0 * xde0 - xde1 * xde1;
        if (discr > 0.0) {
            x[0] = e[0] * xde0;
            x[1] = e[1] * xde1;
            x[2] = e[2] * std::sqrt(discr);
            return std::hypot(x[0] - y[0], x[1] - y[1], x[2]);
        }
    }
    x[2] = 0.0;
    return ellipse_distance(e[0], e[1], y[0], y[1], x[0], x[1]);
}

Closest ellipsoid_closest(const ShapeSpec& s, const Vec3& p) {
    const Vec3 rel = p - s.center;
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return s.params[a] > s.params[b]; });
    std::array<double, 3> e{}, y{}, x{};
    for (int i = 0; i < 3; ++i) {
        e[i] = s.params[order[i]];
        y[i] = std::abs(rel[order[i]]);
    }
    const double d = ellipsoid_distance(e, y, x);
    Vec3 q;
    for (int i = 0; i < 3; ++i) {
        const int a = order[i];
        q[a] = std::copysign(x[i], rel[a]);
    }
    return {s.center + q, d};
}

double ellipsoid_level(const ShapeSpec& s, const Vec3& p) {
    const Vec3 rel = p - s.center;
    double f = 0.0;
    for (int i = 0; i < 3; ++i) f += (rel[i] / s.params[i]) * (rel[i] / s.params[i]);
    return f - 1.0;
}

// ---------------------------------------------------------------------------
// Peanut: cubic smooth-min of two ball distances along the z axis.

double peanut_blend(const ShapeSpec& s) { return 0.2 * s.params[0]; }

double smooth_min(double a, double b, double k) {
    const double h = std::max(k - std::abs(a - b), 0.0) / k;
    return std::min(a, b) - h * h * h * k / 6.0;
}

// Profile function in the meridional plane (rho >= 0, z relative to center).
double peanut_profile(const ShapeSpec& s, double rho, double z) {
    const double R = s.params[0], c = s.params[1];
    const double d1 = std::hypot(rho, z - c) - R;
    const double d2 = std::hypot(rho, z + c) - R;
    return smooth_min(d1, d2, peanut_blend(s));
}

double peanut_implicit(const ShapeSpec& s, const Vec3& p) {
    const Vec3 rel = p - s.center;
    return peanut_profile(s, std::hypot(rel[0], rel[1]), rel[2]);
}

// Half-height of the blended neck region on the surface.
double peanut_blend_extent(const ShapeSpec& s) {
    const double R = s.params[0], c = s.params[1], k = peanut_blend(s);
    const double cosphi = ((R + k) * (R + k) - R * R - 4.0 * c * c) / (4.0 * c * R);
    return c + R * std::clamp(cosphi, -1.0, 1.0);
}

// Surface radius at height z inside the blend band (profile increasing in rho).
double peanut_radius_at(const ShapeSpec& s, double z) {
    double lo = 0.0, hi = s.params[0] + s.params[1] + peanut_blend(s);
    if (peanut_profile(s, lo, z) >= 0.0) return 0.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (peanut_profile(s, mid, z) < 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Closest peanut_closest(const ShapeSpec& s, const Vec3& p) {
    const double R = s.params[0], c = s.params[1];
    const Vec3 rel = p - s.center;
    const double rho = std::hypot(rel[0], rel[1]);
    const double z = rel[2];
    const double zb = peanut_blend_extent(s);

    double best_d = std::numeric_limits<double>::infinity();
    double best_rho = 0.0, best_z = 0.0;
    auto consider = [&](double r, double zz) {
        const double d = std::hypot(rho - r, z - zz);
        if (d < best_d) {
            best_d = d;
            best_rho = r;
            best_z = zz;
        }
    };
    // Spherical caps outside the blend band.
    for (double sign : {1.0, -1.0}) {
        const double cz = sign * c;
        const double dr = rho, dz = z - cz;
        const double len = std::hypot(dr, dz);
        double qr, qz;
        if (len > 0.0) {
            qr = R * dr / len;
            qz = cz + R * dz / len;
        } else {
            qr = 0.0;
            qz = cz + sign * R;
        }
        if (sign * qz >= zb) consider(qr, qz);
        // arc endpoint
        const double er = std::sqrt(std::max(R * R - (zb - c) * (zb - c), 0.0));
        consider(er, sign * zb);
    }
    // Blend band, parametrized by height.
    if (zb > 0.0) {
        auto dist_at = [&](double zz) { return std::hypot(rho - peanut_radius_at(s, zz), z - zz); };
        constexpr int kSamples = 64;
        int best_i = 0;
        double best_sample = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= kSamples; ++i) {
            const double zz = -zb + 2.0 * zb * i / kSamples;
            const double d = dist_at(zz);
            if (d < best_sample) {
                best_sample = d;
                best_i = i;
            }
        }
        double a = -zb + 2.0 * zb * std::max(best_i - 1, 0) / kSamples;
        double b = -zb + 2.0 * zb * std::min(best_i + 1, kSamples) / kSamples;
        const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
        double f1 = dist_at(x1), f2 = dist_at(x2);
        for (int it = 0; it < 200 && b - a > 1e-15 * (1.0 + std::abs(a)); ++it) {
            if (f1 < f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - gr * (b - a);
                f1 = dist_at(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + gr * (b - a);
                f2 = dist_at(x2);
            }
        }
        const double zz = 0.5 * (a + b);
        consider(peanut_radius_at(s, zz), zz);
    }
    Vec3 q;
    if (rho > 0.0) {
        q = Vec3{rel[0] / rho * best_rho, rel[1] / rho * best_rho, best_z};
    } else {
        q = Vec3{best_rho, 0.0, best_z};
    }
    return {s.center + q, best_d};
}

Vec3 peanut_gradient(const ShapeSpec& s, const Vec3& p) {
    constexpr double step = 1e-6;
    Vec3 g;
    for (int i = 0; i < 3; ++i) {
        Vec3 a = p, b = p;
        a[i] += step;
        b[i] -= step;
        g[i] = (peanut_implicit(s, a) - peanut_implicit(s, b)) / (2.0 * step);
    }
    return g;
}

}  // namespace

std::string to_string(ShapeKind kind) {
    switch (kind) {
        case ShapeKind::Ball: return "ball";
        case ShapeKind::Ellipsoid: return "ellipsoid";
        case ShapeKind::Peanut: return "peanut";
    }
    return "unknown";
}

ShapeKind shape_kind_from_string(const std::string& name) {
    if (name == "ball") return ShapeKind::Ball;
    if (name == "ellipsoid") return ShapeKind::Ellipsoid;
    if (name == "peanut") return ShapeKind::Peanut;
    throw ConfigError("unknown shape kind '" + name + "'");
}

ShapeSpec ShapeSpec::ball(Vec3 center, double radius) {
    return {ShapeKind::Ball, center, {radius}};
}
ShapeSpec ShapeSpec::ellipsoid(Vec3 center, Vec3 semi_axes) {
    return {ShapeKind::Ellipsoid, center, {semi_axes[0], semi_axes[1], semi_axes[2]}};
}
ShapeSpec ShapeSpec::peanut(Vec3 center, double radius, double half_separation) {
    return {ShapeKind::Peanut, center, {radius, half_separation}};
}

void ShapeSpec::validate() const {
    std::size_t expected = 0;
    switch (kind) {
        case ShapeKind::Ball: expected = 1; break;
        case ShapeKind::Ellipsoid: expected = 3; break;
        case ShapeKind::Peanut: expected = 2; break;
    }
    if (params.size() != expected) {
        std::ostringstream os;
        os << to_string(kind) << " expects " << expected << " params, got " << params.size();
        throw ConfigError(os.str());
    }
    for (double p : params)
        if (!(p > 0.0) || !std::isfinite(p))
            throw ConfigError(to_string(kind) + ": radii/semi-axes must be strictly positive");
    // Keeps the blended neck away from the poles so the surface stays a graph over the axis there.
    if (kind == ShapeKind::Peanut && (params[1] < 0.5 * params[0] || params[1] >= params[0]))
        throw ConfigError("peanut: half_separation must lie in [0.5, 1) x radius");
}

std::pair<Vec3, Vec3> ShapeSpec::bounding_box() const {
    Vec3 half;
    switch (kind) {
        case ShapeKind::Ball: half = {params[0], params[0], params[0]}; break;
        case ShapeKind::Ellipsoid: half = {params[0], params[1], params[2]}; break;
        case ShapeKind::Peanut: half = {params[0], params[0], params[0] + params[1]}; break;
    }
    return {center - half, center + half};
}

double ShapeSpec::diameter() const {
    const auto [lo, hi] = bounding_box();
    double d = 0.0;
    for (int i = 0; i < 3; ++i) d = std::max(d, hi[i] - lo[i]);
    return d;
}

double signed_distance(const ShapeSpec& shape, const Vec3& x) {
    switch (shape.kind) {
        case ShapeKind::Ball: return norm(x - shape.center) - shape.params.at(0);
        case ShapeKind::Ellipsoid: {
            const double d = ellipsoid_closest(shape, x).distance;
            return ellipsoid_level(shape, x) < 0.0 ? -d : d;
        }
        case ShapeKind::Peanut: {
            const double d = peanut_closest(shape, x).distance;
            return peanut_implicit(shape, x) < 0.0 ? -d : d;
        }
    }
    throw ConfigError("unknown shape kind");
}

double implicit_value(const ShapeSpec& shape, const Vec3& x) {
    switch (shape.kind) {
        case ShapeKind::Ball: return norm(x - shape.center) - shape.params[0];
        case ShapeKind::Ellipsoid: {
            const Vec3 rel = x - shape.center;
            double q = 0.0;
            for (int i = 0; i < 3; ++i) q += (rel[i] / shape.params[i]) * (rel[i] / shape.params[i]);
            const double amin = std::min({shape.params[0], shape.params[1], shape.params[2]});
            return (std::sqrt(q) - 1.0) * amin;
        }
        case ShapeKind::Peanut: return peanut_implicit(shape, x);
    }
    throw ConfigError("unknown shape kind");
}

bool inside(const ShapeSpec& shape, const Vec3& x) { return implicit_value(shape, x) < 0.0; }

Vec3 normal_at(const ShapeSpec& shape, const Vec3& x) {
    const double sd = signed_distance(shape, x);
    if (std::abs(sd) > kNormalTolerance) {
        std::ostringstream os;
        os << "normal_at: point is " << sd << " from the boundary (tolerance " << kNormalTolerance << ")";
        throw PreconditionError(os.str());
    }
    switch (shape.kind) {
        case ShapeKind::Ball: return normalized(x - shape.center);
        case ShapeKind::Ellipsoid: {
            const Vec3 rel = x - shape.center;
            Vec3 g;
            for (int i = 0; i < 3; ++i) g[i] = rel[i] / (shape.params[i] * shape.params[i]);
            return normalized(g);
        }
        case ShapeKind::Peanut: return normalized(peanut_gradient(shape, x));
    }
    throw ConfigError("unknown shape kind");
}

SurfacePoint project_to_boundary(const ShapeSpec& shape, const Vec3& x) {
    Vec3 p;
    switch (shape.kind) {
        case ShapeKind::Ball: {
            const Vec3 rel = x - shape.center;
            const double len = norm(rel);
            const Vec3 dir = len > 0.0 ? rel / len : Vec3{0.0, 0.0, 1.0};
            p = shape.center + shape.params[0] * dir;
            return {p, dir};
        }
        case ShapeKind::Ellipsoid: p = ellipsoid_closest(shape, x).point; break;
        case ShapeKind::Peanut: p = peanut_closest(shape, x).point; break;
    }
    return {p, normal_at(shape, p)};
}

SurfacePoint boundary_point_along_ray(const ShapeSpec& shape, const Vec3& dir) {
    const Vec3 u = normalized(dir);
    double lo = 0.0, hi = 2.0 * shape.diameter() + 1.0;
    if (!inside(shape, shape.center))
        throw PreconditionError("boundary_point_along_ray: shape center is not inside the shape");
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        (inside(shape, shape.center + mid * u) ? lo : hi) = mid;
    }
    const Vec3 guess = shape.center + 0.5 * (lo + hi) * u;
    return project_to_boundary(shape, guess);
}

ProbePath probe_path(const SurfacePoint& anchor, int j_min, int j_max) {
    if (j_min < 1 || j_max < j_min) {
        std::ostringstream os;
        os << "probe_path: need 1 <= j_min <= j_max, got " << j_min << ".." << j_max;
        throw PreconditionError(os.str());
    }
    ProbePath path;
    path.anchor = anchor;
    for (int j = j_min; j <= j_max; ++j) {
        path.indices.push_back(j);
        path.points.push_back(anchor.position + anchor.normal / static_cast<double>(j));
    }
    return path;
}

ProbePath probe_path(const ShapeSpec& shape, const SurfacePoint& anchor, int j_min, int j_max) {
    ProbePath path = probe_path(anchor, j_min, j_max);
    for (std::size_t i = 0; i < path.points.size(); ++i) {
        if (implicit_value(shape, path.points[i]) <= 0.0) {
            std::ostringstream os;
            os << "probe_path: z_j for j=" << path.indices[i] << " is not strictly outside the shape";
            throw GeometryError(os.str(), path.indices[i]);
        }
    }
    return path;
}

}  // namespace hsp::geometry
