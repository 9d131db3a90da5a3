#pragma once

// Adaptive octree quadrature over implicitly described regions, with
// refinement toward an optional (exterior) singular point.
//
// A region is the set {x : value(x) < 0} inside a bounding box, where value
// is 1-Lipschitz (so |value| bounds the distance to the boundary from below).
// Intersections are pointwise maxima.
//
// Cells whose center lies within 4 diagonals of the singular point are split
// down to the current depth budget. Cells entirely inside get a tensor Gauss
// rule; cells the boundary cuts are integrated line by line: Gauss lines
// along the axis of steepest region gradient, with exact segment endpoints
// found by bisection.

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "hsp/geometry.hpp"
#include "hsp/grid.hpp"
#include "hsp/vec.hpp"

namespace hsp::quad {

struct Region {
    std::function<double(const Vec3&)> value;
    Vec3 lo{};
    Vec3 hi{};

    bool empty() const { return !(lo[0] < hi[0] && lo[1] < hi[1] && lo[2] < hi[2]); }
};

Region shape_region(const geometry::ShapeSpec& shape);
Region ball_region(const Vec3& center, double radius);
// {x : (x - point)·normal < 0}; unbounded, only useful intersected.
Region halfspace_region(const Vec3& point, const Vec3& normal);
Region intersect(const Region& a, const Region& b);

struct Options {
    int min_depth = 2;
    int start_depth = 4;
    int max_depth = 10;
    int gauss_order = 4;
    double rel_tol = 1e-5;
};

template <typename T>
struct Result {
    T value{};
    int depth = 0;       // depth budget of the accepted pass
    long evaluations = 0;
    bool converged = false;
};

namespace detail {

struct Rule {
    std::vector<double> x, w;  // on [0, 1]
    explicit Rule(int n) {
        gauss_legendre(n, x, w);
        for (auto& t : x) t = 0.5 * (t + 1.0);
        for (auto& t : w) t *= 0.5;
    }
};

template <typename T, typename F>
class Integrator {
public:
    Integrator(const Region& region, std::optional<Vec3> singular, const F& f, int gauss_order, int depth_limit,
               int min_depth)
        : region_(region), singular_(singular), f_(f), rule_(gauss_order), limit_(depth_limit),
          min_depth_(min_depth), cut_limit_(std::max(min_depth, depth_limit - 2)) {}

    T run() {
        T acc{};
        cell(region_.lo, region_.hi, 0, acc);
        return acc;
    }
    long evaluations() const { return evals_; }

private:
    void cell(const Vec3& lo, const Vec3& hi, int depth, T& acc) {
        const Vec3 c = 0.5 * (lo + hi);
        const double diag = norm(hi - lo);
        const double v = region_.value(c);
        if (v > 0.5 * diag) return;
        const bool cut = v > -0.5 * diag;
        const bool near = singular_ && norm(c - *singular_) < 4.0 * diag;
        const bool split = depth < min_depth_ || (near && depth < limit_) || (cut && depth < cut_limit_);
        if (split) {
            for (int o = 0; o < 8; ++o) {
                Vec3 a, b;
                for (int ax = 0; ax < 3; ++ax) {
                    const bool upper = (o >> ax) & 1;
                    a[ax] = upper ? c[ax] : lo[ax];
                    b[ax] = upper ? hi[ax] : c[ax];
                }
                cell(a, b, depth + 1, acc);
            }
            return;
        }
        if (cut) cut_cell(lo, hi, acc);
        else full_cell(lo, hi, acc);
    }

    void full_cell(const Vec3& lo, const Vec3& hi, T& acc) {
        const Vec3 d = hi - lo;
        const double vol = d[0] * d[1] * d[2];
        const std::size_t n = rule_.x.size();
        T s{};
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b)
                for (std::size_t e = 0; e < n; ++e) {
                    const Vec3 p{lo[0] + d[0] * rule_.x[a], lo[1] + d[1] * rule_.x[b], lo[2] + d[2] * rule_.x[e]};
                    s += (rule_.w[a] * rule_.w[b] * rule_.w[e]) * f_(p);
                    ++evals_;
                }
        acc += vol * s;
    }

    void cut_cell(const Vec3& lo, const Vec3& hi, T& acc) {
        const Vec3 d = hi - lo;
        const Vec3 c = 0.5 * (lo + hi);
        // Line axis: steepest direction of the region function.
        int axis = 0;
        double best = -1.0;
        for (int ax = 0; ax < 3; ++ax) {
            Vec3 e{};
            e[ax] = 0.25 * d[ax];
            const double g = std::abs(region_.value(c + e) - region_.value(c - e)) / d[ax];
            if (g > best) {
                best = g;
                axis = ax;
            }
        }
        const int u = (axis + 1) % 3, w = (axis + 2) % 3;
        const std::size_t n = rule_.x.size();
        constexpr int kSamples = 8;
        T s{};
        for (std::size_t a = 0; a < n; ++a)
            for (std::size_t b = 0; b < n; ++b) {
                Vec3 p;
                p[u] = lo[u] + d[u] * rule_.x[a];
                p[w] = lo[w] + d[w] * rule_.x[b];
                auto at = [&](double t) {
                    Vec3 q = p;
                    q[axis] = t;
                    return q;
                };
                // Sign changes along the line.
                std::vector<double> breaks{lo[axis]};
                double t0 = lo[axis];
                double v0 = region_.value(at(t0));
                for (int k = 1; k <= kSamples; ++k) {
                    const double t1 = lo[axis] + d[axis] * k / kSamples;
                    const double v1 = region_.value(at(t1));
                    if ((v0 < 0.0) != (v1 < 0.0)) {
                        double ta = t0, tb = t1, va = v0;
                        for (int it = 0; it < 60 && tb - ta > 1e-15 * d[axis]; ++it) {
                            const double tm = 0.5 * (ta + tb);
                            const double vm = region_.value(at(tm));
                            if ((vm < 0.0) == (va < 0.0)) {
                                ta = tm;
                                va = vm;
                            } else {
                                tb = tm;
                            }
                        }
                        breaks.push_back(0.5 * (ta + tb));
                    }
                    t0 = t1;
                    v0 = v1;
                }
                breaks.push_back(hi[axis]);
                T line{};
                for (std::size_t k = 0; k + 1 < breaks.size(); ++k) {
                    const double ta = breaks[k], tb = breaks[k + 1];
                    if (!(tb > ta)) continue;
                    if (region_.value(at(0.5 * (ta + tb))) >= 0.0) continue;
                    T seg{};
                    for (std::size_t g = 0; g < n; ++g) {
                        seg += rule_.w[g] * f_(at(ta + (tb - ta) * rule_.x[g]));
                        ++evals_;
                    }
                    line += (tb - ta) * seg;
                }
                s += (rule_.w[a] * rule_.w[b]) * line;
            }
        acc += (d[u] * d[w]) * s;
    }

    const Region& region_;
    std::optional<Vec3> singular_;
    const F& f_;
    Rule rule_;
    int limit_;
    int min_depth_;
    int cut_limit_;
    long evals_ = 0;
};

template <typename T>
double magnitude(const T& v) {
    if constexpr (std::is_arithmetic_v<T>) return std::abs(v);
    else if constexpr (std::is_same_v<T, Complex>) return std::abs(v);
    else if constexpr (std::is_same_v<T, CVec3> || std::is_same_v<T, Vec3>) return norm(v);
    else return frobenius(v);
}

}  // namespace detail

// Single pass at a fixed depth budget.
template <typename T, typename F>
Result<T> integrate_fixed(const Region& region, std::optional<Vec3> singular, const F& f, int depth,
                          const Options& opts = {}) {
    Result<T> r;
    if (region.empty()) {
        r.converged = true;
        return r;
    }
    detail::Integrator<T, F> it(region, singular, f, opts.gauss_order, depth, std::min(opts.min_depth, depth));
    r.value = it.run();
    r.depth = depth;
    r.evaluations = it.evaluations();
    r.converged = true;
    return r;
}

// Increases the depth budget until successive passes agree to rel_tol.
template <typename T, typename F>
Result<T> integrate(const Region& region, std::optional<Vec3> singular, const F& f, const Options& opts = {}) {
    Result<T> prev = integrate_fixed<T>(region, singular, f, opts.start_depth, opts);
    if (region.empty()) return prev;
    long total = prev.evaluations;
    for (int depth = opts.start_depth + 1; depth <= opts.max_depth; ++depth) {
        Result<T> cur = integrate_fixed<T>(region, singular, f, depth, opts);
        total += cur.evaluations;
        const double scale = std::max(detail::magnitude(cur.value), 1e-300);
        // Identical passes (no cell changed) say nothing about convergence.
        const bool refined = cur.evaluations != prev.evaluations;
        const bool done = refined && detail::magnitude(cur.value - prev.value) <= opts.rel_tol * scale;
        prev = cur;
        if (done) {
            prev.converged = true;
            prev.evaluations = total;
            return prev;
        }
    }
    prev.converged = false;
    prev.evaluations = total;
    return prev;
}

// Integral over the cube centred at c with side s of f, splitting cubes
// whose centre lies within 2 diagonals of z (depth <= max_depth) and using a
// 3-point Gauss rule per axis on leaves.
template <typename F>
auto cube_integral(const F& f, const Vec3& z, const Vec3& c, double s, int max_depth, int depth = 0)
    -> decltype(f(c)) {
    using T = decltype(f(c));
    if (depth < max_depth && norm(c - z) < 2.0 * std::sqrt(3.0) * s) {
        T acc{};
        for (int o = 0; o < 8; ++o) {
            const Vec3 off{(o & 1) ? 0.25 : -0.25, (o & 2) ? 0.25 : -0.25, (o & 4) ? 0.25 : -0.25};
            acc += cube_integral(f, z, c + s * off, 0.5 * s, max_depth, depth + 1);
        }
        return acc;
    }
    static const double x[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
    static const double w[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    T acc{};
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b)
            for (int e = 0; e < 3; ++e)
                acc += (w[a] * w[b] * w[e] / 8.0) * f(c + 0.5 * s * Vec3{x[a], x[b], x[e]});
    return (s * s * s) * acc;
}

}  // namespace hsp::quad
