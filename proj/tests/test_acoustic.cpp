#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hsp/acoustic.hpp"
#include "hsp/errors.hpp"
#include "hsp/oracle.hpp"

using namespace hsp;
using namespace hsp::acoustic;

namespace {

const geometry::ShapeSpec kBall = geometry::ShapeSpec::ball({}, 0.8);
const GridSpec kGrid32 = GridSpec::cube({}, 1.0, 32);
const Vec3 kZ{0.0, 0.0, 1.0};

AcousticSolution plane_solve(const AcousticSolver& s, const Vec3& d) {
    return s.solve(plane_wave(s.medium().k, d, s.grid()), Incident::plane(d));
}

Complex far_at(const AcousticSolver& s, const Vec3& d, const Vec3& xhat) {
    return far_field(s, plane_solve(s, d).total, {direction_from(xhat)}).values[0];
}

}  // namespace

TEST_CASE("medium validation") {
    CHECK_NOTHROW(AcousticMedium::constant(1.0, kBall, 1.5).validate());
    CHECK_THROWS_AS(AcousticMedium::constant(0.0, kBall, 1.5).validate(), ConfigError);
    CHECK_THROWS_AS(AcousticMedium::constant(1.0, kBall, -0.5).validate(), ConfigError);
    auto m = AcousticMedium::constant(1.0, kBall, 1.05);
    m.contrast_floor = 0.1;
    CHECK_THROWS_AS(m.validate(), ConfigError);
    CHECK(m.n({0.0, 0.0, 0.9}) == Complex(1.0));
}

TEST_CASE("no contrast, no scattering") {
    const AcousticSolver s(AcousticMedium::constant(1.0, kBall, 1.0), kGrid32);
    const auto sol = plane_solve(s, kZ);
    CHECK(sol.scattered.max_abs() == 0.0);
    for (const Complex& v : far_field(s, sol.total, sphere_grid(4, 8)).values) CHECK(v == Complex(0.0));
}

TEST_CASE("volume operator at the ball centre against quadrature") {
    // h = diam / 64.
    const GridSpec g = GridSpec::cube({}, 1.0, 80);
    const AcousticSolver s(AcousticMedium::constant(1.0, kBall, 1.5), g);
    ScalarGridField one(g);
    for (auto& v : one.values) v = 1.0;
    const auto K = s.apply_K(one);
    const std::size_t i = g.index(40, 40, 40);
    const Vec3 x = g.node(i);
    const auto ref = oracle::singular_quadrature(quad::shape_region(kBall), x, 1, [&](const Vec3& y) {
        return std::exp(Complex(0.0, norm(x - y))) / (4.0 * kPi);
    });
    const Complex expected = -1.0 * (1.0 - 1.5) * ref.value;
    CHECK(std::abs(K[i] - expected) / std::abs(expected) < 1e-3);
}

TEST_CASE("solve reaches the tolerance and reports failure") {
    const AcousticSolver s(AcousticMedium::constant(1.0, kBall, 1.5), kGrid32);
    const auto rhs = plane_wave(1.0, kZ, kGrid32);
    const auto sol = s.solve(rhs, Incident::plane(kZ));
    CHECK(sol.report.converged);
    CHECK(s.residual(sol.total, rhs) <= 1e-8);
    GmresOptions tight;
    tight.max_iterations = 1;
    tight.tol = 1e-14;
    CHECK_THROWS_AS(s.solve(rhs, Incident::plane(kZ), tight), ConvergenceError);
}

TEST_CASE("far field against Born and Mie") {
    const auto dirs = sphere_grid(8, 16);
    {
        const AcousticSolver s(AcousticMedium::constant(1.0, kBall, 1.01), kGrid32);
        const auto ff = far_field(s, plane_solve(s, kZ).total, dirs);
        std::vector<Complex> born(dirs.size());
        for (std::size_t i = 0; i < dirs.size(); ++i)
            born[i] = oracle::born_far_field(0.8, -0.01, 1.0, dirs[i].unit, kZ);
        CHECK(oracle::relative_l2(dirs, ff.values, born) < 2e-2);
    }
    {
        const AcousticSolver s(AcousticMedium::constant(1.0, kBall, 1.5), kGrid32);
        const auto ff = far_field(s, plane_solve(s, kZ).total, dirs);
        const auto mie = oracle::mie_far_field(0.8, 1.5, 1.0, dirs, kZ);
        CHECK(oracle::relative_l2(dirs, ff.values, mie.values) < 3e-2);
    }
}

TEST_CASE("far-field reciprocity") {
    const Vec3 xhat = normalized(Vec3{0.6, 0.0, 0.8});
    const Vec3 d = normalized(Vec3{0.0, 1.0, 0.2});
    for (double n : {1.01, 1.5}) {
        const AcousticSolver s(AcousticMedium::constant(1.0, kBall, n), kGrid32);
        const Complex a = far_at(s, d, xhat), b = far_at(s, -xhat, -d);
        CHECK(std::abs(a - b) / std::abs(a) < (n < 1.1 ? 1e-6 : 2e-2));
    }
}

TEST_CASE("off-grid evaluation") {
    const AcousticSolver s(AcousticMedium::constant(1.0, kBall, 1.5), kGrid32);
    const auto sol = plane_solve(s, kZ);
    SUBCASE("far away the field matches the far-field pattern") {
        const Vec3 x = 10.0 * normalized(Vec3{0.3, 0.4, 0.8});
        const Complex u = eval_scattered(s, sol, x).value;
        const Complex ff = far_field(s, sol.total, {direction_from(normalized(x))}).values[0];
        const Complex approx = std::exp(Complex(0.0, norm(x))) / norm(x) * ff;
        CHECK(std::abs(u - approx) / std::abs(approx) < 3e-2);
    }
    SUBCASE("gradient matches finite differences") {
        for (const Vec3& x : {Vec3{0.0, 0.0, 1.0}, Vec3{0.7, 0.0, 0.7}}) {
            const double h = kGrid32.spacing / 10.0;
            const CVec3 fd = oracle::finite_difference_gradient(
                [&](const Vec3& p) { return eval_scattered(s, sol, p).value; }, x, h);
            const CVec3 g = eval_grad_scattered(s, sol, x).value;
            CHECK(norm(g - fd) / norm(fd) < 1e-3);
        }
    }
    SUBCASE("interior points are refused") {
        CHECK_THROWS_AS(eval_scattered(s, sol, {0.0, 0.0, 0.5}), PreconditionError);
        CHECK_THROWS_AS(point_source(s.medium(), {0.0, 0.0, 0.5}, kGrid32), PreconditionError);
    }
    SUBCASE("transmission conditions") {
        const Vec3 p{0.0, 0.8, 0.0}, nu{0.0, 1.0, 0.0};
        const double e = 1e-4;
        const auto out = scattered_anywhere(s, sol, p + e * nu).value + sol.incident.value(1.0, p + e * nu);
        const auto in = scattered_anywhere(s, sol, p - e * nu).value + sol.incident.value(1.0, p - e * nu);
        CHECK(std::abs(out - in) / std::abs(out) < 5e-2);
        const Complex dout = dot(grad_scattered_anywhere(s, sol, p + e * nu).value, nu);
        const Complex din = dot(grad_scattered_anywhere(s, sol, p - e * nu).value, nu);
        const Complex dinc = Complex(0.0, 1.0) * dot(kZ, nu) * sol.incident.value(1.0, p);
        CHECK(std::abs(dout - din) / std::abs(dout + dinc) < 5e-2);
    }
}

TEST_CASE("mixed reciprocity") {
    const AcousticSolver s(AcousticMedium::constant(1.0, kBall, 1.5), kGrid32);
    const auto r = mixed_reciprocity(s, {0.0, 0.3, 1.4}, normalized(Vec3{0.2, 0.0, 1.0}));
    CHECK(r.residual < 2e-2);
}

TEST_CASE("point source right-hand side") {
    const auto m = AcousticMedium::constant(1.0, kBall, 1.5);
    const Vec3 z{0.0, 0.0, 0.85};
    const auto plain = point_source(m, z, kGrid32);
    const auto avg = point_source(m, z, kGrid32, 0.25, Vec3{0.0, 0.0, 0.8});
    const std::size_t far = kGrid32.index(2, 2, 2);
    CHECK(plain[far] == avg[far]);
    CHECK(std::abs(plain[far] - phi(1.0, kGrid32.node(far), z)) < 1e-15);
    // Near the source the cell average differs from the node sample.
    double diff = 0.0;
    for (std::size_t i = 0; i < kGrid32.size(); ++i) diff = std::max(diff, std::abs(plain[i] - avg[i]));
    CHECK(diff > 0.0);
}
