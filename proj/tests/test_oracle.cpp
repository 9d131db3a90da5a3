#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "hsp/errors.hpp"
#include "hsp/oracle.hpp"
#include "hsp/probe.hpp"

using namespace hsp;

TEST_CASE("half-ball closed form values") {
    CHECK(oracle::halfball_log_integral(0.5, 10) == doctest::Approx(5.5969).epsilon(1e-4));
    CHECK(oracle::halfball_log_integral(0.5, 1) == doctest::Approx(0.1476).epsilon(1e-3));
}

TEST_CASE("finite-difference helpers") {
    const Vec3 x{0.3, -0.2, 0.5};
    const CVec3 g = oracle::finite_difference_gradient([](const Vec3& p) { return Complex(dot(p, p)); }, x, 1e-2);
    CHECK(norm(g - to_complex(2.0 * x)) < 1e-10);
    const Vec3 y{0.0, 0.1, 0.0};
    const CVec3 gp =
        oracle::finite_difference_gradient([&](const Vec3& p) { return acoustic::phi(1.0, p, y); }, x, 1e-3);
    CHECK(norm(gp - acoustic::grad_phi(1.0, x, y)) / norm(acoustic::grad_phi(1.0, x, y)) < 1e-8);
    const auto kc = elastic::kelvin_constants(1.0, 1.0);
    const Vec3 b{0.2, 0.5, -0.3};
    const CMat3 J = oracle::finite_difference_jacobian(
        [&](const Vec3& p) { return to_complex(elastic::kelvin_tensor(kc, p, y) * b); }, x, 1e-3);
    const Mat3 exact = elastic::grad_kelvin_apply(kc, x, y, b);
    double err = 0.0, scale = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int l = 0; l < 3; ++l) {
            err = std::max(err, std::abs(J[i][l] - exact[i][l]));
            scale = std::max(scale, std::abs(exact[i][l]));
        }
    CHECK(err / scale < 1e-6);
}

TEST_CASE("Mie and Born agree to second order in the contrast") {
    const auto dirs = sphere_grid(6, 12);
    const Vec3 d{0.0, 0.0, 1.0};
    std::vector<double> ratio;
    for (double c : {0.01, 0.02, 0.04}) {
        const auto mie = oracle::mie_far_field(0.8, 1.0 - c, 1.0, dirs, d);
        std::vector<Complex> born(dirs.size());
        for (std::size_t i = 0; i < dirs.size(); ++i) born[i] = oracle::born_far_field(0.8, c, 1.0, dirs[i].unit, d);
        double diff = 0.0;
        for (std::size_t i = 0; i < dirs.size(); ++i) diff = std::max(diff, std::abs(mie.values[i] - born[i]));
        ratio.push_back(diff / (c * c));
        if (c == 0.01) CHECK(oracle::relative_l2(dirs, mie.values, born) < 2e-2);
    }
    CHECK(ratio[2] < 1.5 * ratio[0]);
    CHECK(ratio[0] < 1.5 * ratio[2]);
}

TEST_CASE("Mie series with n = 1 is zero and large size parameters are refused") {
    const auto dirs = sphere_grid(2, 4);
    for (const Complex& v : oracle::mie_far_field(0.8, 1.0, 1.0, dirs, {0, 0, 1}).values) CHECK(v == Complex(0.0));
    CHECK_THROWS_AS(oracle::mie_far_field(1.0, 1.5, 100.0, dirs, {0, 0, 1}), ConfigError);
}

TEST_CASE("oracle report ledger") {
    const auto path = std::filesystem::temp_directory_path() / "hsp_oracle_report.csv";
    std::filesystem::remove(path);
    const auto r = oracle::make_report("x", 2.0, 2.002, 10, 1e-2);
    CHECK(r.passed());
    CHECK(r.rel_error == doctest::Approx(1e-3));
    oracle::append_csv(path, {r});
    oracle::append_csv(path, {oracle::make_report("y", 1.0, 2.0, 1, 1e-2)});
    std::ifstream is(path);
    std::string header, row1, row2;
    std::getline(is, header);
    std::getline(is, row1);
    std::getline(is, row2);
    CHECK(header.rfind("name,ref,test,abs_err,rel_err,budget", 0) == 0);
    CHECK(row1.rfind("x,", 0) == 0);
    CHECK(row2.find(",0,") != std::string::npos);
    std::filesystem::remove(path);
}

namespace {

const geometry::ShapeSpec kBall = geometry::ShapeSpec::ball({}, 0.8);
const Vec3 kAnchor{0.0, 0.0, 0.8};
const Vec3 kNu{0.0, 0.0, 1.0};

}  // namespace

TEST_CASE("acoustic I2 oracle satisfies the calibrated lower bound") {
    const auto medium = acoustic::AcousticMedium::constant(1.0, kBall, 1.5);
    const double c = 0.25 * medium.k * medium.k / (16.0 * kPi * kPi);
    double offset = 0.0;
    for (int j : {2, 4, 8, 16, 32}) {
        const auto q = oracle::i2_acoustic_oracle(medium, kAnchor + kNu / double(j), kAnchor, 0.3, kNu);
        CHECK(q.converged);
        const double bound = c * oracle::halfball_log_integral(0.3, j);
        if (j == 2) offset = bound - std::abs(q.value);
        CHECK(std::abs(q.value) >= bound - offset - 1e-12);
    }
}

TEST_CASE("I2 oracles grow at the sharp coefficient") {
    auto slope = [](const std::vector<int>& js, const std::vector<double>& v) {
        probe::FitOptions fo;
        fo.abscissa = probe::Abscissa::LogDeltaJPlusOne;
        return probe::fit_log_blowup(js, v, 1.0, fo).slope;
    };
    const std::vector<int> js{2, 4, 8, 16, 32};
    const auto am = acoustic::AcousticMedium::constant(1.0, kBall, 1.5);
    const auto em = elastic::ElasticMedium::constant({1.0, 1.0, 1.0}, kBall, 1.5);
    std::vector<double> av, ev;
    for (int j : js) {
        av.push_back(std::abs(oracle::i2_acoustic_oracle(am, kAnchor + kNu / double(j), kAnchor, 0.3, kNu).value));
        ev.push_back(std::abs(oracle::i2_elastic_oracle(em, kAnchor + kNu / double(j), kAnchor, 0.3, kNu).value));
    }
    // Against ln(delta j + 1) the finite-j slope sits within 25% of the
    // asymptotic coefficient times the contrast 0.5.
    CHECK(slope(js, av) == doctest::Approx(0.5 * probe::sharp_coefficient_acoustic(1.0)).epsilon(0.25));
    CHECK(slope(js, ev) == doctest::Approx(0.5 * probe::sharp_coefficient_elastic({1.0, 1.0, 1.0})).epsilon(0.25));
}
