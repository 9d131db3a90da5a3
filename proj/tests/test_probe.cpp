#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "hsp/errors.hpp"
#include "hsp/probe.hpp"

using namespace hsp;
using namespace hsp::probe;

namespace {

const geometry::ShapeSpec kBall = geometry::ShapeSpec::ball({}, 0.8);
const GridSpec kGrid = GridSpec::cube({}, 1.0, 32);
const geometry::SurfacePoint kTop{{0.0, 0.0, 0.8}, {0.0, 0.0, 1.0}};

std::vector<int> range(int a, int b) {
    std::vector<int> out;
    for (int j = a; j <= b; ++j) out.push_back(j);
    return out;
}

ProbeConfig small_range() {
    ProbeConfig c;
    c.j_min = 2;
    c.j_max = 8;
    return c;
}

}  // namespace

TEST_CASE("fit recovers an exact log model") {
    const auto js = range(2, 16);
    std::vector<double> v;
    for (int j : js) v.push_back(3.0 * std::log(0.3 * j + 1.0) + 0.7);
    FitOptions fo;
    fo.abscissa = Abscissa::LogDeltaJPlusOne;
    const auto fit = fit_log_blowup(js, v, 1.0, fo);
    CHECK(fit.slope == doctest::Approx(3.0));
    CHECK(fit.intercept == doctest::Approx(0.7));
    CHECK(fit.r_squared == doctest::Approx(1.0));
    CHECK(fit.classification == Classification::Boundary);
    CHECK(fit.contrast_estimate == doctest::Approx(3.0));
}

TEST_CASE("constant series is exterior") {
    const auto js = range(2, 10);
    const std::vector<double> v(js.size(), 0.25);
    const auto fit = fit_log_blowup(js, v, 1.0);
    CHECK(fit.slope == 0.0);
    CHECK(fit.classification == Classification::Exterior);
    CHECK(fit.contrast_estimate == 0.0);
    CHECK_THROWS_AS(recover_boundary_value(fit), NotApplicableError);
}

TEST_CASE("fit preconditions") {
    CHECK_THROWS_AS(fit_log_blowup({2, 3, 4}, {1.0, 2.0, 3.0}, 1.0), PreconditionError);
    FitOptions bad;
    bad.delta = 0.0;
    CHECK_THROWS_AS(fit_log_blowup({2, 3, 4, 5}, {1.0, 2.0, 3.0, 4.0}, 1.0, bad), PreconditionError);
    CHECK_THROWS_AS(abscissa_from_string("log"), ConfigError);
}

TEST_CASE("classification threshold and r2 gate") {
    const auto js = range(2, 16);
    const double coef = sharp_coefficient_acoustic(1.0);
    std::vector<double> weak, noisy;
    for (int j : js) {
        weak.push_back(0.2 * 0.25 * 0.1 * coef * std::log(double(j)));
        noisy.push_back(coef * ((j % 2) ? 1.0 : -1.0) + 0.01 * coef * std::log(double(j)));
    }
    CHECK(fit_log_blowup(js, weak, coef).classification == Classification::Exterior);
    CHECK(fit_log_blowup(js, noisy, coef).classification == Classification::Exterior);
}

TEST_CASE("recovery constants") {
    const double ca = sharp_coefficient_acoustic(1.0);
    CHECK(ca == doctest::Approx(1.0 / (16.0 * kPi)));
    CHECK(recover_boundary_value(0.5 * ca, ca) == doctest::Approx(0.5));
    CHECK(recover_boundary_value(0.0, ca) == 0.0);
    const elastic::Background bg{1.0, 1.0, 1.0};
    const double ce = sharp_coefficient_elastic(bg);
    CHECK(ce == doctest::Approx(1.0 / (36.0 * kPi)));
    CHECK(recover_boundary_value(0.5 * ce, ce) == doctest::Approx(0.5));
}

TEST_CASE("grid cap") {
    CHECK(j_cap(GridSpec::cube({}, 1.0, 64)) == 16);
    CHECK(j_cap(kGrid) == 8);
    const acoustic::AcousticSolver s(acoustic::AcousticMedium::constant(1.0, kBall, 1.5), kGrid);
    ProbeConfig c;
    c.j_max = 9;
    try {
        run_probe_acoustic(s, kTop, c);
        FAIL("expected PreconditionError");
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.what()).find("j <= 8") != std::string::npos);
    }
}

TEST_CASE("homogeneous media give zero indicators") {
    const acoustic::AcousticSolver a(acoustic::AcousticMedium::constant(1.0, kBall, 1.0), kGrid);
    const auto sa = run_probe_acoustic(a, kTop, small_range());
    for (const Complex& v : sa.indicators) CHECK(v == Complex(0.0));
    const elastic::ElasticSolver e(elastic::ElasticMedium::constant({1.0, 1.0, 1.0}, kBall, 1.0), kGrid);
    const auto se = run_probe_elastic(e, kTop, small_range());
    for (const Complex& v : se.indicators) CHECK(v == Complex(0.0));
    CHECK(fit_log_blowup(sa).classification == Classification::Exterior);
}

TEST_CASE("acoustic probe on a coarse grid") {
    const acoustic::AcousticSolver s(acoustic::AcousticMedium::constant(1.0, kBall, 1.5), kGrid);
    const auto series = run_probe_acoustic(s, kTop, small_range());
    REQUIRE(series.indicators.size() == 7);
    for (std::size_t i = 0; i < series.indicators.size(); ++i) {
        CHECK(series.ok[i]);
        CHECK(std::isfinite(std::abs(series.indicators[i])));
        if (i > 0) CHECK(std::abs(series.indicators[i]) > std::abs(series.indicators[i - 1]));
    }
    CHECK(series.uniform_bound_ratio() <= 3.0);
    const auto fit = fit_log_blowup(series);
    CHECK(fit.classification == Classification::Boundary);
    CHECK(fit.contrast_estimate == doctest::Approx(fit.slope / sharp_coefficient_acoustic(1.0)));

    SUBCASE("threads do not change the result") {
        ProbeConfig c = small_range();
        c.threads = 2;
        const auto par = run_probe_acoustic(s, kTop, c);
        for (std::size_t i = 0; i < par.indicators.size(); ++i) CHECK(par.indicators[i] == series.indicators[i]);
    }
    SUBCASE("serialization") {
        const auto dir = std::filesystem::temp_directory_path() / "hsp_probe_test";
        std::filesystem::create_directories(dir);
        write_series_csv(dir / "s.csv", series);
        write_fit_json(dir / "f.json", fit, series);
        std::ifstream csv(dir / "s.csv");
        std::string header;
        std::getline(csv, header);
        CHECK(header == "j,zx,zy,zz,re_v,im_v,abs_v");
        int rows = 0;
        for (std::string line; std::getline(csv, line);) ++rows;
        CHECK(rows == 7);
        std::ifstream js(dir / "f.json");
        const auto j = nlohmann::json::parse(js);
        for (const char* key : {"slope", "intercept", "r2", "classification", "contrast_estimate"})
            CHECK(j.contains(key));
        CHECK(j["classification"] == "boundary");
        std::filesystem::remove_all(dir);
    }
}

TEST_CASE("exterior control anchor has a bounded series") {
    const acoustic::AcousticSolver s(acoustic::AcousticMedium::constant(1.0, kBall, 1.5), kGrid);
    const geometry::SurfacePoint off{{0.0, 0.0, 1.1}, {0.0, 0.0, 1.0}};
    const auto series = run_probe_acoustic(s, off, small_range());
    std::vector<double> mags;
    for (const Complex& v : series.indicators) mags.push_back(std::abs(v));
    std::vector<double> sorted = mags;
    std::sort(sorted.begin(), sorted.end());
    const double median = sorted[sorted.size() / 2];
    CHECK(*std::max_element(mags.begin(), mags.end()) <= 10.0 * median);
}

TEST_CASE("scan over candidates") {
    const acoustic::AcousticSolver s(acoustic::AcousticMedium::constant(1.0, kBall, 1.5), kGrid);
    CHECK(scan_boundary(s, {}, small_range()).empty());
    const auto res = scan_boundary(s, {kTop, {{0.8, 0.0, 0.0}, {1.0, 0.0, 0.0}}}, small_range());
    REQUIRE(res.size() == 2);
    for (const auto& e : res) CHECK(e.fit.classification == Classification::Boundary);
}
