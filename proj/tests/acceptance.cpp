// Acceptance run: one PASS/FAIL line per criterion, with the measured
// values of every sub-check printed above it.
//
// --expect-fail lists criteria known not to be attainable; the exit code is
// nonzero if any other criterion fails or if a listed one passes.

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hsp/acoustic.hpp"
#include "hsp/elastic.hpp"
#include "hsp/oracle.hpp"
#include "hsp/probe.hpp"

using namespace hsp;

namespace {

const geometry::ShapeSpec kBall = geometry::ShapeSpec::ball({}, 0.8);
const GridSpec kGrid32 = GridSpec::cube({}, 1.0, 32);
const GridSpec kGrid64 = GridSpec::cube({}, 1.0, 64);
const Vec3 kZ{0.0, 0.0, 1.0};
const Vec3 kX{1.0, 0.0, 0.0};
const elastic::Background kBg{1.0, 1.0, 1.0};
const geometry::SurfacePoint kAnchor{{0.0, 0.0, 0.8}, {0.0, 0.0, 1.0}};
const geometry::SurfacePoint kExterior{{0.0, 0.0, 1.1}, {0.0, 0.0, 1.0}};
constexpr double kDelta = 0.3;

struct Criterion {
    int id;
    std::string title;
    bool passed = true;

    // Records one sub-check; `ok` decides, the numbers are for the reader.
    void check(const std::string& what, double value, const std::string& limit, bool ok) {
        std::printf("    %-58s %12.5g  %-18s %s\n", what.c_str(), value, limit.c_str(), ok ? "holds" : "violated");
        passed = passed && ok;
    }
    void info(const std::string& what, double value) { std::printf("    %-58s %12.5g\n", what.c_str(), value); }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string le(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "<= %g", x);
    return buf;
}

std::string ge(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, ">= %g", x);
    return buf;
}

Vec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Vec3 v{g(rng), g(rng), g(rng)};
    return v / norm(v);
}

double max_abs(const CMat3& m) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s = std::max(s, std::abs(m[i][j]));
    return s;
}

std::vector<double> magnitudes(const probe::ProbeSeries& s) {
    std::vector<double> out;
    for (const Complex& v : s.indicators) out.push_back(std::abs(v));
    return out;
}

std::vector<int> probe_js(const probe::ProbeSeries& s) {
    return s.path.indices;
}

// Smallest j from which the series never decreases.
int monotone_from(const std::vector<int>& js, const std::vector<double>& v) {
    std::size_t i = v.size() - 1;
    while (i > 0 && v[i - 1] <= v[i]) --i;
    return js[i];
}

// Worst violation of v_j >= c * halfball(delta, j) - C with C fixed at the first j.
double calibrated_bound_margin(const std::vector<int>& js, const std::vector<double>& v, double c) {
    const double offset = c * oracle::halfball_log_integral(kDelta, js[0]) - v[0];
    double worst = 0.0;
    for (std::size_t i = 0; i < js.size(); ++i)
        worst = std::min(worst, v[i] - (c * oracle::halfball_log_integral(kDelta, js[i]) - offset));
    return worst;
}

probe::ProbeConfig probe_config() {
    probe::ProbeConfig c;
    c.j_min = 2;
    c.j_max = 16;
    return c;
}

acoustic::AcousticSolver acoustic_solver(double n, const GridSpec& g) {
    return acoustic::AcousticSolver(acoustic::AcousticMedium::constant(1.0, kBall, n), g);
}

elastic::ElasticSolver elastic_solver(double rho, const GridSpec& g) {
    return elastic::ElasticSolver(elastic::ElasticMedium::constant(kBg, kBall, rho), g);
}

double mie_error(const GridSpec& g) {
    const auto s = acoustic_solver(1.5, g);
    const auto dirs = sphere_grid(8, 16);
    const auto sol = s.solve(acoustic::plane_wave(1.0, kZ, g), acoustic::Incident::plane(kZ));
    const auto ff = acoustic::far_field(s, sol.total, dirs);
    return oracle::relative_l2(dirs, ff.values, oracle::mie_far_field(0.8, 1.5, 1.0, dirs, kZ).values);
}

void criterion1(Criterion& c) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u01;
    double worst_fd = 0.0, worst_special = 0.0, worst_sum = 0.0;
    for (int t = 0; t < 100; ++t) {
        const double lambda = 0.5 + 2.0 * u01(rng), mu = 0.5 + 1.5 * u01(rng);
        const auto kc = elastic::kelvin_constants(lambda, mu);
        worst_sum = std::max(worst_sum, std::abs((kc.alpha + kc.beta) * 4.0 * kPi * mu - 1.0));
        const Vec3 y{u01(rng) - 0.5, u01(rng) - 0.5, u01(rng) - 0.5};
        const double r = 0.1 + 1.9 * u01(rng);
        const Vec3 xbar = random_unit(rng);
        const Vec3 x = y + r * xbar;
        const Vec3 b = random_unit(rng);
        const CMat3 exact = to_complex(elastic::grad_kelvin_apply(kc, x, y, b));
        const CMat3 fd = oracle::finite_difference_jacobian(
            [&](const Vec3& p) { return to_complex(elastic::kelvin_tensor(kc, p, y) * b); }, x, 1e-3 * r);
        worst_fd = std::max(worst_fd, max_abs(exact - fd) / max_abs(exact));
        const double s = kc.alpha + kc.beta;
        const Vec3 expected = -(s * s / (r * r * r)) * xbar;
        worst_special =
            std::max(worst_special, norm(elastic::grad_kelvin_contract(kc, x, y, xbar) - expected) / norm(expected));
    }
    c.check("grad_kelvin_apply vs finite differences, 100 cases", worst_fd, le(1e-6), worst_fd <= 1e-6);
    c.check("Lemma 3.1(3) with b = xbar, relative", worst_special, le(1e-12), worst_special <= 1e-12);
    c.check("alpha + beta vs 1/(4 pi mu), relative", worst_sum, le(1e-14), worst_sum <= 1e-14);
}

void criterion2(Criterion& c) {
    std::mt19937_64 rng(13);
    double worst = -1e300;
    for (int t = 0; t < 10; ++t) {
        const Vec3 e = random_unit(rng);
        auto gap = [&](double r) {
            return max_abs(elastic::navier_tensor(kBg, r * e, {}) -
                           to_complex(elastic::kelvin_tensor(kBg.kelvin(), r * e, {})));
        };
        worst = std::max(worst, gap(1e-4) - (2.0 * gap(1e-1) + 10.0));
        double peak = 0.0;
        for (double r = 1e-4; r <= 1e-1; r *= 2.0) peak = std::max(peak, gap(r));
        if (t == 0) c.info("max |Pi - Pi0| over r in [1e-4, 1e-1]", peak);
    }
    c.check("|Pi-Pi0|(1e-4) - (2 |Pi-Pi0|(1e-1) + 10)", worst, "<= 0", worst <= 0.0);
}

void criterion3(Criterion& c) {
    for (double delta : {0.3, 0.5})
        for (int j : {1, 10, 100}) {
            const auto q = oracle::singular_quadrature(oracle::halfball_region({}, kZ, delta), kZ / double(j), 3,
                                                       [](const Vec3&) { return Complex(1.0); });
            const double ref = oracle::halfball_log_integral(delta, j);
            const double rel = std::abs(q.value - ref) / std::abs(ref);
            char name[96];
            std::snprintf(name, sizeof name, "quadrature vs closed form, delta=%.1f j=%d", delta, j);
            c.check(name, rel, le(1e-4), rel <= 1e-4);
        }
    for (double delta : {0.3, 0.5}) {
        const double deficit = oracle::halfball_log_integral(delta, 100) - 2.0 * kPi * std::log(delta * 100 + 1.0);
        char name[96];
        std::snprintf(name, sizeof name, "|deficit + 2 pi| at j=100, delta=%.1f", delta);
        c.check(name, std::abs(deficit + 2.0 * kPi), le(1e-2), std::abs(deficit + 2.0 * kPi) <= 1e-2);
    }
}

void criterion4(Criterion& c) {
    const double e64 = mie_error(kGrid64);
    const double e32 = mie_error(kGrid32);
    c.check("Mie far-field rel. L2 error, 64^3", e64, le(3e-2), e64 <= 3e-2);
    c.check("Mie error ratio 32^3 / 64^3", e32 / e64, ge(1.8), e32 / e64 >= 1.8);
    const auto s = acoustic_solver(1.01, kGrid64);
    const auto dirs = sphere_grid(8, 16);
    const auto sol = s.solve(acoustic::plane_wave(1.0, kZ, kGrid64), acoustic::Incident::plane(kZ));
    const auto ff = acoustic::far_field(s, sol.total, dirs);
    std::vector<Complex> born(dirs.size());
    for (std::size_t i = 0; i < dirs.size(); ++i) born[i] = oracle::born_far_field(0.8, -0.01, 1.0, dirs[i].unit, kZ);
    const double eb = oracle::relative_l2(dirs, ff.values, born);
    c.check("Born (n=1.01) far-field rel. L2 error, 64^3", eb, le(2e-2), eb <= 2e-2);
}

void criterion5(Criterion& c) {
    const std::vector<std::pair<Vec3, Vec3>> pairs = {
        {{0, 0, 1}, {1, 0, 0}},
        {{0.6, 0, 0.8}, {0, 1, 0}},
        {{0, -0.6, 0.8}, {-0.8, 0, 0.6}},
    };
    for (double n : {1.01, 1.5}) {
        const auto s = acoustic_solver(n, kGrid64);
        auto ff = [&](const Vec3& d, const Vec3& xhat) {
            const auto sol = s.solve(acoustic::plane_wave(1.0, d, kGrid64), acoustic::Incident::plane(d));
            return acoustic::far_field(s, sol.total, {direction_from(xhat)}).values[0];
        };
        double worst = 0.0;
        for (const auto& [xhat, d] : pairs) {
            const Complex a = ff(d, xhat), b = ff(-1.0 * xhat, -1.0 * d);
            worst = std::max(worst, std::abs(a - b) / std::abs(a));
        }
        const double tol = n < 1.1 ? 1e-3 : 2e-2;
        c.check(n < 1.1 ? "far-field reciprocity, Born n=1.01" : "far-field reciprocity, n=1.5", worst, le(tol),
                worst <= tol);
        if (n > 1.1) {
            const auto mr = acoustic::mixed_reciprocity(s, {0.0, 0.3, 1.4}, normalized(Vec3{0.2, 0.0, 1.0}));
            c.check("acoustic mixed reciprocity residual, n=1.5", mr.residual, le(2e-2), mr.residual <= 2e-2);
        }
    }
    const auto es = elastic_solver(1.5, kGrid64);
    const auto r = elastic::elastic_mixed_reciprocity(es, {0.1, 0.0, 1.4}, normalized(Vec3{0.3, -0.2, 1.0}), kZ, kX);
    c.check("elastic mixed reciprocity (Lemma 3.4) residual, 64^3", r.residual, le(5e-2), r.residual <= 5e-2);
}

struct Jumps {
    double u = 0.0, flux = 0.0;
};

// Outside: representation formula. Inside: the discrete solution itself,
// interpolated from the grid, so the jump reflects discretization error.
quad::Options interface_quadrature() {
    quad::Options o;
    o.rel_tol = 1e-3;
    o.max_depth = 8;
    return o;
}

const std::vector<Vec3> kInterfaceNormals = {
    {0, 1, 0}, {1, 0, 0}, {0, 0, -1}, {0.6, 0, 0.8}, {-0.48, 0.6, 0.64}, {0.36, -0.48, -0.8},
};

constexpr double kInterfaceOffset = 1e-4;

template <typename Field>
auto grid_jacobian(const Field& f, const Vec3& x, double step) {
    std::array<decltype(f.interpolate(x)), 3> cols;
    for (int l = 0; l < 3; ++l) {
        Vec3 e{};
        e[l] = step;
        cols[l] = (f.interpolate(x + e) - f.interpolate(x - e)) / (2.0 * step);
    }
    return cols;
}

Jumps acoustic_jumps(const GridSpec& g) {
    const auto s = acoustic_solver(1.5, g);
    const auto sol = s.solve(acoustic::plane_wave(1.0, kZ, g), acoustic::Incident::plane(kZ));
    const quad::Options q = interface_quadrature();
    Jumps out;
    for (const Vec3& nu : kInterfaceNormals) {
        const Vec3 xo = (0.8 + kInterfaceOffset) * nu, xi = (0.8 - kInterfaceOffset) * nu;
        const Complex inc = sol.incident.value(1.0, xo);
        const Complex uo = acoustic::scattered_anywhere(s, sol, xo, q).value + inc;
        const Complex fo = dot(acoustic::grad_scattered_anywhere(s, sol, xo, q).value, nu) +
                           Complex(0.0, 1.0) * dot(kZ, nu) * inc;
        const Complex ui = sol.total.interpolate(xi);
        const auto d = grid_jacobian(sol.total, xi, 0.5 * g.spacing);
        const Complex fi = d[0] * nu[0] + d[1] * nu[1] + d[2] * nu[2];
        out.u = std::max(out.u, std::abs(uo - ui) / std::abs(uo));
        out.flux = std::max(out.flux, std::abs(fo - fi) / std::abs(fo));
    }
    return out;
}

Jumps elastic_jumps(const GridSpec& g) {
    const auto s = elastic_solver(1.5, g);
    const auto sol = s.solve(elastic::elastic_plane_wave(kBg, kZ, kX, g), elastic::Incident::plane(kZ, kX));
    const quad::Options q = interface_quadrature();
    Jumps out;
    for (const Vec3& nu : kInterfaceNormals) {
        const Vec3 xo = (0.8 + kInterfaceOffset) * nu, xi = (0.8 - kInterfaceOffset) * nu;
        const CVec3 uo = elastic::scattered_anywhere(s, sol, xo, q).value + sol.incident.value(kBg, xo);
        const CMat3 Go = elastic::grad_scattered_anywhere(s, sol, xo, q).value + sol.incident.gradient(kBg, xo);
        const CVec3 to = elastic::traction_from_gradient(kBg.lambda, kBg.mu, Go, nu);
        const CVec3 ui = sol.total.interpolate(xi);
        const auto d = grid_jacobian(sol.total, xi, 0.5 * g.spacing);
        CMat3 Gi;
        for (int i = 0; i < 3; ++i)
            for (int l = 0; l < 3; ++l) Gi[i][l] = d[l][i];
        const CVec3 ti = elastic::traction_from_gradient(kBg.lambda, kBg.mu, Gi, nu);
        out.u = std::max(out.u, norm(uo - ui) / norm(uo));
        out.flux = std::max(out.flux, norm(to - ti) / norm(to));
    }
    return out;
}

void criterion6(Criterion& c) {
    const Jumps a32 = acoustic_jumps(kGrid32), a64 = acoustic_jumps(kGrid64);
    const Jumps e32 = elastic_jumps(kGrid32), e64 = elastic_jumps(kGrid64);
    struct Row {
        const char* name;
        double coarse, fine;
    };
    for (const Row& r : {Row{"acoustic jump in u", a32.u, a64.u}, Row{"acoustic jump in du/dnu", a32.flux, a64.flux},
                         Row{"elastic jump in u", e32.u, e64.u}, Row{"elastic jump in Tu", e32.flux, e64.flux}}) {
        c.check(std::string(r.name) + ", 64^3", r.fine, le(5e-2), r.fine <= 5e-2);
        c.check(std::string(r.name) + ", 32^3 / 64^3", r.coarse / r.fine, "> 1", r.coarse > r.fine);
    }
}

struct AcousticProbeRuns {
    probe::ProbeSeries boundary, exterior;
};

void criterion7(Criterion& c, const AcousticProbeRuns& runs) {
    const auto js = probe_js(runs.boundary);
    const auto v = magnitudes(runs.boundary);
    const int j0 = monotone_from(js, v);
    c.check("|v_j| nondecreasing from j =", j0, "<= 8", j0 <= 8);

    const auto fit = probe::fit_log_blowup(runs.boundary);
    const double target = 0.5 * probe::sharp_coefficient_acoustic(1.0);
    const double ratio = fit.slope / target;
    c.info("oracle-validated coefficient k^2/(16 pi)", probe::sharp_coefficient_acoustic(1.0));
    c.check("fitted slope / (0.5 k^2/(16 pi))", ratio, "in [0.75, 1.25]", ratio >= 0.75 && ratio <= 1.25);
    const double recovered =
        fit.classification == probe::Classification::Boundary ? probe::recover_boundary_value(fit) : 0.0;
    c.check("recovered |1 - n(z*)|", recovered, "in [0.375, 0.625]", recovered >= 0.375 && recovered <= 0.625);

    // Eq. (2.8): C0 = |1-n|/2, k^2/(16 pi^2) against the half-ball integral.
    const double margin = calibrated_bound_margin(js, v, 0.25 / (16.0 * kPi * kPi));
    c.check("Eq. (2.8) calibrated lower bound, worst margin", margin, ">= 0", margin >= 0.0);

    const auto ext = probe::fit_log_blowup(runs.exterior);
    c.info("exterior control: fitted slope", ext.slope);
    c.info("exterior control: slope / boundary slope", ext.slope / fit.slope);
    c.info("exterior control: contrast estimate", ext.contrast_estimate);
    c.check("exterior control classified exterior (1 = yes)",
            ext.classification == probe::Classification::Exterior ? 1.0 : 0.0, "== 1",
            ext.classification == probe::Classification::Exterior);
}

void criterion8(Criterion& c) {
    const auto s = elastic_solver(1.5, kGrid64);
    const auto series = probe::run_probe_elastic(s, kAnchor, probe_config());
    const auto js = probe_js(series);
    const auto v = magnitudes(series);

    probe::FitOptions lin;
    lin.abscissa = probe::Abscissa::LogDeltaJPlusOne;
    lin.delta = kDelta;
    const auto fit_d = probe::fit_log_blowup(series, lin);
    c.check("r^2 against ln(delta j + 1)", fit_d.r_squared, ge(0.9), fit_d.r_squared >= 0.9);

    const auto fit = probe::fit_log_blowup(series);
    const double recovered =
        fit.classification == probe::Classification::Boundary ? probe::recover_boundary_value(fit) : 0.0;
    const double rel = std::abs(recovered - 0.5) / 0.5;
    c.info("recovered |1 - rho(z*)|", recovered);
    c.check("recovered contrast, relative deviation from 0.5", rel, le(0.35), rel <= 0.35);

    // Theorem 3.5 chain with C = |1-rho| = 0.5 and omega^2/(16 pi^2 mu^2) per unit half-ball integral.
    const double chain = 0.5 * kBg.omega * kBg.omega / (16.0 * kPi * kPi * kBg.mu * kBg.mu);
    const double margin = calibrated_bound_margin(js, v, chain);
    c.check("Theorem 3.5 calibrated chain on |upsilon_j|, worst margin", margin, ">= 0", margin >= 0.0);

    const auto medium = elastic::ElasticMedium::constant(kBg, kBall, 1.5);
    const std::vector<int> oj{2, 4, 8, 16, 32};
    std::vector<double> ov;
    for (int j : oj)
        ov.push_back(std::abs(
            oracle::i2_elastic_oracle(medium, kAnchor.position + kAnchor.normal / double(j), kAnchor.position, kDelta,
                                      kAnchor.normal)
                .value));
    const double omargin = calibrated_bound_margin(oj, ov, chain);
    c.check("Theorem 3.5 calibrated chain on the I2 oracle, worst margin", omargin, ">= 0", omargin >= 0.0);
}

void criterion9(Criterion& c, const AcousticProbeRuns& runs) {
    const double rb = runs.boundary.uniform_bound_ratio();
    const double re = runs.exterior.uniform_bound_ratio();
    c.check("max/min grid norm of w_j, boundary anchor", rb, le(3.0), rb <= 3.0);
    c.check("max/min grid norm of w_j, exterior control", re, le(3.0), re <= 3.0);
}

void criterion10(Criterion& c) {
    double slope[2];
    int i = 0;
    for (double n : {1.3, 1.6}) {
        const auto s = acoustic_solver(n, kGrid64);
        slope[i] = probe::fit_log_blowup(probe::run_probe_acoustic(s, kAnchor, probe_config())).slope;
        c.info(n < 1.4 ? "slope, contrast 0.3" : "slope, contrast 0.6", slope[i]);
        ++i;
    }
    const double ratio = slope[1] / slope[0];
    c.check("slope ratio 0.6 / 0.3", ratio, "in [1.6, 2.4]", ratio >= 1.6 && ratio <= 2.4);
}

std::set<int> parse_list(const std::string& s) {
    std::set<int> out;
    std::string item;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == ',') {
            if (!item.empty()) out.insert(std::stoi(item));
            item.clear();
        } else {
            item += s[i];
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    std::string expect_fail, only;
    app.add_option("--expect-fail", expect_fail, "comma-separated criteria known to fail");
    app.add_option("--only", only, "comma-separated criteria to run");
    CLI11_PARSE(app, argc, argv);
    const std::set<int> expected = parse_list(expect_fail);
    const std::set<int> selected = only.empty() ? std::set<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10} : parse_list(only);

    const double limits[] = {0, 1, 1, 10, 300, 600, 300, 900, 1800, 900, 1800};
    const char* titles[] = {"",
                            "kernel identities (Lemma 3.1)",
                            "Kelvin asymptotics (Eq. 3.7)",
                            "half-ball integral (Lemma 2.3)",
                            "acoustic forward validation",
                            "reciprocity and mixed reciprocity",
                            "transmission conditions",
                            "acoustic blow-up (Theorem 2.2)",
                            "elastic blow-up (Theorem 3.5)",
                            "uniform bound (Eq. 2.6)",
                            "contrast monotonicity"};

    AcousticProbeRuns runs;
    bool have_runs = false;
    double probe_seconds = 0.0;
    auto acoustic_runs = [&]() -> const AcousticProbeRuns& {
        if (!have_runs) {
            const auto t0 = Clock::now();
            const auto s = acoustic_solver(1.5, kGrid64);
            runs.boundary = probe::run_probe_acoustic(s, kAnchor, probe_config());
            runs.exterior = probe::run_probe_acoustic(s, kExterior, probe_config());
            probe_seconds = seconds_since(t0);
            have_runs = true;
        }
        return runs;
    };

    int unexpected = 0;
    for (int id : selected) {
        Criterion c{id, titles[id]};
        std::printf("[%d] %s\n", id, c.title.c_str());
        const auto t0 = Clock::now();
        try {
            switch (id) {
                case 1: criterion1(c); break;
                case 2: criterion2(c); break;
                case 3: criterion3(c); break;
                case 4: criterion4(c); break;
                case 5: criterion5(c); break;
                case 6: criterion6(c); break;
                case 7: criterion7(c, acoustic_runs()); break;
                case 8: criterion8(c); break;
                case 9: criterion9(c, acoustic_runs()); break;
                case 10: criterion10(c); break;
                default: throw std::invalid_argument("no criterion " + std::to_string(id));
            }
        } catch (const std::exception& e) {
            std::printf("    error: %s\n", e.what());
            c.passed = false;
        }
        // Criterion 9 reuses criterion 7's probe runs.
        const double elapsed = seconds_since(t0);
        c.check("runtime [s]", elapsed, le(limits[id]), elapsed <= limits[id]);
        const bool known = expected.count(id) > 0;
        std::printf("criterion %d: %s%s\n", id, c.passed ? "PASS" : "FAIL",
                    known ? (c.passed ? " (unexpected pass)" : " (known failure)") : "");
        std::fflush(stdout);
        if (c.passed == known) ++unexpected;
    }
    if (have_runs) std::printf("acoustic probe runs shared by criteria 7 and 9: %.1f s\n", probe_seconds);
    std::printf("%d unexpected result(s)\n", unexpected);
    return unexpected == 0 ? 0 : 1;
}
