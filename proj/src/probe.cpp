#include "hsp/probe.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <thread>

#include <json.hpp>

#include "hsp/errors.hpp"

namespace hsp::probe {

std::string to_string(Physics p) { return p == Physics::Acoustic ? "acoustic" : "elastic"; }

std::string to_string(Abscissa a) { return a == Abscissa::LogJ ? "log_j" : "log_delta_j_plus_one"; }

Abscissa abscissa_from_string(const std::string& name) {
    if (name == "log_j") return Abscissa::LogJ;
    if (name == "log_delta_j_plus_one") return Abscissa::LogDeltaJPlusOne;
    throw ConfigError("unknown fit abscissa '" + name + "' (expected log_j or log_delta_j_plus_one)");
}

std::string to_string(Classification c) { return c == Classification::Boundary ? "boundary" : "exterior"; }

double ProbeSeries::uniform_bound_ratio() const {
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t i = 0; i < scattered_max.size(); ++i) {
        if (!ok[i]) continue;
        lo = std::min(lo, scattered_max[i]);
        hi = std::max(hi, scattered_max[i]);
    }
    if (hi == 0.0) return 1.0;
    return lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
}

double sharp_coefficient_acoustic(double k) { return k * k / (16.0 * kPi); }

double sharp_coefficient_elastic(const elastic::Background& bg) {
    const double a = bg.kelvin().alpha;
    return kPi * a * a * bg.omega * bg.omega;
}

double sharp_coefficient(const ProbeSeries& series) {
    return series.physics == Physics::Acoustic ? sharp_coefficient_acoustic(series.k)
                                               : sharp_coefficient_elastic(series.background);
}

int j_cap(const GridSpec& grid) {
    const double h = grid.spacing;
    return static_cast<int>(std::floor(1.0 / (2.0 * h) + 1e-9));
}

namespace {

void check_range(const GridSpec& grid, const ProbeConfig& config) {
    if (config.j_min < 1 || config.j_max < config.j_min)
        throw PreconditionError("probe: need 1 <= j_min <= j_max");
    const int cap = j_cap(grid);
    if (config.j_max > cap)
        throw PreconditionError("probe: j_max = " + std::to_string(config.j_max) +
                                " exceeds the grid cap 1/j >= 2h, j <= " + std::to_string(cap));
}

// Runs body(i) for i in [0, n) on up to `threads` workers.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
    const std::size_t workers = std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, threads)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) body(i);
        });
}

ProbeSeries make_series(const geometry::ProbePath& path, Physics physics, int cap) {
    ProbeSeries s;
    s.path = path;
    s.physics = physics;
    const std::size_t n = path.points.size();
    s.indicators.assign(n, 0.0);
    s.ok.assign(n, false);
    s.notes.assign(n, "");
    s.scattered_max.assign(n, 0.0);
    s.j_cap = cap;
    return s;
}

}  // namespace

ProbeSeries run_probe_acoustic(const acoustic::AcousticSolver& solver, const geometry::SurfacePoint& anchor,
                               const ProbeConfig& config) {
    const auto& medium = solver.medium();
    const auto& grid = solver.grid();
    check_range(grid, config);
    const auto path = geometry::probe_path(medium.shape, anchor, config.j_min, config.j_max);
    ProbeSeries s = make_series(path, Physics::Acoustic, j_cap(grid));
    s.k = medium.k;
    const Vec3& nu = anchor.normal;
    std::vector<char> ok(path.points.size(), 0);
    parallel_for(path.points.size(), config.threads, [&](std::size_t i) {
        const int j = path.indices[i];
        const Vec3& zj = path.points[i];
        try {
            const auto rhs = acoustic::point_source(medium, zj, grid, config.averaging_factor / j, anchor.position);
            const auto sol = solver.solve(rhs, acoustic::Incident::point(zj), config.gmres);
            const auto g = acoustic::eval_grad_scattered(solver, sol, zj, config.quadrature);
            s.indicators[i] = dot(g.value, nu);
            s.scattered_max[i] = sol.scattered.max_abs();
            ok[i] = 1;
            if (!g.converged) s.notes[i] = "quadrature not converged at depth " + std::to_string(g.depth);
        } catch (const ConvergenceError& e) {
            s.notes[i] = std::string("solver: ") + e.what();
        }
    });
    for (std::size_t i = 0; i < ok.size(); ++i) s.ok[i] = ok[i] != 0;
    return s;
}

ProbeSeries run_probe_elastic(const elastic::ElasticSolver& solver, const geometry::SurfacePoint& anchor,
                              const ProbeConfig& config) {
    const auto& medium = solver.medium();
    const auto& grid = solver.grid();
    check_range(grid, config);
    const auto path = geometry::probe_path(medium.shape, anchor, config.j_min, config.j_max);
    ProbeSeries s = make_series(path, Physics::Elastic, j_cap(grid));
    s.background = medium.background;
    const Vec3& nu = anchor.normal;
    std::vector<char> ok(path.points.size(), 0);
    parallel_for(path.points.size(), config.threads, [&](std::size_t i) {
        const int j = path.indices[i];
        const Vec3& zj = path.points[i];
        try {
            const auto rhs =
                elastic::elastic_point_source(medium, zj, nu, grid, config.averaging_factor / j, anchor.position);
            const auto sol = solver.solve(rhs, elastic::Incident::point(zj, nu), config.gmres);
            const auto g = elastic::eval_grad_scattered_elastic(solver, sol, zj, config.quadrature);
            s.indicators[i] = dot(nu, g.value * nu);
            s.scattered_max[i] = sol.scattered.max_abs();
            ok[i] = 1;
            if (!g.converged) s.notes[i] = "quadrature not converged at depth " + std::to_string(g.depth);
        } catch (const ConvergenceError& e) {
            s.notes[i] = std::string("solver: ") + e.what();
        }
    });
    for (std::size_t i = 0; i < ok.size(); ++i) s.ok[i] = ok[i] != 0;
    return s;
}

double abscissa_value(Abscissa a, double delta, int j) {
    return a == Abscissa::LogJ ? std::log(static_cast<double>(j)) : std::log(delta * j + 1.0);
}

BlowupFit fit_log_blowup(const std::vector<int>& j, const std::vector<double>& values, double coefficient,
                         const FitOptions& options) {
    if (j.size() != values.size()) throw PreconditionError("fit_log_blowup: size mismatch");
    if (j.size() < 4) throw PreconditionError("fit_log_blowup: need at least 4 points");
    if (!(options.delta > 0.0)) throw PreconditionError("fit_log_blowup: delta must be positive");
    if (!(coefficient > 0.0)) throw PreconditionError("fit_log_blowup: coefficient must be positive");
    BlowupFit fit;
    fit.coefficient = coefficient;
    fit.delta = options.delta;
    fit.abscissa = options.abscissa;
    fit.threshold = options.threshold_fraction * coefficient * options.reference_contrast;

    const std::size_t n = j.size();
    double mx = 0.0, my = 0.0;
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = abscissa_value(options.abscissa, options.delta, j[i]);
        mx += x[i];
        my += values[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (values[i] - my);
        syy += (values[i] - my) * (values[i] - my);
    }
    if (sxx == 0.0) throw PreconditionError("fit_log_blowup: abscissae coincide");
    if (syy <= 1e-28 * std::max(1.0, my * my)) {
        fit.intercept = my;
        return fit;
    }
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = std::clamp(sxy * sxy / (sxx * syy), 0.0, 1.0);
    if (fit.slope > fit.threshold && fit.r_squared >= options.min_r_squared) {
        fit.classification = Classification::Boundary;
        fit.contrast_estimate = fit.slope / coefficient;
    }
    return fit;
}

BlowupFit fit_log_blowup(const ProbeSeries& series, const FitOptions& options) {
    std::vector<int> j;
    std::vector<double> v;
    for (std::size_t i = 0; i < series.indicators.size(); ++i) {
        if (!series.ok[i]) continue;
        j.push_back(series.path.indices[i]);
        v.push_back(std::abs(series.indicators[i]));
    }
    return fit_log_blowup(j, v, sharp_coefficient(series), options);
}

double recover_boundary_value(const BlowupFit& fit) {
    if (fit.classification != Classification::Boundary)
        throw NotApplicableError("recover_boundary_value: point classified exterior");
    return recover_boundary_value(fit.slope, fit.coefficient);
}

double recover_boundary_value(double slope, double coefficient) {
    if (!(coefficient > 0.0)) throw PreconditionError("recover_boundary_value: coefficient must be positive");
    return std::max(slope, 0.0) / coefficient;
}

namespace {

template <class Solver, class Run>
std::vector<ScanEntry> scan(const Solver& solver, const std::vector<geometry::SurfacePoint>& candidates,
                            const ProbeConfig& config, const FitOptions& fit, Run run) {
    std::vector<ScanEntry> out(candidates.size());
    ProbeConfig inner = config;
    inner.threads = 1;
    parallel_for(candidates.size(), config.threads, [&](std::size_t i) {
        out[i].anchor = candidates[i];
        out[i].series = run(solver, candidates[i], inner);
        out[i].fit = fit_log_blowup(out[i].series, fit);
    });
    return out;
}

}  // namespace

std::vector<ScanEntry> scan_boundary(const acoustic::AcousticSolver& solver,
                                     const std::vector<geometry::SurfacePoint>& candidates,
                                     const ProbeConfig& config, const FitOptions& fit) {
    return scan(solver, candidates, config, fit, run_probe_acoustic);
}

std::vector<ScanEntry> scan_boundary(const elastic::ElasticSolver& solver,
                                     const std::vector<geometry::SurfacePoint>& candidates,
                                     const ProbeConfig& config, const FitOptions& fit) {
    return scan(solver, candidates, config, fit, run_probe_elastic);
}

void write_series_csv(const std::filesystem::path& path, const ProbeSeries& series) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    os.precision(17);
    os << "j,zx,zy,zz,re_v,im_v,abs_v\n";
    for (std::size_t i = 0; i < series.indicators.size(); ++i) {
        if (!series.ok[i]) continue;
        const Vec3& z = series.path.points[i];
        const Complex v = series.indicators[i];
        os << series.path.indices[i] << ',' << z[0] << ',' << z[1] << ',' << z[2] << ',' << v.real() << ','
           << v.imag() << ',' << std::abs(v) << '\n';
    }
}

void write_fit_json(const std::filesystem::path& path, const BlowupFit& fit, const ProbeSeries& series) {
    nlohmann::json j;
    j["slope"] = fit.slope;
    j["intercept"] = fit.intercept;
    j["r2"] = fit.r_squared;
    j["classification"] = to_string(fit.classification);
    j["contrast_estimate"] = fit.contrast_estimate;
    j["threshold"] = fit.threshold;
    j["coefficient"] = fit.coefficient;
    j["abscissa"] = to_string(fit.abscissa);
    j["delta"] = fit.delta;
    j["physics"] = to_string(series.physics);
    j["anchor"] = {series.path.anchor.position[0], series.path.anchor.position[1],
                   series.path.anchor.position[2]};
    j["normal"] = {series.path.anchor.normal[0], series.path.anchor.normal[1], series.path.anchor.normal[2]};
    j["j_cap"] = series.j_cap;
    j["uniform_bound_ratio"] = series.uniform_bound_ratio();
    nlohmann::json notes = nlohmann::json::array();
    for (std::size_t i = 0; i < series.notes.size(); ++i)
        if (!series.notes[i].empty()) notes.push_back({{"j", series.path.indices[i]}, {"note", series.notes[i]}});
    j["notes"] = notes;
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << j.dump(2) << '\n';
}

}  // namespace hsp::probe
