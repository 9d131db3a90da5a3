#include "experiment.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <json.hpp>

#include "hsp/errors.hpp"
#include "hsp/fft_convolution.hpp"

namespace hsp::app {

using nlohmann::json;

namespace {

[[noreturn]] void bad_field(const std::string& field, const std::string& why) {
    throw ConfigError("config field '" + field + "': " + why);
}

const json* find(const json& obj, const std::string& key) {
    if (!obj.is_object()) return nullptr;
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

double get_number(const json& obj, const std::string& key, const std::string& path, double fallback) {
    const json* v = find(obj, key);
    if (!v) return fallback;
    if (!v->is_number()) bad_field(path + key, "expected a number");
    return v->get<double>();
}

int get_int(const json& obj, const std::string& key, const std::string& path, int fallback) {
    const json* v = find(obj, key);
    if (!v) return fallback;
    if (!v->is_number_integer()) bad_field(path + key, "expected an integer");
    return v->get<int>();
}

std::string get_string(const json& obj, const std::string& key, const std::string& path, std::string fallback) {
    const json* v = find(obj, key);
    if (!v) return fallback;
    if (!v->is_string()) bad_field(path + key, "expected a string");
    return v->get<std::string>();
}

Vec3 to_vec(const json& v, const std::string& field) {
    if (!v.is_array() || v.size() != 3) bad_field(field, "expected an array of 3 numbers");
    Vec3 out;
    for (int i = 0; i < 3; ++i) {
        if (!v[i].is_number()) bad_field(field, "expected an array of 3 numbers");
        out[i] = v[i].get<double>();
    }
    return out;
}

Vec3 get_vec(const json& obj, const std::string& key, const std::string& path, Vec3 fallback) {
    const json* v = find(obj, key);
    return v ? to_vec(*v, path + key) : fallback;
}

Vec3 unit(const Vec3& v, const std::string& field) {
    const double n = norm(v);
    if (!(n > 0.0)) bad_field(field, "zero vector");
    return v / n;
}

const json& section(const json& root, const std::string& key) {
    static const json empty = json::object();
    const json* v = find(root, key);
    if (!v) return empty;
    if (!v->is_object()) bad_field(key, "expected an object");
    return *v;
}

std::string timestamp() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string hex(std::uint64_t v) {
    std::ostringstream os;
    os << std::hex;
    os.width(16);
    os.fill('0');
    os << v;
    return os.str();
}

void print_error(const std::string& kind, const std::string& message) {
    std::cerr << json{{"error", kind}, {"message", message}}.dump() << '\n';
}

}  // namespace

acoustic::AcousticMedium ExperimentConfig::acoustic_medium() const {
    return acoustic::AcousticMedium::constant(k, shape, n);
}

elastic::ElasticMedium ExperimentConfig::elastic_medium() const {
    return elastic::ElasticMedium::constant(background, shape, rho);
}

std::vector<geometry::SurfacePoint> ExperimentConfig::resolve_anchors() const {
    std::vector<geometry::SurfacePoint> out;
    for (const auto& a : anchors) {
        geometry::SurfacePoint p;
        if (a.direction) {
            p = geometry::boundary_point_along_ray(shape, *a.direction);
        } else if (a.normal) {
            p = {*a.position, *a.normal};
        } else {
            p = geometry::project_to_boundary(shape, *a.position);
        }
        p.position = p.position + a.offset * p.normal;
        out.push_back(p);
    }
    return out;
}

ExperimentConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ConfigError("config must be a JSON object");

    ExperimentConfig c;
    c.hash = fnv1a(text);
    const std::string physics = get_string(root, "physics", "", "acoustic");
    if (physics == "acoustic") c.physics = probe::Physics::Acoustic;
    else if (physics == "elastic") c.physics = probe::Physics::Elastic;
    else bad_field("physics", "expected 'acoustic' or 'elastic', got '" + physics + "'");

    const json& medium = section(root, "medium");
    const json& shape = section(medium, "shape");
    try {
        c.shape.kind = geometry::shape_kind_from_string(get_string(shape, "kind", "medium.shape.", "ball"));
    } catch (const ConfigError& e) {
        bad_field("medium.shape.kind", e.what());
    }
    c.shape.center = get_vec(shape, "center", "medium.shape.", {});
    if (const json* p = find(shape, "params")) {
        if (!p->is_array()) bad_field("medium.shape.params", "expected an array");
        c.shape.params.clear();
        for (const auto& x : *p) {
            if (!x.is_number()) bad_field("medium.shape.params", "expected numbers");
            c.shape.params.push_back(x.get<double>());
        }
    }
    try {
        c.shape.validate();
    } catch (const ConfigError& e) {
        bad_field("medium.shape", e.what());
    }

    c.k = get_number(medium, "k", "medium.", 1.0);
    if (const json* n = find(medium, "n")) {
        if (n->is_number()) c.n = n->get<double>();
        else if (n->is_array() && n->size() == 2 && (*n)[0].is_number() && (*n)[1].is_number())
            c.n = Complex((*n)[0].get<double>(), (*n)[1].get<double>());
        else bad_field("medium.n", "expected a number or [re, im]");
    }
    c.background.lambda = get_number(medium, "lambda", "medium.", 1.0);
    c.background.mu = get_number(medium, "mu", "medium.", 1.0);
    c.background.omega = get_number(medium, "omega", "medium.", 1.0);
    c.rho = get_number(medium, "rho", "medium.", 1.0);
    try {
        if (c.physics == probe::Physics::Acoustic) c.acoustic_medium().validate();
        else c.elastic_medium().validate();
    } catch (const ConfigError& e) {
        bad_field("medium", e.what());
    }

    const json& grid = section(root, "grid");
    c.grid_center = get_vec(grid, "center", "grid.", {});
    c.grid_half_width = get_number(grid, "half_width", "grid.", 1.0);
    c.grid_n = get_int(grid, "n", "grid.", 64);
    if (!(c.grid_half_width > 0.0)) bad_field("grid.half_width", "must be positive");
    if (c.grid_n < 4) bad_field("grid.n", "must be at least 4");
    try {
        c.grid().check_covers(c.shape);
    } catch (const ConfigError& e) {
        bad_field("grid", e.what());
    }

    const json& dirs = section(root, "directions");
    c.n_theta = get_int(dirs, "n_theta", "directions.", 8);
    c.n_phi = get_int(dirs, "n_phi", "directions.", 16);
    if (c.n_theta < 1) bad_field("directions.n_theta", "must be positive");
    if (c.n_phi < 1) bad_field("directions.n_phi", "must be positive");

    const json& inc = section(root, "incident");
    c.incident_direction = unit(get_vec(inc, "direction", "incident.", {0, 0, 1}), "incident.direction");
    c.incident_polarization =
        unit(get_vec(inc, "polarization", "incident.", {1, 0, 0}), "incident.polarization");
    if (c.physics == probe::Physics::Elastic && std::abs(dot(c.incident_direction, c.incident_polarization)) > 1e-12)
        bad_field("incident.polarization", "must be orthogonal to incident.direction");
    c.validate = get_string(root, "validate", "", "");
    if (!c.validate.empty() && c.validate != "mie" && c.validate != "born")
        bad_field("validate", "expected 'mie' or 'born'");
    if (!c.validate.empty() &&
        (c.physics != probe::Physics::Acoustic || c.shape.kind != geometry::ShapeKind::Ball))
        bad_field("validate", "only available for acoustic balls");

    const json& pr = section(root, "probe");
    if (const json* anchors = find(pr, "anchors")) {
        if (!anchors->is_array()) bad_field("probe.anchors", "expected an array");
        for (std::size_t i = 0; i < anchors->size(); ++i) {
            const json& a = (*anchors)[i];
            const std::string path = "probe.anchors[" + std::to_string(i) + "].";
            if (!a.is_object()) bad_field(path.substr(0, path.size() - 1), "expected an object");
            AnchorSpec s;
            if (const json* v = find(a, "position")) s.position = to_vec(*v, path + "position");
            if (const json* v = find(a, "normal")) s.normal = unit(to_vec(*v, path + "normal"), path + "normal");
            if (const json* v = find(a, "direction"))
                s.direction = unit(to_vec(*v, path + "direction"), path + "direction");
            s.offset = get_number(a, "offset", path, 0.0);
            if (!s.direction && !s.position) bad_field(path + "position", "anchor needs a position or a direction");
            if (s.normal && !s.position) bad_field(path + "position", "normal given without position");
            c.anchors.push_back(s);
        }
    }
    c.j_min = get_int(pr, "j_min", "probe.", 2);
    c.j_max = get_int(pr, "j_max", "probe.", 16);
    c.delta = get_number(pr, "delta", "probe.", 0.3);
    if (c.j_min < 1 || c.j_max < c.j_min) bad_field("probe.j_min", "need 1 <= j_min <= j_max");
    if (c.j_max - c.j_min + 1 < 4) bad_field("probe.j_max", "the fit needs at least 4 values of j");
    if (!(c.delta > 0.0)) bad_field("probe.delta", "must be positive");
    const int cap = probe::j_cap(c.grid());
    if (c.j_max > cap)
        bad_field("probe.j_max", std::to_string(c.j_max) + " exceeds the grid cap (1/j >= 2h gives j <= " +
                                     std::to_string(cap) + ")");
    try {
        c.abscissa = probe::abscissa_from_string(get_string(pr, "abscissa", "probe.", "log_j"));
    } catch (const ConfigError& e) {
        bad_field("probe.abscissa", e.what());
    }
    c.threshold_fraction = get_number(pr, "threshold_fraction", "probe.", 0.25);
    c.reference_contrast = get_number(pr, "reference_contrast", "probe.", 0.1);

    const json& solver = section(root, "solver");
    c.gmres.tol = get_number(solver, "tol", "solver.", 1e-8);
    c.gmres.restart = get_int(solver, "restart", "solver.", 30);
    c.gmres.max_iterations = get_int(solver, "max_iterations", "solver.", 500);
    if (!(c.gmres.tol > 0.0)) bad_field("solver.tol", "must be positive");
    if (c.gmres.restart < 1) bad_field("solver.restart", "must be positive");
    if (c.gmres.max_iterations < 1) bad_field("solver.max_iterations", "must be positive");

    c.output_dir = get_string(root, "output_dir", "", "out");
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot read config " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return parse_config(ss.str());
}

std::uint64_t fnv1a(const std::string& bytes) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t file_checksum(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot read " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return fnv1a(ss.str());
}

RunManifest::RunManifest(std::filesystem::path dir, std::string command, std::uint64_t config_hash)
    : dir_(std::move(dir)), command_(std::move(command)), config_hash_(config_hash), started_(timestamp()) {
    std::filesystem::create_directories(dir_);
    write();
}

void RunManifest::task(const std::string& name, const std::string& status) {
    for (auto& t : tasks_)
        if (t.first == name) {
            t.second = status;
            write();
            return;
        }
    tasks_.emplace_back(name, status);
    write();
}

void RunManifest::add_file(const std::filesystem::path& path) {
    files_.push_back(path);
    write();
}

void RunManifest::finish(const std::string& status) {
    status_ = status;
    finished_ = timestamp();
    write();
}

void RunManifest::write() const {
    json j;
    j["tool"] = "hsprobe";
    j["version"] = kToolVersion;
    j["command"] = command_;
    j["config_hash"] = hex(config_hash_);
    j["started"] = started_;
    j["finished"] = finished_.empty() ? json(nullptr) : json(finished_);
    j["status"] = status_;
    json tasks = json::array();
    for (const auto& [name, status] : tasks_) tasks.push_back({{"name", name}, {"status", status}});
    j["tasks"] = tasks;
    json files = json::array();
    for (const auto& f : files_) {
        const auto rel = std::filesystem::relative(f, dir_).generic_string();
        files.push_back({{"path", rel}, {"fnv1a64", hex(file_checksum(f))}});
    }
    j["files"] = files;
    const auto tmp = dir_ / "manifest.json.tmp";
    {
        std::ofstream os(tmp);
        if (!os) throw ConfigError("cannot write " + tmp.string());
        os << j.dump(2) << '\n';
    }
    std::filesystem::rename(tmp, dir_ / "manifest.json");
}

namespace {

std::filesystem::path out_dir(const ExperimentConfig& config, const RunOptions& run) {
    return run.out.empty() ? config.output_dir : run.out;
}

void record_field(RunManifest& manifest, const std::filesystem::path& stem) {
    manifest.add_file(stem.string() + ".hdr");
    manifest.add_file(stem.string() + ".bin");
}

}  // namespace

int cmd_forward(const ExperimentConfig& config, const RunOptions& run) {
    const auto dir = out_dir(config, run);
    RunManifest manifest(dir, "forward", config.hash);
    set_fft_threads(run.threads);
    const GridSpec grid = config.grid();
    const auto dirs = sphere_grid(config.n_theta, config.n_phi);
    int status = kSuccess;
    try {
        manifest.task("solve", "running");
        if (config.physics == probe::Physics::Acoustic) {
            const auto medium = config.acoustic_medium();
            acoustic::AcousticSolver solver(medium, grid);
            const auto rhs = acoustic::plane_wave(medium.k, config.incident_direction, grid);
            const auto sol = solver.solve(rhs, acoustic::Incident::plane(config.incident_direction), config.gmres);
            manifest.task("solve", "ok iterations=" + std::to_string(sol.report.iterations) +
                                       " residual=" + std::to_string(solver.residual(sol.total, rhs)));
            const auto ff = acoustic::far_field(solver, sol.total, dirs);
            ff.write_csv(dir / "far_field.csv");
            manifest.add_file(dir / "far_field.csv");
            write_field(dir / "total", sol.total, medium.k);
            record_field(manifest, dir / "total");
            if (!config.validate.empty()) {
                const double radius = config.shape.params[0];
                std::vector<Complex> ref(dirs.size());
                double tol;
                if (config.validate == "mie") {
                    ref = oracle::mie_far_field(radius, config.n.real(), medium.k, dirs, config.incident_direction)
                              .values;
                    tol = 3e-2;
                } else {
                    for (std::size_t i = 0; i < dirs.size(); ++i)
                        ref[i] = oracle::born_far_field(radius, 1.0 - config.n.real(), medium.k, dirs[i].unit,
                                                        config.incident_direction);
                    tol = 2e-2;
                }
                const double err = oracle::relative_l2(dirs, ff.values, ref);
                oracle::OracleReport r;
                r.name = config.validate + "_far_field_rel_l2";
                r.rel_error = err;
                r.abs_error = err;
                r.reference = 0.0;
                r.test = err;
                r.budget = static_cast<long>(dirs.size());
                r.tolerance = tol;
                oracle::append_csv(dir / "oracle_report.csv", {r});
                manifest.add_file(dir / "oracle_report.csv");
                std::cout << config.validate << " far-field relative L2 error: " << err << " (tolerance " << tol
                          << ")" << (r.passed() ? "" : "  FAILED") << '\n';
                if (!r.passed()) status = kCheckFailure;
            }
        } else {
            const auto medium = config.elastic_medium();
            elastic::ElasticSolver solver(medium, grid);
            const auto& d = config.incident_direction;
            const auto& q = config.incident_polarization;
            const auto rhs = elastic::elastic_plane_wave(medium.background, d, q, grid);
            const auto sol = solver.solve(rhs, elastic::Incident::plane(d, q), config.gmres);
            manifest.task("solve", "ok iterations=" + std::to_string(sol.report.iterations) +
                                       " residual=" + std::to_string(solver.residual(sol.total, rhs)));
            const auto ff = elastic::elastic_far_field(solver, sol.total, dirs);
            ff.write_csv(dir / "far_field.csv");
            manifest.add_file(dir / "far_field.csv");
            write_field(dir / "total", sol.total, medium.background.omega);
            record_field(manifest, dir / "total");
        }
    } catch (const ConvergenceError& e) {
        manifest.task("solve", std::string("failed: ") + e.what());
        manifest.finish("failed");
        print_error("solver", e.what());
        return kCheckFailure;
    }
    manifest.finish(status == kSuccess ? "complete" : "check_failed");
    return status;
}

int cmd_probe(const ExperimentConfig& config, const RunOptions& run) {
    const auto dir = out_dir(config, run);
    RunManifest manifest(dir, "probe", config.hash);
    const auto anchors = config.resolve_anchors();
    if (anchors.empty()) {
        manifest.finish("complete");
        return kSuccess;
    }
    const GridSpec grid = config.grid();
    probe::ProbeConfig pc;
    pc.j_min = config.j_min;
    pc.j_max = config.j_max;
    pc.gmres = config.gmres;
    pc.threads = run.threads;
    probe::FitOptions fo;
    fo.delta = config.delta;
    fo.abscissa = config.abscissa;
    fo.threshold_fraction = config.threshold_fraction;
    fo.reference_contrast = config.reference_contrast;

    std::unique_ptr<acoustic::AcousticSolver> as;
    std::unique_ptr<elastic::ElasticSolver> es;
    if (config.physics == probe::Physics::Acoustic)
        as = std::make_unique<acoustic::AcousticSolver>(config.acoustic_medium(), grid);
    else
        es = std::make_unique<elastic::ElasticSolver>(config.elastic_medium(), grid);

    int status = kSuccess;
    for (std::size_t i = 0; i < anchors.size(); ++i) {
        const std::string name = "anchor_" + std::to_string(i);
        manifest.task(name, "running");
        try {
            const auto series = as ? probe::run_probe_acoustic(*as, anchors[i], pc)
                                   : probe::run_probe_elastic(*es, anchors[i], pc);
            const auto fit = probe::fit_log_blowup(series, fo);
            const auto csv = dir / ("probe_" + std::to_string(i) + ".csv");
            const auto js = dir / ("fit_" + std::to_string(i) + ".json");
            probe::write_series_csv(csv, series);
            manifest.add_file(csv);
            probe::write_fit_json(js, fit, series);
            manifest.add_file(js);
            std::size_t failed = 0;
            for (bool ok : series.ok) failed += ok ? 0 : 1;
            manifest.task(name, failed ? "partial: " + std::to_string(failed) + " solves failed" : "ok");
            std::cout << name << ": " << probe::to_string(fit.classification) << " slope=" << fit.slope
                      << " r2=" << fit.r_squared << " contrast_estimate=" << fit.contrast_estimate << '\n';
        } catch (const GeometryError& e) {
            manifest.task(name, std::string("failed: ") + e.what());
            print_error("geometry", e.what());
            status = kCheckFailure;
        } catch (const PreconditionError& e) {
            manifest.task(name, std::string("failed: ") + e.what());
            print_error("precondition", e.what());
            status = kCheckFailure;
        }
    }
    manifest.finish(status == kSuccess ? "complete" : "failed");
    return status;
}

namespace {

oracle::OracleReport bound_row(std::string name, double value, double bound) {
    oracle::OracleReport r;
    r.name = std::move(name);
    r.reference = bound;
    r.test = value;
    r.abs_error = std::max(0.0, value - bound);
    r.rel_error = r.abs_error / std::max(std::abs(bound), 1e-300);
    r.tolerance = 0.0;
    r.budget = 1;
    return r;
}

double frob(const CMat3& m) {
    double s = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s += std::norm(m[i][j]);
    return std::sqrt(s);
}

Vec3 random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Vec3 v{g(rng), g(rng), g(rng)};
    return v / norm(v);
}

double max_rel(const CVec3& a, const CVec3& b) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 3; ++i) {
        num = std::max(num, std::abs(a[i] - b[i]));
        den = std::max(den, std::abs(b[i]));
    }
    return num / std::max(den, 1e-300);
}

double max_rel(const Mat3& a, const Mat3& b) {
    double num = 0.0, den = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            num = std::max(num, std::abs(a[i][j] - b[i][j]));
            den = std::max(den, std::abs(b[i][j]));
        }
    return num / std::max(den, 1e-300);
}

oracle::OracleReport rel_row(std::string name, double rel, double tol, long budget = 1) {
    oracle::OracleReport r;
    r.name = std::move(name);
    r.rel_error = rel;
    r.abs_error = rel;
    r.test = rel;
    r.tolerance = tol;
    r.budget = budget;
    return r;
}

void suite_kernels(std::vector<oracle::OracleReport>& rows, std::uint64_t seed) {
    const elastic::Background bg{1.0, 1.0, 1.0};
    const auto kc = bg.kelvin();
    rows.push_back(oracle::make_report("alpha_plus_beta", 1.0 / (4.0 * kPi * bg.mu), kc.alpha + kc.beta, 1, 1e-14));

    std::mt19937_64 rng(seed);
    const Vec3 e = random_unit(rng);
    const Vec3 y{0.1, -0.2, 0.3};
    auto diff = [&](double r) {
        const CMat3 pi = elastic::navier_tensor(bg, y + r * e, y);
        return frob(pi - to_complex(elastic::kelvin_tensor(kc, y + r * e, y)));
    };
    rows.push_back(bound_row("navier_minus_kelvin_bounded", diff(1e-4), 2.0 * diff(1e-1) + 10.0));

    double sym = 0.0;
    for (int t = 0; t < 20; ++t) {
        const Vec3 x = y + (0.1 + 1.9 * std::uniform_real_distribution<double>()(rng)) * random_unit(rng);
        const CMat3 p = elastic::navier_tensor(bg, x, y);
        CMat3 pt;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) pt[i][j] = p[j][i];
        sym = std::max(sym, frob(p - pt) / frob(p));
    }
    rows.push_back(rel_row("navier_symmetric", sym, 1e-12, 20));

    const double k = 1.0;
    const Vec3 zero{};
    const Vec3 x{0.3, 0.0, 0.0};
    const CVec3 fd =
        oracle::finite_difference_gradient([&](const Vec3& p) { return acoustic::phi(k, p, zero); }, x, 1e-3);
    rows.push_back(rel_row("grad_phi_vs_fd", max_rel(acoustic::grad_phi(k, x, zero), fd), 1e-8));
}

void suite_lemma31(std::vector<oracle::OracleReport>& rows, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u01;
    double worst_fd = 0.0, worst_contract = 0.0, worst_special = 0.0;
    for (int t = 0; t < 100; ++t) {
        const double lambda = 0.5 + 2.0 * u01(rng), mu = 0.5 + 1.5 * u01(rng);
        const auto kc = elastic::kelvin_constants(lambda, mu);
        const Vec3 y{u01(rng) - 0.5, u01(rng) - 0.5, u01(rng) - 0.5};
        const double r = 0.1 + 1.9 * u01(rng);
        const Vec3 x = y + r * random_unit(rng);
        const Vec3 b = random_unit(rng) * (0.5 + u01(rng));

        const Mat3 exact = elastic::grad_kelvin_apply(kc, x, y, b);
        const CMat3 fd = oracle::finite_difference_jacobian(
            [&](const Vec3& p) { return to_complex(elastic::kelvin_tensor(kc, p, y) * b); }, x, 1e-3 * r);
        Mat3 fd_re;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) fd_re[i][j] = fd[i][j].real();
        worst_fd = std::max(worst_fd, max_rel(fd_re, exact));

        const Vec3 composed = exact * (elastic::kelvin_tensor(kc, x, y) * b);
        worst_contract = std::max(
            worst_contract, max_rel(to_complex(elastic::grad_kelvin_contract(kc, x, y, b)), to_complex(composed)));

        const Vec3 xbar = (x - y) / r;
        const Vec3 special = elastic::grad_kelvin_contract(kc, x, y, xbar);
        const double s = kc.alpha + kc.beta;
        const Vec3 expected = -(s * s / (r * r * r)) * xbar;
        worst_special = std::max(worst_special, max_rel(to_complex(special), to_complex(expected)));
    }
    rows.push_back(rel_row("lemma31_grad_kelvin_vs_fd", worst_fd, 1e-6, 100));
    rows.push_back(rel_row("lemma31_contract_identity", worst_contract, 1e-12, 100));
    rows.push_back(rel_row("lemma31_b_equals_xbar", worst_special, 1e-12, 100));
}

void suite_lemma23(std::vector<oracle::OracleReport>& rows) {
    const Vec3 anchor{0.0, 0.0, 0.0};
    const Vec3 nu{0.0, 0.0, 1.0};
    for (double delta : {0.3, 0.5})
        for (int j : {1, 10, 100}) {
            const auto region = oracle::halfball_region(anchor, nu, delta);
            const auto q = oracle::singular_quadrature(region, anchor + nu / double(j), 3,
                                                       [](const Vec3&) { return Complex(1.0); });
            auto r = oracle::make_report("lemma23_d" + std::to_string(delta).substr(0, 3) + "_j" + std::to_string(j),
                                         oracle::halfball_log_integral(delta, j), q.value, q.evaluations, 1e-4);
            rows.push_back(r);
        }
    for (double delta : {0.3, 0.5}) {
        const double deficit = oracle::halfball_log_integral(delta, 100) - 2.0 * kPi * std::log(delta * 100 + 1.0);
        oracle::OracleReport r = oracle::make_report("lemma23_deficit_d" + std::to_string(delta).substr(0, 3),
                                                     -2.0 * kPi, deficit, 1, 1.0);
        r.rel_error = r.abs_error;  // absolute criterion
        r.tolerance = 1e-2;
        rows.push_back(r);
    }
}

void suite_reciprocity(std::vector<oracle::OracleReport>& rows) {
    const GridSpec grid = GridSpec::cube({}, 1.0, 32);
    const auto shape = geometry::ShapeSpec::ball({}, 0.8);
    const std::vector<std::pair<Vec3, Vec3>> pairs = {
        {{0, 0, 1}, {1, 0, 0}},
        {{0.6, 0, 0.8}, {0, 1, 0}},
        {{0, -0.6, 0.8}, {-0.8, 0, 0.6}},
    };
    for (double n : {1.01, 1.5}) {
        const auto medium = acoustic::AcousticMedium::constant(1.0, shape, n);
        acoustic::AcousticSolver solver(medium, grid);
        double worst = 0.0;
        for (const auto& [xhat, d] : pairs) {
            auto ff = [&](const Vec3& inc, const Vec3& obs) {
                const auto sol = solver.solve(acoustic::plane_wave(1.0, inc, grid), acoustic::Incident::plane(inc));
                return acoustic::far_field(solver, sol.total, {direction_from(obs)}).values[0];
            };
            const Complex a = ff(d, xhat), b = ff(-1.0 * xhat, -1.0 * d);
            worst = std::max(worst, std::abs(a - b) / std::abs(a));
        }
        rows.push_back(rel_row(n < 1.1 ? "far_field_reciprocity_born" : "far_field_reciprocity_n1.5", worst,
                               n < 1.1 ? 1e-3 : 2e-2, static_cast<long>(pairs.size())));
        const auto mr = acoustic::mixed_reciprocity(solver, {0.0, 0.0, 1.5}, {0.0, 0.0, 1.0});
        rows.push_back(rel_row(n < 1.1 ? "mixed_reciprocity_born" : "mixed_reciprocity_n1.5", mr.residual, 2e-2));
    }
}

}  // namespace

std::vector<oracle::OracleReport> run_suite(const std::string& suite, std::uint64_t seed) {
    std::vector<oracle::OracleReport> rows;
    const bool all = suite == "all";
    if (!all && suite != "kernels" && suite != "lemma31" && suite != "lemma23" && suite != "reciprocity")
        throw ConfigError("unknown suite '" + suite + "' (expected kernels, reciprocity, lemma23, lemma31 or all)");
    if (all || suite == "kernels") suite_kernels(rows, seed);
    if (all || suite == "lemma31") suite_lemma31(rows, seed);
    if (all || suite == "lemma23") suite_lemma23(rows);
    if (all || suite == "reciprocity") suite_reciprocity(rows);
    return rows;
}

int cmd_verify(const std::string& suite, const RunOptions& run) {
    const auto dir = run.out.empty() ? std::filesystem::path("out") : run.out;
    if (suite != "all" && suite != "kernels" && suite != "lemma31" && suite != "lemma23" && suite != "reciprocity") {
        print_error("usage", "unknown suite '" + suite + "'");
        return kUsageError;
    }
    RunManifest manifest(dir, "verify " + suite, fnv1a(suite));
    manifest.task(suite, "running");
    const auto rows = run_suite(suite, run.seed);
    const auto csv = dir / "oracle_report.csv";
    std::filesystem::remove(csv);
    oracle::append_csv(csv, rows);
    manifest.add_file(csv);
    int failed = 0;
    for (const auto& r : rows) {
        std::cout << (r.passed() ? "ok    " : "FAILED") << ' ' << r.name << " rel_err=" << r.rel_error
                  << " tol=" << r.tolerance << '\n';
        failed += r.passed() ? 0 : 1;
    }
    manifest.task(suite, failed ? std::to_string(failed) + " rows failed" : "ok");
    manifest.finish(failed ? "check_failed" : "complete");
    return failed ? kCheckFailure : kSuccess;
}

}  // namespace hsp::app
