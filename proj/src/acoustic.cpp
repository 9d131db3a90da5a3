#include "hsp/acoustic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hsp/errors.hpp"

namespace hsp::acoustic {

AcousticMedium AcousticMedium::constant(double k, const geometry::ShapeSpec& shape, Complex n) {
    AcousticMedium m;
    m.k = k;
    m.shape = shape;
    m.index_profile = [n](const Vec3&) { return n; };
    return m;
}

Complex AcousticMedium::n(const Vec3& x) const {
    return geometry::inside(shape, x) ? index_profile(x) : Complex(1.0);
}

void AcousticMedium::validate() const {
    if (!(k > 0.0)) throw ConfigError("acoustic medium: wavenumber must be positive");
    if (!(contrast_floor >= 0.0)) throw ConfigError("acoustic medium: contrast_floor must be >= 0");
    shape.validate();
    const double diam = shape.diameter();
    for (const auto& dir : sphere_grid(6, 12)) {
        const auto sp = geometry::boundary_point_along_ray(shape, dir.unit);
        for (double f : {0.0, 0.25, 0.5, 1.0}) {
            const Vec3 x = sp.position - (f * 0.1 * diam + 1e-9) * sp.normal;
            if (!geometry::inside(shape, x)) continue;
            const Complex nx = index_profile(x);
            if (!(nx.real() > 0.0)) throw ConfigError("acoustic medium: Re n must be positive");
            if (contrast_floor > 0.0 && std::abs(1.0 - nx) < contrast_floor) {
                std::ostringstream os;
                os << "acoustic medium: |1 - n| = " << std::abs(1.0 - nx) << " below contrast_floor "
                   << contrast_floor << " near the boundary";
                throw ConfigError(os.str());
            }
        }
    }
}

Complex phi(double k, const Vec3& x, const Vec3& y) {
    const double r = norm(x - y);
    if (r == 0.0) throw SingularityError("phi: x == y");
    return std::exp(kI * (k * r)) / (4.0 * kPi * r);
}

CVec3 grad_phi(double k, const Vec3& x, const Vec3& y) {
    const Vec3 d = x - y;
    const double r = norm(d);
    if (r == 0.0) throw SingularityError("grad_phi: x == y");
    const Complex s = std::exp(kI * (k * r)) * (kI * k - 1.0 / r) / (4.0 * kPi * r * r);
    return s * d;
}

Complex phi_ball_integral(double k, double R) {
    if (k * R < 1e-4) return Complex(R * R / 2.0, k * R * R * R / 3.0);
    return std::exp(kI * (k * R)) * (R / (kI * k) + 1.0 / (k * k)) - 1.0 / (k * k);
}

Complex Incident::value(double k, const Vec3& x) const {
    if (kind == Kind::PlaneWave) return std::exp(kI * (k * dot(x, direction)));
    return phi(k, x, source);
}

ScalarGridField plane_wave(double k, const Vec3& d, const GridSpec& grid) {
    if (std::abs(norm(d) - 1.0) > 1e-10) throw PreconditionError("plane_wave: |d| must be 1");
    ScalarGridField f(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) f[i] = std::exp(kI * (k * dot(grid.node(i), d)));
    return f;
}

Complex cell_average_phi(double k, const Vec3& z, const Vec3& c, double h, int max_depth) {
    auto f = [&](const Vec3& y) { return phi(k, y, z); };
    return quad::cube_integral(f, z, c, h, max_depth) / (h * h * h);
}

ScalarGridField point_source(const AcousticMedium& medium, const Vec3& z, const GridSpec& grid,
                             double averaging_radius, std::optional<Vec3> averaging_center) {
    if (geometry::signed_distance(medium.shape, z) <= 0.0)
        throw PreconditionError("point_source: source must lie outside the scatterer");
    const Vec3 ac = averaging_center.value_or(z);
    ScalarGridField f(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Vec3 x = grid.node(i);
        if (averaging_radius > 0.0 && norm(x - ac) <= averaging_radius)
            f[i] = cell_average_phi(medium.k, z, x, grid.spacing);
        else
            f[i] = phi(medium.k, x, z);
    }
    return f;
}

void FarFieldScalar::write_csv(const std::filesystem::path& path) const {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    os.precision(17);
    os << "theta,phi,re,im,weight\n";
    for (std::size_t i = 0; i < directions.size(); ++i)
        os << directions[i].theta << ',' << directions[i].phi << ',' << values[i].real() << ','
           << values[i].imag() << ',' << directions[i].weight << '\n';
}

AcousticSolver::AcousticSolver(const AcousticMedium& medium, const GridSpec& grid)
    : medium_(medium), grid_(grid) {
    medium_.shape.validate();
    if (!(medium_.k > 0.0)) throw ConfigError("acoustic medium: wavenumber must be positive");
    grid_.check_covers(medium_.shape);
    conv_ = std::make_unique<GridConvolution>(grid_);
    const double h = grid_.spacing;
    const double k = medium_.k;
    const double R = h * std::cbrt(3.0 / (4.0 * kPi));
    const Complex self = phi_ball_integral(k, R);
    kernel_ = conv_->kernel_spectrum([&](int a, int b, int c) -> Complex {
        if (a == 0 && b == 0 && c == 0) return self;
        const double r = h * std::sqrt(double(a * a + b * b + c * c));
        return h * h * h * std::exp(kI * (k * r)) / (4.0 * kPi * r);
    });
    contrast_ = cell_averaged_contrast(grid_, medium_.shape,
                                       [this](const Vec3& x) { return medium_.contrast(x); });
    for (std::size_t i = 0; i < contrast_.size(); ++i)
        if (contrast_[i] != 0.0) active_.push_back(i);
}

void AcousticSolver::apply_K_raw(std::span<const Complex> in, std::span<Complex> out) const {
    std::vector<Complex> tmp(grid_.size(), 0.0);
    for (std::size_t i : active_) tmp[i] = contrast_[i] * in[i];
    conv_->apply(kernel_, tmp, out);
    const double s = -medium_.k * medium_.k;
    for (auto& v : out) v *= s;
}

ScalarGridField AcousticSolver::apply_K(const ScalarGridField& field) const {
    if (field.values.size() != grid_.size()) throw ConfigError("apply_K: field grid does not match solver grid");
    ScalarGridField out(grid_);
    if (active_.empty()) return out;
    apply_K_raw(field.values, out.values);
    return out;
}

AcousticSolution AcousticSolver::solve(const ScalarGridField& incident_samples, const Incident& incident,
                                       const GmresOptions& opts) const {
    if (!(opts.tol > 0.0)) throw PreconditionError("solve: tol must be positive");
    if (incident_samples.values.size() != grid_.size())
        throw ConfigError("solve: incident grid does not match solver grid");
    AcousticSolution sol{ScalarGridField(grid_), ScalarGridField(grid_), incident, {}};
    if (active_.empty()) {
        sol.total = incident_samples;
        sol.report.converged = true;
        return sol;
    }
    const std::size_t m = active_.size();
    std::vector<Complex> rhs(m), x(m);
    for (std::size_t a = 0; a < m; ++a) rhs[a] = x[a] = incident_samples[active_[a]];

    std::vector<Complex> full(grid_.size()), Kfull(grid_.size());
    auto matvec = [&](std::span<const Complex> in, std::span<Complex> out) {
        std::fill(full.begin(), full.end(), Complex{});
        for (std::size_t a = 0; a < m; ++a) full[active_[a]] = in[a];
        apply_K_raw(full, Kfull);
        for (std::size_t a = 0; a < m; ++a) out[a] = in[a] - Kfull[active_[a]];
    };
    sol.report = gmres(matvec, rhs, x, opts);
    if (!sol.report.converged)
        throw ConvergenceError("acoustic solve did not converge", sol.report.relative_residual,
                               sol.report.iterations);

    std::fill(full.begin(), full.end(), Complex{});
    for (std::size_t a = 0; a < m; ++a) full[active_[a]] = x[a];
    apply_K_raw(full, sol.scattered.values);
    for (std::size_t i = 0; i < grid_.size(); ++i) sol.total[i] = incident_samples[i] + sol.scattered[i];
    for (std::size_t a = 0; a < m; ++a) sol.total[active_[a]] = x[a];
    return sol;
}

double AcousticSolver::residual(const ScalarGridField& total, const ScalarGridField& incident_samples) const {
    if (active_.empty()) return 0.0;
    std::vector<Complex> Ku(grid_.size());
    apply_K_raw(total.values, Ku);
    double num = 0.0, den = 0.0;
    for (std::size_t i : active_) {
        num += std::norm(total[i] - Ku[i] - incident_samples[i]);
        den += std::norm(incident_samples[i]);
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

ScalarGridField apply_K(const AcousticMedium& medium, const ScalarGridField& field) {
    return AcousticSolver(medium, field.grid).apply_K(field);
}

AcousticSolution solve_total_field(const AcousticMedium& medium, const ScalarGridField& incident_samples,
                                   const Incident& incident, double tol) {
    GmresOptions opts;
    opts.tol = tol;
    return AcousticSolver(medium, incident_samples.grid).solve(incident_samples, incident, opts);
}

FarFieldScalar far_field(const AcousticSolver& solver, const ScalarGridField& total,
                         const std::vector<Direction>& directions) {
    FarFieldScalar ff{directions, std::vector<Complex>(directions.size(), 0.0)};
    const auto& grid = solver.grid();
    const auto& c = solver.contrast();
    const double k = solver.medium().k;
    const double pref = -k * k * grid.cell_volume() / (4.0 * kPi);
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i] != 0.0) active.push_back(i);
    for (std::size_t d = 0; d < directions.size(); ++d) {
        const Vec3 xh = directions[d].unit;
        Complex s = 0.0;
        for (std::size_t i : active) s += c[i] * std::exp(-kI * (k * dot(xh, grid.node(i)))) * total[i];
        ff.values[d] = pref * s;
    }
    return ff;
}

namespace {

void require_exterior(const AcousticSolver& solver, const Vec3& x) {
    if (geometry::signed_distance(solver.medium().shape, x) <= 0.0)
        throw PreconditionError("evaluation point must lie strictly outside the scatterer");
}

}  // namespace

FieldValue scattered_anywhere(const AcousticSolver& solver, const AcousticSolution& sol, const Vec3& x,
                              const quad::Options& opts) {
    const auto& med = solver.medium();
    const double k = med.k;
    const quad::Region region = quad::shape_region(med.shape);
    auto f = [&](const Vec3& y) -> Complex {
        const double r = norm(x - y);
        if (r == 0.0) return 0.0;
        const Complex u = sol.incident.value(k, y) + sol.scattered.interpolate(y);
        return med.contrast(y) * (std::exp(kI * (k * r)) / (4.0 * kPi * r)) * u;
    };
    const auto res = quad::integrate<Complex>(region, x, f, opts);
    return {-k * k * res.value, res.converged, res.depth};
}

GradientValue grad_scattered_anywhere(const AcousticSolver& solver, const AcousticSolution& sol, const Vec3& x,
                                      const quad::Options& opts) {
    const auto& med = solver.medium();
    const double k = med.k;
    const quad::Region region = quad::shape_region(med.shape);
    auto f = [&](const Vec3& y) -> CVec3 {
        if (x[0] == y[0] && x[1] == y[1] && x[2] == y[2]) return {};
        const Complex u = sol.incident.value(k, y) + sol.scattered.interpolate(y);
        return (med.contrast(y) * u) * grad_phi(k, x, y);
    };
    const auto res = quad::integrate<CVec3>(region, x, f, opts);
    return {(-k * k) * res.value, res.converged, res.depth};
}

FieldValue eval_scattered(const AcousticSolver& solver, const AcousticSolution& sol, const Vec3& x,
                          const quad::Options& opts) {
    require_exterior(solver, x);
    return scattered_anywhere(solver, sol, x, opts);
}

GradientValue eval_grad_scattered(const AcousticSolver& solver, const AcousticSolution& sol, const Vec3& x,
                                  const quad::Options& opts) {
    require_exterior(solver, x);
    return grad_scattered_anywhere(solver, sol, x, opts);
}

MixedReciprocity mixed_reciprocity(const AcousticSolver& solver, const Vec3& z, const Vec3& d,
                                   const GmresOptions& opts, double factor) {
    const auto& grid = solver.grid();
    const auto& med = solver.medium();
    const auto ps = solver.solve(point_source(med, z, grid), Incident::point(z), opts);
    const auto ff = far_field(solver, ps.total, {direction_from(-d)});
    const auto pw = solver.solve(plane_wave(med.k, d, grid), Incident::plane(d), opts);
    const Complex usc = eval_scattered(solver, pw, z).value;
    MixedReciprocity r{ff.values[0], usc, 0.0};
    r.residual = std::abs(factor * r.far_field_point_source - usc) / std::max(std::abs(usc), 1e-14);
    return r;
}

}  // namespace hsp::acoustic
