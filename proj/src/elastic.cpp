#include "hsp/elastic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hsp/errors.hpp"

namespace hsp::elastic {

KelvinConstants kelvin_constants(double lambda, double mu) {
    if (!(mu > 0.0) || !(lambda + 2.0 * mu > 0.0))
        throw ConfigError("Lame constants: need mu > 0 and lambda + 2 mu > 0");
    const double den = 8.0 * kPi * mu * (lambda + 2.0 * mu);
    return {(lambda + 3.0 * mu) / den, (lambda + mu) / den};
}

double Background::ks() const { return omega * std::sqrt(1.0 / mu); }
double Background::kp() const { return omega * std::sqrt(1.0 / (lambda + 2.0 * mu)); }

void Background::validate() const {
    if (!(mu > 0.0)) throw ConfigError("elastic medium: mu must be positive");
    if (!(2.0 * mu + 3.0 * lambda > 0.0)) throw ConfigError("elastic medium: need 2 mu + 3 lambda > 0");
    if (!(omega > 0.0)) throw ConfigError("elastic medium: omega must be positive");
}

ElasticMedium ElasticMedium::constant(const Background& bg, const geometry::ShapeSpec& shape, double rho) {
    ElasticMedium m;
    m.background = bg;
    m.shape = shape;
    m.density_profile = [rho](const Vec3&) { return rho; };
    return m;
}

double ElasticMedium::rho(const Vec3& x) const { return geometry::inside(shape, x) ? density_profile(x) : 1.0; }

void ElasticMedium::validate() const {
    background.validate();
    shape.validate();
    if (!(contrast_floor >= 0.0)) throw ConfigError("elastic medium: contrast_floor must be >= 0");
    const double diam = shape.diameter();
    for (const auto& dir : sphere_grid(6, 12)) {
        const auto sp = geometry::boundary_point_along_ray(shape, dir.unit);
        for (double f : {0.0, 0.25, 0.5, 1.0}) {
            const Vec3 x = sp.position - (f * 0.1 * diam + 1e-9) * sp.normal;
            if (!geometry::inside(shape, x)) continue;
            const double r = density_profile(x);
            if (!(r > 0.0)) throw ConfigError("elastic medium: density must be positive");
            if (contrast_floor > 0.0 && std::abs(1.0 - r) < contrast_floor) {
                std::ostringstream os;
                os << "elastic medium: |1 - rho| = " << std::abs(1.0 - r) << " below contrast_floor "
                   << contrast_floor << " near the boundary";
                throw ConfigError(os.str());
            }
        }
    }
}

Mat3 kelvin_tensor(const KelvinConstants& c, const Vec3& x, const Vec3& y) {
    const Vec3 d = x - y;
    const double r = norm(d);
    if (r == 0.0) throw SingularityError("kelvin_tensor: x == y");
    const Vec3 e = d / r;
    return (c.alpha / r) * Mat3::identity() + (c.beta / r) * outer(e, e);
}

namespace {

// Radial derivatives of psi = Phi_ks - Phi_kp, written as
// A = psi'', B = psi'/r, dA = psi''', dB = B'.
struct PsiDerivs {
    Complex A, B, dA, dB;
};

struct GDerivs {
    Complex g, g1, g2, g3;
};

GDerivs helmholtz_derivs(double k, double r) {
    const Complex e = std::exp(kI * (k * r)) / (4.0 * kPi);
    const Complex ikr = kI * (k * r);
    const double kr2 = k * k * r * r;
    return {e / r, e * (ikr - 1.0) / (r * r), e * (2.0 - 2.0 * ikr - kr2) / (r * r * r),
            e * (-6.0 + 6.0 * ikr + 3.0 * kr2 - ikr * kr2) / (r * r * r * r)};
}

PsiDerivs psi_derivs(double ks, double kp, double r) {
    PsiDerivs p;
    if (std::max(ks, kp) * r < 0.5) {
        // psi = sum_{n>=1} c_n r^(n-1), c_n = ((i ks)^n - (i kp)^n) / (4 pi n!).
        Complex ts = 1.0, tp = 1.0;
        p = {0.0, 0.0, 0.0, 0.0};
        for (int n = 1; n <= 40; ++n) {
            ts *= kI * ks / double(n);
            tp *= kI * kp / double(n);
            const Complex c = (ts - tp) / (4.0 * kPi);
            const double nn = n;
            if (n >= 2) p.B += c * (nn - 1.0) * std::pow(r, n - 3);
            if (n >= 3) p.A += c * (nn - 1.0) * (nn - 2.0) * std::pow(r, n - 3);
            if (n >= 4) {
                p.dA += c * (nn - 1.0) * (nn - 2.0) * (nn - 3.0) * std::pow(r, n - 4);
                p.dB += c * (nn - 1.0) * (nn - 3.0) * std::pow(r, n - 4);
            }
            if (n == 2) p.dB -= c / (r * r);
        }
        return p;
    }
    const GDerivs s = helmholtz_derivs(ks, r), q = helmholtz_derivs(kp, r);
    p.A = s.g2 - q.g2;
    p.B = (s.g1 - q.g1) / r;
    p.dA = s.g3 - q.g3;
    p.dB = (p.A - p.B) / r;
    return p;
}

}  // namespace

CMat3 navier_tensor(const Background& bg, const Vec3& x, const Vec3& y) {
    const Vec3 d = x - y;
    const double r = norm(d);
    if (r == 0.0) throw SingularityError("navier_tensor: x == y");
    const Vec3 e = d / r;
    const double ks = bg.ks(), kp = bg.kp(), w2 = bg.omega * bg.omega;
    const Complex gs = std::exp(kI * (ks * r)) / (4.0 * kPi * r);
    const PsiDerivs p = psi_derivs(ks, kp, r);
    CMat3 out;
    for (int i = 0; i < 3; ++i)
        for (int l = 0; l < 3; ++l) {
            const double ee = e[i] * e[l];
            const double id = i == l ? 1.0 : 0.0;
            out[i][l] = gs / bg.mu * id + (p.A * ee + p.B * (id - ee)) / w2;
        }
    return out;
}

CMat3 navier_minus_kelvin_at_zero(const Background& bg) {
    const double ks = bg.ks(), kp = bg.kp(), w2 = bg.omega * bg.omega;
    const Complex v = kI * (ks / (4.0 * kPi * bg.mu) - (ks * ks * ks - kp * kp * kp) / (12.0 * kPi * w2));
    return v * CMat3::identity();
}

Tensor3 navier_gradient(const Background& bg, const Vec3& x, const Vec3& y) {
    const Vec3 d = x - y;
    const double r = norm(d);
    if (r == 0.0) throw SingularityError("navier_gradient: x == y");
    const Vec3 e = d / r;
    const double ks = bg.ks(), kp = bg.kp(), w2 = bg.omega * bg.omega;
    const Complex gs1 = std::exp(kI * (ks * r)) * (kI * (ks * r) - 1.0) / (4.0 * kPi * r * r);
    const PsiDerivs p = psi_derivs(ks, kp, r);
    const Complex c3 = (p.dA - 3.0 * p.dB) / w2;
    const Complex c1 = p.dB / w2;
    Tensor3 t;
    for (int m = 0; m < 3; ++m)
        for (int i = 0; i < 3; ++i)
            for (int l = 0; l < 3; ++l) {
                const double dil = i == l, dim = i == m, dlm = l == m;
                t[m][i][l] = gs1 / bg.mu * e[m] * dil + c3 * (e[i] * e[l] * e[m]) +
                             c1 * (dim * e[l] + dlm * e[i] + dil * e[m]);
            }
    return t;
}

CMat3 navier_gradient_apply(const Tensor3& t, const CVec3& b) {
    CMat3 G;
    for (int i = 0; i < 3; ++i)
        for (int l = 0; l < 3; ++l) G[i][l] = t[l][i][0] * b[0] + t[l][i][1] * b[1] + t[l][i][2] * b[2];
    return G;
}

Mat3 grad_kelvin_apply(const KelvinConstants& c, const Vec3& x, const Vec3& y, const Vec3& b) {
    const Vec3 d = x - y;
    const double r = norm(d);
    if (r == 0.0) throw SingularityError("grad_kelvin_apply: x == y");
    const Vec3 e = d / r;
    const double eb = dot(e, b);
    Mat3 G = (-c.alpha) * outer(b, e) + c.beta * (eb * Mat3::identity() + outer(e, b) - (3.0 * eb) * outer(e, e));
    return (1.0 / (r * r)) * G;
}

Vec3 grad_kelvin_contract(const KelvinConstants& c, const Vec3& x, const Vec3& y, const Vec3& b) {
    const Vec3 d = x - y;
    const double r = norm(d);
    if (r == 0.0) throw SingularityError("grad_kelvin_contract: x == y");
    const Vec3 e = d / r;
    const double eb = dot(e, b);
    const double a = c.alpha, be = c.beta;
    return (1.0 / (r * r * r)) *
           ((-a * a * eb) * b + (a * be * dot(b, b) - (3.0 * a * be + be * be) * eb * eb) * e);
}

CVec3 traction_from_gradient(double lambda, double mu, const CMat3& G, const Vec3& nu) {
    const CVec3 dnu = G * nu;
    const Complex div = G[0][0] + G[1][1] + G[2][2];
    const CVec3 curl{G[2][1] - G[1][2], G[0][2] - G[2][0], G[1][0] - G[0][1]};
    const CVec3 nxc = cross(nu, curl);
    CVec3 t = (2.0 * mu) * dnu + (lambda * div) * nu;
    return t + mu * nxc;
}

namespace {

CMat3 fd_jacobian(const std::function<CVec3(const Vec3&)>& f, const Vec3& x, double s) {
    CMat3 G;
    for (int l = 0; l < 3; ++l) {
        Vec3 e{};
        e[l] = s;
        const CVec3 dp = (f(x + e) - f(x - e)) / (2.0 * s);
        for (int i = 0; i < 3; ++i) G[i][l] = dp[i];
    }
    return G;
}

}  // namespace

CVec3 traction(double lambda, double mu, const std::function<CVec3(const Vec3&)>& field, const Vec3& x,
               const Vec3& nu, double step) {
    const CMat3 g1 = fd_jacobian(field, x, step);
    const CMat3 g2 = fd_jacobian(field, x, 0.5 * step);
    const CMat3 G = (4.0 / 3.0) * g2 - (1.0 / 3.0) * g1;
    return traction_from_gradient(lambda, mu, G, nu);
}

Incident Incident::plane(const Vec3& d, const Vec3& q, double p_weight, double s_weight) {
    Incident in;
    in.kind = Kind::PlaneWave;
    in.d = d;
    in.q = q;
    in.p_weight = p_weight;
    in.s_weight = s_weight;
    return in;
}

Incident Incident::point(const Vec3& z, const Vec3& a) {
    Incident in;
    in.kind = Kind::PointSource;
    in.source = z;
    in.polarization = a;
    return in;
}

CVec3 Incident::value(const Background& bg, const Vec3& x) const {
    if (kind == Kind::PointSource) return navier_tensor(bg, x, source) * polarization;
    const double xd = dot(x, d);
    return (p_weight * std::exp(kI * (bg.kp() * xd))) * d + (s_weight * std::exp(kI * (bg.ks() * xd))) * q;
}

CMat3 Incident::gradient(const Background& bg, const Vec3& x) const {
    if (kind == Kind::PointSource)
        return navier_gradient_apply(navier_gradient(bg, x, source), to_complex(polarization));
    const double xd = dot(x, d);
    const Complex ep = p_weight * kI * bg.kp() * std::exp(kI * (bg.kp() * xd));
    const Complex es = s_weight * kI * bg.ks() * std::exp(kI * (bg.ks() * xd));
    CMat3 G;
    for (int i = 0; i < 3; ++i)
        for (int l = 0; l < 3; ++l) G[i][l] = ep * d[i] * d[l] + es * q[i] * d[l];
    return G;
}

VectorGridField elastic_plane_wave(const Background& bg, const Vec3& d, const Vec3& q, const GridSpec& grid,
                                   double p_weight, double s_weight) {
    if (std::abs(norm(d) - 1.0) > 1e-10 || std::abs(norm(q) - 1.0) > 1e-10)
        throw PreconditionError("elastic_plane_wave: |d| and |q| must be 1");
    if (std::abs(dot(d, q)) > 1e-10) throw PreconditionError("elastic_plane_wave: d and q must be orthogonal");
    const Incident in = Incident::plane(d, q, p_weight, s_weight);
    VectorGridField f(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) f[i] = in.value(bg, grid.node(i));
    return f;
}

VectorGridField elastic_point_source(const ElasticMedium& medium, const Vec3& z, const Vec3& a,
                                     const GridSpec& grid, double averaging_radius,
                                     std::optional<Vec3> averaging_center) {
    if (geometry::signed_distance(medium.shape, z) <= 0.0)
        throw PreconditionError("elastic_point_source: source must lie outside the scatterer");
    if (std::abs(norm(a) - 1.0) > 1e-10) throw PreconditionError("elastic_point_source: |a| must be 1");
    const Vec3 ac = averaging_center.value_or(z);
    const Background& bg = medium.background;
    const double h = grid.spacing;
    VectorGridField f(grid);
    auto sample = [&](const Vec3& y) { return navier_tensor(bg, y, z) * a; };
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Vec3 x = grid.node(i);
        if (averaging_radius > 0.0 && norm(x - ac) <= averaging_radius)
            f[i] = quad::cube_integral(sample, z, x, h, 6) / (h * h * h);
        else
            f[i] = sample(x);
    }
    return f;
}

void FarFieldVector::write_csv(const std::filesystem::path& path) const {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    os.precision(17);
    os << "theta,phi,re1,re2,re3,im1,im2,im3,part,weight\n";
    for (std::size_t i = 0; i < directions.size(); ++i) {
        for (int part = 0; part < 2; ++part) {
            const CVec3& v = part == 0 ? p_part[i] : s_part[i];
            os << directions[i].theta << ',' << directions[i].phi;
            for (int c = 0; c < 3; ++c) os << ',' << v[c].real();
            for (int c = 0; c < 3; ++c) os << ',' << v[c].imag();
            os << ',' << (part == 0 ? 'p' : 's') << ',' << directions[i].weight << '\n';
        }
    }
}

namespace {

constexpr std::array<std::pair<int, int>, 6> kPairs{{{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}}};

int pair_index(int i, int l) {
    if (i == l) return i;
    const int a = std::min(i, l), b = std::max(i, l);
    return a == 0 ? (b == 1 ? 3 : 4) : 5;
}

}  // namespace

ElasticSolver::ElasticSolver(const ElasticMedium& medium, const GridSpec& grid) : medium_(medium), grid_(grid) {
    medium_.background.validate();
    medium_.shape.validate();
    grid_.check_covers(medium_.shape);
    conv_ = std::make_unique<GridConvolution>(grid_);
    const Background& bg = medium_.background;
    const double h = grid_.spacing;
    const double vol = h * h * h;
    const double R = h * std::cbrt(3.0 / (4.0 * kPi));
    const KelvinConstants kc = bg.kelvin();
    CMat3 self = navier_minus_kelvin_at_zero(bg);
    self += to_complex(((3.0 * kc.alpha + kc.beta) / (2.0 * R)) * Mat3::identity());
    self *= vol;
    for (int c = 0; c < 6; ++c) {
        const auto [i, l] = kPairs[c];
        kernel_[c] = conv_->kernel_spectrum([&, i = i, l = l](int a, int b, int e) -> Complex {
            if (a == 0 && b == 0 && e == 0) return self[i][l];
            const Vec3 d{h * a, h * b, h * e};
            return vol * navier_tensor(bg, d, Vec3{})[i][l];
        });
    }
    contrast_.assign(grid_.size(), 0.0);
    const auto c = cell_averaged_contrast(grid_, medium_.shape,
                                          [this](const Vec3& x) { return Complex(medium_.contrast(x)); });
    for (std::size_t n = 0; n < c.size(); ++n) {
        contrast_[n] = c[n].real();
        if (contrast_[n] != 0.0) active_.push_back(n);
    }
}

void ElasticSolver::apply_V_raw(const std::vector<CVec3>& in, std::vector<CVec3>& out) const {
    const std::size_t n = grid_.size();
    std::vector<CVec3> tmp(n);
    for (std::size_t i : active_) tmp[i] = contrast_[i] * in[i];
    const Complex* base = reinterpret_cast<const Complex*>(tmp.data());
    std::array<SpectrumBuffer, 3> F;
    for (int l = 0; l < 3; ++l) F[l] = conv_->forward_strided(base + l, 3);
    out.assign(n, CVec3{});
    Complex* obase = reinterpret_cast<Complex*>(out.data());
    const std::size_t P = conv_->padded_size();
    SpectrumBuffer acc(P);
    for (int i = 0; i < 3; ++i) {
        const SpectrumBuffer& k0 = kernel_[pair_index(i, 0)];
        const SpectrumBuffer& k1 = kernel_[pair_index(i, 1)];
        const SpectrumBuffer& k2 = kernel_[pair_index(i, 2)];
        for (std::size_t t = 0; t < P; ++t) acc[t] = k0[t] * F[0][t] + k1[t] * F[1][t] + k2[t] * F[2][t];
        conv_->inverse(acc, obase + i, 3);
    }
    const double s = -medium_.background.omega * medium_.background.omega;
    for (auto& v : out) v *= s;
}

VectorGridField ElasticSolver::apply_V(const VectorGridField& field) const {
    if (field.values.size() != grid_.size()) throw ConfigError("apply_V: field grid does not match solver grid");
    VectorGridField out(grid_);
    if (active_.empty()) return out;
    apply_V_raw(field.values, out.values);
    return out;
}

ElasticSolution ElasticSolver::solve(const VectorGridField& incident_samples, const Incident& incident,
                                     const GmresOptions& opts) const {
    if (!(opts.tol > 0.0)) throw PreconditionError("solve: tol must be positive");
    if (incident_samples.values.size() != grid_.size())
        throw ConfigError("solve: incident grid does not match solver grid");
    ElasticSolution sol{VectorGridField(grid_), VectorGridField(grid_), incident, {}};
    if (active_.empty()) {
        sol.total = incident_samples;
        sol.report.converged = true;
        return sol;
    }
    const std::size_t m = active_.size();
    std::vector<Complex> rhs(3 * m), x(3 * m);
    for (std::size_t a = 0; a < m; ++a)
        for (int c = 0; c < 3; ++c) rhs[3 * a + c] = x[3 * a + c] = incident_samples[active_[a]][c];

    std::vector<CVec3> full(grid_.size()), Vfull;
    auto scatter = [&](std::span<const Complex> in) {
        std::fill(full.begin(), full.end(), CVec3{});
        for (std::size_t a = 0; a < m; ++a) full[active_[a]] = {in[3 * a], in[3 * a + 1], in[3 * a + 2]};
    };
    auto matvec = [&](std::span<const Complex> in, std::span<Complex> out) {
        scatter(in);
        apply_V_raw(full, Vfull);
        for (std::size_t a = 0; a < m; ++a)
            for (int c = 0; c < 3; ++c) out[3 * a + c] = in[3 * a + c] - Vfull[active_[a]][c];
    };
    sol.report = gmres(matvec, rhs, x, opts);
    if (!sol.report.converged)
        throw ConvergenceError("elastic solve did not converge", sol.report.relative_residual,
                               sol.report.iterations);

    scatter(x);
    apply_V_raw(full, sol.scattered.values);
    for (std::size_t i = 0; i < grid_.size(); ++i) sol.total[i] = incident_samples[i] + sol.scattered[i];
    for (std::size_t a = 0; a < m; ++a) sol.total[active_[a]] = full[active_[a]];
    return sol;
}

double ElasticSolver::residual(const VectorGridField& total, const VectorGridField& incident_samples) const {
    if (active_.empty()) return 0.0;
    std::vector<CVec3> Vu;
    apply_V_raw(total.values, Vu);
    double num = 0.0, den = 0.0;
    for (std::size_t i : active_) {
        const double r = norm(total[i] - Vu[i] - incident_samples[i]);
        num += r * r;
        den += std::pow(norm(incident_samples[i]), 2);
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

ElasticSolution solve_total_field_elastic(const ElasticMedium& medium, const VectorGridField& incident_samples,
                                          const Incident& incident, double tol) {
    GmresOptions opts;
    opts.tol = tol;
    return ElasticSolver(medium, incident_samples.grid).solve(incident_samples, incident, opts);
}

FarFieldVector elastic_far_field(const ElasticSolver& solver, const VectorGridField& total,
                                 const std::vector<Direction>& directions) {
    const auto& grid = solver.grid();
    const auto& c = solver.contrast();
    const Background& bg = solver.medium().background;
    const double w2 = bg.omega * bg.omega, vol = grid.cell_volume();
    const double pref_p = -w2 * vol / (4.0 * kPi * (bg.lambda + 2.0 * bg.mu));
    const double pref_s = -w2 * vol / (4.0 * kPi * bg.mu);
    const double kp = bg.kp(), ks = bg.ks();
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (c[i] != 0.0) active.push_back(i);
    FarFieldVector ff{directions, std::vector<CVec3>(directions.size()), std::vector<CVec3>(directions.size())};
    for (std::size_t n = 0; n < directions.size(); ++n) {
        const Vec3 xh = directions[n].unit;
        CVec3 sp, ss;
        for (std::size_t i : active) {
            const double phase = dot(xh, grid.node(i));
            sp += (c[i] * std::exp(-kI * (kp * phase))) * total[i];
            ss += (c[i] * std::exp(-kI * (ks * phase))) * total[i];
        }
        ff.p_part[n] = (pref_p * dot(xh, sp)) * xh;
        ff.s_part[n] = pref_s * (ss - dot(xh, ss) * xh);
    }
    return ff;
}

namespace {

void require_exterior(const ElasticSolver& solver, const Vec3& x) {
    if (geometry::signed_distance(solver.medium().shape, x) <= 0.0)
        throw PreconditionError("evaluation point must lie strictly outside the scatterer");
}

bool same(const Vec3& a, const Vec3& b) { return a[0] == b[0] && a[1] == b[1] && a[2] == b[2]; }

}  // namespace

VectorValue scattered_anywhere(const ElasticSolver& solver, const ElasticSolution& sol, const Vec3& x,
                               const quad::Options& opts) {
    const auto& med = solver.medium();
    const Background& bg = med.background;
    auto f = [&](const Vec3& y) -> CVec3 {
        if (same(x, y)) return {};
        const CVec3 u = sol.incident.value(bg, y) + sol.scattered.interpolate(y);
        return med.contrast(y) * (navier_tensor(bg, x, y) * u);
    };
    const auto res = quad::integrate<CVec3>(quad::shape_region(med.shape), x, f, opts);
    return {(-bg.omega * bg.omega) * res.value, res.converged, res.depth};
}

JacobianValue grad_scattered_anywhere(const ElasticSolver& solver, const ElasticSolution& sol, const Vec3& x,
                                      const quad::Options& opts) {
    const auto& med = solver.medium();
    const Background& bg = med.background;
    auto f = [&](const Vec3& y) -> CMat3 {
        if (same(x, y)) return {};
        const CVec3 u = sol.incident.value(bg, y) + sol.scattered.interpolate(y);
        return med.contrast(y) * navier_gradient_apply(navier_gradient(bg, x, y), u);
    };
    const auto res = quad::integrate<CMat3>(quad::shape_region(med.shape), x, f, opts);
    return {(-bg.omega * bg.omega) * res.value, res.converged, res.depth};
}

VectorValue eval_scattered_elastic(const ElasticSolver& solver, const ElasticSolution& sol, const Vec3& x,
                                   const quad::Options& opts) {
    require_exterior(solver, x);
    return scattered_anywhere(solver, sol, x, opts);
}

JacobianValue eval_grad_scattered_elastic(const ElasticSolver& solver, const ElasticSolution& sol, const Vec3& x,
                                          const quad::Options& opts) {
    require_exterior(solver, x);
    return grad_scattered_anywhere(solver, sol, x, opts);
}

ElasticMixedReciprocity elastic_mixed_reciprocity(const ElasticSolver& solver, const Vec3& y, const Vec3& a,
                                                  const Vec3& d, const Vec3& q, const GmresOptions& opts) {
    const auto& med = solver.medium();
    const auto& grid = solver.grid();
    const Background& bg = med.background;
    const auto ps = solver.solve(elastic_point_source(med, y, a, grid), Incident::point(y, a), opts);
    const auto ff = elastic_far_field(solver, ps.total, {direction_from(-d)});
    const auto pw = solver.solve(elastic_plane_wave(bg, d, q, grid), Incident::plane(d, q), opts);
    const CVec3 usc = eval_scattered_elastic(solver, pw, y).value;
    ElasticMixedReciprocity r;
    r.far_field_side = 4.0 * kPi * bg.mu * dot(q, ff.s_part[0]) +
                       4.0 * kPi * (bg.lambda + 2.0 * bg.mu) * dot(d, ff.p_part[0]);
    r.scattered_side = dot(a, usc);
    r.residual = std::abs(r.far_field_side - r.scattered_side) / std::max(std::abs(r.scattered_side), 1e-14);
    return r;
}

}  // namespace hsp::elastic
