#include "hsp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "hsp/errors.hpp"

namespace hsp::oracle {

OracleReport make_report(std::string name, Complex reference, Complex test, long budget, double tolerance) {
    OracleReport r;
    r.name = std::move(name);
    r.reference = reference;
    r.test = test;
    r.abs_error = std::abs(test - reference);
    r.rel_error = r.abs_error / std::max(std::abs(reference), 1e-14);
    r.budget = budget;
    r.tolerance = tolerance;
    return r;
}

void append_csv(const std::filesystem::path& path, const std::vector<OracleReport>& rows) {
    const bool fresh = !std::filesystem::exists(path) || std::filesystem::file_size(path) == 0;
    std::ofstream os(path, std::ios::app);
    if (!os) throw ConfigError("cannot write " + path.string());
    os.precision(17);
    if (fresh) os << "name,ref,test,abs_err,rel_err,budget,tolerance,pass,ref_re,ref_im,test_re,test_im\n";
    for (const auto& r : rows)
        os << r.name << ',' << std::abs(r.reference) << ',' << std::abs(r.test) << ',' << r.abs_error << ','
           << r.rel_error << ',' << r.budget << ',' << r.tolerance << ',' << (r.passed() ? 1 : 0) << ','
           << r.reference.real() << ',' << r.reference.imag() << ',' << r.test.real() << ',' << r.test.imag()
           << '\n';
}

double halfball_log_integral(double delta, int j) {
    const double t = 1.0 / j;
    return 2.0 * kPi * std::log(delta * j + 1.0) -
           4.0 * kPi * delta /
               (std::sqrt(delta * delta + t * t + 2.0 * delta * t) + std::sqrt(delta * delta + t * t));
}

quad::Region halfball_region(const Vec3& anchor, const Vec3& normal, double delta) {
    return quad::intersect(quad::ball_region(anchor, delta), quad::halfspace_region(anchor, normal));
}

quad::Result<Complex> singular_quadrature(const quad::Region& region, const Vec3& z, int p,
                                          const std::function<Complex(const Vec3&)>& f,
                                          const quad::Options& opts) {
    if (p < 0 || p > 3) throw PreconditionError("singular_quadrature: exponent must be in 0..3");
    auto g = [&](const Vec3& y) -> Complex {
        const double r = norm(z - y);
        double w = 1.0;
        for (int i = 0; i < p; ++i) w /= r;
        return f(y) * w;
    };
    return quad::integrate<Complex>(region, z, g, opts);
}

quad::Result<Complex> i2_acoustic_oracle(const acoustic::AcousticMedium& medium, const Vec3& zj,
                                         const Vec3& anchor, double delta, const Vec3& nu,
                                         const quad::Options& opts) {
    const double k = medium.k;
    const quad::Region region = quad::intersect(quad::shape_region(medium.shape), quad::ball_region(anchor, delta));
    auto f = [&](const Vec3& y) -> Complex {
        return medium.contrast(y) * dot(acoustic::grad_phi(k, zj, y), to_complex(nu)) * acoustic::phi(k, y, zj);
    };
    auto r = quad::integrate<Complex>(region, zj, f, opts);
    r.value *= -k * k;
    return r;
}

quad::Result<Complex> i2_elastic_oracle(const elastic::ElasticMedium& medium, const Vec3& zj, const Vec3& anchor,
                                        double delta, const Vec3& nu, ElasticI2Form form,
                                        const quad::Options& opts) {
    const auto& bg = medium.background;
    const auto kc = bg.kelvin();
    const quad::Region region = quad::intersect(quad::shape_region(medium.shape), quad::ball_region(anchor, delta));
    auto f = [&](const Vec3& y) -> Complex {
        if (form == ElasticI2Form::KelvinContract)
            return medium.contrast(y) * dot(nu, elastic::grad_kelvin_contract(kc, zj, y, nu));
        const CVec3 b = elastic::navier_tensor(bg, y, zj) * nu;
        const CMat3 G = elastic::navier_gradient_apply(elastic::navier_gradient(bg, zj, y), b);
        return medium.contrast(y) * dot(nu, G * nu);
    };
    auto r = quad::integrate<Complex>(region, zj, f, opts);
    r.value *= -bg.omega * bg.omega;
    return r;
}

namespace {

double sph_j_prime(int l, double x) {
    if (l == 0) return -std::sph_bessel(1, x);
    return std::sph_bessel(l - 1, x) - (l + 1) / x * std::sph_bessel(l, x);
}

double sph_y_prime(int l, double x) {
    if (l == 0) return -std::sph_neumann(1, x);
    return std::sph_neumann(l - 1, x) - (l + 1) / x * std::sph_neumann(l, x);
}

}  // namespace

acoustic::FarFieldScalar mie_far_field(double radius, double n_inside, double k,
                                       const std::vector<Direction>& directions, const Vec3& d) {
    if (!(radius > 0.0) || !(k > 0.0) || !(n_inside > 0.0))
        throw ConfigError("mie_far_field: radius, k and n must be positive");
    acoustic::FarFieldScalar ff{directions, std::vector<Complex>(directions.size(), 0.0)};
    if (n_inside == 1.0) return ff;
    const double k1 = k * std::sqrt(n_inside);
    const double x = k * radius, x1 = k1 * radius;
    std::vector<Complex> A;
    constexpr int kMaxOrder = 60;
    for (int l = 0;; ++l) {
        if (l > kMaxOrder) throw ConfigError("mie_far_field: series not converged by order 60");
        const double jl = std::sph_bessel(l, x), jl1 = std::sph_bessel(l, x1);
        const double djl = sph_j_prime(l, x), djl1 = sph_j_prime(l, x1);
        const Complex hl(jl, std::sph_neumann(l, x)), dhl(djl, sph_y_prime(l, x));
        const Complex num = k * djl * jl1 - k1 * jl * djl1;
        const Complex den = k * dhl * jl1 - k1 * hl * djl1;
        A.push_back(-num / den);
        if (l >= 2 && (2.0 * l + 1.0) * std::abs(A.back()) < 1e-12) break;
    }
    for (std::size_t n = 0; n < directions.size(); ++n) {
        const double c = std::clamp(dot(directions[n].unit, d), -1.0, 1.0);
        double p0 = 1.0, p1 = c;
        Complex s = 0.0;
        for (std::size_t l = 0; l < A.size(); ++l) {
            const double pl = l == 0 ? p0 : (l == 1 ? p1 : 0.0);
            double P = pl;
            if (l >= 2) {
                P = ((2.0 * l - 1.0) * c * p1 - (l - 1.0) * p0) / l;
                p0 = p1;
                p1 = P;
            }
            s += (2.0 * l + 1.0) * A[l] * P;
        }
        ff.values[n] = (-kI / k) * s;
    }
    return ff;
}

Complex born_far_field(double radius, double contrast, double k, const Vec3& xhat, const Vec3& d) {
    const double q = k * norm(xhat - d);
    const double a = radius, x = q * a;
    double shape;
    if (x < 1e-3) shape = a * a * a * (1.0 / 3.0 - x * x / 30.0);
    else shape = (std::sin(x) - x * std::cos(x)) / (q * q * q);
    return -k * k * contrast * shape;
}

CVec3 finite_difference_gradient(const std::function<Complex(const Vec3&)>& f, const Vec3& x, double step) {
    auto central = [&](double s) {
        CVec3 g;
        for (int a = 0; a < 3; ++a) {
            Vec3 e{};
            e[a] = s;
            g[a] = (f(x + e) - f(x - e)) / (2.0 * s);
        }
        return g;
    };
    const CVec3 g1 = central(step), g2 = central(0.5 * step);
    return (4.0 / 3.0) * g2 - (1.0 / 3.0) * g1;
}

CMat3 finite_difference_jacobian(const std::function<CVec3(const Vec3&)>& f, const Vec3& x, double step) {
    auto central = [&](double s) {
        CMat3 G;
        for (int l = 0; l < 3; ++l) {
            Vec3 e{};
            e[l] = s;
            const CVec3 d = (f(x + e) - f(x - e)) / (2.0 * s);
            for (int i = 0; i < 3; ++i) G[i][l] = d[i];
        }
        return G;
    };
    return (4.0 / 3.0) * central(0.5 * step) - (1.0 / 3.0) * central(step);
}

double relative_l2(const std::vector<Direction>& directions, const std::vector<Complex>& test,
                   const std::vector<Complex>& reference) {
    double num = 0.0, den = 0.0;
    for (std::size_t n = 0; n < directions.size(); ++n) {
        num += directions[n].weight * std::norm(test[n] - reference[n]);
        den += directions[n].weight * std::norm(reference[n]);
    }
    return den > 0.0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace hsp::oracle
