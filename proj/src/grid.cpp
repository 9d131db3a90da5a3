#include "hsp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "hsp/errors.hpp"

namespace hsp {

GridSpec GridSpec::cube(Vec3 center, double half_width, int n) {
    if (n < 2 || !(half_width > 0.0)) throw ConfigError("grid: need n >= 2 and half_width > 0");
    GridSpec g;
    g.spacing = 2.0 * half_width / n;
    g.dims = {n, n, n};
    g.origin = center - Vec3{1.0, 1.0, 1.0} * (half_width - 0.5 * g.spacing);
    return g;
}

Vec3 GridSpec::node(std::size_t flat) const {
    const int k = static_cast<int>(flat % dims[2]);
    const std::size_t rest = flat / dims[2];
    const int j = static_cast<int>(rest % dims[1]);
    const int i = static_cast<int>(rest / dims[1]);
    return node(i, j, k);
}

Vec3 GridSpec::box_upper() const {
    return origin + spacing * Vec3{dims[0] - 0.5, dims[1] - 0.5, dims[2] - 0.5};
}

void GridSpec::check_covers(const geometry::ShapeSpec& shape) const {
    if (!(spacing > 0.0) || dims[0] < 1 || dims[1] < 1 || dims[2] < 1)
        throw ConfigError("grid: spacing must be positive and dims >= 1");
    const auto [lo, hi] = shape.bounding_box();
    const Vec3 blo = box_lower(), bhi = box_upper();
    for (int a = 0; a < 3; ++a) {
        if (lo[a] - blo[a] < 2.0 * spacing || bhi[a] - hi[a] < 2.0 * spacing) {
            std::ostringstream os;
            os << "grid does not cover the shape with a two-cell margin along axis " << a;
            throw ConfigError(os.str());
        }
    }
}

Stencil trilinear_stencil(const GridSpec& grid, const Vec3& x) {
    Stencil s{};
    std::array<int, 3> base{};
    std::array<double, 3> frac{};
    for (int a = 0; a < 3; ++a) {
        const double t = (x[a] - grid.origin[a]) / grid.spacing;
        int b = static_cast<int>(std::floor(t));
        if (b < 0 || b + 1 > grid.dims[a] - 1) {
            // allow points exactly on the last node
            if (b == grid.dims[a] - 1 && t - b == 0.0) b = grid.dims[a] - 2;
            else throw StencilError("interpolation point outside the sampled grid");
        }
        base[a] = b;
        frac[a] = t - b;
    }
    int n = 0;
    for (int di = 0; di < 2; ++di)
        for (int dj = 0; dj < 2; ++dj)
            for (int dk = 0; dk < 2; ++dk) {
                s.index[n] = grid.index(base[0] + di, base[1] + dj, base[2] + dk);
                s.weight[n] = (di ? frac[0] : 1.0 - frac[0]) * (dj ? frac[1] : 1.0 - frac[1]) *
                              (dk ? frac[2] : 1.0 - frac[2]);
                ++n;
            }
    return s;
}

Complex ScalarGridField::interpolate(const Vec3& x) const {
    const Stencil s = trilinear_stencil(grid, x);
    Complex r = 0.0;
    for (int n = 0; n < 8; ++n) r += s.weight[n] * values[s.index[n]];
    return r;
}

double ScalarGridField::max_abs() const {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, std::abs(v));
    return m;
}

CVec3 VectorGridField::interpolate(const Vec3& x) const {
    const Stencil s = trilinear_stencil(grid, x);
    CVec3 r;
    for (int n = 0; n < 8; ++n) r += s.weight[n] * values[s.index[n]];
    return r;
}

double VectorGridField::max_abs() const {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, norm(v));
    return m;
}

std::vector<Complex> cell_averaged_contrast(const GridSpec& grid, const geometry::ShapeSpec& shape,
                                            const std::function<Complex(const Vec3&)>& contrast,
                                            int sub) {
    std::vector<Complex> out(grid.size(), 0.0);
    const double h = grid.spacing;
    const double half_diag = 0.5 * std::sqrt(3.0) * h;
    for (int i = 0; i < grid.dims[0]; ++i)
        for (int j = 0; j < grid.dims[1]; ++j)
            for (int k = 0; k < grid.dims[2]; ++k) {
                const Vec3 c = grid.node(i, j, k);
                const double phi = geometry::implicit_value(shape, c);
                if (phi > half_diag) continue;
                Complex v = 0.0;
                if (phi < -half_diag) {
                    v = contrast(c);
                } else {
                    for (int a = 0; a < sub; ++a)
                        for (int b = 0; b < sub; ++b)
                            for (int e = 0; e < sub; ++e) {
                                const Vec3 p = c + h * Vec3{(a + 0.5) / sub - 0.5, (b + 0.5) / sub - 0.5,
                                                            (e + 0.5) / sub - 0.5};
                                if (geometry::inside(shape, p)) v += contrast(p);
                            }
                    v /= static_cast<double>(sub) * sub * sub;
                }
                out[grid.index(i, j, k)] = v;
            }
    return out;
}

namespace {

void write_header(const std::filesystem::path& stem, int components, const GridSpec& g, double k) {
    std::ofstream os(stem.string() + ".hdr");
    if (!os) throw ConfigError("cannot write " + stem.string() + ".hdr");
    os.precision(17);
    os << "hsp-field 1\n"
       << "components " << components << "\n"
       << "dims " << g.dims[0] << " " << g.dims[1] << " " << g.dims[2] << "\n"
       << "origin " << g.origin[0] << " " << g.origin[1] << " " << g.origin[2] << "\n"
       << "spacing " << g.spacing << "\n"
       << "wavenumber " << k << "\n";
}

void write_blob(const std::filesystem::path& stem, const double* data, std::size_t count) {
    std::ofstream os(stem.string() + ".bin", std::ios::binary);
    if (!os) throw ConfigError("cannot write " + stem.string() + ".bin");
    os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
}

void read_blob(const std::filesystem::path& stem, double* data, std::size_t count) {
    std::ifstream is(stem.string() + ".bin", std::ios::binary);
    if (!is) throw ConfigError("cannot read " + stem.string() + ".bin");
    is.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(count * sizeof(double)));
    if (static_cast<std::size_t>(is.gcount()) != count * sizeof(double))
        throw ConfigError(stem.string() + ".bin is truncated");
}

}  // namespace

void write_field(const std::filesystem::path& stem, const ScalarGridField& f, double wavenumber) {
    write_header(stem, 1, f.grid, wavenumber);
    write_blob(stem, reinterpret_cast<const double*>(f.values.data()), 2 * f.values.size());
}

void write_field(const std::filesystem::path& stem, const VectorGridField& f, double wavenumber) {
    write_header(stem, 3, f.grid, wavenumber);
    write_blob(stem, reinterpret_cast<const double*>(f.values.data()), 6 * f.values.size());
}

FieldHeader read_field_header(const std::filesystem::path& stem) {
    std::ifstream is(stem.string() + ".hdr");
    if (!is) throw ConfigError("cannot read " + stem.string() + ".hdr");
    FieldHeader h;
    std::string key;
    std::string magic;
    int version = 0;
    is >> magic >> version;
    if (magic != "hsp-field") throw ConfigError(stem.string() + ".hdr: not a field header");
    while (is >> key) {
        if (key == "components") is >> h.components;
        else if (key == "dims") is >> h.grid.dims[0] >> h.grid.dims[1] >> h.grid.dims[2];
        else if (key == "origin") is >> h.grid.origin[0] >> h.grid.origin[1] >> h.grid.origin[2];
        else if (key == "spacing") is >> h.grid.spacing;
        else if (key == "wavenumber") is >> h.wavenumber;
        else throw ConfigError(stem.string() + ".hdr: unknown key '" + key + "'");
    }
    return h;
}

ScalarGridField read_scalar_field(const std::filesystem::path& stem) {
    const FieldHeader h = read_field_header(stem);
    if (h.components != 1) throw ConfigError("expected a scalar field");
    ScalarGridField f(h.grid);
    read_blob(stem, reinterpret_cast<double*>(f.values.data()), 2 * f.values.size());
    return f;
}

VectorGridField read_vector_field(const std::filesystem::path& stem) {
    const FieldHeader h = read_field_header(stem);
    if (h.components != 3) throw ConfigError("expected a vector field");
    VectorGridField f(h.grid);
    read_blob(stem, reinterpret_cast<double*>(f.values.data()), 6 * f.values.size());
    return f;
}

void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights) {
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int l = 2; l <= n; ++l) {
                const double p2 = ((2.0 * l - 1.0) * x * p1 - (l - 1.0) * p0) / l;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
}

std::vector<Direction> sphere_grid(int n_theta, int n_phi) {
    if (n_theta < 1 || n_phi < 1) throw ConfigError("sphere_grid: need n_theta, n_phi >= 1");
    std::vector<double> x, w;
    gauss_legendre(n_theta, x, w);
    std::vector<Direction> out;
    out.reserve(static_cast<std::size_t>(n_theta) * n_phi);
    for (int a = 0; a < n_theta; ++a) {
        const double theta = std::acos(x[a]);
        for (int b = 0; b < n_phi; ++b) {
            const double phi = 2.0 * kPi * b / n_phi;
            const double st = std::sqrt(std::max(0.0, 1.0 - x[a] * x[a]));
            out.push_back({theta, phi, Vec3{st * std::cos(phi), st * std::sin(phi), x[a]},
                           w[a] * 2.0 * kPi / n_phi});
        }
    }
    return out;
}

Direction direction_from(const Vec3& unit) {
    const Vec3 u = normalized(unit);
    return {std::acos(std::clamp(u[2], -1.0, 1.0)), std::atan2(u[1], u[0]), u, 0.0};
}

}  // namespace hsp
