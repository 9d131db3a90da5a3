#pragma once

// Acoustic penetrable-medium scattering: Helmholtz kernel, the
// Lippmann–Schwinger solver (I - K)u = u_in on a uniform grid, far fields and
// off-grid evaluation of the scattered field and its gradient.

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "hsp/fft_convolution.hpp"
#include "hsp/geometry.hpp"
#include "hsp/gmres.hpp"
#include "hsp/grid.hpp"
#include "hsp/quadrature.hpp"
#include "hsp/vec.hpp"

namespace hsp::acoustic {

struct AcousticMedium {
    double k = 1.0;
    geometry::ShapeSpec shape;
    // n(x) inside the shape; the medium returns 1 outside regardless.
    std::function<Complex(const Vec3&)> index_profile = [](const Vec3&) { return Complex(1.0); };
    double contrast_floor = 0.0;

    static AcousticMedium constant(double k, const geometry::ShapeSpec& shape, Complex n);

    Complex n(const Vec3& x) const;
    Complex contrast(const Vec3& x) const { return 1.0 - n(x); }

    // Checks k > 0, the shape, Re n > 0 and the contrast floor near the
    // boundary on a deterministic sample. Throws ConfigError.
    void validate() const;
};

Complex phi(double k, const Vec3& x, const Vec3& y);
CVec3 grad_phi(double k, const Vec3& x, const Vec3& y);

// Integral of Phi over a ball of radius R centred on the singularity.
Complex phi_ball_integral(double k, double R);

// Incident field in closed form, kept alongside the grid samples so that
// off-grid quadrature never interpolates a singular field.
struct Incident {
    enum class Kind { PlaneWave, PointSource } kind = Kind::PlaneWave;
    Vec3 direction{0.0, 0.0, 1.0};
    Vec3 source{};

    static Incident plane(const Vec3& d) { return {Kind::PlaneWave, d, {}}; }
    static Incident point(const Vec3& z) { return {Kind::PointSource, {}, z}; }
    Complex value(double k, const Vec3& x) const;
};

ScalarGridField plane_wave(double k, const Vec3& d, const GridSpec& grid);

// Phi(x, z) at the nodes. Cells with centre within averaging_radius of
// averaging_center are replaced by cell averages (adaptive, depth <= 6).
// Throws PreconditionError if z is not exterior to the medium's shape.
ScalarGridField point_source(const AcousticMedium& medium, const Vec3& z, const GridSpec& grid,
                             double averaging_radius = 0.0, std::optional<Vec3> averaging_center = {});

// Cell average of Phi(., z) over the cube centred at c with side h.
Complex cell_average_phi(double k, const Vec3& z, const Vec3& c, double h, int max_depth = 6);

struct FarFieldScalar {
    std::vector<Direction> directions;
    std::vector<Complex> values;

    void write_csv(const std::filesystem::path& path) const;
};

struct AcousticSolution {
    ScalarGridField total;      // u on all nodes
    ScalarGridField scattered;  // w = K u on all nodes (smooth)
    Incident incident;
    GmresResult report;
};

class AcousticSolver {
public:
    AcousticSolver(const AcousticMedium& medium, const GridSpec& grid);

    const AcousticMedium& medium() const { return medium_; }
    const GridSpec& grid() const { return grid_; }
    // Cell-averaged 1 - n at every node.
    const std::vector<Complex>& contrast() const { return contrast_; }

    // (K f)(x_i) = -k^2 sum_j w_ij c_j f_j on all nodes.
    ScalarGridField apply_K(const ScalarGridField& field) const;

    // Throws ConvergenceError if GMRES misses opts.tol.
    AcousticSolution solve(const ScalarGridField& incident_samples, const Incident& incident,
                           const GmresOptions& opts = {}) const;

    // ||(I - K)u - u_in|| / ||u_in|| over nodes with nonzero contrast.
    double residual(const ScalarGridField& total, const ScalarGridField& incident_samples) const;

private:
    void apply_K_raw(std::span<const Complex> in, std::span<Complex> out) const;

    AcousticMedium medium_;
    GridSpec grid_;
    std::unique_ptr<GridConvolution> conv_;
    SpectrumBuffer kernel_;
    std::vector<Complex> contrast_;
    std::vector<std::size_t> active_;
};

// Convenience wrappers that build a solver for a single call.
ScalarGridField apply_K(const AcousticMedium& medium, const ScalarGridField& field);
AcousticSolution solve_total_field(const AcousticMedium& medium, const ScalarGridField& incident_samples,
                                   const Incident& incident, double tol);

// u_inf(xhat) = -k^2/(4 pi) sum h^3 c_j exp(-i k xhat.y_j) u_j.
FarFieldScalar far_field(const AcousticSolver& solver, const ScalarGridField& total,
                         const std::vector<Direction>& directions);

struct FieldValue {
    Complex value;
    bool converged = true;
    int depth = 0;
};
struct GradientValue {
    CVec3 value;
    bool converged = true;
    int depth = 0;
};

// Scattered field -k^2 int_D (1-n) Phi(x,y) u(y) dy by adaptive quadrature,
// with u = incident (closed form) + w (trilinear). x must be exterior.
FieldValue eval_scattered(const AcousticSolver& solver, const AcousticSolution& sol, const Vec3& x,
                          const quad::Options& opts = {});
GradientValue eval_grad_scattered(const AcousticSolver& solver, const AcousticSolution& sol, const Vec3& x,
                                  const quad::Options& opts = {});

// Same integrals without the exterior precondition (for one-sided limits at
// the interface).
FieldValue scattered_anywhere(const AcousticSolver& solver, const AcousticSolution& sol, const Vec3& x,
                              const quad::Options& opts = {});
GradientValue grad_scattered_anywhere(const AcousticSolver& solver, const AcousticSolution& sol, const Vec3& x,
                                      const quad::Options& opts = {});

struct MixedReciprocity {
    Complex far_field_point_source;  // u_inf(-d; z)
    Complex scattered_plane_wave;    // u_sc(z; d)
    double residual;
};

// |factor * u_inf(-d; z) - u_sc(z; d)| / max(|u_sc|, eps), two independent solves.
MixedReciprocity mixed_reciprocity(const AcousticSolver& solver, const Vec3& z, const Vec3& d,
                                   const GmresOptions& opts = {}, double factor = 4.0 * kPi);

}  // namespace hsp::acoustic
