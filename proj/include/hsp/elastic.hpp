#pragma once

// Time-harmonic linear elasticity with a penetrable density contrast:
// Kupradze tensor, Kelvin matrix and its gradient identities, the
// Lippmann–Schwinger solver (I - V)u = u_in, P/S far fields and traction.

#include <array>
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

namespace hsp::elastic {

struct KelvinConstants {
    double alpha;
    double beta;
};

// Throws ConfigError unless mu > 0 and lambda + 2 mu > 0.
KelvinConstants kelvin_constants(double lambda, double mu);

// Homogeneous background (rho = 1).
struct Background {
    double lambda = 1.0;
    double mu = 1.0;
    double omega = 1.0;

    double ks() const;
    double kp() const;
    KelvinConstants kelvin() const { return kelvin_constants(lambda, mu); }
    void validate() const;
};

struct ElasticMedium {
    Background background;
    geometry::ShapeSpec shape;
    std::function<double(const Vec3&)> density_profile = [](const Vec3&) { return 1.0; };
    double contrast_floor = 0.0;

    static ElasticMedium constant(const Background& bg, const geometry::ShapeSpec& shape, double rho);

    double rho(const Vec3& x) const;
    double contrast(const Vec3& x) const { return 1.0 - rho(x); }
    void validate() const;
};

// Pi0 = alpha/r I + beta/r xbar xbar^T.
Mat3 kelvin_tensor(const KelvinConstants& c, const Vec3& x, const Vec3& y);

// Pi = 1/mu Phi_ks I + 1/omega^2 grad grad^T (Phi_ks - Phi_kp).
CMat3 navier_tensor(const Background& bg, const Vec3& x, const Vec3& y);

// Pi(x, y) - Pi0(x, y) at x = y (the limit exists and is a multiple of I).
CMat3 navier_minus_kelvin_at_zero(const Background& bg);

// d/dx_m Pi_il(x, y), stored as t[m] = matrix of Pi_il derivatives.
using Tensor3 = std::array<CMat3, 3>;
Tensor3 navier_gradient(const Background& bg, const Vec3& x, const Vec3& y);

// Jacobian G_il = d/dx_l (Pi(x,y) b)_i.
CMat3 navier_gradient_apply(const Tensor3& t, const CVec3& b);

// G_il = d/dx_l (Pi0(x,y) b)_i in closed form.
Mat3 grad_kelvin_apply(const KelvinConstants& c, const Vec3& x, const Vec3& y, const Vec3& b);

// grad_kelvin_apply(b) * (Pi0 b): derivative of Pi0 b along itself.
Vec3 grad_kelvin_contract(const KelvinConstants& c, const Vec3& x, const Vec3& y, const Vec3& b);

// Traction 2 mu (nu.grad)u + lambda nu div u + mu nu x curl u from the
// Jacobian G_il = d u_i / d x_l.
CVec3 traction_from_gradient(double lambda, double mu, const CMat3& G, const Vec3& nu);

// Same with the Jacobian by Richardson-extrapolated central differences.
CVec3 traction(double lambda, double mu, const std::function<CVec3(const Vec3&)>& field, const Vec3& x,
               const Vec3& nu, double step);

struct Incident {
    enum class Kind { PlaneWave, PointSource } kind = Kind::PlaneWave;
    Vec3 d{0.0, 0.0, 1.0};
    Vec3 q{1.0, 0.0, 0.0};
    double p_weight = 1.0;
    double s_weight = 1.0;
    Vec3 source{};
    Vec3 polarization{0.0, 0.0, 1.0};

    static Incident plane(const Vec3& d, const Vec3& q, double p_weight = 1.0, double s_weight = 1.0);
    static Incident point(const Vec3& z, const Vec3& a);
    CVec3 value(const Background& bg, const Vec3& x) const;
    CMat3 gradient(const Background& bg, const Vec3& x) const;
};

// d exp(i kp x.d) + q exp(i ks x.d); throws PreconditionError unless d.q = 0.
VectorGridField elastic_plane_wave(const Background& bg, const Vec3& d, const Vec3& q, const GridSpec& grid,
                                   double p_weight = 1.0, double s_weight = 1.0);

// Pi(x, z) a at the nodes, cell averaged within averaging_radius of
// averaging_center. Throws PreconditionError unless z is exterior.
VectorGridField elastic_point_source(const ElasticMedium& medium, const Vec3& z, const Vec3& a,
                                     const GridSpec& grid, double averaging_radius = 0.0,
                                     std::optional<Vec3> averaging_center = {});

struct FarFieldVector {
    std::vector<Direction> directions;
    std::vector<CVec3> p_part;
    std::vector<CVec3> s_part;

    CVec3 value(std::size_t i) const { return p_part[i] + s_part[i]; }
    void write_csv(const std::filesystem::path& path) const;
};

struct ElasticSolution {
    VectorGridField total;
    VectorGridField scattered;
    Incident incident;
    GmresResult report;
};

class ElasticSolver {
public:
    ElasticSolver(const ElasticMedium& medium, const GridSpec& grid);

    const ElasticMedium& medium() const { return medium_; }
    const GridSpec& grid() const { return grid_; }
    const std::vector<double>& contrast() const { return contrast_; }

    // (V f)(x_i) = -omega^2 sum_j W_ij c_j f_j on all nodes.
    VectorGridField apply_V(const VectorGridField& field) const;

    ElasticSolution solve(const VectorGridField& incident_samples, const Incident& incident,
                          const GmresOptions& opts = {}) const;
    double residual(const VectorGridField& total, const VectorGridField& incident_samples) const;

private:
    void apply_V_raw(const std::vector<CVec3>& in, std::vector<CVec3>& out) const;

    ElasticMedium medium_;
    GridSpec grid_;
    std::unique_ptr<GridConvolution> conv_;
    std::array<SpectrumBuffer, 6> kernel_;  // xx yy zz xy xz yz
    std::vector<double> contrast_;
    std::vector<std::size_t> active_;
};

ElasticSolution solve_total_field_elastic(const ElasticMedium& medium, const VectorGridField& incident_samples,
                                          const Incident& incident, double tol);

FarFieldVector elastic_far_field(const ElasticSolver& solver, const VectorGridField& total,
                                 const std::vector<Direction>& directions);

struct VectorValue {
    CVec3 value;
    bool converged = true;
    int depth = 0;
};
struct JacobianValue {
    CMat3 value;  // G_il = d u_i / d x_l
    bool converged = true;
    int depth = 0;
};

VectorValue eval_scattered_elastic(const ElasticSolver& solver, const ElasticSolution& sol, const Vec3& x,
                                   const quad::Options& opts = {});
JacobianValue eval_grad_scattered_elastic(const ElasticSolver& solver, const ElasticSolution& sol, const Vec3& x,
                                          const quad::Options& opts = {});
VectorValue scattered_anywhere(const ElasticSolver& solver, const ElasticSolution& sol, const Vec3& x,
                               const quad::Options& opts = {});
JacobianValue grad_scattered_anywhere(const ElasticSolver& solver, const ElasticSolution& sol, const Vec3& x,
                                      const quad::Options& opts = {});

struct ElasticMixedReciprocity {
    Complex far_field_side;   // 4 pi mu q.w_s(-d) + 4 pi (lambda + 2 mu) d.w_p(-d)
    Complex scattered_side;   // a.u_sc(y; d, q)
    double residual;
};

ElasticMixedReciprocity elastic_mixed_reciprocity(const ElasticSolver& solver, const Vec3& y, const Vec3& a,
                                                  const Vec3& d, const Vec3& q, const GmresOptions& opts = {});

}  // namespace hsp::elastic
