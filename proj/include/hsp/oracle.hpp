#pragma once

// Independent reference computations used to validate the solvers.

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "hsp/acoustic.hpp"
#include "hsp/elastic.hpp"
#include "hsp/quadrature.hpp"
#include "hsp/vec.hpp"

namespace hsp::oracle {

struct OracleReport {
    std::string name;
    Complex reference;
    Complex test;
    double abs_error = 0.0;
    double rel_error = 0.0;
    long budget = 0;
    double tolerance = 0.0;

    bool passed() const { return rel_error <= tolerance; }
};

OracleReport make_report(std::string name, Complex reference, Complex test, long budget, double tolerance);

// Appends rows (name, ref, test, abs_err, rel_err, budget); writes the
// header when the file is new. Columns ref and test carry the modulus when
// the value is complex; re/im parts follow at the end of the row.
void append_csv(const std::filesystem::path& path, const std::vector<OracleReport>& rows);

// int over the half ball {|y - z*| < delta, (y - z*).nu < 0} of |z_j - y|^-3
// with z_j = z* + nu/j:
//   2 pi ln(delta j + 1) - 4 pi delta / (sqrt(delta^2 + 1/j^2 + 2 delta/j) + sqrt(delta^2 + 1/j^2)).
double halfball_log_integral(double delta, int j);

quad::Region halfball_region(const Vec3& anchor, const Vec3& normal, double delta);

// int_region f(y) / |z - y|^p dy by adaptive octree quadrature.
quad::Result<Complex> singular_quadrature(const quad::Region& region, const Vec3& z, int p,
                                          const std::function<Complex(const Vec3&)>& f,
                                          const quad::Options& opts = {});

// -k^2 int_{D cap B_delta(z*)} (1-n) (grad_x Phi(z_j, y).nu) Phi(y, z_j) dy.
quad::Result<Complex> i2_acoustic_oracle(const acoustic::AcousticMedium& medium, const Vec3& zj,
                                         const Vec3& anchor, double delta, const Vec3& nu,
                                         const quad::Options& opts = {});

enum class ElasticI2Form {
    // nu^T G nu with G the Jacobian of Pi(x,y) (Pi(y,z_j) nu), full Navier tensor.
    Indicator,
    // nu . [grad_x(Pi0 nu)] (Pi0 nu): the Kelvin-part integrand of the
    // published chain, via grad_kelvin_contract.
    KelvinContract,
};

// -omega^2 int_{D cap B_delta(z*)} (1-rho) [integrand] dy.
quad::Result<Complex> i2_elastic_oracle(const elastic::ElasticMedium& medium, const Vec3& zj, const Vec3& anchor,
                                        double delta, const Vec3& nu, ElasticI2Form form = ElasticI2Form::Indicator,
                                        const quad::Options& opts = {});

// Plane-wave far field of a homogeneous ball centred at the origin.
// Throws ConfigError if the series has not converged by order 60.
acoustic::FarFieldScalar mie_far_field(double radius, double n_inside, double k,
                                       const std::vector<Direction>& directions, const Vec3& d);

// First Born far field of a constant-contrast ball at the origin.
Complex born_far_field(double radius, double contrast, double k, const Vec3& xhat, const Vec3& d);

// Central differences with steps s and s/2, Richardson-combined.
CVec3 finite_difference_gradient(const std::function<Complex(const Vec3&)>& f, const Vec3& x, double step);
// Jacobian G_il = d f_i / d x_l.
CMat3 finite_difference_jacobian(const std::function<CVec3(const Vec3&)>& f, const Vec3& x, double step);

// Relative L2 distance of two far fields with the direction weights.
double relative_l2(const std::vector<Direction>& directions, const std::vector<Complex>& test,
                   const std::vector<Complex>& reference);

}  // namespace hsp::oracle
