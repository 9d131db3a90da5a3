#pragma once

// Singular-source probing: march point sources z_j = z* + nu/j toward a
// candidate point, record the gradient indicator, fit its logarithmic
// growth, classify the point and recover the boundary contrast.

#include <filesystem>
#include <string>
#include <vector>

#include "hsp/acoustic.hpp"
#include "hsp/elastic.hpp"
#include "hsp/geometry.hpp"

namespace hsp::probe {

enum class Physics { Acoustic, Elastic };
std::string to_string(Physics p);

enum class Abscissa {
    LogJ,               // ln j
    LogDeltaJPlusOne,   // ln(delta j + 1)
};
std::string to_string(Abscissa a);
Abscissa abscissa_from_string(const std::string& name);

struct ProbeConfig {
    int j_min = 2;
    int j_max = 16;
    GmresOptions gmres{};
    quad::Options quadrature{};
    // Right-hand-side samples within averaging_factor / j of z* are cell averages.
    double averaging_factor = 4.0;
    int threads = 1;
};

struct ProbeSeries {
    geometry::ProbePath path;
    Physics physics = Physics::Acoustic;
    std::vector<Complex> indicators;
    std::vector<bool> ok;                     // false: solve failed, indicator unset
    std::vector<std::string> notes;           // failure or accuracy annotations per j
    std::vector<double> scattered_max;        // max-norm of w_j on the grid
    double k = 0.0;                           // acoustic wavenumber
    elastic::Background background{};        // elastic constants
    int j_cap = 0;

    // max_j ||w_j|| / min_j ||w_j|| over successful solves.
    double uniform_bound_ratio() const;
};

enum class Classification { Boundary, Exterior };
std::string to_string(Classification c);

struct FitOptions {
    double delta = 0.3;
    Abscissa abscissa = Abscissa::LogJ;
    double min_r_squared = 0.8;
    // Boundary iff slope > threshold_fraction * coefficient * reference_contrast.
    double threshold_fraction = 0.25;
    double reference_contrast = 0.1;
};

struct BlowupFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    Classification classification = Classification::Exterior;
    double contrast_estimate = 0.0;
    double threshold = 0.0;
    double coefficient = 0.0;  // indicator slope per unit boundary contrast
    double delta = 0.0;
    Abscissa abscissa = Abscissa::LogJ;
};

// Leading coefficient of |indicator| against ln j per unit contrast:
// k^2 / (16 pi) acoustic, pi alpha^2 omega^2 elastic.
double sharp_coefficient_acoustic(double k);
double sharp_coefficient_elastic(const elastic::Background& bg);
double sharp_coefficient(const ProbeSeries& series);

// Largest j with 1/j >= 2h.
int j_cap(const GridSpec& grid);

// Throws PreconditionError if j_max exceeds the cap or j_min < 1, and
// GeometryError if a probe point is not exterior.
ProbeSeries run_probe_acoustic(const acoustic::AcousticSolver& solver, const geometry::SurfacePoint& anchor,
                               const ProbeConfig& config = {});
ProbeSeries run_probe_elastic(const elastic::ElasticSolver& solver, const geometry::SurfacePoint& anchor,
                              const ProbeConfig& config = {});

double abscissa_value(Abscissa a, double delta, int j);

// Fit of |indicator| on the chosen abscissa. Needs at least 4 usable points.
BlowupFit fit_log_blowup(const std::vector<int>& j, const std::vector<double>& values, double coefficient,
                         const FitOptions& options = {});
BlowupFit fit_log_blowup(const ProbeSeries& series, const FitOptions& options = {});

// slope / coefficient. Throws NotApplicableError for exterior fits.
double recover_boundary_value(const BlowupFit& fit);
double recover_boundary_value(double slope, double coefficient);

struct ScanEntry {
    geometry::SurfacePoint anchor;
    BlowupFit fit;
    ProbeSeries series;
};

std::vector<ScanEntry> scan_boundary(const acoustic::AcousticSolver& solver,
                                     const std::vector<geometry::SurfacePoint>& candidates,
                                     const ProbeConfig& config = {}, const FitOptions& fit = {});
std::vector<ScanEntry> scan_boundary(const elastic::ElasticSolver& solver,
                                     const std::vector<geometry::SurfacePoint>& candidates,
                                     const ProbeConfig& config = {}, const FitOptions& fit = {});

// CSV columns: j, zx, zy, zz, re_v, im_v, abs_v.
void write_series_csv(const std::filesystem::path& path, const ProbeSeries& series);
// JSON: slope, intercept, r2, classification, contrast_estimate (+ context).
void write_fit_json(const std::filesystem::path& path, const BlowupFit& fit, const ProbeSeries& series);

}  // namespace hsp::probe
