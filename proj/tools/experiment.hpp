#pragma once

// Batch experiment runner behind the hsprobe command line: configuration
// loading, run manifests and the forward / probe / verify commands.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "hsp/acoustic.hpp"
#include "hsp/elastic.hpp"
#include "hsp/geometry.hpp"
#include "hsp/oracle.hpp"
#include "hsp/probe.hpp"

namespace hsp::app {

inline constexpr const char* kToolVersion = "0.3.0";

enum ExitCode { kSuccess = 0, kCheckFailure = 1, kUsageError = 2 };

struct AnchorSpec {
    std::optional<Vec3> position;
    std::optional<Vec3> normal;
    std::optional<Vec3> direction;  // boundary point along a ray from the shape centre
    double offset = 0.0;            // move the anchor outward along its normal
};

struct ExperimentConfig {
    probe::Physics physics = probe::Physics::Acoustic;
    geometry::ShapeSpec shape;
    // acoustic
    double k = 1.0;
    Complex n = 1.0;
    // elastic
    elastic::Background background{};
    double rho = 1.0;

    Vec3 grid_center{};
    double grid_half_width = 1.0;
    int grid_n = 64;
    int n_theta = 8;
    int n_phi = 16;

    Vec3 incident_direction{0.0, 0.0, 1.0};
    Vec3 incident_polarization{1.0, 0.0, 0.0};
    std::string validate;  // "", "mie" or "born"

    std::vector<AnchorSpec> anchors;
    int j_min = 2;
    int j_max = 16;
    double delta = 0.3;
    probe::Abscissa abscissa = probe::Abscissa::LogJ;
    double threshold_fraction = 0.25;
    double reference_contrast = 0.1;

    GmresOptions gmres{};
    std::filesystem::path output_dir = "out";
    std::uint64_t hash = 0;

    GridSpec grid() const { return GridSpec::cube(grid_center, grid_half_width, grid_n); }
    acoustic::AcousticMedium acoustic_medium() const;
    elastic::ElasticMedium elastic_medium() const;
    std::vector<geometry::SurfacePoint> resolve_anchors() const;
};

// Parses JSON text. Throws ConfigError naming the offending field; checks
// the material and shape invariants and the 1/j >= 2h cap.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& path);

std::uint64_t fnv1a(const std::string& bytes);
std::uint64_t file_checksum(const std::filesystem::path& path);

// Written before any result file and rewritten after every task.
class RunManifest {
public:
    RunManifest(std::filesystem::path dir, std::string command, std::uint64_t config_hash);

    void task(const std::string& name, const std::string& status);
    void add_file(const std::filesystem::path& path);
    void finish(const std::string& status);

private:
    void write() const;

    std::filesystem::path dir_;
    std::string command_;
    std::uint64_t config_hash_;
    std::string started_;
    std::string finished_;
    std::string status_ = "running";
    std::vector<std::pair<std::string, std::string>> tasks_;
    std::vector<std::filesystem::path> files_;
};

struct RunOptions {
    std::filesystem::path out;
    int threads = 1;
    std::uint64_t seed = 1;
};

int cmd_forward(const ExperimentConfig& config, const RunOptions& run);
int cmd_probe(const ExperimentConfig& config, const RunOptions& run);

// Suites: kernels, reciprocity, lemma23, lemma31, all. Throws ConfigError
// for an unknown name.
std::vector<oracle::OracleReport> run_suite(const std::string& suite, std::uint64_t seed);
int cmd_verify(const std::string& suite, const RunOptions& run);

}  // namespace hsp::app
