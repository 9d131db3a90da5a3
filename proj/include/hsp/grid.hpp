#pragma once

// Uniform Cartesian grids, sampled fields, and S² direction grids.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "hsp/geometry.hpp"
#include "hsp/vec.hpp"

namespace hsp {

// Nodes sit at cell centers: node (i,j,k) is origin + spacing*(i,j,k).
struct GridSpec {
    Vec3 origin{};
    double spacing = 1.0;
    std::array<int, 3> dims{1, 1, 1};

    // n^3 cells tiling the cube [center - half_width, center + half_width]^3.
    static GridSpec cube(Vec3 center, double half_width, int n);

    std::size_t size() const {
        return static_cast<std::size_t>(dims[0]) * dims[1] * dims[2];
    }
    std::size_t index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * dims[1] + j) * dims[2] + k;
    }
    Vec3 node(int i, int j, int k) const {
        return origin + spacing * Vec3{double(i), double(j), double(k)};
    }
    Vec3 node(std::size_t flat) const;
    double cell_volume() const { return spacing * spacing * spacing; }
    // Outer faces of the cell box.
    Vec3 box_lower() const { return origin - Vec3{0.5, 0.5, 0.5} * spacing; }
    Vec3 box_upper() const;

    // Throws ConfigError unless the box contains the shape's bounding box
    // with a margin of at least two cells.
    void check_covers(const geometry::ShapeSpec& shape) const;
};

struct ScalarGridField {
    GridSpec grid;
    std::vector<Complex> values;

    explicit ScalarGridField(GridSpec g = {}) : grid(g), values(g.size()) {}
    Complex& operator[](std::size_t i) { return values[i]; }
    const Complex& operator[](std::size_t i) const { return values[i]; }

    // Trilinear interpolation. Throws StencilError outside the node hull.
    Complex interpolate(const Vec3& x) const;
    double max_abs() const;
};

struct VectorGridField {
    GridSpec grid;
    std::vector<CVec3> values;

    explicit VectorGridField(GridSpec g = {}) : grid(g), values(g.size()) {}
    CVec3& operator[](std::size_t i) { return values[i]; }
    const CVec3& operator[](std::size_t i) const { return values[i]; }

    CVec3 interpolate(const Vec3& x) const;
    double max_abs() const;
};

// Trilinear stencil shared by the field types.
struct Stencil {
    std::array<std::size_t, 8> index;
    std::array<double, 8> weight;
};
Stencil trilinear_stencil(const GridSpec& grid, const Vec3& x);

// Cell-averaged value of f over each cell: exact midpoint for cells away
// from the boundary, sub-sampled (sub^3 points) for cells the boundary cuts.
// Cells entirely outside the shape get exactly zero.
std::vector<Complex> cell_averaged_contrast(const GridSpec& grid, const geometry::ShapeSpec& shape,
                                            const std::function<Complex(const Vec3&)>& contrast,
                                            int sub = 8);

// --- binary field blobs -----------------------------------------------------
//
// <stem>.hdr is a text record, <stem>.bin holds little-endian doubles
// (re, im) per component, node-major with the k index fastest.

struct FieldHeader {
    int components = 1;
    GridSpec grid;
    double wavenumber = 0.0;
};

void write_field(const std::filesystem::path& stem, const ScalarGridField& f, double wavenumber);
void write_field(const std::filesystem::path& stem, const VectorGridField& f, double wavenumber);
FieldHeader read_field_header(const std::filesystem::path& stem);
ScalarGridField read_scalar_field(const std::filesystem::path& stem);
VectorGridField read_vector_field(const std::filesystem::path& stem);

// --- directions on the unit sphere -------------------------------------------

struct Direction {
    double theta;
    double phi;
    Vec3 unit;
    double weight;
};

// Gauss–Legendre in cos(theta) times uniform azimuth. Weights sum to 4π.
std::vector<Direction> sphere_grid(int n_theta, int n_phi);

// Gauss–Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, std::vector<double>& nodes, std::vector<double>& weights);

Direction direction_from(const Vec3& unit);

}  // namespace hsp
