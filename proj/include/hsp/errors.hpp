#pragma once

#include <stdexcept>
#include <string>

namespace hsp {

// Invalid input data: unknown shape kind, bad Lamé range, grid too small.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller violated an operation's precondition (point inside the scatterer, etc).
class PreconditionError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Kernel evaluated at coincident points.
class SingularityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// A probe point fell inside the shape.
class GeometryError : public std::runtime_error {
public:
    GeometryError(const std::string& what, int offending_index)
        : std::runtime_error(what), index_(offending_index) {}
    int offending_index() const noexcept { return index_; }

private:
    int index_;
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), residual_(residual), iterations_(iterations) {}
    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

// Stencil would read outside the sampled grid.
class StencilError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Recovery requested for a point that was not classified as boundary.
class NotApplicableError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hsp
