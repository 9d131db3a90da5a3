#pragma once

// Restarted GMRES for complex linear systems given only through a matvec.

#include <functional>
#include <span>
#include <vector>

#include "hsp/vec.hpp"

namespace hsp {

struct GmresOptions {
    int restart = 30;
    int max_iterations = 500;
    double tol = 1e-8;  // relative to ||b||
};

struct GmresResult {
    bool converged = false;
    int iterations = 0;
    double relative_residual = 0.0;  // true residual, recomputed at exit
};

using MatVec = std::function<void(std::span<const Complex>, std::span<Complex>)>;

// Solves A x = b starting from the initial guess in x.
GmresResult gmres(const MatVec& apply, std::span<const Complex> b, std::span<Complex> x,
                  const GmresOptions& opts);

double l2_norm(std::span<const Complex> v);

}  // namespace hsp
