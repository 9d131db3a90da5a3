#include "hsp/gmres.hpp"

#include <algorithm>
#include <cmath>

namespace hsp {

double l2_norm(std::span<const Complex> v) {
    double s = 0.0;
    for (const auto& x : v) s += std::norm(x);
    return std::sqrt(s);
}

namespace {

Complex inner(std::span<const Complex> a, std::span<const Complex> b) {
    Complex s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += std::conj(a[i]) * b[i];
    return s;
}

// Complex Givens rotation zeroing b in (a, b).
void make_rotation(Complex a, Complex b, double& c, Complex& s) {
    const double na = std::abs(a), nb = std::abs(b);
    if (nb == 0.0) {
        c = 1.0;
        s = 0.0;
        return;
    }
    if (na == 0.0) {
        c = 0.0;
        s = std::conj(b) / nb;
        return;
    }
    const double r = std::hypot(na, nb);
    c = na / r;
    s = (a / na) * std::conj(b) / r;
}

}  // namespace

GmresResult gmres(const MatVec& apply, std::span<const Complex> b, std::span<Complex> x,
                  const GmresOptions& opts) {
    const std::size_t n = b.size();
    const int m = std::max(1, opts.restart);
    GmresResult result;

    const double bnorm = l2_norm(b);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), Complex{});
        result.converged = true;
        return result;
    }

    std::vector<std::vector<Complex>> V(m + 1, std::vector<Complex>(n));
    std::vector<std::vector<Complex>> H(m + 1, std::vector<Complex>(m));
    std::vector<double> cs(m);
    std::vector<Complex> sn(m), g(m + 1), y(m);
    std::vector<Complex> r(n), w(n);

    auto residual = [&] {
        apply(x, w);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - w[i];
        return l2_norm(r);
    };

    double rnorm = residual();
    while (result.iterations < opts.max_iterations) {
        if (rnorm / bnorm <= opts.tol) {
            result.converged = true;
            break;
        }
        for (std::size_t i = 0; i < n; ++i) V[0][i] = r[i] / rnorm;
        std::fill(g.begin(), g.end(), Complex{});
        g[0] = rnorm;

        int k = 0;
        for (; k < m && result.iterations < opts.max_iterations; ++k) {
            ++result.iterations;
            apply(V[k], V[k + 1]);
            // Modified Gram–Schmidt, twice for stability.
            for (int pass = 0; pass < 2; ++pass)
                for (int i = 0; i <= k; ++i) {
                    const Complex hik = inner(V[i], V[k + 1]);
                    if (pass == 0) H[i][k] = hik;
                    else H[i][k] += hik;
                    for (std::size_t t = 0; t < n; ++t) V[k + 1][t] -= hik * V[i][t];
                }
            const double hn = l2_norm(V[k + 1]);
            H[k + 1][k] = hn;
            if (hn > 0.0)
                for (auto& v : V[k + 1]) v /= hn;

            for (int i = 0; i < k; ++i) {
                const Complex a = H[i][k], c = H[i + 1][k];
                H[i][k] = cs[i] * a + sn[i] * c;
                H[i + 1][k] = -std::conj(sn[i]) * a + cs[i] * c;
            }
            make_rotation(H[k][k], H[k + 1][k], cs[k], sn[k]);
            H[k][k] = cs[k] * H[k][k] + sn[k] * H[k + 1][k];
            H[k + 1][k] = 0.0;
            g[k + 1] = -std::conj(sn[k]) * g[k];
            g[k] = cs[k] * g[k];

            if (std::abs(g[k + 1]) / bnorm <= opts.tol || hn == 0.0) {
                ++k;
                break;
            }
        }

        for (int i = k - 1; i >= 0; --i) {
            Complex s = g[i];
            for (int j = i + 1; j < k; ++j) s -= H[i][j] * y[j];
            y[i] = s / H[i][i];
        }
        for (int j = 0; j < k; ++j)
            for (std::size_t t = 0; t < n; ++t) x[t] += y[j] * V[j][t];

        rnorm = residual();
    }

    result.relative_residual = rnorm / bnorm;
    result.converged = result.relative_residual <= opts.tol;
    return result;
}

}  // namespace hsp
