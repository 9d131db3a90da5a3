#include "hsp/fft_convolution.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cstring>
#include <mutex>

namespace hsp {

namespace {

// The FFTW planner is not re-entrant; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

int& fft_threads() {
    static int n = 1;
    return n;
}

fftw_complex* as_fftw(Complex* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

void set_fft_threads(int n) {
    std::lock_guard lock(planner_mutex());
    static bool initialized = false;
    if (!initialized) {
        fftw_init_threads();
        initialized = true;
    }
    fft_threads() = std::max(1, n);
    fftw_plan_with_nthreads(fft_threads());
}

SpectrumBuffer::SpectrumBuffer(std::size_t n)
    : data_(reinterpret_cast<Complex*>(fftw_alloc_complex(n))), size_(n) {
    if (!data_) throw std::bad_alloc();
}

void SpectrumBuffer::Free::operator()(Complex* p) const { fftw_free(p); }

void SpectrumBuffer::fill_zero() { std::memset(static_cast<void*>(data_.get()), 0, size_ * sizeof(Complex)); }

GridConvolution::GridConvolution(const GridSpec& grid) : grid_(grid) {
    for (int a = 0; a < 3; ++a) padded_[a] = 2 * grid.dims[a];
    padded_total_ = static_cast<std::size_t>(padded_[0]) * padded_[1] * padded_[2];
    SpectrumBuffer scratch(padded_total_);
    std::lock_guard lock(planner_mutex());
    forward_plan_ = fftw_plan_dft_3d(padded_[0], padded_[1], padded_[2], as_fftw(scratch.data()),
                                     as_fftw(scratch.data()), FFTW_FORWARD, FFTW_ESTIMATE);
    backward_plan_ = fftw_plan_dft_3d(padded_[0], padded_[1], padded_[2], as_fftw(scratch.data()),
                                      as_fftw(scratch.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
}

GridConvolution::~GridConvolution() {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(static_cast<fftw_plan>(forward_plan_));
    fftw_destroy_plan(static_cast<fftw_plan>(backward_plan_));
}

SpectrumBuffer GridConvolution::kernel_spectrum(const std::function<Complex(int, int, int)>& kernel) const {
    SpectrumBuffer buf(padded_total_);
    buf.fill_zero();
    const auto& n = grid_.dims;
    // Offset d maps to slot d mod 2N; slot N (offset ±N) is never reached.
    for (int di = -(n[0] - 1); di <= n[0] - 1; ++di) {
        const int si = di < 0 ? di + padded_[0] : di;
        for (int dj = -(n[1] - 1); dj <= n[1] - 1; ++dj) {
            const int sj = dj < 0 ? dj + padded_[1] : dj;
            for (int dk = -(n[2] - 1); dk <= n[2] - 1; ++dk) {
                const int sk = dk < 0 ? dk + padded_[2] : dk;
                buf[padded_index(si, sj, sk)] = kernel(di, dj, dk);
            }
        }
    }
    fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(buf.data()), as_fftw(buf.data()));
    return buf;
}

SpectrumBuffer GridConvolution::forward_strided(const Complex* values, std::size_t stride) const {
    SpectrumBuffer buf(padded_total_);
    buf.fill_zero();
    const auto& n = grid_.dims;
    std::size_t src = 0;
    for (int i = 0; i < n[0]; ++i)
        for (int j = 0; j < n[1]; ++j) {
            Complex* row = buf.data() + padded_index(i, j, 0);
            for (int k = 0; k < n[2]; ++k, src += stride) row[k] = values[src];
        }
    fftw_execute_dft(static_cast<fftw_plan>(forward_plan_), as_fftw(buf.data()), as_fftw(buf.data()));
    return buf;
}

SpectrumBuffer GridConvolution::forward(std::span<const Complex> values) const {
    return forward_strided(values.data(), 1);
}

void GridConvolution::inverse(SpectrumBuffer& spectrum, Complex* out, std::size_t stride) const {
    fftw_execute_dft(static_cast<fftw_plan>(backward_plan_), as_fftw(spectrum.data()),
                     as_fftw(spectrum.data()));
    const double scale = 1.0 / static_cast<double>(padded_total_);
    const auto& n = grid_.dims;
    std::size_t dst = 0;
    for (int i = 0; i < n[0]; ++i)
        for (int j = 0; j < n[1]; ++j) {
            const Complex* row = spectrum.data() + padded_index(i, j, 0);
            for (int k = 0; k < n[2]; ++k, dst += stride) out[dst] = row[k] * scale;
        }
}

void GridConvolution::apply(const SpectrumBuffer& kernel, std::span<const Complex> values,
                            std::span<Complex> out) const {
    SpectrumBuffer f = forward(values);
    for (std::size_t i = 0; i < padded_total_; ++i) f[i] *= kernel[i];
    inverse(f, out.data());
}

}  // namespace hsp
