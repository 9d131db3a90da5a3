#pragma once

// Aperiodic discrete convolution on a uniform grid via zero-padded FFTs.
//
// The grid (N1,N2,N3) is embedded in a (2N1,2N2,2N3) periodic box. A kernel
// is tabulated on all offsets -(N-1)..(N-1) per axis, so the circular
// convolution of a zero-padded density reproduces the discrete sum
//   out(x_i) = sum_j K(x_i - x_j) f(x_j)
// exactly; no periodization error enters.

#include <array>
#include <complex>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "hsp/grid.hpp"

namespace hsp {

// Owning buffer allocated with the FFT library's aligned allocator.
class SpectrumBuffer {
public:
    SpectrumBuffer() = default;
    explicit SpectrumBuffer(std::size_t n);
    SpectrumBuffer(SpectrumBuffer&&) noexcept = default;
    SpectrumBuffer& operator=(SpectrumBuffer&&) noexcept = default;

    Complex* data() { return data_.get(); }
    const Complex* data() const { return data_.get(); }
    std::size_t size() const { return size_; }
    Complex& operator[](std::size_t i) { return data_[i]; }
    const Complex& operator[](std::size_t i) const { return data_[i]; }
    void fill_zero();

private:
    struct Free {
        void operator()(Complex* p) const;
    };
    std::unique_ptr<Complex[], Free> data_;
    std::size_t size_ = 0;
};

class GridConvolution {
public:
    explicit GridConvolution(const GridSpec& grid);
    ~GridConvolution();
    GridConvolution(const GridConvolution&) = delete;
    GridConvolution& operator=(const GridConvolution&) = delete;

    const GridSpec& grid() const { return grid_; }
    std::size_t padded_size() const { return padded_total_; }

    // Spectrum of a kernel given as a function of the integer offset
    // (di, dj, dk) between target and source node.
    SpectrumBuffer kernel_spectrum(const std::function<Complex(int, int, int)>& kernel) const;

    // Forward transform of a grid-sized array (zero padded).
    SpectrumBuffer forward(std::span<const Complex> values) const;
    // Same, reading a strided component of interleaved data.
    SpectrumBuffer forward_strided(const Complex* values, std::size_t stride) const;

    // Inverse transform; the grid block is written (with stride) to out.
    // The spectrum is consumed.
    void inverse(SpectrumBuffer& spectrum, Complex* out, std::size_t stride = 1) const;

    // out = conv(kernel, values), all grid-sized.
    void apply(const SpectrumBuffer& kernel, std::span<const Complex> values, std::span<Complex> out) const;

private:
    std::size_t padded_index(int i, int j, int k) const {
        return (static_cast<std::size_t>(i) * padded_[1] + j) * padded_[2] + k;
    }

    GridSpec grid_;
    std::array<int, 3> padded_{};
    std::size_t padded_total_ = 0;
    void* forward_plan_ = nullptr;
    void* backward_plan_ = nullptr;
};

// Number of threads used inside FFT execution (process-wide, default 1).
void set_fft_threads(int n);

}  // namespace hsp
