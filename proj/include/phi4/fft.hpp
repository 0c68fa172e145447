#pragma once

#include <complex>

namespace phi4::fft {

// Cached-plan 2D complex DFTs, n x n, row-major. Unnormalized (FFTW
// convention): forward uses e^{-i...}, backward e^{+i...}. Plan creation is
// mutex-guarded; execution on caller-provided buffers is thread safe.
void forward(int n, const std::complex<double>* in, std::complex<double>* out);
void backward(int n, const std::complex<double>* in, std::complex<double>* out);

// 1D complex DFT (forward, unnormalized), any length.
void forward_1d(int n, const std::complex<double>* in, std::complex<double>* out);

}  // namespace phi4::fft
