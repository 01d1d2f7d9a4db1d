#pragma once

#include <complex>
#include <vector>

#include "bpl/grid.hpp"

namespace bpl {

using Spectrum = std::vector<std::complex<double>>;

// Unnormalized forward DFT of the real samples (FFTW sign convention
// e^{-i xi x}); plans are cached per (dim, N) and reused.
Spectrum forward_fft(const GridFunction& f);

// inverse of forward_fft including the 1/N^d normalization
Spectrum inverse_fft(const GridSpec& spec, const Spectrum& spectrum);

// real part of the inverse transform; reports the L2 norm of the imaginary
// residual (relative checks live in the callers)
GridFunction inverse_fft_real(const GridSpec& spec, const Spectrum& spectrum,
                              double* imag_l2 = nullptr);

}  // namespace bpl
