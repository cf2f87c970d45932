#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace spectral_wick::fft {

// In-place iterative radix-2 transform.  size() must be a power of two.
// Forward uses e^{-i 2 pi jk/N}; inverse includes the 1/N factor.
void transform(std::vector<std::complex<double>>& data, bool inverse);

std::size_t next_pow2(std::size_t n);

}  // namespace spectral_wick::fft
