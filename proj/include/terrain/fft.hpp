#pragma once

#include <complex>
#include <cstddef>
#include <vector>

namespace terrain {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_power_of_two(std::size_t n);

// In-place iterative radix-2 FFT. data.size() must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& data);

// |X[k]|^2 for k = 0..n/2 of the real signal zero-padded to fft_size.
std::vector<double> power_spectrum(const std::vector<double>& signal, std::size_t fft_size);

}  // namespace terrain
