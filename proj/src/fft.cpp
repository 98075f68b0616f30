#include "terrain/fft.hpp"

#include <cmath>
#include <stdexcept>

namespace terrain {

std::size_t next_power_of_two(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

void fft_inplace(std::vector<std::complex<double>>& data) {
  const std::size_t n = data.size();
  if (!is_power_of_two(n)) throw std::invalid_argument("fft size must be a power of two");
  if (n <= 1) return;

  // Bit-reversal permutation.
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }

  const double two_pi = 6.283185307179586476925286766559;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -two_pi / static_cast<double>(len);
    const std::complex<double> wn(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = data[i + k];
        const std::complex<double> v = data[i + k + len / 2] * w;
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
        w *= wn;
      }
    }
  }
}

std::vector<double> power_spectrum(const std::vector<double>& signal, std::size_t fft_size) {
  if (signal.size() > fft_size) throw std::invalid_argument("signal longer than fft size");
  std::vector<std::complex<double>> buf(fft_size, std::complex<double>(0.0, 0.0));
  for (std::size_t i = 0; i < signal.size(); ++i) buf[i] = std::complex<double>(signal[i], 0.0);
  fft_inplace(buf);
  std::vector<double> power(fft_size / 2 + 1);
  for (std::size_t k = 0; k <= fft_size / 2; ++k) power[k] = std::norm(buf[k]);
  return power;
}

}  // namespace terrain
