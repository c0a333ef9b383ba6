#pragma once
#include <complex>
#include <stdexcept>
#include <vector>

namespace hml {

// In-place radix-2 transform, unnormalized.
// forward: X[k] = sum_j a[j] e^{-2 pi i jk/n};  inverse: e^{+2 pi i jk/n}.
// Twiddles come from std::polar per index; at n <= 2^16 the extra trig cost
// is negligible and keeps rounding near machine precision.
inline void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::invalid_argument("fft_radix2: size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const double sgn = inverse ? 1.0 : -1.0;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = sgn * 6.28318530717958647692 / double(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        std::complex<double> w = std::polar(1.0, ang * double(k));
        std::complex<double> u = a[i + k];
        std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

}  // namespace hml
