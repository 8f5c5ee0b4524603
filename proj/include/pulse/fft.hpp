#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <vector>

#include "pulse/errors.hpp"

namespace pulse {

namespace detail {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// Iterative in-place radix-2 Cooley-Tukey; n must be a power of two.
inline void fft_radix2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const double pi = 3.14159265358979323846;
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * pi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse)
    for (auto& x : a) x /= static_cast<double>(n);
}

}  // namespace detail

/// Forward DFT of arbitrary length (radix-2 directly, Bluestein otherwise).
/// Unnormalized forward transform; inverse divides by n.
inline std::vector<std::complex<double>> fft(std::vector<std::complex<double>> a,
                                             bool inverse = false) {
  const std::size_t n = a.size();
  if (n == 0) throw ParameterError("fft of empty sequence");
  if (detail::is_power_of_two(n)) {
    detail::fft_radix2(a, inverse);
    return a;
  }
  // Bluestein: chirp-z via convolution at a power-of-two size >= 2n-1.
  const double pi = 3.14159265358979323846;
  const double sign = inverse ? 1.0 : -1.0;
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  std::vector<std::complex<double>> u(m, {0.0, 0.0}), v(m, {0.0, 0.0});
  std::vector<std::complex<double>> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2/2 mod n kept exact via k^2 mod 2n to avoid large-angle error.
    const std::size_t k2 = (k * k) % (2 * n);
    const double ang = sign * pi * static_cast<double>(k2) / static_cast<double>(n);
    chirp[k] = {std::cos(ang), std::sin(ang)};
    u[k] = a[k] * chirp[k];
    v[k] = std::conj(chirp[k]);
    if (k != 0) v[m - k] = std::conj(chirp[k]);
  }
  detail::fft_radix2(u, false);
  detail::fft_radix2(v, false);
  for (std::size_t i = 0; i < m; ++i) u[i] *= v[i];
  detail::fft_radix2(u, true);
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = u[k] * chirp[k];
  if (inverse)
    for (auto& x : out) x /= static_cast<double>(n);
  return out;
}

inline std::vector<std::complex<double>> fft_real(const std::vector<double>& x) {
  std::vector<std::complex<double>> a(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) a[i] = {x[i], 0.0};
  return fft(std::move(a));
}

inline std::vector<double> ifft_real(const std::vector<std::complex<double>>& spectrum) {
  auto a = fft(spectrum, true);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i].real();
  return out;
}

}  // namespace pulse
