/*
 * Copyright 2026 The POTP Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef POTP_SPECTRAL_FFT_HPP_
#define POTP_SPECTRAL_FFT_HPP_

#include <complex>
#include <numbers>
#include <vector>

namespace potp::spectral {

using cplx = std::complex<double>;

namespace detail {

inline void fft_pow2(std::vector<cplx>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double angle = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1 : -1);
    const cplx wlen(std::cos(angle), std::sin(angle));
    for (std::size_t i = 0; i < n; i += len) {
      cplx w(1.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cplx u = a[i + k];
        const cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
  if (inverse)
    for (auto& v : a) v /= static_cast<double>(n);
}

}  // namespace detail

/// Forward DFT of any length: radix-2 when possible, Bluestein otherwise.
inline std::vector<cplx> fft(std::vector<cplx> a) {
  const std::size_t n = a.size();
  if (n <= 1) return a;
  if ((n & (n - 1)) == 0) {
    detail::fft_pow2(a, false);
    return a;
  }
  std::size_t m = 1;
  while (m < 2 * n - 1) m <<= 1;
  std::vector<cplx> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the phase argument small.
    const auto kk = static_cast<double>((k * k) % (2 * n));
    chirp[k] = std::polar(1.0, -std::numbers::pi * kk / static_cast<double>(n));
  }
  std::vector<cplx> u(m), v(m);
  for (std::size_t k = 0; k < n; ++k) u[k] = a[k] * chirp[k];
  v[0] = std::conj(chirp[0]);
  for (std::size_t k = 1; k < n; ++k) v[k] = v[m - k] = std::conj(chirp[k]);
  detail::fft_pow2(u, false);
  detail::fft_pow2(v, false);
  for (std::size_t k = 0; k < m; ++k) u[k] *= v[k];
  detail::fft_pow2(u, true);
  for (std::size_t k = 0; k < n; ++k) a[k] = u[k] * chirp[k];
  return a;
}

inline std::vector<cplx> fft_real(const std::vector<double>& x) {
  return fft(std::vector<cplx>(x.begin(), x.end()));
}

}  // namespace potp::spectral

#endif  // POTP_SPECTRAL_FFT_HPP_
