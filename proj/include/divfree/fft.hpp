#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <vector>

#include "divfree/tensor_core.hpp"

namespace divfree::fft {

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Twiddle tables are cached per length; single-threaded access per thread.
inline const std::vector<cplx>& twiddles(std::size_t n, bool inverse) {
  thread_local std::map<std::pair<std::size_t, bool>, std::vector<cplx>> cache;
  auto key = std::make_pair(n, inverse);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  std::vector<cplx> tw(n / 2);
  const double sign = inverse ? 1.0 : -1.0;
  for (std::size_t j = 0; j < n / 2; ++j) {
    double ang = sign * 2.0 * M_PI * static_cast<double>(j) / static_cast<double>(n);
    tw[j] = cplx(std::cos(ang), std::sin(ang));
  }
  return cache.emplace(key, std::move(tw)).first->second;
}

inline void fft_pow2(cplx* a, std::size_t n, bool inverse) {
  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  const std::vector<cplx>& tw = twiddles(n, inverse);
  for (std::size_t len = 2; len <= n; len <<= 1) {
    std::size_t step = n / len;
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t j = 0; j < len / 2; ++j) {
        cplx u = a[i + j];
        cplx v = a[i + j + len / 2] * tw[j * step];
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
      }
    }
  }
}

// Bluestein's algorithm for arbitrary length, expressed through a pow2
// cyclic convolution. Needed only for non-power-of-two grids.
inline void fft_bluestein(cplx* a, std::size_t n, bool inverse) {
  const double sign = inverse ? 1.0 : -1.0;
  std::vector<cplx> chirp(n);
  for (std::size_t j = 0; j < n; ++j) {
    // j^2 mod 2n keeps the angle argument small
    std::size_t jsq = (j * j) % (2 * n);
    double ang = sign * M_PI * static_cast<double>(jsq) / static_cast<double>(n);
    chirp[j] = cplx(std::cos(ang), std::sin(ang));
  }
  std::size_t m = next_pow2(2 * n - 1);
  std::vector<cplx> u(m), v(m);
  for (std::size_t j = 0; j < n; ++j) u[j] = a[j] * chirp[j];
  v[0] = std::conj(chirp[0]);
  for (std::size_t j = 1; j < n; ++j) v[j] = v[m - j] = std::conj(chirp[j]);
  fft_pow2(u.data(), m, false);
  fft_pow2(v.data(), m, false);
  for (std::size_t j = 0; j < m; ++j) u[j] *= v[j];
  fft_pow2(u.data(), m, true);
  for (std::size_t j = 0; j < n; ++j) a[j] = u[j] * chirp[j] / static_cast<double>(m);
}

}  // namespace detail

// In-place unnormalized transform: X_k = sum_j x_j e^{-2*pi*i*j*k/n}
// (forward) or with e^{+...} (inverse). Callers apply normalization.
inline void transform(cplx* a, std::size_t n, bool inverse) {
  if (n == 0) throw std::invalid_argument("fft: empty transform");
  if (n == 1) return;
  if (detail::is_pow2(n))
    detail::fft_pow2(a, n, inverse);
  else
    detail::fft_bluestein(a, n, inverse);
}

inline void transform(std::vector<cplx>& a, bool inverse) { transform(a.data(), a.size(), inverse); }

// Strided transform over a line of a multi-dimensional array.
inline void transform_strided(cplx* base, std::size_t n, std::size_t stride, bool inverse,
                              std::vector<cplx>& scratch) {
  scratch.resize(n);
  for (std::size_t j = 0; j < n; ++j) scratch[j] = base[j * stride];
  transform(scratch.data(), n, inverse);
  for (std::size_t j = 0; j < n; ++j) base[j * stride] = scratch[j];
}

}  // namespace divfree::fft
