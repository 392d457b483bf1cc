#pragma once

#include <cassert>
#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "divfree/fft.hpp"
#include "divfree/tensor_core.hpp"

namespace divfree {

// Uniform periodic grid: n_dis points per dimension on a cell of side
// ell_u. Plane mode (spatial_dims = 2) keeps full 3x3 tensor components
// with k3 identically zero.
struct GridConfig {
  int n_dis = 32;
  double ell_u = 1.0;
  int spatial_dims = 2;

  void validate() const {
    if (n_dis <= 0 || n_dis % 2 != 0) throw std::invalid_argument("GridConfig: n_dis must be even and positive");
    if (!(ell_u > 0.0)) throw std::invalid_argument("GridConfig: ell_u must be positive");
    if (spatial_dims != 2 && spatial_dims != 3) throw std::invalid_argument("GridConfig: spatial_dims must be 2 or 3");
  }

  std::size_t pixel_count() const {
    std::size_t n = static_cast<std::size_t>(n_dis);
    return spatial_dims == 2 ? n * n : n * n * n;
  }

  // reduced spectrum: last dimension keeps n_dis/2 + 1 independent modes
  std::size_t mode_count() const {
    std::size_t n = static_cast<std::size_t>(n_dis);
    std::size_t r = n / 2 + 1;
    return spatial_dims == 2 ? n * r : n * n * r;
  }

  bool operator==(const GridConfig& o) const {
    return n_dis == o.n_dis && ell_u == o.ell_u && spatial_dims == o.spatial_dims;
  }
};

// Signed frequency integer of an FFT-natural index: 0,1,...,n/2,-(n/2-1),...,-1
// with the Nyquist index n/2 mapped to -n/2, matching the centered
// enumeration k_d = 2*pi*(mu_d - 1)/ell - pi*n/ell, mu_d = 1..n.
inline int signed_freq(int idx, int n) {
  return idx <= n / 2 - 1 ? idx : idx - n;
}

inline double wavenumber(int idx, int n, double ell) {
  return 2.0 * M_PI * static_cast<double>(signed_freq(idx, n)) / ell;
}

// Wavenumber used by first-derivative coefficient maps: Nyquist planes have
// no sign-resolved partner, so their component is zeroed to keep derivative
// operators odd and outputs real.
inline double deriv_wavenumber(int idx, int n, double ell) {
  if (idx == n / 2) return 0.0;
  return wavenumber(idx, n, ell);
}

struct RealTensorField2 {
  GridConfig grid;
  std::vector<double> v;  // [pixels][3][3] row-major, component index 3*r + c

  RealTensorField2() = default;
  explicit RealTensorField2(const GridConfig& g) : grid(g), v(g.pixel_count() * 9, 0.0) { g.validate(); }

  double& at(std::size_t pixel, int r, int c) { return v[pixel * 9 + 3 * r + c]; }
  double at(std::size_t pixel, int r, int c) const { return v[pixel * 9 + 3 * r + c]; }

  std::size_t pixel_index(int i1, int i2) const {
    assert(grid.spatial_dims == 2);
    return static_cast<std::size_t>(i1) * grid.n_dis + i2;
  }
  std::size_t pixel_index(int i1, int i2, int i3) const {
    assert(grid.spatial_dims == 3);
    return (static_cast<std::size_t>(i1) * grid.n_dis + i2) * grid.n_dis + i3;
  }

  Mat3 tensor_at(std::size_t pixel) const {
    Mat3 out;
    for (int i = 0; i < 9; ++i) out.m[i] = v[pixel * 9 + i];
    return out;
  }
  void set_tensor(std::size_t pixel, const Mat3& t) {
    for (int i = 0; i < 9; ++i) v[pixel * 9 + i] = t.m[i];
  }
};

struct RealVectorField {
  GridConfig grid;
  std::vector<double> v;  // [pixels][3]

  RealVectorField() = default;
  explicit RealVectorField(const GridConfig& g) : grid(g), v(g.pixel_count() * 3, 0.0) {}

  double& at(std::size_t pixel, int i) { return v[pixel * 3 + i]; }
  double at(std::size_t pixel, int i) const { return v[pixel * 3 + i]; }
};

// Fourier coefficients on the reduced reciprocal grid (conjugate symmetry
// implied along the last dimension), FFT-natural order, DC first.
struct SpectralTensorField2 {
  GridConfig grid;
  std::vector<cplx> v;  // [modes][3][3]

  SpectralTensorField2() = default;
  explicit SpectralTensorField2(const GridConfig& g) : grid(g), v(g.mode_count() * 9, cplx(0.0)) {}

  cplx& at(std::size_t mode, int r, int c) { return v[mode * 9 + 3 * r + c]; }
  cplx at(std::size_t mode, int r, int c) const { return v[mode * 9 + 3 * r + c]; }

  ComplexMatrix3 tensor_at(std::size_t mode) const {
    ComplexMatrix3 out;
    for (int i = 0; i < 9; ++i) out.m[i] = v[mode * 9 + i];
    return out;
  }
  void set_tensor(std::size_t mode, const ComplexMatrix3& t) {
    for (int i = 0; i < 9; ++i) v[mode * 9 + i] = t.m[i];
  }
};

namespace plane {

// Single-channel transforms on an n x n plane. Forward carries the 1/N
// normalization (so the DC coefficient is the grid mean); the inverse is an
// unnormalized synthesis sum. Reduced spectra store columns k2 = 0..n/2.
// Workspaces are reused per thread; these run in training hot loops.

namespace detail {
struct Workspace {
  std::vector<cplx> buf, cols, row, scratch;
};
inline Workspace& ws() {
  thread_local Workspace w;
  return w;
}
}  // namespace detail

inline void rfft2(const double* in, cplx* out, int n) {
  const std::size_t nn = static_cast<std::size_t>(n);
  const std::size_t rcols = nn / 2 + 1;
  detail::Workspace& w = detail::ws();
  w.buf.resize(nn * nn);
  for (std::size_t i = 0; i < nn * nn; ++i) w.buf[i] = in[i];
  for (std::size_t i1 = 0; i1 < nn; ++i1) fft::transform(w.buf.data() + i1 * nn, nn, false);
  const double norm = 1.0 / static_cast<double>(nn * nn);
  for (std::size_t k2 = 0; k2 < rcols; ++k2) {
    fft::transform_strided(w.buf.data() + k2, nn, nn, false, w.scratch);
    for (std::size_t k1 = 0; k1 < nn; ++k1) out[k1 * rcols + k2] = w.buf[k1 * nn + k2] * norm;
  }
}

// max |imag| of the synthesis is accumulated into *imag_residue when given
inline void irfft2(const cplx* in, double* out, int n, double* imag_residue = nullptr) {
  const std::size_t nn = static_cast<std::size_t>(n);
  const std::size_t rcols = nn / 2 + 1;
  detail::Workspace& w = detail::ws();
  w.cols.resize(nn * rcols);
  for (std::size_t i = 0; i < nn * rcols; ++i) w.cols[i] = in[i];
  for (std::size_t k2 = 0; k2 < rcols; ++k2)
    fft::transform_strided(w.cols.data() + k2, nn, rcols, true, w.scratch);
  w.row.resize(nn);
  double res = 0.0;
  for (std::size_t x1 = 0; x1 < nn; ++x1) {
    for (std::size_t k2 = 0; k2 < rcols; ++k2) w.row[k2] = w.cols[x1 * rcols + k2];
    for (std::size_t k2 = rcols; k2 < nn; ++k2) w.row[k2] = std::conj(w.cols[x1 * rcols + (nn - k2)]);
    fft::transform(w.row.data(), nn, true);
    for (std::size_t x2 = 0; x2 < nn; ++x2) {
      out[x1 * nn + x2] = w.row[x2].real();
      res = std::max(res, std::abs(w.row[x2].imag()));
    }
  }
  if (imag_residue) *imag_residue = std::max(*imag_residue, res);
}

// Adjoint of rfft2 as a real-linear map (gradients flow back from a reduced
// spectrum to the real plane): zero-pad the missing columns, unnormalized
// inverse synthesis, real part, times 1/N.
inline void rfft2_adjoint(const cplx* g, double* out, int n) {
  const std::size_t nn = static_cast<std::size_t>(n);
  const std::size_t rcols = nn / 2 + 1;
  detail::Workspace& w = detail::ws();
  w.cols.resize(nn * rcols);
  for (std::size_t i = 0; i < nn * rcols; ++i) w.cols[i] = g[i];
  for (std::size_t k2 = 0; k2 < rcols; ++k2)
    fft::transform_strided(w.cols.data() + k2, nn, rcols, true, w.scratch);
  w.row.resize(nn);
  const double norm = 1.0 / static_cast<double>(nn * nn);
  for (std::size_t x1 = 0; x1 < nn; ++x1) {
    for (std::size_t k2 = 0; k2 < rcols; ++k2) w.row[k2] = w.cols[x1 * rcols + k2];
    for (std::size_t k2 = rcols; k2 < nn; ++k2) w.row[k2] = cplx(0.0);
    fft::transform(w.row.data(), nn, true);
    for (std::size_t x2 = 0; x2 < nn; ++x2) out[x1 * nn + x2] = w.row[x2].real() * norm;
  }
}

// Adjoint of irfft2: unnormalized analysis of the real gradient plane, then
// fold the conjugate-mirrored columns back onto the stored half-spectrum.
inline void irfft2_adjoint(const double* g, cplx* out, int n) {
  const std::size_t nn = static_cast<std::size_t>(n);
  const std::size_t rcols = nn / 2 + 1;
  detail::Workspace& w = detail::ws();
  w.buf.resize(nn * nn);
  for (std::size_t i = 0; i < nn * nn; ++i) w.buf[i] = g[i];
  for (std::size_t i1 = 0; i1 < nn; ++i1) fft::transform(w.buf.data() + i1 * nn, nn, false);
  for (std::size_t k2 = 0; k2 < nn; ++k2)
    fft::transform_strided(w.buf.data() + k2, nn, nn, false, w.scratch);
  for (std::size_t k1 = 0; k1 < nn; ++k1)
    for (std::size_t k2 = 0; k2 < rcols; ++k2) {
      cplx acc = w.buf[k1 * nn + k2];
      if (k2 != 0 && k2 != nn / 2) {
        std::size_t m1 = (nn - k1) % nn;
        acc += std::conj(w.buf[m1 * nn + (nn - k2)]);
      }
      out[k1 * rcols + k2] = acc;
    }
}

}  // namespace plane

namespace detail {

// Generic forward/backward between pixel-interleaved channel data and the
// reduced spectrum, covering both plane (2D) and 3D grids.
inline void forward_channel(const RealTensorField2& f, int comp, std::vector<cplx>& work,
                            SpectralTensorField2& out) {
  const int n = f.grid.n_dis;
  const std::size_t nn = static_cast<std::size_t>(n);
  const std::size_t rcols = nn / 2 + 1;
  if (f.grid.spatial_dims == 2) {
    std::vector<double> chan(nn * nn);
    for (std::size_t p = 0; p < nn * nn; ++p) chan[p] = f.v[p * 9 + comp];
    std::vector<cplx> spec(nn * rcols);
    plane::rfft2(chan.data(), spec.data(), n);
    for (std::size_t m = 0; m < nn * rcols; ++m) out.v[m * 9 + comp] = spec[m];
    return;
  }
  // 3D: full complex cube, transform each axis, keep k3 <= n/2
  work.resize(nn * nn * nn);
  for (std::size_t p = 0; p < nn * nn * nn; ++p) work[p] = f.v[p * 9 + comp];
  std::vector<cplx> scratch;
  for (std::size_t i1 = 0; i1 < nn; ++i1)
    for (std::size_t i2 = 0; i2 < nn; ++i2)
      fft::transform(work.data() + (i1 * nn + i2) * nn, nn, false);
  for (std::size_t i1 = 0; i1 < nn; ++i1)
    for (std::size_t k3 = 0; k3 < nn; ++k3)
      fft::transform_strided(work.data() + i1 * nn * nn + k3, nn, nn, false, scratch);
  for (std::size_t k2 = 0; k2 < nn; ++k2)
    for (std::size_t k3 = 0; k3 < nn; ++k3)
      fft::transform_strided(work.data() + k2 * nn + k3, nn, nn * nn, false, scratch);
  const double norm = 1.0 / static_cast<double>(nn * nn * nn);
  for (std::size_t k1 = 0; k1 < nn; ++k1)
    for (std::size_t k2 = 0; k2 < nn; ++k2)
      for (std::size_t k3 = 0; k3 < rcols; ++k3) {
        std::size_t m = (k1 * nn + k2) * rcols + k3;
        out.v[m * 9 + comp] = work[(k1 * nn + k2) * nn + k3] * norm;
      }
}

inline void inverse_channel(const SpectralTensorField2& s, int comp, std::vector<cplx>& work,
                            RealTensorField2& out, double* imag_residue) {
  const int n = s.grid.n_dis;
  const std::size_t nn = static_cast<std::size_t>(n);
  const std::size_t rcols = nn / 2 + 1;
  if (s.grid.spatial_dims == 2) {
    std::vector<cplx> spec(nn * rcols);
    for (std::size_t m = 0; m < nn * rcols; ++m) spec[m] = s.v[m * 9 + comp];
    std::vector<double> chan(nn * nn);
    plane::irfft2(spec.data(), chan.data(), n, imag_residue);
    for (std::size_t p = 0; p < nn * nn; ++p) out.v[p * 9 + comp] = chan[p];
    return;
  }
  // 3D: hermitian-extend the last axis, then inverse transform each axis
  work.assign(nn * nn * nn, cplx(0.0));
  for (std::size_t k1 = 0; k1 < nn; ++k1)
    for (std::size_t k2 = 0; k2 < nn; ++k2) {
      for (std::size_t k3 = 0; k3 < rcols; ++k3)
        work[(k1 * nn + k2) * nn + k3] = s.v[((k1 * nn + k2) * rcols + k3) * 9 + comp];
      for (std::size_t k3 = rcols; k3 < nn; ++k3) {
        std::size_t m1 = (nn - k1) % nn, m2 = (nn - k2) % nn;
        work[(k1 * nn + k2) * nn + k3] =
            std::conj(s.v[((m1 * nn + m2) * rcols + (nn - k3)) * 9 + comp]);
      }
    }
  std::vector<cplx> scratch;
  for (std::size_t k2 = 0; k2 < nn; ++k2)
    for (std::size_t k3 = 0; k3 < nn; ++k3)
      fft::transform_strided(work.data() + k2 * nn + k3, nn, nn * nn, true, scratch);
  for (std::size_t i1 = 0; i1 < nn; ++i1)
    for (std::size_t k3 = 0; k3 < nn; ++k3)
      fft::transform_strided(work.data() + i1 * nn * nn + k3, nn, nn, true, scratch);
  double res = 0.0;
  for (std::size_t i1 = 0; i1 < nn; ++i1)
    for (std::size_t i2 = 0; i2 < nn; ++i2) {
      fft::transform(work.data() + (i1 * nn + i2) * nn, nn, true);
      for (std::size_t i3 = 0; i3 < nn; ++i3) {
        cplx z = work[(i1 * nn + i2) * nn + i3];
        out.v[((i1 * nn + i2) * nn + i3) * 9 + comp] = z.real();
        res = std::max(res, std::abs(z.imag()));
      }
    }
  if (imag_residue) *imag_residue = std::max(*imag_residue, res);
}

}  // namespace detail

inline SpectralTensorField2 dft_forward(const RealTensorField2& f) {
  f.grid.validate();
  if (f.v.size() != f.grid.pixel_count() * 9) throw std::invalid_argument("dft_forward: shape mismatch");
  SpectralTensorField2 out(f.grid);
  std::vector<cplx> work;
  for (int comp = 0; comp < 9; ++comp) detail::forward_channel(f, comp, work, out);
  return out;
}

inline RealTensorField2 dft_inverse(const SpectralTensorField2& s, double* imag_residue = nullptr) {
  s.grid.validate();
  if (s.v.size() != s.grid.mode_count() * 9) throw std::invalid_argument("dft_inverse: shape mismatch");
  RealTensorField2 out(s.grid);
  std::vector<cplx> work;
  for (int comp = 0; comp < 9; ++comp) detail::inverse_channel(s, comp, work, out, imag_residue);
  return out;
}

// Visit every reduced mode: callback(mode_index, raw wavevector, derivative
// wavevector with Nyquist components zeroed, is_dc).
template <typename F>
void for_each_mode(const GridConfig& g, F&& fn) {
  const int n = g.n_dis;
  const std::size_t nn = static_cast<std::size_t>(n);
  const std::size_t rcols = nn / 2 + 1;
  if (g.spatial_dims == 2) {
    for (int k1 = 0; k1 < n; ++k1)
      for (int k2 = 0; k2 < static_cast<int>(rcols); ++k2) {
        WaveVector raw{wavenumber(k1, n, g.ell_u), wavenumber(k2, n, g.ell_u), 0.0};
        WaveVector der{deriv_wavenumber(k1, n, g.ell_u), deriv_wavenumber(k2, n, g.ell_u), 0.0};
        fn(static_cast<std::size_t>(k1) * rcols + k2, raw, der, k1 == 0 && k2 == 0);
      }
    return;
  }
  for (int k1 = 0; k1 < n; ++k1)
    for (int k2 = 0; k2 < n; ++k2)
      for (int k3 = 0; k3 < static_cast<int>(rcols); ++k3) {
        WaveVector raw{wavenumber(k1, n, g.ell_u), wavenumber(k2, n, g.ell_u), wavenumber(k3, n, g.ell_u)};
        WaveVector der{deriv_wavenumber(k1, n, g.ell_u), deriv_wavenumber(k2, n, g.ell_u),
                       deriv_wavenumber(k3, n, g.ell_u)};
        fn((static_cast<std::size_t>(k1) * nn + k2) * rcols + k3, raw, der,
           k1 == 0 && k2 == 0 && k3 == 0);
      }
}

// Full reciprocal grid in FFT-natural order (row-major over dimensions, DC
// first). Each per-dimension set equals the centered enumeration
// {2*pi*(mu-1)/ell - pi*n/ell : mu = 1..n} of the sampled cell.
inline std::vector<WaveVector> build_reciprocal_grid(const GridConfig& g) {
  g.validate();
  const int n = g.n_dis;
  std::vector<WaveVector> out;
  if (g.spatial_dims == 2) {
    out.reserve(static_cast<std::size_t>(n) * n);
    for (int k1 = 0; k1 < n; ++k1)
      for (int k2 = 0; k2 < n; ++k2)
        out.push_back({wavenumber(k1, n, g.ell_u), wavenumber(k2, n, g.ell_u), 0.0});
  } else {
    out.reserve(static_cast<std::size_t>(n) * n * n);
    for (int k1 = 0; k1 < n; ++k1)
      for (int k2 = 0; k2 < n; ++k2)
        for (int k3 = 0; k3 < n; ++k3)
          out.push_back({wavenumber(k1, n, g.ell_u), wavenumber(k2, n, g.ell_u), wavenumber(k3, n, g.ell_u)});
  }
  return out;
}

inline std::pair<Mat3, RealTensorField2> mean_fluctuation_split(const RealTensorField2& f) {
  Mat3 mean;
  const std::size_t np = f.grid.pixel_count();
  for (std::size_t p = 0; p < np; ++p)
    for (int i = 0; i < 9; ++i) mean.m[i] += f.v[p * 9 + i];
  for (int i = 0; i < 9; ++i) mean.m[i] /= static_cast<double>(np);
  RealTensorField2 fluct = f;
  for (std::size_t p = 0; p < np; ++p)
    for (int i = 0; i < 9; ++i) fluct.v[p * 9 + i] -= mean.m[i];
  return {mean, std::move(fluct)};
}

// Whole-field operators: forward transform, per-mode coefficient map from
// tensor_core, inverse transform. The k = 0 branch passes the mean through
// for curl/inc; div drops it.

inline RealTensorField2 field_curl(const RealTensorField2& a) {
  SpectralTensorField2 s = dft_forward(a);
  for_each_mode(s.grid, [&](std::size_t m, const WaveVector&, const WaveVector& kd, bool dc) {
    if (dc) return;  // mean passes through
    if (kd.is_zero()) {
      s.set_tensor(m, ComplexMatrix3{});  // fully Nyquist-suppressed mode
      return;
    }
    s.set_tensor(m, matmul(s.tensor_at(m), axial_tensor(kd).transposed()));
  });
  return dft_inverse(s);
}

inline RealTensorField2 field_inc(const RealTensorField2& b) {
  SpectralTensorField2 s = dft_forward(b);
  for_each_mode(s.grid, [&](std::size_t m, const WaveVector&, const WaveVector& kd, bool dc) {
    if (dc) return;
    ComplexMatrix3 bm = s.tensor_at(m);
    // symmetrize away transform roundoff before the checked map
    for (int r = 0; r < 3; ++r)
      for (int c = r + 1; c < 3; ++c) {
        cplx avg = 0.5 * (bm(r, c) + bm(c, r));
        double defect = std::abs(bm(r, c) - bm(c, r));
        if (defect > 1e-9 * (1.0 + bm.frobenius()))
          throw std::invalid_argument("field_inc: input field is not symmetric");
        bm(r, c) = bm(c, r) = avg;
      }
    if (kd.is_zero()) {
      s.set_tensor(m, ComplexMatrix3{});
      return;
    }
    ComplexMatrix3 ax = axial_tensor(kd);
    s.set_tensor(m, matmul(ax, matmul(bm, ax.transposed())));
  });
  return dft_inverse(s);
}

inline RealVectorField field_div(const RealTensorField2& p) {
  SpectralTensorField2 s = dft_forward(p);
  const GridConfig& g = s.grid;
  std::vector<cplx> dhat(g.mode_count() * 3, cplx(0.0));
  for_each_mode(g, [&](std::size_t m, const WaveVector&, const WaveVector& kd, bool dc) {
    if (dc || kd.is_zero()) return;
    ComplexVector3 d = div_coefficient(s.tensor_at(m), kd);
    for (int i = 0; i < 3; ++i) dhat[m * 3 + i] = d[i];
  });
  // inverse of the 3-channel spectrum through a tensor-shaped scratch field
  RealVectorField out(g);
  SpectralTensorField2 scratch(g);
  for (std::size_t m = 0; m < g.mode_count(); ++m)
    for (int i = 0; i < 3; ++i) scratch.v[m * 9 + i] = dhat[m * 3 + i];
  RealTensorField2 inv = dft_inverse(scratch);
  for (std::size_t p2 = 0; p2 < g.pixel_count(); ++p2)
    for (int i = 0; i < 3; ++i) out.v[p2 * 3 + i] = inv.v[p2 * 9 + i];
  return out;
}

// sum over the full (implied) spectrum of |f_hat|^2; by Parseval this equals
// the grid mean of |f|^2 under the forward 1/N normalization
inline double spectral_sq_sum(const SpectralTensorField2& s) {
  const int n = s.grid.n_dis;
  const std::size_t rcols = static_cast<std::size_t>(n) / 2 + 1;
  double total = 0.0;
  const std::size_t modes = s.grid.mode_count();
  for (std::size_t m = 0; m < modes; ++m) {
    std::size_t klast = m % rcols;
    double w = (klast == 0 || klast == rcols - 1) ? 1.0 : 2.0;
    double acc = 0.0;
    for (int i = 0; i < 9; ++i) acc += std::norm(s.v[m * 9 + i]);
    total += w * acc;
  }
  return total;
}

inline double grid_mean_sq(const RealTensorField2& f) {
  double acc = 0.0;
  for (double x : f.v) acc += x * x;
  return acc / static_cast<double>(f.grid.pixel_count());
}

inline double grid_mean_sq(const RealVectorField& f) {
  double acc = 0.0;
  for (double x : f.v) acc += x * x;
  return acc / static_cast<double>(f.grid.pixel_count());
}

}  // namespace divfree
