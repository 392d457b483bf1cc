#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "divfree/rng.hpp"
#include "divfree/spectral_grid.hpp"

namespace divfree {

// Physics-guided (constraint only in the data), physics-informed (constraint
// in the loss), physics-encoded (constraint in the architecture).
enum class Variant { pg, pi, pe };

inline std::string variant_name(Variant v) {
  switch (v) {
    case Variant::pg: return "pg";
    case Variant::pi: return "pi";
    case Variant::pe: return "pe";
  }
  return "?";
}

inline Variant variant_from_name(const std::string& s) {
  if (s == "pg") return Variant::pg;
  if (s == "pi") return Variant::pi;
  if (s == "pe") return Variant::pe;
  throw std::invalid_argument("unknown variant: " + s);
}

// Plane-form output channel order for both stress and potential heads:
// (11, 12, 13, 21, 22, 23, 31, 32, 33). Channels 2, 5, 6, 7 are the
// structural zeros of plane-form stress; for the pe head they carry the
// fluctuating potential entries A13, A23, A31, A32 instead.
constexpr int kPlaneZeroChannels[4] = {2, 5, 6, 7};
constexpr int kPlaneMeanChannels[5] = {0, 1, 3, 4, 8};

struct FnoConfig {
  int n_dis = 32;
  double ell_u = 1.0;
  int width = 16;   // hidden channel count
  int depth = 4;    // hidden layers
  int modes = 8;    // retained Fourier modes per dimension
  Variant variant = Variant::pg;

  static constexpr int in_channels = 11;  // (E, nu, f_bar)
  static constexpr int out_channels = 9;

  void validate() const {
    if (n_dis <= 0 || n_dis % 2 != 0) throw std::invalid_argument("FnoConfig: n_dis must be even");
    if (!(ell_u > 0.0)) throw std::invalid_argument("FnoConfig: ell_u must be positive");
    if (width < 1 || depth < 1) throw std::invalid_argument("FnoConfig: width and depth must be >= 1");
    if (modes < 1 || modes > n_dis / 2)
      throw std::invalid_argument("FnoConfig: need 1 <= modes <= n_dis/2");
  }

  std::size_t pixels() const { return static_cast<std::size_t>(n_dis) * n_dis; }
  std::size_t rmodes() const { return static_cast<std::size_t>(n_dis) * (n_dis / 2 + 1); }
};

// Flat parameter layout, in checkpoint order:
//   w_inp [width x 11]
//   per layer: kernel block A (rows 0..m-1), kernel block B (rows n-m..n-1),
//              each [m][m][width][width] complex stored (re, im); then
//              w [width x width], b [width]
//   w_out [9 x width]
struct ParamGroup {
  std::string name;
  std::size_t offset = 0;
  std::size_t size = 0;
};

struct ParamLayout {
  std::vector<ParamGroup> groups;
  std::size_t total = 0;
};

inline ParamLayout build_layout(const FnoConfig& cfg) {
  ParamLayout lay;
  std::size_t off = 0;
  auto add = [&](const std::string& name, std::size_t size) {
    lay.groups.push_back({name, off, size});
    off += size;
  };
  const std::size_t w = cfg.width;
  const std::size_t m = cfg.modes;
  add("w_inp", w * FnoConfig::in_channels);
  for (int l = 0; l < cfg.depth; ++l) {
    std::string tag = "layer" + std::to_string(l);
    add(tag + ".kernel_a", m * m * w * w * 2);
    add(tag + ".kernel_b", m * m * w * w * 2);
    add(tag + ".w", w * w);
    add(tag + ".b", w);
  }
  add("w_out", static_cast<std::size_t>(FnoConfig::out_channels) * w);
  lay.total = off;
  return lay;
}

struct FnoModel {
  FnoConfig cfg;
  std::vector<double> theta;

  const double* group(const ParamLayout& lay, std::size_t g) const { return theta.data() + lay.groups[g].offset; }
};

inline FnoModel init_fno(const FnoConfig& cfg, std::uint64_t seed) {
  cfg.validate();
  ParamLayout lay = build_layout(cfg);
  FnoModel model;
  model.cfg = cfg;
  model.theta.assign(lay.total, 0.0);
  CounterRng rng(seed, "fno-init");
  const double lift_a = 1.0 / std::sqrt(static_cast<double>(FnoConfig::in_channels));
  const double hid_a = 1.0 / std::sqrt(static_cast<double>(cfg.width));
  const double kscale = 1.0 / (static_cast<double>(cfg.width) * cfg.width);
  for (const ParamGroup& g : lay.groups) {
    double* p = model.theta.data() + g.offset;
    if (g.name == "w_inp") {
      for (std::size_t i = 0; i < g.size; ++i) p[i] = rng.uniform(-lift_a, lift_a);
    } else if (g.name.find(".kernel") != std::string::npos) {
      for (std::size_t i = 0; i < g.size; ++i) p[i] = kscale * rng.next_unit();
    } else if (g.name.find(".w") != std::string::npos) {
      for (std::size_t i = 0; i < g.size; ++i) p[i] = rng.uniform(-hid_a, hid_a);
    } else if (g.name.find(".b") != std::string::npos) {
      // biases start at zero
    } else if (g.name == "w_out") {
      for (std::size_t i = 0; i < g.size; ++i) p[i] = rng.uniform(-hid_a, hid_a);
    }
  }
  return model;
}

// exact erf-based GeLU
inline double gelu(double x) { return 0.5 * x * (1.0 + std::erf(x * M_SQRT1_2)); }

inline double gelu_derivative(double x) {
  const double phi = std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
  return 0.5 * (1.0 + std::erf(x * M_SQRT1_2)) + x * phi;
}

struct FnoOutput {
  std::vector<double> p;  // [9][pixels]
  std::vector<double> d;  // [3][pixels], filled when divergence is requested
};

struct ForwardCache {
  std::vector<double> input;                 // [11][pixels]
  std::vector<std::vector<double>> h;        // h[0..depth], each [width][pixels]
  std::vector<std::vector<double>> pre;      // per layer pre-activation
  std::vector<std::vector<cplx>> h_hat;      // per layer spectra of the layer input
  std::vector<double> s_out;                 // [9][pixels]
  std::vector<cplx> p_hat;                   // [9][rmodes]
};

namespace fno_detail {

inline void pointwise_matmul(const double* w, const double* x, double* y, int out_ch, int in_ch,
                             std::size_t np) {
  for (int o = 0; o < out_ch; ++o) {
    double* yo = y + static_cast<std::size_t>(o) * np;
    for (std::size_t px = 0; px < np; ++px) yo[px] = 0.0;
    for (int i = 0; i < in_ch; ++i) {
      const double wij = w[o * in_ch + i];
      const double* xi = x + static_cast<std::size_t>(i) * np;
      for (std::size_t px = 0; px < np; ++px) yo[px] += wij * xi[px];
    }
  }
}

// Per-retained-mode channel mixing: out[o][mode] += sum_i K[o][i] h[i][mode].
// The kernel block layout is [row][col][o][i] with interleaved (re, im).
inline void apply_kernel_block(const double* block, const cplx* h_hat, cplx* out, int n, int m,
                               int width, bool high_rows) {
  const std::size_t rcols = static_cast<std::size_t>(n) / 2 + 1;
  for (int r = 0; r < m; ++r) {
    const int k1 = high_rows ? n - m + r : r;
    for (int c = 0; c < m; ++c) {
      const std::size_t mode = static_cast<std::size_t>(k1) * rcols + c;
      const double* kb = block + ((static_cast<std::size_t>(r) * m + c) * width * width) * 2;
      for (int o = 0; o < width; ++o) {
        cplx acc(0.0, 0.0);
        for (int i = 0; i < width; ++i) {
          const double* kk = kb + (static_cast<std::size_t>(o) * width + i) * 2;
          acc += cplx(kk[0], kk[1]) * h_hat[static_cast<std::size_t>(i) * rcols * n + mode];
        }
        out[static_cast<std::size_t>(o) * rcols * n + mode] += acc;
      }
    }
  }
}

// gradients of the kernel block and of the layer-input spectrum
inline void kernel_block_backward(const double* block, double* g_block, const cplx* h_hat,
                                  const cplx* g_conv, cplx* g_h_hat, int n, int m, int width,
                                  bool high_rows) {
  const std::size_t rcols = static_cast<std::size_t>(n) / 2 + 1;
  const std::size_t nm = rcols * n;
  for (int r = 0; r < m; ++r) {
    const int k1 = high_rows ? n - m + r : r;
    for (int c = 0; c < m; ++c) {
      const std::size_t mode = static_cast<std::size_t>(k1) * rcols + c;
      const double* kb = block + ((static_cast<std::size_t>(r) * m + c) * width * width) * 2;
      double* gb = g_block + ((static_cast<std::size_t>(r) * m + c) * width * width) * 2;
      for (int o = 0; o < width; ++o) {
        const cplx go = g_conv[static_cast<std::size_t>(o) * nm + mode];
        for (int i = 0; i < width; ++i) {
          const cplx hi = h_hat[static_cast<std::size_t>(i) * nm + mode];
          const cplx gk = go * std::conj(hi);
          double* gkk = gb + (static_cast<std::size_t>(o) * width + i) * 2;
          gkk[0] += gk.real();
          gkk[1] += gk.imag();
          const double* kk = kb + (static_cast<std::size_t>(o) * width + i) * 2;
          g_h_hat[static_cast<std::size_t>(i) * nm + mode] += std::conj(cplx(kk[0], kk[1])) * go;
        }
      }
    }
  }
}

// plane-mode cross product p_hat = ik x a_hat on one mode, channel layout as
// in the reduced arrays: only A13, A23, A31, A32 act, and the mean branch
// passes the DC coefficients of the mean channels through
inline void pe_mode_map(const cplx s_hat[9], cplx p_hat[9], double kd1, double kd2, bool dc) {
  const cplx i(0.0, 1.0);
  for (int t = 0; t < 9; ++t) p_hat[t] = cplx(0.0);
  if (dc) {
    for (int t : kPlaneMeanChannels) p_hat[t] = s_hat[t];
    return;
  }
  p_hat[0] = i * kd2 * s_hat[2];
  p_hat[1] = -i * kd1 * s_hat[2];
  p_hat[3] = i * kd2 * s_hat[5];
  p_hat[4] = -i * kd1 * s_hat[5];
  p_hat[8] = i * (kd1 * s_hat[7] - kd2 * s_hat[6]);
}

inline void pe_mode_map_adjoint(const cplx g_p[9], cplx g_s[9], double kd1, double kd2, bool dc) {
  const cplx i(0.0, 1.0);
  for (int t = 0; t < 9; ++t) g_s[t] = cplx(0.0);
  if (dc) {
    for (int t : kPlaneMeanChannels) g_s[t] = g_p[t];
    return;
  }
  g_s[2] = -i * kd2 * g_p[0] + i * kd1 * g_p[1];
  g_s[5] = -i * kd2 * g_p[3] + i * kd1 * g_p[4];
  g_s[6] = i * kd2 * g_p[8];
  g_s[7] = -i * kd1 * g_p[8];
}

}  // namespace fno_detail

// Deterministic forward pass. Input is channel-planar [11][pixels]; the
// output stress channels are [9][pixels] in row-major (11,12,...,33) order
// with plane structural zeros enforced. With want_div the spectral
// divergence d = div p is evaluated as well (always from the spectral sum
// with Nyquist-zeroed wavenumbers).
inline FnoOutput fno_forward(const FnoModel& model, const std::vector<double>& input, bool want_div,
                             ForwardCache* cache = nullptr) {
  const FnoConfig& cfg = model.cfg;
  cfg.validate();
  const std::size_t np = cfg.pixels();
  const std::size_t nm = cfg.rmodes();
  const int n = cfg.n_dis;
  const int w = cfg.width;
  if (input.size() != FnoConfig::in_channels * np) throw std::invalid_argument("fno_forward: input shape mismatch");
  ParamLayout lay = build_layout(cfg);
  std::size_t gi = 0;

  ForwardCache local;
  ForwardCache& cc = cache ? *cache : local;
  cc.input = input;
  cc.h.assign(cfg.depth + 1, {});
  cc.pre.assign(cfg.depth, {});
  cc.h_hat.assign(cfg.depth, {});

  // lifting (no bias, no activation)
  cc.h[0].assign(static_cast<std::size_t>(w) * np, 0.0);
  fno_detail::pointwise_matmul(model.group(lay, gi++), input.data(), cc.h[0].data(), w,
                               FnoConfig::in_channels, np);

  std::vector<cplx> conv_hat(static_cast<std::size_t>(w) * nm);
  std::vector<double> conv(static_cast<std::size_t>(w) * np);
  for (int l = 0; l < cfg.depth; ++l) {
    const double* ka = model.group(lay, gi++);
    const double* kb = model.group(lay, gi++);
    const double* wl = model.group(lay, gi++);
    const double* bl = model.group(lay, gi++);
    const std::vector<double>& x = cc.h[l];

    cc.h_hat[l].assign(static_cast<std::size_t>(w) * nm, cplx(0.0));
    for (int i = 0; i < w; ++i)
      plane::rfft2(x.data() + static_cast<std::size_t>(i) * np, cc.h_hat[l].data() + static_cast<std::size_t>(i) * nm, n);

    std::fill(conv_hat.begin(), conv_hat.end(), cplx(0.0));
    fno_detail::apply_kernel_block(ka, cc.h_hat[l].data(), conv_hat.data(), n, cfg.modes, w, false);
    fno_detail::apply_kernel_block(kb, cc.h_hat[l].data(), conv_hat.data(), n, cfg.modes, w, true);
    for (int o = 0; o < w; ++o)
      plane::irfft2(conv_hat.data() + static_cast<std::size_t>(o) * nm, conv.data() + static_cast<std::size_t>(o) * np, n);

    cc.pre[l].assign(static_cast<std::size_t>(w) * np, 0.0);
    fno_detail::pointwise_matmul(wl, x.data(), cc.pre[l].data(), w, w, np);
    for (int o = 0; o < w; ++o) {
      double* pre_o = cc.pre[l].data() + static_cast<std::size_t>(o) * np;
      const double* conv_o = conv.data() + static_cast<std::size_t>(o) * np;
      const double bo = bl[o];
      for (std::size_t px = 0; px < np; ++px) pre_o[px] += conv_o[px] + bo;
    }
    cc.h[l + 1].assign(static_cast<std::size_t>(w) * np, 0.0);
    for (std::size_t i = 0; i < static_cast<std::size_t>(w) * np; ++i) cc.h[l + 1][i] = gelu(cc.pre[l][i]);
  }

  // projection (no bias, no activation)
  cc.s_out.assign(9 * np, 0.0);
  fno_detail::pointwise_matmul(model.group(lay, gi++), cc.h[cfg.depth].data(), cc.s_out.data(), 9, w, np);

  FnoOutput out;
  out.p.assign(9 * np, 0.0);
  GridConfig grid{cfg.n_dis, cfg.ell_u, 2};

  if (cfg.variant == Variant::pe) {
    std::vector<cplx> s_hat(9 * nm);
    for (int t = 0; t < 9; ++t)
      plane::rfft2(cc.s_out.data() + static_cast<std::size_t>(t) * np, s_hat.data() + static_cast<std::size_t>(t) * nm, n);
    cc.p_hat.assign(9 * nm, cplx(0.0));
    for_each_mode(grid, [&](std::size_t m, const WaveVector&, const WaveVector& kd, bool dc) {
      cplx sm[9], pm[9];
      for (int t = 0; t < 9; ++t) sm[t] = s_hat[static_cast<std::size_t>(t) * nm + m];
      fno_detail::pe_mode_map(sm, pm, kd.k1, kd.k2, dc);
      for (int t = 0; t < 9; ++t) cc.p_hat[static_cast<std::size_t>(t) * nm + m] = pm[t];
    });
    for (int t = 0; t < 9; ++t)
      plane::irfft2(cc.p_hat.data() + static_cast<std::size_t>(t) * nm, out.p.data() + static_cast<std::size_t>(t) * np, n);
  } else {
    out.p = cc.s_out;
    for (int t : kPlaneZeroChannels)
      std::fill(out.p.begin() + static_cast<std::size_t>(t) * np, out.p.begin() + static_cast<std::size_t>(t + 1) * np, 0.0);
    if (want_div) {
      cc.p_hat.assign(9 * nm, cplx(0.0));
      for (int t = 0; t < 9; ++t)
        plane::rfft2(out.p.data() + static_cast<std::size_t>(t) * np, cc.p_hat.data() + static_cast<std::size_t>(t) * nm, n);
    }
  }

  if (want_div) {
    out.d.assign(3 * np, 0.0);
    std::vector<cplx> d_hat(3 * nm, cplx(0.0));
    const cplx iu(0.0, 1.0);
    for_each_mode(grid, [&](std::size_t m, const WaveVector&, const WaveVector& kd, bool dc) {
      if (dc) return;
      for (int r = 0; r < 3; ++r)
        d_hat[static_cast<std::size_t>(r) * nm + m] =
            iu * (cc.p_hat[static_cast<std::size_t>(3 * r + 0) * nm + m] * kd.k1 +
                  cc.p_hat[static_cast<std::size_t>(3 * r + 1) * nm + m] * kd.k2);
    });
    for (int r = 0; r < 3; ++r)
      plane::irfft2(d_hat.data() + static_cast<std::size_t>(r) * nm, out.d.data() + static_cast<std::size_t>(r) * np, n);
  }
  return out;
}

// Reverse-mode gradients for all parameter groups. g_p is dL/dp_out
// ([9][pixels]); g_d, when given, is dL/dd_out ([3][pixels]) and requires the
// forward pass to have been run with want_div. Gradients accumulate into
// grad (same layout as theta).
inline void fno_backward(const FnoModel& model, const ForwardCache& cc, const std::vector<double>& g_p,
                         const std::vector<double>* g_d, std::vector<double>& grad) {
  const FnoConfig& cfg = model.cfg;
  const std::size_t np = cfg.pixels();
  const std::size_t nm = cfg.rmodes();
  const int n = cfg.n_dis;
  const int w = cfg.width;
  ParamLayout lay = build_layout(cfg);
  if (grad.size() != lay.total) grad.assign(lay.total, 0.0);
  GridConfig grid{cfg.n_dis, cfg.ell_u, 2};
  const cplx iu(0.0, 1.0);

  // gradient w.r.t. the reduced stress spectrum, fed by the divergence
  // branch and (pe) by the stress synthesis
  std::vector<cplx> g_p_hat(9 * nm, cplx(0.0));
  if (g_d) {
    std::vector<cplx> g_d_hat(3 * nm);
    for (int r = 0; r < 3; ++r)
      plane::irfft2_adjoint(g_d->data() + static_cast<std::size_t>(r) * np, g_d_hat.data() + static_cast<std::size_t>(r) * nm, n);
    for_each_mode(grid, [&](std::size_t m, const WaveVector&, const WaveVector& kd, bool dc) {
      if (dc) return;
      for (int r = 0; r < 3; ++r) {
        const cplx gd = g_d_hat[static_cast<std::size_t>(r) * nm + m];
        g_p_hat[static_cast<std::size_t>(3 * r + 0) * nm + m] += -iu * kd.k1 * gd;
        g_p_hat[static_cast<std::size_t>(3 * r + 1) * nm + m] += -iu * kd.k2 * gd;
      }
    });
  }

  std::vector<double> g_s(9 * np, 0.0);
  if (cfg.variant == Variant::pe) {
    for (int t = 0; t < 9; ++t) {
      std::vector<cplx> tmp(nm);
      plane::irfft2_adjoint(g_p.data() + static_cast<std::size_t>(t) * np, tmp.data(), n);
      for (std::size_t m = 0; m < nm; ++m) g_p_hat[static_cast<std::size_t>(t) * nm + m] += tmp[m];
    }
    std::vector<cplx> g_s_hat(9 * nm, cplx(0.0));
    for_each_mode(grid, [&](std::size_t m, const WaveVector&, const WaveVector& kd, bool dc) {
      cplx gp[9], gs[9];
      for (int t = 0; t < 9; ++t) gp[t] = g_p_hat[static_cast<std::size_t>(t) * nm + m];
      fno_detail::pe_mode_map_adjoint(gp, gs, kd.k1, kd.k2, dc);
      for (int t = 0; t < 9; ++t) g_s_hat[static_cast<std::size_t>(t) * nm + m] = gs[t];
    });
    for (int t = 0; t < 9; ++t)
      plane::rfft2_adjoint(g_s_hat.data() + static_cast<std::size_t>(t) * nm, g_s.data() + static_cast<std::size_t>(t) * np, n);
  } else {
    g_s = g_p;
    if (g_d) {
      std::vector<double> extra(np);
      for (int t = 0; t < 9; ++t) {
        plane::rfft2_adjoint(g_p_hat.data() + static_cast<std::size_t>(t) * nm, extra.data(), n);
        double* gst = g_s.data() + static_cast<std::size_t>(t) * np;
        for (std::size_t px = 0; px < np; ++px) gst[px] += extra[px];
      }
    }
    for (int t : kPlaneZeroChannels)
      std::fill(g_s.begin() + static_cast<std::size_t>(t) * np, g_s.begin() + static_cast<std::size_t>(t + 1) * np, 0.0);
  }

  // projection
  std::size_t gi_out = lay.groups.size() - 1;
  const double* w_out = model.group(lay, gi_out);
  double* g_wout = grad.data() + lay.groups[gi_out].offset;
  std::vector<double> g_h(static_cast<std::size_t>(w) * np, 0.0);
  for (int t = 0; t < 9; ++t) {
    const double* gst = g_s.data() + static_cast<std::size_t>(t) * np;
    for (int c = 0; c < w; ++c) {
      const double* hc = cc.h[cfg.depth].data() + static_cast<std::size_t>(c) * np;
      double acc = 0.0;
      for (std::size_t px = 0; px < np; ++px) acc += gst[px] * hc[px];
      g_wout[t * w + c] += acc;
      const double wtc = w_out[t * w + c];
      double* ghc = g_h.data() + static_cast<std::size_t>(c) * np;
      for (std::size_t px = 0; px < np; ++px) ghc[px] += wtc * gst[px];
    }
  }

  // hidden layers in reverse
  std::vector<double> g_pre(static_cast<std::size_t>(w) * np);
  std::vector<cplx> g_conv_hat(static_cast<std::size_t>(w) * nm);
  std::vector<cplx> g_h_hat(static_cast<std::size_t>(w) * nm);
  std::vector<double> g_x(static_cast<std::size_t>(w) * np);
  for (int l = cfg.depth - 1; l >= 0; --l) {
    const std::size_t base = 1 + static_cast<std::size_t>(l) * 4;  // group index of kernel_a
    const double* ka = model.group(lay, base);
    const double* kb = model.group(lay, base + 1);
    const double* wl = model.group(lay, base + 2);
    double* g_ka = grad.data() + lay.groups[base].offset;
    double* g_kb = grad.data() + lay.groups[base + 1].offset;
    double* g_wl = grad.data() + lay.groups[base + 2].offset;
    double* g_bl = grad.data() + lay.groups[base + 3].offset;
    const std::vector<double>& x = cc.h[l];

    for (std::size_t i = 0; i < static_cast<std::size_t>(w) * np; ++i)
      g_pre[i] = g_h[i] * gelu_derivative(cc.pre[l][i]);

    for (int o = 0; o < w; ++o) {
      const double* gpo = g_pre.data() + static_cast<std::size_t>(o) * np;
      double acc = 0.0;
      for (std::size_t px = 0; px < np; ++px) acc += gpo[px];
      g_bl[o] += acc;
    }

    std::fill(g_x.begin(), g_x.end(), 0.0);
    for (int o = 0; o < w; ++o) {
      const double* gpo = g_pre.data() + static_cast<std::size_t>(o) * np;
      for (int i = 0; i < w; ++i) {
        const double* xi = x.data() + static_cast<std::size_t>(i) * np;
        double acc = 0.0;
        for (std::size_t px = 0; px < np; ++px) acc += gpo[px] * xi[px];
        g_wl[o * w + i] += acc;
        const double wij = wl[o * w + i];
        double* gxi = g_x.data() + static_cast<std::size_t>(i) * np;
        for (std::size_t px = 0; px < np; ++px) gxi[px] += wij * gpo[px];
      }
    }

    for (int o = 0; o < w; ++o)
      plane::irfft2_adjoint(g_pre.data() + static_cast<std::size_t>(o) * np, g_conv_hat.data() + static_cast<std::size_t>(o) * nm, n);
    std::fill(g_h_hat.begin(), g_h_hat.end(), cplx(0.0));
    fno_detail::kernel_block_backward(ka, g_ka, cc.h_hat[l].data(), g_conv_hat.data(), g_h_hat.data(), n,
                                      cfg.modes, w, false);
    fno_detail::kernel_block_backward(kb, g_kb, cc.h_hat[l].data(), g_conv_hat.data(), g_h_hat.data(), n,
                                      cfg.modes, w, true);
    std::vector<double> tmp(np);
    for (int i = 0; i < w; ++i) {
      plane::rfft2_adjoint(g_h_hat.data() + static_cast<std::size_t>(i) * nm, tmp.data(), n);
      double* gxi = g_x.data() + static_cast<std::size_t>(i) * np;
      for (std::size_t px = 0; px < np; ++px) gxi[px] += tmp[px];
    }
    g_h = g_x;
  }

  // lifting
  double* g_winp = grad.data() + lay.groups[0].offset;
  for (int c = 0; c < w; ++c) {
    const double* ghc = g_h.data() + static_cast<std::size_t>(c) * np;
    for (int j = 0; j < FnoConfig::in_channels; ++j) {
      const double* ij = cc.input.data() + static_cast<std::size_t>(j) * np;
      double acc = 0.0;
      for (std::size_t px = 0; px < np; ++px) acc += ghc[px] * ij[px];
      g_winp[c * FnoConfig::in_channels + j] += acc;
    }
  }
}

}  // namespace divfree
