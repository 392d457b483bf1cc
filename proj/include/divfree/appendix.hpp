#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "divfree/rng.hpp"
#include "divfree/spectral_grid.hpp"
#include "divfree/tensor_core.hpp"

namespace divfree {

// Executable checks of the appendix claims on whole periodic fields:
// the tensor Helmholtz split S = grad(phi) + curl(Phi), and the
// divergence-free stress constructions from fourth-order skew-symmetric
// coefficient fields (Riemann-symmetric and the non-symmetric relaxation).

namespace appendix_detail {

// random band-limited real tensor field: white noise low-passed to |m| <= band
inline RealTensorField2 random_smooth_field(const GridConfig& g, CounterRng& rng, int band,
                                            bool symmetric) {
  RealTensorField2 f(g);
  for (double& x : f.v) x = rng.uniform(-1.0, 1.0);
  if (symmetric) {
    for (std::size_t p = 0; p < g.pixel_count(); ++p)
      for (int r = 0; r < 3; ++r)
        for (int c = r + 1; c < 3; ++c) {
          double avg = 0.5 * (f.at(p, r, c) + f.at(p, c, r));
          f.at(p, r, c) = f.at(p, c, r) = avg;
        }
  }
  SpectralTensorField2 s = dft_forward(f);
  const int n = g.n_dis;
  for_each_mode(g, [&](std::size_t m, const WaveVector&, const WaveVector&, bool) {
    std::size_t rcols = static_cast<std::size_t>(n) / 2 + 1;
    int k1 = static_cast<int>(m / rcols);
    int k2 = static_cast<int>(m % rcols);
    int f1 = std::abs(signed_freq(k1, n));
    if (f1 > band || k2 > band) s.set_tensor(m, ComplexMatrix3{});
  });
  return dft_inverse(s);
}

inline double field_rms(const RealTensorField2& f) { return std::sqrt(grid_mean_sq(f)); }

inline double field_rms(const RealVectorField& f) { return std::sqrt(grid_mean_sq(f)); }

// gradient of a vector field (rows of `phi` hold the components in row 0..2
// of an otherwise unused tensor field): (grad phi)_ij = phi_i ik_j
inline RealTensorField2 vector_gradient(const RealTensorField2& phi_as_rows) {
  SpectralTensorField2 s = dft_forward(phi_as_rows);
  SpectralTensorField2 out(s.grid);
  const cplx iu(0.0, 1.0);
  for_each_mode(s.grid, [&](std::size_t m, const WaveVector&, const WaveVector& kd, bool dc) {
    if (dc) return;
    ComplexMatrix3 g;
    for (int i = 0; i < 3; ++i) {
      cplx phi_i = s.at(m, 0, i);  // component i stored in row 0
      g(i, 0) = iu * kd.k1 * phi_i;
      g(i, 1) = iu * kd.k2 * phi_i;
      g(i, 2) = iu * kd.k3 * phi_i;
    }
    out.set_tensor(m, g);
  });
  return dft_inverse(out);
}

}  // namespace appendix_detail

struct HelmholtzReport {
  double max_recon_rel_err = 0.0;   // spectral vs physical-space assembly of S
  double max_divfree_rel = 0.0;     // ||ell div S|| / ||S|| with phi constant
  double max_single_mode_err = 0.0; // grad of a one-mode phi vs closed form
  bool pass = false;
};

inline HelmholtzReport verify_tensor_helmholtz(int trials, std::uint64_t seed, const GridConfig& grid) {
  using namespace appendix_detail;
  CounterRng rng(seed, "appendix-helmholtz");
  HelmholtzReport rep;
  const int band = std::max(1, grid.n_dis / 4);
  for (int t = 0; t < trials; ++t) {
    RealTensorField2 phi = random_smooth_field(grid, rng, band, false);
    // keep only row 0..2 as the three components of a vector potential
    RealTensorField2 big_phi = random_smooth_field(grid, rng, band, false);

    // two routes to S: spectral assembly per mode, and whole-field operators
    RealTensorField2 grad_phi = vector_gradient(phi);
    RealTensorField2 curl_big = field_curl(big_phi);
    RealTensorField2 s_field(grid);
    for (std::size_t i = 0; i < s_field.v.size(); ++i) s_field.v[i] = grad_phi.v[i] + curl_big.v[i];

    SpectralTensorField2 phi_hat = dft_forward(phi);
    SpectralTensorField2 big_hat = dft_forward(big_phi);
    SpectralTensorField2 s_hat(grid);
    const cplx iu(0.0, 1.0);
    for_each_mode(grid, [&](std::size_t m, const WaveVector&, const WaveVector& kd, bool dc) {
      if (dc) {
        s_hat.set_tensor(m, big_hat.tensor_at(m));  // curl passes the mean through
        return;
      }
      ComplexMatrix3 acc;
      if (!kd.is_zero()) {
        for (int i = 0; i < 3; ++i) {
          cplx phi_i = phi_hat.at(m, 0, i);
          acc(i, 0) = iu * kd.k1 * phi_i;
          acc(i, 1) = iu * kd.k2 * phi_i;
          acc(i, 2) = iu * kd.k3 * phi_i;
        }
        acc = acc + matmul(big_hat.tensor_at(m), axial_tensor(kd).transposed());
      }
      s_hat.set_tensor(m, acc);
    });
    RealTensorField2 s_spectral = dft_inverse(s_hat);
    double num = 0.0;
    for (std::size_t i = 0; i < s_field.v.size(); ++i) {
      double d = s_field.v[i] - s_spectral.v[i];
      num += d * d;
    }
    double denom = grid_mean_sq(s_field) * static_cast<double>(grid.pixel_count());
    rep.max_recon_rel_err = std::max(rep.max_recon_rel_err, std::sqrt(num / (denom > 0 ? denom : 1.0)));

    // phi constant: S = curl Phi is divergence-free
    RealVectorField div_s = field_div(curl_big);
    double rel = grid.ell_u * field_rms(div_s) / std::max(field_rms(curl_big), 1e-300);
    rep.max_divfree_rel = std::max(rep.max_divfree_rel, rel);
  }

  // single-mode phi with Phi = 0: S = grad phi against the closed form
  {
    RealTensorField2 phi(grid);
    const double k1 = 2.0 * M_PI / grid.ell_u;
    const int n = grid.n_dis;
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2) {
        double x1 = grid.ell_u * i1 / n;
        phi.at(phi.pixel_index(i1, i2), 0, 1) = std::cos(k1 * x1);  // phi_2 = cos(k1 x1)
      }
    RealTensorField2 g = vector_gradient(phi);
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2) {
        std::size_t p = g.pixel_index(i1, i2);
        double x1 = grid.ell_u * i1 / n;
        double expect = -k1 * std::sin(k1 * x1);  // d phi_2 / d x1
        rep.max_single_mode_err = std::max(rep.max_single_mode_err, std::fabs(g.at(p, 1, 0) - expect));
        rep.max_single_mode_err = std::max(rep.max_single_mode_err, std::fabs(g.at(p, 1, 1)));
        rep.max_single_mode_err = std::max(rep.max_single_mode_err, std::fabs(g.at(p, 0, 0)));
      }
    rep.max_single_mode_err /= k1;
  }

  rep.pass = rep.max_recon_rel_err <= 1e-12 && rep.max_divfree_rel <= 1e-11 && rep.max_single_mode_err <= 1e-12;
  return rep;
}

struct RiemannFieldReport {
  double max_sym_defect_rel = 0.0;  // symmetric construction
  double max_sym_div_rel = 0.0;
  double max_nonsym_div_rel = 0.0;
  double max_cross_err_rel = 0.0;   // symmetric S field through both paths
  bool pass = false;
};

inline RiemannFieldReport verify_riemann_field(int trials, std::uint64_t seed, const GridConfig& grid) {
  using namespace appendix_detail;
  CounterRng rng(seed, "appendix-riemann");
  RiemannFieldReport rep;
  const int band = std::max(1, grid.n_dis / 4);
  for (int t = 0; t < trials; ++t) {
    RealTensorField2 m_sym = random_smooth_field(grid, rng, band, true);
    RealTensorField2 m_gen = random_smooth_field(grid, rng, band, false);

    auto through = [&](const RealTensorField2& m_field, bool riemann) {
      SpectralTensorField2 s = dft_forward(m_field);
      SpectralTensorField2 out(grid);
      for_each_mode(grid, [&](std::size_t m, const WaveVector&, const WaveVector& kd, bool dc) {
        if (dc || kd.is_zero()) return;  // double divergence has no mean part
        SkewBasisMatrix sb;
        ComplexMatrix3 cm = s.tensor_at(m);
        for (int i = 0; i < 9; ++i) sb.m[i] = cm.m[i];
        out.set_tensor(m, riemann ? riemann_stress_coefficient(sb, kd) : nonsym_stress_coefficient(sb, kd));
      });
      return dft_inverse(out);
    };

    RealTensorField2 t_field = through(m_sym, true);
    double t_rms = field_rms(t_field);
    double sym_defect = 0.0;
    for (std::size_t p = 0; p < grid.pixel_count(); ++p)
      for (int r = 0; r < 3; ++r)
        for (int c = r + 1; c < 3; ++c)
          sym_defect = std::max(sym_defect, std::fabs(t_field.at(p, r, c) - t_field.at(p, c, r)));
    rep.max_sym_defect_rel = std::max(rep.max_sym_defect_rel, sym_defect / std::max(t_rms, 1e-300));
    rep.max_sym_div_rel = std::max(
        rep.max_sym_div_rel, grid.ell_u * field_rms(field_div(t_field)) / std::max(t_rms, 1e-300));

    RealTensorField2 p_field = through(m_gen, false);
    rep.max_nonsym_div_rel =
        std::max(rep.max_nonsym_div_rel,
                 grid.ell_u * field_rms(field_div(p_field)) / std::max(field_rms(p_field), 1e-300));

    // the symmetric subspace must reproduce the Riemann path
    RealTensorField2 p_sym = through(m_sym, false);
    double num = 0.0;
    for (std::size_t i = 0; i < p_sym.v.size(); ++i) {
      double d = p_sym.v[i] - t_field.v[i];
      num += d * d;
    }
    rep.max_cross_err_rel = std::max(
        rep.max_cross_err_rel,
        std::sqrt(num / static_cast<double>(grid.pixel_count())) / std::max(t_rms, 1e-300));
  }
  rep.pass = rep.max_sym_defect_rel <= 1e-12 && rep.max_sym_div_rel <= 1e-11 &&
             rep.max_nonsym_div_rel <= 1e-11 && rep.max_cross_err_rel <= 1e-12;
  return rep;
}

// Numerical ranks of the per-mode linear maps at a random k != 0. The
// parameterizations expose 6 (symmetric) and 9 (general) degrees of freedom;
// the measured image dimensions are what the table reports.
struct ModeRankReport {
  int rank_curl = 0;     // A -> A ax(ik)^T
  int rank_riemann = 0;  // symmetric skew-basis -> T
  int rank_nonsym = 0;   // general skew-basis -> P
};

namespace appendix_detail {

inline int complex_rank(std::vector<cplx> a, int rows, int cols, double tol = 1e-9) {
  int rank = 0;
  for (int c = 0; c < cols && rank < rows; ++c) {
    int pivot = -1;
    double best = tol;
    for (int r = rank; r < rows; ++r) {
      double mag = std::abs(a[static_cast<std::size_t>(r) * cols + c]);
      if (mag > best) {
        best = mag;
        pivot = r;
      }
    }
    if (pivot < 0) continue;
    for (int cc = 0; cc < cols; ++cc)
      std::swap(a[static_cast<std::size_t>(pivot) * cols + cc], a[static_cast<std::size_t>(rank) * cols + cc]);
    cplx inv = 1.0 / a[static_cast<std::size_t>(rank) * cols + c];
    for (int r = rank + 1; r < rows; ++r) {
      cplx f = a[static_cast<std::size_t>(r) * cols + c] * inv;
      for (int cc = c; cc < cols; ++cc)
        a[static_cast<std::size_t>(r) * cols + cc] -= f * a[static_cast<std::size_t>(rank) * cols + cc];
    }
    ++rank;
  }
  return rank;
}

}  // namespace appendix_detail

inline ModeRankReport measure_mode_ranks(std::uint64_t seed) {
  CounterRng rng(seed, "appendix-ranks");
  WaveVector k{rng.uniform(0.5, 2.0), rng.uniform(-2.0, -0.5), rng.uniform(0.5, 2.0)};
  ModeRankReport rep;

  // columns of each map stacked as 9-vectors
  std::vector<cplx> curl_map(9 * 9, cplx(0.0));
  for (int b = 0; b < 9; ++b) {
    ComplexMatrix3 e;
    e.m[b] = 1.0;
    ComplexMatrix3 out = curl_coefficient(e, k);
    for (int r = 0; r < 9; ++r) curl_map[static_cast<std::size_t>(r) * 9 + b] = out.m[r];
  }
  rep.rank_curl = appendix_detail::complex_rank(std::move(curl_map), 9, 9);

  const int sym_pairs[6][2] = {{0, 0}, {1, 1}, {2, 2}, {0, 1}, {0, 2}, {1, 2}};
  std::vector<cplx> riemann_map(9 * 6, cplx(0.0));
  for (int b = 0; b < 6; ++b) {
    SkewBasisMatrix e;
    e(sym_pairs[b][0], sym_pairs[b][1]) = 1.0;
    e(sym_pairs[b][1], sym_pairs[b][0]) = 1.0;
    ComplexMatrix3 out = riemann_stress_coefficient(e, k);
    for (int r = 0; r < 9; ++r) riemann_map[static_cast<std::size_t>(r) * 6 + b] = out.m[r];
  }
  rep.rank_riemann = appendix_detail::complex_rank(std::move(riemann_map), 9, 6);

  std::vector<cplx> nonsym_map(9 * 9, cplx(0.0));
  for (int b = 0; b < 9; ++b) {
    SkewBasisMatrix e;
    e.m[b] = 1.0;
    ComplexMatrix3 out = nonsym_stress_coefficient(e, k);
    for (int r = 0; r < 9; ++r) nonsym_map[static_cast<std::size_t>(r) * 9 + b] = out.m[r];
  }
  rep.rank_nonsym = appendix_detail::complex_rank(std::move(nonsym_map), 9, 9);
  return rep;
}

}  // namespace divfree
