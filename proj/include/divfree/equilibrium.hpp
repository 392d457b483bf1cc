#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "divfree/microstructure.hpp"
#include "divfree/spectral_grid.hpp"
#include "divfree/tensor_core.hpp"

namespace divfree {

// Green strain E = (F^T F - I) / 2.
inline Mat3 green_strain(const Mat3& f) {
  Mat3 e = matmul(f.transposed(), f);
  e(0, 0) -= 1.0;
  e(1, 1) -= 1.0;
  e(2, 2) -= 1.0;
  return 0.5 * e;
}

// Saint-Venant-Kirchhoff first Piola-Kirchhoff stress,
// P = E*nu/((1+nu)(1-2nu)) (tr E) F + E/(1+nu) F E.
// Young's modulus enters in GPa, the stress comes out in MPa.
inline Mat3 svk_stress(double e_mod_gpa, double nu, const Mat3& f) {
  if (!(nu > 0.0 && nu < 0.5)) throw std::invalid_argument("svk_stress: need 0 < nu < 0.5");
  const double e_mpa = 1000.0 * e_mod_gpa;
  const double lam = e_mpa * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
  const double two_mu = e_mpa / (1.0 + nu);
  Mat3 gs = green_strain(f);
  Mat3 p = lam * gs.trace() * f + two_mu * matmul(f, gs);
  return p;
}

// Prescribed mean deformation gradient in plane form (F13 = F23 = F31 = F32 = 0,
// F33 = 1).
struct LoadCase {
  Mat3 f_bar = Mat3::identity();

  static LoadCase uniaxial_x2(double f22) {
    LoadCase lc;
    lc.f_bar(1, 1) = f22;
    return lc;
  }

  void validate_plane() const {
    if (f_bar(0, 2) != 0.0 || f_bar(1, 2) != 0.0 || f_bar(2, 0) != 0.0 || f_bar(2, 1) != 0.0 ||
        f_bar(2, 2) != 1.0)
      throw std::invalid_argument("LoadCase: mean deformation gradient is not in plane form");
  }
};

struct SolverConfig {
  double tol_div = 1e-8;
  int max_iter = 500;

  void validate() const {
    if (!(tol_div > 0.0)) throw std::invalid_argument("SolverConfig: tol_div must be positive");
    if (max_iter < 1) throw std::invalid_argument("SolverConfig: max_iter must be >= 1");
  }
};

struct SolveResult {
  RealTensorField2 f_field;  // deformation gradient
  RealTensorField2 p_field;  // first PK stress, MPa
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> residual_history;
};

class SolverNotConverged : public std::runtime_error {
 public:
  SolverNotConverged(double res, int iters)
      : std::runtime_error("equilibrium solver did not converge: residual " + std::to_string(res) +
                           " after " + std::to_string(iters) + " iterations"),
        last_residual(res),
        iterations(iters) {}
  double last_residual;
  int iterations;
};

namespace detail {

struct ReferenceMedium {
  double lambda0 = 0.0;
  double mu0 = 0.0;
};

// Reference Lame constants at the midpoint of the per-pixel extremes. The
// basic scheme contracts for any contrast with this choice; a reference
// built from mean E and nu can violate the 2*C0 bound once the lambda
// contrast compounds the E and nu variations, and the iteration diverges.
inline ReferenceMedium reference_from_extremes(const Microstructure& m) {
  double lam_min = 0.0, lam_max = 0.0, mu_min = 0.0, mu_max = 0.0;
  for (std::size_t p = 0; p < m.e_field.size(); ++p) {
    double e_mpa = 1000.0 * m.e_field[p];
    double nu = m.nu_field[p];
    double lam = e_mpa * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
    double mu = e_mpa / (2.0 * (1.0 + nu));
    if (p == 0) {
      lam_min = lam_max = lam;
      mu_min = mu_max = mu;
    } else {
      lam_min = std::min(lam_min, lam);
      lam_max = std::max(lam_max, lam);
      mu_min = std::min(mu_min, mu);
      mu_max = std::max(mu_max, mu);
    }
  }
  ReferenceMedium ref;
  ref.lambda0 = 0.5 * (lam_min + lam_max);
  ref.mu0 = 0.5 * (mu_min + mu_max);
  return ref;
}

// C0 : H for the isotropic reference medium acting on a non-symmetric H
inline Mat3 reference_stress(const ReferenceMedium& ref, const Mat3& h) {
  Mat3 out;
  double tr = h.trace();
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) out(r, c) = ref.mu0 * (h(r, c) + h(c, r));
  out(0, 0) += ref.lambda0 * tr;
  out(1, 1) += ref.lambda0 * tr;
  out(2, 2) += ref.lambda0 * tr;
  return out;
}

// Gamma0 applied to one polarization coefficient: with the acoustic tensor
// K_ik = mu0 |k|^2 d_ik + (lambda0 + mu0) k_i k_k of the reference medium,
// (Gamma tau)_ij = N_ip tau_pl k_l k_j, N = K^-1.
inline ComplexMatrix3 apply_green(const ReferenceMedium& ref, const ComplexMatrix3& tau,
                                  const WaveVector& k) {
  const double ksq = k.sq();
  ComplexVector3 t;  // tau . k
  for (int r = 0; r < 3; ++r) t[r] = tau(r, 0) * k.k1 + tau(r, 1) * k.k2 + tau(r, 2) * k.k3;
  // N t = (t - c (k.t) k / |k|^2) / (mu0 |k|^2), c = (lambda0+mu0)/(lambda0+2mu0)
  const double c = (ref.lambda0 + ref.mu0) / (ref.lambda0 + 2.0 * ref.mu0);
  cplx kt = t[0] * k.k1 + t[1] * k.k2 + t[2] * k.k3;
  ComplexVector3 v;
  for (int r = 0; r < 3; ++r) {
    double kr = r == 0 ? k.k1 : (r == 1 ? k.k2 : k.k3);
    v[r] = (t[r] - c * kt * kr / ksq) / (ref.mu0 * ksq);
  }
  ComplexMatrix3 out;
  for (int r = 0; r < 3; ++r) {
    out(r, 0) = v[r] * k.k1;
    out(r, 1) = v[r] * k.k2;
    out(r, 2) = v[r] * k.k3;
  }
  return out;
}

}  // namespace detail

// Basic fixed-point scheme for div P = 0 on a periodic cell: iterate
// F <- F_bar - Gamma0 * (P(F) - C0:(F - I)) with the Green operator of a
// homogeneous reference medium evaluated per mode. The Green operator is
// built from the spectral wavenumbers (Nyquist components zeroed), so a
// converged state is divergence-free in exactly the norm field_div measures.
inline SolveResult solve_equilibrium(const Microstructure& micro, const LoadCase& load,
                                     const GridConfig& grid, const SolverConfig& cfg) {
  grid.validate();
  cfg.validate();
  load.validate_plane();
  if (grid.spatial_dims != 2) throw std::invalid_argument("solve_equilibrium: plane mode only");
  if (micro.n_dis != grid.n_dis) throw std::invalid_argument("solve_equilibrium: microstructure/grid mismatch");

  const std::size_t np = grid.pixel_count();
  detail::ReferenceMedium ref = detail::reference_from_extremes(micro);

  SolveResult result;
  result.f_field = RealTensorField2(grid);
  for (std::size_t p = 0; p < np; ++p) result.f_field.set_tensor(p, load.f_bar);
  result.p_field = RealTensorField2(grid);

  const Mat3 eye = Mat3::identity();
  double denom = 0.0;  // ||mean P||_F refreshed per iteration

  for (int iter = 1; iter <= cfg.max_iter; ++iter) {
    // constitutive update and polarization
    RealTensorField2 tau(grid);
    Mat3 p_mean;
    for (std::size_t p = 0; p < np; ++p) {
      Mat3 f = result.f_field.tensor_at(p);
      Mat3 pk = svk_stress(micro.e_field[p], micro.nu_field[p], f);
      result.p_field.set_tensor(p, pk);
      for (int i = 0; i < 9; ++i) p_mean.m[i] += pk.m[i];
      tau.set_tensor(p, pk - detail::reference_stress(ref, f - eye));
    }
    for (int i = 0; i < 9; ++i) p_mean.m[i] /= static_cast<double>(np);
    denom = p_mean.frobenius();

    // residual: || ell * div P ||_rms / ||mean P||
    SpectralTensorField2 p_hat = dft_forward(result.p_field);
    double div_sq = 0.0;
    const std::size_t rcols = static_cast<std::size_t>(grid.n_dis) / 2 + 1;
    for_each_mode(grid, [&](std::size_t m, const WaveVector&, const WaveVector& kd, bool dc) {
      if (dc || kd.is_zero()) return;
      ComplexVector3 d = div_coefficient(p_hat.tensor_at(m), kd);
      std::size_t klast = m % rcols;
      double w = (klast == 0 || klast == rcols - 1) ? 1.0 : 2.0;
      div_sq += w * (std::norm(d[0]) + std::norm(d[1]) + std::norm(d[2]));
    });
    double residual = grid.ell_u * std::sqrt(div_sq) / (denom > 0.0 ? denom : 1.0);
    result.residual_history.push_back(residual);
    result.iterations = iter;
    result.residual = residual;
    if (residual <= cfg.tol_div) return result;
    if (!std::isfinite(residual)) throw SolverNotConverged(residual, iter);

    // fixed-point update through the Green operator
    SpectralTensorField2 tau_hat = dft_forward(tau);
    SpectralTensorField2 f_hat(grid);
    for_each_mode(grid, [&](std::size_t m, const WaveVector&, const WaveVector& kd, bool dc) {
      if (dc) {
        ComplexMatrix3 fbar;
        for (int i = 0; i < 9; ++i) fbar.m[i] = load.f_bar.m[i];
        f_hat.set_tensor(m, fbar);
        return;
      }
      if (kd.is_zero()) return;  // unresolvable Nyquist corner stays empty
      ComplexMatrix3 g = detail::apply_green(ref, tau_hat.tensor_at(m), kd);
      f_hat.set_tensor(m, cplx(-1.0, 0.0) * g);
    });
    result.f_field = dft_inverse(f_hat);
  }
  throw SolverNotConverged(result.residual, cfg.max_iter);
}

}  // namespace divfree
