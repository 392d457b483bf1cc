#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <stdexcept>

namespace divfree {

using cplx = std::complex<double>;

// Angular wavenumber triple (units 1/length). k3 stays 0 in plane mode.
struct WaveVector {
  double k1 = 0.0, k2 = 0.0, k3 = 0.0;

  bool is_zero() const { return k1 == 0.0 && k2 == 0.0 && k3 == 0.0; }
  double sq() const { return k1 * k1 + k2 * k2 + k3 * k3; }
  double operator[](int d) const { return d == 0 ? k1 : (d == 1 ? k2 : k3); }
};

struct Mat3 {
  std::array<double, 9> m{};

  double& operator()(int r, int c) { return m[3 * r + c]; }
  double operator()(int r, int c) const { return m[3 * r + c]; }

  static Mat3 identity() {
    Mat3 out;
    out(0, 0) = out(1, 1) = out(2, 2) = 1.0;
    return out;
  }

  Mat3 transposed() const {
    Mat3 out;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) out(r, c) = (*this)(c, r);
    return out;
  }

  double trace() const { return m[0] + m[4] + m[8]; }

  double frobenius() const {
    double s = 0.0;
    for (double x : m) s += x * x;
    return std::sqrt(s);
  }
};

inline Mat3 operator+(const Mat3& a, const Mat3& b) {
  Mat3 out;
  for (int i = 0; i < 9; ++i) out.m[i] = a.m[i] + b.m[i];
  return out;
}

inline Mat3 operator-(const Mat3& a, const Mat3& b) {
  Mat3 out;
  for (int i = 0; i < 9; ++i) out.m[i] = a.m[i] - b.m[i];
  return out;
}

inline Mat3 operator*(double s, const Mat3& a) {
  Mat3 out;
  for (int i = 0; i < 9; ++i) out.m[i] = s * a.m[i];
  return out;
}

inline Mat3 matmul(const Mat3& a, const Mat3& b) {
  Mat3 out;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      double s = 0.0;
      for (int j = 0; j < 3; ++j) s += a(r, j) * b(j, c);
      out(r, c) = s;
    }
  return out;
}

// One Fourier coefficient of a second-order tensor field.
struct ComplexMatrix3 {
  std::array<cplx, 9> m{};

  cplx& operator()(int r, int c) { return m[3 * r + c]; }
  cplx operator()(int r, int c) const { return m[3 * r + c]; }

  ComplexMatrix3 transposed() const {
    ComplexMatrix3 out;
    for (int r = 0; r < 3; ++r)
      for (int c = 0; c < 3; ++c) out(r, c) = (*this)(c, r);
    return out;
  }

  double frobenius() const {
    double s = 0.0;
    for (const cplx& x : m) s += std::norm(x);
    return std::sqrt(s);
  }

  double symmetry_defect() const {
    double s = 0.0;
    for (int r = 0; r < 3; ++r)
      for (int c = r + 1; c < 3; ++c) s += std::norm((*this)(r, c) - (*this)(c, r));
    return std::sqrt(2.0 * s);
  }

  bool is_symmetric(double rel_tol = 1e-12) const {
    double f = frobenius();
    return symmetry_defect() <= rel_tol * (f > 0.0 ? f : 1.0);
  }
};

inline ComplexMatrix3 operator+(const ComplexMatrix3& a, const ComplexMatrix3& b) {
  ComplexMatrix3 out;
  for (int i = 0; i < 9; ++i) out.m[i] = a.m[i] + b.m[i];
  return out;
}

inline ComplexMatrix3 operator-(const ComplexMatrix3& a, const ComplexMatrix3& b) {
  ComplexMatrix3 out;
  for (int i = 0; i < 9; ++i) out.m[i] = a.m[i] - b.m[i];
  return out;
}

inline ComplexMatrix3 operator*(const cplx& s, const ComplexMatrix3& a) {
  ComplexMatrix3 out;
  for (int i = 0; i < 9; ++i) out.m[i] = s * a.m[i];
  return out;
}

inline ComplexMatrix3 matmul(const ComplexMatrix3& a, const ComplexMatrix3& b) {
  ComplexMatrix3 out;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      cplx s = 0.0;
      for (int j = 0; j < 3; ++j) s += a(r, j) * b(j, c);
      out(r, c) = s;
    }
  return out;
}

struct ComplexVector3 {
  std::array<cplx, 3> v{};

  cplx& operator[](int i) { return v[i]; }
  cplx operator[](int i) const { return v[i]; }

  double norm2() const { return std::sqrt(std::norm(v[0]) + std::norm(v[1]) + std::norm(v[2])); }
};

// 3x3 representation of a fourth-order tensor with left and right minor
// skew-symmetry. Convention: K_ijkl = sum_{a,b} eps_aij eps_bkl M_ab, where
// eps is the permutation symbol and M is the stored matrix. Under this
// convention the Riemann (major-symmetric) case corresponds to M symmetric
// (6 independent entries); the general case has all 9 entries free.
struct SkewBasisMatrix {
  std::array<cplx, 9> m{};

  cplx& operator()(int a, int b) { return m[3 * a + b]; }
  cplx operator()(int a, int b) const { return m[3 * a + b]; }

  double frobenius() const {
    double s = 0.0;
    for (const cplx& x : m) s += std::norm(x);
    return std::sqrt(s);
  }

  bool is_symmetric(double rel_tol = 1e-12) const {
    double s = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = a + 1; b < 3; ++b) s += std::norm((*this)(a, b) - (*this)(b, a));
    double f = frobenius();
    return std::sqrt(2.0 * s) <= rel_tol * (f > 0.0 ? f : 1.0);
  }
};

constexpr double kSymmetryRelTol = 1e-12;

// ax(ik): the axial tensor of ik, i.e. i * [[0,-k3,k2],[k3,0,-k1],[-k2,k1,0]].
inline ComplexMatrix3 axial_tensor(const WaveVector& k) {
  const cplx i(0.0, 1.0);
  ComplexMatrix3 out;
  out(0, 1) = -i * k.k3;
  out(0, 2) = i * k.k2;
  out(1, 0) = i * k.k3;
  out(1, 2) = -i * k.k1;
  out(2, 0) = -i * k.k2;
  out(2, 1) = i * k.k1;
  return out;
}

// Mode coefficient of the tensor curl: P_hat = A_hat ax(ik)^T for k != 0,
// and the mean passes through unchanged at k = 0.
inline ComplexMatrix3 curl_coefficient(const ComplexMatrix3& a_hat, const WaveVector& k) {
  if (k.is_zero()) return a_hat;
  return matmul(a_hat, axial_tensor(k).transposed());
}

// Mode coefficient of the incompatibility operator:
// T_hat = ax(ik) B_hat ax(ik)^T for k != 0, B_hat passes through at k = 0.
// B_hat must be symmetric; the result is then symmetric as well.
inline ComplexMatrix3 inc_coefficient(const ComplexMatrix3& b_hat, const WaveVector& k) {
  if (!b_hat.is_symmetric(kSymmetryRelTol))
    throw std::invalid_argument("inc_coefficient: potential coefficient is not symmetric");
  if (k.is_zero()) return b_hat;
  ComplexMatrix3 ax = axial_tensor(k);
  return matmul(ax, matmul(b_hat, ax.transposed()));
}

// Mode coefficient of the stress divergence: d_hat = P_hat * (ik). The zero
// mode carries no divergence and is rejected.
inline ComplexVector3 div_coefficient(const ComplexMatrix3& p_hat, const WaveVector& k) {
  if (k.is_zero()) throw std::domain_error("div_coefficient: zero mode has no divergence");
  const cplx i(0.0, 1.0);
  ComplexVector3 out;
  for (int r = 0; r < 3; ++r)
    out[r] = i * (p_hat(r, 0) * k.k1 + p_hat(r, 1) * k.k2 + p_hat(r, 2) * k.k3);
  return out;
}

namespace detail {

// C_am = eps_amn k_n, i.e. the matrix of b -> b x k. Contracting the two ik
// legs of the fourth-order constructions against this matrix gives the
// stress coefficient as a 3x3 product; the i*i factor supplies the minus.
inline ComplexMatrix3 cross_contraction_matrix(const WaveVector& k) {
  ComplexMatrix3 c;
  c(0, 1) = k.k3;
  c(0, 2) = -k.k2;
  c(1, 0) = -k.k3;
  c(1, 2) = k.k1;
  c(2, 0) = k.k2;
  c(2, 1) = -k.k1;
  return c;
}

}  // namespace detail

// Symmetric divergence-free stress coefficient from a Riemann-symmetric
// fourth-order coefficient given in the skew basis: T_hat = -C^T K_hat C.
inline ComplexMatrix3 riemann_stress_coefficient(const SkewBasisMatrix& k_hat, const WaveVector& k) {
  if (!k_hat.is_symmetric(kSymmetryRelTol))
    throw std::invalid_argument("riemann_stress_coefficient: skew-basis coefficient is not symmetric");
  ComplexMatrix3 c = detail::cross_contraction_matrix(k);
  ComplexMatrix3 mk;
  for (int i = 0; i < 9; ++i) mk.m[i] = k_hat.m[i];
  return cplx(-1.0, 0.0) * matmul(c.transposed(), matmul(mk, c));
}

// Non-symmetric generalization: all 9 skew-basis entries are free and the
// resulting P_hat = -C^T S_hat^T C is divergence-free but not symmetric.
inline ComplexMatrix3 nonsym_stress_coefficient(const SkewBasisMatrix& s_hat, const WaveVector& k) {
  ComplexMatrix3 c = detail::cross_contraction_matrix(k);
  ComplexMatrix3 mt;
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) mt(a, b) = s_hat(b, a);
  return cplx(-1.0, 0.0) * matmul(c.transposed(), matmul(mt, c));
}

}  // namespace divfree
