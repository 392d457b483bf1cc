#include <catch2/catch_amalgamated.hpp>

#include <complex>

#include "divfree/rng.hpp"
#include "divfree/tensor_core.hpp"

using namespace divfree;

namespace {

cplx rand_cplx(CounterRng& rng) { return {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)}; }

ComplexMatrix3 rand_cmat(CounterRng& rng) {
  ComplexMatrix3 m;
  for (int i = 0; i < 9; ++i) m.m[i] = rand_cplx(rng);
  return m;
}

WaveVector rand_k(CounterRng& rng) {
  return {rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0), rng.uniform(-3.0, 3.0)};
}

int eps(int i, int j, int k) {
  if (i == j || j == k || i == k) return 0;
  if ((i == 0 && j == 1 && k == 2) || (i == 1 && j == 2 && k == 0) || (i == 2 && j == 0 && k == 1)) return 1;
  return -1;
}

}  // namespace

TEST_CASE("axial tensor") {
  SECTION("zero wavevector gives the zero matrix") {
    ComplexMatrix3 a = axial_tensor({0.0, 0.0, 0.0});
    for (const cplx& v : a.m) REQUIRE(v == cplx(0.0));
  }
  SECTION("unit k1 matches the component matrix") {
    ComplexMatrix3 a = axial_tensor({1.0, 0.0, 0.0});
    const cplx iu(0.0, 1.0);
    REQUIRE(a(1, 2) == -iu);
    REQUIRE(a(2, 1) == iu);
    REQUIRE(a(0, 0) == cplx(0.0));
    REQUIRE(a(0, 1) == cplx(0.0));
    REQUIRE(a(0, 2) == cplx(0.0));
    REQUIRE(a(1, 0) == cplx(0.0));
    REQUIRE(a(1, 1) == cplx(0.0));
    REQUIRE(a(2, 0) == cplx(0.0));
    REQUIRE(a(2, 2) == cplx(0.0));
  }
  SECTION("acts as i (k x b) on vectors") {
    CounterRng rng(41, "axial");
    for (int t = 0; t < 50; ++t) {
      WaveVector k = rand_k(rng);
      double b[3] = {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1)};
      double cross[3] = {k.k2 * b[2] - k.k3 * b[1], k.k3 * b[0] - k.k1 * b[2], k.k1 * b[1] - k.k2 * b[0]};
      ComplexMatrix3 a = axial_tensor(k);
      for (int r = 0; r < 3; ++r) {
        cplx got = a(r, 0) * b[0] + a(r, 1) * b[1] + a(r, 2) * b[2];
        REQUIRE(got.real() == Catch::Approx(0.0).margin(1e-14));
        REQUIRE(got.imag() == Catch::Approx(cross[r]).margin(1e-13));
      }
    }
  }
}

TEST_CASE("curl coefficient") {
  CounterRng rng(42, "curl");
  SECTION("zero mode passes through") {
    ComplexMatrix3 a = rand_cmat(rng);
    ComplexMatrix3 p = curl_coefficient(a, {0.0, 0.0, 0.0});
    for (int i = 0; i < 9; ++i) REQUIRE(p.m[i] == a.m[i]);
  }
  SECTION("matches the expanded component matrix") {
    for (int t = 0; t < 50; ++t) {
      ComplexMatrix3 a = rand_cmat(rng);
      WaveVector k = rand_k(rng);
      ComplexMatrix3 p = curl_coefficient(a, k);
      const cplx iu(0.0, 1.0);
      for (int i = 0; i < 3; ++i) {
        cplx row[3] = {iu * (k.k2 * a(i, 2) - k.k3 * a(i, 1)), iu * (k.k3 * a(i, 0) - k.k1 * a(i, 2)),
                       iu * (k.k1 * a(i, 1) - k.k2 * a(i, 0))};
        for (int j = 0; j < 3; ++j) REQUIRE(std::abs(p(i, j) - row[j]) < 1e-13);
      }
    }
  }
  SECTION("divergence of curl vanishes") {
    for (int t = 0; t < 50; ++t) {
      ComplexMatrix3 a = rand_cmat(rng);
      WaveVector k = rand_k(rng);
      ComplexMatrix3 p = curl_coefficient(a, k);
      ComplexVector3 d = div_coefficient(p, k);
      REQUIRE(d.norm2() <= 1e-13 * std::max(1.0, p.frobenius()));
    }
  }
  SECTION("complex-linear in the potential coefficient") {
    ComplexMatrix3 a = rand_cmat(rng), b = rand_cmat(rng);
    WaveVector k = rand_k(rng);
    cplx alpha = rand_cplx(rng);
    ComplexMatrix3 lhs = curl_coefficient(alpha * a + b, k);
    ComplexMatrix3 rhs = alpha * curl_coefficient(a, k) + curl_coefficient(b, k);
    for (int i = 0; i < 9; ++i) REQUIRE(std::abs(lhs.m[i] - rhs.m[i]) < 1e-13);
  }
}

TEST_CASE("inc coefficient") {
  CounterRng rng(43, "inc");
  auto rand_sym = [&]() {
    ComplexMatrix3 b = rand_cmat(rng);
    for (int r = 0; r < 3; ++r)
      for (int c = r + 1; c < 3; ++c) b(r, c) = b(c, r);
    return b;
  };
  SECTION("zero mode passes through") {
    ComplexMatrix3 b = rand_sym();
    ComplexMatrix3 t = inc_coefficient(b, {0.0, 0.0, 0.0});
    for (int i = 0; i < 9; ++i) REQUIRE(t.m[i] == b.m[i]);
  }
  SECTION("output symmetric and divergence-free") {
    for (int t = 0; t < 50; ++t) {
      ComplexMatrix3 b = rand_sym();
      WaveVector k = rand_k(rng);
      ComplexMatrix3 out = inc_coefficient(b, k);
      REQUIRE(out.symmetry_defect() <= 1e-13 * std::max(1.0, out.frobenius()));
      ComplexVector3 d = div_coefficient(out, k);
      REQUIRE(d.norm2() <= 1e-12 * std::max(1.0, out.frobenius()));
    }
  }
  SECTION("identity potential against the direct triple product") {
    ComplexMatrix3 eye;
    eye(0, 0) = eye(1, 1) = eye(2, 2) = 1.0;
    WaveVector k{1.0, 0.0, 0.0};
    ComplexMatrix3 ax = axial_tensor(k);
    ComplexMatrix3 expect = matmul(ax, matmul(eye, ax.transposed()));
    ComplexMatrix3 got = inc_coefficient(eye, k);
    for (int i = 0; i < 9; ++i) REQUIRE(std::abs(got.m[i] - expect.m[i]) < 1e-14);
    // ax(ik)ax(ik)^T for k = e1 is i^2 diag(0,1,1) = -diag(0,1,1)
    REQUIRE(std::abs(got(1, 1) - cplx(-1.0, 0.0)) < 1e-14);
    REQUIRE(std::abs(got(2, 2) - cplx(-1.0, 0.0)) < 1e-14);
    REQUIRE(std::abs(got(0, 0)) < 1e-14);
  }
  SECTION("non-symmetric potential rejected") {
    ComplexMatrix3 b = rand_cmat(rng);
    b(0, 1) = b(1, 0) + cplx(0.5, 0.0);
    REQUIRE_THROWS_AS(inc_coefficient(b, rand_k(rng)), std::invalid_argument);
  }
}

TEST_CASE("div coefficient") {
  CounterRng rng(44, "div");
  SECTION("identity times k") {
    ComplexMatrix3 eye;
    eye(0, 0) = eye(1, 1) = eye(2, 2) = 1.0;
    ComplexVector3 d = div_coefficient(eye, {1.0, 2.0, 3.0});
    REQUIRE(d[0] == cplx(0.0, 1.0));
    REQUIRE(d[1] == cplx(0.0, 2.0));
    REQUIRE(d[2] == cplx(0.0, 3.0));
  }
  SECTION("matches the expanded rows") {
    for (int t = 0; t < 50; ++t) {
      ComplexMatrix3 p = rand_cmat(rng);
      WaveVector k = rand_k(rng);
      ComplexVector3 d = div_coefficient(p, k);
      const cplx iu(0.0, 1.0);
      for (int i = 0; i < 3; ++i) {
        cplx expect = iu * (p(i, 0) * k.k1 + p(i, 1) * k.k2 + p(i, 2) * k.k3);
        REQUIRE(std::abs(d[i] - expect) < 1e-14);
      }
    }
  }
  SECTION("zero mode rejected") {
    ComplexMatrix3 p = rand_cmat(rng);
    REQUIRE_THROWS_AS(div_coefficient(p, {0.0, 0.0, 0.0}), std::domain_error);
  }
  SECTION("complex-linear in the stress coefficient") {
    ComplexMatrix3 a = rand_cmat(rng), b = rand_cmat(rng);
    WaveVector k = rand_k(rng);
    cplx alpha = rand_cplx(rng);
    ComplexVector3 lhs = div_coefficient(alpha * a + b, k);
    ComplexVector3 da = div_coefficient(a, k), db = div_coefficient(b, k);
    for (int i = 0; i < 3; ++i) REQUIRE(std::abs(lhs[i] - (alpha * da[i] + db[i])) < 1e-13);
  }
}

namespace {

// brute-force oracle: reconstruct the full fourth-order tensor from the skew
// basis and contract both ik legs
ComplexMatrix3 fourth_order_contraction(const SkewBasisMatrix& m, const WaveVector& k, bool transpose) {
  cplx kk[3] = {cplx(0.0, k.k1), cplx(0.0, k.k2), cplx(0.0, k.k3)};
  ComplexMatrix3 out;
  for (int i = 0; i < 3; ++i)
    for (int p = 0; p < 3; ++p) {
      cplx acc(0.0);
      for (int n = 0; n < 3; ++n)
        for (int q = 0; q < 3; ++q) {
          cplx kijkl(0.0);
          for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
              // K_ijkl = eps_aij eps_bkl M_ab; the transposed variant swaps the pairs
              int e1 = transpose ? eps(a, p, q) : eps(a, i, n);
              int e2 = transpose ? eps(b, i, n) : eps(b, p, q);
              kijkl += static_cast<double>(e1 * e2) * m(a, b);
            }
          acc += kijkl * kk[n] * kk[q];
        }
      out(i, p) = acc;
    }
  return out;
}

}  // namespace

TEST_CASE("riemann stress coefficient") {
  CounterRng rng(45, "riemann");
  auto rand_sym_skew = [&]() {
    SkewBasisMatrix m;
    for (int a = 0; a < 3; ++a)
      for (int b = a; b < 3; ++b) {
        cplx v = rand_cplx(rng);
        m(a, b) = v;
        m(b, a) = v;
      }
    return m;
  };
  SECTION("zero coefficient gives zero stress") {
    SkewBasisMatrix z;
    ComplexMatrix3 t = riemann_stress_coefficient(z, {1.0, 2.0, 0.5});
    for (const cplx& v : t.m) REQUIRE(v == cplx(0.0));
  }
  SECTION("symmetric and divergence-free") {
    for (int t = 0; t < 50; ++t) {
      SkewBasisMatrix m = rand_sym_skew();
      WaveVector k = rand_k(rng);
      if (k.is_zero()) continue;
      ComplexMatrix3 out = riemann_stress_coefficient(m, k);
      REQUIRE(out.symmetry_defect() <= 1e-13 * std::max(1.0, out.frobenius()));
      ComplexVector3 d = div_coefficient(out, k);
      REQUIRE(d.norm2() <= 1e-13 * std::max(1.0, out.frobenius()));
    }
  }
  SECTION("matches the full fourth-order contraction") {
    for (int t = 0; t < 20; ++t) {
      SkewBasisMatrix m = rand_sym_skew();
      WaveVector k = rand_k(rng);
      ComplexMatrix3 got = riemann_stress_coefficient(m, k);
      ComplexMatrix3 expect = fourth_order_contraction(m, k, false);
      for (int i = 0; i < 9; ++i) REQUIRE(std::abs(got.m[i] - expect.m[i]) < 1e-12);
    }
  }
  SECTION("non-symmetric coefficient rejected") {
    SkewBasisMatrix m;
    m(0, 1) = 1.0;
    REQUIRE_THROWS_AS(riemann_stress_coefficient(m, {1.0, 0.0, 0.0}), std::invalid_argument);
  }
}

TEST_CASE("non-symmetric stress coefficient") {
  CounterRng rng(46, "nonsym");
  auto rand_skew = [&]() {
    SkewBasisMatrix m;
    for (int i = 0; i < 9; ++i) m.m[i] = rand_cplx(rng);
    return m;
  };
  SECTION("zero coefficient gives zero stress") {
    SkewBasisMatrix z;
    ComplexMatrix3 p = nonsym_stress_coefficient(z, {1.0, -2.0, 0.3});
    for (const cplx& v : p.m) REQUIRE(v == cplx(0.0));
  }
  SECTION("divergence-free for any coefficient") {
    for (int t = 0; t < 50; ++t) {
      SkewBasisMatrix m = rand_skew();
      WaveVector k = rand_k(rng);
      if (k.is_zero()) continue;
      ComplexMatrix3 p = nonsym_stress_coefficient(m, k);
      ComplexVector3 d = div_coefficient(p, k);
      REQUIRE(d.norm2() <= 1e-13 * std::max(1.0, p.frobenius()));
    }
  }
  SECTION("matches the transposed fourth-order contraction") {
    for (int t = 0; t < 20; ++t) {
      SkewBasisMatrix m = rand_skew();
      WaveVector k = rand_k(rng);
      ComplexMatrix3 got = nonsym_stress_coefficient(m, k);
      ComplexMatrix3 expect = fourth_order_contraction(m, k, true);
      for (int i = 0; i < 9; ++i) REQUIRE(std::abs(got.m[i] - expect.m[i]) < 1e-12);
    }
  }
  SECTION("symmetric input reproduces the riemann construction") {
    for (int t = 0; t < 20; ++t) {
      SkewBasisMatrix m;
      for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b) {
          cplx v = rand_cplx(rng);
          m(a, b) = v;
          m(b, a) = v;
        }
      WaveVector k = rand_k(rng);
      ComplexMatrix3 lhs = nonsym_stress_coefficient(m, k);
      ComplexMatrix3 rhs = riemann_stress_coefficient(m, k);
      for (int i = 0; i < 9; ++i) REQUIRE(std::abs(lhs.m[i] - rhs.m[i]) < 1e-12);
    }
  }
}
