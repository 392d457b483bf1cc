#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>

#include "divfree/rng.hpp"
#include "divfree/spectral_grid.hpp"

using namespace divfree;

namespace {

RealTensorField2 random_field(const GridConfig& g, std::uint64_t seed) {
  CounterRng rng(seed, "field");
  RealTensorField2 f(g);
  for (double& x : f.v) x = rng.uniform(-1.0, 1.0);
  return f;
}

// band-limited random field for derivative identities
RealTensorField2 random_smooth(const GridConfig& g, std::uint64_t seed, bool symmetric = false) {
  RealTensorField2 f = random_field(g, seed);
  if (symmetric) {
    for (std::size_t p = 0; p < g.pixel_count(); ++p)
      for (int r = 0; r < 3; ++r)
        for (int c = r + 1; c < 3; ++c) {
          double avg = 0.5 * (f.at(p, r, c) + f.at(p, c, r));
          f.at(p, r, c) = f.at(p, c, r) = avg;
        }
  }
  return f;
}

}  // namespace

TEST_CASE("fft matches a naive DFT for assorted lengths") {
  CounterRng rng(7, "fft");
  for (std::size_t n : {2u, 3u, 4u, 6u, 8u, 10u, 12u, 16u, 20u}) {
    std::vector<cplx> x(n);
    for (cplx& v : x) v = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
    std::vector<cplx> got = x;
    fft::transform(got, false);
    for (std::size_t k = 0; k < n; ++k) {
      cplx expect(0.0);
      for (std::size_t j = 0; j < n; ++j) {
        double ang = -2.0 * M_PI * static_cast<double>(j * k) / static_cast<double>(n);
        expect += x[j] * cplx(std::cos(ang), std::sin(ang));
      }
      REQUIRE(std::abs(got[k] - expect) < 1e-11);
    }
    // inverse recovers the input up to n
    fft::transform(got, true);
    for (std::size_t j = 0; j < n; ++j) REQUIRE(std::abs(got[j] / static_cast<double>(n) - x[j]) < 1e-12);
  }
}

TEST_CASE("reciprocal grid enumeration") {
  SECTION("n=4, ell=1 per-dimension set") {
    GridConfig g{4, 1.0, 2};
    std::vector<WaveVector> ks = build_reciprocal_grid(g);
    REQUIRE(ks.size() == 16);
    std::set<long> per_dim;
    for (const WaveVector& k : ks) per_dim.insert(std::lround(k.k1 * 1e6));
    std::set<long> expect;
    for (double v : {-4.0 * M_PI, -2.0 * M_PI, 0.0, 2.0 * M_PI}) expect.insert(std::lround(v * 1e6));
    REQUIRE(per_dim == expect);
  }
  SECTION("n=2, ell=2*pi per-dimension set") {
    GridConfig g{2, 2.0 * M_PI, 2};
    std::vector<WaveVector> ks = build_reciprocal_grid(g);
    std::set<long> per_dim;
    for (const WaveVector& k : ks) per_dim.insert(std::lround(k.k1 * 1e6));
    REQUIRE(per_dim == std::set<long>{std::lround(-1e6), 0});
  }
  SECTION("zero mode appears exactly once") {
    GridConfig g{8, 2.0, 2};
    std::vector<WaveVector> ks = build_reciprocal_grid(g);
    int zeros = 0;
    for (const WaveVector& k : ks)
      if (k.is_zero()) ++zeros;
    REQUIRE(zeros == 1);
  }
  SECTION("odd n rejected") {
    GridConfig g{5, 1.0, 2};
    REQUIRE_THROWS_AS(build_reciprocal_grid(g), std::invalid_argument);
  }
}

TEST_CASE("dft forward/inverse") {
  GridConfig g{16, 1.0, 2};
  SECTION("constant field transforms to a pure DC mode") {
    RealTensorField2 f(g);
    for (std::size_t p = 0; p < g.pixel_count(); ++p) f.at(p, 0, 0) = 3.25;
    SpectralTensorField2 s = dft_forward(f);
    REQUIRE(std::abs(s.at(0, 0, 0) - cplx(3.25)) < 1e-13);
    for (std::size_t m = 1; m < g.mode_count(); ++m) REQUIRE(std::abs(s.at(m, 0, 0)) < 1e-13);
  }
  SECTION("round trip on a random field") {
    RealTensorField2 f = random_field(g, 11);
    double residue = 0.0;
    RealTensorField2 back = dft_inverse(dft_forward(f), &residue);
    double max_err = 0.0;
    for (std::size_t i = 0; i < f.v.size(); ++i) max_err = std::max(max_err, std::fabs(f.v[i] - back.v[i]));
    REQUIRE(max_err <= 1e-12);
    REQUIRE(residue <= 1e-12);
  }
  SECTION("one-period cosine along x1 puts half the amplitude in two conjugate modes") {
    RealTensorField2 f(g);
    const int n = g.n_dis;
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2)
        f.at(f.pixel_index(i1, i2), 1, 1) = std::cos(2.0 * M_PI * i1 / n);
    SpectralTensorField2 s = dft_forward(f);
    const std::size_t rcols = static_cast<std::size_t>(n) / 2 + 1;
    for_each_mode(g, [&](std::size_t m, const WaveVector&, const WaveVector&, bool) {
      int k1 = static_cast<int>(m / rcols);
      int k2 = static_cast<int>(m % rcols);
      cplx v = s.at(m, 1, 1);
      if ((k1 == 1 || k1 == n - 1) && k2 == 0) {
        REQUIRE(std::abs(v - cplx(0.5)) < 1e-13);
      } else {
        REQUIRE(std::abs(v) < 1e-13);
      }
    });
  }
  SECTION("Parseval under the forward normalization") {
    RealTensorField2 f = random_field(g, 12);
    SpectralTensorField2 s = dft_forward(f);
    double lhs = grid_mean_sq(f);
    double rhs = spectral_sq_sum(s);
    REQUIRE(std::fabs(lhs - rhs) <= 1e-12 * lhs);
  }
}

TEST_CASE("mean/fluctuation split") {
  GridConfig g{8, 2.0, 2};
  SECTION("constant field") {
    RealTensorField2 f(g);
    for (std::size_t p = 0; p < g.pixel_count(); ++p) {
      f.at(p, 0, 0) = 2.0;
      f.at(p, 1, 2) = -1.0;
    }
    auto [mean, fluct] = mean_fluctuation_split(f);
    REQUIRE(mean(0, 0) == Catch::Approx(2.0));
    REQUIRE(mean(1, 2) == Catch::Approx(-1.0));
    for (double v : fluct.v) REQUIRE(std::fabs(v) < 1e-14);
  }
  SECTION("mean matches the arithmetic average and the DC mode") {
    RealTensorField2 f = random_field(g, 13);
    auto [mean, fluct] = mean_fluctuation_split(f);
    double direct = 0.0;
    for (std::size_t p = 0; p < g.pixel_count(); ++p) direct += f.at(p, 2, 1);
    direct /= static_cast<double>(g.pixel_count());
    REQUIRE(mean(2, 1) == Catch::Approx(direct).margin(1e-14));
    SpectralTensorField2 s = dft_forward(f);
    REQUIRE(std::abs(s.at(0, 2, 1) - cplx(mean(2, 1))) < 1e-12);
    // fluctuation has zero grid average
    auto [mean2, fluct2] = mean_fluctuation_split(fluct);
    for (double v : mean2.m) REQUIRE(std::fabs(v) < 1e-13);
    (void)fluct2;
  }
}

TEST_CASE("whole-field operators") {
  GridConfig g{16, 1.5, 2};
  SECTION("div of curl vanishes") {
    RealTensorField2 a = random_smooth(g, 21);
    RealTensorField2 p = field_curl(a);
    RealVectorField d = field_div(p);
    double dmax = 0.0, pmax = 0.0;
    for (double v : d.v) dmax = std::max(dmax, std::fabs(v));
    for (double v : p.v) pmax = std::max(pmax, std::fabs(v));
    REQUIRE(dmax <= 1e-11 * pmax);
  }
  SECTION("constant potential passes through the mean branch") {
    RealTensorField2 a(g);
    for (std::size_t p = 0; p < g.pixel_count(); ++p) {
      a.at(p, 0, 1) = 1.5;
      a.at(p, 2, 2) = -0.25;
    }
    RealTensorField2 p = field_curl(a);
    for (std::size_t i = 0; i < p.v.size(); ++i) REQUIRE(p.v[i] == Catch::Approx(a.v[i]).margin(1e-13));
  }
  SECTION("single-mode potential matches the closed form") {
    // A_12 = cos(k x1): curl row 1 = (k2 A13 - k3 A12, k3 A11 - k1 A13, k1 A12 - k2 A11) * i
    // so P_13 = i k1 A12_hat synthesized back to -k1 sin? use the expanded matrix directly
    RealTensorField2 a(g);
    const int n = g.n_dis;
    const double k1 = 2.0 * M_PI / g.ell_u;
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2)
        a.at(a.pixel_index(i1, i2), 0, 1) = std::cos(k1 * g.ell_u * i1 / n);
    RealTensorField2 p = field_curl(a);
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2) {
        std::size_t px = p.pixel_index(i1, i2);
        double x1 = g.ell_u * i1 / n;
        // P = A ax(ik)^T: only column 3 of row 1 survives: P_13 = d/dx1 A_12
        REQUIRE(p.at(px, 0, 2) == Catch::Approx(-k1 * std::sin(k1 * x1)).margin(1e-12 * k1));
        REQUIRE(std::fabs(p.at(px, 0, 0)) < 1e-12 * k1);
        REQUIRE(std::fabs(p.at(px, 1, 1)) < 1e-12 * k1);
      }
  }
  SECTION("inc of a symmetric field is symmetric and divergence-free") {
    RealTensorField2 b = random_smooth(g, 22, true);
    RealTensorField2 t = field_inc(b);
    double tmax = 0.0;
    for (double v : t.v) tmax = std::max(tmax, std::fabs(v));
    for (std::size_t p = 0; p < g.pixel_count(); ++p)
      for (int r = 0; r < 3; ++r)
        for (int c = r + 1; c < 3; ++c)
          REQUIRE(std::fabs(t.at(p, r, c) - t.at(p, c, r)) <= 1e-11 * tmax);
    RealVectorField d = field_div(t);
    double dmax = 0.0;
    for (double v : d.v) dmax = std::max(dmax, std::fabs(v));
    REQUIRE(dmax <= 1e-11 * tmax);
  }
}

TEST_CASE("3D grid operators") {
  GridConfig g{8, 1.0, 3};
  SECTION("round trip") {
    RealTensorField2 f = random_field(g, 31);
    double residue = 0.0;
    RealTensorField2 back = dft_inverse(dft_forward(f), &residue);
    double max_err = 0.0;
    for (std::size_t i = 0; i < f.v.size(); ++i) max_err = std::max(max_err, std::fabs(f.v[i] - back.v[i]));
    REQUIRE(max_err <= 1e-12);
    REQUIRE(residue <= 1e-12);
  }
  SECTION("div of curl vanishes in 3D") {
    RealTensorField2 a = random_field(g, 32);
    RealTensorField2 p = field_curl(a);
    RealVectorField d = field_div(p);
    double dmax = 0.0, pmax = 0.0;
    for (double v : d.v) dmax = std::max(dmax, std::fabs(v));
    for (double v : p.v) pmax = std::max(pmax, std::fabs(v));
    REQUIRE(dmax <= 1e-11 * pmax);
  }
  SECTION("Parseval in 3D") {
    RealTensorField2 f = random_field(g, 33);
    REQUIRE(std::fabs(grid_mean_sq(f) - spectral_sq_sum(dft_forward(f))) <= 1e-12 * grid_mean_sq(f));
  }
}

TEST_CASE("processed spectra stay real through the Nyquist convention") {
  GridConfig g{8, 1.0, 2};
  RealTensorField2 a = random_field(g, 71);
  SpectralTensorField2 s = dft_forward(a);
  for_each_mode(g, [&](std::size_t m, const WaveVector&, const WaveVector& kd, bool dc) {
    if (dc || kd.is_zero()) return;
    s.set_tensor(m, curl_coefficient(s.tensor_at(m), kd));
  });
  double residue = 0.0;
  dft_inverse(s, &residue);
  REQUIRE(residue <= 1e-12 * (1.0 + 2.0 * M_PI * g.n_dis));
}

TEST_CASE("plane transform adjoints satisfy the dot-product identity") {
  const int n = 12;
  const std::size_t np = static_cast<std::size_t>(n) * n;
  const std::size_t nm = static_cast<std::size_t>(n) * (n / 2 + 1);
  CounterRng rng(55, "adjoint");

  SECTION("rfft2 vs rfft2_adjoint") {
    std::vector<double> x(np);
    for (double& v : x) v = rng.uniform(-1, 1);
    std::vector<cplx> gspec(nm);
    for (cplx& v : gspec) v = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
    std::vector<cplx> y(nm);
    plane::rfft2(x.data(), y.data(), n);
    double lhs = 0.0;
    for (std::size_t m = 0; m < nm; ++m) lhs += (std::conj(gspec[m]) * y[m]).real();
    std::vector<double> xt(np);
    plane::rfft2_adjoint(gspec.data(), xt.data(), n);
    double rhs = 0.0;
    for (std::size_t p = 0; p < np; ++p) rhs += xt[p] * x[p];
    REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-12));
  }
  SECTION("irfft2 vs irfft2_adjoint") {
    std::vector<cplx> spec(nm);
    for (cplx& v : spec) v = cplx(rng.uniform(-1, 1), rng.uniform(-1, 1));
    std::vector<double> g(np);
    for (double& v : g) v = rng.uniform(-1, 1);
    std::vector<double> y(np);
    plane::irfft2(spec.data(), y.data(), n);
    double lhs = 0.0;
    for (std::size_t p = 0; p < np; ++p) lhs += g[p] * y[p];
    std::vector<cplx> gt(nm);
    plane::irfft2_adjoint(g.data(), gt.data(), n);
    double rhs = 0.0;
    for (std::size_t m = 0; m < nm; ++m) rhs += (std::conj(gt[m]) * spec[m]).real();
    REQUIRE(lhs == Catch::Approx(rhs).epsilon(1e-12));
  }
}
