#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hup/harmonics.hpp"
#include "hup/specfun.hpp"

using namespace hup;
using namespace hup::harmonics;

namespace {

RVec random_unit(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  RVec v(d);
  for (int i = 0; i < d; ++i) v[i] = g(rng);
  return v.normalized();
}

CVec random_z(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVec z(n);
  for (int i = 0; i < n; ++i) z[i] = cplx(g(rng), g(rng));
  return z;
}

// Real Laplacian by second differences in all 2n coordinates.
cplx fd_laplacian(const BigradedPolynomial& P, const CVec& z) {
  const double h = 1e-3;
  const RVec x = to_real(z);
  cplx s = 0.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    RVec a = x, b = x;
    a[k] += h;
    b[k] -= h;
    s += (P.eval_real(a) - 2.0 * P.eval_real(x) + P.eval_real(b)) / (h * h);
  }
  return s;
}

}  // namespace

TEST_CASE("basis dimensions") {
  CHECK(harmonic_basis(2, 1, 0).size() == 2);
  CHECK(harmonic_basis(2, 1, 1).size() == 3);
  for (int n : {1, 2, 3})
    for (int p = 0; p <= 3; ++p)
      for (int q = 0; q <= 3; ++q) {
        if (n == 1 && std::min(p, q) > 0) {
          CHECK_THROWS(harmonic_basis(n, p, q));
          continue;
        }
        CHECK(harmonic_basis(n, p, q).size() == harmonic_dimension(n, p, q));
      }
}

TEST_CASE("basis elements are harmonic and homogeneous") {
  std::mt19937_64 rng(5);
  const auto B = harmonic_basis(2, 2, 1);
  for (const auto& Y : B.elements) {
    CHECK(Y.harmonic());
    CHECK(Y.laplacian().coeffs().cwiseAbs().maxCoeff() < 1e-12);
    for (int t = 0; t < 100; ++t) {
      const CVec z = random_z(2, rng) * 0.5;
      const cplx lap = fd_laplacian(Y, z);
      CHECK(std::abs(lap) < 1e-5);
    }
  }
  // Symbolic vs finite-difference Laplacian on a non-harmonic polynomial.
  BigradedPolynomial P(2, 1, 1);
  CVec c = CVec::Zero(4);
  c[0] = 1.0;  // z1 conj(z1)
  P = BigradedPolynomial(2, 1, 1, c);
  const CVec z = random_z(2, rng);
  CHECK(std::abs(P.laplacian()(CVec::Zero(2)) - 4.0) < 1e-14);
  CHECK(std::abs(fd_laplacian(P, z) - 4.0) < 1e-6);

  const auto& Y = B.elements[1];
  for (int t = 0; t < 20; ++t) {
    const CVec w = random_z(2, rng);
    const cplx lam(0.7, -1.3);
    const cplx expect = std::pow(lam, 2) * std::conj(lam) * Y(w);
    CHECK(std::abs(Y(lam * w) - expect) < 1e-12 * std::max(1.0, std::abs(expect)));
  }
}

TEST_CASE("basis Gram is identity") {
  for (int n : {2, 3})
    for (auto [p, q] : std::vector<std::pair<int, int>>{{1, 0}, {1, 1}, {2, 1}, {0, 3}, {2, 2}}) {
      const auto B = harmonic_basis(n, p, q);
      const auto rule = geometry::sphere_quadrature(n, 1.0, 2 * (p + q) + 2);
      CMat G = CMat::Zero(B.size(), B.size());
      for (Eigen::Index i = 0; i < rule.size(); ++i) {
        const CVec v = B.evaluate(rule.complex_node(i));
        G += rule.weights[i] * v * v.adjoint();
      }
      CHECK((G - CMat::Identity(B.size(), B.size())).cwiseAbs().maxCoeff() < 1e-10);
    }
  // Harmonics of nonzero degree have mean zero.
  const auto B = harmonic_basis(2, 2, 1);
  const auto rule = geometry::sphere_quadrature(2, 1.0, 3);
  for (const auto& Y : B.elements) {
    cplx s = 0.0;
    for (Eigen::Index i = 0; i < rule.size(); ++i) s += rule.weights[i] * Y(rule.complex_node(i));
    CHECK(std::abs(s) < 1e-10);
  }
}

TEST_CASE("sphere function views agree") {
  std::mt19937_64 rng(9);
  const auto f = random_band_limited(2, 3, rng);
  const auto rule = geometry::cached_sphere_quadrature(2, 1.0, 6);
  CVec vals(rule->size());
  for (Eigen::Index i = 0; i < rule->size(); ++i) vals[i] = f(rule->complex_node(i));
  const auto g = SphereFunction::from_samples(2, 3, rule, vals);
  CHECK(g.has_coefficients());
  CHECK(g.has_samples());
  for (int t = 0; t < 10; ++t) {
    const CVec z = to_complex(random_unit(4, rng));
    CHECK(std::abs(f(z) - g(z)) < 1e-12);
  }
  for (const auto& [pq, c] : f.coefficients()) CHECK((c - g.coefficients().at(pq)).norm() < 1e-12);
  CHECK_THROWS(SphereFunction::from_samples(2, 4, rule, vals));
}

TEST_CASE("zonal harmonics") {
  std::mt19937_64 rng(21);
  const RVec xi = random_unit(4, rng);
  CHECK(zonal(0, 4, xi, random_unit(4, rng)) == doctest::Approx(1.0 / (2 * kPi * kPi)).epsilon(1e-12));
  for (int l = 0; l <= 6; ++l) {
    const auto cal = zonal_calibration(l, 4);
    MESSAGE("l=" << l << " c=" << cal.constant << " closed=" << cal.closed_form << " residual=" << cal.residual);
    CHECK(cal.constant == doctest::Approx(cal.closed_form).epsilon(1e-10));
    CHECK(cal.residual < 1e-10);
  }
  for (int l = 0; l <= 4; ++l) {
    CHECK(zonal_calibration(l, 2).constant == doctest::Approx(zonal_calibration(l, 2).closed_form).epsilon(1e-10));
    CHECK(zonal_calibration(l, 6).constant == doctest::Approx(zonal_calibration(l, 6).closed_form).epsilon(1e-10));
  }

  // Reproducing property on fresh harmonics.
  for (int trial = 0; trial < 3; ++trial) {
    const int l = 3;
    std::vector<BigradedPolynomial> parts;
    for (auto [p, q] : bidegrees_exact(2, l)) parts.push_back(random_harmonic(2, p, q, rng));
    auto Y = [&](const CVec& z) {
      cplx s = 0.0;
      for (const auto& P : parts) s += P(z);
      return s;
    };
    const auto rule = geometry::sphere_quadrature(2, 1.0, 2 * l);
    const RVec x = random_unit(4, rng);
    cplx s = 0.0;
    for (Eigen::Index i = 0; i < rule.size(); ++i) s += rule.weights[i] * zonal(l, 4, x, rule.node(i)) * Y(rule.complex_node(i));
    CHECK(std::abs(s - Y(to_complex(x))) < 1e-8);
  }

  // Rotation invariance.
  Eigen::HouseholderQR<RMat> qr(RMat::Random(4, 4));
  const RMat R = qr.householderQ();
  for (int t = 0; t < 5; ++t) {
    const RVec a = random_unit(4, rng), b = random_unit(4, rng);
    CHECK(std::abs(zonal(4, 4, R * a, R * b) - zonal(4, 4, a, b)) < 1e-10);
  }
}

TEST_CASE("projections") {
  std::mt19937_64 rng(33);
  const auto Y11 = SphereFunction::from_polynomial(random_harmonic(2, 1, 1, rng));
  const RVec xi = random_unit(4, rng);
  CHECK(std::abs(project_l(Y11, 2, xi) - Y11.eval_real(xi)) < 1e-10);
  CHECK(std::abs(project_l(Y11, 1, xi)) < 1e-9);
  CHECK(std::abs(project_l(Y11, 3, xi)) < 1e-9);

  Diagnostics d;
  project_l(Y11, 2, xi, &d, 1);
  CHECK(d.warnings.size() == 1);

  const auto f = random_band_limited(2, 3, rng);
  for (int t = 0; t < 20; ++t) {
    const RVec x = random_unit(4, rng);
    cplx s = 0.0;
    for (int l = 0; l <= 3; ++l) s += project_l(f, l, x);
    CHECK(std::abs(s - f.eval_real(x)) < 1e-8);
  }

  const auto same = project_pq(Y11, 1, 1);
  const auto other = project_pq(Y11, 2, 0);
  for (int t = 0; t < 5; ++t) {
    const RVec x = random_unit(4, rng);
    CHECK(std::abs(same.eval_real(x) - Y11.eval_real(x)) < 1e-9);
    CHECK(std::abs(other.eval_real(x)) < 1e-9);
  }

  const auto A = random_harmonic(2, 2, 0, rng);
  const auto B = random_harmonic(2, 0, 2, rng);
  const auto mix = SphereFunction::from_callable(2, 2, [&](const CVec& z) { return A(z) + B(z); });
  const auto pa = project_pq(mix, 2, 0);
  const auto pb = project_pq(mix, 0, 2);
  for (int t = 0; t < 5; ++t) {
    const CVec z = to_complex(random_unit(4, rng));
    CHECK(std::abs(pa(z) - A(z)) < 1e-8);
    CHECK(std::abs(pb(z) - B(z)) < 1e-8);
  }
  CHECK_THROWS(project_pq(mix, 1, 1, 4));

  // Completeness: sum of (p,q) components reconstructs f.
  const auto g = random_band_limited(2, 2, rng);
  std::vector<SphereFunction> comps;
  for (auto [p, q] : bidegrees(2, 2)) comps.push_back(project_pq(g, p, q));
  for (int t = 0; t < 5; ++t) {
    const CVec z = to_complex(random_unit(4, rng));
    cplx s = 0.0;
    for (const auto& c : comps) s += c(z);
    CHECK(std::abs(s - g(z)) < 1e-8);
  }
}

TEST_CASE("funk-hecke") {
  const auto one = [](double) { return 1.0; };
  for (int l = 1; l <= 4; ++l) CHECK(std::abs(funk_hecke(one, l, 2)) < 1e-10);
  CHECK(funk_hecke(one, 0, 2) == doctest::Approx(2 * kPi * kPi).epsilon(1e-12));
  CHECK(funk_hecke(one, 0, 1) == doctest::Approx(2 * kPi).epsilon(1e-12));
  for (int l = 0; l <= 5; ++l) {
    const auto cal = funk_hecke_calibration(l, 2);
    CHECK(cal.alpha == doctest::Approx(cal.closed_form).epsilon(1e-9));
  }

  std::mt19937_64 rng(44);
  const auto F = [](double t) { return t; };
  const double C1 = funk_hecke(F, 1, 2);
  const auto rule = geometry::sphere_quadrature(2, 1.0, 4);
  for (int trial = 0; trial < 5; ++trial) {
    const int p = trial % 2;
    const auto Y = random_harmonic(2, p, 1 - p, rng);
    const RVec xi = random_unit(4, rng);
    cplx s = 0.0;
    for (Eigen::Index i = 0; i < rule.size(); ++i) s += rule.weights[i] * xi.dot(rule.node(i)) * Y(rule.complex_node(i));
    const cplx ratio = s / Y.eval_real(xi);
    CHECK(std::abs(ratio - C1) < 1e-8 * std::abs(C1));
  }
  // Circle: F(t) = t gives C_1 = pi.
  CHECK(funk_hecke(F, 1, 1) == doctest::Approx(kPi).epsilon(1e-12));
}

TEST_CASE("cesaro weights") {
  CHECK(cesaro_weight(0, 7, 2.5) == doctest::Approx(1.0));
  CHECK(cesaro_weight(7, 7, 2.0) == doctest::Approx(1.0 / 36.0));
  for (int m = 1; m <= 20; ++m)
    for (int l = 1; l <= m; ++l) {
      const double w = cesaro_weight(l, m, 2.0);
      CHECK(w < cesaro_weight(l - 1, m, 2.0));
      CHECK(w > 0.0);
      CHECK(w <= 1.0);
    }
  CHECK_THROWS(cesaro_weight(3, 2, 2.0));
}

TEST_CASE("geodesic means") {
  std::mt19937_64 rng(55);
  const RVec w = random_unit(4, rng);
  const auto c = SphereFunction::from_callable(2, 0, [](const CVec&) { return cplx(2.5); });
  CHECK(std::abs(geodesic_mean(c, w, 0.3) - 2.5) < 1e-14);

  // Slicing: int f~(w,t) (1-t^2)^{1/2} dt is proportional to the sphere mean (zero here).
  const auto Y = SphereFunction::from_polynomial(random_harmonic(2, 2, 1, rng));
  const auto g = geometry::gauss_jacobi(20, 0.5, 0.5);
  cplx s = 0.0;
  for (Eigen::Index i = 0; i < g.nodes.size(); ++i) s += g.weights[i] * geodesic_mean(Y, w, g.nodes[i]);
  CHECK(std::abs(s) < 1e-8);
}

TEST_CASE("vanishing geodesic means iff vanishing projections") {
  std::mt19937_64 rng(66);
  const int L = 3;
  const RVec w = random_unit(4, rng);
  int agree = 0;
  for (int trial = 0; trial < 10; ++trial) {
    auto f = random_band_limited(2, L, rng);
    std::vector<cplx> proj(L + 1);
    for (int l = 0; l <= L; ++l) proj[static_cast<std::size_t>(l)] = project_l(f, l, w);
    // Remove the zonal parts at w for the annihilated variant.
    auto g = SphereFunction::from_callable(2, L, [=](const CVec& z) {
      cplx v = f(z);
      for (int l = 0; l <= L; ++l)
        v -= proj[static_cast<std::size_t>(l)] / zonal_profile(l, 4, 1.0) * zonal_profile(l, 4, w.dot(to_real(z)));
      return v;
    });
    for (const auto* h : {&f, &g}) {
      double pmax = 0.0, mmax = 0.0;
      for (int l = 0; l <= L; ++l) pmax = std::max(pmax, std::abs(project_l(*h, l, w)));
      for (int k = 0; k < 20; ++k) mmax = std::max(mmax, std::abs(geodesic_mean(*h, w, -0.95 + 0.1 * k)));
      const bool pz = pmax < 1e-7, mz = mmax < 1e-7;
      CHECK(pz == mz);
      if (h == &g) CHECK(pz);
      if (pz == mz) ++agree;
    }
  }
  CHECK(agree == 20);
}

TEST_CASE("basis csv export") {
  std::ostringstream os;
  harmonic_basis(2, 1, 0).write_csv(os);
  const auto s = os.str();
  CHECK(s.rfind("p,q,j,alpha,beta,re,im\n", 0) == 0);
  CHECK(s.find("1;0") != std::string::npos);
}
