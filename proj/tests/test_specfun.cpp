#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hup/specfun.hpp"

using namespace hup;
using namespace hup::specfun;

TEST_CASE("laguerre small cases") {
  CHECK(laguerre(0, 1.0, 2.5) == doctest::Approx(1.0));
  CHECK(std::abs(laguerre(1, 0.0, 1.0)) < 1e-15);
  CHECK(laguerre(3, 2.0, 0.0) == doctest::Approx(10.0));
  CHECK_THROWS_AS(laguerre(2, -1.0, 0.3), std::domain_error);
}

TEST_CASE("laguerre recurrence matches the binomial sum") {
  for (int k = 0; k <= 10; ++k)
    for (double nu : {0.0, 0.5, 1.0, 3.0})
      for (double x : {0.0, 0.7, 3.3, 9.0}) {
        const double a = laguerre(k, nu, x);
        const double b = laguerre_sum(k, nu, x);
        // The alternating sum loses digits; its terms in absolute value sum to L(-x).
        const double terms = laguerre_sum(k, nu, -x);
        CHECK(std::abs(a - b) <= 1e-13 * terms);
      }
}

TEST_CASE("laguerre against std::assoc_laguerre") {
  for (int k : {5, 20, 40, 60})
    for (unsigned nu : {0u, 1u, 4u})
      for (double x : {0.5, 10.0, 50.0, 150.0, 200.0}) {
        const auto v = laguerre_with_bound(k, nu, x);
        const double ref = std::assoc_laguerre(k, nu, x);
        CHECK(std::abs(v.value - ref) <= 1e-12 * std::abs(ref) + 2 * v.abs_error_bound);
        CHECK(v.abs_error_bound >= 0.0);
      }
}

TEST_CASE("laguerre three-term recurrence residual") {
  for (int k = 1; k < 40; ++k)
    for (double nu : {0.0, 1.0, 2.5})
      for (double x : {0.3, 4.0, 17.0}) {
        const double lhs = (k + 1) * laguerre(k + 1, nu, x);
        const double rhs = (2 * k + nu + 1 - x) * laguerre(k, nu, x) - (k + nu) * laguerre(k - 1, nu, x);
        const double scale = std::abs((2 * k + nu + 1 - x) * laguerre(k, nu, x)) +
                             std::abs((k + nu) * laguerre(k - 1, nu, x)) + 1e-300;
        CHECK(std::abs(lhs - rhs) <= 1e-10 * scale);
      }
}

TEST_CASE("laguerre_function values and sign changes") {
  CHECK(laguerre_function(0, 2, 0.0) == doctest::Approx(1.0));
  CHECK(laguerre_function(2, 2, 0.0) == doctest::Approx(3.0));
  CHECK(std::abs(laguerre_function(1, 1, std::sqrt(2.0))) < 1e-15);
  for (int n : {1, 2, 3})
    for (int k = 0; k <= 10; ++k) {
      int changes = 0;
      double prev = laguerre_function(k, n, 1e-3);
      const double rmax = 2.0 * std::sqrt(4.0 * k + 2.0 * n + 10.0);
      for (double r = 2e-3; r < rmax; r += 1e-3) {
        const double cur = laguerre_function(k, n, r);
        if ((cur > 0) != (prev > 0) && cur != 0.0) ++changes;
        prev = cur;
      }
      CHECK(changes == k);
    }
  CHECK(laguerre_function_scaled(1, 1, 1.0, 2.0) == doctest::Approx(laguerre_function(1, 1, std::sqrt(2.0))));
}

TEST_CASE("gegenbauer") {
  CHECK(gegenbauer(0, 1.0, 0.7) == doctest::Approx(1.0));
  CHECK(gegenbauer(1, 1.0, 0.3) == doctest::Approx(0.6));
  CHECK(std::abs(gegenbauer(2, 1.0, 0.5)) < 1e-15);
  for (int l = 0; l <= 8; ++l)
    for (int m = 1; m <= l; ++m)
      for (double beta : {0.5, 1.0, 1.5})
        for (double t : {-0.6, 0.2, 0.75}) {
          const double h = 1e-3;
          auto g = [&](double s) { return gegenbauer(l, beta, s, m - 1); };
          const double fd = (-g(t + 2 * h) + 8 * g(t + h) - 8 * g(t - h) + g(t - 2 * h)) / (12 * h);
          const double v = gegenbauer(l, beta, t, m);
          CHECK(std::abs(fd - v) <= 1e-5 * std::max(1.0, std::abs(v)));
        }
  // Against the standard-library Legendre polynomial (beta = 1/2).
  for (int l = 0; l <= 12; ++l) CHECK(gegenbauer(l, 0.5, 0.37) == doctest::Approx(std::legendre(l, 0.37)).epsilon(1e-13));
}

TEST_CASE("chebyshev") {
  for (int l = 0; l <= 10; ++l) CHECK(chebyshev_t(l, std::cos(0.4)) == doctest::Approx(std::cos(l * 0.4)).epsilon(1e-13));
}

TEST_CASE("bessel_j matches std::cyl_bessel_j") {
  CHECK(bessel_j(0.0, 0.0) == 1.0);
  CHECK(bessel_j(1.0, 0.0) == 0.0);
  CHECK(std::abs(bessel_j(0.0, 2.404825557695773)) < 1e-10);
  double worst_rel = 0.0, worst_abs = 0.0;
  for (double nu = 0.0; nu <= 30.0; nu += 0.5)
    for (double x = 0.05; x <= 100.0; x += 0.37) {
      const double ref = std::cyl_bessel_j(nu, x);
      if (std::abs(ref) < 1e-280) continue;
      const double got = bessel_j(nu, x);
      // Near a sign change only absolute accuracy against the oscillation
      // envelope is meaningful.
      const double env = std::max(std::abs(ref), std::sqrt(2.0 / (kPi * x)));
      worst_abs = std::max(worst_abs, std::abs(got - ref) / env);
      if (std::abs(ref) > 1e-2 * env) worst_rel = std::max(worst_rel, std::abs(got - ref) / std::abs(ref));
    }
  MESSAGE("worst relative error " << worst_rel << ", worst envelope error " << worst_abs);
  CHECK(worst_rel < 1e-10);
  CHECK(worst_abs < 1e-12);
}

TEST_CASE("hermite functions") {
  CHECK(hermite_function(MultiIndex{0}, RVec::Zero(1), 1.0) == doctest::Approx(0.7511255444649425));
  CHECK(hermite_function(MultiIndex{1}, RVec::Zero(1), 1.0) == 0.0);

  // Grid Gram matrix in 1-D and 2-D.
  const double h = 0.02;
  const int npts = static_cast<int>(24.0 / h) + 1;
  std::vector<RVec> vals;
  for (int i = 0; i < npts; ++i) vals.push_back(hermite_functions_1d(6, -12.0 + i * h));
  for (int a = 0; a <= 6; ++a)
    for (int b = 0; b <= 6; ++b) {
      double s = 0;
      for (const auto& v : vals) s += h * v[a] * v[b];
      CHECK(std::abs(s - (a == b ? 1.0 : 0.0)) < 1e-8);
    }
  auto idx = multi_indices_upto(2, 6);
  const double h2 = 0.1;
  const int m2 = static_cast<int>(24.0 / h2) + 1;
  RMat G = RMat::Zero(static_cast<Eigen::Index>(idx.size()), static_cast<Eigen::Index>(idx.size()));
  for (int i = 0; i < m2; ++i)
    for (int j = 0; j < m2; ++j) {
      RVec x(2);
      x << -12.0 + i * h2, -12.0 + j * h2;
      RVec v(static_cast<Eigen::Index>(idx.size()));
      for (std::size_t a = 0; a < idx.size(); ++a) v[static_cast<Eigen::Index>(a)] = hermite_function(idx[a], x, 1.0);
      G += h2 * h2 * v * v.transpose();
    }
  CHECK((G - RMat::Identity(G.rows(), G.cols())).cwiseAbs().maxCoeff() < 1e-6);

  // Scaling: phi^lambda has unit norm too.
  double s = 0;
  for (int i = 0; i < npts; ++i) {
    RVec x(1);
    x << -12.0 + i * h;
    s += h * std::pow(hermite_function(MultiIndex{3}, x, 2.0), 2);
  }
  CHECK(s == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("real_zeros") {
  auto z = real_zeros(ZeroKind::laguerre, 0.0, 1, {0.0, 10.0});
  REQUIRE(z.size() == 1);
  CHECK(z[0] == doctest::Approx(1.0).epsilon(1e-12));

  auto z2 = real_zeros(ZeroKind::laguerre, 1.0, 2, {0.0, 10.0});
  REQUIRE(z2.size() == 2);
  CHECK(z2[1] - z2[0] > 0.0);
  // L_2^1(x) = (x^2 - 6x + 6)/2
  CHECK(z2[0] == doctest::Approx(3.0 - std::sqrt(3.0)).epsilon(1e-12));

  auto b = real_zeros(ZeroKind::bessel, 1.0, 1, {0.1, 10.0});
  REQUIRE(b.size() == 1);
  CHECK(std::abs(b[0] - 3.8317) < 1e-4);
  CHECK(std::abs(std::cyl_bessel_j(1.0, b[0])) < 1e-11);

  CHECK_THROWS_AS(real_zeros(ZeroKind::bessel, 0.0, 1, {0.1, 2.0}), BracketError);

  for (int k = 1; k <= 20; ++k) {
    auto zs = real_zeros(ZeroKind::laguerre, 1.0, k, {0.0, 4.0 * k + 2.0 + 2.0});
    CHECK(static_cast<int>(zs.size()) == k);
    for (std::size_t i = 1; i < zs.size(); ++i) CHECK(zs[i] - zs[i - 1] > 1e-8);
  }
}

TEST_CASE("refine_root and binomials") {
  auto f = [](double x) { return x * x - 2.0; };
  CHECK(refine_root(f, 0.0, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK_THROWS_AS(refine_root(f, 2.0, 3.0), BracketError);
  CHECK(binomial(5.0, 3.0) == doctest::Approx(10.0));
  CHECK(binomial(3.0, 5.0) == 0.0);
  CHECK(binomial(2.5, 1.0) == doctest::Approx(2.5));
}

TEST_CASE("multi_indices ordering") {
  auto m = multi_indices(2, 2);
  REQUIRE(m.size() == 3);
  CHECK(m[0] == MultiIndex{2, 0});
  CHECK(m[1] == MultiIndex{1, 1});
  CHECK(m[2] == MultiIndex{0, 2});
  CHECK(multi_indices_upto(3, 2).size() == 10);
  CHECK_THROWS(MultiIndex{1, -1});
}
