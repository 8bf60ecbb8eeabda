#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hup/geometry.hpp"

using namespace hup;
using namespace hup::geometry;

namespace {

// Random point on S^{2n-1}.
RVec random_sphere_point(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  RVec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = g(rng);
  return v.normalized();
}

cplx monomial(const CVec& z, const std::vector<int>& a, const std::vector<int>& b) {
  cplx v = 1.0;
  for (std::size_t j = 0; j < a.size(); ++j)
    v *= std::pow(z[static_cast<Eigen::Index>(j)], a[j]) * std::pow(std::conj(z[static_cast<Eigen::Index>(j)]), b[j]);
  return v;
}

// Exact sphere moment of z^a conj(z)^b on S^{2n-1}: 2 pi^n a!/(n-1+|a|)! when a=b.
double exact_moment(int n, const std::vector<int>& a, const std::vector<int>& b) {
  if (a != b) return 0.0;
  double num = 1.0;
  int s = 0;
  for (int v : a) {
    num *= std::tgamma(v + 1.0);
    s += v;
  }
  return 2.0 * std::pow(kPi, n) * num / std::tgamma(n + s);
}

}  // namespace

TEST_CASE("gauss rules") {
  auto g = gauss_legendre(10);
  CHECK(g.weights.sum() == doctest::Approx(2.0).epsilon(1e-14));
  double s = 0;
  for (int i = 0; i < 10; ++i) s += g.weights[i] * std::pow(g.nodes[i], 18);
  CHECK(s == doctest::Approx(2.0 / 19.0).epsilon(1e-13));

  // Jacobi with a = b = 1/2: integral of x^2 sqrt(1-x^2) = pi/8.
  auto j = gauss_jacobi(6, 0.5, 0.5);
  double t = 0;
  for (int i = 0; i < 6; ++i) t += j.weights[i] * j.nodes[i] * j.nodes[i];
  CHECK(t == doctest::Approx(kPi / 8).epsilon(1e-13));

  // (1-x) weight: integral of (1-x) x^3 over [-1,1] = -2/5.
  auto k = gauss_jacobi(4, 1.0, 0.0);
  double u = 0;
  for (int i = 0; i < 4; ++i) u += k.weights[i] * std::pow(k.nodes[i], 3);
  CHECK(u == doctest::Approx(-0.4).epsilon(1e-13));

  auto c = gauss_jacobi(5, -0.5, -0.5);
  CHECK(c.weights.sum() == doctest::Approx(kPi));
}

TEST_CASE("sphere_quadrature invariants") {
  for (int n : {1, 2, 3})
    for (int deg : {0, 3, 8}) {
      auto q = sphere_quadrature(n, 1.7, deg);
      CHECK((q.weights.array() > 0).all());
      CHECK(q.weights.sum() == doctest::Approx(q.total_mass).epsilon(1e-12));
      CHECK(q.total_mass == doctest::Approx(sphere_area(2 * n) * std::pow(1.7, 2 * n - 1)).epsilon(1e-13));
      for (Eigen::Index i = 0; i < q.size(); ++i) CHECK(std::abs(q.node(i).norm() - 1.7) < 1e-12);
    }
  auto q0 = sphere_quadrature(2, 1.0, 0);
  CHECK(q0.total_mass == doctest::Approx(2 * kPi * kPi));
  auto qn = sphere_quadrature(2, 1.0, 4, MeasureConvention::normalized);
  CHECK(qn.total_mass == 1.0);
  CHECK_THROWS(sphere_quadrature(4, 1.0, 2));
  CHECK_THROWS_AS(sphere_quadrature(3, 1.0, 60), std::length_error);
}

TEST_CASE("sphere_quadrature exactness against closed moments") {
  std::mt19937_64 rng(7);
  for (int n : {1, 2, 3}) {
    const int deg = n == 3 ? 8 : 12;
    auto q = sphere_quadrature(n, 1.0, deg);
    std::uniform_int_distribution<int> pick(0, deg);
    for (int trial = 0; trial < 200; ++trial) {
      std::vector<int> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n));
      int budget = pick(rng);
      for (int j = 0; j < n; ++j) {
        std::uniform_int_distribution<int> d(0, budget);
        a[static_cast<std::size_t>(j)] = d(rng);
        budget -= a[static_cast<std::size_t>(j)];
        std::uniform_int_distribution<int> e(0, budget);
        b[static_cast<std::size_t>(j)] = e(rng);
        budget -= b[static_cast<std::size_t>(j)];
      }
      if (trial % 3 == 0) b = a;  // make some moments nonzero
      int tot = 0;
      for (int j = 0; j < n; ++j) tot += a[static_cast<std::size_t>(j)] + b[static_cast<std::size_t>(j)];
      if (tot > deg) continue;
      cplx s = 0;
      for (Eigen::Index i = 0; i < q.size(); ++i) s += q.weights[i] * monomial(q.complex_node(i), a, b);
      CHECK(std::abs(s - exact_moment(n, a, b)) < 1e-10 * q.total_mass);
    }
  }
}

TEST_CASE("sphere_quadrature vs Monte-Carlo") {
  // |z_1|^2 |z_2|^2 on S^3 against 10^6 uniform samples.
  auto q = sphere_quadrature(2, 1.0, 6);
  double quad = 0;
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    auto z = q.complex_node(i);
    quad += q.weights[i] * std::norm(z[0]) * std::norm(z[1]);
  }
  std::mt19937_64 rng(11);
  const int N = 1000000;
  double s = 0, s2 = 0;
  for (int i = 0; i < N; ++i) {
    auto z = to_complex(random_sphere_point(4, rng));
    const double v = std::norm(z[0]) * std::norm(z[1]) * q.total_mass;
    s += v;
    s2 += v * v;
  }
  const double mean = s / N;
  const double se = std::sqrt((s2 / N - mean * mean) / N);
  CHECK(std::abs(mean - quad) < 4 * se);
}

TEST_CASE("sphere_quadrature scaling covariance") {
  auto a = sphere_quadrature(2, 1.0, 5);
  auto b = sphere_quadrature(2, 2.5, 5);
  CHECK((b.nodes - 2.5 * a.nodes).cwiseAbs().maxCoeff() < 1e-13);
  CHECK((b.weights - std::pow(2.5, 3) * a.weights).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("real sphere and geodesic rules") {
  for (int d : {2, 3, 4, 6}) {
    auto q = real_sphere_quadrature(d, 6);
    CHECK(q.weights.sum() == doctest::Approx(1.0));
    // Mean of x_1^2 over S^{d-1} is 1/d; of x_1^4 is 3/(d(d+2)).
    double m2 = 0, m4 = 0;
    for (Eigen::Index i = 0; i < q.size(); ++i) {
      m2 += q.weights[i] * std::pow(q.nodes(i, 0), 2);
      m4 += q.weights[i] * std::pow(q.nodes(i, 0), 4);
    }
    CHECK(m2 == doctest::Approx(1.0 / d).epsilon(1e-13));
    CHECK(m4 == doctest::Approx(3.0 / (d * (d + 2.0))).epsilon(1e-13));
  }
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    RVec w = random_sphere_point(4, rng);
    const double t = -0.8 + 0.35 * trial;
    auto q = geodesic_quadrature(w, t, 6);
    CHECK(q.total_mass == 1.0);
    CHECK(q.weights.sum() == doctest::Approx(1.0));
    CHECK(q.integrate([](const RVec&) { return 3.5; }) == doctest::Approx(3.5));
    CHECK(q.integrate([&](const RVec& v) { return w.dot(v); }) == doctest::Approx(t));
    for (Eigen::Index i = 0; i < q.size(); ++i) CHECK(std::abs(q.node(i).norm() - 1.0) < 1e-12);
  }
  CHECK_THROWS(geodesic_quadrature(RVec::Unit(4, 0), 1.5, 3));
  RMat F = complete_frame(RVec::Unit(4, 2));
  CHECK((F.transpose() * F - RMat::Identity(3, 3)).norm() < 1e-14);
  CHECK((F.transpose() * RVec::Unit(4, 2)).norm() < 1e-14);
}

TEST_CASE("cone samplers") {
  auto c = complex_h_cone(2, 4.0, {0.5, 1.0, 2.0});
  auto pts = sample_cone(c, 40);
  for (const auto& x : pts) {
    CHECK(c.residual(x) < 1e-10);
    for (cplx lam : {cplx(2.0), cplx(0.0, 1.0)}) CHECK(c.residual(to_real(lam * to_complex(x))) < 1e-10);
  }
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      CHECK((pts[i].normalized() - pts[j].normalized()).norm() > 0.0);

  auto c3 = complex_h_cone(3, cplx(0.0, 3.0));
  for (const auto& x : sample_cone(c3, 30)) CHECK(c3.residual(x) < 1e-10);

  auto k = armitage_cone(4, 0.5);
  for (const auto& x : sample_cone(k, 20)) {
    CHECK(std::abs(x[0] * x[0] - 0.25 * x.squaredNorm()) < 1e-10);
    CHECK(k.residual(2.0 * x) < 1e-10);
  }
  CHECK_THROWS_AS(complex_h_cone(2, 1.5), std::domain_error);

  // Deterministic given the seed.
  CHECK((sample_cone(c, 3)[2] - pts[2]).norm() == 0.0);
}

TEST_CASE("classify_armitage") {
  auto v = classify_armitage(0.5, 4, 4);
  CHECK(v[1].verdict == ArmitageVerdict::vacuous);
  CHECK(v[2].verdict == ArmitageVerdict::fails);
  auto w = classify_armitage(0.9, 4, 3);
  CHECK(w[2].verdict == ArmitageVerdict::holds);
  CHECK(w[2].min_abs_derivative == doctest::Approx(2.24));
}

TEST_CASE("regions") {
  RVec c = RVec::Zero(2);
  CHECK(region_measure(RegionSpec::disk(c, 1.0)).value == doctest::Approx(kPi));
  RVec lo(2), hi(2);
  lo << 0, 0;
  hi << 1, 2;
  CHECK(region_measure(RegionSpec::rectangle(lo, hi)).value == doctest::Approx(2.0));
  RVec c2(2);
  c2 << 3.0, 0.0;
  auto u = RegionSpec::union_of({RegionSpec::disk(c, 1.0), RegionSpec::disk(c2, 1.0)});
  auto mu = region_measure(u);
  CHECK(mu.closed_form);
  CHECK(mu.value == doctest::Approx(2 * kPi));
  CHECK(region_measure(RegionSpec::half_annulus(c, 1.0, 2.0)).value == doctest::Approx(1.5 * kPi));
  CHECK(region_measure(RegionSpec::empty(2)).value == 0.0);

  // Overlapping union: grid count with a bound covering the exact lens value.
  RVec c3(2);
  c3 << 1.0, 0.0;
  auto ov = region_measure(RegionSpec::union_of({RegionSpec::disk(c, 1.0), RegionSpec::disk(c3, 1.0)}));
  const double lens = 2.0 * std::acos(0.5) - 0.5 * std::sqrt(3.0);
  const double exact = 2 * kPi - lens;
  CHECK_FALSE(ov.closed_form);
  CHECK(std::abs(ov.value - exact) <= ov.error_bound);
  CHECK(RegionSpec::half_annulus(c, 1.0, 2.0).contains((RVec(2) << 0.0, 1.5).finished()));
  CHECK_FALSE(RegionSpec::half_annulus(c, 1.0, 2.0).contains((RVec(2) << 0.0, -1.5).finished()));
}

TEST_CASE("csv layout") {
  auto q = sphere_quadrature(1, 1.0, 1);
  std::ostringstream os;
  q.write_csv(os);
  const auto s = os.str();
  CHECK(s.rfind("c0,c1,weight\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 3);
}
