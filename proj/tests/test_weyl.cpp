#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hup/transforms.hpp"
#include "hup/weyl.hpp"

using namespace hup;
using namespace hup::weyl;
using geometry::RegionSpec;

namespace {

RVec origin() { return RVec::Zero(2); }

CVec c1(cplx z) {
  CVec v(1);
  v[0] = z;
  return v;
}

}  // namespace

TEST_CASE("fourier_wigner basics") {
  CHECK(std::abs(fourier_wigner(MultiIndex{0}, MultiIndex{0}, c1(0.0)) - 1.0 / std::sqrt(2.0 * kPi)) < 1e-14);
  CHECK(std::abs(fourier_wigner(MultiIndex{0, 0}, MultiIndex{0, 0}, CVec::Zero(2)) - 1.0 / (2.0 * kPi)) < 1e-14);

  // log|V| + |w|^2/4 is linear in log|w| with slope |alpha| along a ray
  for (int a : {1, 3}) {
    std::vector<double> xs, ys;
    for (double t = 0.5; t <= 3.0; t += 0.25) {
      const cplx w = std::polar(t, 0.7);
      xs.push_back(std::log(t));
      ys.push_back(std::log(std::abs(fourier_wigner(MultiIndex{0}, MultiIndex{a}, c1(w)))) + t * t / 4.0);
    }
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) mx += xs[i] / xs.size(), my += ys[i] / ys.size();
    double sxy = 0, sxx = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) sxy += (xs[i] - mx) * (ys[i] - my), sxx += (xs[i] - mx) * (xs[i] - mx);
    CHECK(sxy / sxx == doctest::Approx(a).epsilon(1e-3));
  }
}

TEST_CASE("Fourier–Wigner orthogonality relation on a grid") {
  // int V(f1, g1) conj V(f2, g2) = <f1, f2> conj<g1, g2>
  struct Pair { int f1, g1, f2, g2; };
  const double h = 0.15, R = 10.5;
  for (const auto& p : {Pair{0, 0, 0, 0}, Pair{1, 2, 1, 2}, Pair{2, 1, 1, 2}, Pair{3, 0, 3, 1}}) {
    cplx acc = 0.0;
    for (double x = -R; x <= R; x += h)
      for (double y = -R; y <= R; y += h) {
        const CVec z = c1(cplx(x, y));
        acc += fourier_wigner(MultiIndex{p.f1}, MultiIndex{p.g1}, z) *
               std::conj(fourier_wigner(MultiIndex{p.f2}, MultiIndex{p.g2}, z));
      }
    const double expected = (p.f1 == p.f2 && p.g1 == p.g2) ? 1.0 : 0.0;
    CHECK(std::abs(acc * h * h - expected) < 1e-6);
  }
}

TEST_CASE("synthesis matches special Hermite values and round-trips") {
  const int M = 12;
  const auto grid = grid_for(M);
  HermiteCoefficients c = HermiteCoefficients::Zero(M + 1, M + 1);
  c(3, 1) = cplx(0.6, -0.2);
  c(0, 4) = 0.5;
  const auto g = synthesize(c, grid);
  for (int i = 3; i < grid.size(); i += 29)
    for (int j = 5; j < grid.size(); j += 31) {
      const CVec z = c1(cplx(grid.coord(i), grid.coord(j)));
      const cplx v = c(3, 1) * transforms::special_hermite(MultiIndex{3}, MultiIndex{1}, z, 1.0) +
                     c(0, 4) * transforms::special_hermite(MultiIndex{0}, MultiIndex{4}, z, 1.0);
      CHECK(std::abs(g.values(i, j) - v) < 1e-12);
    }
  CHECK(g.norm() == doctest::Approx(c.norm()).epsilon(1e-12));
  CHECK((hermite_coefficients(g, M) - c).norm() < 1e-12);
}

TEST_CASE("range index and rank-one symbols") {
  CHECK(range_index() == RangeIndex::first);
  const int M = 10;
  const auto grid = grid_for(M);
  for (auto [a, b] : std::vector<std::pair<int, int>>{{0, 1}, {2, 5}, {4, 4}}) {
    HermiteCoefficients c = HermiteCoefficients::Zero(M + 1, M + 1);
    c(a, b) = 1.0;
    const auto W = weyl_transform(synthesize(c, grid), M);
    const RVec s = W.singular_values();
    CHECK(s[1] / s[0] < 1e-6);
    CHECK(std::abs(W.entries(a, b) - std::pow(-1.0, a + b) * std::sqrt(2.0 * kPi)) < 1e-10);
  }
  CHECK(weyl_transform(GridFunction::zero(grid), M).hs_norm() == 0.0);
}

TEST_CASE("Plancherel at lambda = 1 and other lambda") {
  const int M = 20;
  const auto grid = grid_for(M);
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto g = synthesize(random_coefficients(M, M - 4, seed), grid);
    Diagnostics d;
    const auto W = weyl_transform(g, M, 1.0, &d);
    CHECK(d.warnings.empty());
    CHECK(W.hs_norm() == doctest::Approx(std::sqrt(2.0 * kPi) * g.norm()).epsilon(1e-10));
  }
  const auto g = synthesize(random_coefficients(M, 4, 9), grid);
  for (double lambda : {2.0, -0.5}) {
    const auto W = weyl_transform(g, M, lambda);
    CHECK(std::sqrt(std::abs(lambda)) * W.hs_norm() == doctest::Approx(std::sqrt(2.0 * kPi) * g.norm()).epsilon(1e-8));
  }
}

TEST_CASE("Plancherel defect shrinks with M for a fixed band") {
  const auto grid = grid_for(40);
  const auto g = synthesize(random_coefficients(40, 36, 5), grid);
  double prev = 1e300;
  for (int M : {20, 30, 40}) {
    Diagnostics d;
    const auto W = weyl_transform(g, M, 1.0, &d);
    const double defect = std::abs(W.hs_norm() / (std::sqrt(2.0 * kPi) * g.norm()) - 1.0);
    CHECK(defect < prev);
    if (M < 40) CHECK(!d.warnings.empty());
    prev = defect;
  }
  CHECK(prev < 1e-10);
}

TEST_CASE("real even symbols give self-adjoint matrices") {
  const auto grid = grid_for(16);
  const auto g = GridFunction::sample(grid, [](double x, double y) {
    return cplx(std::exp(-0.5 * ((x - 1) * (x - 1) + y * y)) + std::exp(-0.5 * ((x + 1) * (x + 1) + y * y)));
  });
  const auto W = weyl_transform(g, 16);
  CHECK((W.entries - W.entries.adjoint()).norm() < 1e-8 * W.hs_norm());
}

TEST_CASE("twisted translation keeps the singular values") {
  const int M = 30;
  const auto grid = grid_for(M);
  const auto g0 = synthesize(random_coefficients(M, 2, 4), grid);
  const auto gl = twisted_translate(g0, 7, -5);
  const RVec s0 = weyl_transform(g0, M).singular_values();
  const RVec sl = weyl_transform(gl, M).singular_values();
  CHECK((s0.head(4) - sl.head(4)).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("E_A projection") {
  const auto grid = grid_for(10);
  const auto g = synthesize(random_coefficients(10, 6, 2), grid);
  const auto whole = RegionSpec::rectangle(RVec::Constant(2, -grid.R - 1), RVec::Constant(2, grid.R + 1));
  CHECK((project_EA(g, whole).values - g.values).norm() == 0.0);
  const auto A = RegionSpec::disk(origin(), 1.5);
  const auto ea = project_EA(g, A);
  CHECK((project_EA(ea, A).values - ea.values).norm() == 0.0);
  CHECK(ea.support_violation() == 0.0);
  GridFunction rest = g;
  rest.values -= ea.values;
  CHECK(std::pow(ea.norm(), 2) + std::pow(rest.norm(), 2) == doctest::Approx(std::pow(g.norm(), 2)).epsilon(1e-12));
  CHECK(std::abs(ea.inner(g) - ea.inner(ea)) < 1e-12);
}

TEST_CASE("F_N projection") {
  const int M = 12, N = 3;
  const auto grid = grid_for(M);
  for (std::uint64_t seed = 10; seed < 20; ++seed) {
    const auto g = synthesize(random_coefficients(M, M, seed), grid);
    const auto f = project_FN(g, N, M);
    const auto W = weyl_transform(g, M), Wf = weyl_transform(f, M);
    CMat PW = W.entries;
    PW.bottomRows(M + 1 - N).setZero();
    CHECK((PW - Wf.entries).norm() < 1e-8);
    if (seed < 12) {
      CHECK((project_FN(f, N, M).values - f.values).norm() * grid.step < 1e-10);
      CHECK((project_FN(g, M + 1, M).values - g.values).norm() * grid.step < 1e-10);
    }
  }
}

TEST_CASE("E_A F_N kernel") {
  const auto A = RegionSpec::disk(origin(), 1.5);
  CHECK(kernel_K(cplx(2.0, 0.0), cplx(0.1, 0.2), A, 3) == cplx(0.0));
  CHECK(std::abs(kernel_K(cplx(0.4, -0.3), cplx(0.4, -0.3), A, 1) - 1.0 / (2.0 * kPi)) < 1e-14);

  // applying the kernel reproduces E_A F_N g
  const int M = 10, N = 2;
  const auto grid = grid_for(M);
  const auto g = synthesize(random_coefficients(M, 8, 77), grid);
  const auto target = project_EA(project_FN(g, N, M), A);
  const int c = grid.center();
  for (auto [di, dj] : std::vector<std::pair<int, int>>{{0, 0}, {5, -3}, {-8, 2}, {3, 9}, {-6, -6}}) {
    const cplx z(grid.coord(c + di), grid.coord(c + dj));
    cplx acc = 0.0;
    for (int i = 0; i < grid.size(); ++i)
      for (int j = 0; j < grid.size(); ++j)
        acc += kernel_K(z, cplx(grid.coord(i), grid.coord(j)), A, N) * g.values(i, j);
    CHECK(std::abs(acc * grid.cell() - target.values(c + di, c + dj)) < 1e-6);
  }
}

TEST_CASE("Hilbert–Schmidt identity") {
  const auto A = RegionSpec::disk(origin(), 1.0);
  double prev = 0.0;
  for (int N : {1, 2, 4}) {
    const auto r = hs_identity(A, N, 40);
    if (N == 2) CHECK(r.predicted == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(r.rel_err < 0.02);
    CHECK(r.kernel_vs_basis < 1e-4);
    CHECK(r.kernel_spread < 1e-8);
    CHECK(!r.truncation_dominated);
    CHECK(r.computed > prev);
    prev = r.computed;
  }
  CHECK(hs_identity(RegionSpec::empty(2), 2, 20).computed == 0.0);
  CHECK(hs_identity(RegionSpec::disk(origin(), 0.5), 2, 20).computed < hs_identity(A, 2, 20).computed);
  // too small a truncation for a large region is flagged
  CHECK(hs_identity(RegionSpec::disk(origin(), 4.0), 2, 3, 0.05).truncation_dominated);
}

TEST_CASE("annihilation probe") {
  const auto A = RegionSpec::disk(origin(), 1.0);
  for (int N : {1, 2, 4}) {
    const auto p = annihilation_probe(A, N, 40);
    CHECK(p.count_near_one == 0);
    CHECK(p.singular_values[0] < 1.0 - 1e-3);
    CHECK(p.singular_values.minCoeff() >= 0.0);
    CHECK(p.count_near_one <= p.bound);
    CHECK(p.stability < 1e-8);
  }
  const int M = 10, N = 2;
  const auto whole = RegionSpec::rectangle(RVec::Constant(2, -15.0), RVec::Constant(2, 15.0));
  const auto p = annihilation_probe(whole, N, M, 0.1);
  CHECK(p.singular_values[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(p.count_near_one == N * (M + 1));
  CHECK(p.count_near_one <= p.bound + 1);
}

TEST_CASE("SAP estimates") {
  const auto A = RegionSpec::disk(origin(), 1.0);
  const auto grid = grid_for(20);
  const auto far = GridFunction::sample(grid, [](double x, double y) {
    return cplx(std::exp(-0.5 * ((x - 6) * (x - 6) + y * y)));
  });
  CHECK(sap_ratio(far, A, 2, 20) <= 1.0 + 1e-9);
  HermiteCoefficients c = HermiteCoefficients::Zero(21, 21);
  c(3, 1) = 1.0;
  CHECK(sap_ratio(synthesize(c, grid), A, 2, 20) <= 1.0);

  const auto s500 = sap_estimate(A, 2, 12, 500, 42);
  const auto s1000 = sap_estimate(A, 2, 12, 1000, 42);
  CHECK(std::abs(s1000.squared / s500.squared - 1.0) < 0.05);
  CHECK(s1000.exact_squared >= s1000.squared);
  CHECK(s1000.unsquared > 0.0);
}

TEST_CASE("finite-rank annihilation") {
  const auto A = RegionSpec::disk(origin(), 1.0);
  const auto r40 = finite_rank_annihilation(A, 2, 40, 3, 200, 1);
  const auto r60 = finite_rank_annihilation(A, 2, 60, 3, 200, 1);
  CHECK(r40.defect > 0.05);
  CHECK(std::abs(r40.defect - r60.defect) < 1e-6);
  CHECK(std::abs(r40.defect - r40.exact_defect) < 1e-6);
  CHECK(r40.history.front() >= r40.history.back());
  CHECK(finite_rank_annihilation(A, 0, 40, 2, 10, 1).defect == 1.0);
  const auto whole = RegionSpec::rectangle(RVec::Constant(2, -15.0), RVec::Constant(2, 15.0));
  CHECK(finite_rank_annihilation(whole, 2, 10, 2, 50, 1, 0.1).defect < 1e-3);
}

TEST_CASE("matrix text dump") {
  WeylMatrix W;
  W.M = 1;
  W.entries = CMat::Zero(2, 2);
  W.entries(1, 0) = cplx(0.5, -1.0);
  std::ostringstream os;
  W.write_text(os);
  CHECK(os.str() == "0 0 0 0\n0 1 0 0\n1 0 0.5 -1\n1 1 0 0\n");
}
