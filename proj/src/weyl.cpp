#include "hup/weyl.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <ostream>
#include <random>
#include <stdexcept>

#include "hup/specfun.hpp"
#include "hup/transforms.hpp"

namespace hup::weyl {

namespace {

const double kInvSqrt2Pi = 1.0 / std::sqrt(2.0 * kPi);

// |h_k(x)| < 1e-16 for all k <= M and |x| beyond this
double hermite_extent(int M) {
  double x = std::sqrt(2.0 * M + 1.0);
  while (specfun::hermite_functions_1d(M, x).cwiseAbs().maxCoeff() > 1e-16) x += 0.05;
  return x;
}

// rows: Hermite functions h_0..h_M at x0 + k * step, k = 0..count-1
RMat hermite_table(int M, double x0, double step, int count) {
  RMat T(count, M + 1);
  for (int k = 0; k < count; ++k) T.row(k) = specfun::hermite_functions_1d(M, x0 + k * step).transpose();
  return T;
}

// Weyl matrix at lambda = 1 from samples with the given step, index bound Mx
CMat weyl_core(const CMat& values, double step, int Mx) {
  const int G = static_cast<int>(values.rows());
  const int half = G / 2;
  const double E = hermite_extent(Mx);
  const int Kx = static_cast<int>(std::ceil(E / step));
  const int Nm = 4 * Kx + 1;

  // partial Fourier transform in x at s = m step / 2
  CMat P(G, Nm);
  for (int i = 0; i < G; ++i) {
    const double x = (i - half) * step;
    for (int m = 0; m < Nm; ++m) P(i, m) = std::polar(step, x * (m - 2 * Kx) * step * 0.5);
  }
  const CMat Gm = values.transpose() * P;  // (y index, m)

  const int Nk = 2 * Kx + 1;
  CMat K = CMat::Zero(Nk, Nk);
  for (int k = 0; k < Nk; ++k)
    for (int l = 0; l < Nk; ++l) {
      const int j = (l - k) + half;
      if (j < 0 || j >= G) continue;
      K(k, l) = Gm(j, k + l);
    }
  const RMat Phi = hermite_table(Mx, -Kx * step, step, Nk);
  return Phi.transpose().cast<cplx>() * K * Phi.cast<cplx>() * (step * step);
}

int fn_rows(int N, int M) { return std::clamp(N, 0, M + 1); }

// values of the R(F_N) basis at region points, one column per (range < N, other <= M)
CMat fn_basis_values(const RegionGrid& G, int N, int M) {
  const int rows = fn_rows(N, M);
  if (rows == 0) return CMat(static_cast<Eigen::Index>(G.points.size()), 0);
  if (range_index() == RangeIndex::first) return region_values(G, rows, M);
  // range on the second index: phi_ab with b < N
  CMat V(static_cast<Eigen::Index>(G.points.size()), rows * (M + 1));
  for (std::size_t p = 0; p < G.points.size(); ++p) {
    const CMat m = transforms::matrix_elements_1d(M, rows - 1, G.points[p].real(), G.points[p].imag(), 1.0);
    for (int b = 0; b < rows; ++b)
      for (int a = 0; a <= M; ++a) V(static_cast<Eigen::Index>(p), b * (M + 1) + a) = m(a, b) * kInvSqrt2Pi;
  }
  return V;
}

}  // namespace

cplx fourier_wigner(const MultiIndex& alpha, const MultiIndex& beta, const CVec& z, double lambda) {
  return std::pow(2.0 * kPi, -0.5 * alpha.dim()) * transforms::matrix_element(alpha, beta, z, lambda);
}

int PlanarGrid::size() const { return 2 * static_cast<int>(std::lround(R / step)) + 1; }

double PlanarGrid::coord(int i) const { return (i - center()) * step; }

PlanarGrid grid_for(int M) {
  const double E = hermite_extent(M);
  PlanarGrid g;
  g.step = kPi / (2.0 * E + 6.0);
  g.R = E + std::sqrt(2.0 * M + 1.0) + 2.0;
  return g;
}

GridFunction GridFunction::zero(const PlanarGrid& grid) {
  GridFunction g;
  g.grid = grid;
  g.values = CMat::Zero(grid.size(), grid.size());
  return g;
}

GridFunction GridFunction::sample(const PlanarGrid& grid, const std::function<cplx(double, double)>& f) {
  GridFunction g = zero(grid);
  for (int i = 0; i < grid.size(); ++i)
    for (int j = 0; j < grid.size(); ++j) g.values(i, j) = f(grid.coord(i), grid.coord(j));
  return g;
}

double GridFunction::norm() const { return values.norm() * grid.step; }

cplx GridFunction::inner(const GridFunction& o) const {
  if (o.values.rows() != values.rows()) throw std::invalid_argument("GridFunction::inner: grid mismatch");
  return (values.array() * o.values.array().conjugate()).sum() * grid.cell();
}

double GridFunction::support_violation() const {
  if (!has_support) return 0.0;
  double worst = 0.0;
  RVec p(2);
  for (int i = 0; i < grid.size(); ++i)
    for (int j = 0; j < grid.size(); ++j) {
      p << grid.coord(i), grid.coord(j);
      if (!support.contains(p)) worst = std::max(worst, std::abs(values(i, j)));
    }
  return worst;
}

GridFunction GridFunction::reflected() const {
  GridFunction g = *this;
  g.values = values.reverse();
  g.has_support = false;
  return g;
}

GridFunction synthesize(const HermiteCoefficients& c, const PlanarGrid& grid) {
  const int M = static_cast<int>(c.rows()) - 1;
  if (c.cols() != c.rows()) throw std::invalid_argument("synthesize: coefficients must be square");
  GridFunction g = GridFunction::zero(grid);
  const double step = grid.step;
  const double E = hermite_extent(M);
  const int Ks = static_cast<int>(std::ceil(E / step));
  const int S = 2 * Ks + 1;
  const int G = grid.size();

  // T(m, j) = sum_ab c_ab h_a(s_m + y_j/2) h_b(s_m - y_j/2)
  CMat T = CMat::Zero(S, G);
  for (int j = 0; j < G; ++j) {
    const double y = grid.coord(j);
    if (std::abs(y) > 2.0 * E) continue;
    const RMat U = hermite_table(M, -Ks * step + 0.5 * y, step, S);
    const RMat V = hermite_table(M, -Ks * step - 0.5 * y, step, S);
    const CMat Uc = U.cast<cplx>() * c;
    T.col(j) = (Uc.array() * V.cast<cplx>().array()).rowwise().sum();
  }
  CMat Ex(G, S);
  for (int i = 0; i < G; ++i)
    for (int m = 0; m < S; ++m) Ex(i, m) = std::polar(step * kInvSqrt2Pi, grid.coord(i) * (m - Ks) * step);
  g.values = Ex * T;
  return g;
}

RVec WeylMatrix::singular_values() const {
  Eigen::BDCSVD<CMat> svd(entries);
  return svd.singularValues();
}

void WeylMatrix::write_text(std::ostream& os) const {
  os.precision(17);
  for (Eigen::Index b = 0; b < entries.rows(); ++b)
    for (Eigen::Index a = 0; a < entries.cols(); ++a)
      os << b << ' ' << a << ' ' << entries(b, a).real() << ' ' << entries(b, a).imag() << '\n';
}

WeylMatrix weyl_transform(const GridFunction& g, int M, double lambda, Diagnostics* diag) {
  if (M < 0) throw std::invalid_argument("weyl_transform: negative truncation");
  if (lambda == 0.0) throw std::invalid_argument("weyl_transform: lambda must be nonzero");
  WeylMatrix W;
  W.M = M;
  W.lambda = lambda;
  // W_lambda(g) = |lambda|^{-1} W_1(g_lambda), g_lambda(X, Y) = g(sgn(lambda) X / s, Y / s)
  const double s = std::sqrt(std::abs(lambda));
  const CMat vals = lambda > 0 ? g.values : CMat(g.values.colwise().reverse());
  const int Mx = M + 8;
  const CMat full = weyl_core(vals, g.grid.step * s, Mx) / std::abs(lambda);
  W.entries = full.topLeftCorner(M + 1, M + 1);
  W.tail_estimate = std::sqrt(std::max(full.squaredNorm() - W.entries.squaredNorm(), 0.0));
  if (W.tail_estimate > 1e-6 * std::max(full.norm(), 1e-300))
    warn(diag, "weyl_transform: truncation at M = " + std::to_string(M) + " leaves HS tail " +
                   std::to_string(W.tail_estimate) + " (norm " + std::to_string(full.norm()) + ")");
  return W;
}

HermiteCoefficients hermite_coefficients(const GridFunction& g, int M) {
  return weyl_core(g.reflected().values, g.grid.step, M) * kInvSqrt2Pi;
}

RangeIndex range_index() {
  static std::once_flag once;
  static RangeIndex idx = RangeIndex::first;
  std::call_once(once, [] {
    HermiteCoefficients c = HermiteCoefficients::Zero(5, 5);
    c(0, 1) = 1.0;
    const auto g = synthesize(c, grid_for(4));
    const auto W = weyl_transform(g, 4);
    // the rank-one factor living in the rows is the range
    idx = std::abs(W.entries(0, 1)) >= std::abs(W.entries(1, 0)) ? RangeIndex::first : RangeIndex::second;
  });
  return idx;
}

GridFunction project_EA(const GridFunction& g, const RegionSpec& A) {
  GridFunction out = g;
  RVec p(2);
  for (int i = 0; i < g.grid.size(); ++i)
    for (int j = 0; j < g.grid.size(); ++j) {
      p << g.grid.coord(i), g.grid.coord(j);
      if (!A.contains(p)) out.values(i, j) = 0.0;
    }
  out.has_support = true;
  out.support = A;
  return out;
}

HermiteCoefficients project_FN(const HermiteCoefficients& c, int N) {
  HermiteCoefficients out = c;
  const int keep = std::clamp(N, 0, static_cast<int>(c.rows()));
  if (range_index() == RangeIndex::first)
    out.bottomRows(c.rows() - keep).setZero();
  else
    out.rightCols(c.cols() - keep).setZero();
  return out;
}

GridFunction project_FN(const GridFunction& g, int N, int M) {
  if (N < 0 || N > M + 1) throw std::invalid_argument("project_FN: need 0 <= N <= M + 1");
  return synthesize(project_FN(hermite_coefficients(g, M), N), g.grid);
}

cplx kernel_K(cplx z, cplx w, const RegionSpec& A, int N) {
  RVec p(2);
  p << z.real(), z.imag();
  if (N <= 0 || !A.contains(p)) return 0.0;
  const cplx u = w - z;
  const CMat m = transforms::matrix_elements_1d(N - 1, N - 1, u.real(), u.imag(), 1.0);
  // pi(w) pi(-z) = e^{(i/2) Im(w conj(-z))} pi(w - z)
  const double phase = 0.5 * (w * std::conj(-z)).imag();
  return std::polar(1.0 / (2.0 * kPi), phase) * m.diagonal().sum();
}

GridFunction twisted_translate(const GridFunction& g, int di, int dj) {
  GridFunction out = GridFunction::zero(g.grid);
  const int G = g.grid.size();
  const cplx w(di * g.grid.step, dj * g.grid.step);
  for (int i = 0; i < G; ++i)
    for (int j = 0; j < G; ++j) {
      const int si = i - di, sj = j - dj;
      if (si < 0 || sj < 0 || si >= G || sj >= G) continue;
      const cplx z(g.grid.coord(i), g.grid.coord(j));
      out.values(i, j) = std::polar(1.0, 0.5 * (z * std::conj(w)).imag()) * g.values(si, sj);
    }
  return out;
}

// ---------------------------------------------------------------------------

RegionGrid region_grid(const RegionSpec& A, double step) {
  RegionGrid G;
  G.step = step;
  if (A.kind == RegionSpec::Kind::union_of && A.parts.empty()) return G;
  const auto [lo, hi] = A.bounds();
  const long i0 = static_cast<long>(std::ceil(lo[0] / step)), i1 = static_cast<long>(std::floor(hi[0] / step));
  const long j0 = static_cast<long>(std::ceil(lo[1] / step)), j1 = static_cast<long>(std::floor(hi[1] / step));
  RVec p(2);
  for (long i = i0; i <= i1; ++i)
    for (long j = j0; j <= j1; ++j) {
      p << i * step, j * step;
      if (A.contains(p)) G.points.emplace_back(p[0], p[1]);
    }
  return G;
}

CMat region_values(const RegionGrid& G, int rows, int M) {
  CMat V(static_cast<Eigen::Index>(G.points.size()), rows * (M + 1));
  if (rows == 0) return V;
  for (std::size_t p = 0; p < G.points.size(); ++p) {
    const CMat m = transforms::matrix_elements_1d(rows - 1, M, G.points[p].real(), G.points[p].imag(), 1.0);
    for (int a = 0; a < rows; ++a)
      for (int b = 0; b <= M; ++b) V(static_cast<Eigen::Index>(p), a * (M + 1) + b) = m(a, b) * kInvSqrt2Pi;
  }
  return V;
}

CMat region_gram(const RegionGrid& G, int rows, int M) {
  const CMat V = region_values(G, rows, M);
  return V.adjoint() * V * (G.step * G.step);
}

HSReport hs_identity(const RegionSpec& A, int N, int M, double step) {
  if (N < 0 || N > M + 1) throw std::invalid_argument("hs_identity: need 0 <= N <= M + 1");
  HSReport rep;
  const RegionGrid G = region_grid(A, step);
  rep.grid_measure = G.measure();
  rep.predicted = geometry::region_measure(A).value * N / (2.0 * kPi);
  if (G.points.empty() || N == 0) return rep;

  const CMat V = fn_basis_values(G, N, M);
  rep.computed = V.squaredNorm() * step * step;
  rep.tail_bound = std::max(N * rep.grid_measure / (2.0 * kPi) - rep.computed, 0.0);
  rep.rel_err = std::abs(rep.computed - rep.predicted) / rep.predicted;
  rep.truncation_dominated = rep.tail_bound > 1e-3 * std::max(rep.predicted, rep.computed);

  // kernel route: int |K(z, w)|^2 dw at a few z in A, polar around z
  const double rho_max = 2.0 * std::sqrt(2.0 * (23.0 + N));
  const auto gl = geometry::gauss_legendre(240);
  const int ntheta = 8;
  std::vector<cplx> zs{G.points.front(), G.points[G.points.size() / 2], G.points.back()};
  std::vector<double> I;
  for (const cplx z : zs) {
    double acc = 0.0;
    for (Eigen::Index k = 0; k < gl.nodes.size(); ++k) {
      const double rho = 0.5 * rho_max * (gl.nodes[k] + 1.0);
      double ring = 0.0;
      for (int t = 0; t < ntheta; ++t) ring += std::norm(kernel_K(z, z + std::polar(rho, 2.0 * kPi * t / ntheta), A, N));
      acc += 0.5 * rho_max * gl.weights[k] * rho * ring * (2.0 * kPi / ntheta);
    }
    I.push_back(acc);
  }
  const auto [mn, mx] = std::minmax_element(I.begin(), I.end());
  double mean = 0.0;
  for (double v : I) mean += v / static_cast<double>(I.size());
  rep.kernel_spread = (*mx - *mn) / mean;
  rep.kernel_route = mean * rep.grid_measure;
  rep.kernel_vs_basis = std::abs(rep.kernel_route - rep.computed) / rep.computed;
  return rep;
}

namespace {

RVec descending_singular_values_of_gram(const CMat& G) {
  Eigen::SelfAdjointEigenSolver<CMat> es(G, Eigen::EigenvaluesOnly);
  RVec ev = es.eigenvalues().reverse();
  return ev.cwiseMax(0.0).cwiseSqrt();
}

}  // namespace

ProbeReport annihilation_probe(const RegionSpec& A, int N, int M, double step) {
  ProbeReport rep;
  const RegionGrid G = region_grid(A, step);
  if (G.points.empty() || N == 0) {
    rep.singular_values = RVec::Zero(0);
    return rep;
  }
  auto spectrum = [&](int m) {
    const CMat V = fn_basis_values(G, N, m);
    return descending_singular_values_of_gram(V.adjoint() * V * (step * step));
  };
  rep.singular_values = spectrum(M);
  for (Eigen::Index i = 0; i < rep.singular_values.size(); ++i)
    if (rep.singular_values[i] >= 1.0 - 1e-6) ++rep.count_near_one;
  rep.hs_norm2 = rep.singular_values.squaredNorm();
  rep.bound = static_cast<int>(std::floor(rep.hs_norm2));
  const RVec doubled = spectrum(2 * M);
  const Eigen::Index lead = std::min<Eigen::Index>(std::max(N, 1), rep.singular_values.size());
  rep.stability = (rep.singular_values.head(lead) - doubled.head(lead)).cwiseAbs().maxCoeff();
  return rep;
}

SapReport sap_estimate(const RegionSpec& A, int N, int M, int trials, std::uint64_t seed, double step) {
  SapReport rep;
  rep.trials = trials;
  const RegionGrid G = region_grid(A, step);
  const int d = (M + 1) * (M + 1);
  const CMat V = region_values(G, M + 1, M);
  const CMat Gram = G.points.empty() ? CMat(CMat::Zero(d, d)) : CMat(V.adjoint() * V * (step * step));

  // column a * (M + 1) + b; the range index selects the penalized block
  RVec D = RVec::Zero(d);
  for (int a = 0; a <= M; ++a)
    for (int b = 0; b <= M; ++b) {
      const int range = range_index() == RangeIndex::first ? a : b;
      if (range >= N) D[a * (M + 1) + b] = 2.0 * kPi;
    }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  for (int t = 0; t < trials; ++t) {
    CVec c(d);
    for (int i = 0; i < d; ++i) c[i] = cplx(nd(rng), nd(rng));
    c.normalize();
    const double inA = (c.adjoint() * Gram * c)(0, 0).real();
    const double perp = (D.array() * c.cwiseAbs2().array()).sum();
    const double out = std::max(1.0 - inA, 0.0);
    rep.squared = std::max(rep.squared, 1.0 / (out + perp));
    rep.unsquared = std::max(rep.unsquared, 1.0 / (std::sqrt(out) + perp));
  }
  const CMat Q = CMat::Identity(d, d) - Gram + CMat(D.cast<cplx>().asDiagonal());
  Eigen::SelfAdjointEigenSolver<CMat> es(Q, Eigen::EigenvaluesOnly);
  rep.exact_squared = 1.0 / es.eigenvalues().minCoeff();
  return rep;
}

double sap_ratio(const GridFunction& g, const RegionSpec& A, int N, int M) {
  const double total = std::pow(g.norm(), 2);
  const double inA = std::pow(project_EA(g, A).norm(), 2);
  const auto W = weyl_transform(g, M);
  const int keep = std::clamp(N, 0, M + 1);
  const double perp = range_index() == RangeIndex::first ? W.entries.bottomRows(M + 1 - keep).squaredNorm()
                                                         : W.entries.rightCols(M + 1 - keep).squaredNorm();
  return total / (std::max(total - inA, 0.0) + perp);
}

AnnihilationReport finite_rank_annihilation(const RegionSpec& A, int N, int M, int trials, int iterations,
                                            std::uint64_t seed, double step) {
  AnnihilationReport rep;
  rep.iterations = iterations;
  const RegionGrid G = region_grid(A, step);
  if (N <= 0 || G.points.empty()) {
    rep.defect = rep.exact_defect = 1.0;
    rep.history.assign(static_cast<std::size_t>(iterations) + 1, 1.0);
    return rep;
  }
  const CMat V = fn_basis_values(G, N, M);
  const double cell = step * step;
  const CMat Gram = V.adjoint() * V * cell;
  Eigen::SelfAdjointEigenSolver<CMat> es(Gram, Eigen::EigenvaluesOnly);
  rep.exact_defect = std::sqrt(std::max(1.0 - es.eigenvalues().maxCoeff(), 0.0));

  auto defect_of = [&](const CVec& c) {
    const double inA = (c.adjoint() * Gram * c)(0, 0).real();
    const double kept = (Gram * c).squaredNorm();
    return std::sqrt(std::max(1.0 - kept / inA, 0.0));
  };

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  rep.history.assign(static_cast<std::size_t>(iterations) + 1, 1.0);
  rep.defect = 1.0;
  for (int t = 0; t < trials; ++t) {
    CVec g(static_cast<Eigen::Index>(G.points.size()));
    for (Eigen::Index i = 0; i < g.size(); ++i) g[i] = cplx(nd(rng), nd(rng));
    // F_N of a random g supported in A
    CVec c = V.adjoint() * g * cell;
    const double g2 = g.squaredNorm() * cell;
    rep.history[0] = std::min(rep.history[0], std::sqrt(std::max(1.0 - c.squaredNorm() / g2, 0.0)));
    for (int it = 1; it <= iterations; ++it) {
      c.normalize();
      rep.history[static_cast<std::size_t>(it)] = std::min(rep.history[static_cast<std::size_t>(it)], defect_of(c));
      c = Gram * c;
    }
    c.normalize();
    rep.defect = std::min(rep.defect, defect_of(c));
  }
  return rep;
}

HermiteCoefficients random_coefficients(int M, int band, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  HermiteCoefficients c = HermiteCoefficients::Zero(M + 1, M + 1);
  const int B = std::min(band, M);
  for (int a = 0; a <= B; ++a)
    for (int b = 0; b <= B; ++b) c(a, b) = cplx(nd(rng), nd(rng));
  return c / c.norm();
}

}  // namespace hup::weyl
