#include "hup/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <tuple>

#include <Eigen/Eigenvalues>

#include "hup/specfun.hpp"

namespace hup::geometry {

namespace {

constexpr double kMaxNodes = 5e7;

// Rule on [-1,1] moved to [0,1], weights rescaled to sum to 1.
GaussRule to_unit_interval(const GaussRule& g) {
  GaussRule out{(g.nodes.array() + 1.0) * 0.5, g.weights / g.weights.sum()};
  return out;
}

}  // namespace

GaussRule gauss_legendre(int npts) {
  if (npts < 1) throw std::invalid_argument("gauss_legendre: npts must be positive");
  if (npts == 1) return {RVec::Zero(1), RVec::Constant(1, 2.0)};
  GaussRule g{RVec(npts), RVec(npts)};
  for (int i = 0; i < (npts + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (npts + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= npts; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = npts * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute derivative at the converged node.
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= npts; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = npts * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    g.nodes[i] = -x;
    g.nodes[npts - 1 - i] = x;
    g.weights[i] = w;
    g.weights[npts - 1 - i] = w;
  }
  if (npts % 2 == 1) g.nodes[npts / 2] = 0.0;
  return g;
}

GaussRule gauss_jacobi(int npts, double a, double b) {
  if (npts < 1) throw std::invalid_argument("gauss_jacobi: npts must be positive");
  if (a <= -1.0 || b <= -1.0) throw std::domain_error("gauss_jacobi: exponents must exceed -1");
  if (a == -0.5 && b == -0.5) {
    GaussRule g{RVec(npts), RVec::Constant(npts, kPi / npts)};
    for (int i = 0; i < npts; ++i) g.nodes[i] = -std::cos(kPi * (i + 0.5) / npts);
    return g;
  }
  if (a == 0.0 && b == 0.0) return gauss_legendre(npts);

  const double ab = a + b;
  RVec diag(npts), off(std::max(npts - 1, 0));
  for (int k = 0; k < npts; ++k) {
    const double s = 2.0 * k + ab;
    diag[k] = (k == 0) ? (b - a) / (ab + 2.0) : (b * b - a * a) / (s * (s + 2.0));
  }
  for (int k = 1; k < npts; ++k) {
    const double s = 2.0 * k + ab;
    const double beta = 4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0));
    off[k - 1] = std::sqrt(beta);
  }
  Eigen::SelfAdjointEigenSolver<RMat> es;
  es.computeFromTridiagonal(diag, off, Eigen::ComputeEigenvectors);
  const double mu0 = std::exp((ab + 1.0) * std::log(2.0) + std::lgamma(a + 1.0) +
                              std::lgamma(b + 1.0) - std::lgamma(ab + 2.0));
  GaussRule g{es.eigenvalues(), RVec(npts)};
  for (int i = 0; i < npts; ++i) {
    const double v = es.eigenvectors()(0, i);
    g.weights[i] = mu0 * v * v;
  }
  return g;
}

const char* to_string(MeasureConvention c) {
  return c == MeasureConvention::normalized ? "normalized" : "unnormalized";
}

void QuadratureRule::write_csv(std::ostream& os) const {
  for (int c = 0; c < ambient_dim(); ++c) os << 'c' << c << ',';
  os << "weight\n";
  os.precision(17);
  for (Eigen::Index i = 0; i < size(); ++i) {
    for (int c = 0; c < ambient_dim(); ++c) os << nodes(i, c) << ',';
    os << weights[i] << '\n';
  }
}

double sphere_area(int d) {
  if (d < 1) throw std::invalid_argument("sphere_area: d must be positive");
  return 2.0 * std::pow(kPi, 0.5 * d) / std::tgamma(0.5 * d);
}

QuadratureRule sphere_quadrature(int n, double r, int degree, MeasureConvention convention) {
  if (n < 1 || n > 3) throw std::invalid_argument("sphere_quadrature: n must be 1, 2 or 3");
  if (!(r > 0.0)) throw std::invalid_argument("sphere_quadrature: radius must be positive");
  if (degree < 0) throw std::invalid_argument("sphere_quadrature: negative degree");

  const int m = degree + 1;             // phase points per coordinate
  const int simplex_deg = degree / 2;   // degree in the moduli squared
  const int p = simplex_deg / 2 + 1;    // Gauss points per simplex coordinate

  // Points u on the simplex with probability weights.
  std::vector<std::pair<std::vector<double>, double>> simplex;
  if (n == 1) {
    simplex.push_back({{1.0}, 1.0});
  } else if (n == 2) {
    const auto g = to_unit_interval(gauss_legendre(p));
    for (int i = 0; i < p; ++i) simplex.push_back({{g.nodes[i], 1.0 - g.nodes[i]}, g.weights[i]});
  } else {
    // u = (s, (1-s) t, (1-s)(1-t)), density 2 (1-s) ds dt.
    const auto gs = to_unit_interval(gauss_jacobi(p, 1.0, 0.0));
    const auto gt = to_unit_interval(gauss_legendre(p));
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) {
        const double s = gs.nodes[i], t = gt.nodes[j];
        simplex.push_back({{s, (1.0 - s) * t, (1.0 - s) * (1.0 - t)}, gs.weights[i] * gt.weights[j]});
      }
  }

  const double phase_count = std::pow(static_cast<double>(m), n);
  const double total = static_cast<double>(simplex.size()) * phase_count;
  if (total > kMaxNodes)
    throw std::length_error("sphere_quadrature: rule would need " + std::to_string(total) +
                            " nodes; reduce the degree");

  const double area = 2.0 * std::pow(kPi, n) / std::tgamma(n) * std::pow(r, 2 * n - 1);
  const double mass = convention == MeasureConvention::normalized ? 1.0 : area;

  QuadratureRule q;
  const auto N = static_cast<Eigen::Index>(total);
  q.nodes.resize(N, 2 * n);
  q.weights.resize(N);
  q.exactness_degree = degree;
  q.total_mass = mass;
  q.manifold = "S^" + std::to_string(2 * n - 1) + " radius " + std::to_string(r) + " (" +
               to_string(convention) + ")";

  Eigen::Index row = 0;
  std::vector<int> ph(static_cast<std::size_t>(n), 0);
  for (const auto& [u, wu] : simplex) {
    std::fill(ph.begin(), ph.end(), 0);
    for (long long idx = 0; idx < static_cast<long long>(phase_count); ++idx) {
      for (int j = 0; j < n; ++j) {
        const double phi = 2.0 * kPi * ph[static_cast<std::size_t>(j)] / m;
        const double rho = r * std::sqrt(std::max(u[static_cast<std::size_t>(j)], 0.0));
        q.nodes(row, j) = rho * std::cos(phi);
        q.nodes(row, j + n) = rho * std::sin(phi);
      }
      q.weights[row] = mass * wu / phase_count;
      ++row;
      for (int j = 0; j < n; ++j) {
        if (++ph[static_cast<std::size_t>(j)] < m) break;
        ph[static_cast<std::size_t>(j)] = 0;
      }
    }
  }
  return q;
}

std::shared_ptr<const QuadratureRule> cached_sphere_quadrature(int n, double r, int degree,
                                                               MeasureConvention convention) {
  using Key = std::tuple<int, double, int, int>;
  static std::mutex mu;
  static std::map<Key, std::shared_ptr<const QuadratureRule>> cache;
  const Key key{n, r, degree, static_cast<int>(convention)};
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto rule = std::make_shared<const QuadratureRule>(sphere_quadrature(n, r, degree, convention));
  std::lock_guard lock(mu);
  if (cache.size() > 64) cache.clear();
  return cache.emplace(key, rule).first->second;
}

QuadratureRule real_sphere_quadrature(int d, int degree) {
  if (d < 1) throw std::invalid_argument("real_sphere_quadrature: d must be positive");
  if (degree < 0) throw std::invalid_argument("real_sphere_quadrature: negative degree");
  QuadratureRule q;
  q.exactness_degree = degree;
  q.total_mass = 1.0;
  q.manifold = "S^" + std::to_string(d - 1) + " (normalized)";
  if (d == 1) {
    q.nodes.resize(2, 1);
    q.nodes << -1.0, 1.0;
    q.weights = RVec::Constant(2, 0.5);
    return q;
  }
  if (d == 2) {
    const int m = degree + 1;
    q.nodes.resize(m, 2);
    q.weights = RVec::Constant(m, 1.0 / m);
    for (int i = 0; i < m; ++i) {
      q.nodes(i, 0) = std::cos(2.0 * kPi * i / m);
      q.nodes(i, 1) = std::sin(2.0 * kPi * i / m);
    }
    return q;
  }
  const double e = 0.5 * (d - 3);
  auto g = gauss_jacobi(degree / 2 + 1, e, e);
  g.weights /= g.weights.sum();
  const auto sub = real_sphere_quadrature(d - 1, degree);
  const auto N = g.nodes.size() * sub.size();
  q.nodes.resize(N, d);
  q.weights.resize(N);
  Eigen::Index row = 0;
  for (Eigen::Index i = 0; i < g.nodes.size(); ++i) {
    const double u = g.nodes[i];
    const double s = std::sqrt(std::max(1.0 - u * u, 0.0));
    for (Eigen::Index j = 0; j < sub.size(); ++j) {
      q.nodes.row(row).head(d - 1) = s * sub.nodes.row(j);
      q.nodes(row, d - 1) = u;
      q.weights[row] = g.weights[i] * sub.weights[j];
      ++row;
    }
  }
  return q;
}

RMat complete_frame(const RVec& omega) {
  const auto d = omega.size();
  const RVec w = omega.normalized();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto i, auto j) { return std::abs(w[i]) < std::abs(w[j]); });
  RMat frame(d, d - 1);
  Eigen::Index have = 0;
  for (auto idx : order) {
    if (have == d - 1) break;
    RVec v = RVec::Unit(d, idx);
    for (int pass = 0; pass < 2; ++pass) {
      v -= w.dot(v) * w;
      for (Eigen::Index k = 0; k < have; ++k) v -= frame.col(k).dot(v) * frame.col(k);
    }
    const double nv = v.norm();
    if (nv < 1e-8) continue;
    frame.col(have++) = v / nv;
  }
  if (have != d - 1) throw std::runtime_error("complete_frame: degenerate direction");
  return frame;
}

QuadratureRule geodesic_quadrature(const RVec& omega, double t, int degree) {
  const auto d = static_cast<int>(omega.size());
  if (d < 2) throw std::invalid_argument("geodesic_quadrature: ambient dimension must be >= 2");
  if (std::abs(t) > 1.0) throw std::domain_error("geodesic_quadrature: |t| > 1");
  const RVec w = omega.normalized();
  const RMat frame = complete_frame(w);
  const auto sub = real_sphere_quadrature(d - 1, degree);
  const double s = std::sqrt(std::max(1.0 - t * t, 0.0));
  QuadratureRule q;
  q.exactness_degree = degree;
  q.total_mass = 1.0;
  q.manifold = "geodesic sphere t=" + std::to_string(t) + " (normalized)";
  q.nodes.resize(sub.size(), d);
  q.weights = sub.weights;
  for (Eigen::Index i = 0; i < sub.size(); ++i)
    q.nodes.row(i) = (t * w + s * (frame * sub.node(i))).transpose();
  return q;
}

// ---------------------------------------------------------------------------

double ConeSampler::residual(const RVec& x) const {
  const double n2 = x.squaredNorm();
  if (n2 == 0.0) return 0.0;
  switch (kind) {
    case ConeKind::complex_H: {
      const CVec z = to_complex(x);
      return std::abs(a * z[0] * std::conj(z[1]) + n2) / n2;
    }
    case ConeKind::armitage_Ka: {
      const double ar = a.real();
      return std::abs(x[0] * x[0] - ar * ar * n2) / n2;
    }
    case ConeKind::custom:
      if (!residual_fn) throw std::logic_error("custom cone without residual");
      return residual_fn(x);
  }
  return 0.0;
}

ConeSampler complex_h_cone(int n, cplx a, std::vector<double> radii) {
  if (n < 2) throw std::invalid_argument("complex_h_cone: needs n >= 2");
  if (std::abs(a) < 2.0) throw std::domain_error("complex_h_cone: empty for |a| < 2");
  ConeSampler c;
  c.kind = ConeKind::complex_H;
  c.a = a;
  c.dim = 2 * n;
  c.radii = std::move(radii);
  c.complex_scaling_closed = true;
  return c;
}

ConeSampler armitage_cone(int d, double a, std::vector<double> radii) {
  if (d < 2) throw std::invalid_argument("armitage_cone: needs d >= 2");
  if (a < 0.0 || a > 1.0) throw std::domain_error("armitage_cone: a must lie in [0, 1]");
  ConeSampler c;
  c.kind = ConeKind::armitage_Ka;
  c.a = a;
  c.dim = d;
  c.radii = std::move(radii);
  c.complex_scaling_closed = false;
  return c;
}

std::vector<RVec> sample_cone(const ConeSampler& c, int count) {
  if (count < 0) throw std::invalid_argument("sample_cone: negative count");
  if (c.radii.empty()) throw std::invalid_argument("sample_cone: empty radius list");
  std::mt19937_64 rng(c.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<RVec> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    RVec x;
    switch (c.kind) {
      case ConeKind::complex_H: {
        const int n = c.dim / 2;
        const double A = std::abs(c.a);
        const double phi2 = 2.0 * kPi * unif(rng);
        double R2 = 0.0;
        if (n >= 3) R2 = unif(rng) * 0.25 * (A * A - 4.0);
        const double disc = std::sqrt(std::max(A * A - 4.0 * (1.0 + R2), 0.0));
        const double rho1 = 0.5 * (A + ((i % 2 == 0) ? disc : -disc));
        CVec z = CVec::Zero(n);
        z[0] = std::polar(rho1, phi2 + kPi - std::arg(c.a));
        z[1] = std::polar(1.0, phi2);
        if (n >= 3) {
          CVec rest(n - 2);
          for (Eigen::Index j = 0; j < rest.size(); ++j) rest[j] = cplx(gauss(rng), gauss(rng));
          z.tail(n - 2) = rest.normalized() * std::sqrt(R2);
        }
        x = to_real(z);
        break;
      }
      case ConeKind::armitage_Ka: {
        const double ar = c.a.real();
        RVec rest(c.dim - 1);
        for (Eigen::Index j = 0; j < rest.size(); ++j) rest[j] = gauss(rng);
        x.resize(c.dim);
        x[0] = (i % 2 == 0) ? ar : -ar;
        x.tail(c.dim - 1) = rest.normalized() * std::sqrt(1.0 - ar * ar);
        break;
      }
      case ConeKind::custom:
        if (!c.generator) throw std::logic_error("custom cone without generator");
        x = c.generator(rng);
        break;
    }
    const double rad = c.radii[static_cast<std::size_t>(i) % c.radii.size()];
    out.push_back(x.normalized() * rad);
  }
  return out;
}

const char* to_string(ArmitageVerdict v) {
  switch (v) {
    case ArmitageVerdict::vacuous: return "vacuous";
    case ArmitageVerdict::holds: return "holds";
    case ArmitageVerdict::fails: return "fails";
  }
  return "?";
}

std::vector<ArmitageDegree> classify_armitage(double a, int d, int k_max) {
  if (d < 3) throw std::invalid_argument("classify_armitage: needs d >= 3");
  if (std::abs(a) > 1.0) throw std::domain_error("classify_armitage: |a| > 1");
  const double beta = 0.5 * (d - 2);
  std::vector<ArmitageDegree> out;
  for (int k = 0; k <= k_max; ++k) {
    ArmitageDegree row;
    row.k = k;
    if (k < 2) {
      row.verdict = ArmitageVerdict::vacuous;
      out.push_back(row);
      continue;
    }
    row.min_abs_derivative = std::numeric_limits<double>::infinity();
    bool vanishes = false;
    for (int m = 0; m <= k - 2; ++m) {
      const double v = std::abs(specfun::gegenbauer(k, beta, a, m));
      const double scale = std::max(1.0, std::abs(specfun::gegenbauer(k, beta, 1.0, m)));
      row.min_abs_derivative = std::min(row.min_abs_derivative, v);
      if (v <= 1e-12 * scale) vanishes = true;
    }
    row.verdict = vanishes ? ArmitageVerdict::fails : ArmitageVerdict::holds;
    out.push_back(row);
  }
  return out;
}

// ---------------------------------------------------------------------------

RegionSpec RegionSpec::disk(RVec center, double radius) {
  if (!(radius >= 0.0)) throw std::invalid_argument("disk: negative radius");
  RegionSpec r;
  r.kind = Kind::disk;
  r.center = std::move(center);
  r.radius = radius;
  return r;
}

RegionSpec RegionSpec::rectangle(RVec lo, RVec hi) {
  if (lo.size() != hi.size()) throw std::invalid_argument("rectangle: corner dimension mismatch");
  RegionSpec r;
  r.kind = Kind::rectangle;
  r.lo = std::move(lo);
  r.hi = std::move(hi);
  return r;
}

RegionSpec RegionSpec::union_of(std::vector<RegionSpec> parts) {
  if (parts.empty()) throw std::invalid_argument("union_of: no parts (use RegionSpec::empty)");
  const int d = parts.front().dim();
  for (const auto& p : parts)
    if (p.dim() != d) throw std::invalid_argument("union_of: dimension mismatch");
  RegionSpec r;
  r.kind = Kind::union_of;
  r.center = RVec::Zero(d);
  r.parts = std::move(parts);
  return r;
}

RegionSpec RegionSpec::half_annulus(RVec center, double inner, double outer) {
  if (center.size() != 2) throw std::invalid_argument("half_annulus: planar only");
  if (!(inner >= 0.0 && outer >= inner)) throw std::invalid_argument("half_annulus: bad radii");
  RegionSpec r;
  r.kind = Kind::half_annulus;
  r.center = std::move(center);
  r.inner_radius = inner;
  r.radius = outer;
  return r;
}

RegionSpec RegionSpec::empty(int dim) {
  RegionSpec r;
  r.kind = Kind::union_of;
  r.center = RVec::Zero(dim);
  return r;
}

int RegionSpec::dim() const {
  if (kind == Kind::rectangle) return static_cast<int>(lo.size());
  return static_cast<int>(center.size());
}

bool RegionSpec::contains(const RVec& x) const {
  switch (kind) {
    case Kind::disk: return (x - center).norm() <= radius;
    case Kind::rectangle:
      return (x.array() >= lo.array()).all() && (x.array() <= hi.array()).all();
    case Kind::union_of:
      return std::any_of(parts.begin(), parts.end(), [&](const auto& p) { return p.contains(x); });
    case Kind::half_annulus: {
      const double rr = (x - center).norm();
      return rr >= inner_radius && rr <= radius && x[1] >= center[1];
    }
  }
  return false;
}

std::pair<RVec, RVec> RegionSpec::bounds() const {
  switch (kind) {
    case Kind::disk:
    case Kind::half_annulus:
      return {center.array() - radius, center.array() + radius};
    case Kind::rectangle: return {lo, hi};
    case Kind::union_of: {
      if (parts.empty()) return {center, center};
      auto [l, h] = parts.front().bounds();
      for (const auto& p : parts) {
        auto [pl, ph] = p.bounds();
        l = l.cwiseMin(pl);
        h = h.cwiseMax(ph);
      }
      return {l, h};
    }
  }
  return {};
}

namespace {

bool boxes_disjoint(const RegionSpec& a, const RegionSpec& b) {
  if (a.kind == RegionSpec::Kind::disk && b.kind == RegionSpec::Kind::disk)
    return (a.center - b.center).norm() >= a.radius + b.radius;
  auto [al, ah] = a.bounds();
  auto [bl, bh] = b.bounds();
  for (Eigen::Index i = 0; i < al.size(); ++i)
    if (ah[i] <= bl[i] || bh[i] <= al[i]) return true;
  return false;
}

RegionMeasure grid_measure(const RegionSpec& A) {
  const int d = A.dim();
  auto [lo, hi] = A.bounds();
  const int cells = d <= 2 ? 1000 : (d <= 4 ? 40 : 12);
  const RVec h = (hi - lo) / cells;
  const double vol = h.prod();
  long long inside = 0, boundary = 0;
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  const long long total = static_cast<long long>(std::pow(cells, d));
  RVec x(d), corner(d);
  for (long long c = 0; c < total; ++c) {
    for (int k = 0; k < d; ++k) x[k] = lo[k] + (idx[static_cast<std::size_t>(k)] + 0.5) * h[k];
    const bool in = A.contains(x);
    if (in) ++inside;
    bool mixed = false;
    for (int mask = 0; mask < (1 << d) && !mixed; ++mask) {
      for (int k = 0; k < d; ++k) corner[k] = x[k] + (((mask >> k) & 1) ? 0.5 : -0.5) * h[k];
      if (A.contains(corner) != in) mixed = true;
    }
    if (mixed) ++boundary;
    for (int k = 0; k < d; ++k) {
      if (++idx[static_cast<std::size_t>(k)] < cells) break;
      idx[static_cast<std::size_t>(k)] = 0;
    }
  }
  return {inside * vol, 0.5 * boundary * vol, false};
}

}  // namespace

RegionMeasure region_measure(const RegionSpec& A) {
  switch (A.kind) {
    case RegionSpec::Kind::disk: {
      const int d = A.dim();
      return {std::pow(kPi, 0.5 * d) * std::pow(A.radius, d) / std::tgamma(0.5 * d + 1.0), 0.0, true};
    }
    case RegionSpec::Kind::rectangle:
      return {(A.hi - A.lo).cwiseMax(0.0).prod(), 0.0, true};
    case RegionSpec::Kind::half_annulus:
      return {0.5 * kPi * (A.radius * A.radius - A.inner_radius * A.inner_radius), 0.0, true};
    case RegionSpec::Kind::union_of: {
      bool disjoint = true;
      for (std::size_t i = 0; i < A.parts.size() && disjoint; ++i)
        for (std::size_t j = i + 1; j < A.parts.size() && disjoint; ++j)
          disjoint = boxes_disjoint(A.parts[i], A.parts[j]);
      if (!disjoint) return grid_measure(A);
      RegionMeasure total;
      for (const auto& p : A.parts) {
        const auto m = region_measure(p);
        total.value += m.value;
        total.error_bound += m.error_bound;
        total.closed_form = total.closed_form && m.closed_form;
      }
      return total;
    }
  }
  return {};
}

}  // namespace hup::geometry
