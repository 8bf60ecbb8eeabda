#include "hup/harmonics.hpp"

#include <cmath>
#include <mutex>
#include <ostream>

#include <Eigen/SVD>

#include "hup/specfun.hpp"

namespace hup::harmonics {

namespace {

std::shared_ptr<const std::vector<Monomial>> shared_monomials(int n, int p, int q) {
  using Key = std::tuple<int, int, int>;
  static std::mutex mu;
  static std::map<Key, std::shared_ptr<const std::vector<Monomial>>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{n, p, q}];
  if (!slot) slot = std::make_shared<const std::vector<Monomial>>(bigraded_monomials(n, p, q));
  return slot;
}

// Powers z_j^k (k <= p) and conj(z_j)^k (k <= q).
struct PowerTable {
  std::vector<std::vector<cplx>> zp, zq;
  PowerTable(const CVec& z, int p, int q) {
    const auto n = static_cast<std::size_t>(z.size());
    zp.assign(n, std::vector<cplx>(static_cast<std::size_t>(std::max(p, 0) + 1), 1.0));
    zq.assign(n, std::vector<cplx>(static_cast<std::size_t>(std::max(q, 0) + 1), 1.0));
    for (std::size_t j = 0; j < n; ++j) {
      const cplx v = z[static_cast<Eigen::Index>(j)];
      for (int k = 1; k <= p; ++k) zp[j][static_cast<std::size_t>(k)] = zp[j][static_cast<std::size_t>(k) - 1] * v;
      for (int k = 1; k <= q; ++k)
        zq[j][static_cast<std::size_t>(k)] = zq[j][static_cast<std::size_t>(k) - 1] * std::conj(v);
    }
  }
  cplx operator()(const Monomial& m) const {
    cplx v = 1.0;
    for (int j = 0; j < m.alpha.dim(); ++j)
      v *= zp[static_cast<std::size_t>(j)][static_cast<std::size_t>(m.alpha[j])] *
           zq[static_cast<std::size_t>(j)][static_cast<std::size_t>(m.beta[j])];
    return v;
  }
};

bool valid_bidegree(int n, int p, int q) { return p >= 0 && q >= 0 && (n >= 2 || std::min(p, q) == 0); }

double choose(int a, int b) {
  if (b < 0 || a < 0 || b > a) return 0.0;
  return std::round(std::exp(std::lgamma(a + 1.0) - std::lgamma(b + 1.0) - std::lgamma(a - b + 1.0)));
}

}  // namespace

std::vector<Monomial> bigraded_monomials(int n, int p, int q) {
  std::vector<Monomial> out;
  if (p < 0 || q < 0) return out;
  const auto as = multi_indices(n, p);
  const auto bs = multi_indices(n, q);
  out.reserve(as.size() * bs.size());
  for (const auto& a : as)
    for (const auto& b : bs) out.push_back({a, b});
  return out;
}

CVec monomial_values(int n, int p, int q, const CVec& z) {
  const auto mons = shared_monomials(n, p, q);
  PowerTable pt(z, p, q);
  CVec v(static_cast<Eigen::Index>(mons->size()));
  for (std::size_t i = 0; i < mons->size(); ++i) v[static_cast<Eigen::Index>(i)] = pt((*mons)[i]);
  return v;
}

BigradedPolynomial::BigradedPolynomial(int n, int p, int q)
    : n_(n), p_(p), q_(q), monomials_(shared_monomials(n, p, q)) {
  coeffs_ = CVec::Zero(static_cast<Eigen::Index>(monomials_->size()));
}

BigradedPolynomial::BigradedPolynomial(int n, int p, int q, CVec coeffs, bool harmonic)
    : n_(n), p_(p), q_(q), monomials_(shared_monomials(n, p, q)), coeffs_(std::move(coeffs)),
      harmonic_(harmonic) {
  if (coeffs_.size() != static_cast<Eigen::Index>(monomials_->size()))
    throw std::invalid_argument("BigradedPolynomial: coefficient table size mismatch");
}

cplx BigradedPolynomial::operator()(const CVec& z) const {
  if (z.size() != n_) throw std::invalid_argument("BigradedPolynomial: dimension mismatch");
  if (monomials_->empty()) return 0.0;
  PowerTable pt(z, p_, q_);
  cplx s = 0.0;
  for (std::size_t i = 0; i < monomials_->size(); ++i) {
    const cplx c = coeffs_[static_cast<Eigen::Index>(i)];
    if (c != 0.0) s += c * pt((*monomials_)[i]);
  }
  return s;
}

BigradedPolynomial BigradedPolynomial::laplacian() const {
  BigradedPolynomial out(n_, p_ - 1, q_ - 1);
  if (out.monomials().empty()) return out;
  std::map<std::pair<MultiIndex, MultiIndex>, Eigen::Index> index;
  for (std::size_t i = 0; i < out.monomials().size(); ++i)
    index[{out.monomials()[i].alpha, out.monomials()[i].beta}] = static_cast<Eigen::Index>(i);
  for (std::size_t i = 0; i < monomials_->size(); ++i) {
    const cplx c = coeffs_[static_cast<Eigen::Index>(i)];
    if (c == 0.0) continue;
    const auto& m = (*monomials_)[i];
    for (int j = 0; j < n_; ++j) {
      if (m.alpha[j] == 0 || m.beta[j] == 0) continue;
      auto a = m.alpha.entries();
      auto b = m.beta.entries();
      --a[static_cast<std::size_t>(j)];
      --b[static_cast<std::size_t>(j)];
      out.coeffs_[index.at({MultiIndex(a), MultiIndex(b)})] += 4.0 * m.alpha[j] * m.beta[j] * c;
    }
  }
  return out;
}

BigradedPolynomial BigradedPolynomial::operator+(const BigradedPolynomial& o) const {
  if (o.n_ != n_ || o.p_ != p_ || o.q_ != q_) throw std::invalid_argument("BigradedPolynomial: bidegree mismatch");
  return BigradedPolynomial(n_, p_, q_, coeffs_ + o.coeffs_, harmonic_ && o.harmonic_);
}

BigradedPolynomial BigradedPolynomial::operator*(cplx s) const {
  return BigradedPolynomial(n_, p_, q_, coeffs_ * s, harmonic_);
}

int harmonic_dimension(int n, int p, int q) {
  if (!valid_bidegree(n, p, q)) return 0;
  return static_cast<int>(choose(p + n - 1, p) * choose(q + n - 1, q) -
                          choose(p + n - 2, p - 1) * choose(q + n - 2, q - 1));
}

std::vector<std::pair<int, int>> bidegrees_exact(int n, int l) {
  std::vector<std::pair<int, int>> out;
  for (int p = l; p >= 0; --p)
    if (valid_bidegree(n, p, l - p)) out.emplace_back(p, l - p);
  return out;
}

std::vector<std::pair<int, int>> bidegrees(int n, int L) {
  std::vector<std::pair<int, int>> out;
  for (int l = 0; l <= L; ++l) {
    auto layer = bidegrees_exact(n, l);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

CVec HarmonicBasis::evaluate(const CVec& z) const {
  return coeffs.transpose() * monomial_values(n, p, q, z);
}

void HarmonicBasis::write_csv(std::ostream& os) const {
  auto join = [](const MultiIndex& m) {
    std::string s;
    for (int j = 0; j < m.dim(); ++j) s += (j ? ";" : "") + std::to_string(m[j]);
    return s;
  };
  os << "p,q,j,alpha,beta,re,im\n";
  os.precision(17);
  for (Eigen::Index j = 0; j < coeffs.cols(); ++j)
    for (Eigen::Index i = 0; i < coeffs.rows(); ++i) {
      const cplx c = coeffs(i, j);
      if (std::abs(c) < 1e-15) continue;
      const auto& m = monomials[static_cast<std::size_t>(i)];
      os << p << ',' << q << ',' << j << ',' << join(m.alpha) << ',' << join(m.beta) << ','
         << c.real() << ',' << c.imag() << '\n';
    }
}

HarmonicBasis harmonic_basis(int n, int p, int q) {
  if (n < 1 || p < 0 || q < 0) throw std::invalid_argument("harmonic_basis: bad bidegree");
  if (!valid_bidegree(n, p, q)) throw std::invalid_argument("harmonic_basis: n = 1 needs min(p, q) = 0");
  HarmonicBasis B;
  B.n = n;
  B.p = p;
  B.q = q;
  B.monomials = bigraded_monomials(n, p, q);
  const auto M = static_cast<Eigen::Index>(B.monomials.size());

  // Kernel of the symbolic Laplacian P_{p,q} -> P_{p-1,q-1}.
  RMat null;
  if (p == 0 || q == 0) {
    null = RMat::Identity(M, M);
  } else {
    RMat L = RMat::Zero(static_cast<Eigen::Index>(bigraded_monomials(n, p - 1, q - 1).size()), M);
    for (Eigen::Index c = 0; c < M; ++c) {
      CVec e = CVec::Zero(M);
      e[c] = 1.0;
      L.col(c) = BigradedPolynomial(n, p, q, e).laplacian().coeffs().real();
    }
    Eigen::JacobiSVD<RMat> svd(L, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    B.laplacian_threshold = 1e-10 * (sv.size() ? sv[0] : 0.0);
    Eigen::Index rank = 0;
    while (rank < sv.size() && sv[rank] > B.laplacian_threshold) ++rank;
    null = svd.matrixV().rightCols(M - rank);
  }

  // Orthonormalize against the sphere rule (Cholesky of the Gram matrix).
  const auto rule = geometry::cached_sphere_quadrature(n, 1.0, 2 * (p + q));
  CMat Phi(rule->size(), M);
  for (Eigen::Index i = 0; i < rule->size(); ++i)
    Phi.row(i) = monomial_values(n, p, q, rule->complex_node(i)).transpose();
  const CMat Y = Phi * null.cast<cplx>();
  CMat G = Y.transpose() * rule->weights.asDiagonal() * Y.conjugate();
  G = 0.5 * (G + G.adjoint()).eval();
  Eigen::LLT<CMat> llt(G);
  if (llt.info() != Eigen::Success) throw std::runtime_error("harmonic_basis: Gram matrix not positive definite");
  const CMat Linv = llt.matrixL().solve(CMat::Identity(G.rows(), G.cols()));
  B.coeffs = null.cast<cplx>() * Linv.transpose();

  for (Eigen::Index j = 0; j < B.coeffs.cols(); ++j)
    B.elements.emplace_back(n, p, q, B.coeffs.col(j), true);
  return B;
}

std::shared_ptr<const HarmonicBasis> cached_harmonic_basis(int n, int p, int q) {
  using Key = std::tuple<int, int, int>;
  static std::mutex mu;
  static std::map<Key, std::shared_ptr<const HarmonicBasis>> cache;
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find({n, p, q}); it != cache.end()) return it->second;
  }
  auto b = std::make_shared<const HarmonicBasis>(harmonic_basis(n, p, q));
  std::lock_guard lock(mu);
  return cache.emplace(Key{n, p, q}, b).first->second;
}

namespace {

CVec random_complex(Eigen::Index m, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  CVec v(m);
  for (Eigen::Index i = 0; i < m; ++i) v[i] = cplx(g(rng), g(rng));
  return v;
}

}  // namespace

BigradedPolynomial random_harmonic(int n, int p, int q, std::mt19937_64& rng) {
  const auto B = cached_harmonic_basis(n, p, q);
  CVec c = random_complex(B->size(), rng).normalized();
  return BigradedPolynomial(n, p, q, B->coeffs * c, true);
}

// ---------------------------------------------------------------------------

namespace {

struct CoefficientEvaluator {
  std::vector<std::pair<std::shared_ptr<const HarmonicBasis>, CVec>> blocks;
  cplx operator()(const CVec& z) const {
    cplx s = 0.0;
    for (const auto& [B, c] : blocks) s += B->evaluate(z).cwiseProduct(c).sum();
    return s;
  }
};

}  // namespace

SphereFunction SphereFunction::from_coefficients(int n, Coefficients c) {
  SphereFunction f;
  f.n_ = n;
  f.L_ = 0;
  CoefficientEvaluator ev;
  for (const auto& [pq, v] : c) {
    const auto B = cached_harmonic_basis(n, pq.first, pq.second);
    if (v.size() != B->size()) throw std::invalid_argument("SphereFunction: coefficient block size mismatch");
    f.L_ = std::max(f.L_, pq.first + pq.second);
    ev.blocks.emplace_back(B, v);
  }
  f.coeffs_ = std::move(c);
  f.f_ = std::move(ev);
  return f;
}

SphereFunction SphereFunction::from_callable(int n, int band_limit, Callable fn) {
  SphereFunction f;
  f.n_ = n;
  f.L_ = band_limit;
  f.f_ = std::move(fn);
  return f;
}

SphereFunction SphereFunction::from_samples(int n, int band_limit,
                                            std::shared_ptr<const geometry::QuadratureRule> rule,
                                            CVec values) {
  if (!rule || values.size() != rule->size()) throw std::invalid_argument("from_samples: sample count mismatch");
  if (rule->exactness_degree < 2 * band_limit)
    throw std::invalid_argument("from_samples: rule degree below twice the band limit");
  if (std::abs(rule->total_mass - geometry::sphere_area(2 * n)) > 1e-12 * rule->total_mass)
    throw std::invalid_argument("from_samples: expects the unnormalized unit-sphere rule");
  Coefficients c;
  for (const auto& [p, q] : bidegrees(n, band_limit)) {
    const auto B = cached_harmonic_basis(n, p, q);
    CVec v = CVec::Zero(B->size());
    for (Eigen::Index i = 0; i < rule->size(); ++i)
      v += rule->weights[i] * values[i] * B->evaluate(rule->complex_node(i)).conjugate();
    c[{p, q}] = v;
  }
  SphereFunction f = from_coefficients(n, std::move(c));
  f.L_ = band_limit;
  f.rule_ = std::move(rule);
  f.samples_ = std::move(values);
  return f;
}

SphereFunction SphereFunction::from_polynomial(const BigradedPolynomial& P) {
  auto fn = [P](const CVec& z) { return P(z); };
  return from_callable(P.n(), P.p() + P.q(), fn);
}

cplx SphereFunction::operator()(const CVec& z) const {
  if (z.size() != n_) throw std::invalid_argument("SphereFunction: dimension mismatch");
  return f_(z);
}

SphereFunction random_band_limited(int n, int L, std::mt19937_64& rng) {
  SphereFunction::Coefficients c;
  double total = 0.0;
  for (const auto& [p, q] : bidegrees(n, L)) {
    CVec v = random_complex(harmonic_dimension(n, p, q), rng);
    total += v.squaredNorm();
    c[{p, q}] = v;
  }
  for (auto& [k, v] : c) v /= std::sqrt(total);
  return SphereFunction::from_coefficients(n, std::move(c));
}

// ---------------------------------------------------------------------------

namespace {

double closed_zonal_constant(int l, int d) {
  if (d == 2) return l == 0 ? 1.0 / (2.0 * kPi) : 1.0 / kPi;
  return (2.0 * l + d - 2.0) / ((d - 2.0) * geometry::sphere_area(d));
}

ZonalCalibration calibrate_zonal(int l, int d) {
  if (d < 2 || d % 2) throw std::invalid_argument("zonal: calibration needs an even ambient dimension");
  if (l < 0) throw std::invalid_argument("zonal: negative degree");
  const int n = d / 2;
  std::mt19937_64 rng(0x2a7f00d5ULL + 131ULL * static_cast<unsigned>(l) + static_cast<unsigned>(d));
  const auto rule = geometry::cached_sphere_quadrature(n, 1.0, 2 * l);

  auto random_Y = [&] {
    std::vector<BigradedPolynomial> parts;
    for (const auto& [p, q] : bidegrees_exact(n, l)) parts.push_back(random_harmonic(n, p, q, rng));
    return parts;
  };
  auto eval = [](const std::vector<BigradedPolynomial>& Y, const CVec& z) {
    cplx s = 0.0;
    for (const auto& P : Y) s += P(z);
    return s;
  };
  auto random_point = [&] {
    std::normal_distribution<double> g;
    RVec v(d);
    for (int i = 0; i < d; ++i) v[i] = g(rng);
    return RVec(v.normalized());
  };
  auto profile = [&](double t) {
    return d == 2 ? specfun::chebyshev_t(l, t) : specfun::gegenbauer(l, 0.5 * (d - 2), t);
  };
  auto integral = [&](const std::vector<BigradedPolynomial>& Y, const RVec& xi) {
    cplx s = 0.0;
    for (Eigen::Index i = 0; i < rule->size(); ++i) {
      const RVec eta = rule->node(i);
      s += rule->weights[i] * profile(std::clamp(xi.dot(eta), -1.0, 1.0)) * eval(Y, to_complex(eta));
    }
    return s;
  };

  // Least squares over a few poles for the first Y.
  const auto Y1 = random_Y();
  cplx num = 0.0;
  double den = 0.0;
  for (int k = 0; k < 4; ++k) {
    const RVec xi = random_point();
    const cplx I = integral(Y1, xi);
    num += std::conj(I) * eval(Y1, to_complex(xi));
    den += std::norm(I);
  }
  ZonalCalibration cal;
  cal.l = l;
  cal.d = d;
  cal.constant = (num / den).real();
  cal.closed_form = closed_zonal_constant(l, d);

  const auto Y2 = random_Y();
  double worst = 0.0, scale = 0.0;
  for (int k = 0; k < 4; ++k) {
    const RVec xi = random_point();
    const cplx y = eval(Y2, to_complex(xi));
    worst = std::max(worst, std::abs(cal.constant * integral(Y2, xi) - y));
    scale = std::max(scale, std::abs(y));
  }
  cal.residual = worst / scale;
  return cal;
}

}  // namespace

ZonalCalibration zonal_calibration(int l, int d) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, ZonalCalibration> cache;
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find({l, d}); it != cache.end()) return it->second;
  }
  const auto cal = calibrate_zonal(l, d);
  std::lock_guard lock(mu);
  return cache.emplace(std::make_pair(l, d), cal).first->second;
}

double zonal_profile(int l, int d, double t) {
  t = std::clamp(t, -1.0, 1.0);
  const double g = d == 2 ? specfun::chebyshev_t(l, t) : specfun::gegenbauer(l, 0.5 * (d - 2), t);
  return zonal_calibration(l, d).constant * g;
}

double zonal(int l, int d, const RVec& xi, const RVec& eta) {
  if (xi.size() != d || eta.size() != d) throw std::invalid_argument("zonal: dimension mismatch");
  return zonal_profile(l, d, xi.dot(eta));
}

FunkHeckeCalibration funk_hecke_calibration(int l, int n) {
  const int d = 2 * n;
  const double e = 0.5 * (2 * n - 3);
  const auto g = geometry::gauss_jacobi(l + 2, e, e);
  double s = 0.0;
  for (Eigen::Index i = 0; i < g.nodes.size(); ++i) {
    const double v = d == 2 ? specfun::chebyshev_t(l, g.nodes[i]) : specfun::gegenbauer(l, n - 1.0, g.nodes[i]);
    s += g.weights[i] * v * v;
  }
  FunkHeckeCalibration cal;
  cal.l = l;
  cal.n = n;
  cal.alpha = 1.0 / (zonal_calibration(l, d).constant * s);
  const double g1 = d == 2 ? 1.0 : specfun::gegenbauer(l, n - 1.0, 1.0);
  cal.closed_form = geometry::sphere_area(d - 1) / g1;
  return cal;
}

double funk_hecke(const std::function<double(double)>& F, int l, int n, int npts) {
  if (n < 1 || l < 0) throw std::invalid_argument("funk_hecke: bad arguments");
  const double e = 0.5 * (2 * n - 3);
  const auto g = geometry::gauss_jacobi(std::max(npts, l + 2), e, e);
  double s = 0.0;
  for (Eigen::Index i = 0; i < g.nodes.size(); ++i) {
    const double t = g.nodes[i];
    const double v = n == 1 ? specfun::chebyshev_t(l, t) : specfun::gegenbauer(l, n - 1.0, t);
    s += g.weights[i] * F(t) * v;
  }
  return funk_hecke_calibration(l, n).alpha * s;
}

namespace {

struct Sampled {
  std::shared_ptr<const geometry::QuadratureRule> rule;
  CVec values;
};

Sampled sample(const SphereFunction& f, int degree) {
  Sampled s;
  s.rule = geometry::cached_sphere_quadrature(f.n(), 1.0, degree);
  s.values.resize(s.rule->size());
  for (Eigen::Index i = 0; i < s.rule->size(); ++i) s.values[i] = f(s.rule->complex_node(i));
  return s;
}

cplx apply_zonal(const Sampled& s, int l, int d, const RVec& xi) {
  cplx acc = 0.0;
  for (Eigen::Index i = 0; i < s.rule->size(); ++i)
    acc += s.rule->weights[i] * zonal_profile(l, d, xi.dot(s.rule->node(i))) * s.values[i];
  return acc;
}

}  // namespace

cplx project_l(const SphereFunction& f, int l, const RVec& xi, Diagnostics* diag, int rule_degree) {
  const int need = f.band_limit() + l;
  if (rule_degree < 0) rule_degree = need;
  if (rule_degree < need)
    warn(diag, "project_l: rule degree " + std::to_string(rule_degree) + " below band limit + l = " +
                   std::to_string(need));
  return apply_zonal(sample(f, rule_degree), l, 2 * f.n(), xi);
}

SphereFunction project_pq(const SphereFunction& f, int p, int q, int theta_points) {
  const int L = f.band_limit();
  if (theta_points < 0) theta_points = 4 * L + 5;
  if (theta_points < 2 * L + 1)
    throw std::invalid_argument("project_pq: theta grid of " + std::to_string(theta_points) +
                                " points aliases band limit " + std::to_string(L));
  const int n = f.n();
  const int l = p + q;
  auto s = std::make_shared<Sampled>(sample(f, L + l));
  auto fn = [s, n, l, p, q, theta_points](const CVec& z) {
    cplx acc = 0.0;
    for (int t = 0; t < theta_points; ++t) {
      const double th = 2.0 * kPi * t / theta_points;
      const cplx rot = std::polar(1.0, th);
      acc += std::polar(1.0, -(p - q) * th) * apply_zonal(*s, l, 2 * n, to_real(rot * z));
    }
    return acc / static_cast<double>(theta_points);
  };
  return SphereFunction::from_callable(n, l, fn);
}

double cesaro_weight(int l, int m, double delta) {
  if (l < 0 || l > m) throw std::invalid_argument("cesaro_weight: needs 0 <= l <= m");
  if (!(delta > 0.0)) throw std::invalid_argument("cesaro_weight: delta must be positive");
  return std::exp(specfun::log_binomial(m - l + delta, delta).first -
                  specfun::log_binomial(m + delta, delta).first);
}

cplx geodesic_mean(const SphereFunction& f, const RVec& omega, double t, int rule_degree) {
  if (omega.size() != 2 * f.n()) throw std::invalid_argument("geodesic_mean: dimension mismatch");
  if (rule_degree < 0) rule_degree = f.band_limit();
  const auto rule = geometry::geodesic_quadrature(omega, t, rule_degree);
  cplx s = 0.0;
  for (Eigen::Index i = 0; i < rule.size(); ++i) s += rule.weights[i] * f(rule.complex_node(i));
  return s;
}

}  // namespace hup::harmonics
