#include "hup/transforms.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <ostream>
#include <random>
#include <stdexcept>
#include <string>

#include "hup/specfun.hpp"

namespace hup::transforms {

namespace {

std::shared_ptr<const geometry::QuadratureRule> unit_rule(int n, int degree, MeasureConvention c) {
  return geometry::cached_sphere_quadrature(n, 1.0, degree, c);
}

// Weight factor when a unit-sphere rule is pushed to S_r.
double radius_factor(int n, double r, MeasureConvention c) {
  return c == MeasureConvention::unnormalized ? std::pow(r, 2 * n - 1) : 1.0;
}

// A fixed generic unit vector in R^{2n}.
RVec generic_direction(int n) {
  RVec w(2 * n);
  for (int j = 0; j < 2 * n; ++j) w[j] = std::sin(1.3 * j + 0.7) + 0.15 * j;
  return w.normalized();
}

}  // namespace

SphereDensity polynomial_density(const BigradedPolynomial& P, double r, MeasureConvention c) {
  const double scale = std::pow(r, P.p() + P.q());
  auto f = SphereFunction::from_callable(P.n(), P.p() + P.q(),
                                         [P, scale](const CVec& nu) { return scale * P(nu); });
  return SphereDensity{r, std::move(f), c};
}

int sft_degree(int band, double freq) {
  const int d = band + static_cast<int>(std::ceil(freq + 10.0 * (1.0 + std::cbrt(freq))));
  return (d + 3) / 4 * 4;
}

cplx symplectic_ft(const SphereDensity& mu, const CVec& z, int degree) {
  const int n = mu.n();
  if (z.size() != n) throw std::invalid_argument("symplectic_ft: dimension mismatch");
  const int band = mu.density.band_limit();
  const double freq = 0.5 * z.norm() * mu.r;
  const int minimal = band + static_cast<int>(std::ceil(freq));
  if (degree < 0) {
    degree = sft_degree(band, freq);
  } else if (degree < minimal) {
    throw std::invalid_argument("symplectic_ft: rule degree " + std::to_string(degree) +
                                " cannot resolve band " + std::to_string(band) + " at |z| r / 2 = " +
                                std::to_string(freq) + "; need at least " + std::to_string(minimal));
  }
  const auto rule = unit_rule(n, degree, mu.convention);
  cplx acc = 0.0;
  for (Eigen::Index i = 0; i < rule->size(); ++i) {
    const CVec nu = rule->complex_node(i);
    const double phase = -0.5 * mu.r * hdot(z, nu).imag();
    acc += rule->weights[i] * std::polar(1.0, phase) * mu.density(nu);
  }
  return acc * radius_factor(n, mu.r, mu.convention);
}

double total_variation(const SphereDensity& mu) {
  const int n = mu.n();
  const auto rule = unit_rule(n, 2 * mu.density.band_limit() + 4, mu.convention);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < rule->size(); ++i) acc += rule->weights[i] * std::abs(mu.density(rule->complex_node(i)));
  return acc * radius_factor(n, mu.r, mu.convention);
}

// ---------------------------------------------------------------------------

double bessel_radial(int n, int l, double s) {
  if (s < 1e-6) {
    // leading term; the next one is O(s^2) smaller
    return std::pow(s, l) / (std::pow(2.0, n - 1 + l) * std::tgamma(n + l)) *
           (1.0 - s * s / (4.0 * (n + l)));
  }
  return specfun::bessel_j(l + n - 1, s) / std::pow(s, n - 1);
}

namespace {

BesselCalibration calibrate_bessel(int n, MeasureConvention c) {
  BesselCalibration cal;
  cal.n = n;
  cal.convention = c;

  const SphereDensity one = polynomial_density(BigradedPolynomial(n, 0, 0, CVec::Ones(1)), 1.0, c);
  const RVec omega = generic_direction(n);
  const CVec dir = to_complex(omega);
  auto F0 = [&](double r) { return symplectic_ft(one, CVec(r * dir)).real(); };

  // F(r) ~ kappa b(c r) fitted by Gauss-Newton at five radii; start from the
  // Taylor term b(s) ~ b(0) (1 - s^2 / 4n)
  const std::vector<double> radii{0.5, 1.25, 2.0, 3.0, 4.0};
  std::vector<double> fv;
  for (double r : radii) fv.push_back(F0(r));
  const double b0 = bessel_radial(n, 0, 0.0);
  double kappa = F0(0.0) / b0;
  double scale = std::sqrt(std::max(4.0 * n * (1.0 - fv[0] / (kappa * b0)), 1e-8)) / radii[0];
  auto db = [n](double s) { return (bessel_radial(n, 0, s + 1e-6) - bessel_radial(n, 0, s - 1e-6)) / 2e-6; };
  for (int it = 0; it < 50; ++it) {
    Eigen::Matrix2d JtJ = Eigen::Matrix2d::Zero();
    Eigen::Vector2d Jtr = Eigen::Vector2d::Zero();
    for (std::size_t i = 0; i < radii.size(); ++i) {
      const double s = scale * radii[i];
      const Eigen::Vector2d g(bessel_radial(n, 0, s), kappa * radii[i] * db(s));
      JtJ += g * g.transpose();
      Jtr += g * (fv[i] - kappa * g[0]);
    }
    const Eigen::Vector2d step = JtJ.ldlt().solve(Jtr);
    kappa += step[0];
    scale += step[1];
    if (std::abs(step[1]) < 1e-15 * scale && std::abs(step[0]) < 1e-15 * std::abs(kappa)) break;
  }
  cal.frequency_scale = scale;
  cal.prefactor = kappa;
  double fmax = 0.0, worst = 0.0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    fmax = std::max(fmax, std::abs(fv[i]));
    worst = std::max(worst, std::abs(fv[i] - kappa * bessel_radial(n, 0, scale * radii[i])));
  }
  cal.prefactor_residual = worst / fmax;
  // independent check of the frequency: transform at the first calibrated Bessel zero
  const auto j = specfun::real_zeros(specfun::ZeroKind::bessel, n - 1, 1, {0.5, 20.0});
  cal.frequency_residual = std::abs(F0(j[0] / scale)) / std::abs(F0(0.0));

  // phase from the degree-one harmonic z_1
  CVec e1 = CVec::Zero(n);
  e1[0] = 1.0;
  const BigradedPolynomial Y(n, 1, 0, e1, true);
  const SphereDensity mu = polynomial_density(Y, 1.0, c);
  const double r = 1.3;
  const cplx Yrot = Y(to_complex(symplectic_rotation(omega)));
  const cplx rho = symplectic_ft(mu, CVec(r * dir)) /
                   (cal.prefactor * kI * bessel_radial(n, 1, cal.frequency_scale * r) * Yrot);
  cal.phase_sign = rho.real() > 0 ? 1 : -1;
  cal.phase_residual = std::abs(rho - double(cal.phase_sign));
  return cal;
}

}  // namespace

BesselCalibration bessel_calibration(int n, MeasureConvention c) {
  static std::mutex mu;
  static std::map<std::pair<int, int>, BesselCalibration> cache;
  const std::pair<int, int> key{n, static_cast<int>(c)};
  {
    std::lock_guard lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const auto cal = calibrate_bessel(n, c);
  std::lock_guard lock(mu);
  return cache.emplace(key, cal).first->second;
}

cplx bessel_form(const BigradedPolynomial& Y, double r, const RVec& omega, MeasureConvention c) {
  const auto cal = bessel_calibration(Y.n(), c);
  const int l = Y.p() + Y.q();
  const cplx phase = std::pow(cplx(0.0, cal.phase_sign), l);
  const RVec w = omega.normalized();
  return cal.prefactor * phase * bessel_radial(Y.n(), l, cal.frequency_scale * r) *
         Y(to_complex(symplectic_rotation(w)));
}

// ---------------------------------------------------------------------------

cplx twisted_convolution(const PlanarFunction& g, const PlanarFunction& h, double lambda, const CVec& z,
                         const PlanarGridOptions& opt, Diagnostics* diag) {
  const int n = g.n;
  if (h.n != n || z.size() != n) throw std::invalid_argument("twisted_convolution: dimension mismatch");
  if (!(opt.step > 0.0)) throw std::invalid_argument("twisted_convolution: step must be positive");
  const int d = 2 * n;
  const RVec zr = to_real(z);

  // integrand support: |w| <= R_h and |z - w| <= R_g, boxed per coordinate
  std::vector<long> lo(d), hi(d);
  double total = 1.0;
  for (int j = 0; j < d; ++j) {
    const double a = std::max(-h.decay_radius, zr[j] - g.decay_radius);
    const double b = std::min(h.decay_radius, zr[j] + g.decay_radius);
    if (a >= b) return 0.0;
    lo[j] = static_cast<long>(std::floor(a / opt.step));
    hi[j] = static_cast<long>(std::ceil(b / opt.step));
    total *= static_cast<double>(hi[j] - lo[j] + 1);
  }
  if (total > 5e7)
    throw std::length_error("twisted_convolution: grid would need " + std::to_string(total) + " points");

  const double freq = 0.5 * std::abs(lambda) * z.norm();
  if (freq * opt.step > 1.0)
    warn(diag, "twisted_convolution: step " + std::to_string(opt.step) +
                   " is coarse for the phase frequency " + std::to_string(freq));

  std::vector<long> idx(lo);
  RVec w(d);
  cplx acc = 0.0;
  double edge = 0.0;
  for (;;) {
    bool boundary = false;
    for (int j = 0; j < d; ++j) {
      w[j] = idx[j] * opt.step;
      boundary = boundary || idx[j] == lo[j] || idx[j] == hi[j];
    }
    const CVec wc = to_complex(w);
    const cplx v = g(CVec(z - wc)) * h(wc) * std::polar(1.0, 0.5 * lambda * hdot(z, wc).imag());
    acc += v;
    if (boundary) edge = std::max(edge, std::abs(v));
    int j = 0;
    while (j < d && ++idx[j] > hi[j]) {
      idx[j] = lo[j];
      ++j;
    }
    if (j == d) break;
  }
  const double cell = std::pow(opt.step, d);
  const double truncation = edge * total * cell;
  if (truncation > opt.tolerance)
    warn(diag, "twisted_convolution: truncation estimate " + std::to_string(truncation) +
                   " exceeds tolerance; enlarge decay_radius");
  return acc * cell;
}

PlanarFunction laguerre_planar(int k, int n) {
  PlanarFunction f;
  f.n = n;
  f.f = [k, n](const CVec& z) { return cplx(specfun::laguerre_function(k, n, z.norm())); };
  f.decay_radius = 2.0 * std::sqrt(37.0) + std::sqrt(8.0 * (k + n));
  return f;
}

cplx spectral_projection(const SphereDensity& mu, int k, const CVec& z, int degree) {
  const int n = mu.n();
  if (z.size() != n) throw std::invalid_argument("spectral_projection: dimension mismatch");
  if (degree < 0) degree = sft_degree(mu.density.band_limit() + k, 0.5 * z.norm() * mu.r);
  const auto rule = unit_rule(n, degree, mu.convention);
  cplx acc = 0.0;
  for (Eigen::Index i = 0; i < rule->size(); ++i) {
    const CVec nu = rule->complex_node(i);
    const CVec omega = mu.r * nu;
    const double phi = specfun::laguerre_function(k, n, (z - omega).norm());
    acc += rule->weights[i] * phi * std::polar(1.0, 0.5 * hdot(z, omega).imag()) * mu.density(nu);
  }
  return acc * radius_factor(n, mu.r, mu.convention);
}

double hecke_bochner_coefficient(int n, int p, int q, int k) {
  if (k < q) return 0.0;
  return std::pow(2.0 * kPi, -n) * std::exp(std::lgamma(k - q + 1.0) - std::lgamma(double(k + n + p)));
}

cplx hecke_bochner_form(const BigradedPolynomial& P, double r, int k, const CVec& z) {
  const int n = P.n(), p = P.p(), q = P.q();
  if (k < q) return 0.0;
  const double order = n + p + q - 1;
  const double B = hecke_bochner_coefficient(n, p, q, k);
  return B * std::pow(r, 2 * (p + q)) * specfun::laguerre_function_order(k - q, order, r) * P(z) *
         specfun::laguerre_function_order(k - q, order, z.norm());
}

double hecke_bochner_ratio(const HeckeBochnerCalibration& cal, int p, int q) {
  return cal.constant * std::pow(cal.degree_factor, p + q);
}

HeckeBochnerCalibration hecke_bochner_calibration(int n) {
  HeckeBochnerCalibration cal;
  cal.n = n;
  cal.radii = {0.6, 1.0, 1.5, 2.2};
  std::mt19937_64 rng(0x4b1d);
  struct Case { int p, q, k; };
  std::vector<Case> cases{{0, 0, 0}, {1, 0, 1}, {0, 1, 2}, {1, 1, 2}};
  if (n == 1) cases = {{0, 0, 0}, {1, 0, 1}, {0, 1, 2}, {2, 0, 3}};
  CVec z = to_complex(generic_direction(n)) * 0.8;

  auto ratio = [&](const BigradedPolynomial& P, double r, int k, MeasureConvention c) {
    return (spectral_projection(polynomial_density(P, r, c), k, z) / hecke_bochner_form(P, r, k, z)).real();
  };

  std::vector<BigradedPolynomial> polys;
  for (const auto& cs : cases) polys.push_back(harmonics::random_harmonic(n, cs.p, cs.q, rng));

  for (double r : cal.radii) {
    cal.ratio_unnormalized.push_back(ratio(polys[0], r, 0, MeasureConvention::unnormalized));
    cal.ratio_normalized.push_back(ratio(polys[0], r, 0, MeasureConvention::normalized));
  }
  auto spread_of = [](const std::vector<double>& v) {
    const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    return std::pair{(*mx - *mn) / std::abs(mean), mean};
  };
  cal.chosen = spread_of(cal.ratio_normalized).first <= spread_of(cal.ratio_unnormalized).first
                   ? MeasureConvention::normalized
                   : MeasureConvention::unnormalized;

  cal.constant = ratio(polys[0], 1.0, 0, cal.chosen);
  cal.degree_factor = ratio(polys[1], 1.0, cases[1].k, cal.chosen) / cal.constant;
  for (std::size_t c = 0; c < cases.size(); ++c)
    for (double r : cal.radii) {
      const double model = hecke_bochner_ratio(cal, cases[c].p, cases[c].q);
      cal.spread = std::max(cal.spread, std::abs(ratio(polys[c], r, cases[c].k, cal.chosen) / model - 1.0));
    }
  return cal;
}

// ---------------------------------------------------------------------------

CMat matrix_elements_1d(int amax, int bmax, double x, double y, double lambda) {
  if (lambda == 0.0) throw std::invalid_argument("matrix_elements_1d: lambda must be nonzero");
  const double s = std::sqrt(std::abs(lambda));
  const double X = (lambda > 0 ? s : -s) * x;
  const double Y = s * y;
  const double Ba = std::sqrt(2.0 * amax + 1.0) + 8.0;
  const double Bb = std::sqrt(2.0 * bmax + 1.0) + 8.0;
  CMat M = CMat::Zero(amax + 1, bmax + 1);
  const double lo = std::max(-Bb, -Y - Ba), hi = std::min(Bb, -Y + Ba);
  if (lo >= hi) return M;
  const double hmax = 2.0 * kPi / (std::abs(X) + std::sqrt(2.0 * amax + 1.0) + std::sqrt(2.0 * bmax + 1.0) + 10.0);
  const int N = std::max(8, static_cast<int>(std::ceil((hi - lo) / hmax)));
  const double h = (hi - lo) / N;
  for (int i = 0; i <= N; ++i) {
    const double u = lo + i * h;
    const double w = (i == 0 || i == N) ? 0.5 * h : h;
    const RVec ha = specfun::hermite_functions_1d(amax, u + Y);
    const RVec hb = specfun::hermite_functions_1d(bmax, u);
    M += (w * std::polar(1.0, X * u)) * (ha * hb.transpose()).cast<cplx>();
  }
  return M * std::polar(1.0, 0.5 * X * Y);
}

cplx matrix_element(const MultiIndex& alpha, const MultiIndex& beta, const CVec& z, double lambda) {
  const int n = alpha.dim();
  if (beta.dim() != n || z.size() != n) throw std::invalid_argument("matrix_element: dimension mismatch");
  cplx prod = 1.0;
  for (int j = 0; j < n; ++j)
    prod *= matrix_elements_1d(alpha[j], beta[j], z[j].real(), z[j].imag(), lambda)(alpha[j], beta[j]);
  return prod;
}

cplx special_hermite(const MultiIndex& alpha, const MultiIndex& beta, const CVec& z, double lambda) {
  const double n = alpha.dim();
  return std::pow(std::abs(lambda) / (2.0 * kPi), 0.5 * n) * matrix_element(alpha, beta, z, lambda);
}

cplx coherent_coefficient(const MultiIndex& alpha) {
  cplx c = 1.0;
  for (int a : alpha.entries()) c *= std::pow(kI, a) / std::sqrt(std::pow(2.0, a) * std::tgamma(a + 1.0));
  return c;
}

cplx modified_ft_entry(const CylinderDensity& mu, const CVec& z, double lambda, const MultiIndex& alpha,
                       int degree) {
  const SphereDensity& s = mu.sphere;
  const int n = s.n();
  if (z.size() != n || alpha.dim() != n) throw std::invalid_argument("modified_ft_entry: dimension mismatch");
  if (degree < 0) degree = sft_degree(s.density.band_limit() + alpha.order(), std::abs(lambda) * s.r * z.norm());
  const auto rule = unit_rule(n, degree, s.convention);
  const MultiIndex zero(std::vector<int>(static_cast<std::size_t>(n), 0));
  cplx acc = 0.0;
  for (Eigen::Index i = 0; i < rule->size(); ++i) {
    const CVec nu = rule->complex_node(i);
    const CVec zeta = s.r * nu;
    acc += rule->weights[i] * std::polar(1.0, -lambda * hdot(z, zeta).imag()) * s.density(nu) *
           matrix_element(zero, alpha, zeta, lambda);
  }
  return acc * mu.v_hat(lambda) * radius_factor(n, s.r, s.convention);
}

void write_transform_csv(std::ostream& os, const std::vector<CVec>& points, const std::vector<cplx>& values) {
  if (points.size() != values.size()) throw std::invalid_argument("write_transform_csv: size mismatch");
  if (points.empty()) {
    os << "re,im\n";
    return;
  }
  const auto n = points.front().size();
  for (Eigen::Index j = 0; j < n; ++j) os << 'x' << j + 1 << ',';
  for (Eigen::Index j = 0; j < n; ++j) os << 'y' << j + 1 << ',';
  os << "re,im\n";
  os.precision(17);
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (Eigen::Index j = 0; j < n; ++j) os << points[i][j].real() << ',';
    for (Eigen::Index j = 0; j < n; ++j) os << points[i][j].imag() << ',';
    os << values[i].real() << ',' << values[i].imag() << '\n';
  }
}

}  // namespace hup::transforms
