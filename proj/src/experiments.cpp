#include "hup/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <Eigen/SVD>

#include "hup/specfun.hpp"
#include "hup/transforms.hpp"
#include "hup/weyl.hpp"

namespace hup::experiments {

using harmonics::BigradedPolynomial;
using harmonics::cached_harmonic_basis;
using harmonics::harmonic_dimension;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

json cvec_json(const CVec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back({v[i].real(), v[i].imag()});
  return a;
}

template <class F>
void parallel_for(int count, int jobs, F&& body) {
  jobs = std::max(1, std::min(jobs, count));
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(jobs));
  for (int t = 0; t < jobs; ++t)
    pool.emplace_back([&, t] {
      try {
        for (int i = t; i < count; i += jobs) body(i);
      } catch (...) {
        errors[static_cast<std::size_t>(t)] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

int max_block_dimension(int n, int L, RankVariant v) {
  int best = 1;
  for (int l = 0; l <= L; ++l) {
    int layer = 0;
    for (auto [p, q] : harmonics::bidegrees_exact(n, l)) {
      layer += harmonic_dimension(n, p, q);
      if (v == RankVariant::spectral) best = std::max(best, harmonic_dimension(n, p, q));
    }
    if (v == RankVariant::fourier) best = std::max(best, layer);
  }
  return best;
}

int rotations(const RankExperimentConfig& cfg) { return cfg.theta_augment ? 4 * cfg.L + 5 : 1; }

int effective_k_max(const RankExperimentConfig& cfg) { return cfg.k_max >= 0 ? cfg.k_max : cfg.L + 2; }

int effective_directions(const RankExperimentConfig& cfg) {
  return cfg.directions > 0 ? cfg.directions : 2 * max_block_dimension(cfg.n, cfg.L, cfg.variant);
}

json bessel_json(const transforms::BesselCalibration& b) {
  return {{"n", b.n},
          {"convention", geometry::to_string(b.convention)},
          {"frequency_scale", b.frequency_scale},
          {"prefactor", b.prefactor},
          {"phase_sign", b.phase_sign},
          {"frequency_residual", b.frequency_residual},
          {"prefactor_residual", b.prefactor_residual},
          {"phase_residual", b.phase_residual}};
}

json hb_json(const transforms::HeckeBochnerCalibration& c) {
  return {{"n", c.n},
          {"radii", c.radii},
          {"ratio_unnormalized", c.ratio_unnormalized},
          {"ratio_normalized", c.ratio_normalized},
          {"chosen", geometry::to_string(c.chosen)},
          {"constant", c.constant},
          {"degree_factor", c.degree_factor},
          {"spread", c.spread}};
}

// Bessel zeros of J_{l+n-1}, l <= L, below s_max.
std::vector<double> bessel_zeros(int n, int L, double s_max) {
  std::vector<double> out;
  for (int l = 0; l <= L; ++l) {
    try {
      auto z = specfun::real_zeros(specfun::ZeroKind::bessel, l + n - 1, 64, {0.5, s_max + 1.0});
      out.insert(out.end(), z.begin(), z.end());
    } catch (const specfun::BracketError&) {
    }
  }
  return out;
}

}  // namespace

const char* to_string(RankVariant v) { return v == RankVariant::fourier ? "fourier" : "spectral"; }

int RankExperimentConfig::coefficient_dimension() const {
  int d = 0;
  for (auto [p, q] : harmonics::bidegrees(n, L)) d += harmonic_dimension(n, p, q);
  return d;
}

int RankExperimentConfig::sample_count(const ConeSampler&) const {
  return effective_directions(*this) * rotations(*this) * static_cast<int>(radii.size());
}

void RankExperimentConfig::validate() const {
  if (n < 1 || n > 3) throw std::invalid_argument("hup_rank: n must be 1, 2 or 3");
  if (L < 0) throw std::invalid_argument("hup_rank: negative band limit");
  if (radii.empty()) throw std::invalid_argument("hup_rank: empty radius list");
  for (double r : radii)
    if (!(r > 0.0)) throw std::invalid_argument("hup_rank: radii must be positive");
  if (!(threshold > 0.0 && threshold < 1.0)) throw std::invalid_argument("hup_rank: threshold must lie in (0, 1)");
  if (directions < 0) throw std::invalid_argument("hup_rank: negative direction count");
}

std::vector<CoefficientLabel> coefficient_labels(int n, int L) {
  std::vector<CoefficientLabel> out;
  for (auto [p, q] : harmonics::bidegrees(n, L))
    for (int j = 0; j < harmonic_dimension(n, p, q); ++j) out.push_back({p, q, j});
  return out;
}

RankSystem assemble_rank_system(const RankExperimentConfig& cfg, const ConeSampler& cone) {
  cfg.validate();
  if (cone.dim != 2 * cfg.n) throw std::invalid_argument("hup_rank: cone dimension does not match n");
  RankSystem sys;
  sys.labels = coefficient_labels(cfg.n, cfg.L);
  const int ncols = static_cast<int>(sys.labels.size());

  std::vector<double> radii;
  if (cfg.variant == RankVariant::fourier) {
    const auto cal = transforms::bessel_calibration(cfg.n);
    const double smax = cal.frequency_scale * *std::max_element(cfg.radii.begin(), cfg.radii.end());
    const auto zeros = bessel_zeros(cfg.n, cfg.L, smax);
    for (double r : cfg.radii) {
      const double s = cal.frequency_scale * r;
      bool near = false;
      for (double z : zeros) near = near || std::abs(s - z) < 1e-3;
      if (near)
        sys.dropped_radii.push_back(r);
      else
        radii.push_back(r);
    }
    if (radii.empty()) throw std::invalid_argument("hup_rank: every radius sits on a Bessel zero");
    if (!sys.dropped_radii.empty()) sys.warnings.push_back("radii near Bessel zeros dropped");
    if (static_cast<int>(radii.size()) < cfg.L + 1)
      sys.warnings.push_back("fewer radii than degrees; radial factors cannot separate all degrees");
  } else {
    radii = cfg.radii;
  }

  const int ndir = effective_directions(cfg), nrot = rotations(cfg);
  const int nk = cfg.variant == RankVariant::spectral ? effective_k_max(cfg) + 1 : 1;
  const int total = ndir * nrot * static_cast<int>(radii.size());
  if (total < ncols)
    throw std::invalid_argument("hup_rank: underdetermined (" + std::to_string(total) + " samples for " +
                                std::to_string(ncols) + " coefficients)");

  ConeSampler unit = cone;
  unit.radii = {1.0};
  const auto dirs = geometry::sample_cone(unit, ndir);
  for (const auto& d : dirs) {
    const CVec w = to_complex(d);
    for (int t = 0; t < nrot; ++t) {
      const cplx rot = std::polar(1.0, 2.0 * kPi * t / nrot);
      for (double r : radii) sys.points.push_back(w * rot * r);
    }
  }

  transforms::HeckeBochnerCalibration hb;
  if (cfg.variant == RankVariant::spectral) hb = transforms::hecke_bochner_calibration(cfg.n);
  else transforms::bessel_calibration(cfg.n);

  std::vector<std::shared_ptr<const harmonics::HarmonicBasis>> bases;
  for (auto [p, q] : harmonics::bidegrees(cfg.n, cfg.L)) bases.push_back(cached_harmonic_basis(cfg.n, p, q));

  sys.matrix = CMat::Zero(static_cast<Eigen::Index>(sys.points.size()) * nk, ncols);
  parallel_for(static_cast<int>(sys.points.size()), cfg.jobs, [&](int i) {
    const CVec& z = sys.points[static_cast<std::size_t>(i)];
    const double rho = z.norm();
    int col = 0;
    for (const auto& B : bases) {
      const int l = B->p + B->q;
      if (cfg.variant == RankVariant::fourier) {
        const auto cal = transforms::bessel_calibration(cfg.n);
        const cplx radial = cal.prefactor * std::pow(cplx(0.0, cal.phase_sign), l) *
                            transforms::bessel_radial(cfg.n, l, cal.frequency_scale * rho);
        const CVec vals = B->evaluate(to_complex(symplectic_rotation(to_real(z) / rho)));
        for (int j = 0; j < B->size(); ++j) sys.matrix(i, col + j) = radial * vals[j];
      } else {
        const CVec vals = B->evaluate(z);
        const double ratio = transforms::hecke_bochner_ratio(hb, B->p, B->q);
        const double order = cfg.n + l - 1;
        for (int k = 0; k < nk; ++k) {
          if (k < B->q) continue;
          const double factor = ratio * transforms::hecke_bochner_coefficient(cfg.n, B->p, B->q, k) *
                                specfun::laguerre_function_order(k - B->q, order, 1.0) *
                                specfun::laguerre_function_order(k - B->q, order, rho);
          for (int j = 0; j < B->size(); ++j) sys.matrix(static_cast<Eigen::Index>(i) * nk + k, col + j) = factor * vals[j];
        }
      }
      col += B->size();
    }
  });

  sys.column_scale = RVec::Ones(ncols);
  int col = 0;
  for (const auto& B : bases) {
    const int l = B->p + B->q;
    double size = 0.0;
    for (double r : radii) {
      if (cfg.variant == RankVariant::fourier) {
        const auto cal = transforms::bessel_calibration(cfg.n);
        size = std::max(size, std::abs(cal.prefactor * transforms::bessel_radial(cfg.n, l, cal.frequency_scale * r)));
      } else {
        for (int k = B->q; k < nk; ++k)
          size = std::max(size, std::abs(transforms::hecke_bochner_ratio(hb, B->p, B->q) *
                                         transforms::hecke_bochner_coefficient(cfg.n, B->p, B->q, k) *
                                         specfun::laguerre_function_order(k - B->q, cfg.n + l - 1, 1.0) *
                                         specfun::laguerre_function_order(k - B->q, cfg.n + l - 1, r) *
                                         std::pow(r, l)));
      }
    }
    if (size > 0.0) sys.column_scale.segment(col, B->size()).setConstant(1.0 / size);
    col += B->size();
  }
  return sys;
}

RankAnalysis analyze_rank(const CMat& A, double threshold, const RVec& column_scale) {
  RankAnalysis out;
  const RVec scale = column_scale.size() == A.cols() ? column_scale : RVec::Ones(A.cols());
  const CMat B = A * scale.asDiagonal();
  Eigen::BDCSVD<CMat> svd(B, Eigen::ComputeThinV);
  out.singular_values = svd.singularValues();
  const Eigen::Index m = out.singular_values.size();
  if (m == 0) return out;
  const double smax = out.singular_values[0];
  auto nullity_at = [&](double thr) {
    int c = 0;
    for (Eigen::Index i = 0; i < m; ++i) c += out.singular_values[i] < thr * smax ? 1 : 0;
    return c + static_cast<int>(A.cols() - m);
  };
  out.nullity = nullity_at(threshold);
  out.robust = nullity_at(threshold / 10.0) == out.nullity && nullity_at(threshold * 10.0) == out.nullity;
  out.ratio = smax > 0.0 ? out.singular_values[m - 1] / smax : 0.0;
  if (A.cols() > m) out.ratio = 0.0;
  if (out.nullity > 0) {
    const CMat& V = svd.matrixV();
    CMat N(A.cols(), out.nullity);
    int c = 0;
    for (Eigen::Index i = 0; i < V.cols(); ++i)
      if (out.singular_values[i] < threshold * smax) N.col(c++) = scale.asDiagonal() * V.col(i);
    N.conservativeResize(Eigen::NoChange, c);
    Eigen::HouseholderQR<CMat> qr(N);
    const CMat Q = qr.householderQ() * CMat::Identity(A.cols(), c);
    for (int i = 0; i < c; ++i) out.nullspace.push_back(Q.col(i));
  }
  return out;
}

int direct_vanishing_count(const RankExperimentConfig& cfg, const RankSystem& sys) {
  // unit directions as they enter the harmonic factor
  std::vector<CVec> dirs;
  for (const auto& z : sys.points) {
    RVec w = to_real(z).normalized();
    if (cfg.variant == RankVariant::fourier) w = symplectic_rotation(w);
    dirs.push_back(to_complex(w));
  }
  std::vector<std::vector<std::pair<int, int>>> blocks;
  for (int l = 0; l <= cfg.L; ++l) {
    auto layer = harmonics::bidegrees_exact(cfg.n, l);
    if (cfg.variant == RankVariant::fourier)
      blocks.push_back(layer);
    else
      for (auto pq : layer) blocks.push_back({pq});
  }
  int count = 0;
  for (const auto& block : blocks) {
    int cols = 0;
    for (auto [p, q] : block) cols += harmonic_dimension(cfg.n, p, q);
    if (cols == 0) continue;
    CMat E(static_cast<Eigen::Index>(dirs.size()), cols);
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      int c = 0;
      for (auto [p, q] : block) {
        const CVec v = cached_harmonic_basis(cfg.n, p, q)->evaluate(dirs[i]);
        E.row(static_cast<Eigen::Index>(i)).segment(c, v.size()) = v.transpose();
        c += static_cast<int>(v.size());
      }
    }
    count += analyze_rank(E, cfg.threshold).nullity;
  }
  return count;
}

double nullspace_residual(const std::vector<CVec>& nullspace, const CVec& v) {
  CVec r = v;
  for (const auto& b : nullspace) r -= b * b.dot(r);
  return r.norm() / v.norm();
}

CVec harmonic_coefficients(const BigradedPolynomial& Y, int L) {
  const int n = Y.n();
  const auto labels = coefficient_labels(n, L);
  CVec out = CVec::Zero(static_cast<Eigen::Index>(labels.size()));
  const auto B = cached_harmonic_basis(n, Y.p(), Y.q());
  const CVec c = B->coeffs.colPivHouseholderQr().solve(Y.coeffs());
  if ((B->coeffs * c - Y.coeffs()).norm() > 1e-10 * (1.0 + Y.coeffs().norm()))
    throw std::invalid_argument("harmonic_coefficients: polynomial is not harmonic");
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i].p == Y.p() && labels[i].q == Y.q()) out[static_cast<Eigen::Index>(i)] = c[labels[i].j];
  return out;
}

BigradedPolynomial harmonic_11(int n) {
  if (n < 2) throw std::invalid_argument("harmonic_11: needs n >= 2");
  BigradedPolynomial P(n, 1, 1);
  CVec c = CVec::Zero(static_cast<Eigen::Index>(P.monomials().size()));
  for (std::size_t i = 0; i < P.monomials().size(); ++i) {
    const auto& m = P.monomials()[i];
    if (m.alpha[0] == 1 && m.beta[0] == 1) c[static_cast<Eigen::Index>(i)] = 1.0;
    if (m.alpha[1] == 1 && m.beta[1] == 1) c[static_cast<Eigen::Index>(i)] = -1.0;
  }
  return BigradedPolynomial(n, 1, 1, c, true);
}

ConeSampler harmonic_cone_11(int n, std::vector<double> radii) {
  if (n < 2) throw std::invalid_argument("harmonic_cone_11: needs n >= 2");
  ConeSampler c;
  c.kind = geometry::ConeKind::custom;
  c.dim = 2 * n;
  c.radii = std::move(radii);
  c.complex_scaling_closed = true;
  c.generator = [n](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 2.0 * kPi);
    std::normal_distribution<double> gauss(0.0, 1.0);
    CVec z(n);
    const double a = std::abs(gauss(rng)) + 0.1;
    z[0] = std::polar(a, unif(rng));
    z[1] = std::polar(a, unif(rng));
    for (int j = 2; j < n; ++j) z[j] = cplx(gauss(rng), gauss(rng));
    return to_real(z);
  };
  c.residual_fn = [](const RVec& x) {
    const CVec z = to_complex(x);
    return std::abs(std::norm(z[0]) - std::norm(z[1])) / x.squaredNorm();
  };
  return c;
}

ConeSampler quadric_h_cone(int n, cplx a, std::vector<double> radii) {
  if (n < 2) throw std::invalid_argument("quadric_h_cone: needs n >= 2");
  if (std::abs(a) <= 2.0) throw std::domain_error("quadric_h_cone: needs |a| > 2");
  ConeSampler c;
  c.kind = geometry::ConeKind::custom;
  c.a = a;
  c.dim = 2 * n;
  c.radii = std::move(radii);
  c.complex_scaling_closed = true;
  c.generator = [n, a](std::mt19937_64& rng) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double A = std::abs(a);
    // |a| cos(theta) <= -2 keeps the discriminant nonnegative
    const double half = std::acos(2.0 / A);
    const double theta = kPi + (2.0 * unif(rng) - 1.0) * half;
    const double b = -A * std::cos(theta);
    const double R2 = n >= 3 ? unif(rng) * (0.25 * b * b - 1.0) : 0.0;
    const double disc = std::sqrt(std::max(b * b - 4.0 * (1.0 + R2), 0.0));
    const double rho = 0.5 * (b + (unif(rng) < 0.5 ? disc : -disc));
    const double phi = 2.0 * kPi * unif(rng);
    CVec z = CVec::Zero(n);
    z[0] = std::polar(rho, phi + theta - std::arg(a));
    z[1] = std::polar(1.0, phi);
    if (n >= 3) {
      CVec rest(n - 2);
      for (Eigen::Index j = 0; j < rest.size(); ++j) rest[j] = cplx(gauss(rng), gauss(rng));
      z.tail(n - 2) = rest.normalized() * std::sqrt(R2);
    }
    return to_real(z);
  };
  c.residual_fn = [a](const RVec& x) {
    const CVec z = to_complex(x);
    return std::abs((a * z[0] * std::conj(z[1])).real() + z.squaredNorm()) / x.squaredNorm();
  };
  return c;
}

json ExperimentReport::to_json() const {
  json r = results;
  r["singular_values"] = singular_values;
  json ns = json::array();
  for (const auto& v : nullspace) ns.push_back(cvec_json(v));
  r["nullspace"] = ns;
  return {{"experiment", experiment},
          {"inputs", inputs},
          {"results", r},
          {"calibration", calibration},
          {"verdict", verdict},
          {"exploratory", exploratory},
          {"timing", {{"wall_seconds", wall_seconds}}},
          {"warnings", warnings}};
}

ExperimentReport hup_rank(const RankExperimentConfig& cfg, const ConeSampler& cone) {
  const auto t0 = Clock::now();
  ExperimentReport rep;
  rep.experiment = "hup_rank";
  rep.inputs = {{"n", cfg.n},
                {"L", cfg.L},
                {"variant", to_string(cfg.variant)},
                {"directions", effective_directions(cfg)},
                {"radii", cfg.radii},
                {"theta_augment", cfg.theta_augment},
                {"k_max", cfg.variant == RankVariant::spectral ? effective_k_max(cfg) : -1},
                {"threshold", cfg.threshold},
                {"cone_seed", cone.seed},
                {"complex_scaling_closed", cone.complex_scaling_closed}};

  const auto sys = assemble_rank_system(cfg, cone);
  rep.warnings = sys.warnings;
  const auto an = analyze_rank(sys.matrix, cfg.threshold, sys.column_scale);
  rep.singular_values.assign(an.singular_values.data(), an.singular_values.data() + an.singular_values.size());
  rep.nullspace = an.nullspace;

  double cone_residual = 0.0;
  for (const auto& z : sys.points) cone_residual = std::max(cone_residual, cone.residual(to_real(z)));

  // a few entries against direct quadrature
  double check = 0.0;
  const double scale = sys.matrix.cwiseAbs().maxCoeff();
  const int nk = cfg.variant == RankVariant::spectral ? effective_k_max(cfg) + 1 : 1;
  for (int c = 0; c < cfg.entry_checks && !sys.points.empty(); ++c) {
    const std::size_t pi = (static_cast<std::size_t>(c) * 7919u) % sys.points.size();
    const int col = (c * 31) % static_cast<int>(sys.labels.size());
    const auto& lab = sys.labels[static_cast<std::size_t>(col)];
    const auto Y = cached_harmonic_basis(cfg.n, lab.p, lab.q)->elements[static_cast<std::size_t>(lab.j)];
    cplx direct;
    int k = 0;
    if (cfg.variant == RankVariant::fourier) {
      direct = transforms::symplectic_ft(transforms::polynomial_density(Y, 1.0), sys.points[pi], cfg.quadrature_degree);
    } else {
      const auto hb = transforms::hecke_bochner_calibration(cfg.n);
      k = std::min(nk - 1, lab.q + c);
      direct = transforms::spectral_projection(transforms::polynomial_density(Y, 1.0, hb.chosen), k,
                                               sys.points[pi], cfg.quadrature_degree);
    }
    const cplx entry = sys.matrix(static_cast<Eigen::Index>(pi) * nk + k, col);
    check = std::max(check, std::abs(direct - entry) / scale);
  }

  const int vanishing = direct_vanishing_count(cfg, sys);
  rep.results = {{"rows", sys.matrix.rows()},
                 {"columns", sys.matrix.cols()},
                 {"ratio", an.ratio},
                 {"nullity", an.nullity},
                 {"threshold_robust", an.robust},
                 {"direct_vanishing_count", vanishing},
                 {"entry_check_residual", check},
                 {"cone_residual", cone_residual},
                 {"dropped_radii", sys.dropped_radii}};
  rep.calibration["bessel"] = bessel_json(transforms::bessel_calibration(cfg.n));
  if (cfg.variant == RankVariant::spectral)
    rep.calibration["hecke_bochner"] = hb_json(transforms::hecke_bochner_calibration(cfg.n));

  if (!an.robust) {
    rep.verdict = "INCONCLUSIVE";
    rep.warnings.push_back("nullity changes under a x10 threshold change");
  } else {
    rep.verdict = an.nullity == 0 ? "FULL-RANK" : "NON-TRIVIAL-NULLSPACE";
  }
  if (vanishing != an.nullity) rep.warnings.push_back("nullity differs from the direct vanishing count");
  rep.exploratory = !cone.complex_scaling_closed;
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------------------

double adversarial_radius(int n, int p, int q, int k0) {
  if (k0 - q < 1) throw std::invalid_argument("adversarial_radius: L_{k0-q} has no zeros");
  const double order = n + p + q - 1;
  const int m = k0 - q;
  const double hi = 4.0 * m + 2.0 * order + 10.0;
  const auto zeros = specfun::real_zeros(specfun::ZeroKind::laguerre, order, m, {1e-9, hi});
  return std::sqrt(2.0 * zeros.front());
}

ExperimentReport spectral_determinacy(const DeterminacyConfig& cfg) {
  const auto t0 = Clock::now();
  if (!(cfg.r1 > 0.0 && cfg.r2 > 0.0)) throw std::invalid_argument("spectral_determinacy: radii must be positive");
  if (cfg.K < cfg.L) throw std::invalid_argument("spectral_determinacy: K must be at least L");
  ExperimentReport rep;
  rep.experiment = "spectral_determinacy";
  rep.inputs = {{"n", cfg.n}, {"r1", cfg.r1}, {"r2", cfg.r2}, {"L", cfg.L}, {"K", cfg.K},
                {"threshold", cfg.threshold}, {"witness_floor", cfg.witness_floor}, {"seed", cfg.seed}};

  const auto labels = coefficient_labels(cfg.n, cfg.L);
  const int ncols = static_cast<int>(labels.size());
  const int ndir = cfg.directions > 0 ? cfg.directions : 2 * ncols;
  const int nk = cfg.K + 1;
  const auto hb = transforms::hecke_bochner_calibration(cfg.n);

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<CVec> points;
  for (int d = 0; d < ndir; ++d) {
    RVec x(2 * cfg.n);
    for (Eigen::Index j = 0; j < x.size(); ++j) x[j] = gauss(rng);
    points.push_back(to_complex(x.normalized() * cfg.r2));
  }

  CMat A = CMat::Zero(static_cast<Eigen::Index>(ndir) * nk, ncols);
  RVec scale = RVec::Ones(ncols);
  json witnesses = json::array();
  bool all_witnessed = true;
  double k_lt_q_max = 0.0;
  int col = 0;
  for (auto [p, q] : harmonics::bidegrees(cfg.n, cfg.L)) {
    const auto B = cached_harmonic_basis(cfg.n, p, q);
    const double order = cfg.n + p + q - 1;
    double best = 0.0;
    int best_k = -1;
    for (int k = q; k <= cfg.K; ++k) {
      const double w = std::abs(specfun::laguerre_function_order(k - q, order, cfg.r1) *
                                specfun::laguerre_function_order(k - q, order, cfg.r2));
      if (w > best) best = w, best_k = k;
    }
    all_witnessed = all_witnessed && best > cfg.witness_floor;
    witnesses.push_back({{"p", p}, {"q", q}, {"max_factor", best}, {"k", best_k}});
    double size = 0.0;
    for (int d = 0; d < ndir; ++d) {
      const CVec vals = B->evaluate(points[static_cast<std::size_t>(d)]);
      for (int k = 0; k < nk; ++k) {
        const double f = hecke_bochner_ratio(hb, p, q) * transforms::hecke_bochner_coefficient(cfg.n, p, q, k) *
                         std::pow(cfg.r1, 2 * (p + q)) *
                         (k < q ? 0.0
                                : specfun::laguerre_function_order(k - q, order, cfg.r1) *
                                      specfun::laguerre_function_order(k - q, order, cfg.r2));
        size = std::max(size, std::abs(f) * std::pow(cfg.r2, p + q));
        for (int j = 0; j < B->size(); ++j) A(static_cast<Eigen::Index>(d) * nk + k, col + j) = f * vals[j];
      }
    }
    for (int d = 0; d < ndir; ++d)
      for (int k = 0; k < std::min(q, nk); ++k)
        k_lt_q_max = std::max(k_lt_q_max, A.row(static_cast<Eigen::Index>(d) * nk + k).segment(col, B->size()).cwiseAbs().maxCoeff());
    if (size > 0.0) scale.segment(col, B->size()).setConstant(1.0 / size);
    col += B->size();
  }

  const auto an = analyze_rank(A, cfg.threshold, scale);
  rep.singular_values.assign(an.singular_values.data(), an.singular_values.data() + an.singular_values.size());
  rep.nullspace = an.nullspace;
  rep.results = {{"rows", A.rows()},
                 {"columns", A.cols()},
                 {"ratio", an.ratio},
                 {"nullity", an.nullity},
                 {"threshold_robust", an.robust},
                 {"witnesses", witnesses},
                 {"all_witnessed", all_witnessed},
                 {"k_lt_q_max_abs", k_lt_q_max}};
  rep.calibration["hecke_bochner"] = hb_json(hb);
  rep.verdict = !an.robust ? "INCONCLUSIVE" : (an.nullity == 0 ? "FULL-RANK" : "NON-TRIVIAL-NULLSPACE");
  if (!an.robust) rep.warnings.push_back("nullity changes under a x10 threshold change");
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

// ---------------------------------------------------------------------------

ExperimentReport finite_rank_experiment(const AnnihilationConfig& cfg) {
  const auto t0 = Clock::now();
  ExperimentReport rep;
  rep.experiment = "finite_rank_annihilation";
  rep.inputs = {{"N", cfg.N}, {"M", cfg.M}, {"trials", cfg.trials}, {"iterations", cfg.iterations},
                {"seed", cfg.seed}, {"step", cfg.step}, {"floor", cfg.floor}};
  const auto r = weyl::finite_rank_annihilation(cfg.region, cfg.N, cfg.M, cfg.trials, cfg.iterations, cfg.seed, cfg.step);
  std::vector<double> thinned;
  for (std::size_t i = 0; i < r.history.size(); i += 10) thinned.push_back(r.history[i]);
  if (!r.history.empty()) thinned.push_back(r.history.back());
  rep.results = {{"defect", r.defect},
                 {"exact_defect", r.exact_defect},
                 {"iterations", r.iterations},
                 {"history_every_10", thinned}};
  rep.verdict = r.defect > cfg.floor ? "BOUNDED-AWAY" : "NEAR-ZERO";
  rep.wall_seconds = seconds_since(t0);
  return rep;
}

void write_spectrum_csv(std::ostream& os, const std::vector<double>& singular_values) {
  os.precision(17);
  os << "index,sigma\n";
  for (std::size_t i = 0; i < singular_values.size(); ++i) os << i << ',' << singular_values[i] << '\n';
}

void write_matrix_text(std::ostream& os, const CMat& A) {
  os.precision(17);
  for (Eigen::Index i = 0; i < A.rows(); ++i)
    for (Eigen::Index j = 0; j < A.cols(); ++j) os << i << ' ' << j << ' ' << A(i, j).real() << ' ' << A(i, j).imag() << '\n';
}

}  // namespace hup::experiments
