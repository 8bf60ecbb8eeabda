#include "hup/lab.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <iostream>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <unistd.h>

#include "hup/experiments.hpp"
#include "hup/harmonics.hpp"
#include "hup/specfun.hpp"
#include "hup/transforms.hpp"
#include "hup/weyl.hpp"

namespace hup::lab {

namespace fs = std::filesystem;
using geometry::RegionSpec;
using Tolerances = std::map<std::string, double>;

namespace {

using Clock = std::chrono::steady_clock;

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) {
    cur = trim(cur);
    if (!cur.empty()) out.push_back(cur);
  }
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size() || !std::isfinite(d)) throw std::invalid_argument("");
    return d;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': not a number: '" + v + "'");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const long x = std::stol(v, &used);
    if (used != v.size() || x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
      throw std::invalid_argument("");
    return static_cast<int>(x);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': not an integer: '" + v + "'");
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& v) {
  if (v.empty() || v.find_first_not_of("0123456789") != std::string::npos)
    throw ConfigError("key '" + key + "': not an unsigned 64-bit integer: '" + v + "'");
  try {
    std::size_t used = 0;
    const unsigned long long x = std::stoull(v, &used);
    return static_cast<std::uint64_t>(x);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': out of range for a 64-bit seed: '" + v + "'");
  }
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) h = (h ^ c) * 1099511628211ull;
  return h;
}

double tol(const Tolerances& t, const std::string& key) { return t.at(key); }

RVec random_unit(int d, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  RVec x(d);
  for (int i = 0; i < d; ++i) x[i] = g(rng);
  return x.normalized();
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

std::string verdict_of(bool pass) { return pass ? "PASS" : "FAIL"; }

// ---------------------------------------------------------------------------
// experiment kinds

Outcome run_funk_hecke(const Params& p, const Tolerances& t, std::uint64_t seed, int) {
  const int n = p.get_int("n"), lmax = p.get_int("l_max"), trials = p.get_int("trials");
  std::mt19937_64 rng(seed);
  struct Fn { std::string name; std::function<double(double)> f; int extra_degree; };
  std::vector<Fn> fns;
  for (const auto& w : p.get_words("functions")) {
    if (w == "1") fns.push_back({w, [](double) { return 1.0; }, 0});
    else if (w == "t") fns.push_back({w, [](double x) { return x; }, 1});
    else if (w == "t2") fns.push_back({w, [](double x) { return x * x; }, 2});
    else if (w == "exp") fns.push_back({w, [](double x) { return std::exp(-x); }, 28});  // 1/28! ~ 3e-30
    else throw ConfigError("key 'functions': unknown function '" + w + "' (1, t, t2, exp)");
  }
  Outcome out;
  json rows = json::array();
  bool pass = true;
  for (const auto& F : fns) {
    double largest = 0.0;
    for (int l = 0; l <= lmax; ++l) largest = std::max(largest, std::abs(harmonics::funk_hecke(F.f, l, n, 120)));
    for (int l = 0; l <= lmax; ++l) {
      const int degree = l + F.extra_degree + 2;
      const auto rule = geometry::cached_sphere_quadrature(n, 1.0, degree);
      std::vector<cplx> ratios;
      for (int trial = 0; trial < trials; ++trial) {
        std::vector<harmonics::BigradedPolynomial> parts;
        for (auto [pp, qq] : harmonics::bidegrees_exact(n, l)) parts.push_back(harmonics::random_harmonic(n, pp, qq, rng));
        auto Y = [&](const CVec& z) {
          cplx v = 0.0;
          for (const auto& P : parts) v += P(z);
          return v;
        };
        double rms = 0.0, wsum = 0.0;
        for (Eigen::Index i = 0; i < rule->size(); ++i)
          rms += rule->weights[i] * std::norm(Y(rule->complex_node(i))), wsum += rule->weights[i];
        rms = std::sqrt(rms / wsum);
        RVec xi = random_unit(2 * n, rng);
        for (int tries = 0; tries < 50 && std::abs(Y(to_complex(xi))) < 0.3 * rms; ++tries) xi = random_unit(2 * n, rng);
        cplx s = 0.0;
        for (Eigen::Index i = 0; i < rule->size(); ++i) s += rule->weights[i] * F.f(xi.dot(rule->node(i))) * Y(rule->complex_node(i));
        ratios.push_back(s / Y(to_complex(xi)));
      }
      cplx mean = 0.0;
      for (auto r : ratios) mean += r / static_cast<double>(ratios.size());
      double dev = 0.0;
      for (auto r : ratios) dev = std::max(dev, std::abs(r - mean));
      const double closed = harmonics::funk_hecke(F.f, l, n, 120);
      const bool zero_branch = std::abs(closed) < 1e-12 * largest;
      const double spread = zero_branch ? dev / largest : dev / std::abs(mean);
      const bool ok = spread < tol(t, "spread") && (!zero_branch || std::abs(mean) < tol(t, "spread") * largest);
      pass = pass && ok;
      rows.push_back({{"F", F.name}, {"l", l}, {"ratio", complex_json(mean)}, {"closed_form", closed},
                      {"spread", spread}, {"zero_branch", zero_branch}, {"pass", ok}});
    }
  }
  out.results = {{"n", n}, {"rows", rows}};
  out.verdict = verdict_of(pass);
  return out;
}

Outcome run_bessel_form(const Params& p, const Tolerances& t, std::uint64_t seed, int) {
  const int n = p.get_int("n");
  const auto radii = p.get_doubles("radii");
  const auto cal = transforms::bessel_calibration(n);
  std::mt19937_64 rng(seed);
  json rows = json::array();
  bool pass = true;
  for (const auto& w : p.get_words("bidegrees")) {
    const auto pq = split(w, ':');
    if (pq.size() != 2) throw ConfigError("key 'bidegrees': expected p:q, got '" + w + "'");
    const int pp = parse_int("bidegrees", pq[0]), qq = parse_int("bidegrees", pq[1]);
    const int l = pp + qq;
    const auto Y = harmonics::random_harmonic(n, pp, qq, rng);
    RVec omega = random_unit(2 * n, rng);
    for (int tries = 0; tries < 50 && std::abs(Y(to_complex(symplectic_rotation(omega)))) < 0.05; ++tries)
      omega = random_unit(2 * n, rng);
    const cplx Yt = Y(to_complex(symplectic_rotation(omega)));
    const auto mu = transforms::polynomial_density(Y, 1.0);
    std::vector<cplx> ratios;
    json samples = json::array();
    for (double r : radii) {
      const cplx F = transforms::symplectic_ft(mu, to_complex(omega) * r);
      ratios.push_back(F / (transforms::bessel_radial(n, l, cal.frequency_scale * r) * Yt));
      samples.push_back({r, F.real(), F.imag()});
    }
    cplx mean = 0.0;
    for (auto r : ratios) mean += r / static_cast<double>(ratios.size());
    double spread = 0.0;
    for (auto r : ratios) spread = std::max(spread, std::abs(r - mean) / std::abs(mean));

    // first zero of the transform along the ray against j / frequency_scale
    const double j = specfun::real_zeros(specfun::ZeroKind::bessel, l + n - 1.0, 1, {0.5, 40.0}).front();
    const double r0 = j / cal.frequency_scale;
    const cplx phase = std::pow(cplx(0.0, cal.phase_sign), l);
    auto G = [&](double r) { return (transforms::symplectic_ft(mu, to_complex(omega) * r) / (phase * Yt)).real(); };
    double zero = std::nan(""), offset = std::numeric_limits<double>::infinity();
    const double a = r0 - 0.05, b = r0 + 0.05;
    if (G(a) * G(b) <= 0.0) {
      zero = specfun::refine_root(G, a, b, 1e-12);
      offset = std::abs(zero - r0);
    }
    const bool ok = spread < tol(t, "spread") && offset < tol(t, "zero_alignment");
    pass = pass && ok;
    rows.push_back({{"p", pp}, {"q", qq}, {"ratio", complex_json(mean)}, {"spread", spread},
                    {"predicted_zero", r0}, {"transform_zero", zero}, {"zero_offset", offset}, {"pass", ok},
                    {"samples", samples}});
  }
  Outcome out;
  out.results = {{"n", n}, {"radii", radii}, {"rows", rows}};
  out.verdict = verdict_of(pass);
  return out;
}

Outcome run_hecke_bochner(const Params& p, const Tolerances& t, std::uint64_t seed, int) {
  const int n = p.get_int("n"), kmax = p.get_int("k_max"), pmax = p.get_int("p_max"), npts = p.get_int("points");
  const auto radii = p.get_doubles("radii");
  const auto cal = transforms::hecke_bochner_calibration(n);
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.7, 1.5);
  double spread = 0.0, zero_max = 0.0, hb_zero_max = 0.0;
  std::map<std::string, double> per_bidegree;
  int evaluations = 0;
  for (int pp = 0; pp <= pmax; ++pp)
    for (int qq = 0; qq <= kmax; ++qq) {
      if (harmonics::harmonic_dimension(n, pp, qq) == 0) continue;
      const auto Y = harmonics::random_harmonic(n, pp, qq, rng);
      const double model = transforms::hecke_bochner_ratio(cal, pp, qq);
      double block = 0.0;
      for (double r : radii)
        for (int s = 0; s < npts; ++s) {
          const CVec z = to_complex(random_unit(2 * n, rng)) * unif(rng);
          const auto mu = transforms::polynomial_density(Y, r, cal.chosen);
          std::vector<cplx> sp(static_cast<std::size_t>(kmax + 1)), hb(static_cast<std::size_t>(kmax + 1));
          double scale = 0.0;
          for (int k = 0; k <= kmax; ++k) {
            sp[static_cast<std::size_t>(k)] = transforms::spectral_projection(mu, k, z);
            hb[static_cast<std::size_t>(k)] = transforms::hecke_bochner_form(Y, r, k, z);
            scale = std::max(scale, std::abs(sp[static_cast<std::size_t>(k)]));
            ++evaluations;
          }
          for (int k = 0; k <= kmax; ++k) {
            const auto i = static_cast<std::size_t>(k);
            if (k < qq) {
              zero_max = std::max(zero_max, std::abs(sp[i]));
              hb_zero_max = std::max(hb_zero_max, std::abs(hb[i]));
            } else {
              block = std::max(block, std::abs(sp[i] - model * hb[i]) / scale);
            }
          }
        }
      per_bidegree[std::to_string(pp) + ":" + std::to_string(qq)] = block;
      spread = std::max(spread, block);
    }
  Outcome out;
  out.results = {{"n", n}, {"k_max", kmax}, {"p_max", pmax}, {"evaluations", evaluations},
                 {"spread", spread}, {"spread_per_bidegree", per_bidegree},
                 {"k_lt_q_spectral_max_abs", zero_max}, {"k_lt_q_closed_form_max_abs", hb_zero_max},
                 {"constant", cal.constant}, {"degree_factor", cal.degree_factor}};
  out.verdict = verdict_of(spread < tol(t, "spread") && zero_max < tol(t, "zero_branch") && hb_zero_max == 0.0);
  return out;
}

Outcome run_hermite_diagonal_sum(const Params& p, const Tolerances& t, std::uint64_t seed, int) {
  const int nmax = p.get_int("n_max"), kmax = p.get_int("k_max"), npts = p.get_int("points");
  const auto lambdas = p.get_doubles("lambdas");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 3.0);
  double err = 0.0;
  json rows = json::array();
  for (int n = 1; n <= nmax; ++n)
    for (int k = 0; k <= kmax; ++k)
      for (double lambda : lambdas) {
        double e = 0.0;
        for (int s = 0; s < npts; ++s) {
          const CVec z = to_complex(random_unit(2 * n, rng)) * unif(rng);
          cplx lhs = 0.0;
          for (const auto& a : multi_indices(n, k)) lhs += transforms::special_hermite(a, a, z, lambda);
          const double rhs = std::pow(2.0 * kPi, -0.5 * n) * std::pow(std::abs(lambda), 0.5 * n) *
                             specfun::laguerre_function_scaled(k, n, z.norm(), lambda);
          e = std::max(e, std::abs(lhs - rhs));
        }
        rows.push_back({{"n", n}, {"k", k}, {"lambda", lambda}, {"max_abs_err", e}});
        err = std::max(err, e);
      }
  Outcome out;
  out.results = {{"max_abs_err", err}, {"rows", rows}};
  out.verdict = verdict_of(err < tol(t, "abs"));
  return out;
}

Outcome run_plancherel(const Params& p, const Tolerances& t, std::uint64_t seed, int) {
  const int M = p.get_int("M"), band = p.get_int("band"), samples = p.get_int("samples");
  const int scaled_samples = p.get_int("scaled_samples");
  const int scaled_band = p.get_int("scaled_band");
  const auto lambdas = p.get_doubles("lambdas");
  if (M < 0 || band < 0 || scaled_band < 0) throw ConfigError("plancherel: M and bands must be nonnegative");
  const auto grid = weyl::grid_for(std::max({M, band, scaled_band}));
  Outcome out;
  json rows = json::array();
  double worst = 0.0, worst_tail = 0.0;
  for (double lambda : lambdas) {
    const int b = lambda == 1.0 ? band : scaled_band;
    for (int s = 0; s < (lambda == 1.0 ? samples : scaled_samples); ++s) {
      const auto g = weyl::synthesize(weyl::random_coefficients(grid.size() > 0 ? std::max(M, b) : 0, b, seed + 7919u * s), grid);
      Diagnostics d;
      const auto W = weyl::weyl_transform(g, M, lambda, &d);
      const double target = std::sqrt(2.0 * kPi) * g.norm();
      const double raw = std::abs(std::sqrt(std::abs(lambda)) * W.hs_norm() / target - 1.0);
      const double net = std::abs(std::sqrt(std::abs(lambda)) * std::hypot(W.hs_norm(), W.tail_estimate) / target - 1.0);
      const double tail_rel = W.tail_estimate / std::max(W.hs_norm(), 1e-300);
      worst = std::max(worst, net);
      worst_tail = std::max(worst_tail, tail_rel);
      rows.push_back({{"lambda", lambda}, {"band", b}, {"rel_err", raw}, {"rel_err_net_of_tail", net},
                      {"tail_rel", tail_rel}});
    }
  }
  const bool truncation_dominated = worst_tail > 0.1 * tol(t, "rel");
  if (truncation_dominated)
    out.warnings.push_back("truncation-dominated: HS tail beyond M is " + std::to_string(worst_tail) +
                           " of the computed norm");
  out.results = {{"M", M}, {"max_rel_err", worst}, {"max_tail_rel", worst_tail},
                 {"truncation_dominated", truncation_dominated}, {"rows", rows}};
  out.verdict = verdict_of(worst <= tol(t, "rel"));
  return out;
}

Outcome run_geodesic_means(const Params& p, const Tolerances& t, std::uint64_t seed, int) {
  const int n = p.get_int("n"), L = p.get_int("L"), trials = p.get_int("trials");
  const double zero = tol(t, "zero");
  std::mt19937_64 rng(seed);
  const RVec w = random_unit(2 * n, rng);
  int agree = 0, annihilated_ok = 0;
  double worst_annihilated = 0.0, weakest_generic = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < trials; ++trial) {
    auto f = harmonics::random_band_limited(n, L, rng);
    std::vector<cplx> proj(static_cast<std::size_t>(L + 1));
    for (int l = 0; l <= L; ++l) proj[static_cast<std::size_t>(l)] = harmonics::project_l(f, l, w);
    auto g = harmonics::SphereFunction::from_callable(n, L, [=](const CVec& z) {
      cplx v = f(z);
      for (int l = 0; l <= L; ++l)
        v -= proj[static_cast<std::size_t>(l)] / harmonics::zonal_profile(l, 2 * n, 1.0) *
             harmonics::zonal_profile(l, 2 * n, w.dot(to_real(z)));
      return v;
    });
    for (int which = 0; which < 2; ++which) {
      const auto& h = which == 0 ? f : g;
      double pmax = 0.0, mmax = 0.0;
      for (int l = 0; l <= L; ++l) pmax = std::max(pmax, std::abs(harmonics::project_l(h, l, w)));
      for (int k = 0; k < 20; ++k) mmax = std::max(mmax, std::abs(harmonics::geodesic_mean(h, w, -0.95 + 0.1 * k)));
      const bool pz = pmax < zero, mz = mmax < zero;
      agree += pz == mz ? 1 : 0;
      if (which == 1) {
        annihilated_ok += pz ? 1 : 0;
        worst_annihilated = std::max({worst_annihilated, pmax, mmax});
      } else {
        weakest_generic = std::min(weakest_generic, std::min(pmax, mmax));
      }
    }
  }
  Outcome out;
  out.results = {{"n", n}, {"L", L}, {"trials", trials}, {"agreements", agree},
                 {"annihilated_with_vanishing_projections", annihilated_ok},
                 {"annihilated_max_abs", worst_annihilated}, {"generic_min_abs", weakest_generic}};
  out.verdict = verdict_of(agree == 2 * trials && annihilated_ok == trials);
  return out;
}

Outcome run_laguerre_zeros(const Params& p, const Tolerances& t, std::uint64_t, int) {
  const double order = p.get_double("order");
  const int kmax = p.get_int("k_max");
  double min_gap = std::numeric_limits<double>::infinity();
  bool counts = true, sign_changes = true;
  json rows = json::array();
  for (int k = 1; k <= kmax; ++k) {
    const double hi = 4.0 * k + 2.0 * order + 10.0;
    const auto z = specfun::real_zeros(specfun::ZeroKind::laguerre, order, k, {0.0, hi});
    counts = counts && static_cast<int>(z.size()) == k;
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < z.size(); ++i) gap = std::min(gap, z[i + 1] - z[i]);
    // k sign changes of a degree k polynomial: every zero is simple
    const double h = std::isfinite(gap) ? 0.25 * gap : 0.25;
    bool changes = true;
    for (double x : z)
      changes = changes && specfun::laguerre(k, order, x - h) * specfun::laguerre(k, order, x + h) < 0.0;
    sign_changes = sign_changes && changes;
    min_gap = std::min(min_gap, gap);
    rows.push_back({{"k", k}, {"zeros", z.size()}, {"min_gap", std::isfinite(gap) ? json(gap) : json(nullptr)},
                    {"sign_changes", changes}});
  }
  Outcome out;
  out.results = {{"order", order}, {"k_max", kmax}, {"all_counts_match", counts}, {"min_gap", min_gap},
                 {"all_sign_changes", sign_changes}, {"rows", rows}};
  out.verdict = verdict_of(counts && sign_changes && min_gap > tol(t, "gap"));
  return out;
}

Outcome run_hs_identity(const Params& p, const Tolerances& t, std::uint64_t, int) {
  const auto A = p.get_region("region");
  const int M = p.get_int("M");
  const double step = p.get_double("step");
  Outcome out;
  json rows = json::array();
  bool pass = true, dominated = false;
  for (int N : p.get_ints("N")) {
    const auto r = weyl::hs_identity(A, N, M, step);
    const bool ok = r.rel_err <= tol(t, "rel_err") && r.kernel_vs_basis <= tol(t, "kernel") && !r.truncation_dominated;
    pass = pass && ok;
    dominated = dominated || r.truncation_dominated;
    rows.push_back({{"N", N}, {"computed", r.computed}, {"predicted", r.predicted}, {"rel_err", r.rel_err},
                    {"tail_bound", r.tail_bound}, {"kernel_route", r.kernel_route}, {"kernel_spread", r.kernel_spread},
                    {"kernel_vs_basis", r.kernel_vs_basis}, {"grid_measure", r.grid_measure},
                    {"truncation_dominated", r.truncation_dominated}, {"pass", ok}});
  }
  if (dominated) out.warnings.push_back("truncation-dominated: raise M");
  out.results = {{"M", M}, {"step", step}, {"rows", rows}};
  out.verdict = verdict_of(pass);
  return out;
}

Outcome run_annihilation_probe(const Params& p, const Tolerances&, std::uint64_t, int) {
  const auto A = p.get_region("region");
  const int M = p.get_int("M");
  const double step = p.get_double("step");
  const bool expect_none = p.get_bool("expect_none");
  Outcome out;
  json rows = json::array();
  bool pass = true;
  for (int N : p.get_ints("N")) {
    const auto r = weyl::annihilation_probe(A, N, M, step);
    const bool ok = r.count_near_one <= r.bound && (!expect_none || r.count_near_one == 0);
    pass = pass && ok;
    std::vector<double> top;
    for (Eigen::Index i = 0; i < std::min<Eigen::Index>(8, r.singular_values.size()); ++i) top.push_back(r.singular_values[i]);
    rows.push_back({{"N", N}, {"leading_singular_values", top}, {"count_near_one", r.count_near_one},
                    {"hs_norm2", r.hs_norm2}, {"bound", r.bound}, {"stability", r.stability}, {"pass", ok}});
  }
  out.results = {{"M", M}, {"rows", rows}};
  out.verdict = verdict_of(pass);
  return out;
}

Outcome run_finite_rank(const Params& p, const Tolerances& t, std::uint64_t seed, int) {
  experiments::AnnihilationConfig c;
  c.region = p.get_region("region");
  c.N = p.get_int("N");
  c.M = p.get_int("M");
  c.trials = p.get_int("trials");
  c.iterations = p.get_int("iterations");
  c.step = p.get_double("step");
  c.seed = seed;
  c.floor = tol(t, "floor");
  const int M_check = p.get_int("M_check");
  const std::string expect = p.text("expect");
  if (expect != "bounded" && expect != "near-zero") throw ConfigError("key 'expect': bounded or near-zero");
  const auto rep = experiments::finite_rank_experiment(c);
  Outcome out;
  out.results = rep.results;
  out.results["verdict_detail"] = rep.verdict;
  bool stable = true;
  if (M_check > 0) {
    auto c2 = c;
    c2.M = M_check;
    const auto rep2 = experiments::finite_rank_experiment(c2);
    const double diff = std::abs(rep2.results["defect"].get<double>() - rep.results["defect"].get<double>());
    out.results["M_check"] = M_check;
    out.results["defect_at_M_check"] = rep2.results["defect"];
    out.results["stability"] = diff;
    stable = diff <= tol(t, "stability");
  }
  const bool matches = (expect == "bounded") == (rep.verdict == "BOUNDED-AWAY");
  out.verdict = verdict_of(matches && stable);
  return out;
}

Outcome run_sap(const Params& p, const Tolerances& t, std::uint64_t seed, int) {
  const auto A = p.get_region("region");
  const int N = p.get_int("N"), M = p.get_int("M");
  const double step = p.get_double("step");
  json rows = json::array();
  std::vector<double> sq;
  for (int trials : p.get_ints("trials")) {
    const auto r = weyl::sap_estimate(A, N, M, trials, seed, step);
    sq.push_back(r.squared);
    rows.push_back({{"trials", trials}, {"squared", r.squared}, {"unsquared", r.unsquared},
                    {"exact_squared", r.exact_squared}});
  }
  Outcome out;
  double change = 0.0;
  if (sq.size() >= 2) change = std::abs(sq.back() / sq[sq.size() - 2] - 1.0);
  out.results = {{"N", N}, {"M", M}, {"rows", rows}, {"last_relative_change", change},
                 {"stabilized", change < tol(t, "stabilization")}};
  if (change >= tol(t, "stabilization")) out.warnings.push_back("SAP estimate not yet stable under more trials");
  out.verdict = "EXPLORATORY";
  return out;
}

geometry::ConeSampler make_cone(const Params& p, int n) {
  const std::string kind = p.text("cone");
  const cplx a = p.get_double("a");
  const auto radii = p.get_doubles("radii");
  if (kind == "h") return geometry::complex_h_cone(n, a, radii);
  if (kind == "quadric") return experiments::quadric_h_cone(n, a, radii);
  if (kind == "harmonic11") return experiments::harmonic_cone_11(n, radii);
  if (kind == "armitage") return geometry::armitage_cone(2 * n, a.real(), radii);
  throw ConfigError("key 'cone': unknown cone '" + kind + "' (h, quadric, harmonic11, armitage)");
}

Outcome run_hup_rank(const Params& p, const Tolerances& t, std::uint64_t seed, int jobs) {
  experiments::RankExperimentConfig c;
  c.n = p.get_int("n");
  c.L = p.get_int("L");
  const std::string variant = p.text("variant");
  if (variant == "fourier") c.variant = experiments::RankVariant::fourier;
  else if (variant == "spectral") c.variant = experiments::RankVariant::spectral;
  else throw ConfigError("key 'variant': fourier or spectral");
  c.directions = p.get_int("directions");
  c.radii = p.get_doubles("radii");
  c.k_max = p.get_int("k_max");
  c.theta_augment = p.get_bool("theta_augment");
  c.entry_checks = p.get_int("entry_checks");
  c.threshold = tol(t, "threshold");
  c.jobs = jobs;
  const std::string expect = p.text("expect");
  if (expect != "full-rank" && expect != "nullspace") throw ConfigError("key 'expect': full-rank or nullspace");
  auto cone = make_cone(p, c.n);
  cone.seed = seed;

  const auto rep = experiments::hup_rank(c, cone);
  Outcome out;
  out.results = rep.to_json()["results"];
  out.results["rank_verdict"] = rep.verdict;
  out.results["cone"] = p.text("cone");
  out.warnings = rep.warnings;
  out.calibration_n = {c.n};

  bool pass = rep.results["entry_check_residual"].get<double>() < tol(t, "entry_check");
  if (expect == "full-rank") {
    pass = pass && rep.verdict == "FULL-RANK" && rep.results["ratio"].get<double>() > tol(t, "ratio_floor");
  } else {
    pass = pass && rep.verdict == "NON-TRIVIAL-NULLSPACE" &&
           rep.results["nullity"] == rep.results["direct_vanishing_count"];
    if (p.text("cone") == "harmonic11") {
      const double res = experiments::nullspace_residual(rep.nullspace,
                                                         experiments::harmonic_coefficients(experiments::harmonic_11(c.n), c.L));
      out.results["harmonic_residual"] = res;
      pass = pass && res < tol(t, "residual");
    }
  }
  out.verdict = rep.exploratory ? "EXPLORATORY" : verdict_of(pass);
  return out;
}

Outcome run_spectral_determinacy(const Params& p, const Tolerances& t, std::uint64_t seed, int) {
  experiments::DeterminacyConfig c;
  c.n = p.get_int("n");
  c.r1 = p.get_double("r1");
  c.L = p.get_int("L");
  c.K = p.get_int("K");
  c.seed = seed;
  c.threshold = tol(t, "threshold");
  c.witness_floor = tol(t, "witness");
  const std::string adv = p.text("adversarial");
  json adversarial = nullptr;
  if (adv == "none") {
    c.r2 = p.get_double("r2");
  } else {
    const auto parts = split(adv, ':');
    if (parts.size() != 3) throw ConfigError("key 'adversarial': none or p:q:k0");
    const int pp = parse_int("adversarial", parts[0]), qq = parse_int("adversarial", parts[1]);
    const int k0 = parse_int("adversarial", parts[2]);
    c.r2 = experiments::adversarial_radius(c.n, pp, qq, k0);
    adversarial = {{"p", pp}, {"q", qq}, {"k0", k0}, {"r2", c.r2},
                   {"silenced_factor", specfun::laguerre_function_order(k0 - qq, c.n + pp + qq - 1.0, c.r2)}};
  }
  const auto rep = experiments::spectral_determinacy(c);
  Outcome out;
  out.results = rep.to_json()["results"];
  out.results["rank_verdict"] = rep.verdict;
  out.results["r2"] = c.r2;
  out.results["adversarial"] = adversarial;
  out.warnings = rep.warnings;
  out.calibration_n = {c.n};
  out.verdict = verdict_of(rep.verdict == "FULL-RANK" && rep.results["all_witnessed"] == true &&
                           rep.results["k_lt_q_max_abs"].get<double>() == 0.0);
  return out;
}

const std::string kDisk = "disk 0 0 1";

std::vector<Kind> build_kinds() {
  return {
      {"funk_hecke", {{"n", "2"}, {"l_max", "6"}, {"trials", "5"}, {"functions", "1,t,t2,exp"}},
       {{"spread", 1e-6}}, run_funk_hecke},
      {"bessel_form", {{"n", "2"}, {"bidegrees", "0:0,1:0,1:1,2:1"}, {"radii", "0.5,1,1.5,2,2.5,3,3.5,4"}},
       {{"spread", 1e-5}, {"zero_alignment", 1e-6}}, run_bessel_form},
      {"hecke_bochner", {{"n", "2"}, {"k_max", "6"}, {"p_max", "2"}, {"radii", "0.8,1.5"}, {"points", "2"}},
       {{"spread", 1e-5}, {"zero_branch", 1e-9}}, run_hecke_bochner},
      {"hermite_diagonal_sum", {{"n_max", "2"}, {"k_max", "3"}, {"lambdas", "1,2"}, {"points", "10"}},
       {{"abs", 1e-7}}, run_hermite_diagonal_sum},
      {"plancherel", {{"M", "40"}, {"band", "36"}, {"samples", "10"}, {"lambdas", "1,2,-0.5"}, {"scaled_band", "12"},
        {"scaled_samples", "3"}},
       {{"rel", 0.01}}, run_plancherel},
      {"geodesic_means", {{"n", "2"}, {"L", "3"}, {"trials", "10"}}, {{"zero", 1e-7}}, run_geodesic_means},
      {"laguerre_zeros", {{"order", "1"}, {"k_max", "20"}}, {{"gap", 1e-8}}, run_laguerre_zeros},
      {"hs_identity", {{"region", kDisk}, {"N", "1,2,4"}, {"M", "40"}, {"step", "0.02"}},
       {{"rel_err", 0.02}, {"kernel", 1e-4}}, run_hs_identity},
      {"annihilation_probe", {{"region", kDisk}, {"N", "1,2,4"}, {"M", "40"}, {"step", "0.02"}, {"expect_none", "true"}},
       {}, run_annihilation_probe},
      {"finite_rank",
       {{"region", kDisk}, {"N", "2"}, {"M", "40"}, {"trials", "4"}, {"iterations", "200"}, {"step", "0.02"},
        {"M_check", "60"}, {"expect", "bounded"}},
       {{"floor", 0.05}, {"stability", 1e-3}}, run_finite_rank},
      {"sap", {{"region", kDisk}, {"N", "2"}, {"M", "12"}, {"trials", "500,1000"}, {"step", "0.02"}},
       {{"stabilization", 0.05}}, run_sap},
      {"hup_rank",
       {{"n", "2"}, {"L", "3"}, {"variant", "fourier"}, {"cone", "h"}, {"a", "4"}, {"radii", "0.5,1,1.5,2"},
        {"directions", "0"}, {"k_max", "-1"}, {"theta_augment", "false"}, {"entry_checks", "2"}, {"expect", "full-rank"}},
       {{"threshold", 1e-8}, {"ratio_floor", 1e-6}, {"residual", 1e-8}, {"entry_check", 1e-8}}, run_hup_rank},
      {"spectral_determinacy",
       {{"n", "2"}, {"r1", "1.0"}, {"r2", "1.7"}, {"L", "3"}, {"K", "12"}, {"adversarial", "none"}},
       {{"threshold", 1e-8}, {"witness", 1e-6}}, run_spectral_determinacy},
  };
}

struct Member {
  std::string name;
  std::string kind;
  std::map<std::string, std::string> params;
  bool weyl = false;  // takes the M override
};

std::vector<Member> members_of(const std::string& suite) {
  const std::vector<Member> identities{
      {"funk_hecke", "funk_hecke", {}},
      {"bessel_form", "bessel_form", {}},
      {"hecke_bochner", "hecke_bochner", {}},
      {"hermite_diagonal_sum", "hermite_diagonal_sum", {}},
      {"plancherel", "plancherel", {}, true},
      {"geodesic_means", "geodesic_means", {}},
      {"laguerre_zeros", "laguerre_zeros", {}},
  };
  const std::vector<Member> hup{
      {"hup_rank_h_cone", "hup_rank", {{"cone", "h"}, {"expect", "full-rank"}}},
      {"hup_rank_quadric_cone", "hup_rank", {{"cone", "quadric"}, {"expect", "full-rank"}}},
      {"hup_rank_harmonic_cone", "hup_rank", {{"cone", "harmonic11"}, {"expect", "nullspace"}}},
      {"hup_rank_spectral_quadric", "hup_rank",
       {{"cone", "quadric"}, {"variant", "spectral"}, {"theta_augment", "true"}, {"expect", "full-rank"}}},
      {"hup_rank_spectral_harmonic", "hup_rank",
       {{"cone", "harmonic11"}, {"variant", "spectral"}, {"theta_augment", "true"}, {"expect", "nullspace"}}},
      {"spectral_determinacy", "spectral_determinacy", {}},
      {"spectral_determinacy_adversarial", "spectral_determinacy", {{"adversarial", "1:1:3"}}},
  };
  const std::vector<Member> weylm{
      {"plancherel", "plancherel", {}, true},
      {"hs_identity", "hs_identity", {}, true},
      {"annihilation_probe", "annihilation_probe", {}, true},
      {"finite_rank", "finite_rank", {}, true},
      {"sap", "sap", {}},
  };
  if (suite == "identities") return identities;
  if (suite == "hup") return hup;
  if (suite == "weyl") return weylm;
  if (suite == "all") {
    std::vector<Member> all;
    std::set<std::string> seen;
    for (const auto* part : {&identities, &hup, &weylm})
      for (const auto& m : *part)
        if (seen.insert(m.name).second) all.push_back(m);
    return all;
  }
  throw ConfigError("unknown suite '" + suite + "' (identities, hup, weyl, all)");
}

json member_report(const Member& m, const SuiteOptions& opt) {
  Params overrides(m.params);
  if (m.weyl && opt.M) {
    overrides.set("M", std::to_string(*opt.M));
    if (m.kind == "finite_rank") overrides.set("M_check", std::to_string(*opt.M + 20));
  }
  return run_experiment(m.kind, overrides, {}, opt.seed ^ fnv1a(m.name), 1);
}

}  // namespace

// ---------------------------------------------------------------------------

const std::string& Params::text(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing key '" + key + "'");
  return it->second;
}

int Params::get_int(const std::string& key) const { return parse_int(key, text(key)); }
double Params::get_double(const std::string& key) const { return parse_double(key, text(key)); }
std::uint64_t Params::get_u64(const std::string& key) const { return parse_u64(key, text(key)); }

bool Params::get_bool(const std::string& key) const {
  const auto& v = text(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("key '" + key + "': not a boolean: '" + v + "'");
}

std::vector<double> Params::get_doubles(const std::string& key) const {
  std::vector<double> out;
  for (const auto& w : split(text(key), ',')) out.push_back(parse_double(key, w));
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

std::vector<int> Params::get_ints(const std::string& key) const {
  std::vector<int> out;
  for (const auto& w : split(text(key), ',')) out.push_back(parse_int(key, w));
  if (out.empty()) throw ConfigError("key '" + key + "': empty list");
  return out;
}

std::vector<std::string> Params::get_words(const std::string& key) const { return split(text(key), ','); }

RegionSpec Params::get_region(const std::string& key) const {
  const auto w = split(text(key), ' ');
  if (w.empty()) throw ConfigError("key '" + key + "': empty region");
  std::vector<double> x;
  for (std::size_t i = 1; i < w.size(); ++i) x.push_back(parse_double(key, w[i]));
  auto need = [&](std::size_t k) {
    if (x.size() != k) throw ConfigError("key '" + key + "': " + w[0] + " takes " + std::to_string(k) + " numbers");
  };
  if (w[0] == "disk") {
    need(3);
    if (!(x[2] > 0.0)) throw ConfigError("key '" + key + "': radius must be positive");
    return RegionSpec::disk((RVec(2) << x[0], x[1]).finished(), x[2]);
  }
  if (w[0] == "rectangle") {
    need(4);
    return RegionSpec::rectangle((RVec(2) << x[0], x[1]).finished(), (RVec(2) << x[2], x[3]).finished());
  }
  if (w[0] == "half_annulus") {
    need(4);
    return RegionSpec::half_annulus((RVec(2) << x[0], x[1]).finished(), x[2], x[3]);
  }
  if (w[0] == "empty") {
    need(0);
    return RegionSpec::empty(2);
  }
  throw ConfigError("key '" + key + "': unknown region '" + w[0] + "' (disk, rectangle, half_annulus, empty)");
}

const std::vector<Kind>& kinds() {
  static const std::vector<Kind> k = build_kinds();
  return k;
}

const Kind& find_kind(const std::string& name) {
  for (const auto& k : kinds())
    if (k.name == name) return k;
  throw ConfigError("unknown experiment kind '" + name + "'");
}

RunConfig parse_config(std::istream& in, const std::string& source) {
  RunConfig cfg;
  std::string line, section;
  int lineno = 0;
  std::map<std::string, std::pair<std::string, int>> run, params, tolerances;
  auto fail = [&](int at, const std::string& msg) {
    throw ConfigError(source + ": line " + std::to_string(at) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find_first_of("#;");
    const std::string s = trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') fail(lineno, "malformed section header");
      section = trim(s.substr(1, s.size() - 2));
      if (section != "run" && section != "params" && section != "tolerances")
        fail(lineno, "unknown section [" + section + "] (run, params, tolerances)");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) fail(lineno, "expected key = value");
    if (section.empty()) fail(lineno, "key outside of a section");
    const std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
    if (key.empty()) fail(lineno, "empty key");
    auto& target = section == "run" ? run : section == "params" ? params : tolerances;
    if (target.count(key)) fail(lineno, "duplicate key '" + key + "' in [" + section + "]");
    target[key] = {value, lineno};
  }

  for (const auto& [key, v] : run) {
    try {
      if (key == "kind") cfg.kind = v.first;
      else if (key == "seed") cfg.seed = parse_u64(key, v.first);
      else if (key == "out") cfg.out = v.first;
      else if (key == "csv") cfg.csv = Params(std::map<std::string, std::string>{{key, v.first}}).get_bool(key);
      else if (key == "jobs") {
        cfg.jobs = parse_int(key, v.first);
        if (cfg.jobs < 1) throw ConfigError("key 'jobs': must be at least 1");
      } else
        throw ConfigError("unknown key '" + key + "' in [run] (kind, seed, out, jobs, csv)");
    } catch (const ConfigError& e) {
      fail(v.second, e.what());
    }
  }
  if (cfg.kind.empty()) throw ConfigError(source + ": [run] kind is required");
  const Kind* kind = nullptr;
  try {
    kind = &find_kind(cfg.kind);
  } catch (const ConfigError& e) {
    fail(run.at("kind").second, e.what());
  }
  for (const auto& [key, v] : params) {
    if (!kind->defaults.count(key)) fail(v.second, "unknown key '" + key + "' in [params] for kind " + cfg.kind);
    cfg.params.set(key, v.first);
  }
  for (const auto& [key, v] : tolerances) {
    if (!kind->tolerances.count(key)) fail(v.second, "unknown tolerance '" + key + "' for kind " + cfg.kind);
    double x = 0.0;
    try {
      x = parse_double(key, v.first);
    } catch (const ConfigError& e) {
      fail(v.second, e.what());
    }
    if (!(x > 0.0)) fail(v.second, "tolerance '" + key + "' must be positive");
    cfg.tolerances[key] = x;
  }
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  return parse_config(in, path.string());
}

json calibration_block(const std::vector<int>& dims) {
  std::set<int> ns(dims.begin(), dims.end());
  ns.insert(2);
  json bessel = json::object(), hb = json::object();
  for (int n : ns) {
    const auto b = transforms::bessel_calibration(n);
    bessel["n" + std::to_string(n)] = {{"convention", geometry::to_string(b.convention)},
                                       {"frequency_scale", b.frequency_scale},
                                       {"prefactor", b.prefactor},
                                       {"phase_sign", b.phase_sign},
                                       {"frequency_residual", b.frequency_residual},
                                       {"prefactor_residual", b.prefactor_residual},
                                       {"phase_residual", b.phase_residual}};
    const auto h = transforms::hecke_bochner_calibration(n);
    hb["n" + std::to_string(n)] = {{"chosen_convention", geometry::to_string(h.chosen)},
                                   {"radii", h.radii},
                                   {"ratio_unnormalized", h.ratio_unnormalized},
                                   {"ratio_normalized", h.ratio_normalized},
                                   {"constant", h.constant},
                                   {"degree_factor", h.degree_factor},
                                   {"spread", h.spread}};
  }
  return {{"bessel", bessel}, {"hecke_bochner", hb}};
}

json run_experiment(const std::string& kind_name, const Params& overrides, const Tolerances& tolerances,
                    std::uint64_t seed, int jobs) {
  const Kind& kind = find_kind(kind_name);
  Params merged(kind.defaults);
  for (const auto& [k, v] : overrides.values()) {
    if (!kind.defaults.count(k)) throw ConfigError("unknown key '" + k + "' for kind " + kind_name);
    merged.set(k, v);
  }
  Tolerances tol = kind.tolerances;
  for (const auto& [k, v] : tolerances) {
    if (!tol.count(k)) throw ConfigError("unknown tolerance '" + k + "' for kind " + kind_name);
    if (!(v > 0.0)) throw ConfigError("tolerance '" + k + "' must be positive");
    tol[k] = v;
  }
  const auto t0 = Clock::now();
  Outcome o = kind.run(merged, tol, seed, jobs);
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  return {{"schema_version", kSchemaVersion},
          {"experiment", kind_name},
          {"inputs", {{"params", merged.values()}, {"tolerances", tol}, {"seed", seed}}},
          {"results", o.results},
          {"calibration", calibration_block(o.calibration_n)},
          {"verdict", o.verdict},
          {"timing", {{"wall_seconds", secs}}},
          {"warnings", o.warnings}};
}

void write_report_atomic(const fs::path& path, const json& report) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp-" + std::to_string(::getpid());
  {
    std::ofstream os(tmp, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os << report.dump(2) << '\n';
    os.flush();
    if (!os) throw std::runtime_error("write failed for " + tmp.string());
  }
  fs::rename(tmp, path);
}

std::vector<fs::path> write_csv_sidecars(const json& report, const fs::path& dir, const std::string& stem) {
  std::vector<fs::path> written;
  auto emit = [&](const std::string& what, const std::string& text) {
    const fs::path path = dir / (stem + "." + what + ".csv");
    fs::create_directories(dir);
    std::ofstream(path) << text;
    written.push_back(path);
  };
  const std::string kind = report["experiment"];
  const json& r = report["results"];
  std::ostringstream os;
  os.precision(17);
  if (r.contains("singular_values")) {
    experiments::write_spectrum_csv(os, r["singular_values"].get<std::vector<double>>());
    emit("spectrum", os.str());
  } else if (kind == "hs_identity") {
    os << "N,computed,predicted,rel_err,tail_bound,kernel_route\n";
    for (const auto& row : r["rows"])
      os << row["N"] << ',' << row["computed"].get<double>() << ',' << row["predicted"].get<double>() << ','
         << row["rel_err"].get<double>() << ',' << row["tail_bound"].get<double>() << ','
         << row["kernel_route"].get<double>() << '\n';
    emit("hs", os.str());
  } else if (kind == "annihilation_probe") {
    os << "N,index,sigma\n";
    for (const auto& row : r["rows"]) {
      int i = 0;
      for (const auto& s : row["leading_singular_values"]) os << row["N"] << ',' << i++ << ',' << s.get<double>() << '\n';
    }
    emit("spectrum", os.str());
  } else if (kind == "bessel_form") {
    os << "p,q,r,re,im\n";
    for (const auto& row : r["rows"])
      for (const auto& s : row["samples"])
        os << row["p"] << ',' << row["q"] << ',' << s[0].get<double>() << ',' << s[1].get<double>() << ','
           << s[2].get<double>() << '\n';
    emit("profile", os.str());
  }
  return written;
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"identities", "hup", "weyl", "all"};
  return names;
}

std::vector<std::string> suite_members(const std::string& suite) {
  std::vector<std::string> out;
  for (const auto& m : members_of(suite)) out.push_back(m.name);
  return out;
}

json run_suite(const std::string& suite, const SuiteOptions& opt) {
  const auto members = members_of(suite);
  const auto t0 = Clock::now();
  std::vector<json> reports(members.size());
  const int jobs = std::max(1, opt.jobs);
  if (jobs == 1) {
    for (std::size_t i = 0; i < members.size(); ++i) reports[i] = member_report(members[i], opt);
  } else {
    std::size_t next = 0;
    std::mutex mu;
    std::vector<std::future<void>> workers;
    for (int w = 0; w < jobs; ++w)
      workers.push_back(std::async(std::launch::async, [&] {
        for (;;) {
          std::size_t i;
          {
            std::lock_guard<std::mutex> lock(mu);
            if (next >= members.size()) return;
            i = next++;
          }
          reports[i] = member_report(members[i], opt);
        }
      }));
    for (auto& f : workers) f.get();
  }

  json results = json::array(), timing = json::object(), warnings = json::array();
  bool fail = false;
  std::set<int> dims{2};
  for (std::size_t i = 0; i < members.size(); ++i) {
    const auto& r = reports[i];
    results.push_back({{"name", members[i].name}, {"experiment", r["experiment"]}, {"verdict", r["verdict"]},
                       {"inputs", r["inputs"]}, {"results", r["results"]}});
    timing[members[i].name] = r["timing"]["wall_seconds"];
    for (const auto& w : r["warnings"]) warnings.push_back(members[i].name + ": " + w.get<std::string>());
    fail = fail || r["verdict"] == "FAIL";
    for (auto it = r["calibration"]["bessel"].begin(); it != r["calibration"]["bessel"].end(); ++it)
      dims.insert(std::stoi(it.key().substr(1)));
  }
  const double secs = std::chrono::duration<double>(Clock::now() - t0).count();
  return {{"schema_version", kSchemaVersion},
          {"experiment", "suite:" + suite},
          {"inputs", {{"suite", suite}, {"seed", opt.seed}, {"M", opt.M ? json(*opt.M) : json(nullptr)}}},
          {"results", {{"members", results}}},
          {"calibration", calibration_block({dims.begin(), dims.end()})},
          {"verdict", fail ? "FAIL" : "PASS"},
          {"timing", {{"wall_seconds", secs}, {"members", timing}}},
          {"warnings", warnings}};
}

int run_command(const fs::path& config, const std::optional<fs::path>& out, std::ostream& log) {
  RunConfig cfg;
  json report;
  try {
    cfg = load_config(config);
    report = run_experiment(cfg.kind, cfg.params, cfg.tolerances, cfg.seed, cfg.jobs);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    log << "config error: " << e.what() << '\n';
    return 2;
  }
  const fs::path dir = out ? *out : cfg.out ? *cfg.out : fs::path("reports");
  const fs::path path = dir / (config.stem().string() + ".json");
  write_report_atomic(path, report);
  if (cfg.csv)
    for (const auto& f : write_csv_sidecars(report, dir, config.stem().string())) log << "  csv: " << f.string() << '\n';
  const std::string verdict = report["verdict"];
  log << cfg.kind << ": " << verdict << " -> " << path.string() << '\n';
  for (const auto& w : report["warnings"]) log << "  warning: " << w.get<std::string>() << '\n';
  return verdict == "FAIL" ? 1 : 0;
}

int suite_command(const std::string& suite, const SuiteOptions& opt, const fs::path& out, std::ostream& log) {
  json report;
  try {
    members_of(suite);
    if (opt.M && *opt.M < 0) throw ConfigError("M must be nonnegative");
    report = run_suite(suite, opt);
  } catch (const ConfigError& e) {
    log << "config error: " << e.what() << '\n';
    return 2;
  }
  const fs::path path = out / ("suite-" + suite + ".json");
  write_report_atomic(path, report);
  for (const auto& m : report["results"]["members"])
    log << "  " << m["name"].get<std::string>() << ": " << m["verdict"].get<std::string>() << '\n';
  for (const auto& w : report["warnings"]) log << "  warning: " << w.get<std::string>() << '\n';
  log << "suite " << suite << ": " << report["verdict"].get<std::string>() << " -> " << path.string() << '\n';
  return report["verdict"] == "FAIL" ? 1 : 0;
}

}  // namespace hup::lab
