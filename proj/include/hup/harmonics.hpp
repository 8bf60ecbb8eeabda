#pragma once

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <memory>
#include <random>
#include <utility>
#include <vector>

#include "hup/geometry.hpp"
#include "hup/types.hpp"

namespace hup::harmonics {

struct Monomial {
  MultiIndex alpha;  // powers of z
  MultiIndex beta;   // powers of conj(z)
};

/// Canonical monomial table of P_{p,q}: alpha outer, beta inner, each in
/// multi_indices order. Empty when p < 0 or q < 0.
std::vector<Monomial> bigraded_monomials(int n, int p, int q);

/// Values of all monomials of bidegree (p, q) at z, in table order.
CVec monomial_values(int n, int p, int q, const CVec& z);

/// Polynomial sum c_{ab} z^a conj(z)^b of bidegree (p, q).
class BigradedPolynomial {
 public:
  BigradedPolynomial() = default;
  BigradedPolynomial(int n, int p, int q);
  BigradedPolynomial(int n, int p, int q, CVec coeffs, bool harmonic = false);

  int n() const { return n_; }
  int p() const { return p_; }
  int q() const { return q_; }
  const std::vector<Monomial>& monomials() const { return *monomials_; }
  const CVec& coeffs() const { return coeffs_; }
  bool harmonic() const { return harmonic_; }

  cplx operator()(const CVec& z) const;
  cplx eval_real(const RVec& x) const { return (*this)(to_complex(x)); }

  /// Symbolic Laplacian 4 sum_j d_j dbar_j; bidegree (p-1, q-1).
  BigradedPolynomial laplacian() const;

  BigradedPolynomial operator+(const BigradedPolynomial& o) const;
  BigradedPolynomial operator*(cplx s) const;

 private:
  int n_ = 1, p_ = 0, q_ = 0;
  std::shared_ptr<const std::vector<Monomial>> monomials_;
  CVec coeffs_;
  bool harmonic_ = false;
};

/// dim H_{p,q} on C^n.
int harmonic_dimension(int n, int p, int q);

/// Bidegrees (p, q) with p + q <= L that carry harmonics on C^n.
std::vector<std::pair<int, int>> bidegrees(int n, int L);
std::vector<std::pair<int, int>> bidegrees_exact(int n, int l);

/// Orthonormal basis of H_{p,q} over the unnormalized unit sphere.
struct HarmonicBasis {
  int n = 0, p = 0, q = 0;
  std::vector<Monomial> monomials;
  CMat coeffs;  // monomials x elements
  std::vector<BigradedPolynomial> elements;
  double laplacian_threshold = 0.0;

  int size() const { return static_cast<int>(elements.size()); }
  /// All basis elements evaluated at z.
  CVec evaluate(const CVec& z) const;
  /// CSV layout: p,q,j,alpha,beta,re,im with multi-indices joined by ';'.
  void write_csv(std::ostream& os) const;
};

HarmonicBasis harmonic_basis(int n, int p, int q);
std::shared_ptr<const HarmonicBasis> cached_harmonic_basis(int n, int p, int q);

BigradedPolynomial random_harmonic(int n, int p, int q, std::mt19937_64& rng);

/// A function on the unit sphere S^{2n-1}, given by harmonic coefficients,
/// by a callable, or by samples on a rule (converted to coefficients).
class SphereFunction {
 public:
  using Coefficients = std::map<std::pair<int, int>, CVec>;
  using Callable = std::function<cplx(const CVec&)>;

  static SphereFunction from_coefficients(int n, Coefficients c);
  static SphereFunction from_callable(int n, int band_limit, Callable f);
  static SphereFunction from_samples(int n, int band_limit,
                                     std::shared_ptr<const geometry::QuadratureRule> rule,
                                     CVec values);
  static SphereFunction from_polynomial(const BigradedPolynomial& P);

  int n() const { return n_; }
  int band_limit() const { return L_; }
  bool has_coefficients() const { return coeffs_.has_value(); }
  const Coefficients& coefficients() const { return *coeffs_; }
  bool has_samples() const { return rule_ != nullptr; }
  const geometry::QuadratureRule& sample_rule() const { return *rule_; }
  const CVec& samples() const { return samples_; }

  cplx operator()(const CVec& z) const;
  cplx eval_real(const RVec& x) const { return (*this)(to_complex(x)); }

 private:
  int n_ = 1, L_ = 0;
  std::optional<Coefficients> coeffs_;
  Callable f_;
  std::shared_ptr<const geometry::QuadratureRule> rule_;
  CVec samples_;
};

SphereFunction random_band_limited(int n, int L, std::mt19937_64& rng);

// ---------------------------------------------------------------------------
// Zonal harmonics and Funk–Hecke

struct ZonalCalibration {
  int l = 0, d = 0;
  double constant = 0.0;      // c_{l,d}
  double closed_form = 0.0;   // textbook value, for the log only
  double residual = 0.0;      // reproducing-property residual on a second Y
};

/// c_{l,d} fixed by the reproducing property on a random Y in H_l (d even).
ZonalCalibration zonal_calibration(int l, int d);

/// Z_xi^{(l)}(eta) = c_{l,d} G_l^{(d-2)/2}(xi . eta) (Chebyshev T_l for d = 2).
double zonal(int l, int d, const RVec& xi, const RVec& eta);
double zonal_profile(int l, int d, double t);

struct FunkHeckeCalibration {
  int l = 0, n = 0;
  double alpha = 0.0;
  double closed_form = 0.0;
};

FunkHeckeCalibration funk_hecke_calibration(int l, int n);

/// C_l = alpha_l int F(t) G_l^{n-1}(t) (1-t^2)^{(2n-3)/2} dt.
double funk_hecke(const std::function<double(double)>& F, int l, int n, int npts = 80);

/// Degree-l component of f at xi. The rule degree defaults to band + l.
cplx project_l(const SphereFunction& f, int l, const RVec& xi, Diagnostics* diag = nullptr,
               int rule_degree = -1);

/// The (p, q) component of f by theta-averaging. theta_points defaults to
/// 4L+5; fewer than 2L+1 is rejected.
SphereFunction project_pq(const SphereFunction& f, int p, int q, int theta_points = -1);

double cesaro_weight(int l, int m, double delta);

/// Mean of f over {nu : omega . nu = t} with the normalized measure.
cplx geodesic_mean(const SphereFunction& f, const RVec& omega, double t, int rule_degree = -1);

}  // namespace hup::harmonics
