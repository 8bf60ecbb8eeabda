#pragma once

#include <functional>
#include <iosfwd>
#include <vector>

#include "hup/geometry.hpp"
#include "hup/harmonics.hpp"
#include "hup/types.hpp"

namespace hup::transforms {

using geometry::MeasureConvention;
using harmonics::BigradedPolynomial;
using harmonics::SphereFunction;

/// f dsigma_r on S_r^{2n-1}; f(zeta) = density(zeta / r).
struct SphereDensity {
  double r = 1.0;
  SphereFunction density;
  MeasureConvention convention = MeasureConvention::unnormalized;

  int n() const { return density.n(); }
  cplx operator()(const CVec& zeta) const { return density(zeta / r); }
};

/// Density P dsigma_r for a bigraded polynomial P evaluated on S_r.
SphereDensity polynomial_density(const BigradedPolynomial& P, double r,
                                 MeasureConvention c = MeasureConvention::unnormalized);

/// Sphere rule degree that resolves exp(-(i/2) Im(z . conj(zeta))) for
/// |z| r / 2 = freq against a density of the given band limit.
int sft_degree(int band, double freq);

/// Integral of exp(-(i/2) Im(z . conj(zeta))) f(zeta) dsigma_r(zeta).
/// A rule degree below band + |z| r / 2 is refused (std::invalid_argument).
cplx symplectic_ft(const SphereDensity& mu, const CVec& z, int degree = -1);

double total_variation(const SphereDensity& mu);

// ---------------------------------------------------------------------------
// Bessel factorization

/// J_{l+n-1}(s) / s^{n-1}, continuous at s = 0.
double bessel_radial(int n, int l, double s);

struct BesselCalibration {
  int n = 0;
  MeasureConvention convention = MeasureConvention::unnormalized;
  double frequency_scale = 0.0;  // s = frequency_scale * r
  double prefactor = 0.0;        // kappa
  int phase_sign = 0;            // the phase is (phase_sign * i)^{p+q}
  double frequency_residual = 0.0;  // |F| at the first calibrated zero over F(0)
  double prefactor_residual = 0.0;  // max fit residual over max |F|
  double phase_residual = 0.0;
};

/// Fits s and kappa at five radii and the phase from z_1, once per (n,
/// convention); thread-safe and cached.
BesselCalibration bessel_calibration(int n, MeasureConvention c = MeasureConvention::unnormalized);

/// kappa (phase_sign i)^{p+q} J_{p+q+n-1}(s)/s^{n-1} Y(omega~) with s the
/// calibrated frequency times r.
cplx bessel_form(const BigradedPolynomial& Y, double r, const RVec& omega,
                 MeasureConvention c = MeasureConvention::unnormalized);

// ---------------------------------------------------------------------------
// Planar functions and twisted convolution

struct PlanarFunction {
  int n = 1;
  std::function<cplx(const CVec&)> f;
  double decay_radius = 16.0;  // |f| negligible beyond this radius

  cplx operator()(const CVec& z) const { return f(z); }
};

struct PlanarGridOptions {
  double step = 0.1;
  double tolerance = 1e-10;  // truncation estimate that triggers a warning
};

/// int g(z-w) h(w) exp((i lambda/2) Im(z . conj(w))) dw on a uniform grid.
cplx twisted_convolution(const PlanarFunction& g, const PlanarFunction& h, double lambda, const CVec& z,
                         const PlanarGridOptions& opt = {}, Diagnostics* diag = nullptr);

/// Laguerre function phi_k^{n-1} as a planar function.
PlanarFunction laguerre_planar(int k, int n);

/// int phi_k^{n-1}(z - w) exp((i/2) Im(z . conj(w))) dmu(w).
cplx spectral_projection(const SphereDensity& mu, int k, const CVec& z, int degree = -1);

double hecke_bochner_coefficient(int n, int p, int q, int k);

/// B r^{2(p+q)} phi_{k-q}^{gamma-1}(r) P(z) phi_{k-q}^{gamma-1}(|z|), gamma = n+p+q; 0 for k < q.
cplx hecke_bochner_form(const BigradedPolynomial& P, double r, int k, const CVec& z);

struct HeckeBochnerCalibration {
  int n = 0;
  std::vector<double> radii;
  std::vector<double> ratio_unnormalized;  // spectral / closed form, per radius
  std::vector<double> ratio_normalized;
  MeasureConvention chosen = MeasureConvention::normalized;
  double constant = 0.0;       // ratio at p = q = 0 under `chosen`
  double degree_factor = 0.0;  // ratio = constant * degree_factor^{p+q}
  double spread = 0.0;         // worst relative misfit of that model over radii and (k, p, q)
};

/// spectral_projection / hecke_bochner_form predicted by a calibration.
double hecke_bochner_ratio(const HeckeBochnerCalibration& cal, int p, int q);

HeckeBochnerCalibration hecke_bochner_calibration(int n);

// ---------------------------------------------------------------------------
// Special Hermite functions

/// <pi_lambda(x + i y) phi_a^lambda, phi_b^lambda> on R for all a <= amax, b <= bmax.
CMat matrix_elements_1d(int amax, int bmax, double x, double y, double lambda);

/// <pi_lambda(z) phi_alpha^lambda, phi_beta^lambda> as a product over axes.
cplx matrix_element(const MultiIndex& alpha, const MultiIndex& beta, const CVec& z, double lambda);

/// (2 pi)^{-n/2} |lambda|^{n/2} <pi_lambda(z) phi_alpha^lambda, phi_beta^lambda>; orthonormal in L^2(C^n)
/// for every lambda.
cplx special_hermite(const MultiIndex& alpha, const MultiIndex& beta, const CVec& z, double lambda);

/// c_alpha in <pi_lambda(w) phi_0, phi_alpha> = c_alpha |lambda|^{|alpha|/2} w^alpha e^{-|lambda||w|^2/4}, lambda > 0.
cplx coherent_coefficient(const MultiIndex& alpha);

struct CylinderDensity {
  SphereDensity sphere;                   // u(zeta) dsigma_r
  std::function<cplx(double)> v_hat;      // int v(t) e^{i lambda t} dt
};

/// <F_M mu(z, lambda) phi_0^lambda, phi_alpha^lambda> by sphere quadrature with
/// numerically computed matrix elements.
cplx modified_ft_entry(const CylinderDensity& mu, const CVec& z, double lambda, const MultiIndex& alpha,
                       int degree = -1);

/// CSV: x1..xn,y1..yn,re,im
void write_transform_csv(std::ostream& os, const std::vector<CVec>& points, const std::vector<cplx>& values);

}  // namespace hup::transforms
