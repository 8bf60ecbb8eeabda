#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hup/types.hpp"

namespace hup::specfun {

/// A scalar together with an a-priori absolute error bound.
struct SpecValue {
  double value = 0.0;
  double abs_error_bound = 0.0;
};

// Generalized Laguerre polynomial L_k^nu(x), forward three-term recurrence.
// Throws std::domain_error when nu is a negative integer.
double laguerre(int k, double nu, double x);

// Same polynomial from the explicit sum
//   L_k^nu(x) = sum_j binom(nu+k, k-j) (-x)^j / j!
// with binomials through log-Gamma. Only meant as a cross-check (k <= 10);
// the alternating sum loses digits for large k.
double laguerre_sum(int k, double nu, double x);

// L_k^nu(x) with a propagated rounding bound.
SpecValue laguerre_with_bound(int k, double nu, double x);

// Laguerre function of order `order`: L_k^order(r^2/2) exp(-r^2/4).
double laguerre_function_order(int k, double order, double r);

// Laguerre function on C^n of order n-1 evaluated at |z| = r.
inline double laguerre_function(int k, int n, double r) {
  return laguerre_function_order(k, n - 1, r);
}

// Scaled version phi_{k,lambda}^{n-1}(z) = phi_k^{n-1}(sqrt|lambda| z).
double laguerre_function_scaled(int k, int n, double r, double lambda);

// m-th derivative of the Gegenbauer polynomial C_l^beta at t.
// Uses D^m C_l^beta = 2^m (beta)_m C_{l-m}^{beta+m}.
double gegenbauer(int l, double beta, double t, int m = 0);

// Chebyshev polynomial of the first kind; the beta -> 0 limit shape of the
// Gegenbauer family, needed for circle harmonics.
double chebyshev_t(int l, double t);

// Bessel function of the first kind J_nu(x), nu >= 0, x >= 0.
double bessel_j(double nu, double x);

// One-dimensional L^2-normalized Hermite function h_k(x).
double hermite_function_1d(int k, double x);

// All of h_0..h_kmax at x.
RVec hermite_functions_1d(int kmax, double x);

// Scaled multi-dimensional Hermite function
//   phi_alpha^lambda(x) = |lambda|^{n/4} prod_j h_{alpha_j}(sqrt|lambda| x_j).
double hermite_function(const MultiIndex& alpha, const RVec& x, double lambda);

enum class ZeroKind { laguerre, bessel };

class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Sorted real zeros in [lo, hi].
//  laguerre: zeros of L_{count}^{order}; all sign changes in the interval.
//  bessel:   first `count` zeros of J_{order} in the interval.
// Each zero is bracketed by a sign change on a scan grid, then refined by
// bisection followed by safeguarded secant steps to 1e-12 absolute.
// Throws BracketError if the scan finds no sign change at all.
std::vector<double> real_zeros(ZeroKind kind, double order, int count,
                               std::pair<double, double> interval);

// Root of f bracketed by [a, b] with f(a) f(b) <= 0.
template <class F>
double refine_root(F&& f, double a, double b, double tol = 1e-12);

// log of the generalized binomial coefficient |binom(a, b)| and its sign,
// through lgamma.
std::pair<double, int> log_binomial(double a, double b);

double binomial(double a, double b);

}  // namespace hup::specfun

#include "hup/specfun_impl.hpp"
