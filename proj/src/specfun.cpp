#include "hup/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hup {

std::vector<MultiIndex> multi_indices(int n, int k) {
  std::vector<MultiIndex> out;
  if (n <= 0 || k < 0) return out;
  std::vector<int> cur(static_cast<std::size_t>(n), 0);
  // Recursive fill: first entry descending gives lexicographic-descending order.
  auto rec = [&](auto&& self, int pos, int remaining) -> void {
    if (pos == n - 1) {
      cur[static_cast<std::size_t>(pos)] = remaining;
      out.emplace_back(cur);
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      cur[static_cast<std::size_t>(pos)] = v;
      self(self, pos + 1, remaining - v);
    }
  };
  rec(rec, 0, k);
  return out;
}

std::vector<MultiIndex> multi_indices_upto(int n, int max_order) {
  std::vector<MultiIndex> out;
  for (int k = 0; k <= max_order; ++k) {
    auto layer = multi_indices(n, k);
    out.insert(out.end(), layer.begin(), layer.end());
  }
  return out;
}

}  // namespace hup

namespace hup::specfun {

namespace {

bool is_negative_integer(double v) { return v < 0 && v == std::floor(v); }

// Sign of Gamma(x) for x not a non-positive integer.
int gamma_sign(double x) {
  if (x > 0) return 1;
  const double f = std::floor(-x);
  return (static_cast<long long>(f) % 2 == 0) ? -1 : 1;
}

bool is_gamma_pole(double x) { return x <= 0 && x == std::floor(x); }

double bessel_series(double nu, double x) {
  const double half = 0.5 * x;
  double term = std::exp(nu * std::log(half) - std::lgamma(nu + 1.0));
  double sum = term;
  const double q = half * half;
  for (int k = 0; k < 500; ++k) {
    term *= -q / ((k + 1.0) * (k + 1.0 + nu));
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// Backward recurrence from a large order, normalized through the Neumann sum
//   (x/2)^{nu0} = Gamma(nu0+1) J_{nu0} + sum_{i>=1} (nu0+2i) Gamma(nu0+i)/i! J_{nu0+2i}.
double bessel_miller(double nu, double x) {
  const double nu0 = nu - std::floor(nu);
  const int m = static_cast<int>(std::floor(nu));
  const double big = std::max(static_cast<double>(m), x);
  int start = static_cast<int>(big + 30.0 + 4.0 * std::cbrt(big) + 2.0 * std::sqrt(big));
  if (start % 2) ++start;

  // Neumann coefficients c_i = Gamma(nu0+i)/i!, computed upward.
  std::vector<double> coeff(static_cast<std::size_t>(start / 2 + 1));
  coeff[0] = std::tgamma(nu0 + 1.0);  // i = 0 term already includes nu0*Gamma(nu0)
  double c = std::tgamma(nu0 + 1.0);  // Gamma(nu0+1)/1!
  for (int i = 1; i <= start / 2; ++i) {
    if (i > 1) c *= (nu0 + i - 1.0) / i;
    coeff[static_cast<std::size_t>(i)] = (nu0 + 2.0 * i) * c;
  }

  double jp1 = 0.0;
  double j = 1e-300;
  double sum = 0.0;
  double target = 0.0;
  for (int k = start; k >= 0; --k) {
    if (k == m) target = j;
    if (k % 2 == 0) sum += coeff[static_cast<std::size_t>(k / 2)] * j;
    if (k == 0) break;
    const double jm1 = 2.0 * (nu0 + k) / x * j - jp1;
    jp1 = j;
    j = jm1;
    if (std::abs(j) > 1e250) {
      j *= 1e-250;
      jp1 *= 1e-250;
      sum *= 1e-250;
      target *= 1e-250;
    }
  }
  return target * std::pow(0.5 * x, nu0) / sum;
}

}  // namespace

std::pair<double, int> log_binomial(double a, double b) {
  const double x1 = a + 1.0;
  const double x2 = b + 1.0;
  const double x3 = a - b + 1.0;
  if (is_gamma_pole(x1)) throw std::domain_error("binomial: numerator Gamma pole");
  if (is_gamma_pole(x2) || is_gamma_pole(x3))
    return {-std::numeric_limits<double>::infinity(), 0};
  const double lg = std::lgamma(x1) - std::lgamma(x2) - std::lgamma(x3);
  const int sign = gamma_sign(x1) * gamma_sign(x2) * gamma_sign(x3);
  return {lg, sign};
}

double binomial(double a, double b) {
  auto [lg, sign] = log_binomial(a, b);
  if (sign == 0) return 0.0;
  return sign * std::exp(lg);
}

double laguerre(int k, double nu, double x) {
  if (k < 0) throw std::domain_error("laguerre: negative degree");
  if (is_negative_integer(nu)) throw std::domain_error("laguerre: order is a negative integer");
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = 1.0 + nu - x;
  for (int j = 1; j < k; ++j) {
    const double next = ((2.0 * j + nu + 1.0 - x) * cur - (j + nu) * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  return cur;
}

SpecValue laguerre_with_bound(int k, double nu, double x) {
  const double value = laguerre(k, nu, x);
  if (k == 0) return {value, 0.0};
  double prev = 1.0;
  double cur = std::abs(1.0 + nu) + std::abs(x);
  for (int j = 1; j < k; ++j) {
    const double next =
        (std::abs(2.0 * j + nu + 1.0 - x) * cur + std::abs(j + nu) * prev) / (j + 1.0);
    prev = cur;
    cur = next;
  }
  const double eps = std::numeric_limits<double>::epsilon();
  return {value, 4.0 * (k + 1) * eps * cur};
}

double laguerre_sum(int k, double nu, double x) {
  if (k < 0) throw std::domain_error("laguerre_sum: negative degree");
  if (is_negative_integer(nu)) throw std::domain_error("laguerre_sum: order is a negative integer");
  double sum = 0.0;
  double xpow = 1.0;  // (-x)^j / j!
  for (int j = 0; j <= k; ++j) {
    if (j > 0) xpow *= -x / j;
    sum += binomial(nu + k, k - j) * xpow;
  }
  return sum;
}

double laguerre_function_order(int k, double order, double r) {
  const double s = r * r;
  return laguerre(k, order, 0.5 * s) * std::exp(-0.25 * s);
}

double laguerre_function_scaled(int k, int n, double r, double lambda) {
  if (lambda == 0.0) throw std::domain_error("laguerre_function_scaled: lambda = 0");
  return laguerre_function(k, n, std::sqrt(std::abs(lambda)) * r);
}

double gegenbauer(int l, double beta, double t, int m) {
  if (l < 0 || m < 0) throw std::domain_error("gegenbauer: negative degree or derivative order");
  if (m > l) return 0.0;
  double scale = 1.0;
  for (int i = 0; i < m; ++i) scale *= 2.0 * (beta + i);
  const double b = beta + m;
  const int deg = l - m;
  if (deg == 0) return scale;
  double prev = 1.0;
  double cur = 2.0 * b * t;
  for (int j = 2; j <= deg; ++j) {
    const double next = (2.0 * t * (j + b - 1.0) * cur - (j + 2.0 * b - 2.0) * prev) / j;
    prev = cur;
    cur = next;
  }
  return scale * cur;
}

double chebyshev_t(int l, double t) {
  if (l < 0) throw std::domain_error("chebyshev_t: negative degree");
  if (l == 0) return 1.0;
  double prev = 1.0;
  double cur = t;
  for (int j = 2; j <= l; ++j) {
    const double next = 2.0 * t * cur - prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

double bessel_j(double nu, double x) {
  if (nu < 0 || x < 0) throw std::domain_error("bessel_j: requires nu >= 0 and x >= 0");
  if (x == 0.0) return nu == 0.0 ? 1.0 : 0.0;
  // The ascending series is free of cancellation while its terms decrease
  // from the first one, i.e. (x/2)^2 <= nu + 1; below x = 8 the loss is < 1e-13.
  if (x <= 8.0 || 0.25 * x * x <= nu + 1.0) return bessel_series(nu, x);
  return bessel_miller(nu, x);
}

double hermite_function_1d(int k, double x) {
  if (k < 0) throw std::domain_error("hermite_function_1d: negative index");
  return hermite_functions_1d(k, x)[k];
}

RVec hermite_functions_1d(int kmax, double x) {
  RVec h(kmax + 1);
  h[0] = std::pow(kPi, -0.25) * std::exp(-0.5 * x * x);
  if (kmax >= 1) h[1] = std::sqrt(2.0) * x * h[0];
  for (int k = 1; k < kmax; ++k)
    h[k + 1] = std::sqrt(2.0 / (k + 1.0)) * x * h[k] - std::sqrt(k / (k + 1.0)) * h[k - 1];
  return h;
}

double hermite_function(const MultiIndex& alpha, const RVec& x, double lambda) {
  if (alpha.dim() != x.size()) throw std::invalid_argument("hermite_function: dimension mismatch");
  if (lambda == 0.0) throw std::domain_error("hermite_function: lambda = 0");
  const double s = std::sqrt(std::abs(lambda));
  double v = std::pow(std::abs(lambda), 0.25 * alpha.dim());
  for (int j = 0; j < alpha.dim(); ++j) v *= hermite_function_1d(alpha[j], s * x[j]);
  return v;
}

std::vector<double> real_zeros(ZeroKind kind, double order, int count,
                               std::pair<double, double> interval) {
  auto [lo, hi] = interval;
  if (!(hi > lo)) throw std::invalid_argument("real_zeros: empty interval");
  if (count < 1) throw std::invalid_argument("real_zeros: count must be positive");

  auto f = [&](double x) {
    return kind == ZeroKind::laguerre ? laguerre(count, order, x) : bessel_j(order, x);
  };

  const int scan = std::max(4000, 400 * count);
  const double step = (hi - lo) / scan;
  std::vector<double> zeros;
  double xa = lo;
  double fa = f(xa);
  bool any_change = false;
  for (int i = 1; i <= scan; ++i) {
    const double xb = (i == scan) ? hi : lo + i * step;
    const double fb = f(xb);
    if (fb == 0.0 && i < scan) {
      zeros.push_back(xb);
      any_change = true;
    } else if (fa != 0.0 && fb != 0.0 && (fa > 0) != (fb > 0)) {
      zeros.push_back(refine_root(f, xa, xb, 1e-12));
      any_change = true;
    }
    if (kind == ZeroKind::bessel && static_cast<int>(zeros.size()) >= count) break;
    xa = xb;
    fa = fb;
  }
  if (!any_change) throw BracketError("real_zeros: no sign change found in interval");
  std::sort(zeros.begin(), zeros.end());
  return zeros;
}

}  // namespace hup::specfun
