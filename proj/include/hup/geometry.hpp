#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "hup/types.hpp"

namespace hup::geometry {

/// Nodes and weights of a one-dimensional rule on [-1, 1].
struct GaussRule {
  RVec nodes;
  RVec weights;
};

GaussRule gauss_legendre(int npts);

/// Gauss–Jacobi rule for the weight (1-x)^a (1+x)^b on [-1, 1], built by the
/// Golub–Welsch eigenvalue method. a = b = -1/2 is dispatched to the closed
/// Chebyshev form.
GaussRule gauss_jacobi(int npts, double a, double b);

enum class MeasureConvention { unnormalized, normalized };

const char* to_string(MeasureConvention c);

/// Nodes and positive weights on a manifold. Nodes are stored one per row in
/// real coordinates; on C^n the layout is (x_1..x_n, y_1..y_n).
struct QuadratureRule {
  RMat nodes;
  RVec weights;
  int exactness_degree = 0;
  double total_mass = 0.0;
  std::string manifold;

  Eigen::Index size() const { return weights.size(); }
  int ambient_dim() const { return static_cast<int>(nodes.cols()); }
  RVec node(Eigen::Index i) const { return nodes.row(i).transpose(); }
  CVec complex_node(Eigen::Index i) const { return to_complex(node(i)); }

  template <class F>
  auto integrate(F&& f) const {
    using R = decltype(f(RVec{}));
    R acc{};
    for (Eigen::Index i = 0; i < size(); ++i) acc += weights[i] * f(node(i));
    return acc;
  }

  /// CSV: header `c0,...,c{d-1},weight`, one node per row.
  void write_csv(std::ostream& os) const;
};

/// Surface area of the unit sphere S^{d-1} in R^d.
double sphere_area(int d);

/// Rule on S_r^{2n-1} subset C^n (n in {1,2,3}) exact for polynomials of total
/// degree <= degree. Moduli squared of (z_1..z_n) are integrated with Gauss
/// rules over the simplex, the phases with uniform rules.
QuadratureRule sphere_quadrature(int n, double r, int degree,
                                 MeasureConvention convention = MeasureConvention::unnormalized);

/// Thread-safe memoized sphere_quadrature.
std::shared_ptr<const QuadratureRule> cached_sphere_quadrature(
    int n, double r, int degree, MeasureConvention convention = MeasureConvention::unnormalized);

/// Normalized rule on the unit sphere S^{d-1} subset R^d, any d >= 1.
QuadratureRule real_sphere_quadrature(int d, int degree);

/// Orthonormal basis of omega^perp (columns), Gram–Schmidt over the standard
/// basis taken in order of decreasing residual norm.
RMat complete_frame(const RVec& omega);

/// Normalized rule on the geodesic sphere {nu in S^{d-1} : omega . nu = t}.
QuadratureRule geodesic_quadrature(const RVec& omega, double t, int degree);

// ---------------------------------------------------------------------------
// Cones

enum class ConeKind { complex_H, armitage_Ka, custom };

struct ConeSampler {
  ConeKind kind = ConeKind::complex_H;
  cplx a = 4.0;      // coefficient of H(z) = a z_1 conj(z_2) + |z|^2, or K_a parameter
  int dim = 4;       // real ambient dimension (2n for complex cones)
  std::vector<double> radii{1.0};
  std::uint64_t seed = 0x5eed;

  // Only for ConeKind::custom: a direction generator and the defining
  // equation's residual (relative, scale-invariant).
  std::function<RVec(std::mt19937_64&)> generator;
  std::function<double(const RVec&)> residual_fn;
  bool complex_scaling_closed = true;

  /// |defining equation| / |x|^2 at x.
  double residual(const RVec& x) const;
};

ConeSampler complex_h_cone(int n, cplx a, std::vector<double> radii = {1.0});
ConeSampler armitage_cone(int d, double a, std::vector<double> radii = {1.0});

/// Emits `count` points on the cone; radii cycle through c.radii.
std::vector<RVec> sample_cone(const ConeSampler& c, int count);

enum class ArmitageVerdict { vacuous, holds, fails };

const char* to_string(ArmitageVerdict v);

struct ArmitageDegree {
  int k = 0;
  double min_abs_derivative = 0.0;  // min over 0 <= m <= k-2 of |D^m G_k^{(d-2)/2}(a)|
  ArmitageVerdict verdict = ArmitageVerdict::vacuous;
};

std::vector<ArmitageDegree> classify_armitage(double a, int d, int k_max);

// ---------------------------------------------------------------------------
// Regions in R^{2n}

struct RegionSpec {
  enum class Kind { disk, rectangle, union_of, half_annulus };
  Kind kind = Kind::disk;
  RVec center;            // disk, half_annulus
  double radius = 1.0;    // disk; outer radius for half_annulus
  double inner_radius = 0.0;
  RVec lo, hi;            // rectangle corners
  std::vector<RegionSpec> parts;

  static RegionSpec disk(RVec center, double radius);
  static RegionSpec rectangle(RVec lo, RVec hi);
  static RegionSpec union_of(std::vector<RegionSpec> parts);
  // {inner <= |x - c| <= outer, x_2 >= c_2} in the plane.
  static RegionSpec half_annulus(RVec center, double inner, double outer);
  static RegionSpec empty(int dim);

  int dim() const;
  bool contains(const RVec& x) const;
  // Axis-aligned bounding box.
  std::pair<RVec, RVec> bounds() const;
};

struct RegionMeasure {
  double value = 0.0;
  double error_bound = 0.0;  // 0 for closed forms
  bool closed_form = true;
};

RegionMeasure region_measure(const RegionSpec& A);

}  // namespace hup::geometry
