#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "hup/geometry.hpp"
#include "hup/types.hpp"

// Weyl transforms on C^1 in the Hermite basis. Grid functions live on the
// square [-R, R]^2 with (x, y) <-> z = x + i y.
namespace hup::weyl {

using geometry::RegionSpec;

/// (2 pi)^{-n/2} <pi_lambda(z) phi_alpha^lambda, phi_beta^lambda>.
cplx fourier_wigner(const MultiIndex& alpha, const MultiIndex& beta, const CVec& z, double lambda = 1.0);

struct PlanarGrid {
  double R = 24.0;
  double step = 0.08;

  int size() const;  // nodes per axis, symmetric about 0
  double coord(int i) const;
  int center() const { return size() / 2; }
  double cell() const { return step * step; }
};

/// Default grid resolving Hermite indices up to M.
PlanarGrid grid_for(int M);

struct GridFunction {
  PlanarGrid grid;
  CMat values;  // values(i, j) = g(x_i, y_j)
  bool has_support = false;
  RegionSpec support;

  static GridFunction zero(const PlanarGrid& grid);
  static GridFunction sample(const PlanarGrid& grid, const std::function<cplx(double, double)>& f);

  double norm() const;
  cplx inner(const GridFunction& o) const;
  /// Largest |value| outside the declared support (0 without one).
  double support_violation() const;
  /// g(-z)
  GridFunction reflected() const;
};

/// Coefficients c(a, b) = <g, phi_ab> of a truncated special Hermite expansion (lambda = 1).
using HermiteCoefficients = CMat;

/// sum c(a, b) phi_ab sampled on the grid.
GridFunction synthesize(const HermiteCoefficients& c, const PlanarGrid& grid);

struct WeylMatrix {
  int M = 0;
  double lambda = 1.0;
  CMat entries;               // entries(beta, alpha) = <W(g) phi_alpha, phi_beta>
  double tail_estimate = 0.0; // HS norm carried by indices in (M, M + 8]

  double hs_norm() const { return entries.norm(); }
  RVec singular_values() const;
  /// One line per entry: "beta alpha re im".
  void write_text(std::ostream& os) const;
};

/// W_lambda(g) truncated to indices <= M.
WeylMatrix weyl_transform(const GridFunction& g, int M, double lambda = 1.0, Diagnostics* diag = nullptr);

/// Special Hermite coefficients of g up to index M.
HermiteCoefficients hermite_coefficients(const GridFunction& g, int M);

enum class RangeIndex { first, second };

/// Which index of phi_ab spans the range of W(phi_ab); computed once from W(phi_01).
RangeIndex range_index();

GridFunction project_EA(const GridFunction& g, const RegionSpec& A);

/// Keeps the coefficients whose range index is below N (truncation M).
GridFunction project_FN(const GridFunction& g, int N, int M);
HermiteCoefficients project_FN(const HermiteCoefficients& c, int N);

/// e^{(i/2) Im(z conj(w))} g(z - w) for the grid vector w = (di, dj) * step.
GridFunction twisted_translate(const GridFunction& g, int di, int dj);

/// (2 pi)^{-1} chi_A(z) tr(P_N pi(w) pi(-z)).
cplx kernel_K(cplx z, cplx w, const RegionSpec& A, int N);

// ---------------------------------------------------------------------------
// Restrictions of Hermite systems to a region

struct RegionGrid {
  double step = 0.02;
  std::vector<cplx> points;  // lattice points step * Z^2 inside A

  double measure() const { return static_cast<double>(points.size()) * step * step; }
};

RegionGrid region_grid(const RegionSpec& A, double step = 0.02);

/// Columns phi_ab at the region points, for a < rows and b <= M, column index a * (M + 1) + b.
CMat region_values(const RegionGrid& G, int rows, int M);

/// Gram matrix int_A phi_i conj(phi_j) of the same columns.
CMat region_gram(const RegionGrid& G, int rows, int M);

struct HSReport {
  double computed = 0.0;      // basis route
  double predicted = 0.0;     // (2 pi)^{-1} m(A) N
  double rel_err = 0.0;
  double tail_bound = 0.0;    // mass lost to the truncation b <= M
  double kernel_route = 0.0;  // int_A int |K(z, w)|^2 dw dz
  double kernel_spread = 0.0; // variation of int |K(z, .)|^2 over sampled z
  double kernel_vs_basis = 0.0;
  double grid_measure = 0.0;
  bool truncation_dominated = false;
};

HSReport hs_identity(const RegionSpec& A, int N, int M, double step = 0.02);

struct ProbeReport {
  RVec singular_values;  // descending
  int count_near_one = 0;
  double hs_norm2 = 0.0;
  int bound = 0;
  double stability = 0.0;  // max change of the leading singular values with M doubled
};

ProbeReport annihilation_probe(const RegionSpec& A, int N, int M, double step = 0.02);

struct SapReport {
  double squared = 0.0;        // max ||g||^2 / (||g||^2_{A^c} + ||P_N^perp W g||^2)
  double unsquared = 0.0;      // same with ||g||_{A^c} unsquared
  double exact_squared = 0.0;  // supremum over the truncated space
  int trials = 0;
};

SapReport sap_estimate(const RegionSpec& A, int N, int M, int trials, std::uint64_t seed, double step = 0.02);

/// ||g||^2 / (||g||^2_{A^c} + ||P_N^perp W(g)||^2) for a grid function (truncation M).
double sap_ratio(const GridFunction& g, const RegionSpec& A, int N, int M);

struct AnnihilationReport {
  double defect = 0.0;        // min over trials of ||P_N^perp W g|| / ||W g||, g supported in A
  double exact_defect = 0.0;  // sqrt(1 - sigma_max^2)
  std::vector<double> history;  // defect of the best trial per iteration
  int iterations = 0;
};

AnnihilationReport finite_rank_annihilation(const RegionSpec& A, int N, int M, int trials, int iterations,
                                            std::uint64_t seed, double step = 0.02);

/// Random coefficients with a, b <= band, unit l2 norm.
HermiteCoefficients random_coefficients(int M, int band, std::uint64_t seed);

}  // namespace hup::weyl
