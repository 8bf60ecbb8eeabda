#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "hup/geometry.hpp"
#include "hup/harmonics.hpp"
#include "hup/types.hpp"

namespace hup::experiments {

using geometry::ConeSampler;
using geometry::RegionSpec;
using nlohmann::json;

enum class RankVariant { fourier, spectral };

const char* to_string(RankVariant v);

struct RankExperimentConfig {
  int n = 2;
  int L = 3;
  RankVariant variant = RankVariant::fourier;
  int directions = 0;  // cone directions; 0 picks twice the largest block dimension
  std::vector<double> radii{0.5, 1.0, 1.5, 2.0};
  int k_max = -1;          // spectral variant: k = 0..k_max, default L + 2
  bool theta_augment = false;  // 4L + 5 rotations e^{i theta} omega per direction
  int entry_checks = 2;    // entries cross-checked against direct quadrature
  int quadrature_degree = -1;
  double threshold = 1e-8;
  int jobs = 1;

  /// directions * rotations * radii
  int sample_count(const ConeSampler& cone) const;
  int coefficient_dimension() const;
  void validate() const;  // std::invalid_argument
};

struct ExperimentReport {
  std::string experiment;
  json inputs;
  json results = json::object();
  json calibration = json::object();
  std::string verdict;
  bool exploratory = false;
  double wall_seconds = 0.0;
  std::vector<std::string> warnings;

  std::vector<double> singular_values;  // after column equilibration
  std::vector<CVec> nullspace;          // coefficient vectors, original scaling

  json to_json() const;
};

/// Column labels (p, q, j) of the coefficient space, bidegree blocks in bidegrees() order.
struct CoefficientLabel {
  int p = 0, q = 0, j = 0;
};
std::vector<CoefficientLabel> coefficient_labels(int n, int L);

struct RankSystem {
  CMat matrix;                     // rows: samples (x rotations x k), cols: coefficient_labels
  std::vector<CVec> points;        // evaluation points z, one per row block
  std::vector<CoefficientLabel> labels;
  RVec column_scale;               // inverse size of the radial factor of each column
  std::vector<double> dropped_radii;
  std::vector<std::string> warnings;
};

RankSystem assemble_rank_system(const RankExperimentConfig& cfg, const ConeSampler& cone);

struct RankAnalysis {
  RVec singular_values;     // of A * diag(column_scale)
  std::vector<CVec> nullspace;
  double ratio = 0.0;       // sigma_min / sigma_max
  int nullity = 0;
  bool robust = true;       // same nullity at threshold / 10 and threshold * 10
};

/// Columns are scaled by column_scale (ones when empty) before the SVD.
RankAnalysis analyze_rank(const CMat& A, double threshold, const RVec& column_scale = RVec());

/// Number of independent harmonics of each block vanishing on the rank system's points
/// (degree blocks for the Fourier variant, bidegree blocks for the spectral one).
int direct_vanishing_count(const RankExperimentConfig& cfg, const RankSystem& sys);

/// Distance of v from the span of the nullspace, relative to |v|.
double nullspace_residual(const std::vector<CVec>& nullspace, const CVec& v);

/// Coefficient vector of a harmonic bigraded polynomial in the labels of (n, L).
CVec harmonic_coefficients(const harmonics::BigradedPolynomial& Y, int L);

/// Cone {|z_1| = |z_2|} inside the zero set of |z_1|^2 - |z_2|^2 in H_{1,1}.
ConeSampler harmonic_cone_11(int n, std::vector<double> radii = {1.0});
harmonics::BigradedPolynomial harmonic_11(int n);

/// Complex cone {Re(a z_1 conj(z_2)) + |z|^2 = 0}, |a| > 2: the real part of the H equation alone.
ConeSampler quadric_h_cone(int n, cplx a, std::vector<double> radii = {1.0});

ExperimentReport hup_rank(const RankExperimentConfig& cfg, const ConeSampler& cone);

/// CSV: index,sigma
void write_spectrum_csv(std::ostream& os, const std::vector<double>& singular_values);
/// One line per entry: "row col re im".
void write_matrix_text(std::ostream& os, const CMat& A);

// ---------------------------------------------------------------------------

struct DeterminacyConfig {
  int n = 2;
  double r1 = 1.0, r2 = 1.7;
  int L = 3, K = 12;
  int directions = 0;  // points on S_{r2}; 0 picks twice the coefficient dimension
  double threshold = 1e-8;
  double witness_floor = 1e-6;
  std::uint64_t seed = 0x5d;
};

/// sqrt(2 x_0) with x_0 the smallest zero of L_{k0-q}^{n+p+q-1}.
double adversarial_radius(int n, int p, int q, int k0);

ExperimentReport spectral_determinacy(const DeterminacyConfig& cfg);

// ---------------------------------------------------------------------------

struct AnnihilationConfig {
  RegionSpec region = RegionSpec::disk(RVec::Zero(2), 1.0);
  int N = 2;
  int M = 40;
  int trials = 4;
  int iterations = 200;
  std::uint64_t seed = 7;
  double step = 0.02;
  double floor = 0.05;  // defect above this counts as bounded away from 0
};

ExperimentReport finite_rank_experiment(const AnnihilationConfig& cfg);

}  // namespace hup::experiments
