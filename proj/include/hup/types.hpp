#pragma once

#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace hup {

using cplx = std::complex<double>;
using RVec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr cplx kI{0.0, 1.0};

// Multi-index alpha in Z_+^n.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) {
    for (int e : entries_)
      if (e < 0) throw std::invalid_argument("MultiIndex: negative entry");
  }
  MultiIndex(std::initializer_list<int> entries) : MultiIndex(std::vector<int>(entries)) {}

  int dim() const { return static_cast<int>(entries_.size()); }
  int order() const { return std::accumulate(entries_.begin(), entries_.end(), 0); }
  int operator[](int j) const { return entries_[static_cast<std::size_t>(j)]; }
  const std::vector<int>& entries() const { return entries_; }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;
  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::vector<int> entries_;
};

// All multi-indices of dimension n and order exactly k, in lexicographic
// order (first entry descending).
std::vector<MultiIndex> multi_indices(int n, int k);

// Multi-indices of dimension n with order <= max_order, ordered by
// (order, lexicographic).
std::vector<MultiIndex> multi_indices_upto(int n, int max_order);

// C^n is identified with R^{2n} through z = x + iy -> (x_1..x_n, y_1..y_n).
inline CVec to_complex(const RVec& v) {
  const auto n = v.size() / 2;
  CVec z(n);
  for (Eigen::Index j = 0; j < n; ++j) z[j] = cplx(v[j], v[j + n]);
  return z;
}

inline RVec to_real(const CVec& z) {
  const auto n = z.size();
  RVec v(2 * n);
  for (Eigen::Index j = 0; j < n; ++j) {
    v[j] = z[j].real();
    v[j + n] = z[j].imag();
  }
  return v;
}

// Hermitian product sum_j z_j conj(w_j).
inline cplx hdot(const CVec& z, const CVec& w) {
  cplx s = 0.0;
  for (Eigen::Index j = 0; j < z.size(); ++j) s += z[j] * std::conj(w[j]);
  return s;
}

// Symplectic rotation (x, y) -> (y, -x); on C^n this is z -> -i z.
inline RVec symplectic_rotation(const RVec& omega) {
  const auto n = omega.size() / 2;
  RVec out(omega.size());
  out.head(n) = omega.tail(n);
  out.tail(n) = -omega.head(n);
  return out;
}

// Non-fatal numerical warnings collected by an operation and copied into
// reports.
struct Diagnostics {
  std::vector<std::string> warnings;
  void warn(std::string w) { warnings.push_back(std::move(w)); }
};

inline void warn(Diagnostics* d, std::string w) {
  if (d) d->warn(std::move(w));
}

}  // namespace hup
