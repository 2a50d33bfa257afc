#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <vector>

namespace tailcs {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Ordered set of column indices, kept sorted ascending.
using SupportSet = std::vector<Index>;

enum class Ensemble { gaussian, partial_dct };

inline const char* to_string(Ensemble e) {
  return e == Ensemble::gaussian ? "gaussian" : "partial_dct";
}

/// Membership mask: mask[j] = true iff j is in s.
inline std::vector<bool> membership_mask(const SupportSet& s, Index n) {
  std::vector<bool> mask(static_cast<std::size_t>(n), false);
  for (Index j : s) mask[static_cast<std::size_t>(j)] = true;
  return mask;
}

/// Indicator of the complement T^c as a double array (1 off the set, 0 on it).
inline Eigen::ArrayXd complement_indicator(const SupportSet& s, Index n) {
  Eigen::ArrayXd ind = Eigen::ArrayXd::Ones(n);
  for (Index j : s) ind[j] = 0.0;
  return ind;
}

inline SupportSet support_of(const Vector& z, double tol = 0.0) {
  SupportSet s;
  for (Index j = 0; j < z.size(); ++j)
    if (std::abs(z[j]) > tol) s.push_back(j);
  return s;
}

inline bool is_sorted_unique(const SupportSet& s) {
  return std::adjacent_find(s.begin(), s.end(),
                            [](Index a, Index b) { return a >= b; }) == s.end();
}

}  // namespace tailcs
