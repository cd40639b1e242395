#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <vector>

#include "lplab/field.hpp"
#include "lplab/spectral.hpp"

namespace testing {

using lplab::Grid;
using lplab::VectorField;

// Samples f(x) componentwise on the grid (last axis fastest).
inline VectorField sample(const Grid& g, int m, const std::function<double(int, double, double, double)>& f) {
  const int n = g.size();
  const double h = 2.0 * std::numbers::pi / n;
  std::vector<double> out(g.physical_count() * m);
  std::size_t idx = 0;
  for (int c = 0; c < m; ++c) {
    if (g.dim() == 2) {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out[idx++] = f(c, i * h, j * h, 0.0);
    } else {
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k) out[idx++] = f(c, i * h, j * h, k * h);
    }
  }
  return VectorField::from_physical(g, m, std::move(out));
}

inline double max_abs_diff(const VectorField& a, const VectorField& b) {
  const auto pa = lplab::to_physical(a);
  const auto pb = lplab::to_physical(b);
  double m = 0.0;
  for (std::size_t i = 0; i < pa.physical().size(); ++i) m = std::max(m, std::abs(pa.physical()[i] - pb.physical()[i]));
  return m;
}

inline double max_abs(const VectorField& a) {
  const auto pa = lplab::to_physical(a);
  double m = 0.0;
  for (double v : pa.physical()) m = std::max(m, std::abs(v));
  return m;
}

inline double l2(const VectorField& a) { return lplab::lp_norm(lplab::to_physical(a), 2.0); }

}  // namespace testing
