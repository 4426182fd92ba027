#pragma once

#include <stdexcept>
#include <vector>

#include "irrhodge/matrix.hpp"
#include "irrhodge/subspace.hpp"

namespace irrhodge {

// A bounded cochain complex ... -> C^k -> C^{k+1} -> ... with C^k = K^{dims}.
// Degrees run lo .. lo+dims.size()-1; outside that range every term is zero.
template <class K>
struct CochainComplex {
  int lo = 0;
  std::vector<int> dims;
  std::vector<Matrix<K>> d;  // d[i] : C^{lo+i} -> C^{lo+i+1}; one entry per adjacent pair

  int hi() const { return lo + (int)dims.size() - 1; }

  int dim(int k) const {
    if (k < lo || k > hi()) return 0;
    return dims[k - lo];
  }

  // Differential out of degree k, with correct shapes at the boundary.
  Matrix<K> diff(int k) const {
    if (k >= lo && k < hi()) return d[k - lo];
    return Matrix<K>(dim(k + 1), dim(k));
  }

  void validate() const {
    if ((int)d.size() != std::max(0, (int)dims.size() - 1))
      throw std::invalid_argument("CochainComplex: differential count mismatch");
    for (size_t i = 0; i < d.size(); ++i) {
      if (d[i].nr != dims[i + 1] || d[i].nc != dims[i])
        throw std::invalid_argument("CochainComplex: differential shape mismatch");
    }
    for (size_t i = 0; i + 1 < d.size(); ++i) {
      if (!is_zero_matrix(mul(d[i + 1], d[i])))
        throw std::invalid_argument("CochainComplex: d∘d != 0");
    }
  }

  int cohomology_dim(int k) const {
    if (k < lo || k > hi()) return 0;
    int rk = rank(diff(k));
    int rkm1 = rank(diff(k - 1));
    return dim(k) - rk - rkm1;
  }

  std::vector<int> cohomology_dims() const {
    std::vector<int> out;
    for (int k = lo; k <= hi(); ++k) out.push_back(cohomology_dim(k));
    return out;
  }

  int total_cohomology() const {
    int t = 0;
    for (int k = lo; k <= hi(); ++k) t += cohomology_dim(k);
    return t;
  }

  int total_dim() const {
    int t = 0;
    for (int x : dims) t += x;
    return t;
  }

  // Basis (columns) of ker(d : C^k -> C^{k+1}).
  Matrix<K> cycles(int k) const { return kernel_basis(diff(k)); }

  // Spanning columns of im(d : C^{k-1} -> C^k).
  Matrix<K> boundaries(int k) const { return image_basis(diff(k - 1)); }
};

// Direct sum of two complexes over the union of their degree ranges.
template <class K>
CochainComplex<K> direct_sum(const CochainComplex<K>& a, const CochainComplex<K>& b) {
  CochainComplex<K> c;
  c.lo = std::min(a.lo, b.lo);
  int hi = std::max(a.hi(), b.hi());
  for (int k = c.lo; k <= hi; ++k) c.dims.push_back(a.dim(k) + b.dim(k));
  for (int k = c.lo; k < hi; ++k) {
    Matrix<K> m(c.dims[k + 1 - c.lo], c.dims[k - c.lo]);
    Matrix<K> da = a.diff(k), db = b.diff(k);
    for (int i = 0; i < da.nr; ++i)
      for (auto& [j, v] : da.rows[i]) m.rows[i][j] = v;
    for (int i = 0; i < db.nr; ++i)
      for (auto& [j, v] : db.rows[i]) m.rows[a.dim(k + 1) + i][a.dim(k) + j] = v;
    c.d.push_back(m);
  }
  return c;
}

}  // namespace irrhodge
