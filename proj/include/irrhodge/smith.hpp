#pragma once

#include <stdexcept>
#include <vector>

#include "irrhodge/poly.hpp"

namespace irrhodge {

// Dense matrix over K[h] for Smith-normal-form bookkeeping.  Rees-complex
// differentials are small (total dimension bounded by the filtered complex),
// so dense storage keeps the transformation tracking simple.
template <class K>
using PolyMat = std::vector<std::vector<Poly<K>>>;

template <class K>
PolyMat<K> polymat_zero(int r, int c) {
  return PolyMat<K>(r, std::vector<Poly<K>>(c, Poly<K>::zero()));
}

template <class K>
PolyMat<K> polymat_identity(int n) {
  PolyMat<K> m = polymat_zero<K>(n, n);
  for (int i = 0; i < n; ++i) m[i][i] = Poly<K>::one();
  return m;
}

template <class K>
PolyMat<K> polymat_mul(const PolyMat<K>& a, const PolyMat<K>& b) {
  int r = (int)a.size(), inner = a.empty() ? 0 : (int)a[0].size();
  int c = b.empty() ? 0 : (int)b[0].size();
  if ((int)b.size() != inner) throw std::invalid_argument("polymat_mul: shape mismatch");
  PolyMat<K> m = polymat_zero<K>(r, c);
  for (int i = 0; i < r; ++i)
    for (int k = 0; k < inner; ++k) {
      if (a[i][k].is_zero()) continue;
      for (int j = 0; j < c; ++j) {
        if (b[k][j].is_zero()) continue;
        m[i][j] += a[i][k] * b[k][j];
      }
    }
  return m;
}

template <class K>
bool polymat_equal(const PolyMat<K>& a, const PolyMat<K>& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != b[i].size()) return false;
    for (size_t j = 0; j < a[i].size(); ++j)
      if (!(a[i][j] == b[i][j])) return false;
  }
  return true;
}

template <class K>
bool polymat_is_identity(const PolyMat<K>& a) {
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].size() != a.size()) return false;
    for (size_t j = 0; j < a[i].size(); ++j) {
      if (i == j ? !is_one(a[i][j]) : !a[i][j].is_zero()) return false;
    }
  }
  return true;
}

// Smith normal form over K[h] with invertible transformations tracked on
// both sides: u * a * v == s, u * uinv == id, v * vinv == id, s diagonal
// with monic invariant factors s_1 | s_2 | ... .
template <class K>
struct SmithResult {
  PolyMat<K> s, u, uinv, v, vinv;
  std::vector<Poly<K>> invariants;  // nonzero diagonal entries, in order
  K det_u = FieldTraits<K>::one();  // determinants of u and v: nonzero constants
  K det_v = FieldTraits<K>::one();
};

template <class K>
SmithResult<K> smith_normal_form(const PolyMat<K>& a) {
  int nr = (int)a.size();
  int nc = nr ? (int)a[0].size() : 0;
  SmithResult<K> res;
  res.s = a;
  res.u = polymat_identity<K>(nr);
  res.uinv = polymat_identity<K>(nr);
  res.v = polymat_identity<K>(nc);
  res.vinv = polymat_identity<K>(nc);
  auto& s = res.s;

  auto row_swap = [&](int i, int j) {
    if (i == j) return;
    std::swap(s[i], s[j]);
    std::swap(res.u[i], res.u[j]);
    for (int r = 0; r < nr; ++r) std::swap(res.uinv[r][i], res.uinv[r][j]);
    res.det_u = -res.det_u;
  };
  auto col_swap = [&](int i, int j) {
    if (i == j) return;
    for (int r = 0; r < nr; ++r) std::swap(s[r][i], s[r][j]);
    for (int r = 0; r < nc; ++r) std::swap(res.v[r][i], res.v[r][j]);
    std::swap(res.vinv[i], res.vinv[j]);
    res.det_v = -res.det_v;
  };
  // row_i -= q * row_j
  auto row_axpy = [&](int i, int j, const Poly<K>& q) {
    if (q.is_zero()) return;
    for (int cidx = 0; cidx < nc; ++cidx) s[i][cidx] -= q * s[j][cidx];
    for (int cidx = 0; cidx < nr; ++cidx) res.u[i][cidx] -= q * res.u[j][cidx];
    for (int r = 0; r < nr; ++r) res.uinv[r][j] += q * res.uinv[r][i];
  };
  // col_i -= q * col_j
  auto col_axpy = [&](int i, int j, const Poly<K>& q) {
    if (q.is_zero()) return;
    for (int r = 0; r < nr; ++r) s[r][i] -= q * s[r][j];
    for (int r = 0; r < nc; ++r) res.v[r][i] -= q * res.v[r][j];
    for (int cidx = 0; cidx < nc; ++cidx) res.vinv[j][cidx] += q * res.vinv[i][cidx];
  };
  auto row_scale = [&](int i, const K& cst) {
    Poly<K> f = Poly<K>::constant(cst);
    for (int cidx = 0; cidx < nc; ++cidx) s[i][cidx] = f * s[i][cidx];
    for (int cidx = 0; cidx < nr; ++cidx) res.u[i][cidx] = f * res.u[i][cidx];
    K inv = FieldTraits<K>::one() / cst;
    Poly<K> finv = Poly<K>::constant(inv);
    for (int r = 0; r < nr; ++r) res.uinv[r][i] = finv * res.uinv[r][i];
    res.det_u = res.det_u * cst;
  };

  int t = 0;
  const int tmax = std::min(nr, nc);
  while (t < tmax) {
    // locate a nonzero entry of minimal degree in the active block
    int bi = -1, bj = -1;
    for (int i = t; i < nr; ++i)
      for (int j = t; j < nc; ++j) {
        if (s[i][j].is_zero()) continue;
        if (bi < 0 || s[i][j].deg() < s[bi][bj].deg()) {
          bi = i;
          bj = j;
        }
      }
    if (bi < 0) break;  // active block is zero
    row_swap(t, bi);
    col_swap(t, bj);

    bool dirty = false;
    for (int i = t + 1; i < nr; ++i) {
      if (s[i][t].is_zero()) continue;
      auto [q, r] = divmod(s[i][t], s[t][t]);
      row_axpy(i, t, q);
      if (!r.is_zero()) dirty = true;  // lower-degree entry appeared
    }
    for (int j = t + 1; j < nc; ++j) {
      if (s[t][j].is_zero()) continue;
      auto [q, r] = divmod(s[t][j], s[t][t]);
      col_axpy(j, t, q);
      if (!r.is_zero()) dirty = true;
    }
    if (dirty) continue;  // re-select a smaller pivot

    // the pivot must divide every remaining entry (for the divisor chain)
    bool fixed = false;
    for (int i = t + 1; i < nr && !fixed; ++i)
      for (int j = t + 1; j < nc && !fixed; ++j) {
        if (s[i][j].is_zero()) continue;
        auto [q, r] = divmod(s[i][j], s[t][t]);
        if (!r.is_zero()) {
          // pull the offending row into the pivot row and restart the step
          row_axpy(t, i, -Poly<K>::one());
          fixed = true;
        }
      }
    if (fixed) continue;

    if (!irrhodge::is_one(s[t][t].leading()))
      row_scale(t, FieldTraits<K>::one() / s[t][t].leading());
    ++t;
  }

  for (int i = 0; i < tmax; ++i)
    if (i < nr && i < nc && !s[i][i].is_zero()) res.invariants.push_back(s[i][i]);
  return res;
}

// Certificate check: u*a*v == s, u*uinv == id, v*vinv == id, diagonal s with
// a monic divisibility chain, constant nonzero dets.
template <class K>
bool smith_certify(const PolyMat<K>& a, const SmithResult<K>& r) {
  if (!polymat_equal(polymat_mul(polymat_mul(r.u, a), r.v), r.s)) return false;
  if (!polymat_is_identity(polymat_mul(r.u, r.uinv))) return false;
  if (!polymat_is_identity(polymat_mul(r.v, r.vinv))) return false;
  if (irrhodge::is_zero(r.det_u) || irrhodge::is_zero(r.det_v)) return false;
  int nr = (int)r.s.size(), nc = nr ? (int)r.s[0].size() : 0;
  for (int i = 0; i < nr; ++i)
    for (int j = 0; j < nc; ++j)
      if (i != j && !r.s[i][j].is_zero()) return false;
  for (size_t i = 0; i < r.invariants.size(); ++i) {
    if (r.invariants[i].is_zero()) return false;
    if (!irrhodge::is_one(r.invariants[i].leading())) return false;
    if (i + 1 < r.invariants.size()) {
      auto [q, rem] = divmod(r.invariants[i + 1], r.invariants[i]);
      if (!rem.is_zero()) return false;
    }
  }
  return true;
}

}  // namespace irrhodge
