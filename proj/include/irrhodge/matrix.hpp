#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "irrhodge/field.hpp"

namespace irrhodge {

// Sparse exact matrix over a field K.  Rows are ordered maps column -> value
// (no explicit zeros).  All algorithms are deterministic: ordered containers
// and fixed tie-breaking only.
template <class K>
struct Matrix {
  int nr = 0, nc = 0;
  std::vector<std::map<int, K>> rows;

  Matrix() = default;
  Matrix(int r, int c) : nr(r), nc(c), rows(r) {}

  static Matrix zero(int r, int c) { return Matrix(r, c); }

  static Matrix identity(int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i) m.rows[i][i] = FieldTraits<K>::one();
    return m;
  }

  const K* get(int i, int j) const {
    auto it = rows[i].find(j);
    return it == rows[i].end() ? nullptr : &it->second;
  }

  K at(int i, int j) const {
    auto it = rows[i].find(j);
    return it == rows[i].end() ? FieldTraits<K>::zero() : it->second;
  }

  void set(int i, int j, const K& v) {
    if (i < 0 || i >= nr || j < 0 || j >= nc) throw std::out_of_range("Matrix::set");
    if (is_zero(v))
      rows[i].erase(j);
    else
      rows[i][j] = v;
  }

  void add_to(int i, int j, const K& v) {
    if (is_zero(v)) return;
    auto it = rows[i].find(j);
    if (it == rows[i].end()) {
      rows[i][j] = v;
    } else {
      it->second += v;
      if (is_zero(it->second)) rows[i].erase(it);
    }
  }

  int nnz() const {
    int n = 0;
    for (auto& r : rows) n += (int)r.size();
    return n;
  }

  std::vector<K> col(int j) const {
    std::vector<K> out(nr, FieldTraits<K>::zero());
    for (int i = 0; i < nr; ++i) {
      auto it = rows[i].find(j);
      if (it != rows[i].end()) out[i] = it->second;
    }
    return out;
  }

  void set_col(int j, const std::vector<K>& v) {
    for (int i = 0; i < nr; ++i) set(i, j, v[i]);
  }

  std::vector<std::vector<K>> to_dense() const {
    std::vector<std::vector<K>> d(nr, std::vector<K>(nc, FieldTraits<K>::zero()));
    for (int i = 0; i < nr; ++i)
      for (auto& [j, v] : rows[i]) d[i][j] = v;
    return d;
  }

  static Matrix from_dense(const std::vector<std::vector<K>>& d) {
    Matrix m((int)d.size(), d.empty() ? 0 : (int)d[0].size());
    for (int i = 0; i < m.nr; ++i)
      for (int j = 0; j < m.nc; ++j)
        if (!is_zero(d[i][j])) m.rows[i][j] = d[i][j];
    return m;
  }

  static Matrix from_cols(int n, const std::vector<std::vector<K>>& cols) {
    Matrix m(n, (int)cols.size());
    for (int j = 0; j < (int)cols.size(); ++j) {
      if ((int)cols[j].size() != n) throw std::invalid_argument("from_cols: bad column length");
      for (int i = 0; i < n; ++i)
        if (!is_zero(cols[j][i])) m.rows[i][j] = cols[j][i];
    }
    return m;
  }
};

template <class K>
bool operator==(const Matrix<K>& a, const Matrix<K>& b) {
  if (a.nr != b.nr || a.nc != b.nc) return false;
  for (int i = 0; i < a.nr; ++i) {
    // maps hold no explicit zeros, so direct comparison is sound
    if (a.rows[i].size() != b.rows[i].size()) return false;
    auto it = b.rows[i].begin();
    for (auto& [j, v] : a.rows[i]) {
      if (it->first != j || !(it->second == v)) return false;
      ++it;
    }
  }
  return true;
}

template <class K>
Matrix<K> transpose(const Matrix<K>& a) {
  Matrix<K> t(a.nc, a.nr);
  for (int i = 0; i < a.nr; ++i)
    for (auto& [j, v] : a.rows[i]) t.rows[j][i] = v;
  return t;
}

template <class K>
Matrix<K> mul(const Matrix<K>& a, const Matrix<K>& b) {
  if (a.nc != b.nr) throw std::invalid_argument("mul: shape mismatch");
  Matrix<K> c(a.nr, b.nc);
  for (int i = 0; i < a.nr; ++i) {
    for (auto& [k, av] : a.rows[i]) {
      for (auto& [j, bv] : b.rows[k]) c.add_to(i, j, av * bv);
    }
  }
  return c;
}

template <class K>
Matrix<K> add(const Matrix<K>& a, const Matrix<K>& b) {
  if (a.nr != b.nr || a.nc != b.nc) throw std::invalid_argument("add: shape mismatch");
  Matrix<K> c = a;
  for (int i = 0; i < b.nr; ++i)
    for (auto& [j, v] : b.rows[i]) c.add_to(i, j, v);
  return c;
}

template <class K>
Matrix<K> negate(const Matrix<K>& a) {
  Matrix<K> c = a;
  for (auto& r : c.rows)
    for (auto& [j, v] : r) v = -v;
  return c;
}

template <class K>
Matrix<K> sub(const Matrix<K>& a, const Matrix<K>& b) {
  return add(a, negate(b));
}

template <class K>
Matrix<K> hstack(const Matrix<K>& a, const Matrix<K>& b) {
  if (a.nr != b.nr) throw std::invalid_argument("hstack: row mismatch");
  Matrix<K> c(a.nr, a.nc + b.nc);
  for (int i = 0; i < a.nr; ++i) {
    c.rows[i] = a.rows[i];
    for (auto& [j, v] : b.rows[i]) c.rows[i][a.nc + j] = v;
  }
  return c;
}

template <class K>
Matrix<K> vstack(const Matrix<K>& a, const Matrix<K>& b) {
  if (a.nc != b.nc) throw std::invalid_argument("vstack: col mismatch");
  Matrix<K> c(a.nr + b.nr, a.nc);
  for (int i = 0; i < a.nr; ++i) c.rows[i] = a.rows[i];
  for (int i = 0; i < b.nr; ++i) c.rows[a.nr + i] = b.rows[i];
  return c;
}

template <class K>
bool is_zero_matrix(const Matrix<K>& a) {
  for (auto& r : a.rows)
    if (!r.empty()) return false;
  return true;
}

template <class K>
std::vector<K> mat_apply(const Matrix<K>& a, const std::vector<K>& x) {
  if ((int)x.size() != a.nc) throw std::invalid_argument("apply: size mismatch");
  std::vector<K> y(a.nr, FieldTraits<K>::zero());
  for (int i = 0; i < a.nr; ++i)
    for (auto& [j, v] : a.rows[i]) y[i] += v * x[j];
  return y;
}

// ---------------------------------------------------------------------------
// Elimination engine.
//
// Deterministic Gaussian elimination on sparse rows.  Pivot columns are
// restricted to [0, eligible_cols).  Two pivot policies:
//   - canonical: strict left-to-right column order (yields the unique RREF
//     when fully reduced; pivot columns = leftmost independent columns);
//   - markowitz: minimize (row_nnz-1)*(col_nnz-1) over the active submatrix,
//     used for large matrices to limit fill-in.
// Small matrices always use the canonical policy.
// ---------------------------------------------------------------------------

template <class K>
struct Echelon {
  std::vector<std::map<int, K>> rows;       // pivot rows, pivot entry == 1
  std::vector<std::pair<int, int>> pivots;  // (index into rows, pivot column), in order
  int rank = 0;
  int nr = 0, nc = 0;
  // nonzero rows remained whose support lies entirely outside the eligible
  // columns (for solve: inconsistency)
  bool residue = false;
};

constexpr int kMarkowitzThreshold = 64;

template <class K>
Echelon<K> eliminate(const Matrix<K>& a, int eligible_cols, bool full_reduce,
                     bool force_canonical = false) {
  std::vector<std::map<int, K>> work = a.rows;
  std::vector<int> active;
  for (int i = 0; i < a.nr; ++i)
    if (!work[i].empty()) active.push_back(i);

  bool markowitz = !force_canonical && (a.nr > kMarkowitzThreshold || a.nc > kMarkowitzThreshold);

  Echelon<K> res;
  res.nr = a.nr;
  res.nc = a.nc;

  std::vector<std::pair<int, int>> pivot_list;  // (row id in work, col)

  auto eliminate_with = [&](int prow, int pcol) {
    // normalize pivot row
    K piv = work[prow][pcol];
    if (!is_one(piv)) {
      for (auto& [j, v] : work[prow]) v /= piv;
    }
    // clear pcol from all other active rows
    std::vector<int> next_active;
    next_active.reserve(active.size());
    for (int r : active) {
      if (r == prow) continue;
      auto it = work[r].find(pcol);
      if (it != work[r].end()) {
        K c = it->second;
        // row_r -= c * row_p
        for (auto& [j, v] : work[prow]) {
          auto jt = work[r].find(j);
          if (jt == work[r].end()) {
            work[r][j] = -(c * v);
          } else {
            jt->second -= c * v;
            if (is_zero(jt->second)) work[r].erase(jt);
          }
        }
      }
      if (!work[r].empty()) next_active.push_back(r);
    }
    active.swap(next_active);
    pivot_list.emplace_back(prow, pcol);
  };

  if (!markowitz) {
    for (int col = 0; col < eligible_cols && !active.empty(); ++col) {
      int best = -1;
      size_t best_nnz = 0;
      for (int r : active) {
        auto it = work[r].find(col);
        if (it != work[r].end()) {
          if (best == -1 || work[r].size() < best_nnz) {
            best = r;
            best_nnz = work[r].size();
          }
        }
      }
      if (best >= 0) eliminate_with(best, col);
    }
  } else {
    while (!active.empty()) {
      // column nnz over active rows (within eligible columns)
      std::map<int, int> colnnz;
      for (int r : active)
        for (auto& [j, v] : work[r])
          if (j < eligible_cols) ++colnnz[j];
      if (colnnz.empty()) break;
      long best_score = -1;
      int brow = -1, bcol = -1;
      for (int r : active) {
        long rn = 0;
        for (auto& [j, v] : work[r])
          if (j < eligible_cols) ++rn;
        if (rn == 0) continue;
        for (auto& [j, v] : work[r]) {
          if (j >= eligible_cols) continue;
          long score = (rn - 1) * (long)(colnnz[j] - 1);
          if (best_score < 0 || score < best_score ||
              (score == best_score && (j < bcol || (j == bcol && r < brow)))) {
            best_score = score;
            brow = r;
            bcol = j;
          }
        }
      }
      if (brow < 0) break;
      eliminate_with(brow, bcol);
    }
  }

  if (full_reduce) {
    // clear each pivot column from all earlier pivot rows
    for (int t = (int)pivot_list.size() - 1; t >= 0; --t) {
      auto [prow, pcol] = pivot_list[t];
      for (int s = 0; s < (int)pivot_list.size(); ++s) {
        if (s == t) continue;
        int r = pivot_list[s].first;
        auto it = work[r].find(pcol);
        if (it == work[r].end()) continue;
        K c = it->second;
        for (auto& [j, v] : work[prow]) {
          auto jt = work[r].find(j);
          if (jt == work[r].end()) {
            work[r][j] = -(c * v);
          } else {
            jt->second -= c * v;
            if (is_zero(jt->second)) work[r].erase(jt);
          }
        }
      }
    }
  }

  res.residue = !active.empty();

  // pack pivot rows in pivot-column order
  std::sort(pivot_list.begin(), pivot_list.end(),
            [](auto& x, auto& y) { return x.second < y.second; });
  for (auto& [prow, pcol] : pivot_list) {
    res.pivots.emplace_back((int)res.rows.size(), pcol);
    res.rows.push_back(std::move(work[prow]));
  }
  res.rank = (int)res.pivots.size();
  return res;
}

template <class K>
int rank(const Matrix<K>& a) {
  return eliminate(a, a.nc, false).rank;
}

// Unique reduced row echelon form (canonical pivot policy, fully reduced).
template <class K>
std::pair<Matrix<K>, std::vector<int>> rref(const Matrix<K>& a) {
  Echelon<K> e = eliminate(a, a.nc, true, /*force_canonical=*/true);
  Matrix<K> r(e.rank, a.nc);
  std::vector<int> pivots;
  for (int i = 0; i < e.rank; ++i) {
    r.rows[i] = e.rows[e.pivots[i].first];
    pivots.push_back(e.pivots[i].second);
  }
  return {r, pivots};
}

// Basis of the right kernel, returned as columns of a matrix (nc x nullity).
template <class K>
Matrix<K> kernel_basis(const Matrix<K>& a) {
  Echelon<K> e = eliminate(a, a.nc, true);
  std::vector<bool> is_pivot(a.nc, false);
  std::map<int, int> pivot_row;  // col -> row index in e.rows
  for (auto& [ri, pc] : e.pivots) {
    is_pivot[pc] = true;
    pivot_row[pc] = ri;
  }
  std::vector<int> free_cols;
  for (int j = 0; j < a.nc; ++j)
    if (!is_pivot[j]) free_cols.push_back(j);
  Matrix<K> k(a.nc, (int)free_cols.size());
  for (int idx = 0; idx < (int)free_cols.size(); ++idx) {
    int f = free_cols[idx];
    k.rows[f][idx] = FieldTraits<K>::one();
    for (auto& [pc, ri] : pivot_row) {
      auto it = e.rows[ri].find(f);
      if (it != e.rows[ri].end()) k.rows[pc][idx] = -it->second;
    }
  }
  return k;
}

// Solve a x = b; returns nullopt if inconsistent.  Free variables are 0.
template <class K>
std::optional<std::vector<K>> solve(const Matrix<K>& a, const std::vector<K>& b) {
  if ((int)b.size() != a.nr) throw std::invalid_argument("solve: size mismatch");
  Matrix<K> ab = a;
  ab.nc = a.nc + 1;
  for (int i = 0; i < a.nr; ++i)
    if (!is_zero(b[i])) ab.rows[i][a.nc] = b[i];
  Echelon<K> e = eliminate(ab, a.nc, true);
  if (e.residue) return std::nullopt;  // leftover rows live only in the b column
  std::vector<K> x(a.nc, FieldTraits<K>::zero());
  for (auto& [ri, pc] : e.pivots) {
    auto it = e.rows[ri].find(a.nc);
    if (it != e.rows[ri].end()) x[pc] = it->second;
  }
  return x;
}

// Columns of `a` at the leftmost-independent positions (a basis of the
// column span, drawn from the original columns).
template <class K>
std::pair<Matrix<K>, std::vector<int>> image_basis_cols(const Matrix<K>& a) {
  Echelon<K> e = eliminate(a, a.nc, false, /*force_canonical=*/true);
  std::vector<int> cols;
  for (auto& [ri, pc] : e.pivots) cols.push_back(pc);
  std::sort(cols.begin(), cols.end());
  Matrix<K> m(a.nr, (int)cols.size());
  for (int i = 0; i < a.nr; ++i)
    for (auto& [j, v] : a.rows[i]) {
      auto it = std::lower_bound(cols.begin(), cols.end(), j);
      if (it != cols.end() && *it == j) m.rows[i][(int)(it - cols.begin())] = v;
    }
  return {m, cols};
}

template <class K>
Matrix<K> image_basis(const Matrix<K>& a) {
  return image_basis_cols(a).first;
}

}  // namespace irrhodge
