#pragma once

#include <optional>
#include <stdexcept>
#include <vector>

#include "irrhodge/cochain.hpp"
#include "irrhodge/field.hpp"
#include "irrhodge/matrix.hpp"
#include "irrhodge/subspace.hpp"

namespace irrhodge {

// A decreasing filtration F^{λ_0} ⊇ F^{λ_1} ⊇ ... of subcomplexes of `base`,
// indexed by a strictly increasing list of rational levels λ_0 < ... < λ_{t-1}.
// F^{λ_0} is required to be the whole complex and F^{λ} = 0 for λ > λ_{t-1}.
// fil[i][k - lo] holds columns spanning F^{λ_i} ∩ C^k.
template <class K>
struct FilteredComplex {
  CochainComplex<K> base;
  std::vector<Rat> lambdas;
  std::vector<std::vector<Matrix<K>>> fil;

  int levels() const { return (int)lambdas.size(); }

  // Subspace F^{λ_i} ∩ C^k (columns span), for any i; i < 0 means the whole
  // space, i >= levels() means zero.
  Matrix<K> level_space(int i, int k) const {
    if (k < base.lo || k > base.hi()) return Matrix<K>(0, 0);
    if (i >= levels()) return Matrix<K>(base.dim(k), 0);
    if (i < 0) i = 0;
    return fil[i][k - base.lo];
  }

  // F^{q} ∩ C^k for an arbitrary rational cut q: the smallest stored level
  // λ_i >= q (whole space when q <= λ_0, zero when q exceeds every level).
  Matrix<K> space_at(const Rat& q, int k) const {
    int i = 0;
    while (i < levels() && lambdas[i] < q) ++i;
    return level_space(i, k);
  }

  // Increasing-view accessor F_μ := F^{-μ}; a view, never a second store.
  Matrix<K> increasing_space_at(const Rat& mu, int k) const { return space_at(-mu, k); }

  void validate() const {
    base.validate();
    if (lambdas.empty()) throw std::invalid_argument("FilteredComplex: empty level list");
    for (size_t i = 0; i + 1 < lambdas.size(); ++i)
      if (!(lambdas[i] < lambdas[i + 1]))
        throw std::invalid_argument("FilteredComplex: levels must strictly increase");
    if ((int)fil.size() != levels())
      throw std::invalid_argument("FilteredComplex: filtration level count mismatch");
    int nk = (int)base.dims.size();
    for (int i = 0; i < levels(); ++i) {
      if ((int)fil[i].size() != nk)
        throw std::invalid_argument("FilteredComplex: per-degree space count mismatch");
      for (int k = base.lo; k <= base.hi(); ++k) {
        const Matrix<K>& s = fil[i][k - base.lo];
        if (s.nr != base.dim(k))
          throw std::invalid_argument("FilteredComplex: subspace ambient dim mismatch");
        if (i == 0 && rank(s) != base.dim(k))
          throw std::invalid_argument("FilteredComplex: top level must be the whole space");
        if (i > 0 && !subspace_contains(fil[i - 1][k - base.lo], s))
          throw std::invalid_argument("FilteredComplex: filtration must decrease");
        // Subcomplex: d F^λ ⊆ F^λ.
        Matrix<K> ds = mul(base.diff(k), s);
        if (!subspace_contains(level_space(i, k + 1), ds))
          throw std::invalid_argument("FilteredComplex: level is not a subcomplex");
      }
    }
  }
};

// Outcome of the E1-degeneration test.  When it fails, `witness` carries a
// cocycle in F^λ ∩ C^k that becomes a coboundary in the full complex without
// being one inside the level — exactly the failure of strictness.
template <class K>
struct E1Witness {
  Rat lambda;
  int k = 0;
  std::vector<K> cls;
};

template <class K>
struct E1Result {
  bool degenerates = true;
  std::optional<E1Witness<K>> witness;
};

// E1-degeneration ⟺ for every level λ and degree k the comparison map
// H^k(F^λ) -> H^k(C) is injective ⟺ (ker d ∩ F^λ ∩ im d) ⊆ d(F^λ).
template <class K>
E1Result<K> e1_degenerates(const FilteredComplex<K>& fc) {
  for (int i = 0; i < fc.levels(); ++i) {
    for (int k = fc.base.lo; k <= fc.base.hi(); ++k) {
      Matrix<K> zl = subspace_intersect(fc.base.cycles(k), fc.level_space(i, k));
      Matrix<K> bad = subspace_intersect(zl, fc.base.boundaries(k));
      Matrix<K> bl = image_basis(mul(fc.base.diff(k - 1), fc.level_space(i, k - 1)));
      if (subspace_contains(bl, bad)) continue;
      for (int j = 0; j < bad.nc; ++j) {
        std::vector<K> v = bad.col(j);
        if (!subspace_contains_vector(bl, v)) {
          E1Result<K> r;
          r.degenerates = false;
          r.witness = E1Witness<K>{fc.lambdas[i], k, v};
          return r;
        }
      }
    }
  }
  return {};
}

// dim im(H^k(F^{λ_i}) -> H^k(C)) for each level i: the filtration induced on
// cohomology.  Entry [i] is the dimension at level λ_i; entry count = levels.
template <class K>
std::vector<int> induced_filtration_on_H(const FilteredComplex<K>& fc, int k) {
  std::vector<int> out;
  Matrix<K> b = fc.base.boundaries(k);
  int rb = rank(b);
  for (int i = 0; i < fc.levels(); ++i) {
    Matrix<K> zl = subspace_intersect(fc.base.cycles(k), fc.level_space(i, k));
    out.push_back(rank(hstack(zl, b)) - rb);
  }
  return out;
}

// Dimensions dim gr^{λ_i} H^k = consecutive differences of the induced
// filtration (the step past the last level is zero).
template <class K>
std::vector<int> induced_gr_on_H(const FilteredComplex<K>& fc, int k) {
  std::vector<int> f = induced_filtration_on_H(fc, k);
  std::vector<int> out;
  for (size_t i = 0; i < f.size(); ++i) {
    int next = (i + 1 < f.size()) ? f[i + 1] : 0;
    out.push_back(f[i] - next);
  }
  return out;
}

// The graded piece gr^{λ_i} = F^{λ_i} / F^{λ_{i+1}} as a cochain complex.
template <class K>
CochainComplex<K> graded_piece(const FilteredComplex<K>& fc, int i) {
  CochainComplex<K> g;
  g.lo = fc.base.lo;
  std::vector<Subquotient<K>> sq;
  for (int k = fc.base.lo; k <= fc.base.hi(); ++k) {
    sq.emplace_back(fc.level_space(i, k), fc.level_space(i + 1, k));
    g.dims.push_back(sq.back().dim());
  }
  for (int k = fc.base.lo; k < fc.base.hi(); ++k)
    g.d.push_back(induced_map(sq[k - g.lo], sq[k + 1 - g.lo], fc.base.diff(k)));
  g.validate();
  return g;
}

// Shift every level by a constant; the underlying data is untouched.
template <class K>
FilteredComplex<K> shift_levels(const FilteredComplex<K>& fc, const Rat& c) {
  FilteredComplex<K> out = fc;
  for (auto& l : out.lambdas) l += c;
  return out;
}

// Direct sum of filtered complexes over the merged level set: at a level λ the
// summand contributes its own F^λ (computed through space_at, so levels absent
// from one factor interpolate correctly).
template <class K>
FilteredComplex<K> direct_sum(const FilteredComplex<K>& a, const FilteredComplex<K>& b) {
  FilteredComplex<K> c;
  c.base = direct_sum(a.base, b.base);
  std::vector<Rat> ls;
  for (auto& l : a.lambdas) ls.push_back(l);
  for (auto& l : b.lambdas) ls.push_back(l);
  std::sort(ls.begin(), ls.end());
  ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
  c.lambdas = ls;
  c.fil.resize(ls.size());
  for (size_t i = 0; i < ls.size(); ++i) {
    for (int k = c.base.lo; k <= c.base.hi(); ++k) {
      Matrix<K> sa = (k >= a.base.lo && k <= a.base.hi()) ? a.space_at(ls[i], k)
                                                          : Matrix<K>(0, 0);
      Matrix<K> sb = (k >= b.base.lo && k <= b.base.hi()) ? b.space_at(ls[i], k)
                                                          : Matrix<K>(0, 0);
      Matrix<K> m(c.base.dim(k), sa.nc + sb.nc);
      for (int r = 0; r < sa.nr; ++r)
        for (auto& [j, v] : sa.rows[r]) m.rows[r][j] = v;
      for (int r = 0; r < sb.nr; ++r)
        for (auto& [j, v] : sb.rows[r]) m.rows[a.base.dim(k) + r][sa.nc + j] = v;
      c.fil[i].push_back(m);
    }
  }
  return c;
}

}  // namespace irrhodge
