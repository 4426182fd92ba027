#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <vector>

#include "irrhodge/filtered.hpp"
#include "irrhodge/subspace.hpp"

namespace irrhodge {

// Spectral-sequence pages of a filtered complex.
//
// The page bidegree p is an integer.  When every level λ_i is an integer, p
// ranges over those values and F^p means the usual cut (smallest stored level
// >= p).  Otherwise p is the position index 0..levels-1 and F^p := F^{λ_p}.
template <class K>
struct PageIndexing {
  const FilteredComplex<K>* fc;
  bool integer_indexed;

  explicit PageIndexing(const FilteredComplex<K>& f) : fc(&f) {
    integer_indexed = true;
    for (auto& l : f.lambdas)
      if (l.get_den() != 1) integer_indexed = false;
  }

  std::vector<int> plevels() const {
    std::vector<int> out;
    for (int i = 0; i < fc->levels(); ++i)
      out.push_back(integer_indexed ? (int)fc->lambdas[i].get_num().get_si() : i);
    return out;
  }

  Rat lambda_of(int p) const {
    if (!integer_indexed) return fc->lambdas[p];
    return Rat(p);
  }

  // F^p ∩ C^k.
  Matrix<K> F(int p, int k) const {
    if (integer_indexed) return fc->space_at(Rat(p), k);
    return fc->level_space(p, k);
  }
};

// Z_r^{p,q} = F^p C^{p+q} ∩ d^{-1}(F^{p+r} C^{p+q+1});  Z_0^{p,q} = F^p C^{p+q}.
template <class K>
Matrix<K> page_z(const PageIndexing<K>& ix, int r, int p, int k) {
  Matrix<K> fp = ix.F(p, k);
  if (r <= 0) return fp;
  Matrix<K> pre = preimage(ix.fc->base.diff(k), ix.F(p + r, k + 1));
  return subspace_intersect(fp, pre);
}

// Denominator span of E_r^{p,q} inside Z_r^{p,q}:
//   Z_{r-1}^{p+1,q-1} + d(Z_{r-1}^{p-r+1, q+r-2}).
template <class K>
Matrix<K> page_denominator(const PageIndexing<K>& ix, int r, int p, int k) {
  Matrix<K> zin = page_z(ix, r - 1, p + 1, k);
  Matrix<K> zsrc = page_z(ix, r - 1, p - r + 1, k - 1);
  return hstack(zin, mul(ix.fc->base.diff(k - 1), zsrc));
}

template <class K>
struct PageEntry {
  int p = 0, q = 0;
  Rat lambda;
  int dim = 0;
};

template <class K>
struct SpectralPage {
  int r = 0;
  std::vector<PageEntry<K>> entries;  // one per (stored level p, degree k)

  int dim_at(int p, int q) const {
    for (auto& e : entries)
      if (e.p == p && e.q == q) return e.dim;
    return 0;
  }
  int total() const {
    int t = 0;
    for (auto& e : entries) t += e.dim;
    return t;
  }
  int total_in_degree(int k) const {
    int t = 0;
    for (auto& e : entries)
      if (e.p + e.q == k) t += e.dim;
    return t;
  }
};

// Dimensions of the E_r page at every stored level p and total degree k.
// (Entries at p outside the stored levels vanish: above the deepest level the
// numerator is zero, below the top level numerator and denominator agree.)
template <class K>
SpectralPage<K> spectral_page(const FilteredComplex<K>& fc, int r) {
  PageIndexing<K> ix(fc);
  SpectralPage<K> page;
  page.r = r;
  for (int p : ix.plevels()) {
    for (int k = fc.base.lo; k <= fc.base.hi(); ++k) {
      Matrix<K> z = page_z(ix, r, p, k);
      Matrix<K> den = page_denominator(ix, r, p, k);
      PageEntry<K> e;
      e.p = p;
      e.q = k - p;
      e.lambda = ix.lambda_of(p);
      e.dim = rank(z) - rank(den);
      page.entries.push_back(e);
    }
  }
  return page;
}

// A page index beyond which nothing can move: differentials d_r leave the
// window of stored levels and the complex's degree span.
template <class K>
int stable_page_index(const FilteredComplex<K>& fc) {
  PageIndexing<K> ix(fc);
  std::vector<int> ps = ix.plevels();
  int span = ps.empty() ? 0 : ps.back() - ps.front();
  int degspan = fc.base.hi() - fc.base.lo;
  return span + degspan + 2;
}

template <class K>
SpectralPage<K> e_infinity(const FilteredComplex<K>& fc) {
  return spectral_page(fc, stable_page_index(fc));
}

// The E_1 page with its d_1 differentials, represented through explicit
// subquotients so induced maps are available.
template <class K>
struct E1Page {
  std::vector<int> plevels;
  int lo = 0, hi = 0;
  // blocks[(p,k)] = subquotient presenting E_1^{p,k-p} inside C^k.
  std::map<std::pair<int, int>, Subquotient<K>> blocks;
  // d1[(p,k)] : E_1^{p,k-p} -> E_1^{p+1,k-p}, induced by d.
  std::map<std::pair<int, int>, Matrix<K>> d1;

  int dim_at(int p, int k) const {
    auto it = blocks.find({p, k});
    return it == blocks.end() ? 0 : it->second.dim();
  }
};

template <class K>
E1Page<K> e1_page(const FilteredComplex<K>& fc) {
  PageIndexing<K> ix(fc);
  E1Page<K> page;
  page.plevels = ix.plevels();
  page.lo = fc.base.lo;
  page.hi = fc.base.hi();
  for (int p : page.plevels)
    for (int k = page.lo; k <= page.hi; ++k) {
      Matrix<K> z = image_basis(page_z(ix, 1, p, k));
      Matrix<K> den = image_basis(page_denominator(ix, 1, p, k));
      page.blocks.emplace(std::make_pair(p, k), Subquotient<K>(z, den));
    }
  for (int p : page.plevels) {
    auto next = std::find(page.plevels.begin(), page.plevels.end(), p) + 1;
    if (next == page.plevels.end()) continue;
    // d_1 raises p by exactly 1; with gaps in the stored levels the target
    // block at p+1 is zero-dimensional unless p+1 is stored.
    int p1 = p + 1;
    bool stored = std::find(page.plevels.begin(), page.plevels.end(), p1) != page.plevels.end();
    if (!stored) continue;
    for (int k = page.lo; k < page.hi; ++k) {
      const Subquotient<K>& src = page.blocks.at({p, k});
      const Subquotient<K>& dst = page.blocks.at({p1, k + 1});
      page.d1.emplace(std::make_pair(p, k), induced_map(src, dst, fc.base.diff(k)));
    }
  }
  return page;
}

}  // namespace irrhodge
