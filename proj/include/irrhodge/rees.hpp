#pragma once

#include <stdexcept>
#include <vector>

#include "irrhodge/filtered.hpp"
#include "irrhodge/poly.hpp"
#include "irrhodge/smith.hpp"
#include "irrhodge/subspace.hpp"

namespace irrhodge {

// Rees module of a filtered complex over K[h].
//
// Writing the filtration in the increasing view G_j = F^{λ_{t-1-j}}
// (G_0 deepest, G_{t-1} everything), each degree gets an adapted basis:
// basis vector v entering at stage j carries level lev(v) = j, and the Rees
// module in that degree is free with basis { v·h^{lev v} }.  The differential
// in that basis has entries c·h^{lev(v)-lev(w)}; the filtration's subcomplex
// property makes every exponent nonnegative.
template <class K>
struct ReesComplex {
  const FilteredComplex<K>* fc = nullptr;
  // Per degree k (index k - lo): adapted basis matrix T (columns), its level
  // per column, and the Rees differential X_k expressed in adapted bases.
  std::vector<Matrix<K>> basis;
  std::vector<std::vector<int>> level;
  std::vector<PolyMat<K>> x;  // x[i] : degree lo+i -> lo+i+1
};

template <class K>
ReesComplex<K> build_rees(const FilteredComplex<K>& fc) {
  ReesComplex<K> rc;
  rc.fc = &fc;
  int t = fc.levels();
  for (int k = fc.base.lo; k <= fc.base.hi(); ++k) {
    Matrix<K> b(fc.base.dim(k), 0);
    std::vector<int> lev;
    // Deepest level first (filtration index t-1), each stage extending the
    // basis; increasing-view level of a vector added at stage i is t-1-i.
    for (int i = t - 1; i >= 0; --i) {
      Matrix<K> cand = hstack(b, fc.level_space(i, k));
      auto [ext, cols] = image_basis_cols(cand);
      b = ext;
      while ((int)lev.size() < b.nc) lev.push_back(t - 1 - i);
    }
    if (b.nc != fc.base.dim(k))
      throw std::logic_error("build_rees: filtration is not exhaustive");
    rc.basis.push_back(b);
    rc.level.push_back(lev);
  }
  for (int k = fc.base.lo; k < fc.base.hi(); ++k) {
    int i = k - fc.base.lo;
    const Matrix<K>& tsrc = rc.basis[i];
    const Matrix<K>& tdst = rc.basis[i + 1];
    Matrix<K> dv = mul(fc.base.diff(k), tsrc);
    PolyMat<K> xk(tdst.nc, std::vector<Poly<K>>(tsrc.nc, Poly<K>::zero()));
    for (int v = 0; v < tsrc.nc; ++v) {
      auto sol = solve(tdst, dv.col(v));
      if (!sol) throw std::logic_error("build_rees: adapted basis does not span");
      for (int w = 0; w < tdst.nc; ++w) {
        if (is_zero((*sol)[w])) continue;
        int e = rc.level[i][v] - rc.level[i + 1][w];
        if (e < 0) throw std::logic_error("build_rees: negative h-exponent (not a subcomplex)");
        xk[w][v] = Poly<K>::monomial((*sol)[w], e);
      }
    }
    rc.x.push_back(xk);
  }
  return rc;
}

// Specialize the Rees differential at a value of h.  `ncols` disambiguates
// the shape of zero-row matrices (degrees of dimension zero).
template <class K>
Matrix<K> rees_eval(const PolyMat<K>& x, const K& h, int ncols = -1) {
  if (ncols < 0) ncols = x.empty() ? 0 : (int)x[0].size();
  Matrix<K> m((int)x.size(), ncols);
  for (int i = 0; i < m.nr; ++i)
    for (int j = 0; j < m.nc; ++j) {
      K v = x[i][j].eval(h);
      if (!is_zero(v)) m.rows[i][j] = v;
    }
  return m;
}

// Structure of H^k of the Rees complex as a K[h]-module: free rank plus the
// h-exponents of its torsion invariant factors.
template <class K>
struct ReesCohomology {
  int k = 0;
  int free_rank = 0;
  std::vector<int> torsion_exponents;  // one per non-constant invariant factor

  bool torsion_free() const { return torsion_exponents.empty(); }
  int torsion_exponent() const {
    int m = 0;
    for (int e : torsion_exponents) m = std::max(m, e);
    return m;
  }
};

// Compute H^k(Rees) via Smith normal form: kernel of X_k from its SNF
// (generators V[:, rank:]), then the image of X_{k-1} rewritten in those
// kernel coordinates; invariant factors of that presentation give the module.
template <class K>
ReesCohomology<K> rees_cohomology(const ReesComplex<K>& rc, int k) {
  const FilteredComplex<K>& fc = *rc.fc;
  ReesCohomology<K> out;
  out.k = k;
  if (k < fc.base.lo || k > fc.base.hi()) return out;
  int i = k - fc.base.lo;
  int nk = rc.basis[i].nc;
  if (nk == 0) return out;

  // Kernel of X_k in Smith coordinates: the last `nullity` coordinates after
  // the change of basis Vinv.  At the top degree (or a zero-dimensional
  // target) X_k is the zero map: kernel is everything, no elimination needed.
  int rk = 0;
  PolyMat<K> vinv = polymat_identity<K>(nk);
  if (k < fc.base.hi() && !rc.x[i].empty()) {
    SmithResult<K> sk = smith_normal_form(rc.x[i]);
    rk = (int)sk.invariants.size();
    vinv = sk.vinv;
    // Graded matrices have monomial invariant factors; anything else signals
    // a bookkeeping error upstream.
    for (auto& f : sk.invariants)
      if (!f.is_monomial()) throw std::logic_error("rees_cohomology: non-monomial invariant");
  }
  int nullity = nk - rk;

  // Presentation of H^k: columns of Vinv·X_{k-1}; the top `rk` rows must
  // vanish because X_k X_{k-1} = 0 and the Smith diagonal is nonzero there.
  int ncm1 = (k > fc.base.lo) ? rc.basis[i - 1].nc : 0;
  PolyMat<K> y(nullity, std::vector<Poly<K>>(ncm1, Poly<K>::zero()));
  if (ncm1 > 0 && k > fc.base.lo) {
    PolyMat<K> w = polymat_mul(vinv, rc.x[i - 1]);
    for (int r = 0; r < rk; ++r)
      for (int c = 0; c < ncm1; ++c)
        if (!w[r][c].is_zero())
          throw std::logic_error("rees_cohomology: image escapes the kernel");
    for (int r = 0; r < nullity; ++r)
      for (int c = 0; c < ncm1; ++c) y[r][c] = w[rk + r][c];
  }

  if (nullity == 0) return out;
  if (ncm1 == 0) {
    out.free_rank = nullity;
    return out;
  }
  SmithResult<K> sy = smith_normal_form(y);
  out.free_rank = nullity - (int)sy.invariants.size();
  for (auto& f : sy.invariants) {
    if (!f.is_monomial()) throw std::logic_error("rees_cohomology: non-monomial invariant");
    int e = f.deg();
    if (e > 0) out.torsion_exponents.push_back(e);
  }
  return out;
}

template <class K>
struct ReesReport {
  std::vector<ReesCohomology<K>> per_degree;
  bool torsion_free = true;
  int torsion_exponent = 0;  // max over degrees; 0 when torsion-free
};

template <class K>
ReesReport<K> rees_report(const FilteredComplex<K>& fc) {
  ReesComplex<K> rc = build_rees(fc);

  // Sanity: specializing h = 1 recovers the base differential (in the adapted
  // bases), and h = 0 is level-block-lower-triangular-free, i.e. graded.
  for (int k = fc.base.lo; k < fc.base.hi(); ++k) {
    int i = k - fc.base.lo;
    Matrix<K> lhs = mul(rc.basis[i + 1], rees_eval(rc.x[i], FieldTraits<K>::one(), rc.basis[i].nc));
    Matrix<K> rhs = mul(fc.base.diff(k), rc.basis[i]);
    if (!(lhs == rhs)) throw std::logic_error("rees_report: h=1 does not recover d");
    Matrix<K> at0 = rees_eval(rc.x[i], FieldTraits<K>::zero(), rc.basis[i].nc);
    for (int r = 0; r < at0.nr; ++r)
      for (auto& [c, v] : at0.rows[r])
        if (rc.level[i + 1][r] != rc.level[i][c])
          throw std::logic_error("rees_report: h=0 differential not level-graded");
  }

  ReesReport<K> rep;
  for (int k = fc.base.lo; k <= fc.base.hi(); ++k) {
    ReesCohomology<K> h = rees_cohomology(rc, k);
    // Universal-coefficients sanity at h = 1: since all torsion is h-primary,
    // the free rank must equal dim H^k of the base complex.
    if (h.free_rank != fc.base.cohomology_dim(k))
      throw std::logic_error("rees_report: free rank disagrees with base cohomology");
    rep.torsion_free = rep.torsion_free && h.torsion_free();
    rep.torsion_exponent = std::max(rep.torsion_exponent, h.torsion_exponent());
    rep.per_degree.push_back(std::move(h));
  }
  return rep;
}

}  // namespace irrhodge
