#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include "irrhodge/cochain.hpp"
#include "irrhodge/localmodel.hpp"
#include "irrhodge/subspace.hpp"

namespace irrhodge {

inline long binom(int n, int k) {
  if (k < 0 || k > n || n < 0) return 0;
  long r = 1;
  for (int i = 0; i < k; ++i) r = r * (n - i) / (i + 1);
  return r;
}

// ---------------------------------------------------------------------------
// gr_complex: graded pieces of the pole-order filtration.
//
// In degree k the graded piece at level λ is the boundary quotient
// Ω^k(log D)([(k-λ)P]) / Ω^k(log D)([(k-λ-ε)P]) for infinitesimal ε > 0; the
// denominator drops the multiplicity by one exactly on the components with
// λ·e_i ∈ ℤ (the jumping components).  The induced differential is O-linear:
// the d-part of ∇ provably raises the pole-order filtration and dies in the
// quotient, leaving the df∧ class, so the complex splits into lines
// k ↦ (anchor - k·e) on which the twist-adjusted exponents are constant.

template <class K>
struct GrLine {
  Multidegree anchor;          // multidegree of the line at degree 0
  bool alive = false;          // some quotient class exists along the line
  CochainComplex<K> cx;        // the line complex in degrees 0..n
  std::vector<int> h;          // its cohomology dimensions
  bool killed_by_gred = true;  // one multiplication by x_1...x_ell kills every class
};

template <class K>
struct GrComplexResult {
  Rat lambda;
  std::vector<GrLine<K>> lines;
  bool all_acyclic = true;
  bool supported_on_pred = true;  // killed_by_gred across all lines
  bool identically_zero = true;
  int jumping_count = 0;          // components with λ e_i ∈ ℤ
  int window_enlarged_by = 0;     // slice multidegrees visited outside the input window
};

// Infinitesimal used to realize the open pole-order bound [(k-λ-ε)P] through
// the same floor-based membership primitive: small enough that subtracting it
// only lowers floor((k-λ)e_i) on the jumping components.
inline Rat pole_epsilon(const ChartData& c, const Rat& lambda) {
  long den = (long)lambda.get_den().get_si();
  int emax = 1;
  for (int x : c.e) emax = std::max(emax, x);
  Rat eps(1, 2 * den * emax);
  eps.canonicalize();
  return eps;
}

template <class K>
GrComplexResult<K> gr_complex(const ChartData& c, const Rat& lambda, const MdWindow& window) {
  c.validate();
  GrComplexResult<K> res;
  res.lambda = lambda;
  for (int i = 0; i < c.ell; ++i) {
    Rat le = lambda * c.e[i];
    if (le.get_den() == 1) res.jumping_count++;
  }
  Rat eps = pole_epsilon(c, lambda);
  std::vector<int> shift(c.n(), 0);
  for (int i = 0; i < c.ell; ++i) shift[i] = c.e[i];

  for (const Multidegree& anchor : window) {
    GrLine<K> line;
    line.anchor = anchor;
    line.cx.lo = 0;

    // Quotient slice masks per degree via the membership primitive.
    std::vector<std::vector<uint32_t>> masks(c.n() + 1);
    for (int k = 0; k <= c.n(); ++k) {
      Multidegree ak = anchor;
      for (int i = 0; i < c.n(); ++i) ak[i] -= k * shift[i];
      if (k > 0 && !window.count(ak)) res.window_enlarged_by++;
      Rat mu = Rat(k) - lambda;
      std::vector<uint32_t> num = log_slice_masks(c, k, ak, mu);
      std::vector<uint32_t> den = log_slice_masks(c, k, ak, mu - eps);
      std::set<uint32_t> dens(den.begin(), den.end());
      for (uint32_t j : num)
        if (!dens.count(j)) masks[k].push_back(j);
      line.cx.dims.push_back((int)masks[k].size());
      if (!masks[k].empty()) line.alive = true;
    }

    // Induced differential: apply the full ∇ to each representative and
    // project; d-parts must land in the pole-order denominator of the
    // neighbouring line, df-parts in this line's quotient basis (or its
    // denominator when the target slice has no quotient classes).
    for (int k = 0; k < c.n(); ++k) {
      SliceIndex src(masks[k]);
      SliceIndex dst(masks[k + 1]);
      Matrix<K> d(dst.dim(), src.dim());
      Multidegree ak = anchor;
      for (int i = 0; i < c.n(); ++i) ak[i] -= k * shift[i];
      Multidegree ak1 = ak;
      for (int i = 0; i < c.n(); ++i) ak1[i] -= shift[i];
      for (int col = 0; col < src.dim(); ++col) {
        MonomialLogForm<K> w =
            nabla(c, MonomialLogForm<K>::monomial(ak, src.masks[col], FieldTraits<K>::one()),
                  FieldTraits<K>::one(), FieldTraits<K>::one());
        for (auto& [key, coef] : w.terms) {
          if (key.first == ak) {
            // d-part: lives at degree k+1, same multidegree — pole order
            // [(k+1-λ)P] minus ε keeps it: it must be a denominator member.
            std::vector<uint32_t> dd = log_slice_masks(c, k + 1, ak, Rat(k + 1) - lambda - eps);
            if (std::find(dd.begin(), dd.end(), key.second) == dd.end())
              throw std::logic_error("gr_complex: d-part escaped the filtration denominator");
            continue;
          }
          if (key.first != ak1) throw std::logic_error("gr_complex: unexpected multidegree shift");
          int idx = dst.find(key.second);
          if (idx < 0) {
            // Target slice has no quotient classes only when its denominator
            // swallowed everything; confirm membership there.
            std::vector<uint32_t> dd = log_slice_masks(c, k + 1, ak1, Rat(k + 1) - lambda - eps);
            if (std::find(dd.begin(), dd.end(), key.second) == dd.end())
              throw std::logic_error("gr_complex: df-part escaped the quotient");
            continue;
          }
          d.add_to(idx, col, coef);
        }
      }
      line.cx.d.push_back(d);
    }
    line.cx.validate();
    line.h = line.cx.cohomology_dims();

    // Support check: multiplying a class by x_1...x_ell raises every pole
    // exponent by one; the product must land in the denominator.
    for (int k = 0; k <= c.n() && line.killed_by_gred; ++k) {
      Multidegree ak = anchor;
      for (int i = 0; i < c.n(); ++i) ak[i] -= k * shift[i];
      Multidegree up = ak;
      for (int i = 0; i < c.ell; ++i) up[i] += 1;
      for (uint32_t j : masks[k]) {
        std::vector<uint32_t> num = log_slice_masks(c, k, up, Rat(k) - lambda);
        std::vector<uint32_t> den = log_slice_masks(c, k, up, Rat(k) - lambda - eps);
        bool in_num = std::find(num.begin(), num.end(), j) != num.end();
        bool in_den = std::find(den.begin(), den.end(), j) != den.end();
        if (!in_num || !in_den) line.killed_by_gred = false;
      }
    }

    if (line.alive) res.identically_zero = false;
    for (int x : line.h)
      if (x != 0) res.all_acyclic = false;
    res.supported_on_pred = res.supported_on_pred && line.killed_by_gred;
    res.lines.push_back(std::move(line));
  }
  return res;
}

template <class K>
CochainComplex<K> assembled_total(const GrComplexResult<K>& r) {
  CochainComplex<K> t;
  t.lo = 0;
  bool first = true;
  for (auto& line : r.lines) {
    if (first) {
      t = line.cx;
      first = false;
    } else {
      t = direct_sum(t, line.cx);
    }
  }
  t.validate();
  return t;
}

// ---------------------------------------------------------------------------
// verify_omega_f_log: the pole-order row
//   Ω^p(log D)([μP]) → Q_1 → Q_2 → ...,
//   Q_j = Ω^{p+j}(log D)([(μ+j)P]) / Ω^{p+j}(log D)([(μ+j-1)P]),
// must have zero cohomology in positions ≥ 1, and its kernel at position 0
// must be exactly the Ω_f^p([μP]) slice — for the ∇-induced maps and for the
// df∧-induced maps alike.

struct OmegaFRowFailure {
  Multidegree anchor;
  int position = 0;  // 0 = the kernel comparison, j >= 1 = cohomology at Q_j
  int h_dim = 0;
  std::string differential;  // "nabla" or "df"
};

struct OmegaFLogVerdict {
  bool pass = true;
  bool hp_matches_omega_f = true;
  int lines_full = 0;     // position-0 slice present and some Q_j nonzero
  int lines_vacuous = 0;  // position-0 slice present, all Q_j zero
  int lines_empty = 0;
  std::vector<OmegaFRowFailure> failures;
};

template <class K>
OmegaFLogVerdict verify_omega_f_log(const ChartData& c, const Rat& mu, int p, const MdWindow& window,
                               bool sabotage_drop_df = false) {
  c.validate();
  OmegaFLogVerdict verdict;
  std::vector<int> shift(c.n(), 0);
  for (int i = 0; i < c.ell; ++i) shift[i] = c.e[i];

  for (const Multidegree& anchor : window) {
    int len = c.n() - p;  // positions 0..len
    // Slice bases along the line: position 0 ambient, then quotients.
    std::vector<std::vector<uint32_t>> masks(len + 1);
    masks[0] = log_slice_masks(c, p, anchor, mu);
    bool any_q = false;
    for (int j = 1; j <= len; ++j) {
      Multidegree aj = anchor;
      for (int i = 0; i < c.n(); ++i) aj[i] -= j * shift[i];
      std::vector<uint32_t> num = log_slice_masks(c, p + j, aj, mu + j);
      std::vector<uint32_t> den = log_slice_masks(c, p + j, aj, mu + j - 1);
      std::set<uint32_t> dens(den.begin(), den.end());
      for (uint32_t jm : num)
        if (!dens.count(jm)) masks[j].push_back(jm);
      if (!masks[j].empty()) any_q = true;
    }
    if (masks[0].empty() && !any_q) {
      verdict.lines_empty++;
      continue;
    }
    (any_q ? verdict.lines_full : verdict.lines_vacuous)++;

    for (int variant = 0; variant < 2; ++variant) {
      K u = variant == 0 ? FieldTraits<K>::one() : FieldTraits<K>::zero();
      K v = sabotage_drop_df ? FieldTraits<K>::zero() : FieldTraits<K>::one();
      const char* name = variant == 0 ? "nabla" : "df";

      std::vector<Matrix<K>> maps;
      for (int j = 0; j < len; ++j) {
        SliceIndex src(masks[j]);
        SliceIndex dst(masks[j + 1]);
        Matrix<K> d(dst.dim(), src.dim());
        Multidegree aj = anchor;
        for (int i = 0; i < c.n(); ++i) aj[i] -= j * shift[i];
        Multidegree aj1 = aj;
        for (int i = 0; i < c.n(); ++i) aj1[i] -= shift[i];
        for (int col = 0; col < src.dim(); ++col) {
          MonomialLogForm<K> w = nabla(
              c, MonomialLogForm<K>::monomial(aj, src.masks[col], FieldTraits<K>::one()), u, v);
          for (auto& [key, coef] : w.terms) {
            if (key.first == aj) {
              // d-part: same multidegree, one degree up — always inside the
              // denominator Ω^{p+j+1}([(μ+j)P]) of the next quotient.
              std::vector<uint32_t> dd = log_slice_masks(c, p + j + 1, aj, mu + j);
              if (std::find(dd.begin(), dd.end(), key.second) == dd.end())
                throw std::logic_error("verify_omega_f_log: d-part escaped the denominator");
              continue;
            }
            if (key.first != aj1)
              throw std::logic_error("verify_omega_f_log: unexpected multidegree shift");
            int idx = dst.find(key.second);
            if (idx < 0) {
              std::vector<uint32_t> dd = log_slice_masks(c, p + j + 1, aj1, mu + j);
              if (std::find(dd.begin(), dd.end(), key.second) == dd.end())
                throw std::logic_error("verify_omega_f_log: df-part escaped the quotient");
              continue;
            }
            d.add_to(idx, col, coef);
          }
        }
        maps.push_back(d);
      }

      for (size_t j = 0; j + 1 < maps.size(); ++j)
        if (!is_zero_matrix(mul(maps[j + 1], maps[j])))
          throw std::logic_error("verify_omega_f_log: induced maps do not compose to zero");

      // Cohomology in positions >= 1 must vanish.
      for (int j = 1; j <= len; ++j) {
        int rk_out = (j < len) ? rank(maps[j]) : 0;
        int rk_in = rank(maps[j - 1]);
        int h = (int)masks[j].size() - rk_out - rk_in;
        if (h != 0) {
          verdict.pass = false;
          verdict.failures.push_back({anchor, j, h, name});
        }
      }
      // Kernel at position 0 must equal the Ω_f slice.
      Matrix<K> ker = len > 0 ? kernel_basis(maps[0]) : Matrix<K>::identity((int)masks[0].size());
      Matrix<K> omf = omega_f_slice<K>(c, p, anchor, mu);
      if (!subspace_equal(ker, omf)) {
        verdict.pass = false;
        verdict.hp_matches_omega_f = false;
        verdict.failures.push_back({anchor, 0, ker.nc - omf.nc, name});
      }
    }
  }
  return verdict;
}

// ---------------------------------------------------------------------------
// relative_log_complex: Ω^p_{X/S}(log D) = coker((dg/g)∧ : Ω^{p-1} → Ω^p).

inline GradedSheafSpace relative_log_complex(const ChartData& c, int p,
                                             const MdWindow& window = {}) {
  c.validate();
  if (c.ell == 0) throw std::invalid_argument("relative_log_complex: needs a pole (ell >= 1)");
  GradedSheafSpace s;
  s.chart = c;
  s.kind = SpaceKind::relative;
  s.p = p;
  s.mu = Rat(0);
  s.window = window;
  return s;
}

// The quotient map of the slice at a, as a matrix from ambient log-slice
// coordinates to the subquotient coordinates.
template <class K>
Matrix<K> relative_projection(const ChartData& c, int p, const Multidegree& a) {
  SliceIndex amb(log_slice_masks(c, p, a, Rat(0)));
  Matrix<K> den = image_basis(dgg_wedge_matrix<K>(c, p, a, Rat(0)));
  Subquotient<K> sq(Matrix<K>::identity(amb.dim()), den);
  Matrix<K> proj(sq.dim(), amb.dim());
  for (int j = 0; j < amb.dim(); ++j) {
    std::vector<K> unit(amb.dim(), FieldTraits<K>::zero());
    unit[j] = FieldTraits<K>::one();
    std::vector<K> co = sq.coords(unit);
    for (int i = 0; i < sq.dim(); ++i)
      if (!irrhodge::is_zero(co[i])) proj.rows[i][j] = co[i];
  }
  return proj;
}

// ---------------------------------------------------------------------------
// verify_C1_sequence: termwise exactness of
//   0 → Ω_f^p → Ω^p(log D) → Ω̄^p_{X/S}(log D) → 0
// per slice (the kernel of the composite quotient is (dg/g)∧Ω^{p-1} + g·Ω^p,
// which must coincide with the Ω_f slice), plus acyclicity of the reduction
// (Ω̄^•(log D) = Ω^•/g·Ω^•, dg/g∧) per slice.  Strict compatibility with the
// stupid filtration σ_{≥p} is exactly termwise exactness, recorded as such.

struct C1Failure {
  int p = 0;
  Multidegree a;
  std::string what;
};

struct C1Verdict {
  bool pass = true;
  bool termwise_exact = true;
  bool bar_acyclic = true;
  bool sigma_strict = true;
  std::vector<C1Failure> failures;
};

template <class K>
C1Verdict verify_C1_sequence(const ChartData& c, const MdWindow& window) {
  c.validate();
  C1Verdict verdict;
  for (const Multidegree& a : window) {
    for (int p = 0; p <= c.n(); ++p) {
      SliceIndex amb(log_slice_masks(c, p, a, Rat(0)));
      Matrix<K> sub = omega_f_slice<K>(c, p, a, Rat(0));
      Matrix<K> ker = image_basis(
          hstack(dgg_wedge_matrix<K>(c, p, a, Rat(0)), g_omega_slice<K>(c, p, a, Rat(0))));
      if (!subspace_equal(sub, ker)) {
        verdict.termwise_exact = false;
        verdict.failures.push_back({p, a, "image != kernel"});
      }
      int bar_rel_dim = amb.dim() - ker.nc;  // Ω̄^p_{X/S} slice dimension
      if (sub.nc + bar_rel_dim != amb.dim()) {
        verdict.termwise_exact = false;
        verdict.failures.push_back({p, a, "dimension bookkeeping"});
      }
    }

    // (Ω̄^•(log D), dg/g∧): reduction mod g only, Koszul differential.
    std::vector<Subquotient<K>> bar;
    for (int k = 0; k <= c.n(); ++k) {
      SliceIndex amb(log_slice_masks(c, k, a, Rat(0)));
      bar.emplace_back(Matrix<K>::identity(amb.dim()),
                       image_basis(g_omega_slice<K>(c, k, a, Rat(0))));
    }
    CochainComplex<K> bx;
    bx.lo = 0;
    for (auto& b : bar) bx.dims.push_back(b.dim());
    for (int k = 0; k < c.n(); ++k)
      bx.d.push_back(induced_map(bar[k], bar[k + 1], dgg_wedge_matrix<K>(c, k + 1, a, Rat(0))));
    bx.validate();
    for (int k = 0; k <= c.n(); ++k)
      if (bx.cohomology_dim(k) != 0) {
        verdict.bar_acyclic = false;
        verdict.failures.push_back({k, a, "bar complex not acyclic"});
      }
  }
  verdict.sigma_strict = verdict.termwise_exact;
  verdict.pass = verdict.termwise_exact && verdict.bar_acyclic;
  return verdict;
}

// ---------------------------------------------------------------------------
// quotient_cohomology_lemma: H^p(Ω^•(log D)/Ω_f^•, d) per slice.  For e = 1
// the cohomology is concentrated in the zero slice, where the differential
// vanishes and the quotient is ⋀^p⟨δ_x, δ_y⟩/(Σ_i δ_{x_i})∧⋀^{p-1}, of
// dimension C(ℓ+m-1, p).

template <class K>
struct QuotientLemmaResult {
  bool pass = true;
  int dim_at_zero = 0;
  long expected = 0;
  std::vector<MonomialLogForm<K>> basis;  // representatives at the zero slice
  std::vector<Multidegree> nonzero_slices;
};

// Matrix of u·d between consecutive log slices at the same multidegree.
template <class K>
Matrix<K> d_slice_matrix(const ChartData& c, int p, const Multidegree& a, const Rat& mu) {
  SliceIndex src(log_slice_masks(c, p, a, mu));
  SliceIndex dst(log_slice_masks(c, p + 1, a, mu));
  Matrix<K> d(dst.dim(), src.dim());
  for (int col = 0; col < src.dim(); ++col) {
    MonomialLogForm<K> w =
        nabla(c, MonomialLogForm<K>::monomial(a, src.masks[col], FieldTraits<K>::one()),
              FieldTraits<K>::one(), FieldTraits<K>::zero());
    for (auto& [key, coef] : w.terms) {
      if (key.first != a) throw std::logic_error("d_slice_matrix: d moved the multidegree");
      int idx = dst.find(key.second);
      if (idx < 0) throw std::logic_error("d_slice_matrix: d escaped the slice");
      d.add_to(idx, col, coef);
    }
  }
  return d;
}

template <class K>
QuotientLemmaResult<K> quotient_cohomology_lemma(const ChartData& c, int p,
                                                 const MdWindow& window) {
  c.validate();
  for (int x : c.e)
    if (x != 1) throw std::invalid_argument("quotient_cohomology_lemma: needs e = (1,...,1)");
  if (c.ell == 0) throw std::invalid_argument("quotient_cohomology_lemma: needs ell >= 1");
  Multidegree zero(c.n(), 0);
  if (!window.count(zero))
    throw std::invalid_argument("quotient_cohomology_lemma: window must contain 0");

  QuotientLemmaResult<K> res;
  res.expected = binom(c.ell + c.m - 1, p);
  for (const Multidegree& a : window) {
    // Quotient complex (Ω^•/Ω_f^•, d) at the slice; d preserves multidegree.
    std::vector<Subquotient<K>> q;
    for (int k = std::max(0, p - 1); k <= std::min(c.n(), p + 1); ++k) {
      SliceIndex amb(log_slice_masks(c, k, a, Rat(0)));
      q.emplace_back(Matrix<K>::identity(amb.dim()), omega_f_slice<K>(c, k, a, Rat(0)));
    }
    int base = std::max(0, p - 1);
    auto block = [&](int k) -> Subquotient<K>& { return q[k - base]; };
    Matrix<K> d_out = (p + 1 <= c.n())
                          ? induced_map(block(p), block(p + 1), d_slice_matrix<K>(c, p, a, Rat(0)))
                          : Matrix<K>(0, block(p).dim());
    Matrix<K> d_in = (p - 1 >= 0)
                         ? induced_map(block(p - 1), block(p), d_slice_matrix<K>(c, p - 1, a, Rat(0)))
                         : Matrix<K>(block(p).dim(), 0);
    Matrix<K> zmat = kernel_basis(d_out);
    Matrix<K> bmat = image_basis(d_in);
    int h = zmat.nc - rank(bmat);
    bool is_zero_md = (a == zero);
    if (is_zero_md) {
      res.dim_at_zero = h;
      if (h != res.expected) res.pass = false;
      // Representative basis of H^p at the zero slice.
      Subquotient<K> hsq(zmat, bmat);
      SliceIndex amb(log_slice_masks(c, p, a, Rat(0)));
      for (int j = 0; j < hsq.dim(); ++j) {
        std::vector<K> v = hsq.rep(j);  // coordinates in the quotient block
        std::vector<K> av(amb.dim(), FieldTraits<K>::zero());
        for (int t = 0; t < block(p).dim(); ++t) {
          if (irrhodge::is_zero(v[t])) continue;
          std::vector<K> r = block(p).rep(t);
          for (int i = 0; i < amb.dim(); ++i) av[i] += v[t] * r[i];
        }
        MonomialLogForm<K> f;
        for (int i = 0; i < amb.dim(); ++i)
          if (!irrhodge::is_zero(av[i])) f.add_term(a, amb.masks[i], av[i]);
        res.basis.push_back(f);
      }
    } else if (h != 0) {
      res.pass = false;
      res.nonzero_slices.push_back(a);
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// Windowed assembly of the twisted complex (Ω^•(log D)([(μ+k)P]), u·d + v·df∧)
// over a per-degree multidegree family W_k with W_{k+1} = W_k ∪ (W_k - e):
// used to confirm that cohomology decomposes over cosets of ℤ·e.

template <class K>
CochainComplex<K> assemble_twisted_complex(const ChartData& c, const Rat& mu, const K& u,
                                           const K& v, const MdWindow& w0) {
  c.validate();
  std::vector<int> shift(c.n(), 0);
  for (int i = 0; i < c.ell; ++i) shift[i] = c.e[i];

  std::vector<MdWindow> w(c.n() + 1);
  w[0] = w0;
  for (int k = 0; k < c.n(); ++k) {
    w[k + 1] = w[k];
    for (const Multidegree& a : w[k]) {
      Multidegree am = a;
      for (int i = 0; i < c.n(); ++i) am[i] -= shift[i];
      w[k + 1].insert(am);
    }
  }

  // Global index: degree k -> list of (multidegree, mask).
  struct Key {
    Multidegree a;
    uint32_t j;
    bool operator<(const Key& o) const { return a != o.a ? a < o.a : j < o.j; }
  };
  std::vector<std::map<Key, int>> index(c.n() + 1);
  CochainComplex<K> cx;
  cx.lo = 0;
  for (int k = 0; k <= c.n(); ++k) {
    int cnt = 0;
    for (const Multidegree& a : w[k])
      for (uint32_t j : log_slice_masks(c, k, a, mu + k)) index[k][{a, j}] = cnt++;
    cx.dims.push_back(cnt);
  }
  for (int k = 0; k < c.n(); ++k) {
    Matrix<K> d(cx.dims[k + 1], cx.dims[k]);
    for (auto& [key, col] : index[k]) {
      MonomialLogForm<K> out =
          nabla(c, MonomialLogForm<K>::monomial(key.a, key.j, FieldTraits<K>::one()), u, v);
      for (auto& [okey, coef] : out.terms) {
        auto it = index[k + 1].find({okey.first, okey.second});
        if (it == index[k + 1].end())
          throw std::logic_error("assemble_twisted_complex: window leak");
        d.add_to(it->second, col, coef);
      }
    }
    cx.d.push_back(d);
  }
  cx.validate();
  return cx;
}

}  // namespace irrhodge
