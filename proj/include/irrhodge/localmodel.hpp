#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "irrhodge/field.hpp"
#include "irrhodge/matrix.hpp"
#include "irrhodge/subspace.hpp"

namespace irrhodge {

// Monomial chart for the local model f = x^{-e}: coordinates split into ℓ
// pole coordinates x_1..x_ℓ (the components of P, with multiplicities e_i),
// m horizontal divisor coordinates y_1..y_m, and pz free coordinates z_k.
// Indices 0..ℓ-1 are pole, ℓ..ℓ+m-1 horizontal, ℓ+m..n-1 free.
struct ChartData {
  int ell = 0;
  int m = 0;
  int pz = 0;
  std::vector<int> e;

  int n() const { return ell + m + pz; }
  bool is_pole(int i) const { return i < ell; }
  bool is_horizontal(int i) const { return i >= ell && i < ell + m; }
  bool is_free(int i) const { return i >= ell + m; }

  void validate() const {
    if (ell < 0 || m < 0 || pz < 0) throw std::invalid_argument("ChartData: negative counts");
    if ((int)e.size() != ell) throw std::invalid_argument("ChartData: e length != ell");
    for (int x : e)
      if (x < 1) throw std::invalid_argument("ChartData: multiplicities must be >= 1");
    if (n() > 30) throw std::invalid_argument("ChartData: chart dimension too large");
  }

  // Exponent shift of multiplication by x^{-e} (df∧ shifts by -pole_shift).
  std::vector<int> pole_shift() const {
    std::vector<int> s(n(), 0);
    for (int i = 0; i < ell; ++i) s[i] = e[i];
    return s;
  }
};

using Multidegree = std::vector<int>;
using MdWindow = std::set<Multidegree>;

// All multidegrees with every component in [-bound, bound].
inline MdWindow box_window(const ChartData& c, int bound) {
  MdWindow w;
  Multidegree a(c.n(), -bound);
  if (c.n() == 0) {
    w.insert(a);
    return w;
  }
  while (true) {
    w.insert(a);
    int i = 0;
    while (i < c.n() && a[i] == bound) a[i++] = -bound;
    if (i == c.n()) break;
    a[i]++;
  }
  return w;
}

// floor(mu * k) computed exactly.
inline int floor_times(const Rat& mu, int k) {
  Rat q = mu * k;
  mpz_class fl;
  mpz_fdiv_q(fl.get_mpz_t(), q.get_num().get_mpz_t(), q.get_den().get_mpz_t());
  return (int)fl.get_si();
}

// sign of δ_i ∧ δ_J = (-1)^{#{j in J : j < i}}; 0 when i ∈ J.
inline int wedge_sign(int i, uint32_t j_mask) {
  if (j_mask & (1u << i)) return 0;
  int cnt = __builtin_popcount(j_mask & ((1u << i) - 1u));
  return (cnt % 2 == 0) ? +1 : -1;
}

// A form as a finite sum of monomial log terms c · x^a · δ_J, in the uniform
// log basis δ_i = dx_i/x_i for every coordinate.  A free coordinate k ∈ J
// stands for dz_k = z_k δ_k, so regularity demands exponent a_k ≥ 1 there;
// display divides that factor back out.
template <class K>
struct MonomialLogForm {
  std::map<std::pair<Multidegree, uint32_t>, K> terms;

  bool is_zero() const { return terms.empty(); }

  void add_term(const Multidegree& a, uint32_t j_mask, const K& c) {
    if (irrhodge::is_zero(c)) return;
    auto key = std::make_pair(a, j_mask);
    auto it = terms.find(key);
    if (it == terms.end()) {
      terms.emplace(key, c);
    } else {
      it->second += c;
      if (irrhodge::is_zero(it->second)) terms.erase(it);
    }
  }

  static MonomialLogForm monomial(const Multidegree& a, uint32_t j_mask, const K& c) {
    MonomialLogForm f;
    f.add_term(a, j_mask, c);
    return f;
  }
};

template <class K>
MonomialLogForm<K> operator+(const MonomialLogForm<K>& a, const MonomialLogForm<K>& b) {
  MonomialLogForm<K> r = a;
  for (auto& [k, c] : b.terms) r.add_term(k.first, k.second, c);
  return r;
}

template <class K>
MonomialLogForm<K> scale(const MonomialLogForm<K>& a, const K& c) {
  MonomialLogForm<K> r;
  for (auto& [k, v] : a.terms) r.add_term(k.first, k.second, c * v);
  return r;
}

// u·d + v·df∧ on a single form.  d(x^a δ_J) = x^a (Σ_i a_i δ_i) ∧ δ_J keeps
// the multidegree; df∧ = -x^{-e} (Σ_{i pole} e_i δ_i)∧ shifts it by -e.
// Coefficients a_i and e_i enter through the scalar field, so the same code
// serves characteristic p.
template <class K>
MonomialLogForm<K> nabla(const ChartData& c, const MonomialLogForm<K>& w, const K& u, const K& v) {
  MonomialLogForm<K> out;
  std::vector<int> shift = c.pole_shift();
  for (auto& [key, coef] : w.terms) {
    const Multidegree& a = key.first;
    uint32_t j_mask = key.second;
    if (!irrhodge::is_zero(u)) {
      for (int i = 0; i < c.n(); ++i) {
        if (a[i] == 0) continue;
        int s = wedge_sign(i, j_mask);
        if (s == 0) continue;
        K t = u * coef * FieldTraits<K>::from_int(a[i]);
        if (s < 0) t = -t;
        out.add_term(a, j_mask | (1u << i), t);
      }
    }
    if (!irrhodge::is_zero(v)) {
      Multidegree am = a;
      for (int i = 0; i < c.n(); ++i) am[i] -= shift[i];
      for (int i = 0; i < c.ell; ++i) {
        int s = wedge_sign(i, j_mask);
        if (s == 0) continue;
        K t = v * coef * FieldTraits<K>::from_int(c.e[i]);
        t = -t;
        if (s < 0) t = -t;
        out.add_term(am, j_mask | (1u << i), t);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Slice bases.  Every space handled here is graded by multidegree; a slice is
// the finite piece at one multidegree, with the admissible wedge masks as its
// canonical ordered basis.

// Wedge masks J with |J| = p admissible at multidegree a in Ω^p(log D)([μP]):
// pole coordinates need a_i + [μ e_i] ≥ 0, horizontal and free coordinates
// need a ≥ 0, and a free coordinate inside J needs a_k ≥ 1 (it carries dz_k).
// Returns an empty list when the mask-independent bounds already fail.
inline std::vector<uint32_t> log_slice_masks(const ChartData& c, int p, const Multidegree& a,
                                             const Rat& mu) {
  std::vector<uint32_t> out;
  if (p < 0 || p > c.n()) return out;
  if ((int)a.size() != c.n()) throw std::invalid_argument("log_slice_masks: bad multidegree size");
  for (int i = 0; i < c.ell; ++i)
    if (a[i] + floor_times(mu, c.e[i]) < 0) return out;
  for (int i = c.ell; i < c.n(); ++i)
    if (a[i] < 0) return out;
  uint32_t full = (c.n() == 0) ? 0u : ((c.n() >= 31) ? 0u : ((1u << c.n()) - 1u));
  for (uint32_t j = 0;; ++j) {
    if (__builtin_popcount(j) == p) {
      bool ok = true;
      for (int k = c.ell + c.m; k < c.n() && ok; ++k)
        if ((j & (1u << k)) && a[k] < 1) ok = false;
      if (ok) out.push_back(j);
    }
    if (j == full) break;
  }
  return out;
}

// Index lookup table for a slice basis.
struct SliceIndex {
  std::vector<uint32_t> masks;
  std::map<uint32_t, int> pos;

  explicit SliceIndex(std::vector<uint32_t> ms) : masks(std::move(ms)) {
    for (int i = 0; i < (int)masks.size(); ++i) pos[masks[i]] = i;
  }
  int dim() const { return (int)masks.size(); }
  int find(uint32_t j_mask) const {
    auto it = pos.find(j_mask);
    return it == pos.end() ? -1 : it->second;
  }
};

// Columns (in the Ω^p(log D)([μP]) slice coordinates at a) spanning the slice
// of Ω_f^p([μP]): family one is x^e · Ω^p(log D)([μP]) (all ambient masks,
// provided a - e still meets the pole bounds), family two is
// (dx^e/x^e) ∧ Ω^{p-1}(log D)([μP]).  The stacked columns are reduced to an
// independent set.
template <class K>
Matrix<K> omega_f_slice(const ChartData& c, int p, const Multidegree& a, const Rat& mu) {
  SliceIndex amb(log_slice_masks(c, p, a, mu));
  if (amb.dim() == 0) return Matrix<K>(0, 0);
  std::vector<std::vector<K>> cols;
  bool family1 = true;
  for (int i = 0; i < c.ell; ++i)
    if (a[i] - c.e[i] + floor_times(mu, c.e[i]) < 0) family1 = false;
  if (family1) {
    for (int idx = 0; idx < amb.dim(); ++idx) {
      std::vector<K> col(amb.dim(), FieldTraits<K>::zero());
      col[idx] = FieldTraits<K>::one();
      cols.push_back(col);
    }
  }
  for (uint32_t jp : log_slice_masks(c, p - 1, a, mu)) {
    std::vector<K> col(amb.dim(), FieldTraits<K>::zero());
    bool any = false;
    for (int i = 0; i < c.ell; ++i) {
      int s = wedge_sign(i, jp);
      if (s == 0) continue;
      int idx = amb.find(jp | (1u << i));
      if (idx < 0) throw std::logic_error("omega_f_slice: wedge escaped the ambient slice");
      K t = FieldTraits<K>::from_int(c.e[i]);
      if (s < 0) t = -t;
      col[idx] += t;
      any = true;
    }
    if (any) cols.push_back(col);
  }
  Matrix<K> mcols(amb.dim(), (int)cols.size());
  for (int j = 0; j < (int)cols.size(); ++j)
    for (int i = 0; i < amb.dim(); ++i)
      if (!irrhodge::is_zero(cols[j][i])) mcols.rows[i][j] = cols[j][i];
  return image_basis(mcols);
}

// The covector w = dg/g = Σ_{i pole} e_i δ_i as a matrix from the Ω^{p-1}
// slice coordinates to the Ω^p slice coordinates at the same multidegree.
template <class K>
Matrix<K> dgg_wedge_matrix(const ChartData& c, int p, const Multidegree& a, const Rat& mu) {
  SliceIndex src(log_slice_masks(c, p - 1, a, mu));
  SliceIndex dst(log_slice_masks(c, p, a, mu));
  Matrix<K> m(dst.dim(), src.dim());
  for (int jcol = 0; jcol < src.dim(); ++jcol) {
    uint32_t jp = src.masks[jcol];
    for (int i = 0; i < c.ell; ++i) {
      int s = wedge_sign(i, jp);
      if (s == 0) continue;
      int idx = dst.find(jp | (1u << i));
      if (idx < 0) throw std::logic_error("dgg_wedge_matrix: wedge escaped the slice");
      K t = FieldTraits<K>::from_int(c.e[i]);
      if (s < 0) t = -t;
      m.rows[idx][jcol] = (m.rows[idx].count(jcol) ? m.rows[idx][jcol] + t : t);
      if (irrhodge::is_zero(m.rows[idx][jcol])) m.rows[idx].erase(jcol);
    }
  }
  return m;
}

// Columns spanning g·Ω^p(log D)([μP]) inside the slice at a: the same masks,
// present exactly when a - e still satisfies the pole bounds.
template <class K>
Matrix<K> g_omega_slice(const ChartData& c, int p, const Multidegree& a, const Rat& mu) {
  SliceIndex amb(log_slice_masks(c, p, a, mu));
  bool ok = amb.dim() > 0;
  for (int i = 0; i < c.ell && ok; ++i)
    if (a[i] - c.e[i] + floor_times(mu, c.e[i]) < 0) ok = false;
  if (!ok) return Matrix<K>(amb.dim(), 0);
  return Matrix<K>::identity(amb.dim());
}

// ---------------------------------------------------------------------------
// Graded sheaf spaces and basis_of.

enum class SpaceKind {
  log,           // Ω^p(log D)([μP])
  omega_f,       // Ω_f^p([μP])
  relative,      // Ω^p_{X/S}(log D) = Ω^p(log D)/(dg/g)∧Ω^{p-1}(log D)
  bar_relative,  // Ω̄^p_{X/S}(log D) = Ω^p_{X/S}/g·Ω^p_{X/S}
  log_mod_f      // Ω^p(log D)/Ω_f^p
};

inline std::string kind_name(SpaceKind k) {
  switch (k) {
    case SpaceKind::log: return "log";
    case SpaceKind::omega_f: return "omega_f";
    case SpaceKind::relative: return "relative";
    case SpaceKind::bar_relative: return "bar_relative";
    case SpaceKind::log_mod_f: return "log_mod_f";
  }
  return "?";
}

struct GradedSheafSpace {
  ChartData chart;
  SpaceKind kind = SpaceKind::log;
  int p = 0;
  Rat mu = Rat(0);
  MdWindow window;
  // The "_+" truncation: the space is 0 outright (not merely emptied of
  // sections) when the defining twist came out negative.
  bool forced_zero = false;
};

// Filtration-step sheaf F^λ in degree k: Ω^k(log D)([(k-λ)P])_+, the hard zero space when the
// twist k - λ is negative.
inline GradedSheafSpace hodge_step(const ChartData& c, const Rat& lambda, int k,
                                 const MdWindow& window = {}) {
  GradedSheafSpace s;
  s.chart = c;
  s.kind = SpaceKind::log;
  s.p = k;
  s.mu = Rat(k) - lambda;
  s.window = window;
  s.forced_zero = (s.mu < 0);
  return s;
}

// Columns (in ambient log-slice coordinates at a) spanning the subspace whose
// quotient realizes `kind`; log itself returns the full identity.
template <class K>
Matrix<K> denominator_columns(const GradedSheafSpace& s, const Multidegree& a) {
  const ChartData& c = s.chart;
  SliceIndex amb(log_slice_masks(c, s.p, a, s.mu));
  switch (s.kind) {
    case SpaceKind::log:
    case SpaceKind::omega_f:
      return Matrix<K>(amb.dim(), 0);
    case SpaceKind::relative:
      return image_basis(dgg_wedge_matrix<K>(c, s.p, a, s.mu));
    case SpaceKind::bar_relative:
      return image_basis(hstack(dgg_wedge_matrix<K>(c, s.p, a, s.mu),
                                g_omega_slice<K>(c, s.p, a, s.mu)));
    case SpaceKind::log_mod_f:
      return omega_f_slice<K>(c, s.p, a, s.mu);
  }
  return Matrix<K>(amb.dim(), 0);
}

// Basis of the multidegree-a slice of the space, as explicit forms.  For the
// quotient kinds the forms are subquotient representatives.
template <class K>
std::vector<MonomialLogForm<K>> basis_of(const GradedSheafSpace& s, const Multidegree& a) {
  if (!s.window.empty() && !s.window.count(a))
    throw std::invalid_argument("basis_of: multidegree outside window");
  std::vector<MonomialLogForm<K>> out;
  if (s.forced_zero) return out;
  const ChartData& c = s.chart;
  SliceIndex amb(log_slice_masks(c, s.p, a, s.mu));
  auto form_of_column = [&](const std::vector<K>& col) {
    MonomialLogForm<K> f;
    for (int i = 0; i < amb.dim(); ++i)
      if (!irrhodge::is_zero(col[i])) f.add_term(a, amb.masks[i], col[i]);
    return f;
  };
  if (s.kind == SpaceKind::log) {
    for (uint32_t j : amb.masks)
      out.push_back(MonomialLogForm<K>::monomial(a, j, FieldTraits<K>::one()));
    return out;
  }
  if (s.kind == SpaceKind::omega_f) {
    Matrix<K> cols = omega_f_slice<K>(c, s.p, a, s.mu);
    for (int j = 0; j < cols.nc; ++j) out.push_back(form_of_column(cols.col(j)));
    return out;
  }
  Matrix<K> den = denominator_columns<K>(s, a);
  Subquotient<K> sq(Matrix<K>::identity(amb.dim()), den);
  for (int j = 0; j < sq.dim(); ++j) out.push_back(form_of_column(sq.rep(j)));
  return out;
}

// Slice dimension of the space at a.
template <class K>
int slice_dim(const GradedSheafSpace& s, const Multidegree& a) {
  if (s.forced_zero) return 0;
  SliceIndex amb(log_slice_masks(s.chart, s.p, a, s.mu));
  switch (s.kind) {
    case SpaceKind::log:
      return amb.dim();
    case SpaceKind::omega_f:
      return omega_f_slice<K>(s.chart, s.p, a, s.mu).nc;
    default:
      return amb.dim() - denominator_columns<K>(s, a).nc;
  }
}

// Display helper: z-coordinates inside J print as dz_k with the exponent
// reduced by one; pole/horizontal coordinates print as dlog.
template <class K>
std::string to_string(const ChartData& c, const MonomialLogForm<K>& f) {
  if (f.terms.empty()) return "0";
  std::string out;
  for (auto& [key, coef] : f.terms) {
    if (!out.empty()) out += " + ";
    out += "(" + irrhodge::to_string(coef) + ")";
    const Multidegree& a = key.first;
    for (int i = 0; i < c.n(); ++i) {
      int shown = a[i] - ((c.is_free(i) && (key.second & (1u << i))) ? 1 : 0);
      if (shown != 0) {
        char base = c.is_pole(i) ? 'x' : (c.is_horizontal(i) ? 'y' : 'z');
        out += "*" + std::string(1, base) + std::to_string(i) + "^" + std::to_string(shown);
      }
    }
    for (int i = 0; i < c.n(); ++i) {
      if (!(key.second & (1u << i))) continue;
      char base = c.is_pole(i) ? 'x' : (c.is_horizontal(i) ? 'y' : 'z');
      std::string v = std::string(1, base) + std::to_string(i);
      out += c.is_free(i) ? ("*d" + v) : ("*d" + v + "/" + v);
    }
  }
  return out;
}

}  // namespace irrhodge
