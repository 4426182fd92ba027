#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "irrhodge/field.hpp"
#include "irrhodge/matrix.hpp"
#include "irrhodge/p1global.hpp"
#include "irrhodge/subspace.hpp"

// Characteristic-p machinery for the f-adapted log de Rham complex on
// monomial charts: the inverse Cartier map, slice-by-slice verification of
// the closed-form intersection identity and of the Cartier isomorphism for
// (Omega_f, d), Frobenius liftings over Z/p^2 with their Cech splitting data
// (phi, psi), and the resulting dimension-equality degeneration check on the
// projective line over F_p.

namespace irrhodge {

// ---------------------------------------------------------------------------
// The ring Z/p^2 (same lazy-modulus convention as Fp: a default-constructed
// value is a bare integer literal that acquires its modulus on first contact).
// ---------------------------------------------------------------------------

struct Zp2 {
  long v = 0;  // normalized to [0, p^2) once p > 0
  long p = 0;  // 0 = modulus not yet attached

  Zp2() = default;
  Zp2(long value, long prime) : p(prime) {
    Fp::require_prime(prime);
    v = normalize(value, prime);
  }

  static long normalize(long value, long prime) {
    long q = prime * prime;
    long r = value % q;
    if (r < 0) r += q;
    return r;
  }

  bool has_modulus() const { return p != 0; }
};

inline long zp2_resolve_modulus(const Zp2& a, const Zp2& b) {
  if (a.p != 0 && b.p != 0) {
    if (a.p != b.p) throw std::invalid_argument("Zp2: mixed moduli");
    return a.p;
  }
  return a.p != 0 ? a.p : b.p;
}

inline Zp2 zp2_attach(const Zp2& x, long prime) {
  if (prime == 0) return x;
  Zp2 r;
  r.p = prime;
  r.v = Zp2::normalize(x.v, prime);
  return r;
}

inline Zp2 operator+(const Zp2& a, const Zp2& b) {
  long p = zp2_resolve_modulus(a, b);
  Zp2 x = zp2_attach(a, p), y = zp2_attach(b, p);
  Zp2 r;
  r.p = p;
  r.v = p ? Zp2::normalize(x.v + y.v, p) : x.v + y.v;
  return r;
}

inline Zp2 operator-(const Zp2& a) {
  Zp2 r;
  r.p = a.p;
  r.v = a.p ? Zp2::normalize(-a.v, a.p) : -a.v;
  return r;
}

inline Zp2 operator-(const Zp2& a, const Zp2& b) { return a + (-b); }

inline Zp2 operator*(const Zp2& a, const Zp2& b) {
  long p = zp2_resolve_modulus(a, b);
  Zp2 x = zp2_attach(a, p), y = zp2_attach(b, p);
  Zp2 r;
  r.p = p;
  r.v = p ? Zp2::normalize(x.v * y.v, p) : x.v * y.v;
  return r;
}

inline bool operator==(const Zp2& a, const Zp2& b) {
  long p = zp2_resolve_modulus(a, b);
  return zp2_attach(a, p).v == zp2_attach(b, p).v;
}
inline bool operator!=(const Zp2& a, const Zp2& b) { return !(a == b); }

inline bool is_zero(const Zp2& x) { return x.v == 0; }

// Reduction Z/p^2 -> F_p.
inline Fp zp2_red(const Zp2& a) {
  if (!a.has_modulus()) throw std::domain_error("Zp2: reduction without a modulus");
  return Fp(a.v, a.p);
}

// Exact division by p: a = p*b, returns b mod p.  Errors if p does not
// divide a.
inline Fp zp2_div_p(const Zp2& a) {
  if (!a.has_modulus()) throw std::domain_error("Zp2: division without a modulus");
  if (a.v % a.p != 0) throw std::domain_error("Zp2: value not divisible by p");
  return Fp(a.v / a.p, a.p);
}

// Lift F_p -> Z/p^2 sending the residue classes of 0..p-1 to themselves.
inline Zp2 zp2_lift(const Fp& a) {
  if (!a.has_modulus()) throw std::domain_error("Zp2: lift of a bare F_p value");
  return Zp2(a.v, a.p);
}

// Inverse of a unit of Z/p^2 (value coprime to p), by a Hensel step from the
// mod-p inverse.
inline Zp2 zp2_inv_unit(const Zp2& a) {
  if (!a.has_modulus()) throw std::domain_error("Zp2: inverse without a modulus");
  if (a.v % a.p == 0) throw std::domain_error("Zp2: inverse of a non-unit");
  long x = fp_inverse(a.v % a.p, a.p);  // a*x = 1 (mod p)
  // x' = x*(2 - a*x) satisfies a*x' = 1 (mod p^2)
  Zp2 ax = Zp2(a.v, a.p) * Zp2(x, a.p);
  Zp2 two_minus = Zp2(2, a.p) - ax;
  return Zp2(x, a.p) * two_minus;
}

// ---------------------------------------------------------------------------
// Multivariate Laurent polynomials with coefficients in R (R = Fp or Zp2).
// Exponent vectors have fixed length n; negative exponents are allowed (the
// chart-membership predicates decide what counts as regular).
// ---------------------------------------------------------------------------

template <class R>
struct MPTraits;

template <>
struct MPTraits<Fp> {
  static Fp from_int(long k) { return FieldTraits<Fp>::from_int(k); }
};

template <>
struct MPTraits<Zp2> {
  static Zp2 from_int(long k) {
    Zp2 r;
    r.v = k;
    return r;
  }
};

template <class R>
struct MPoly {
  int n = 0;
  std::map<std::vector<int>, R> c;

  static MPoly zero(int n) {
    MPoly r;
    r.n = n;
    return r;
  }
  static MPoly constant(int n, const R& k) {
    MPoly r;
    r.n = n;
    if (!irrhodge::is_zero(k)) r.c[std::vector<int>(n, 0)] = k;
    return r;
  }
  static MPoly monomial(int n, std::vector<int> e, const R& k) {
    if ((int)e.size() != n) throw std::invalid_argument("MPoly: exponent arity mismatch");
    MPoly r;
    r.n = n;
    if (!irrhodge::is_zero(k)) r.c[std::move(e)] = k;
    return r;
  }

  bool is_zero() const { return c.empty(); }
  void prune() {
    for (auto it = c.begin(); it != c.end();)
      it = irrhodge::is_zero(it->second) ? c.erase(it) : std::next(it);
  }
  // All exponents >= 0 (a regular function on the affine chart)?
  bool is_polynomial() const {
    for (auto& [e, k] : c)
      for (int x : e)
        if (x < 0) return false;
    return true;
  }
};

template <class R>
MPoly<R> operator+(const MPoly<R>& a, const MPoly<R>& b) {
  if (a.n != b.n) throw std::invalid_argument("MPoly: arity mismatch");
  MPoly<R> r = a;
  for (auto& [e, k] : b.c) {
    auto it = r.c.find(e);
    if (it == r.c.end())
      r.c[e] = k;
    else
      it->second = it->second + k;
  }
  r.prune();
  return r;
}

template <class R>
MPoly<R> operator-(const MPoly<R>& a) {
  MPoly<R> r = a;
  for (auto& [e, k] : r.c) k = -k;
  return r;
}

template <class R>
MPoly<R> operator-(const MPoly<R>& a, const MPoly<R>& b) {
  return a + (-b);
}

template <class R>
MPoly<R> operator*(const MPoly<R>& a, const MPoly<R>& b) {
  if (a.n != b.n) throw std::invalid_argument("MPoly: arity mismatch");
  MPoly<R> r = MPoly<R>::zero(a.n);
  for (auto& [ea, ka] : a.c)
    for (auto& [eb, kb] : b.c) {
      std::vector<int> e(a.n);
      for (int i = 0; i < a.n; ++i) e[i] = ea[i] + eb[i];
      auto it = r.c.find(e);
      if (it == r.c.end())
        r.c[std::move(e)] = ka * kb;
      else
        it->second = it->second + ka * kb;
    }
  r.prune();
  return r;
}

template <class R>
MPoly<R> operator*(const R& k, const MPoly<R>& a) {
  MPoly<R> r = a;
  for (auto& [e, v] : r.c) v = k * v;
  r.prune();
  return r;
}

template <class R>
bool operator==(const MPoly<R>& a, const MPoly<R>& b) {
  return (a - b).is_zero();
}
template <class R>
bool operator!=(const MPoly<R>& a, const MPoly<R>& b) {
  return !(a == b);
}

template <class R>
bool is_zero(const MPoly<R>& a) {
  return a.is_zero();
}

// Partial derivative in the j-th variable (Laurent rule e -> e-1 with
// integer coefficient e mapped into R).
template <class R>
MPoly<R> mp_partial(const MPoly<R>& a, int j) {
  MPoly<R> r = MPoly<R>::zero(a.n);
  for (auto& [e, k] : a.c) {
    if (e[j] == 0) continue;
    std::vector<int> e2 = e;
    e2[j] -= 1;
    R coeff = MPTraits<R>::from_int(e[j]) * k;
    if (irrhodge::is_zero(coeff)) continue;
    auto it = r.c.find(e2);
    if (it == r.c.end())
      r.c[std::move(e2)] = coeff;
    else
      it->second = it->second + coeff;
  }
  r.prune();
  return r;
}

// Substitution x_j -> x_j^{-1} (the two-chart transition on the projective
// line); purely an exponent flip.
template <class R>
MPoly<R> mp_flip(const MPoly<R>& a, int j) {
  MPoly<R> r = MPoly<R>::zero(a.n);
  for (auto& [e, k] : a.c) {
    std::vector<int> e2 = e;
    e2[j] = -e2[j];
    r.c[std::move(e2)] = k;
  }
  return r;
}

// Multiply by the monomial x^e.
template <class R>
MPoly<R> mp_shift(const MPoly<R>& a, const std::vector<int>& e) {
  MPoly<R> r = MPoly<R>::zero(a.n);
  for (auto& [ea, k] : a.c) {
    std::vector<int> e2 = ea;
    for (int i = 0; i < a.n; ++i) e2[i] += e[i];
    r.c[std::move(e2)] = k;
  }
  return r;
}

// Inverse of a Laurent polynomial of the shape (unit scalar)*x^e + p*(rest)
// over Z/p^2; this covers every coordinate image x^p*(1 + p*u) that the
// transition maps need to invert.  The result is checked by multiplication.
inline MPoly<Zp2> mp_inv_unit(const MPoly<Zp2>& a, long p) {
  const std::vector<int>* lead_e = nullptr;
  Zp2 lead_k;
  MPoly<Zp2> rest = MPoly<Zp2>::zero(a.n);
  for (auto& [e, k] : a.c) {
    if (k.v % p != 0) {
      if (lead_e) throw std::domain_error("MPoly: inverse of an unrecognized unit shape");
      lead_e = &e;
      lead_k = k;
    } else {
      rest.c[e] = k;
    }
  }
  if (!lead_e) throw std::domain_error("MPoly: inverse of a non-unit");
  std::vector<int> neg_e = *lead_e;
  for (int& x : neg_e) x = -x;
  MPoly<Zp2> u0 = MPoly<Zp2>::monomial(a.n, neg_e, zp2_inv_unit(lead_k));
  // (c x^e + p r)^{-1} = c^{-1} x^{-e} - c^{-2} x^{-2e} p r   (p r nilpotent)
  MPoly<Zp2> inv = u0 - u0 * u0 * rest;
  if (!(inv * a == MPoly<Zp2>::constant(a.n, Zp2(1, p))))
    throw std::domain_error("MPoly: unit inversion failed");
  return inv;
}

// Integer power (negative exponents go through the unit inverse above).
inline MPoly<Zp2> mp_pow(const MPoly<Zp2>& a, int k, long p) {
  MPoly<Zp2> base = k < 0 ? mp_inv_unit(a, p) : a;
  int e = k < 0 ? -k : k;
  MPoly<Zp2> r = MPoly<Zp2>::constant(a.n, Zp2(1, p));
  for (int i = 0; i < e; ++i) r = r * base;
  return r;
}

// Coefficient-wise reduction / division-by-p / lift between the two rings.
inline MPoly<Fp> mp_red(const MPoly<Zp2>& a) {
  MPoly<Fp> r = MPoly<Fp>::zero(a.n);
  for (auto& [e, k] : a.c) {
    Fp v = zp2_red(k);
    if (!irrhodge::is_zero(v)) r.c[e] = v;
  }
  return r;
}

inline MPoly<Fp> mp_div_p(const MPoly<Zp2>& a) {
  MPoly<Fp> r = MPoly<Fp>::zero(a.n);
  for (auto& [e, k] : a.c) {
    Fp v = zp2_div_p(k);
    if (!irrhodge::is_zero(v)) r.c[e] = v;
  }
  return r;
}

inline MPoly<Zp2> mp_lift(const MPoly<Fp>& a) {
  MPoly<Zp2> r = MPoly<Zp2>::zero(a.n);
  for (auto& [e, k] : a.c) r.c[e] = zp2_lift(k);
  return r;
}

// ---------------------------------------------------------------------------
// Monomial charts.  Coordinates x_0..x_{n-1}; the normal crossing divisor is
// D = {x_0 ... x_{m-1} = 0}; the function is the Laurent monomial f = x^fexp.
// Pole coordinates (fexp_j < 0) must be components of D.  The pole divisor is
// reduced exactly when every fexp_j >= -1.
// ---------------------------------------------------------------------------

struct MonomialChart {
  int n = 0;
  std::vector<int> fexp;
  int m = 0;

  MonomialChart() = default;
  MonomialChart(int n_, std::vector<int> fexp_, int m_) : n(n_), fexp(std::move(fexp_)), m(m_) {
    validate();
  }

  void validate() const {
    if (n < 1 || (int)fexp.size() != n || m < 0 || m > n)
      throw std::invalid_argument("MonomialChart: malformed data");
    for (int j = 0; j < n; ++j)
      if (fexp[j] < 0 && j >= m)
        throw std::invalid_argument("MonomialChart: pole coordinate outside the divisor");
  }

  bool meets_poles() const {
    for (int x : fexp)
      if (x < 0) return true;
    return false;
  }
  bool poles_reduced() const {
    for (int x : fexp)
      if (x < -1) return false;
    return true;
  }
};

// ---------------------------------------------------------------------------
// Log differential forms in the delta-basis of the chart:
//   delta_j = dlog x_j for j < m,   delta_j = dx_j for j >= m,
// stored as bitmask -> Laurent coefficient, masks with ascending factors.
// ---------------------------------------------------------------------------

namespace chpdetail {

inline int mask_card(unsigned s) { return __builtin_popcount(s); }

// Sign of delta_j ^ delta_S = sign * delta_{S + j} (ascending order).
inline int insert_sign(int j, unsigned s) {
  int below = __builtin_popcount(s & ((1u << j) - 1u));
  return below % 2 == 0 ? 1 : -1;
}

// Sign of delta_A ^ delta_B = sign * delta_{A|B} for disjoint masks.
inline int shuffle_sign(unsigned a, unsigned b) {
  int inv = 0;
  for (int j = 0; j < 32; ++j)
    if (b & (1u << j)) inv += __builtin_popcount(a & ~((1u << (j + 1)) - 1u));
  return inv % 2 == 0 ? 1 : -1;
}

}  // namespace chpdetail

template <class R>
struct LogForm {
  int n = 0;
  std::map<unsigned, MPoly<R>> comp;

  static LogForm zero(int n) {
    LogForm r;
    r.n = n;
    return r;
  }
  static LogForm from_poly(const MPoly<R>& g) {
    LogForm r;
    r.n = g.n;
    if (!g.is_zero()) r.comp[0u] = g;
    return r;
  }
  static LogForm generator(int n, int j) {
    LogForm r;
    r.n = n;
    r.comp[1u << j] = MPoly<R>::constant(n, MPTraits<R>::from_int(1));
    return r;
  }

  bool is_zero() const { return comp.empty(); }
  void prune() {
    for (auto it = comp.begin(); it != comp.end();)
      it = it->second.is_zero() ? comp.erase(it) : std::next(it);
  }
  void add_term(unsigned mask, const MPoly<R>& g) {
    if (g.is_zero()) return;
    auto it = comp.find(mask);
    if (it == comp.end())
      comp[mask] = g;
    else {
      it->second = it->second + g;
      if (it->second.is_zero()) comp.erase(it);
    }
  }
};

template <class R>
LogForm<R> operator+(const LogForm<R>& a, const LogForm<R>& b) {
  if (a.n != b.n) throw std::invalid_argument("LogForm: arity mismatch");
  LogForm<R> r = a;
  for (auto& [s, g] : b.comp) r.add_term(s, g);
  return r;
}

template <class R>
LogForm<R> operator-(const LogForm<R>& a) {
  LogForm<R> r = a;
  for (auto& [s, g] : r.comp) g = -g;
  return r;
}

template <class R>
LogForm<R> operator-(const LogForm<R>& a, const LogForm<R>& b) {
  return a + (-b);
}

template <class R>
LogForm<R> operator*(const MPoly<R>& g, const LogForm<R>& a) {
  LogForm<R> r = LogForm<R>::zero(a.n);
  for (auto& [s, h] : a.comp) r.add_term(s, g * h);
  return r;
}

template <class R>
bool operator==(const LogForm<R>& a, const LogForm<R>& b) {
  return (a - b).is_zero();
}
template <class R>
bool operator!=(const LogForm<R>& a, const LogForm<R>& b) {
  return !(a == b);
}

template <class R>
LogForm<R> wedge(const LogForm<R>& a, const LogForm<R>& b) {
  if (a.n != b.n) throw std::invalid_argument("LogForm: arity mismatch");
  LogForm<R> r = LogForm<R>::zero(a.n);
  for (auto& [sa, ga] : a.comp)
    for (auto& [sb, gb] : b.comp) {
      if (sa & sb) continue;
      int sign = chpdetail::shuffle_sign(sa, sb);
      MPoly<R> g = ga * gb;
      if (sign < 0) g = -g;
      r.add_term(sa | sb, g);
    }
  return r;
}

// Exterior derivative in the chart's delta-basis: for j < m the term is
// (x_j d/dx_j g) dlog x_j, for j >= m it is (d/dx_j g) dx_j.
template <class R>
LogForm<R> log_d(const MonomialChart& ch, const LogForm<R>& a) {
  LogForm<R> r = LogForm<R>::zero(a.n);
  for (auto& [s, g] : a.comp)
    for (int j = 0; j < ch.n; ++j) {
      if (s & (1u << j)) continue;
      MPoly<R> dg = mp_partial(g, j);
      if (j < ch.m) {
        // x_j * d/dx_j keeps the exponent: scale each term by its exponent
        dg = MPoly<R>::zero(a.n);
        for (auto& [e, k] : g.c) {
          R coeff = MPTraits<R>::from_int(e[j]) * k;
          if (!irrhodge::is_zero(coeff)) dg.c[e] = coeff;
        }
      }
      if (dg.is_zero()) continue;
      int sign = chpdetail::insert_sign(j, s);
      if (sign < 0) dg = -dg;
      r.add_term(s | (1u << j), dg);
    }
  return r;
}

// df ^ omega with f = x^fexp:
//   df = sum_j fexp_j x^fexp dlog x_j           (j < m)
//      + sum_j fexp_j x^{fexp - e_j} dx_j       (j >= m).
template <class R>
LogForm<R> df_wedge(const MonomialChart& ch, const LogForm<R>& a) {
  LogForm<R> r = LogForm<R>::zero(a.n);
  for (auto& [s, g] : a.comp)
    for (int j = 0; j < ch.n; ++j) {
      if (ch.fexp[j] == 0 || (s & (1u << j))) continue;
      std::vector<int> shift = ch.fexp;
      if (j >= ch.m) shift[j] -= 1;
      MPoly<R> term = MPTraits<R>::from_int(ch.fexp[j]) * mp_shift(g, shift);
      if (term.is_zero()) continue;
      int sign = chpdetail::insert_sign(j, s);
      if (sign < 0) term = -term;
      r.add_term(s | (1u << j), term);
    }
  return r;
}

// Membership tests on a domain of the chart; `laurent` lists coordinates
// invertible there (an overlap that removed their zero locus), so their
// exponents are unconstrained.
template <class R>
bool is_log(const MonomialChart& ch, const LogForm<R>& a,
            const std::set<int>& laurent = {}) {
  for (auto& [s, g] : a.comp)
    for (auto& [e, k] : g.c)
      for (int j = 0; j < ch.n; ++j)
        if (e[j] < 0 && !laurent.count(j)) return false;
  return true;
}

template <class R>
bool in_omega_f(const MonomialChart& ch, const LogForm<R>& a,
                const std::set<int>& laurent = {}) {
  return is_log(ch, a, laurent) && is_log(ch, df_wedge(ch, a), laurent);
}

// Inverse Cartier map on chart forms over the Frobenius twist (same chart
// data): x'^e delta'_S  |->  x^{pe} * prod_{k in S, k >= m} x_k^{p-1} delta_S.
// Scalar coefficients are fixed by Frobenius, so they pass through unchanged.
inline LogForm<Fp> cartier_inverse(const MonomialChart& ch, const LogForm<Fp>& a, long p) {
  Fp::require_prime(p);
  LogForm<Fp> r = LogForm<Fp>::zero(a.n);
  for (auto& [s, g] : a.comp) {
    MPoly<Fp> h = MPoly<Fp>::zero(a.n);
    for (auto& [e, k] : g.c) {
      std::vector<int> e2(a.n);
      for (int i = 0; i < a.n; ++i) e2[i] = (int)p * e[i];
      for (int j = ch.m; j < ch.n; ++j)
        if (s & (1u << j)) e2[j] += (int)p - 1;
      h.c[std::move(e2)] = fp_attach(k, p);
    }
    r.add_term(s, h);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Per-slice linear algebra over F_p.  Multidegree convention:
//   deg(x^b delta_S) = b + sum_{k in S, k >= m} e_k,
// which makes d degree-preserving and df^ a shift by +fexp.
// ---------------------------------------------------------------------------

struct SliceBasis {
  std::vector<unsigned> masks;
  std::vector<std::vector<int>> expo;  // coefficient exponent of each basis form
  std::map<unsigned, int> index;
};

namespace chpdetail {

inline void all_masks(int n, int a, std::vector<unsigned>& out) {
  out.clear();
  for (unsigned s = 0; s < (1u << n); ++s)
    if (mask_card(s) == a) out.push_back(s);
}

}  // namespace chpdetail

// Basis of the slice Omega^a(log D)[deg] on the chart: one basis form per
// subset S of size a whose forced coefficient exponent is componentwise >= 0.
inline SliceBasis slice_basis(const MonomialChart& ch, int a, const std::vector<int>& deg) {
  SliceBasis b;
  if (a < 0 || a > ch.n) return b;
  std::vector<unsigned> masks;
  chpdetail::all_masks(ch.n, a, masks);
  for (unsigned s : masks) {
    std::vector<int> e = deg;
    bool ok = true;
    for (int k = ch.m; k < ch.n; ++k)
      if (s & (1u << k)) e[k] -= 1;
    for (int x : e) ok = ok && x >= 0;
    if (!ok) continue;
    b.index[s] = (int)b.masks.size();
    b.masks.push_back(s);
    b.expo.push_back(std::move(e));
  }
  return b;
}

// Matrix of d : Omega^a(log D)[deg] -> Omega^{a+1}(log D)[deg] in the slice
// bases (entries are the integer exponents reduced mod p).
inline Matrix<Fp> slice_d_matrix(const MonomialChart& ch, int a, const std::vector<int>& deg,
                                 long p) {
  SliceBasis src = slice_basis(ch, a, deg);
  SliceBasis dst = slice_basis(ch, a + 1, deg);
  Matrix<Fp> mat((int)dst.masks.size(), (int)src.masks.size());
  for (int c = 0; c < (int)src.masks.size(); ++c) {
    unsigned s = src.masks[c];
    const std::vector<int>& e = src.expo[c];
    for (int j = 0; j < ch.n; ++j) {
      if (s & (1u << j)) continue;
      if (e[j] == 0 && j >= ch.m) continue;
      long coeff = e[j] % p;
      if (coeff == 0) continue;
      auto it = dst.index.find(s | (1u << j));
      if (it == dst.index.end()) continue;
      int sign = chpdetail::insert_sign(j, s);
      Fp val(sign * coeff, p);
      if (!irrhodge::is_zero(val))
        mat.rows[it->second][c] = mat.rows[it->second][c] + val;
    }
  }
  return mat;
}

// Column basis of the subspace Omega_f^a[deg] = {omega log : df^omega log}
// inside the slice basis of Omega^a(log D)[deg]: kernel of the rows of df^
// that land on monomials with a negative exponent.
inline Matrix<Fp> omega_f_cols(const MonomialChart& ch, int a, const std::vector<int>& deg,
                               long p) {
  SliceBasis src = slice_basis(ch, a, deg);
  std::vector<unsigned> tmasks;
  chpdetail::all_masks(ch.n, a + 1, tmasks);
  // Rows indexed by the size-(a+1) masks whose forced exponent at deg+fexp
  // has a negative entry (the non-log part of the target).
  std::map<unsigned, int> bad;
  for (unsigned t : tmasks) {
    std::vector<int> e(ch.n);
    bool neg = false;
    for (int i = 0; i < ch.n; ++i) e[i] = deg[i] + ch.fexp[i];
    for (int k = ch.m; k < ch.n; ++k)
      if (t & (1u << k)) e[k] -= 1;
    for (int x : e) neg = neg || x < 0;
    if (neg) {
      int id = (int)bad.size();
      bad[t] = id;
    }
  }
  Matrix<Fp> mat((int)bad.size(), (int)src.masks.size());
  for (int c = 0; c < (int)src.masks.size(); ++c) {
    unsigned s = src.masks[c];
    for (int j = 0; j < ch.n; ++j) {
      if (ch.fexp[j] == 0 || (s & (1u << j))) continue;
      auto it = bad.find(s | (1u << j));
      if (it == bad.end()) continue;
      int sign = chpdetail::insert_sign(j, s);
      Fp val(sign * (ch.fexp[j] % p), p);
      if (!irrhodge::is_zero(val))
        mat.rows[it->second][c] = mat.rows[it->second][c] + val;
    }
  }
  if (mat.nr == 0) return Matrix<Fp>::identity((int)src.masks.size());
  return kernel_basis(mat);
}

// Vectorize a slice-homogeneous log form in the slice basis; throws if a
// monomial falls outside the slice (callers bucket by multidegree first).
inline std::vector<Fp> slice_vectorize(const SliceBasis& b, const LogForm<Fp>& w, long p) {
  std::vector<Fp> v(b.masks.size(), Fp(0, p));
  for (auto& [s, g] : w.comp) {
    auto it = b.index.find(s);
    if (it == b.index.end()) throw std::logic_error("slice_vectorize: mask outside slice");
    for (auto& [e, k] : g.c) {
      if (e != b.expo[it->second])
        throw std::logic_error("slice_vectorize: monomial outside slice");
      v[it->second] = v[it->second] + k;
    }
  }
  return v;
}

// Multidegree of one monomial term of a log form.
inline std::vector<int> term_degree(const MonomialChart& ch, unsigned s,
                                    const std::vector<int>& e) {
  std::vector<int> d = e;
  for (int k = ch.m; k < ch.n; ++k)
    if (s & (1u << k)) d[k] += 1;
  return d;
}

// Is the (log) form a coboundary of Omega_f^{a-1}, slice by slice?
inline bool exact_in_omega_f(const MonomialChart& ch, int a, const LogForm<Fp>& w, long p) {
  std::map<std::vector<int>, LogForm<Fp>> buckets;
  for (auto& [s, g] : w.comp)
    for (auto& [e, k] : g.c) {
      std::vector<int> d = term_degree(ch, s, e);
      auto it = buckets.find(d);
      if (it == buckets.end()) {
        buckets[d] = LogForm<Fp>::zero(ch.n);
        it = buckets.find(d);
      }
      it->second.add_term(s, MPoly<Fp>::monomial(ch.n, e, k));
    }
  for (auto& [deg, part] : buckets) {
    SliceBasis tb = slice_basis(ch, a, deg);
    std::vector<Fp> v = slice_vectorize(tb, part, p);
    Matrix<Fp> d_prev = slice_d_matrix(ch, a - 1, deg, p);
    Matrix<Fp> of_prev = omega_f_cols(ch, a - 1, deg, p);
    Matrix<Fp> bnd = image_basis(mul(d_prev, of_prev));
    if (!subspace_contains_vector(bnd, v)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Slice-by-slice verification of the closed-form intersection identity
//   d Omega^a(log D)[deg]  ∩  Omega_f^{a+1}[deg]  =  d Omega_f^a[deg]
// over a box of multidegrees.
// ---------------------------------------------------------------------------

struct SliceCheck {
  std::vector<int> deg;
  bool ok = false;
  int lhs_dim = 0;
  int rhs_dim = 0;
};

struct IntersectionReport {
  bool all_ok = true;
  std::vector<SliceCheck> slices;
};

namespace chpdetail {

inline bool next_box_point(std::vector<int>& d, int lo, int hi) {
  for (int i = 0; i < (int)d.size(); ++i) {
    if (d[i] < hi) {
      d[i] += 1;
      return true;
    }
    d[i] = lo;
  }
  return false;
}

}  // namespace chpdetail

inline IntersectionReport verify_closed_intersection(const MonomialChart& ch, int a, long p,
                                                     int window) {
  Fp::require_prime(p);
  ch.validate();
  IntersectionReport rep;
  std::vector<int> deg(ch.n, 0);
  do {
    Matrix<Fp> dmat = slice_d_matrix(ch, a, deg, p);
    Matrix<Fp> closed_img = image_basis(dmat);
    Matrix<Fp> w = omega_f_cols(ch, a + 1, deg, p);
    Matrix<Fp> lhs = subspace_intersect(closed_img, w);
    Matrix<Fp> of_a = omega_f_cols(ch, a, deg, p);
    Matrix<Fp> rhs = image_basis(mul(dmat, of_a));
    SliceCheck sc;
    sc.deg = deg;
    sc.lhs_dim = rank(lhs);
    sc.rhs_dim = rank(rhs);
    sc.ok = subspace_equal(lhs, rhs);
    rep.all_ok = rep.all_ok && sc.ok;
    rep.slices.push_back(std::move(sc));
  } while (chpdetail::next_box_point(deg, 0, window));
  return rep;
}

// ---------------------------------------------------------------------------
// Slice-by-slice verification that the inverse Cartier map induces an
// isomorphism Omega^a_{X',f'}[b']  ->  H^a(F_* (Omega_f, d))[p b'].
// ---------------------------------------------------------------------------

struct CartierReport {
  bool all_ok = true;
  bool images_closed = true;
  bool images_in_omega_f = true;
  std::vector<SliceCheck> slices;  // lhs_dim = source dim, rhs_dim = target H dim
};

inline CartierReport verify_cartier_iso_omega_f(const MonomialChart& ch, int a, long p,
                                                int window) {
  Fp::require_prime(p);
  ch.validate();
  CartierReport rep;
  std::vector<int> degp(ch.n, 0);
  do {
    SliceBasis src_log = slice_basis(ch, a, degp);
    Matrix<Fp> src_f = omega_f_cols(ch, a, degp, p);
    std::vector<int> tdeg(ch.n);
    for (int i = 0; i < ch.n; ++i) tdeg[i] = (int)p * degp[i];
    SliceBasis tgt_log = slice_basis(ch, a, tdeg);
    Matrix<Fp> of_t = omega_f_cols(ch, a, tdeg, p);
    Matrix<Fp> d_a = slice_d_matrix(ch, a, tdeg, p);
    Matrix<Fp> d_prev = slice_d_matrix(ch, a - 1, tdeg, p);
    Matrix<Fp> of_prev = omega_f_cols(ch, a - 1, tdeg, p);
    Matrix<Fp> cycles = mul(of_t, kernel_basis(mul(d_a, of_t)));
    Matrix<Fp> bnd = image_basis(mul(d_prev, of_prev));
    // The slice matrix of the inverse Cartier map is the mask-indexed
    // injection (S, b) -> (S, p b + (p-1) dx(S)); the target exponent agrees
    // with the forced exponent of mask S in the slice p*deg'.
    Matrix<Fp> cmap((int)tgt_log.masks.size(), (int)src_log.masks.size());
    for (int c = 0; c < (int)src_log.masks.size(); ++c) {
      auto it = tgt_log.index.find(src_log.masks[c]);
      if (it == tgt_log.index.end()) throw std::logic_error("cartier: missing target mask");
      cmap.rows[it->second][c] = Fp(1, p);
    }
    Matrix<Fp> img = mul(cmap, src_f);
    bool closed_ok = is_zero_matrix(mul(d_a, img));
    bool member_ok = subspace_contains(of_t, img);
    int src_dim = rank(src_f);
    int h_dim = rank(hstack(bnd, cycles)) - rank(bnd);
    int im_dim = rank(hstack(bnd, img)) - rank(bnd);
    SliceCheck sc;
    sc.deg = degp;
    sc.lhs_dim = src_dim;
    sc.rhs_dim = h_dim;
    sc.ok = closed_ok && member_ok && im_dim == src_dim && h_dim == src_dim;
    rep.images_closed = rep.images_closed && closed_ok;
    rep.images_in_omega_f = rep.images_in_omega_f && member_ok;
    rep.all_ok = rep.all_ok && sc.ok;
    rep.slices.push_back(std::move(sc));
  } while (chpdetail::next_box_point(degp, 0, window));
  return rep;
}

// ---------------------------------------------------------------------------
// Atlases over W2 = Z/p^2.  Three shapes cover the desk-scale corpus:
//   single_chart  - one affine monomial chart, no overlaps;
//   doubled_chart - the same chart listed twice with the identity transition
//                   (two independent Frobenius lifts of one chart);
//   proj_line     - the projective line, z -> 1/w.
// ---------------------------------------------------------------------------

enum class AtlasKind { single_chart, doubled_chart, proj_line };

struct W2Atlas {
  long p = 0;
  AtlasKind kind = AtlasKind::single_chart;
  std::vector<MonomialChart> charts;

  static W2Atlas single(long p, MonomialChart ch) {
    Fp::require_prime(p);
    ch.validate();
    W2Atlas a;
    a.p = p;
    a.kind = AtlasKind::single_chart;
    a.charts = {std::move(ch)};
    return a;
  }

  static W2Atlas doubled(long p, MonomialChart ch) {
    Fp::require_prime(p);
    ch.validate();
    W2Atlas a;
    a.p = p;
    a.kind = AtlasKind::doubled_chart;
    a.charts = {ch, ch};
    return a;
  }

  // f = z^{fexp0} on the z-chart (so w^{-fexp0} on the w-chart); the
  // horizontal flag puts the point z = 0 into the divisor of the z-chart.
  static W2Atlas proj_line(long p, int fexp0, bool horiz_at_zero) {
    Fp::require_prime(p);
    if (fexp0 == 0) throw std::invalid_argument("W2Atlas: constant f on the projective line");
    W2Atlas a;
    a.p = p;
    a.kind = AtlasKind::proj_line;
    int m0 = (fexp0 < 0 || horiz_at_zero) ? 1 : 0;
    a.charts = {MonomialChart(1, {fexp0}, m0), MonomialChart(1, {-fexp0}, 1)};
    return a;
  }

  int size() const { return (int)charts.size(); }
};

// ---------------------------------------------------------------------------
// Frobenius lifts over Z/p^2.  Per chart alpha, images[alpha][j] is the
// pullback of the j-th coordinate; it must reduce to x_j^p mod p, and its
// deviation is recorded as a polynomial u:
//   j <  m : image = x_j^p (1 + p u),     j >= m : image = x_j^p + p u.
// ---------------------------------------------------------------------------

struct FrobLift {
  std::vector<std::vector<MPoly<Zp2>>> images;
  std::vector<std::vector<MPoly<Fp>>> u;
};

struct LiftPerturbation {
  int chart = 0;
  int coord = 0;
  MPoly<Fp> u;
};

namespace chpdetail {

inline MPoly<Zp2> lift_image(const MonomialChart& ch, int j, const MPoly<Fp>& u, long p) {
  std::vector<int> pe(ch.n, 0);
  pe[j] = (int)p;
  MPoly<Zp2> xp = MPoly<Zp2>::monomial(ch.n, pe, Zp2(1, p));
  MPoly<Zp2> pu = Zp2(p, p) * mp_lift(u);
  if (j < ch.m) return xp + xp * pu;
  return xp + pu;
}

// Recover u from the image, enforcing the coordinate shape.
inline MPoly<Fp> extract_u(const MonomialChart& ch, int j, const MPoly<Zp2>& img, long p) {
  std::vector<int> pe(ch.n, 0);
  pe[j] = (int)p;
  MPoly<Zp2> xp = MPoly<Zp2>::monomial(ch.n, pe, Zp2(1, p));
  MPoly<Zp2> diff = img - xp;
  MPoly<Fp> u = mp_div_p(diff);  // throws unless img = x^p mod p
  if (j < ch.m) {
    for (int i = 0; i < ch.n; ++i) pe[i] = -pe[i];
    u = mp_red(mp_lift(u) * MPoly<Zp2>::monomial(ch.n, pe, Zp2(1, p)));
  }
  if (!u.is_polynomial())
    throw std::invalid_argument("FrobLift: image does not have the required coordinate shape");
  return u;
}

}  // namespace chpdetail

// Canonical lift (all u = 0) with optional perturbations.  On every chart
// meeting the poles of f the lift must pull the twist f' back to f^p; for a
// monomial f this is exactly sum over pole coordinates of u = 0, and a
// perturbation violating it is rejected.
inline FrobLift build_frob_lift_unchecked(const W2Atlas& atlas,
                                          const std::vector<LiftPerturbation>& perts = {}) {
  FrobLift lift;
  lift.images.resize(atlas.size());
  lift.u.resize(atlas.size());
  for (int a = 0; a < atlas.size(); ++a) {
    const MonomialChart& ch = atlas.charts[a];
    for (int j = 0; j < ch.n; ++j) {
      lift.u[a].push_back(MPoly<Fp>::zero(ch.n));
      lift.images[a].push_back(chpdetail::lift_image(ch, j, lift.u[a].back(), atlas.p));
    }
  }
  for (const LiftPerturbation& pt : perts) {
    if (pt.chart < 0 || pt.chart >= atlas.size())
      throw std::invalid_argument("FrobLift: perturbation names a missing chart");
    const MonomialChart& ch = atlas.charts[pt.chart];
    if (pt.coord < 0 || pt.coord >= ch.n)
      throw std::invalid_argument("FrobLift: perturbation names a missing coordinate");
    if (!pt.u.is_polynomial())
      throw std::invalid_argument("FrobLift: perturbation u must be regular on the chart");
    MPoly<Fp> u = pt.u;
    u.n = ch.n;
    lift.u[pt.chart][pt.coord] = u;
    lift.images[pt.chart][pt.coord] = chpdetail::lift_image(ch, pt.coord, u, atlas.p);
  }
  return lift;
}

// Defect of F*(f') = f^p on one chart, reported as
//   residual = 1 - f^{-p} F*(f')  (zero iff the pole condition holds;
// for a reduced pole divisor it equals p * sum over pole coordinates of u).
struct USumReport {
  bool ok = false;
  MPoly<Zp2> residual;
};

inline USumReport verify_u_sum(const W2Atlas& atlas, const FrobLift& lift, int chart) {
  const MonomialChart& ch = atlas.charts[chart];
  MPoly<Zp2> prod = MPoly<Zp2>::constant(ch.n, Zp2(1, atlas.p));
  for (int j = 0; j < ch.n; ++j)
    if (ch.fexp[j] != 0) prod = prod * mp_pow(lift.images[chart][j], ch.fexp[j], atlas.p);
  std::vector<int> pf(ch.n);
  for (int i = 0; i < ch.n; ++i) pf[i] = -(int)atlas.p * ch.fexp[i];
  MPoly<Zp2> scaled = prod * MPoly<Zp2>::monomial(ch.n, pf, Zp2(1, atlas.p));
  USumReport rep;
  rep.residual = MPoly<Zp2>::constant(ch.n, Zp2(1, atlas.p)) - scaled;
  rep.ok = rep.residual.is_zero();
  return rep;
}

inline FrobLift build_frob_lift(const W2Atlas& atlas,
                                const std::vector<LiftPerturbation>& perts = {}) {
  FrobLift lift = build_frob_lift_unchecked(atlas, perts);
  for (int a = 0; a < atlas.size(); ++a) {
    if (!atlas.charts[a].meets_poles()) continue;
    if (!verify_u_sum(atlas, lift, a).ok)
      throw std::invalid_argument(
          "FrobLift: lift does not pull the twisted function back to its p-th power on a "
          "chart meeting the pole divisor");
  }
  // round-trip the shape extraction as a consistency check
  for (int a = 0; a < atlas.size(); ++a)
    for (int j = 0; j < atlas.charts[a].n; ++j)
      if (chpdetail::extract_u(atlas.charts[a], j, lift.images[a][j], atlas.p) != lift.u[a][j])
        throw std::logic_error("FrobLift: u extraction mismatch");
  return lift;
}

// ---------------------------------------------------------------------------
// Splitting data.  For a pair of lifts the difference operator
//   h_{ab}(g') = (F_a^* - F_b^*)(lift of g') / p
// is a Frobenius derivation, hence factors through d as an O-linear map
//   phi_{ab} : Omega^1_{X'}(log D') -> F_* O_X,
// and each lift defines
//   psi_a = F_a^*/p : Omega^1_{X'}(log D') -> F_* Omega^1_X(log D),
// with  psi_a(dlog x'_j) = dlog x_j + d u_{a,j}   (j < m)
//       psi_a(dx'_k)     = x_k^{p-1} dx_k + d u_{a,k}   (k >= m)
//       phi_{ab}(gen'_j) = (u_{a,j} - u_{b,j}) on a common frame.
// Everything below is expressed on the common overlap frame: the chart frame
// for single/doubled atlases, the z-Laurent frame for the projective line.
// ---------------------------------------------------------------------------

struct SplittingData {
  // overlap frame values: phi[a][b][j] (0-forms), psi_ov[a][j] (1-forms)
  std::vector<std::vector<std::vector<MPoly<Fp>>>> phi;
  std::vector<std::vector<LogForm<Fp>>> psi_ov;
  // own-chart values of psi for the membership checks
  std::vector<std::vector<LogForm<Fp>>> psi_chart;
};

namespace chpdetail {

inline LogForm<Fp> psi_formula(const MonomialChart& ch, const MPoly<Fp>& u, int j, long p) {
  LogForm<Fp> r = LogForm<Fp>::zero(ch.n);
  if (j < ch.m) {
    r.add_term(1u << j, MPoly<Fp>::constant(ch.n, Fp(1, p)));
  } else {
    std::vector<int> e(ch.n, 0);
    e[j] = (int)p - 1;
    r.add_term(1u << j, MPoly<Fp>::monomial(ch.n, e, Fp(1, p)));
  }
  return r + log_d(ch, LogForm<Fp>::from_poly(u));
}

}  // namespace chpdetail

inline SplittingData build_splitting_data(const W2Atlas& atlas, const FrobLift& lift) {
  int N = atlas.size();
  long p = atlas.p;
  SplittingData sd;
  sd.psi_chart.resize(N);
  for (int a = 0; a < N; ++a) {
    const MonomialChart& ch = atlas.charts[a];
    for (int j = 0; j < ch.n; ++j)
      sd.psi_chart[a].push_back(chpdetail::psi_formula(ch, lift.u[a][j], j, p));
  }
  const MonomialChart& ch0 = atlas.charts[0];
  // Pullback of the frame coordinates by each lift, in overlap coordinates.
  std::vector<std::vector<MPoly<Zp2>>> pull(N);
  for (int a = 0; a < N; ++a) {
    if (atlas.kind != AtlasKind::proj_line || a == 0) {
      pull[a] = lift.images[a];
    } else {
      // z' = 1/w': transport the w-image and invert.
      pull[a] = {mp_inv_unit(mp_flip(lift.images[a][0], 0), p)};
    }
  }
  sd.phi.assign(N, std::vector<std::vector<MPoly<Fp>>>(N));
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int j = 0; j < ch0.n; ++j) {
        MPoly<Fp> h = mp_div_p(pull[a][j] - pull[b][j]);
        if (j < ch0.m) {
          // phi(dlog x'_j) = h(x'_j) / x_j^p
          std::vector<int> e(ch0.n, 0);
          e[j] = -(int)p;
          h = mp_red(mp_lift(h) * MPoly<Zp2>::monomial(ch0.n, e, Zp2(1, p)));
        }
        sd.phi[a][b].push_back(h);
      }
  sd.psi_ov.resize(N);
  for (int a = 0; a < N; ++a) {
    if (atlas.kind != AtlasKind::proj_line || a == 0) {
      sd.psi_ov[a] = sd.psi_chart[a];
      continue;
    }
    // psi_a = F_a^*/p evaluated intrinsically on the overlap generator.
    MPoly<Zp2> img = pull[a][0];
    MPoly<Zp2> dimg = MPoly<Zp2>::zero(1);  // coefficient of dz in d(img)
    for (auto& [e, k] : img.c) {
      if (e[0] == 0) continue;
      Zp2 coeff = MPTraits<Zp2>::from_int(e[0]) * k;
      if (irrhodge::is_zero(coeff)) continue;
      std::vector<int> e2 = e;
      e2[0] -= 1;
      auto it = dimg.c.find(e2);
      if (it == dimg.c.end())
        dimg.c[std::move(e2)] = coeff;
      else
        it->second = it->second + coeff;
    }
    dimg.prune();
    MPoly<Zp2> coeff_z2;  // coefficient of the frame generator, over Z/p^2
    if (ch0.m >= 1) {
      // generator dlog z': F^*(dlog z') = d(img)/img = (dimg/img) dz,
      // and dz = z dlog z.
      std::vector<int> one_e = {1};
      coeff_z2 = dimg * mp_inv_unit(img, p) * MPoly<Zp2>::monomial(1, one_e, Zp2(1, p));
    } else {
      // generator dz': F^*(dz') = d(img) = dimg dz.
      coeff_z2 = dimg;
    }
    LogForm<Fp> psi = LogForm<Fp>::zero(1);
    psi.add_term(1u << 0, mp_div_p(coeff_z2));
    sd.psi_ov[a] = {psi};
  }
  return sd;
}

// ---------------------------------------------------------------------------
// Assembling and checking the degree-j splitting cochains.  With the Cech
// differential signed from the right,
//   (delta x)_{t_0..t_{s+1}} = sum_i (-1)^{s+1-i} x_{drop i},
// and total differential D = delta + (-1)^s d, the cochains
//   j = 1 :  Theta^{(1,0)}_{ab} = phi_{ab},  Theta^{(0,1)}_a = psi_a
//   j = 2 :  Theta(w1 ^ w2) = (Cup(w1,w2) - Cup(w2,w1)) / 2 with
//            Cup^{(2,0)}_{abc} = -phi_{ab}(w1) phi_{bc}(w2)
//            Cup^{(1,1)}_{ab}  = phi_{ab}(w1) psi_b(w2) - psi_a(w1) phi_{ab}(w2)
//            Cup^{(0,2)}_a     = psi_a(w1) ^ psi_a(w2)
// are D-closed, have components inside F_* Omega_f, and represent the
// inverse Cartier class of w1 ^ ... ^ w_j.
// ---------------------------------------------------------------------------

struct SplittingReport {
  bool cocycle_ok = true;      // phi is a Cech cocycle and psi_a - psi_b = d phi_ab
  bool membership_ok = true;   // psi log; phi, psi map Omega^1_{f'} into Omega_f^0/1
  bool containment_ok = true;  // Theta_j lands in the f-adapted closed cochains, j <= 2
  bool matches_cartier = true; // [Theta^{(0,j)}] = [inverse Cartier] per slice
  bool canonical_exact = true; // Theta^{(0,j)} - inverse Cartier vanishes identically
  std::vector<std::string> notes;
  bool all_ok() const {
    return cocycle_ok && membership_ok && containment_ok && matches_cartier;
  }
};

namespace chpdetail {

// One degree-j splitting cochain evaluated on a j-tuple of generator indices
// (OK since the checks are O-linear in each slot).  Components are stored by
// Cech arity s: theta[s] maps each (s+1)-tuple of chart indices to a form of
// degree j - s in the overlap frame.
struct ThetaCochain {
  int j = 0;
  // key = chart tuple packed little-endian base N
  std::vector<std::map<std::vector<int>, LogForm<Fp>>> comp;
};

inline void all_tuples(int N, int len, std::vector<std::vector<int>>& out) {
  out.clear();
  std::vector<int> t(len, 0);
  while (true) {
    out.push_back(t);
    int i = 0;
    for (; i < len; ++i) {
      if (t[i] + 1 < N) {
        t[i] += 1;
        break;
      }
      t[i] = 0;
    }
    if (i == len) return;
  }
}

inline ThetaCochain theta_j1(const SplittingData& sd, int N, int gen) {
  ThetaCochain th;
  th.j = 1;
  th.comp.resize(2);
  std::vector<std::vector<int>> tuples;
  all_tuples(N, 2, tuples);
  for (auto& t : tuples)
    th.comp[1][t] = LogForm<Fp>::from_poly(sd.phi[t[0]][t[1]][gen]);
  all_tuples(N, 1, tuples);
  for (auto& t : tuples) th.comp[0][t] = sd.psi_ov[t[0]][gen];
  return th;
}

inline ThetaCochain theta_j2(const SplittingData& sd, int N, int n, int g1, int g2, long p) {
  Fp half = Fp(1, p) / Fp(2, p);
  ThetaCochain th;
  th.j = 2;
  th.comp.resize(3);
  std::vector<std::vector<int>> tuples;
  auto antisym = [&](const LogForm<Fp>& fwd, const LogForm<Fp>& bwd) {
    LogForm<Fp> r = fwd - bwd;
    LogForm<Fp> scaled = LogForm<Fp>::zero(n);
    for (auto& [s, g] : r.comp) scaled.add_term(s, half * g);
    return scaled;
  };
  all_tuples(N, 3, tuples);
  for (auto& t : tuples) {
    auto part = [&](int w1, int w2) {
      MPoly<Fp> v = sd.phi[t[0]][t[1]][w1] * sd.phi[t[1]][t[2]][w2];
      return LogForm<Fp>::from_poly(-v);
    };
    th.comp[2][t] = antisym(part(g1, g2), part(g2, g1));
  }
  all_tuples(N, 2, tuples);
  for (auto& t : tuples) {
    auto part = [&](int w1, int w2) {
      return sd.phi[t[0]][t[1]][w1] * sd.psi_ov[t[1]][w2] -
             sd.phi[t[0]][t[1]][w2] * sd.psi_ov[t[0]][w1];
    };
    th.comp[1][t] = antisym(part(g1, g2), part(g2, g1));
  }
  all_tuples(N, 1, tuples);
  for (auto& t : tuples) {
    auto part = [&](int w1, int w2) {
      return wedge(sd.psi_ov[t[0]][w1], sd.psi_ov[t[0]][w2]);
    };
    th.comp[0][t] = antisym(part(g1, g2), part(g2, g1));
  }
  return th;
}

// (D theta)^{(s+1, t)} and (s, t+1) components must vanish; checks every
// bidegree reachable from the stored ones.
inline bool theta_closed(const ThetaCochain& th, const MonomialChart& frame, int N) {
  int n = frame.n;
  for (int s = 0; s < (int)th.comp.size(); ++s) {
    // d-part: delta(comp[s]) + (-1)^{s+1} d(comp[s+1]) on (s+2)-tuples
    std::vector<std::vector<int>> tuples;
    all_tuples(N, s + 2, tuples);
    for (auto& t : tuples) {
      LogForm<Fp> acc = LogForm<Fp>::zero(n);
      for (int i = 0; i <= s + 1; ++i) {
        std::vector<int> sub;
        for (int q = 0; q <= s + 1; ++q)
          if (q != i) sub.push_back(t[q]);
        auto it = th.comp[s].find(sub);
        if (it == th.comp[s].end()) throw std::logic_error("theta: missing component");
        LogForm<Fp> v = it->second;
        if ((s + 1 - i) % 2 != 0) v = -v;
        acc = acc + v;
      }
      if (s + 1 < (int)th.comp.size()) {
        auto it = th.comp[s + 1].find(t);
        LogForm<Fp> dv = log_d(frame, it->second);
        if ((s + 1) % 2 != 0) dv = -dv;
        acc = acc + dv;
      }
      if (!acc.is_zero()) return false;
    }
  }
  // top d-part: d of the Cech-degree-0 component
  std::vector<std::vector<int>> singles;
  all_tuples(N, 1, singles);
  for (auto& t : singles) {
    auto it = th.comp[0].find(t);
    if (!log_d(frame, it->second).is_zero()) return false;
  }
  return true;
}

}  // namespace chpdetail

// Verify the full splitting package for i-truncations, i < p.  `window`
// bounds the multidegree box of the f-adapted test forms.
inline SplittingReport assemble_splitting(const W2Atlas& atlas, const FrobLift& lift, int i,
                                          int window = 2) {
  if (i >= atlas.p)
    throw std::invalid_argument("assemble_splitting: truncation index must be below p");
  if (i < 0) throw std::invalid_argument("assemble_splitting: negative truncation index");
  long p = atlas.p;
  int N = atlas.size();
  SplittingData sd = build_splitting_data(atlas, lift);
  SplittingReport rep;
  const MonomialChart& frame = atlas.charts[0];
  std::set<int> ov_laurent;
  if (atlas.kind == AtlasKind::proj_line) ov_laurent.insert(0);

  // (a) Cech identities on the overlap frame.
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int c = 0; c < N; ++c)
        for (int j = 0; j < frame.n; ++j)
          if (sd.phi[a][b][j] + sd.phi[b][c][j] != sd.phi[a][c][j]) rep.cocycle_ok = false;
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b)
      for (int j = 0; j < frame.n; ++j) {
        LogForm<Fp> lhs = sd.psi_ov[a][j] - sd.psi_ov[b][j];
        LogForm<Fp> rhs = log_d(frame, LogForm<Fp>::from_poly(sd.phi[a][b][j]));
        if (lhs != rhs) rep.cocycle_ok = false;
      }

  // (b) membership: psi_a is a log form on its own chart (O-linearity then
  // extends this to arbitrary sections), and on f-adapted test slices phi
  // and psi land in Omega_f^0 / Omega_f^1.
  for (int a = 0; a < N; ++a)
    for (int j = 0; j < atlas.charts[a].n; ++j)
      if (!is_log(atlas.charts[a], sd.psi_chart[a][j])) rep.membership_ok = false;
  bool poly_frame = atlas.kind != AtlasKind::proj_line;
  {
    std::vector<int> deg(frame.n, 0);
    do {
      SliceBasis sb = slice_basis(frame, 1, deg);
      Matrix<Fp> of1 = omega_f_cols(frame, 1, deg, p);
      for (int c = 0; c < of1.nc; ++c) {
        // reconstruct the test form from its column
        LogForm<Fp> w = LogForm<Fp>::zero(frame.n);
        for (int r = 0; r < of1.nr; ++r) {
          Fp kv = of1.rows[r].count(c) ? of1.rows[r].at(c) : Fp(0, p);
          if (irrhodge::is_zero(kv)) continue;
          w.add_term(sb.masks[r], MPoly<Fp>::monomial(frame.n, sb.expo[r], kv));
        }
        for (int a = 0; a < N; ++a) {
          // psi_a(w) on the chart frame (single/doubled; P1 handled per chart
          // by the generator-level log check, its overlap has empty divisor)
          if (poly_frame) {
            LogForm<Fp> img = LogForm<Fp>::zero(frame.n);
            for (auto& [s, g] : w.comp) {
              int j = __builtin_ctz(s);
              // x'^b gen_j |-> x^{pb} psi(gen_j)
              for (auto& [e, kv] : g.c) {
                std::vector<int> pe(frame.n);
                for (int q = 0; q < frame.n; ++q) pe[q] = (int)p * e[q];
                LogForm<Fp> t = MPoly<Fp>::monomial(frame.n, pe, kv) * sd.psi_ov[a][j];
                img = img + t;
              }
            }
            if (!in_omega_f(frame, img, ov_laurent)) rep.membership_ok = false;
          }
          for (int b = 0; b < N; ++b) {
            MPoly<Fp> val = MPoly<Fp>::zero(frame.n);
            for (auto& [s, g] : w.comp) {
              int j = __builtin_ctz(s);
              for (auto& [e, kv] : g.c) {
                std::vector<int> pe(frame.n);
                for (int q = 0; q < frame.n; ++q) pe[q] = (int)p * e[q];
                val = val + MPoly<Fp>::monomial(frame.n, pe, kv) * sd.phi[a][b][j];
              }
            }
            if (!in_omega_f(frame, LogForm<Fp>::from_poly(val), ov_laurent))
              rep.membership_ok = false;
          }
        }
      }
    } while (chpdetail::next_box_point(deg, 0, window));
  }

  // (c) D-closedness of Theta_j (checked once per generator tuple; scaling by
  // a p-th-power coefficient commutes with d) and componentwise f-membership
  // of Theta_j(w') for f-adapted test slices, j <= min(i, 2).
  int jmax = std::min(i, std::min(frame.n, 2));
  for (int j = 1; j <= jmax; ++j) {
    std::map<unsigned, chpdetail::ThetaCochain> thetas;  // generator mask -> cochain
    if (j == 1) {
      for (int g = 0; g < frame.n; ++g) thetas[1u << g] = chpdetail::theta_j1(sd, N, g);
    } else {
      for (int g1 = 0; g1 < frame.n; ++g1)
        for (int g2 = g1 + 1; g2 < frame.n; ++g2)
          thetas[(1u << g1) | (1u << g2)] = chpdetail::theta_j2(sd, N, frame.n, g1, g2, p);
    }
    for (auto& [mask, th] : thetas)
      if (!chpdetail::theta_closed(th, frame, N)) rep.containment_ok = false;
    std::vector<int> deg(frame.n, 0);
    do {
      SliceBasis sb = slice_basis(frame, j, deg);
      Matrix<Fp> ofj = omega_f_cols(frame, j, deg, p);
      for (int c = 0; c < ofj.nc; ++c) {
        // Theta_j(w') for the f-adapted column w' = sum c_S x'^{b(S)} delta'_S
        for (int s = 0; s <= j; ++s) {
          std::vector<std::vector<int>> tuples;
          chpdetail::all_tuples(N, s + 1, tuples);
          for (auto& t : tuples) {
            LogForm<Fp> acc = LogForm<Fp>::zero(frame.n);
            for (int r = 0; r < ofj.nr; ++r) {
              Fp kv = ofj.rows[r].count(c) ? ofj.rows[r].at(c) : Fp(0, p);
              if (irrhodge::is_zero(kv)) continue;
              std::vector<int> pe(frame.n);
              for (int q = 0; q < frame.n; ++q) pe[q] = (int)p * sb.expo[r][q];
              const LogForm<Fp>& part = thetas.at(sb.masks[r]).comp[s].at(t);
              acc = acc + MPoly<Fp>::monomial(frame.n, pe, kv) * part;
            }
            if (!in_omega_f(frame, acc, ov_laurent)) rep.containment_ok = false;
          }
        }
      }
    } while (chpdetail::next_box_point(deg, 0, window));
  }

  // (d) per-slice class comparison with the inverse Cartier map (polynomial
  // frames; the projective-line overlap has no divisor, so the slice story
  // lives on the charts and is covered by (a)-(c)).
  if (poly_frame) {
    for (int j = 1; j <= jmax; ++j) {
      std::vector<int> deg(frame.n, 0);
      do {
        SliceBasis sb = slice_basis(frame, j, deg);
        Matrix<Fp> ofj = omega_f_cols(frame, j, deg, p);
        for (int c = 0; c < ofj.nc; ++c) {
          LogForm<Fp> w = LogForm<Fp>::zero(frame.n);
          for (int r = 0; r < ofj.nr; ++r) {
            Fp kv = ofj.rows[r].count(c) ? ofj.rows[r].at(c) : Fp(0, p);
            if (irrhodge::is_zero(kv)) continue;
            w.add_term(sb.masks[r], MPoly<Fp>::monomial(frame.n, sb.expo[r], kv));
          }
          for (int a = 0; a < N; ++a) {
            // Theta^{(0,j)}_a(w): psi-products, O-linear in the coefficient
            LogForm<Fp> img = LogForm<Fp>::zero(frame.n);
            for (auto& [s, g] : w.comp) {
              std::vector<int> gens;
              for (int q = 0; q < frame.n; ++q)
                if (s & (1u << q)) gens.push_back(q);
              LogForm<Fp> prod;
              if (j == 1) {
                prod = sd.psi_ov[a][gens[0]];
              } else {
                prod = wedge(sd.psi_ov[a][gens[0]], sd.psi_ov[a][gens[1]]);
              }
              for (auto& [e, kv] : g.c) {
                std::vector<int> pe(frame.n);
                for (int q = 0; q < frame.n; ++q) pe[q] = (int)p * e[q];
                img = img + MPoly<Fp>::monomial(frame.n, pe, kv) * prod;
              }
            }
            LogForm<Fp> diff = img - cartier_inverse(frame, w, p);
            if (!diff.is_zero()) rep.canonical_exact = false;
            if (!diff.is_zero() && !exact_in_omega_f(frame, j, diff, p))
              rep.matches_cartier = false;
          }
        }
      } while (chpdetail::next_box_point(deg, 0, window));
    }
  } else {
    rep.notes.push_back(
        "class comparison runs on affine frames; the projective-line overlap has an empty "
        "divisor and its chart-level data is covered by the identity checks");
  }
  if (!rep.all_ok()) {
    std::ostringstream os;
    os << "splitting verdicts: cocycle=" << rep.cocycle_ok
       << " membership=" << rep.membership_ok << " containment=" << rep.containment_ok
       << " cartier=" << rep.matches_cartier;
    rep.notes.push_back(os.str());
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Degeneration by dimension count on the projective line over F_p: the
// hypercohomology of (Omega_f, d) has the same dimensions as the complex
// with zero differential.
// ---------------------------------------------------------------------------

struct CharpDegenerationReport {
  long p = 0;
  bool stable_d = true;
  bool stable_zero = true;
  bool equal = false;
  std::vector<int> dims_d, dims_zero;
  std::string note;
};

inline CharpDegenerationReport charp_degeneration_dims(long p, bool horiz_at_zero,
                                                       int T = -1) {
  Fp::require_prime(p);
  CharpDegenerationReport rep;
  rep.p = p;
  P1Instance<Fp> inst;
  inst.f_num = Poly<Fp>(std::vector<Fp>{Fp(0, p), Fp(1, p)});  // f = z
  inst.f_den = Poly<Fp>::constant(Fp(1, p));
  inst.e_inf = 1;
  if (horiz_at_zero) inst.horiz_fin.insert(Fp(0, p));
  inst.validate();
  try {
    rep.dims_d = hypercoh_dims(inst, Rat(0), Fp(1, p), Fp(0, p), T);
  } catch (const StabilizationError& e) {
    rep.stable_d = false;
    rep.note = e.what();
  }
  try {
    rep.dims_zero = hypercoh_dims(inst, Rat(0), Fp(0, p), Fp(0, p), T);
  } catch (const StabilizationError& e) {
    rep.stable_zero = false;
    if (!rep.note.empty()) rep.note += "; ";
    rep.note += e.what();
  }
  rep.equal = rep.stable_d && rep.stable_zero && rep.dims_d == rep.dims_zero;
  return rep;
}

}  // namespace irrhodge
