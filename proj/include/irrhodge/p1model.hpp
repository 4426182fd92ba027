#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "irrhodge/field.hpp"
#include "irrhodge/poly.hpp"

namespace irrhodge {

// Exact rational functions on an affine coordinate line, kept in the factored
// shape num(t) · Π_a (t - a)^{k_a} so that pole/zero orders at the marked
// points stay explicit and conversions into section bases are exact divisions.

struct SectionError : std::runtime_error {
  explicit SectionError(const std::string& w) : std::runtime_error(w) {}
};

template <class K>
Poly<K> linear_factor(const K& a) {
  return Poly<K>(std::vector<K>{-a, FieldTraits<K>::one()});
}

template <class K>
Poly<K> poly_deriv(const Poly<K>& p) {
  std::vector<K> v;
  for (int i = 1; i <= p.deg(); ++i) v.push_back(FieldTraits<K>::from_int(i) * p.coeff(i));
  return Poly<K>(std::move(v));
}

template <class K>
Poly<K> poly_pow(const Poly<K>& p, int k) {
  Poly<K> r = Poly<K>::one();
  for (int i = 0; i < k; ++i) r *= p;
  return r;
}

// Negation via explicit construction: keeps lazy bignum expression types out
// of template argument deduction.
template <class K>
K neg_of(const K& a) {
  return FieldTraits<K>::zero() - a;
}

template <class K>
K neg_one() {
  return neg_of(FieldTraits<K>::one());
}

template <class K>
K scalar_pow(K a, int k) {
  if (k < 0) {
    a = FieldTraits<K>::one() / a;
    k = -k;
  }
  K r = FieldTraits<K>::one();
  for (int i = 0; i < k; ++i) r = r * a;
  return r;
}

template <class K>
struct FactoredFun {
  std::map<K, int> exps;  // point a -> exponent of (t - a)
  Poly<K> num;

  bool is_zero() const { return num.is_zero(); }

  void reduce() {
    if (num.is_zero()) {
      exps.clear();
      return;
    }
    for (auto it = exps.begin(); it != exps.end();)
      it = it->second == 0 ? exps.erase(it) : std::next(it);
  }

  static FactoredFun zero() { return FactoredFun{}; }
  static FactoredFun from_poly(Poly<K> p) {
    FactoredFun f;
    f.num = std::move(p);
    return f;
  }
  static FactoredFun one() { return from_poly(Poly<K>::one()); }
};

template <class K>
FactoredFun<K> mul(const FactoredFun<K>& a, const FactoredFun<K>& b) {
  FactoredFun<K> r;
  r.num = a.num * b.num;
  if (r.num.is_zero()) return r;
  r.exps = a.exps;
  for (auto& [pt, k] : b.exps) r.exps[pt] += k;
  r.reduce();
  return r;
}

template <class K>
FactoredFun<K> scale(const FactoredFun<K>& a, const K& c) {
  FactoredFun<K> r = a;
  r.num = r.num * Poly<K>::constant(c);
  r.reduce();
  return r;
}

template <class K>
FactoredFun<K> add(const FactoredFun<K>& a, const FactoredFun<K>& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  // Align to the componentwise minimum exponent, expanding the excess.
  auto exp_of = [](const FactoredFun<K>& f, const K& pt) {
    auto it = f.exps.find(pt);
    return it == f.exps.end() ? 0 : it->second;
  };
  std::map<K, int> common;
  for (auto& [pt, k] : a.exps) common[pt] = std::min(k, exp_of(b, pt));
  for (auto& [pt, k] : b.exps) common[pt] = std::min(k, exp_of(a, pt));
  Poly<K> na = a.num, nb = b.num;
  for (auto& [pt, k] : common) {
    int ka = a.exps.count(pt) ? a.exps.at(pt) : 0;
    int kb = b.exps.count(pt) ? b.exps.at(pt) : 0;
    na = na * poly_pow(linear_factor(pt), ka - k);
    nb = nb * poly_pow(linear_factor(pt), kb - k);
  }
  FactoredFun<K> r;
  r.exps = common;
  r.num = na + nb;
  r.reduce();
  return r;
}

// d/dt of num·Π(t-a)^{k_a}:
//   Π(t-a)^{k_a - 1} · [ num'·Π(t-a) + num·Σ_a k_a Π_{b≠a}(t-b) ].
template <class K>
FactoredFun<K> deriv(const FactoredFun<K>& h) {
  if (h.is_zero()) return FactoredFun<K>::zero();
  FactoredFun<K> r;
  Poly<K> prod = Poly<K>::one();
  for (auto& [pt, k] : h.exps) prod *= linear_factor(pt);
  Poly<K> inner = poly_deriv(h.num) * prod;
  for (auto& [pt, k] : h.exps) {
    Poly<K> rest = Poly<K>::constant(FieldTraits<K>::from_int(k));
    for (auto& [pt2, k2] : h.exps)
      if (!(pt2 == pt)) rest *= linear_factor(pt2);
    inner += h.num * rest;
  }
  r.num = inner;
  if (!r.num.is_zero())
    for (auto& [pt, k] : h.exps) r.exps[pt] = k - 1;
  r.reduce();
  return r;
}

// Substitute t = 1/s: a factored function of t becomes a factored function of
// the opposite chart coordinate s.  (t - a) = (-a)(s - 1/a)/s for a ≠ 0,
// t = 1/s, and num(1/s) = s^{-deg}·(reversed num).
template <class K>
FactoredFun<K> subst_inv(const FactoredFun<K>& h) {
  if (h.is_zero()) return FactoredFun<K>::zero();
  FactoredFun<K> r;
  int d = h.num.deg();
  std::vector<K> rev(d + 1, FieldTraits<K>::zero());
  for (int i = 0; i <= d; ++i) rev[i] = h.num.coeff(d - i);
  r.num = Poly<K>(std::move(rev));
  K zero_pt = FieldTraits<K>::zero();
  int shift = -d;
  K c = FieldTraits<K>::one();
  for (auto& [pt, k] : h.exps) {
    if (pt == zero_pt) {
      shift -= k;
    } else {
      r.exps[FieldTraits<K>::one() / pt] += k;
      shift -= k;
      c = c * scalar_pow(neg_of(pt), k);
    }
  }
  r.exps[zero_pt] += shift;
  r.num = r.num * Poly<K>::constant(c);
  r.reduce();
  return r;
}

// The section space spanned by t^j · Π_a (t - a)^{-m_a} for jlo ≤ j ≤ jhi:
// truncated global sections of a rank-1 sheaf whose allowed pole order at a
// is m_a (negative = imposed zero), with the t-exponent window absorbing the
// orders at the origin and at the chart boundary.
template <class K>
struct SectionBasis {
  std::map<K, int> m;
  int jlo = 0, jhi = -1;

  int dim() const { return jhi >= jlo ? jhi - jlo + 1 : 0; }

  FactoredFun<K> element(int idx) const {
    if (idx < 0 || idx >= dim()) throw std::out_of_range("SectionBasis::element");
    FactoredFun<K> f = FactoredFun<K>::one();
    for (auto& [pt, mm] : m) f.exps[pt] -= mm;
    f.exps[FieldTraits<K>::zero()] += jlo + idx;
    f.reduce();
    return f;
  }

  // Exact coordinates of h in this basis; throws SectionError when h is not a
  // section (pole too deep) or falls outside the truncation window.
  std::vector<K> coords(const FactoredFun<K>& h) const {
    std::vector<K> out(dim(), FieldTraits<K>::zero());
    if (h.is_zero()) return out;
    std::map<K, int> exps = h.exps;
    for (auto& [pt, mm] : m) exps[pt] += mm;
    Poly<K> num = h.num;
    K zero_pt = FieldTraits<K>::zero();
    int shift = 0;
    for (auto& [pt, e] : exps) {
      if (pt == zero_pt) {
        shift = e;
        continue;
      }
      if (e > 0) {
        num = num * poly_pow(linear_factor(pt), e);
      } else {
        Poly<K> lf = linear_factor(pt);
        for (int i = 0; i < -e; ++i) {
          auto [q, rem] = divmod(num, lf);
          if (!rem.is_zero()) throw SectionError("section coords: pole exceeds allowed order");
          num = q;
        }
      }
    }
    for (int i = 0; i <= num.deg(); ++i) {
      if (irrhodge::is_zero(num.coeff(i))) continue;
      int j = shift + i;
      if (j < jlo || j > jhi) throw SectionError("section coords: truncation window overflow");
      out[j - jlo] += num.coeff(i);
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Rational root extraction (for deriving the pole divisor from a denominator).

inline std::vector<long> positive_divisors(long n) {
  if (n < 0) n = -n;
  std::vector<long> out;
  for (long d = 1; d * d <= n; ++d)
    if (n % d == 0) {
      out.push_back(d);
      if (d != n / d) out.push_back(n / d);
    }
  return out;
}

// All rational roots with multiplicity; the deflated remainder (with no
// rational roots) is returned through `rest`.
inline std::map<Rat, int> rational_roots(const Poly<Rat>& p, Poly<Rat>* rest = nullptr) {
  if (p.is_zero()) throw std::invalid_argument("rational_roots: zero polynomial");
  std::map<Rat, int> roots;
  Poly<Rat> q = p;
  int v = h_valuation(q);
  if (v > 0) {
    roots[Rat(0)] = v;
    std::vector<Rat> c(q.c.begin() + v, q.c.end());
    q = Poly<Rat>(std::move(c));
  }
  if (q.deg() >= 1) {
    // Integer model: candidates p/q with p | constant, q | leading.
    mpz_class den_lcm = 1;
    for (auto& cc : q.c) mpz_lcm(den_lcm.get_mpz_t(), den_lcm.get_mpz_t(), cc.get_den().get_mpz_t());
    mpz_class c0 = mpz_class(q.coeff(0).get_num() * den_lcm / q.coeff(0).get_den());
    mpz_class cl = mpz_class(q.leading().get_num() * den_lcm / q.leading().get_den());
    if (!c0.fits_slong_p() || !cl.fits_slong_p())
      throw std::invalid_argument("rational_roots: coefficients too large");
    for (long pn : positive_divisors(c0.get_si()))
      for (long qn : positive_divisors(cl.get_si()))
        for (int sign = 0; sign < 2; ++sign) {
          Rat r(sign ? -pn : pn, qn);
          r.canonicalize();
          while (q.deg() >= 1 && irrhodge::is_zero(q.eval(r))) {
            auto [quot, rem] = divmod(q, linear_factor(r));
            if (!rem.is_zero()) throw std::logic_error("rational_roots: inexact deflation");
            q = quot;
            roots[r]++;
          }
        }
  }
  if (rest) *rest = q;
  return roots;
}

}  // namespace irrhodge
