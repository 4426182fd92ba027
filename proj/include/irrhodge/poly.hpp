#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "irrhodge/field.hpp"

namespace irrhodge {

// Dense univariate polynomial over a field K (variable written "h" in
// reports, used as the Rees parameter).  Invariant: no trailing zero
// coefficients; the zero polynomial has an empty coefficient vector.
template <class K>
struct Poly {
  std::vector<K> c;  // c[i] = coefficient of h^i

  Poly() = default;
  explicit Poly(std::vector<K> coeffs) : c(std::move(coeffs)) { normalize(); }

  void normalize() {
    while (!c.empty() && irrhodge::is_zero(c.back())) c.pop_back();
  }

  static Poly zero() { return Poly(); }
  static Poly constant(const K& k) { return Poly(std::vector<K>{k}); }
  static Poly one() { return constant(FieldTraits<K>::one()); }
  static Poly monomial(const K& k, int n) {
    if (irrhodge::is_zero(k)) return zero();
    std::vector<K> v(n + 1, FieldTraits<K>::zero());
    v[n] = k;
    return Poly(std::move(v));
  }

  bool is_zero() const { return c.empty(); }
  int deg() const { return (int)c.size() - 1; }  // -1 for the zero polynomial
  const K& leading() const {
    if (c.empty()) throw std::domain_error("Poly: leading of zero");
    return c.back();
  }
  K coeff(int i) const {
    return (i >= 0 && i < (int)c.size()) ? c[i] : FieldTraits<K>::zero();
  }

  K eval(const K& x) const {
    K acc = FieldTraits<K>::zero();
    for (int i = (int)c.size() - 1; i >= 0; --i) acc = acc * x + c[i];
    return acc;
  }

  bool is_constant() const { return c.size() <= 1; }
  bool is_monomial() const {
    for (int i = 0; i + 1 < (int)c.size(); ++i)
      if (!irrhodge::is_zero(c[i])) return false;
    return true;
  }
};

template <class K>
bool is_zero(const Poly<K>& p) {
  return p.is_zero();
}
template <class K>
bool is_one(const Poly<K>& p) {
  return p.c.size() == 1 && irrhodge::is_one(p.c[0]);
}

template <class K>
bool operator==(const Poly<K>& a, const Poly<K>& b) {
  if (a.c.size() != b.c.size()) return false;
  for (size_t i = 0; i < a.c.size(); ++i)
    if (!(a.c[i] == b.c[i])) return false;
  return true;
}
template <class K>
bool operator!=(const Poly<K>& a, const Poly<K>& b) {
  return !(a == b);
}

template <class K>
Poly<K> operator+(const Poly<K>& a, const Poly<K>& b) {
  std::vector<K> v(std::max(a.c.size(), b.c.size()), FieldTraits<K>::zero());
  for (size_t i = 0; i < a.c.size(); ++i) v[i] += a.c[i];
  for (size_t i = 0; i < b.c.size(); ++i) v[i] += b.c[i];
  return Poly<K>(std::move(v));
}

template <class K>
Poly<K> operator-(const Poly<K>& a) {
  Poly<K> r = a;
  for (auto& x : r.c) x = -x;
  return r;
}

template <class K>
Poly<K> operator-(const Poly<K>& a, const Poly<K>& b) {
  return a + (-b);
}

template <class K>
Poly<K> operator*(const Poly<K>& a, const Poly<K>& b) {
  if (a.is_zero() || b.is_zero()) return Poly<K>::zero();
  std::vector<K> v(a.c.size() + b.c.size() - 1, FieldTraits<K>::zero());
  for (size_t i = 0; i < a.c.size(); ++i) {
    if (irrhodge::is_zero(a.c[i])) continue;
    for (size_t j = 0; j < b.c.size(); ++j) v[i + j] += a.c[i] * b.c[j];
  }
  return Poly<K>(std::move(v));
}

template <class K>
Poly<K>& operator+=(Poly<K>& a, const Poly<K>& b) {
  return a = a + b;
}
template <class K>
Poly<K>& operator-=(Poly<K>& a, const Poly<K>& b) {
  return a = a - b;
}
template <class K>
Poly<K>& operator*=(Poly<K>& a, const Poly<K>& b) {
  return a = a * b;
}

// Division with remainder; the divisor's leading coefficient is a unit.
template <class K>
std::pair<Poly<K>, Poly<K>> divmod(const Poly<K>& a, const Poly<K>& b) {
  if (b.is_zero()) throw std::domain_error("Poly: division by zero");
  Poly<K> q, r = a;
  if (a.deg() < b.deg()) return {q, r};
  std::vector<K> qc(a.deg() - b.deg() + 1, FieldTraits<K>::zero());
  K lead_inv = FieldTraits<K>::one() / b.leading();
  while (!r.is_zero() && r.deg() >= b.deg()) {
    int shift = r.deg() - b.deg();
    K f = r.leading() * lead_inv;
    qc[shift] = f;
    std::vector<K> nv = r.c;
    for (size_t i = 0; i < b.c.size(); ++i) nv[i + shift] -= f * b.c[i];
    r = Poly<K>(std::move(nv));
  }
  return {Poly<K>(std::move(qc)), r};
}

// h-adic valuation: largest m with h^m | p (0 for units, -1 for p == 0).
template <class K>
int h_valuation(const Poly<K>& p) {
  if (p.is_zero()) return -1;
  int m = 0;
  while (irrhodge::is_zero(p.c[m])) ++m;
  return m;
}

template <class K>
std::string to_string(const Poly<K>& p) {
  if (p.is_zero()) return "0";
  std::string s;
  for (int i = 0; i <= p.deg(); ++i) {
    if (irrhodge::is_zero(p.c[i])) continue;
    if (!s.empty()) s += " + ";
    std::string cs = irrhodge::to_string(p.c[i]);
    if (i == 0)
      s += cs;
    else if (irrhodge::is_one(p.c[i]))
      s += (i == 1 ? "h" : "h^" + std::to_string(i));
    else
      s += cs + (i == 1 ? "*h" : "*h^" + std::to_string(i));
  }
  return s;
}

}  // namespace irrhodge
