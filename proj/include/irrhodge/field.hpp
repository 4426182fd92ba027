#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace irrhodge {

// Exact rational scalar.
using Rat = mpq_class;

inline bool is_zero(const Rat& x) { return sgn(x) == 0; }
inline bool is_one(const Rat& x) { return x == 1; }

// mpq_class(num, den) does not canonicalize; always build fractions here.
inline Rat ratio(long num, long den) {
  Rat r(num, den);
  r.canonicalize();
  return r;
}

// Prime-field scalar with a runtime modulus.  A default-constructed value
// (or one made by FieldTraits<Fp>::zero/one) carries no modulus yet and
// acquires one on first contact with a modulus-carrying value, so that
// generic code can mint 0/1 literals without threading the prime through.
struct Fp {
  long v = 0;  // normalized to [0, p) once p > 0
  long p = 0;  // 0 = modulus not yet attached

  Fp() = default;
  Fp(long value, long prime) : p(prime) {
    require_prime(prime);
    v = normalize(value, prime);
  }

  static long normalize(long value, long prime) {
    long r = value % prime;
    if (r < 0) r += prime;
    return r;
  }

  static void require_prime(long prime) {
    if (prime < 2) throw std::invalid_argument("Fp: modulus must be a prime >= 2");
    for (long d = 2; d * d <= prime; ++d)
      if (prime % d == 0) throw std::invalid_argument("Fp: modulus is not prime");
  }

  bool has_modulus() const { return p != 0; }
};

inline long fp_resolve_modulus(const Fp& a, const Fp& b) {
  if (a.p != 0 && b.p != 0) {
    if (a.p != b.p) throw std::invalid_argument("Fp: mixed moduli");
    return a.p;
  }
  return a.p != 0 ? a.p : b.p;
}

inline Fp fp_attach(const Fp& x, long prime) {
  if (prime == 0) return x;  // both bare: stays bare (small 0/±1 literals only)
  Fp r;
  r.p = prime;
  r.v = Fp::normalize(x.v, prime);
  return r;
}

inline Fp operator+(const Fp& a, const Fp& b) {
  long p = fp_resolve_modulus(a, b);
  Fp x = fp_attach(a, p), y = fp_attach(b, p);
  Fp r;
  r.p = p;
  r.v = p ? (x.v + y.v) % p : (x.v + y.v);
  return r;
}

inline Fp operator-(const Fp& a, const Fp& b) {
  long p = fp_resolve_modulus(a, b);
  Fp x = fp_attach(a, p), y = fp_attach(b, p);
  Fp r;
  r.p = p;
  r.v = p ? Fp::normalize(x.v - y.v, p) : (x.v - y.v);
  return r;
}

inline Fp operator-(const Fp& a) {
  Fp r;
  r.p = a.p;
  r.v = a.p ? Fp::normalize(-a.v, a.p) : -a.v;
  return r;
}

inline Fp operator*(const Fp& a, const Fp& b) {
  long p = fp_resolve_modulus(a, b);
  Fp x = fp_attach(a, p), y = fp_attach(b, p);
  Fp r;
  r.p = p;
  r.v = p ? (x.v * y.v) % p : (x.v * y.v);
  return r;
}

inline long fp_inverse(long a, long p) {
  long t = 0, newt = 1, r = p, newr = Fp::normalize(a, p);
  while (newr != 0) {
    long q = r / newr;
    long tmp = t - q * newt;
    t = newt;
    newt = tmp;
    tmp = r - q * newr;
    r = newr;
    newr = tmp;
  }
  if (r != 1) throw std::domain_error("Fp: inverse of a non-unit");
  return Fp::normalize(t, p);
}

inline Fp operator/(const Fp& a, const Fp& b) {
  long p = fp_resolve_modulus(a, b);
  if (p == 0) {
    if (b.v == 1) return a;
    if (b.v == -1) return -a;
    throw std::domain_error("Fp: division without a modulus");
  }
  Fp x = fp_attach(a, p), y = fp_attach(b, p);
  if (y.v == 0) throw std::domain_error("Fp: division by zero");
  Fp r;
  r.p = p;
  r.v = (x.v * fp_inverse(y.v, p)) % p;
  return r;
}

inline bool operator==(const Fp& a, const Fp& b) {
  long p = fp_resolve_modulus(a, b);
  return fp_attach(a, p).v == fp_attach(b, p).v;
}
inline bool operator!=(const Fp& a, const Fp& b) { return !(a == b); }

// Ordering for use as ordered-container keys, consistent with operator==: a
// bare literal compares equivalent to the attached value it represents, so a
// container never holds both as separate keys.  Keys sharing a container are
// expected to carry at most one modulus (mixed-modulus arithmetic throws
// before such a container could be built).
inline bool operator<(const Fp& a, const Fp& b) {
  if (a.p != 0 && b.p != 0 && a.p != b.p) return a.p < b.p;
  long p = a.p != 0 ? a.p : b.p;
  return fp_attach(a, p).v < fp_attach(b, p).v;
}

inline Fp& operator+=(Fp& a, const Fp& b) { return a = a + b; }
inline Fp& operator-=(Fp& a, const Fp& b) { return a = a - b; }
inline Fp& operator*=(Fp& a, const Fp& b) { return a = a * b; }
inline Fp& operator/=(Fp& a, const Fp& b) { return a = a / b; }

inline bool is_zero(const Fp& x) { return x.p ? x.v == 0 : x.v == 0; }
inline bool is_one(const Fp& x) { return x.p ? x.v == 1 : x.v == 1; }

// Uniform access to field constants for generic code.
template <class K>
struct FieldTraits;

template <>
struct FieldTraits<Rat> {
  static Rat zero() { return Rat(0); }
  static Rat one() { return Rat(1); }
  static Rat from_int(long n) { return Rat(n); }
  static std::string name() { return "QQ"; }
};

template <>
struct FieldTraits<Fp> {
  static Fp zero() { return Fp(); }
  static Fp one() {
    Fp r;
    r.v = 1;
    return r;
  }
  static Fp from_int(long n) {
    Fp r;
    r.v = n;  // bare literal; reduced on first contact with a modulus
    return r;
  }
  static std::string name() { return "Fp"; }
};

inline std::string to_string(const Rat& x) {
  return x.get_str();
}
inline std::string to_string(const Fp& x) { return std::to_string(x.v); }

}  // namespace irrhodge
