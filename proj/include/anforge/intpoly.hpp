#ifndef ANFORGE_INTPOLY_HPP_
#define ANFORGE_INTPOLY_HPP_

// Dense univariate polynomials over Z and over F_p.
//
// Everything here is exact. Integer polynomials carry GMP coefficients;
// prime-field polynomials carry machine-word residues, which is enough for
// the witness-prime scans (p < 2^63).

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "anforge/arith.hpp"
#include "anforge/error.hpp"

namespace anforge {

/// Integer polynomial; coefficient k multiplies x^k. The highest stored
/// coefficient is nonzero, so the zero polynomial is the empty sequence.
class IntPoly {
 public:
  IntPoly() = default;
  explicit IntPoly(std::vector<mpz_class> coeffs) : c_(std::move(coeffs)) {
    trim();
  }
  IntPoly(std::initializer_list<long> coeffs) {
    c_.reserve(coeffs.size());
    for (long v : coeffs) c_.emplace_back(v);
    trim();
  }

  static IntPoly constant(const mpz_class& v) { return IntPoly({v}); }
  static IntPoly monomial(const mpz_class& coeff, std::size_t k) {
    std::vector<mpz_class> c(k + 1);
    c[k] = coeff;
    return IntPoly(std::move(c));
  }
  // x - root
  static IntPoly linear(const mpz_class& lead, const mpz_class& constant) {
    return IntPoly({constant, lead});
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  const mpz_class& leading() const { return c_.back(); }
  std::span<const mpz_class> coeffs() const { return c_; }
  mpz_class coeff(std::size_t k) const { return k < c_.size() ? c_[k] : mpz_class(0); }

  friend bool operator==(const IntPoly& a, const IntPoly& b) { return a.c_ == b.c_; }

  friend IntPoly operator+(const IntPoly& a, const IntPoly& b) {
    std::vector<mpz_class> c(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = a.coeff(k) + b.coeff(k);
    return IntPoly(std::move(c));
  }
  friend IntPoly operator-(const IntPoly& a, const IntPoly& b) {
    std::vector<mpz_class> c(std::max(a.c_.size(), b.c_.size()));
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = a.coeff(k) - b.coeff(k);
    return IntPoly(std::move(c));
  }
  friend IntPoly operator*(const IntPoly& a, const IntPoly& b) {
    if (a.is_zero() || b.is_zero()) return {};
    std::vector<mpz_class> c(a.c_.size() + b.c_.size() - 1);
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
    }
    return IntPoly(std::move(c));
  }
  friend IntPoly operator*(const mpz_class& s, const IntPoly& a) {
    std::vector<mpz_class> c(a.c_);
    for (auto& v : c) v *= s;
    return IntPoly(std::move(c));
  }

  std::string to_string() const {
    if (c_.empty()) return "0";
    std::string out;
    for (int k = degree(); k >= 0; --k) {
      const mpz_class& v = c_[static_cast<std::size_t>(k)];
      if (v == 0) continue;
      const mpz_class mag = abs(v);
      if (out.empty()) {
        if (v < 0) out += "-";
      } else {
        out += v < 0 ? " - " : " + ";
      }
      const bool unit = (mag == 1 && k > 0);
      if (!unit) out += mag.get_str();
      if (k > 0) {
        if (!unit) out += "*";
        out += "x";
        if (k > 1) out += "^" + std::to_string(k);
      }
    }
    return out;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<mpz_class> c_;
};

/// Horner evaluation.
inline mpz_class eval(const IntPoly& p, const mpz_class& x) {
  mpz_class acc = 0;
  for (int k = p.degree(); k >= 0; --k) {
    acc = acc * x + p.coeffs()[static_cast<std::size_t>(k)];
  }
  return acc;
}

/// den^deg(P) * P(num/den), an exact integer. den must be nonzero.
inline mpz_class eval_homogeneous(const IntPoly& p, const mpz_class& num,
                                  const mpz_class& den) {
  if (p.is_zero()) return 0;
  mpz_class acc = 0;
  mpz_class den_pow = 1;
  // Horner in the homogenized form: acc_k = acc_{k+1} * num + c_k * den^(d-k)
  for (int k = p.degree(); k >= 0; --k) {
    acc = acc * num + p.coeffs()[static_cast<std::size_t>(k)] * den_pow;
    den_pow *= den;
  }
  return acc;
}

inline int sign_at_rational(const IntPoly& p, const mpq_class& x) {
  return sgn(eval_homogeneous(p, x.get_num(), x.get_den()));
}

inline IntPoly derivative(const IntPoly& p) {
  if (p.degree() < 1) return {};
  std::vector<mpz_class> c(static_cast<std::size_t>(p.degree()));
  for (std::size_t k = 1; k < p.coeffs().size(); ++k) {
    c[k - 1] = p.coeffs()[k] * static_cast<unsigned long>(k);
  }
  return IntPoly(std::move(c));
}

/// The integer polynomial P0 with P0(0) = 0 and P0' = q. Throws
/// NonIntegralAntiderivative(m) when m does not divide the x^(m-1)
/// coefficient.
inline IntPoly antiderivative_from_zero(const IntPoly& q) {
  if (q.is_zero()) return {};
  std::vector<mpz_class> c(q.coeffs().size() + 1);
  for (std::size_t k = 0; k < q.coeffs().size(); ++k) {
    const mpz_class m = static_cast<unsigned long>(k + 1);
    if (!divides(m, q.coeffs()[k])) {
      throw NonIntegralAntiderivative(static_cast<int>(k + 1));
    }
    c[k + 1] = divexact(q.coeffs()[k], m);
  }
  return IntPoly(std::move(c));
}

/// Positive gcd of the coefficients (0 for the zero polynomial).
inline mpz_class content(const IntPoly& p) {
  mpz_class g = 0;
  for (const auto& v : p.coeffs()) {
    g = gcd(g, v);
    if (g == 1) break;
  }
  return g;
}

inline IntPoly exact_quotient(const IntPoly& p, const mpz_class& d) {
  std::vector<mpz_class> c(p.coeffs().begin(), p.coeffs().end());
  for (auto& v : c) v = divexact(v, d);
  return IntPoly(std::move(c));
}

inline IntPoly primitive_part(const IntPoly& p) {
  if (p.is_zero()) return p;
  return exact_quotient(p, content(p));
}

/// lc(b)^(deg a - deg b + 1) * a mod b, computed without division.
inline IntPoly pseudo_remainder(const IntPoly& a, const IntPoly& b) {
  if (b.is_zero()) throw ZeroPolynomial();
  const int db = b.degree();
  if (a.degree() < db) return a;
  std::vector<mpz_class> r(a.coeffs().begin(), a.coeffs().end());
  const mpz_class& lb = b.leading();
  int e = a.degree() - db + 1;
  int dr = a.degree();
  while (dr >= db) {
    const mpz_class lr = r[static_cast<std::size_t>(dr)];
    const std::size_t shift = static_cast<std::size_t>(dr - db);
    for (int k = 0; k <= dr; ++k) r[static_cast<std::size_t>(k)] *= lb;
    for (int k = 0; k <= db; ++k) {
      r[shift + static_cast<std::size_t>(k)] -= lr * b.coeffs()[static_cast<std::size_t>(k)];
    }
    --e;
    // the top coefficient is now zero; find the new degree
    --dr;
    while (dr >= 0 && r[static_cast<std::size_t>(dr)] == 0) --dr;
  }
  r.resize(static_cast<std::size_t>(dr + 1));
  const mpz_class scale = ipow(lb, static_cast<unsigned long>(e));
  for (auto& v : r) v *= scale;
  return IntPoly(std::move(r));
}

/// Resultant by the subresultant polynomial remainder sequence.
inline mpz_class resultant(IntPoly a, IntPoly b) {
  if (a.is_zero() || b.is_zero()) throw ZeroPolynomial();
  if (a.degree() == 0 && b.degree() == 0) return 1;
  if (b.degree() == 0) return ipow(b.leading(), static_cast<unsigned long>(a.degree()));
  if (a.degree() == 0) return ipow(a.leading(), static_cast<unsigned long>(b.degree()));

  int s = 1;
  if (a.degree() < b.degree()) {
    std::swap(a, b);
    if ((a.degree() % 2 == 1) && (b.degree() % 2 == 1)) s = -1;
  }
  const mpz_class ca = content(a);
  const mpz_class cb = content(b);
  a = exact_quotient(a, ca);
  b = exact_quotient(b, cb);
  const mpz_class t = ipow(ca, static_cast<unsigned long>(b.degree())) *
                      ipow(cb, static_cast<unsigned long>(a.degree()));
  mpz_class g = 1;
  mpz_class h = 1;
  while (true) {
    const int delta = a.degree() - b.degree();
    if ((a.degree() % 2 == 1) && (b.degree() % 2 == 1)) s = -s;
    IntPoly r = pseudo_remainder(a, b);
    if (r.is_zero()) return 0;
    a = std::move(b);
    b = exact_quotient(r, g * ipow(h, static_cast<unsigned long>(delta)));
    g = a.leading();
    // h = g^delta / h^(delta - 1), exact
    if (delta > 0) {
      h = divexact(ipow(g, static_cast<unsigned long>(delta)),
                   ipow(h, static_cast<unsigned long>(delta - 1)));
    }
    if (b.degree() == 0) {
      const int da = a.degree();
      h = divexact(ipow(b.leading(), static_cast<unsigned long>(da)),
                   ipow(h, static_cast<unsigned long>(da - 1)));
      return s * t * h;
    }
  }
}

/// disc(P) = (-1)^(d(d-1)/2) * Res(P, P') / lc(P).
inline mpz_class discriminant(const IntPoly& p) {
  const int d = p.degree();
  if (d < 2) throw DegreeTooSmall(d);
  mpz_class r = divexact(resultant(p, derivative(p)), p.leading());
  if ((static_cast<long>(d) * (d - 1) / 2) % 2 == 1) r = -r;
  return r;
}

// ---------------------------------------------------------------------------
// Sturm sequences

/// A point of the extended real line.
class ExtendedReal {
 public:
  enum class Kind { NegInf, Finite, PosInf };

  static ExtendedReal neg_inf() { return ExtendedReal(Kind::NegInf, 0); }
  static ExtendedReal pos_inf() { return ExtendedReal(Kind::PosInf, 0); }
  static ExtendedReal finite(const mpq_class& v) { return ExtendedReal(Kind::Finite, v); }
  static ExtendedReal finite(long v) { return ExtendedReal(Kind::Finite, mpq_class(v)); }

  Kind kind() const { return kind_; }
  const mpq_class& value() const { return value_; }

  friend bool operator<(const ExtendedReal& a, const ExtendedReal& b) {
    if (a.kind_ != b.kind_) return a.kind_ < b.kind_;
    return a.kind_ == Kind::Finite && a.value_ < b.value_;
  }

 private:
  ExtendedReal(Kind k, mpq_class v) : kind_(k), value_(std::move(v)) {
    value_.canonicalize();
  }
  Kind kind_;
  mpq_class value_;
};

/// Sturm chain with primitive pseudo-remainders. Signs match the classical
/// chain S_{i+1} = -rem(S_{i-1}, S_i) up to positive factors.
inline std::vector<IntPoly> sturm_chain(const IntPoly& p) {
  std::vector<IntPoly> chain;
  if (p.is_zero()) throw ZeroPolynomial();
  chain.push_back(primitive_part(p));
  if (p.degree() == 0) return chain;
  chain.push_back(primitive_part(derivative(p)));
  while (chain.back().degree() > 0) {
    const IntPoly& prev = chain[chain.size() - 2];
    const IntPoly& cur = chain.back();
    IntPoly r = pseudo_remainder(prev, cur);
    if (r.is_zero()) break;
    const int delta = prev.degree() - cur.degree();
    // prem = lc^(delta+1) * rem, so sign(rem) = sign(prem) * sign(lc)^(delta+1)
    const bool flip = sgn(cur.leading()) < 0 && ((delta + 1) % 2 == 1);
    IntPoly next = primitive_part(r);
    chain.push_back(flip ? next : mpz_class(-1) * next);
  }
  return chain;
}

namespace detail {

inline int sign_at(const IntPoly& p, const ExtendedReal& x) {
  switch (x.kind()) {
    case ExtendedReal::Kind::PosInf:
      return sgn(p.leading());
    case ExtendedReal::Kind::NegInf:
      return (p.degree() % 2 == 0) ? sgn(p.leading()) : -sgn(p.leading());
    case ExtendedReal::Kind::Finite:
      break;
  }
  return sign_at_rational(p, x.value());
}

inline int sign_variations(const std::vector<IntPoly>& chain, const ExtendedReal& x) {
  int variations = 0;
  int last = 0;
  for (const auto& s : chain) {
    const int v = sign_at(s, x);
    if (v == 0) continue;
    if (last != 0 && v != last) ++variations;
    last = v;
  }
  return variations;
}

}  // namespace detail

/// Number of distinct real roots of a squarefree P in the open interval
/// (lo, hi). Finite endpoints must not be roots.
inline int sturm_count(const IntPoly& p, const ExtendedReal& lo, const ExtendedReal& hi) {
  if (!(lo < hi)) throw InvalidArgument("sturm_count: empty interval");
  if (p.is_zero()) throw ZeroPolynomial();
  if (p.degree() == 0) return 0;
  const auto chain = sturm_chain(p);
  if (chain.back().degree() > 0) throw NotSquarefree();
  for (const auto* end : {&lo, &hi}) {
    if (end->kind() == ExtendedReal::Kind::Finite && detail::sign_at(p, *end) == 0) {
      throw InvalidArgument("sturm_count: endpoint is a root");
    }
  }
  return detail::sign_variations(chain, lo) - detail::sign_variations(chain, hi);
}

inline int real_root_count(const IntPoly& p) {
  return sturm_count(p, ExtendedReal::neg_inf(), ExtendedReal::pos_inf());
}

// ---------------------------------------------------------------------------
// Polynomials over F_p

class ModPoly {
 public:
  ModPoly(std::vector<std::uint64_t> coeffs, std::uint64_t p) : c_(std::move(coeffs)), p_(p) {
    if (p < 2) throw InvalidArgument("modulus must be at least 2");
    for (auto& v : c_) v %= p_;
    trim();
  }
  static ModPoly x(std::uint64_t p) { return ModPoly({0, 1}, p); }

  std::uint64_t modulus() const { return p_; }
  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  std::uint64_t leading() const { return c_.back(); }
  std::uint64_t operator[](std::size_t k) const { return k < c_.size() ? c_[k] : 0; }
  std::span<const std::uint64_t> coeffs() const { return c_; }

  friend bool operator==(const ModPoly& a, const ModPoly& b) {
    return a.p_ == b.p_ && a.c_ == b.c_;
  }

  std::string to_string() const {
    if (c_.empty()) return "0";
    std::string out;
    for (int k = degree(); k >= 0; --k) {
      const std::uint64_t v = c_[static_cast<std::size_t>(k)];
      if (v == 0) continue;
      if (!out.empty()) out += " + ";
      if (v != 1 || k == 0) out += std::to_string(v);
      if (k > 0) {
        if (v != 1) out += "*";
        out += "x";
        if (k > 1) out += "^" + std::to_string(k);
      }
    }
    return out;
  }

 private:
  friend struct ModPolyOps;
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<std::uint64_t> c_;
  std::uint64_t p_;
};

struct ModPolyOps {
  static ModPoly sub(const ModPoly& a, const ModPoly& b) {
    const std::uint64_t p = a.p_;
    std::vector<std::uint64_t> c(std::max(a.c_.size(), b.c_.size()), 0);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = (a[k] + p - b[k]) % p;
    return ModPoly(std::move(c), p);
  }

  static ModPoly mul(const ModPoly& a, const ModPoly& b) {
    if (a.is_zero() || b.is_zero()) return ModPoly({}, a.p_);
    const std::uint64_t p = a.p_;
    std::vector<std::uint64_t> c(a.c_.size() + b.c_.size() - 1, 0);
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      for (std::size_t j = 0; j < b.c_.size(); ++j) {
        c[i + j] = (c[i + j] + mulmod(a.c_[i], b.c_[j], p)) % p;
      }
    }
    return ModPoly(std::move(c), p);
  }

  // (quotient, remainder)
  static std::pair<ModPoly, ModPoly> divmod(const ModPoly& a, const ModPoly& b) {
    if (b.is_zero()) throw ZeroPolynomial();
    const std::uint64_t p = a.p_;
    if (a.degree() < b.degree()) return {ModPoly({}, p), a};
    std::vector<std::uint64_t> r(a.c_);
    std::vector<std::uint64_t> q(static_cast<std::size_t>(a.degree() - b.degree() + 1), 0);
    const std::uint64_t inv = invmod_prime(b.leading(), p);
    const int db = b.degree();
    for (int k = a.degree(); k >= db; --k) {
      const std::uint64_t coef = mulmod(r[static_cast<std::size_t>(k)], inv, p);
      if (coef == 0) continue;
      const std::size_t shift = static_cast<std::size_t>(k - db);
      q[shift] = coef;
      for (int j = 0; j <= db; ++j) {
        auto& slot = r[shift + static_cast<std::size_t>(j)];
        slot = (slot + p - mulmod(coef, b.c_[static_cast<std::size_t>(j)], p)) % p;
      }
    }
    return {ModPoly(std::move(q), p), ModPoly(std::move(r), p)};
  }

  static ModPoly rem(const ModPoly& a, const ModPoly& b) { return divmod(a, b).second; }

  static ModPoly monic(const ModPoly& a) {
    if (a.is_zero()) return a;
    const std::uint64_t inv = invmod_prime(a.leading(), a.p_);
    std::vector<std::uint64_t> c(a.c_);
    for (auto& v : c) v = mulmod(v, inv, a.p_);
    return ModPoly(std::move(c), a.p_);
  }

  // Monic gcd (zero if both are zero).
  static ModPoly gcd(ModPoly a, ModPoly b) {
    while (!b.is_zero()) {
      ModPoly r = rem(a, b);
      a = std::move(b);
      b = std::move(r);
    }
    return monic(a);
  }

  static ModPoly derivative(const ModPoly& a) {
    if (a.degree() < 1) return ModPoly({}, a.p_);
    std::vector<std::uint64_t> c(static_cast<std::size_t>(a.degree()));
    for (std::size_t k = 1; k < a.c_.size(); ++k) {
      c[k - 1] = mulmod(a.c_[k], k % a.p_, a.p_);
    }
    return ModPoly(std::move(c), a.p_);
  }

  // base^e mod m
  static ModPoly powmod(ModPoly base, std::uint64_t e, const ModPoly& m) {
    ModPoly result = rem(ModPoly({1}, m.p_), m);
    base = rem(base, m);
    while (e != 0) {
      if (e & 1U) result = rem(mul(result, base), m);
      e >>= 1U;
      if (e != 0) base = rem(mul(base, base), m);
    }
    return result;
  }
};

/// Coefficientwise reduction; the degree drops when p divides lc(P).
inline ModPoly reduce_mod(const IntPoly& p, std::uint64_t prime) {
  std::vector<std::uint64_t> c;
  c.reserve(p.coeffs().size());
  for (const auto& v : p.coeffs()) c.push_back(mod_u64(v, prime));
  return ModPoly(std::move(c), prime);
}

/// Irreducible-factor degree multiset of P mod p, in descending order,
/// via distinct-degree factorization.
inline std::vector<int> degree_multiset_mod_p(const IntPoly& poly, std::uint64_t p) {
  ModPoly f = reduce_mod(poly, p);
  if (f.degree() != poly.degree() || f.is_zero()) throw DegreeDropModP(p);
  f = ModPolyOps::monic(f);
  std::vector<int> degrees;
  if (f.degree() <= 0) return degrees;
  if (ModPolyOps::gcd(f, ModPolyOps::derivative(f)).degree() > 0) {
    throw NotSeparableModP(p);
  }
  const ModPoly x = ModPoly::x(p);
  ModPoly rest = f;
  ModPoly h = ModPolyOps::rem(x, rest);
  for (int d = 1; rest.degree() >= 2 * d; ++d) {
    h = ModPolyOps::powmod(h, p, rest);  // x^(p^d) mod rest
    const ModPoly g = ModPolyOps::gcd(rest, ModPolyOps::sub(h, x));
    if (g.degree() > 0) {
      for (int k = 0; k < g.degree() / d; ++k) degrees.push_back(d);
      rest = ModPolyOps::divmod(rest, g).first;
      h = ModPolyOps::rem(h, rest);
    }
  }
  if (rest.degree() > 0) degrees.push_back(rest.degree());
  std::sort(degrees.begin(), degrees.end(), std::greater<>());
  return degrees;
}

namespace detail {

// Splits a squarefree monic product of distinct linear factors over F_p
// (p odd) into its roots.
inline void split_linear(const ModPoly& g, std::vector<std::uint64_t>& roots) {
  const std::uint64_t p = g.modulus();
  if (g.degree() <= 0) return;
  if (g.degree() == 1) {
    roots.push_back((p - g[0]) % p);
    return;
  }
  const ModPoly one({1}, p);
  for (std::uint64_t a = 0; a < p; ++a) {
    const ModPoly shifted({a, 1}, p);
    const ModPoly t = ModPolyOps::sub(ModPolyOps::powmod(shifted, (p - 1) / 2, g), one);
    const ModPoly h = ModPolyOps::gcd(g, t);
    if (h.degree() > 0 && h.degree() < g.degree()) {
      split_linear(h, roots);
      split_linear(ModPolyOps::divmod(g, h).first, roots);
      return;
    }
  }
}

}  // namespace detail

/// All x in [0, p) with P(x) = 0 mod p, ascending.
inline std::vector<std::uint64_t> roots_mod_p(const IntPoly& poly, std::uint64_t p) {
  const ModPoly f = reduce_mod(poly, p);
  std::vector<std::uint64_t> roots;
  if (f.is_zero()) {
    roots.resize(p);
    for (std::uint64_t k = 0; k < p; ++k) roots[k] = k;
    return roots;
  }
  if (f.degree() == 0) return roots;
  if (p == 2) {
    for (std::uint64_t v : {0ULL, 1ULL}) {
      std::uint64_t acc = 0;
      for (int k = f.degree(); k >= 0; --k) acc = (acc * v + f[static_cast<std::size_t>(k)]) % 2;
      if (acc == 0) roots.push_back(v);
    }
    return roots;
  }
  const ModPoly monic = ModPolyOps::monic(f);
  const ModPoly x = ModPoly::x(p);
  const ModPoly xp = ModPolyOps::powmod(x, p, monic);
  const ModPoly g = ModPolyOps::gcd(monic, ModPolyOps::sub(xp, x));
  detail::split_linear(g, roots);
  std::sort(roots.begin(), roots.end());
  return roots;
}

/// True when P mod p has deg(P) distinct roots in F_p.
inline bool splits_completely_mod_p(const IntPoly& poly, std::uint64_t p) {
  const ModPoly f = reduce_mod(poly, p);
  if (f.degree() != poly.degree() || f.degree() < 1) return false;
  const ModPoly monic = ModPolyOps::monic(f);
  const ModPoly x = ModPoly::x(p);
  const ModPoly g = ModPolyOps::gcd(monic, ModPolyOps::sub(ModPolyOps::powmod(x, p, monic), x));
  return g.degree() == f.degree();
}

}  // namespace anforge

#endif  // ANFORGE_INTPOLY_HPP_
