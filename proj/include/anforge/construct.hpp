#ifndef ANFORGE_CONSTRUCT_HPP_
#define ANFORGE_CONSTRUCT_HPP_

// The polynomial family P_b(x) = b + integral_0^x Q(t) dt with
//   Q(x) = (n x - u l) * prod_{i>=2} (x - A_i l),
// whose discriminant splits into linear forms in b:
//   disc(P_b) = (-1)^{n(n-1)/2} * F_1 * F_2 * ... * F_{n-1},
//   F_1 = T1 l^n + n^n b,   F_i = B_i l^n + b.
// A Shape holds the data fixed before the scaling prime l and b are chosen.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "anforge/arith.hpp"
#include "anforge/error.hpp"
#include "anforge/factor.hpp"
#include "anforge/intpoly.hpp"

namespace anforge {

class Shape;
Shape build_shape(int n, const mpz_class& u, std::vector<mpz_class> a);

class Shape {
 public:
  int degree() const { return n_; }
  const mpz_class& u() const { return u_; }
  /// A_2 .. A_{n-1}
  const std::vector<mpz_class>& a() const { return a_; }
  /// (n x - u) * prod (x - A_i)
  const IntPoly& q_shape() const { return q_shape_; }
  /// antiderivative of q_shape vanishing at 0; monic of degree n
  const IntPoly& p0_shape() const { return p0_shape_; }
  /// B_i = P0shape(A_i) for i = 2 .. n-1
  const std::vector<mpz_class>& critical_values() const { return b_; }
  /// n^n * P0shape(u/n), an integer
  const mpz_class& t1() const { return t1_; }
  const mpz_class& n_pow_n() const { return n_pow_n_; }

 private:
  friend Shape build_shape(int n, const mpz_class& u, std::vector<mpz_class> a);
  Shape() = default;

  int n_ = 0;
  mpz_class u_;
  std::vector<mpz_class> a_;
  IntPoly q_shape_;
  IntPoly p0_shape_;
  std::vector<mpz_class> b_;
  mpz_class t1_;
  mpz_class n_pow_n_;
};

/// Primes p < n that do not divide n.
inline std::vector<std::uint64_t> small_primes_not_dividing(int n) {
  std::vector<std::uint64_t> out;
  for (std::uint64_t p : primes_up_to(static_cast<std::uint64_t>(n - 1))) {
    if (static_cast<std::uint64_t>(n) % p != 0) out.push_back(p);
  }
  return out;
}

/// Validates the integrality conditions and precomputes B_i and T1.
inline Shape build_shape(int n, const mpz_class& u, std::vector<mpz_class> a) {
  if (n < 3) throw InvalidArgument("degree must be at least 3");
  if (a.size() != static_cast<std::size_t>(n - 2)) {
    throw InvalidArgument("expected " + std::to_string(n - 2) + " critical points A_i");
  }
  const mpz_class nz = n;
  if (gcd(u, nz) != 1) throw IntegralityViolation("gcd(u, n) != 1");
  if (!divides(nz - 1, u)) throw IntegralityViolation("n - 1 does not divide u");
  for (std::uint64_t p : small_primes_not_dividing(n)) {
    if (!divides(from_u64(p), u)) {
      throw IntegralityViolation("prime " + std::to_string(p) + " < n does not divide u");
    }
  }
  const mpz_class fact = factorial(n);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!divides(fact, a[i])) {
      throw IntegralityViolation("n! does not divide A_" + std::to_string(i + 2));
    }
  }
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (nz * a[i] == u) throw DegenerateShape("A_" + std::to_string(i + 2) + " equals u/n");
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      if (a[i] == a[j]) {
        throw DegenerateShape("A_" + std::to_string(i + 2) + " = A_" + std::to_string(j + 2));
      }
    }
  }

  Shape s;
  s.n_ = n;
  s.u_ = u;
  s.a_ = std::move(a);
  IntPoly q = IntPoly::linear(nz, -u);
  for (const auto& ai : s.a_) q = q * IntPoly::linear(1, -ai);
  // Q = (n x - u) x^{n-2} mod n!
  const IntPoly reduced_target = IntPoly::linear(nz, -u) * IntPoly::monomial(1, static_cast<std::size_t>(n - 2));
  for (int k = 0; k < n; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    if (!divides(fact, q.coeff(kk) - reduced_target.coeff(kk))) {
      throw IntegralityViolation("Q is not (n x - u) x^(n-2) mod n!");
    }
  }
  try {
    s.p0_shape_ = antiderivative_from_zero(q);
  } catch (const NonIntegralAntiderivative& e) {
    throw IntegralityViolation(e.what());
  }
  s.q_shape_ = std::move(q);
  for (const auto& ai : s.a_) s.b_.push_back(eval(s.p0_shape_, ai));
  s.t1_ = eval_homogeneous(s.p0_shape_, u, nz);
  s.n_pow_n_ = ipow(nz, static_cast<unsigned long>(n));
  return s;
}

/// A u step that always satisfies the divisibility conditions:
/// (n - 1) * prod{p < n, p does not divide n}. Not minimal in general (n = 5 allows 12).
inline mpz_class u_base(int n) {
  mpz_class base = n - 1;
  for (std::uint64_t p : small_primes_not_dividing(n)) base *= from_u64(p);
  return base;
}

/// A random valid shape with small entries: u = k * u_base(n) coprime to n,
/// A_i = n! * k_i with distinct k_i in [-spread, spread].
inline Shape random_small_shape(int n, std::mt19937_64& rng, long spread = 5) {
  if (n < 3) throw InvalidArgument("degree must be at least 3");
  if (2 * spread + 1 < n - 2) throw InvalidArgument("spread too small for distinct A_i");
  const mpz_class base = u_base(n);
  const mpz_class fact = factorial(n);
  mpz_class u;
  do {
    long k = uniform_in(rng, 1, spread);
    if (uniform_below(rng, 2) == 1) k = -k;
    u = base * k;
  } while (gcd(u, mpz_class(n)) != 1);
  std::vector<long> ks;
  while (ks.size() < static_cast<std::size_t>(n - 2)) {
    const long k = uniform_in(rng, -spread, spread);
    if (std::find(ks.begin(), ks.end(), k) == ks.end()) ks.push_back(k);
  }
  std::vector<mpz_class> a;
  for (long k : ks) a.push_back(fact * k);
  return build_shape(n, u, std::move(a));
}

/// The discriminant factors as linear forms in b: F_i(b) = slope * b + offset.
struct LinearForm {
  mpz_class slope;
  mpz_class offset;

  mpz_class at(const mpz_class& b) const { return slope * b + offset; }
  /// the b where the form vanishes
  mpq_class root() const {
    mpq_class r(-offset, slope);
    r.canonicalize();
    return r;
  }
};

/// Forms F_1 .. F_{n-1} for scaling ell (1 for raw instances).
inline std::vector<LinearForm> discriminant_forms(const Shape& shape, const mpz_class& ell) {
  const mpz_class scale = ipow(ell, static_cast<unsigned long>(shape.degree()));
  std::vector<LinearForm> forms;
  forms.push_back({shape.n_pow_n(), shape.t1() * scale});
  for (const auto& bi : shape.critical_values()) forms.push_back({1, bi * scale});
  return forms;
}

inline int discriminant_sign(int n) {
  return ((static_cast<long>(n) * (n - 1) / 2) % 2 == 0) ? 1 : -1;
}

/// A shape specialized at (ell, b).
class Instance {
 public:
  const Shape& shape() const { return shape_; }
  /// nullopt for raw test instances (scaling 1)
  const std::optional<mpz_class>& ell() const { return ell_; }
  mpz_class scale() const { return ell_.value_or(mpz_class(1)); }
  const mpz_class& b() const { return b_; }
  const IntPoly& pb() const { return pb_; }
  /// F_1 .. F_{n-1}
  const std::vector<mpz_class>& factors() const { return f_; }

  /// Critical points of P_b: a_1 = u l / n (as numerator u l) and a_i = A_i l.
  mpz_class first_critical_numerator() const { return shape_.u() * scale(); }
  std::vector<mpz_class> integer_critical_points() const {
    std::vector<mpz_class> out;
    for (const auto& ai : shape_.a()) out.push_back(ai * scale());
    return out;
  }

 private:
  friend Instance instantiate(const Shape& shape, const std::optional<mpz_class>& ell,
                              const mpz_class& b);
  Instance(Shape shape, std::optional<mpz_class> ell, mpz_class b)
      : shape_(std::move(shape)), ell_(std::move(ell)), b_(std::move(b)) {}

  Shape shape_;
  std::optional<mpz_class> ell_;
  mpz_class b_;
  IntPoly pb_;
  std::vector<mpz_class> f_;
};

/// P_b for the scaled critical points, without any validity checks.
inline IntPoly scaled_polynomial(const Shape& shape, const mpz_class& ell, const mpz_class& b) {
  const int n = shape.degree();
  std::vector<mpz_class> c(static_cast<std::size_t>(n + 1));
  mpz_class power = 1;  // ell^(n-k), built from k = n downwards
  for (int k = n; k >= 1; --k) {
    c[static_cast<std::size_t>(k)] = shape.p0_shape().coeff(static_cast<std::size_t>(k)) * power;
    power *= ell;
  }
  c[0] = b;
  return IntPoly(std::move(c));
}

inline Instance instantiate(const Shape& shape, const std::optional<mpz_class>& ell,
                            const mpz_class& b) {
  const int n = shape.degree();
  if (ell) {
    if (*ell <= n || !is_probable_prime(*ell)) {
      throw InvalidArgument("ell must be a prime larger than n");
    }
  }
  Instance inst(shape, ell, b);
  const mpz_class scale = inst.scale();
  const auto forms = discriminant_forms(shape, scale);
  for (std::size_t i = 0; i < forms.size(); ++i) {
    inst.f_.push_back(forms[i].at(b));
    if (inst.f_.back() == 0) throw ZeroFactor(static_cast<int>(i + 1));
  }
  if (gcd(b, factorial(n)) != 1) throw BNotCoprime();
  inst.pb_ = scaled_polynomial(shape, scale, b);
  return inst;
}

struct FactoredDiscriminant {
  int sign = 1;
  std::vector<mpz_class> factors;
  mpz_class value;
};

inline FactoredDiscriminant discriminant_factored(const Instance& inst) {
  FactoredDiscriminant d;
  d.sign = discriminant_sign(inst.shape().degree());
  d.factors = inst.factors();
  d.value = d.sign;
  for (const auto& f : d.factors) d.value *= f;
  return d;
}

struct CoprimalityReport {
  bool pass = true;
  std::optional<std::uint64_t> offending_prime;
};

/// gcd(Delta, lcm(1..n)) = 1, naming the smallest prime that breaks it.
inline CoprimalityReport small_prime_coprimality_check(int n, const mpz_class& delta) {
  CoprimalityReport report;
  for (std::uint64_t p : primes_up_to(static_cast<std::uint64_t>(n))) {
    if (mpz_divisible_ui_p(delta.get_mpz_t(), p) != 0) {
      report.pass = false;
      report.offending_prime = p;
      return report;
    }
  }
  return report;
}

inline CoprimalityReport small_prime_coprimality_check(const Instance& inst) {
  return small_prime_coprimality_check(inst.shape().degree(), discriminant_factored(inst).value);
}

}  // namespace anforge

#endif  // ANFORGE_CONSTRUCT_HPP_
