#ifndef ANFORGE_CERTIFICATE_HPP_
#define ANFORGE_CERTIFICATE_HPP_

// Self-contained certificates and their verifier.
//
// The verifier works from the embedded data alone and only uses polynomial
// and integer primitives: the discriminant comes from a resultant, never
// from the linear forms the construction uses.

#include <gmpxx.h>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "anforge/arith.hpp"
#include "anforge/error.hpp"
#include "anforge/factor.hpp"
#include "anforge/intpoly.hpp"

namespace anforge {

inline constexpr int kCertificateSchema = 1;
inline constexpr int kMinimumMillerRabinRounds = 20;

struct CertWitness {
  std::uint64_t prime = 0;
  std::vector<int> cycle_type;  // descending
};

struct ReferenceWitness {
  std::uint64_t prime = 0;
  std::vector<std::uint64_t> roots;  // roots of R' mod prime, ascending
  std::uint64_t r0 = 0;              // R(0) mod prime
};

struct Certificate {
  int schema = kCertificateSchema;
  int n = 0;
  int r = 0;
  std::vector<std::uint64_t> avoid;

  IntPoly pb;
  mpz_class ell;
  mpz_class b;
  mpz_class u;
  std::vector<mpz_class> a;  // A_2 .. A_{n-1}

  int discriminant_sign = 1;
  std::vector<mpz_class> factors;  // F_1 .. F_{n-1}
  mpz_class discriminant;
  SquarefreeProof squarefree;

  std::vector<CertWitness> galois;
  std::string galois_group = "S_n";

  int real_roots = 0;
  int complex_pairs = 0;
  std::string quadratic_field;  // "real" or "imaginary"

  IntPoly reference;
  std::vector<ReferenceWitness> reference_witnesses;

  std::uint64_t seed = 0;
  std::uint64_t reference_seed = 0;
};

// ---------------------------------------------------------------------------
// JSON

namespace detail {

using nlohmann::json;

inline std::string dec(const mpz_class& v) { return v.get_str(); }
inline std::string dec(std::uint64_t v) { return std::to_string(v); }
inline std::string dec(int v) { return std::to_string(v); }

inline json dec_array(std::span<const mpz_class> values) {
  json out = json::array();
  for (const auto& v : values) out.push_back(dec(v));
  return out;
}

template <typename T>
json dec_array(const std::vector<T>& values) {
  json out = json::array();
  for (const auto& v : values) out.push_back(dec(v));
  return out;
}

inline const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw CertificateFormatError(std::string("missing field '") + key + "'");
  return j.at(key);
}

inline const std::string& text(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_string()) throw CertificateFormatError(std::string("field '") + key + "' must be a string");
  return v.get_ref<const std::string&>();
}

inline mpz_class parse_mpz(const json& v, const char* key) {
  if (!v.is_string()) throw CertificateFormatError(std::string("field '") + key + "' must hold decimal strings");
  try {
    return parse_integer(v.get<std::string>());
  } catch (const InvalidArgument&) {
    throw CertificateFormatError(std::string("field '") + key + "' is not a decimal integer");
  }
}

inline mpz_class big(const json& j, const char* key) { return parse_mpz(field(j, key), key); }

inline std::uint64_t u64(const json& v, const char* key) {
  const mpz_class m = parse_mpz(v, key);
  if (m < 0 || !mpz_fits_ulong_p(m.get_mpz_t())) throw CertificateFormatError(std::string("field '") + key + "' out of range");
  return m.get_ui();
}

inline int small_int(const json& v, const char* key) {
  const mpz_class m = parse_mpz(v, key);
  if (!mpz_fits_sint_p(m.get_mpz_t())) throw CertificateFormatError(std::string("field '") + key + "' out of range");
  return static_cast<int>(m.get_si());
}

inline const json& array(const json& j, const char* key) {
  const json& v = field(j, key);
  if (!v.is_array()) throw CertificateFormatError(std::string("field '") + key + "' must be an array");
  return v;
}

inline std::vector<mpz_class> big_array(const json& j, const char* key) {
  std::vector<mpz_class> out;
  for (const auto& v : array(j, key)) out.push_back(parse_mpz(v, key));
  return out;
}

template <typename T, typename Parse>
std::vector<T> parse_array(const json& j, const char* key, Parse parse) {
  std::vector<T> out;
  for (const auto& v : array(j, key)) out.push_back(parse(v, key));
  return out;
}

inline std::uint64_t fnv1a(const std::string& bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

inline std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex;
  os.width(16);
  os.fill('0');
  os << v;
  return os.str();
}

}  // namespace detail

/// FNV-1a over the compact dump of everything except the digest itself.
inline std::string content_digest(nlohmann::json doc) {
  doc.erase("digest");
  return "fnv1a64:" + detail::hex64(detail::fnv1a(doc.dump()));
}

inline nlohmann::json to_json(const Certificate& c) {
  using detail::dec;
  using detail::dec_array;
  using nlohmann::json;
  json j;
  j["anforge_cert"] = c.schema;
  j["n"] = dec(c.n);
  j["r"] = dec(c.r);
  j["avoid"] = dec_array(c.avoid);
  j["polynomial"] = dec_array(c.pb.coeffs());
  j["construction"] = {{"ell", dec(c.ell)}, {"b", dec(c.b)}, {"u", dec(c.u)}, {"a", dec_array(c.a)}};

  json proof = json::array();
  for (const auto& f : c.squarefree.factors) {
    json primes = json::array();
    for (const auto& p : f.primes) {
      const bool det = p.tag.kind == PrimalityTag::Kind::DeterministicSmall;
      primes.push_back({{"p", dec(p.prime)},
                        {"primality", det ? "deterministic" : "probabilistic"},
                        {"rounds", dec(p.tag.rounds)}});
    }
    proof.push_back({{"value", dec(f.value)}, {"primes", primes}});
  }
  j["discriminant"] = {{"sign", dec(c.discriminant_sign)},
                       {"factors", dec_array(c.factors)},
                       {"value", dec(c.discriminant)},
                       {"squarefree_proof", proof}};

  json witnesses = json::array();
  for (const auto& w : c.galois) witnesses.push_back({{"prime", dec(w.prime)}, {"cycle_type", dec_array(w.cycle_type)}});
  j["galois"] = {{"group", c.galois_group}, {"witnesses", witnesses}};

  j["signature"] = {{"real_roots", dec(c.real_roots)}, {"complex_pairs", dec(c.complex_pairs)}};
  j["quadratic_field"] = {{"type", c.quadratic_field}, {"discriminant", dec(c.discriminant)}};

  json ref_w = json::array();
  for (const auto& w : c.reference_witnesses) {
    ref_w.push_back({{"prime", dec(w.prime)}, {"derivative_roots", dec_array(w.roots)}, {"constant", dec(w.r0)}});
  }
  j["reference"] = {{"polynomial", dec_array(c.reference.coeffs())}, {"witness_primes", ref_w}};
  j["seed"] = {{"pipeline", dec(c.seed)}, {"reference", dec(c.reference_seed)}};
  j["digest"] = content_digest(j);
  return j;
}

inline std::string to_text(const Certificate& c) { return to_json(c).dump(2) + "\n"; }

/// Structural parse only: every semantic check lives in verify().
inline Certificate certificate_from_json(const nlohmann::json& j) {
  using namespace detail;
  Certificate c;
  const json& schema = field(j, "anforge_cert");
  if (!schema.is_number_integer()) throw CertificateFormatError("'anforge_cert' must be an integer");
  c.schema = schema.get<int>();
  c.n = small_int(field(j, "n"), "n");
  c.r = small_int(field(j, "r"), "r");
  c.avoid = parse_array<std::uint64_t>(j, "avoid", u64);
  c.pb = IntPoly(big_array(j, "polynomial"));
  const json& cons = field(j, "construction");
  c.ell = big(cons, "ell");
  c.b = big(cons, "b");
  c.u = big(cons, "u");
  c.a = big_array(cons, "a");

  const json& disc = field(j, "discriminant");
  c.discriminant_sign = small_int(field(disc, "sign"), "sign");
  c.factors = big_array(disc, "factors");
  c.discriminant = big(disc, "value");
  for (const auto& f : array(disc, "squarefree_proof")) {
    FactorProof fp{big(f, "value"), {}};
    for (const auto& p : array(f, "primes")) {
      const std::string& kind = text(p, "primality");
      PrimalityTag tag;
      if (kind == "deterministic") {
        tag.kind = PrimalityTag::Kind::DeterministicSmall;
      } else if (kind == "probabilistic") {
        tag.kind = PrimalityTag::Kind::Probabilistic;
      } else {
        throw CertificateFormatError("unknown primality kind '" + kind + "'");
      }
      tag.rounds = small_int(field(p, "rounds"), "rounds");
      fp.primes.push_back({big(p, "p"), tag});
    }
    c.squarefree.factors.push_back(std::move(fp));
  }

  const json& gal = field(j, "galois");
  c.galois_group = text(gal, "group");
  for (const auto& w : array(gal, "witnesses")) {
    c.galois.push_back({u64(field(w, "prime"), "prime"), parse_array<int>(w, "cycle_type", small_int)});
  }
  const json& sig = field(j, "signature");
  c.real_roots = small_int(field(sig, "real_roots"), "real_roots");
  c.complex_pairs = small_int(field(sig, "complex_pairs"), "complex_pairs");
  const json& quad = field(j, "quadratic_field");
  c.quadratic_field = text(quad, "type");
  if (big(quad, "discriminant") != c.discriminant) {
    throw CertificateFormatError("quadratic field discriminant differs from the polynomial discriminant");
  }

  const json& ref = field(j, "reference");
  c.reference = IntPoly(big_array(ref, "polynomial"));
  for (const auto& w : array(ref, "witness_primes")) {
    c.reference_witnesses.push_back({u64(field(w, "prime"), "prime"),
                                     parse_array<std::uint64_t>(w, "derivative_roots", u64),
                                     u64(field(w, "constant"), "constant")});
  }
  const json& seed = field(j, "seed");
  c.seed = u64(field(seed, "pipeline"), "pipeline");
  c.reference_seed = u64(field(seed, "reference"), "reference");
  return c;
}

inline Certificate parse_certificate(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw CertificateFormatError(std::string("not JSON: ") + e.what());
  }
  return certificate_from_json(j);
}

// ---------------------------------------------------------------------------
// Verification

struct VerifyIssue {
  std::string check;
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyIssue> issues;
  bool accepted() const { return issues.empty(); }
  std::string summary() const {
    if (issues.empty()) return "accept";
    std::string s = "reject:";
    for (const auto& i : issues) s += " [" + i.check + "] " + i.detail + ";";
    return s;
  }
};

namespace detail {

inline bool same_cycle_type(std::vector<int> a, std::vector<int> b) {
  std::sort(a.begin(), a.end(), std::greater<>());
  std::sort(b.begin(), b.end(), std::greater<>());
  return a == b;
}

/// b + integral from 0 of (n x - u l) prod (x - A_i l), or nullopt when the
/// antiderivative is not integral.
inline std::optional<IntPoly> rebuild_polynomial(int n, const mpz_class& u, const std::vector<mpz_class>& a,
                                                 const mpz_class& ell, const mpz_class& b) {
  IntPoly q = IntPoly::linear(n, -u * ell);
  for (const auto& ai : a) q = q * IntPoly::linear(1, -ai * ell);
  try {
    return antiderivative_from_zero(q) + IntPoly::constant(b);
  } catch (const NonIntegralAntiderivative&) {
    return std::nullopt;
  }
}

}  // namespace detail

/// Every check runs; the report lists one issue per failed check.
inline VerifyReport verify(const Certificate& c) {
  VerifyReport report;
  auto fail = [&](std::string check, std::string detail) {
    report.issues.push_back({std::move(check), std::move(detail)});
  };
  const int n = c.n;

  if (c.schema != kCertificateSchema) fail("schema", "unsupported schema " + std::to_string(c.schema));
  if (n < 3 || c.pb.degree() != n || c.pb.leading() != 1) {
    fail("shape", "polynomial must be monic of degree n >= 3");
    return report;  // nothing below is meaningful
  }
  if (c.r < 0 || c.r > n / 2) fail("shape", "r outside 0..n/2");
  if (c.a.size() != static_cast<std::size_t>(n - 2)) fail("shape", "expected n - 2 critical points A_i");
  if (c.ell <= n || !is_probable_prime(c.ell)) fail("shape", "ell must be a prime larger than n");
  if (c.galois_group != "S_n") fail("galois", "unknown group claim '" + c.galois_group + "'");

  // P_b from its construction data
  if (c.a.size() == static_cast<std::size_t>(n - 2)) {
    const auto rebuilt = detail::rebuild_polynomial(n, c.u, c.a, c.ell, c.b);
    if (!rebuilt) {
      fail("construction", "antiderivative is not integral");
    } else if (!(*rebuilt == c.pb)) {
      fail("construction", "polynomial differs from b + integral of (n x - u l) prod (x - A_i l)");
    }
  }

  // discriminant by resultant, then its factorization
  const mpz_class delta = discriminant(c.pb);
  if (delta != c.discriminant) fail("discriminant", "stated value differs from the resultant discriminant");
  if (delta == 0) {
    fail("discriminant", "polynomial is not separable");
    return report;
  }
  const int expected_sign = (static_cast<long>(n) * (n - 1) / 2) % 2 == 0 ? 1 : -1;
  if (c.discriminant_sign != expected_sign) fail("discriminant", "sign must be (-1)^(n(n-1)/2)");
  mpz_class product = c.discriminant_sign;
  for (const auto& f : c.factors) product *= f;
  if (product != delta) fail("discriminant", "sign * prod F_i differs from the discriminant");
  if (c.factors.size() != static_cast<std::size_t>(n - 1)) {
    fail("discriminant", "expected n - 1 factors");
  } else if (c.a.size() == static_cast<std::size_t>(n - 2)) {
    if (c.factors[0] != eval_homogeneous(c.pb, c.u * c.ell, n)) {
      fail("discriminant", "F_1 is not n^n P(u l / n)");
    }
    for (std::size_t i = 0; i < c.a.size(); ++i) {
      if (c.factors[i + 1] != eval(c.pb, c.a[i] * c.ell)) {
        fail("discriminant", "F_" + std::to_string(i + 2) + " is not P(A_" + std::to_string(i + 2) + " l)");
      }
    }
  }

  // squarefree proof
  const auto& sf = c.squarefree.factors;
  if (sf.size() != c.factors.size()) {
    fail("squarefree", "proof covers " + std::to_string(sf.size()) + " factors");
  } else {
    std::set<mpz_class> seen;
    for (std::size_t i = 0; i < sf.size(); ++i) {
      const std::string name = "F_" + std::to_string(i + 1);
      if (sf[i].value != c.factors[i]) fail("squarefree", name + " value differs from the factor list");
      mpz_class prod = 1;
      for (std::size_t k = 0; k < sf[i].primes.size(); ++k) {
        const auto& pp = sf[i].primes[k];
        if (k > 0 && !(sf[i].primes[k - 1].prime < pp.prime)) {
          fail("squarefree", name + " primes are not strictly increasing");
        }
        const bool det = pp.prime < deterministic_mr_limit();
        if (det && (pp.tag.kind != PrimalityTag::Kind::DeterministicSmall || pp.tag.rounds != 0)) {
          fail("squarefree", pp.prime.get_str() + " carries a probabilistic tag below the deterministic range");
        }
        if (!det && (pp.tag.kind != PrimalityTag::Kind::Probabilistic || pp.tag.rounds < kMinimumMillerRabinRounds)) {
          fail("squarefree", pp.prime.get_str() + " needs a probabilistic tag with at least " +
                                 std::to_string(kMinimumMillerRabinRounds) + " rounds");
        }
        if (!is_probable_prime(pp.prime, std::max(pp.tag.rounds, kMinimumMillerRabinRounds))) {
          fail("squarefree", pp.prime.get_str() + " is not prime");
        }
        if (!seen.insert(pp.prime).second) fail("squarefree", pp.prime.get_str() + " appears twice");
        prod *= pp.prime;
      }
      if (prod != abs(sf[i].value)) fail("squarefree", name + " primes do not multiply to |F|");
    }
  }

  if (gcd(delta, lcm_upto(n)) != 1) fail("coprimality", "discriminant shares a factor with lcm(1..n)");
  for (std::uint64_t s : c.avoid) {
    if (!is_probable_prime(from_u64(s))) fail("avoid", std::to_string(s) + " is not prime");
    if (divides(from_u64(s), delta)) fail("avoid", std::to_string(s) + " divides the discriminant");
  }

  // S_n from three Frobenius cycle types
  bool full = false, transposition = false, fixed_point_cycle = false;
  for (const auto& w : c.galois) {
    const std::string where = "p = " + std::to_string(w.prime);
    if (!is_probable_prime(from_u64(w.prime))) {
      fail("galois", where + " is not prime");
      continue;
    }
    std::vector<int> actual;
    try {
      actual = degree_multiset_mod_p(c.pb, w.prime);
    } catch (const Error&) {
      fail("galois", "polynomial is not separable of degree n mod " + std::to_string(w.prime));
      continue;
    }
    if (!detail::same_cycle_type(actual, w.cycle_type)) {
      fail("galois", where + ": stated degrees differ from the factorization mod p");
      continue;
    }
    std::vector<int> t = actual;
    full = full || t == std::vector<int>{n};
    fixed_point_cycle = fixed_point_cycle || t == std::vector<int>{n - 1, 1};
    std::vector<int> tr(static_cast<std::size_t>(n - 1), 1);
    tr[0] = 2;
    transposition = transposition || t == tr;
  }
  if (!full || !transposition || !fixed_point_cycle) {
    std::string missing;
    if (!full) missing += " n-cycle";
    if (!fixed_point_cycle) missing += " (n-1)-cycle";
    if (!transposition) missing += " transposition";
    fail("galois", "insufficient witnesses, missing" + missing);
  }

  // signature by Sturm
  const int real = real_root_count(c.pb);
  if (real != c.real_roots) fail("signature", "Sturm count is " + std::to_string(real));
  if (c.real_roots != n - 2 * c.r || c.complex_pairs != c.r) {
    fail("signature", "stated signature is not (n - 2r, r)");
  }
  if (c.quadratic_field != (delta > 0 ? "real" : "imaginary")) {
    fail("quadratic_field", "type does not match the sign of the discriminant");
  }

  // congruence with the reference polynomial at the witness primes
  if (c.reference.degree() != n || c.reference.leading() != 1) fail("reference", "R must be monic of degree n");
  if (c.reference_witnesses.size() != c.galois.size()) {
    fail("reference", "witness prime lists differ in length");
  } else if (c.a.size() == static_cast<std::size_t>(n - 2) && c.reference.degree() == n) {
    const IntPoly r_prime = derivative(c.reference);
    for (std::size_t k = 0; k < c.galois.size(); ++k) {
      const auto& w = c.reference_witnesses[k];
      const std::string where = "p = " + std::to_string(w.prime);
      if (w.prime != c.galois[k].prime) fail("reference", where + " is not the matching Galois witness");
      if (w.prime <= static_cast<std::uint64_t>(n) || !is_probable_prime(from_u64(w.prime))) {
        fail("reference", where + " must be a prime larger than n");
        continue;
      }
      if (!(reduce_mod(c.reference, w.prime) == reduce_mod(c.pb, w.prime))) {
        fail("reference", "P is not R mod " + std::to_string(w.prime));
      }
      if (w.r0 != mod_u64(c.reference.coeff(0), w.prime) || w.r0 != mod_u64(c.b, w.prime)) {
        fail("reference", where + ": constant term mismatch");
      }
      if (w.roots.size() != static_cast<std::size_t>(n - 1) ||
          !std::is_sorted(w.roots.begin(), w.roots.end()) ||
          std::adjacent_find(w.roots.begin(), w.roots.end()) != w.roots.end()) {
        fail("reference", where + ": need n - 1 distinct ascending roots of R'");
        continue;
      }
      const mpz_class p = from_u64(w.prime);
      bool roots_ok = true;
      for (std::uint64_t x : w.roots) roots_ok = roots_ok && x < w.prime && divides(p, eval(r_prime, from_u64(x)));
      if (!roots_ok) fail("reference", where + ": stated roots do not annihilate R'");
      if (!divides(p, c.u * c.ell - mpz_class(n) * from_u64(w.roots[0]))) {
        fail("reference", where + ": u l is not n * root_1");
      }
      for (std::size_t i = 0; i < c.a.size(); ++i) {
        if (!divides(p, c.a[i] * c.ell - from_u64(w.roots[i + 1]))) {
          fail("reference", where + ": A_" + std::to_string(i + 2) + " l is not root_" + std::to_string(i + 2));
        }
      }
    }
  }
  return report;
}

/// Digest check plus semantic verification of a JSON document.
inline VerifyReport verify_json(const nlohmann::json& doc) {
  VerifyReport report;
  Certificate c;
  try {
    c = certificate_from_json(doc);
  } catch (const CertificateFormatError& e) {
    report.issues.push_back({"format", e.what()});
    return report;
  }
  if (!doc.contains("digest") || !doc.at("digest").is_string() ||
      doc.at("digest").get<std::string>() != content_digest(doc)) {
    report.issues.push_back({"digest", "content digest does not match"});
  }
  for (auto& issue : verify(c).issues) report.issues.push_back(std::move(issue));
  return report;
}

inline VerifyReport verify_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    return VerifyReport{{{"format", std::string("not JSON: ") + e.what()}}};
  }
  return verify_json(doc);
}

}  // namespace anforge

#endif  // ANFORGE_CERTIFICATE_HPP_
