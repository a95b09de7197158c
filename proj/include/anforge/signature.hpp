#ifndef ANFORGE_SIGNATURE_HPP_
#define ANFORGE_SIGNATURE_HPP_

// The real-root count of P_b is constant between the values of b where a
// critical value P_b(a_i) crosses zero. Those breakpoints are -B_i l^n and
// -T1 l^n / n^n; one Sturm count per interval gives the whole profile.

#include <gmpxx.h>

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "anforge/arith.hpp"
#include "anforge/congruence.hpp"
#include "anforge/construct.hpp"
#include "anforge/error.hpp"
#include "anforge/intpoly.hpp"

namespace anforge {

struct RootProfile {
  std::vector<mpq_class> breakpoints;  // strictly increasing
  std::vector<int> counts;             // counts[k] on (breakpoints[k-1], breakpoints[k])
};

/// Real roots of b' * P0 + a' where b = a'/b' (clears the denominator).
inline int real_roots_at(const Shape& shape, const mpz_class& ell, const mpq_class& b) {
  IntPoly p = scaled_polynomial(shape, ell, 0);
  p = b.get_den() * p + IntPoly::constant(b.get_num());
  return real_root_count(p);
}

inline RootProfile root_profile(const Shape& shape, const mpz_class& ell = 1) {
  RootProfile profile;
  for (const auto& form : discriminant_forms(shape, ell)) profile.breakpoints.push_back(form.root());
  std::sort(profile.breakpoints.begin(), profile.breakpoints.end());
  if (std::adjacent_find(profile.breakpoints.begin(), profile.breakpoints.end()) != profile.breakpoints.end()) {
    throw RepeatedCriticalValue();
  }
  const auto& bp = profile.breakpoints;
  profile.counts.push_back(real_roots_at(shape, ell, bp.front() - 1));
  for (std::size_t k = 0; k + 1 < bp.size(); ++k) {
    profile.counts.push_back(real_roots_at(shape, ell, (bp[k] + bp[k + 1]) / 2));
  }
  profile.counts.push_back(real_roots_at(shape, ell, bp.back() + 1));
  return profile;
}

/// Integer interval with optional unbounded ends.
struct SignatureWindow {
  std::optional<mpz_class> lo;  // nullopt: -infinity
  std::optional<mpz_class> hi;  // nullopt: +infinity

  /// Caps the window to at most `width` integers. Unbounded windows keep
  /// their finite end; bounded windows keep their lower end.
  IntWindow truncate(const mpz_class& width) const {
    if (lo) {
      mpz_class top = *lo + width - 1;
      if (hi && *hi < top) top = *hi;
      return {*lo, top};
    }
    if (hi) return {*hi - width + 1, *hi};
    return {-(width / 2), width - width / 2 - 1};
  }
};

/// The widest interval realizing n - 2r real roots, shrunk to the integers
/// strictly inside it. Unbounded intervals win over bounded ones, the upper
/// one on ties.
inline SignatureWindow select_window(const RootProfile& profile, int r, int n) {
  if (r < 0 || r > n / 2) {
    throw InvalidArgument("r = " + std::to_string(r) + " outside 0.." + std::to_string(n / 2));
  }
  const int target = n - 2 * r;
  const auto& bp = profile.breakpoints;
  const std::size_t last = profile.counts.size() - 1;
  if (profile.counts[last] == target) return {floor_of(bp.back()) + 1, std::nullopt};
  if (profile.counts[0] == target) return {std::nullopt, ceil_of(bp.front()) - 1};
  std::optional<SignatureWindow> best;
  mpz_class best_width = 0;
  for (std::size_t k = 1; k < last; ++k) {
    if (profile.counts[k] != target) continue;
    const mpz_class lo = floor_of(bp[k - 1]) + 1;
    const mpz_class hi = ceil_of(bp[k]) - 1;
    if (hi < lo) continue;
    if (!best || hi - lo > best_width) {
      best = SignatureWindow{lo, hi};
      best_width = hi - lo;
    }
  }
  if (!best) throw SignatureUnachievable(r);
  return *best;
}

/// pass iff P has exactly n - 2r real roots.
inline bool verify_signature(const IntPoly& pb, int r, int n) {
  if (r < 0 || r > n / 2) throw InvalidArgument("r outside 0..n/2");
  return real_root_count(pb) == n - 2 * r;
}

}  // namespace anforge

#endif  // ANFORGE_SIGNATURE_HPP_
