#ifndef ANFORGE_ERROR_HPP_
#define ANFORGE_ERROR_HPP_

#include <cstdint>
#include <stdexcept>
#include <string>

namespace anforge {

// All library failures derive from Error so callers can catch broadly.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

// ---- intpoly ----

class ZeroPolynomial : public Error {
 public:
  ZeroPolynomial() : Error("zero polynomial") {}
};

class DegreeTooSmall : public Error {
 public:
  explicit DegreeTooSmall(int degree)
      : Error("degree too small: " + std::to_string(degree)) {}
};

class NonIntegralAntiderivative : public Error {
 public:
  explicit NonIntegralAntiderivative(int m)
      : Error("coefficient of x^" + std::to_string(m - 1) +
              " is not divisible by " + std::to_string(m)),
        m_(m) {}
  int m() const { return m_; }

 private:
  int m_;
};

class NotSquarefree : public Error {
 public:
  NotSquarefree() : Error("polynomial is not squarefree") {}
};

class NotSeparableModP : public Error {
 public:
  explicit NotSeparableModP(std::uint64_t p)
      : Error("polynomial not separable mod " + std::to_string(p)), p_(p) {}
  std::uint64_t p() const { return p_; }

 private:
  std::uint64_t p_;
};

class DegreeDropModP : public Error {
 public:
  explicit DegreeDropModP(std::uint64_t p)
      : Error("leading coefficient vanishes mod " + std::to_string(p)),
        p_(p) {}
  std::uint64_t p() const { return p_; }

 private:
  std::uint64_t p_;
};

// ---- construct ----

class IntegralityViolation : public Error {
 public:
  using Error::Error;
};

class DegenerateShape : public Error {
 public:
  using Error::Error;
};

class ZeroFactor : public Error {
 public:
  explicit ZeroFactor(int index)
      : Error("discriminant factor F" + std::to_string(index) + " vanishes"),
        index_(index) {}
  int index() const { return index_; }

 private:
  int index_;
};

class BNotCoprime : public Error {
 public:
  BNotCoprime() : Error("b is not coprime to n!") {}
};

// ---- galois ----

class SearchExhausted : public Error {
 public:
  using Error::Error;
};

class NotFoundWithinBound : public Error {
 public:
  using Error::Error;
};

class InsufficientWitnesses : public Error {
 public:
  using Error::Error;
};

class BadWitness : public Error {
 public:
  explicit BadWitness(std::uint64_t p, const std::string& why)
      : Error("bad witness prime " + std::to_string(p) + ": " + why), p_(p) {}
  std::uint64_t p() const { return p_; }

 private:
  std::uint64_t p_;
};

class AvoidanceViolated : public Error {
 public:
  explicit AvoidanceViolated(std::uint64_t s)
      : Error("avoided prime " + std::to_string(s) + " divides the discriminant"),
        s_(s) {}
  std::uint64_t prime() const { return s_; }

 private:
  std::uint64_t s_;
};

class MismatchedComponents : public Error {
 public:
  using Error::Error;
};

// ---- congruence ----

class InfeasibleConstraint : public Error {
 public:
  using Error::Error;
};

class FeasibilityViolation : public Error {
 public:
  using Error::Error;
};

class AvoidEqualsEll : public Error {
 public:
  AvoidEqualsEll() : Error("avoid set contains the scaling prime ell") {}
};

class EmptyProgram : public Error {
 public:
  using Error::Error;
};

// ---- signature ----

class RepeatedCriticalValue : public Error {
 public:
  RepeatedCriticalValue() : Error("two critical values coincide") {}
};

class SignatureUnachievable : public Error {
 public:
  explicit SignatureUnachievable(int r)
      : Error("no b-interval realizes " + std::to_string(r) +
              " complex-conjugate pairs"),
        r_(r) {}
  int r() const { return r_; }

 private:
  int r_;
};

// ---- sieve / pipeline ----

class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

class BudgetExhausted : public Error {
 public:
  BudgetExhausted(std::string stage, const std::string& detail)
      : Error("budget exhausted in stage '" + stage + "': " + detail),
        stage_(std::move(stage)) {}
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

// ---- certificates ----

class CertificateFormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace anforge

#endif  // ANFORGE_ERROR_HPP_
