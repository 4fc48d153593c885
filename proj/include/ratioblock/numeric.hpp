#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ratioblock {

/// Arbitrary-precision nonnegative integer. Negativity is rejected at the
/// boundaries (parsing, descriptor construction); internal arithmetic that
/// provably stays nonnegative uses Nat directly.
using Nat = mpz_class;

/// Exact rational, kept canonical (lowest terms, positive denominator).
using Rat = mpq_class;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A parameter or input violates a documented precondition.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An enumeration would exceed the caller-supplied element budget; the
/// requested range is enumeration-infeasible.
class BudgetExceededError : public Error {
 public:
  using Error::Error;
};

/// A finite set ran out of elements before a request was satisfied.
class ExhaustedError : public Error {
 public:
  using Error::Error;
};

/// Element budget shared across one logical operation. Each produced (or
/// internally skipped) element costs one unit.
struct Budget {
  static constexpr std::uint64_t kDefault = 10'000'000;

  std::uint64_t limit = kDefault;
  std::uint64_t used = 0;

  void charge(std::uint64_t n = 1) {
    used += n;
    if (used > limit)
      throw BudgetExceededError("element budget exceeded (" +
                                std::to_string(limit) + ")");
  }
};

Nat factorial(unsigned long n);
Nat ipow(const Nat& base, unsigned long exp);

/// floor(x^(1/k)) for x >= 0, k >= 1.
Nat iroot_floor(const Nat& x, unsigned long k);

/// ceil(x^(1/k)) for x >= 0, k >= 1.
Nat iroot_ceil(const Nat& x, unsigned long k);

/// floor(x^(u/v)) for rational x >= 0 and positive exponent u/v.
Nat floor_rat_pow(const Rat& x, unsigned long u, unsigned long v);

Nat floor_rat(const Rat& x);
Nat ceil_rat(const Rat& x);

/// Natural log of a value that may be far beyond double range.
double log_of(const Nat& x);
double log_of(const Rat& x);
double to_double(const Rat& x);

Rat rat_abs(const Rat& x);

/// Parses "p/q" or a plain integer; canonicalizes. Throws DomainError on
/// malformed input or zero denominator.
Rat parse_rat(const std::string& s);
Nat parse_nat(const std::string& s);

std::string to_string(const Nat& x);
std::string to_string(const Rat& x);

}  // namespace ratioblock
