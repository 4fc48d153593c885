#include "ratioblock/numeric.hpp"

#include <cctype>
#include <cmath>

namespace ratioblock {

Nat factorial(unsigned long n) {
  Nat r;
  mpz_fac_ui(r.get_mpz_t(), n);
  return r;
}

Nat ipow(const Nat& base, unsigned long exp) {
  Nat r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), exp);
  return r;
}

Nat iroot_floor(const Nat& x, unsigned long k) {
  if (k == 0) throw DomainError("iroot_floor: k must be >= 1");
  if (sgn(x) < 0) throw DomainError("iroot_floor: negative operand");
  Nat r;
  mpz_root(r.get_mpz_t(), x.get_mpz_t(), k);
  return r;
}

Nat iroot_ceil(const Nat& x, unsigned long k) {
  if (k == 0) throw DomainError("iroot_ceil: k must be >= 1");
  if (sgn(x) < 0) throw DomainError("iroot_ceil: negative operand");
  Nat r;
  int exact = mpz_root(r.get_mpz_t(), x.get_mpz_t(), k);
  if (!exact) r += 1;
  return r;
}

Nat floor_rat_pow(const Rat& x, unsigned long u, unsigned long v) {
  if (v == 0) throw DomainError("floor_rat_pow: zero exponent denominator");
  if (sgn(x) < 0) throw DomainError("floor_rat_pow: negative base");
  // m <= x^(u/v)  <=>  m^v <= x^u  <=>  m^v <= floor(num^u / den^u).
  Nat nu = ipow(x.get_num(), u);
  Nat de = ipow(x.get_den(), u);
  Nat q;
  mpz_fdiv_q(q.get_mpz_t(), nu.get_mpz_t(), de.get_mpz_t());
  return iroot_floor(q, v);
}

Nat floor_rat(const Rat& x) {
  Nat q;
  mpz_fdiv_q(q.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
  return q;
}

Nat ceil_rat(const Rat& x) {
  Nat q;
  mpz_cdiv_q(q.get_mpz_t(), x.get_num().get_mpz_t(), x.get_den().get_mpz_t());
  return q;
}

double log_of(const Nat& x) {
  if (sgn(x) <= 0) throw DomainError("log_of: nonpositive argument");
  signed long e = 0;
  double d = mpz_get_d_2exp(&e, x.get_mpz_t());
  return std::log(d) + static_cast<double>(e) * M_LN2;
}

double log_of(const Rat& x) {
  if (sgn(x) <= 0) throw DomainError("log_of: nonpositive argument");
  return log_of(Nat(x.get_num())) - log_of(Nat(x.get_den()));
}

double to_double(const Rat& x) { return x.get_d(); }

Rat rat_abs(const Rat& x) {
  Rat r;
  mpq_abs(r.get_mpq_t(), x.get_mpq_t());
  return r;
}

namespace {

bool looks_like_int(const std::string& s) {
  if (s.empty()) return false;
  std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  return true;
}

}  // namespace

Rat parse_rat(const std::string& s) {
  auto slash = s.find('/');
  std::string num = s.substr(0, slash);
  std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
  if (!looks_like_int(num) || !looks_like_int(den))
    throw DomainError("malformed rational: '" + s + "'");
  Rat r;
  if (mpq_set_str(r.get_mpq_t(), s.c_str(), 10) != 0)
    throw DomainError("malformed rational: '" + s + "'");
  if (sgn(Nat(r.get_den())) == 0)
    throw DomainError("zero denominator: '" + s + "'");
  r.canonicalize();
  return r;
}

Nat parse_nat(const std::string& s) {
  if (!looks_like_int(s)) throw DomainError("malformed integer: '" + s + "'");
  Nat n(s);
  if (sgn(n) < 0) throw DomainError("negative value where Natural expected: '" + s + "'");
  return n;
}

std::string to_string(const Nat& x) { return x.get_str(); }

std::string to_string(const Rat& x) {
  if (x.get_den() == 1) return x.get_num().get_str();
  return x.get_num().get_str() + "/" + x.get_den().get_str();
}

}  // namespace ratioblock
