#include "ratioblock/generators.hpp"

#include <cmath>
#include <limits>

namespace ratioblock {

namespace {

unsigned long rat_num_ul(const Rat& r, const char* what) {
  Nat n(r.get_num());
  if (!n.fits_ulong_p()) throw DomainError(std::string(what) + " too large");
  return n.get_ui();
}

unsigned long rat_den_ul(const Rat& r, const char* what) {
  Nat n(r.get_den());
  if (!n.fits_ulong_p()) throw DomainError(std::string(what) + " too large");
  return n.get_ui();
}

// j-range of ceil(j^(1/q)) values lying in (lo, hi]: element > lo iff
// j > floor(lo)^q; element <= hi iff j <= floor(hi)^q.
std::pair<Nat, Nat> j_window(const Rat& q, const Rat& lo, const Rat& hi) {
  unsigned long u = rat_num_ul(q, "exponent");
  unsigned long v = rat_den_ul(q, "exponent");
  Nat j_lo = floor_rat_pow(Rat(floor_rat(lo)), u, v) + 1;
  Nat j_hi = floor_rat_pow(Rat(floor_rat(hi)), u, v);
  return {j_lo, j_hi};
}

Rat rat_pow_ui(const Rat& x, unsigned long e) {
  return Rat(ipow(Nat(x.get_num()), e), ipow(Nat(x.get_den()), e));
}

Nat ceil_div(const Nat& a, const Nat& b) {
  Nat q;
  mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

}  // namespace

SetDescriptor power_sequence(const Rat& q) {
  return SetDescriptor::power_root(q);
}

SetDescriptor factorial_interval_set(bool closed_start) {
  return SetDescriptor::interval_blocks(
      BlockRule::factorial_even_odd(closed_start));
}

SetDescriptor mixed_progression_set() {
  return SetDescriptor::union_of(
      {SetDescriptor::interval_blocks(BlockRule::factorial_odd_even()),
       SetDescriptor::progression_blocks(Nat(2),
                                         BlockRule::factorial_even_odd())});
}

NolimSet nolim_set(const NolimParams& params) {
  const Rat& p = params.p;
  const Rat& q = params.q;
  if (sgn(p) < 0 || p >= 1) throw DomainError("nolim: p must be in [0,1)");
  if (sgn(q) <= 0 || q > 1) throw DomainError("nolim: q must be in (0,1]");
  if (p >= q) throw DomainError("nolim: p < q required");
  if (params.b1 < 2) throw DomainError("nolim: b1 must be >= 2");
  if (params.pair_count < 1) throw DomainError("nolim: pair_count >= 1");

  auto p_at = [&](unsigned long k) -> Rat {
    Rat pk = params.p_seq ? params.p_seq(k) : p;
    if (pk < p || pk >= q)
      throw DomainError("nolim: p_k out of range at k=" + std::to_string(k));
    return pk;
  };

  // b_{k+1} = smallest integer > k * b_k^(q/p~) with p~ = p_{ceil(k/2)}.
  // For p = 0 the exponent-p pieces are empty and the growth rule uses
  // exponent 1 (any strictly expanding spacing works).
  std::size_t piece_count = 2 * params.pair_count;
  std::vector<Nat> b(piece_count + 2);
  b[1] = params.b1;
  for (unsigned long k = 1; k <= piece_count; ++k) {
    Rat p_tilde = sgn(p) > 0 ? p_at((k + 1) / 2) : q;
    Rat growth = q / p_tilde;
    unsigned long eu = rat_num_ul(growth, "growth exponent");
    unsigned long ev = rat_den_ul(growth, "growth exponent");
    Nat pow = ipow(Nat(k), ev) * ipow(b[k], eu);
    b[k + 1] = iroot_floor(pow, ev) + 1;
  }

  if (sgn(p) > 0) {
    unsigned long qu = rat_num_ul(q, "q"), qv = rat_den_ul(q, "q");
    Rat p1 = p_at(1);
    unsigned long pu = rat_num_ul(p1, "p"), pv = rat_den_ul(p1, "p");
    if (ipow(b[1], qu * pv) >= ipow(b[2], pu * qv))
      throw DomainError("nolim: b1^q < b2^p violated");
    // decay: b_k^q / b_{k+1}^(p_{ceil(k/2)}) strictly decreasing on range
    double prev = std::numeric_limits<double>::infinity();
    for (unsigned long k = 1; k + 1 < b.size(); ++k) {
      Rat pk = p_at((k + 1) / 2);
      double r =
          to_double(q) * log_of(b[k]) - to_double(pk) * log_of(b[k + 1]);
      if (r >= prev)
        throw DomainError("nolim: decay condition violated at k=" +
                          std::to_string(k));
      prev = r;
    }
  }

  std::vector<SetDescriptor> pieces;
  for (unsigned long k = 1; k <= params.pair_count; ++k) {
    if (sgn(p) > 0) {
      Rat pk = p_at(k);
      auto [jl, jh] = j_window(pk, Rat(b[2 * k - 1]), Rat(b[2 * k]));
      if (jl <= jh) pieces.push_back(SetDescriptor::power_root(pk, jl, jh));
    }
    auto [jl, jh] = j_window(q, Rat(b[2 * k]), Rat(b[2 * k + 1]));
    if (jl <= jh) pieces.push_back(SetDescriptor::power_root(q, jl, jh));
  }
  return NolimSet{SetDescriptor::union_of(std::move(pieces)), std::move(b), p,
                  q};
}

namespace {

std::vector<Rat> default_tuple(unsigned long k, unsigned long n) {
  // smallest admissible tuple on the grid with denominator (4n-1)!:
  // (4n-1)! * q_l = (4n-2)! + l - 1
  std::vector<Rat> t;
  Nat den = factorial(4 * n - 1);
  Nat base = factorial(4 * n - 2);
  for (unsigned long l = 1; l + 1 <= k; ++l) {
    Rat v(base + (l - 1), den);
    v.canonicalize();
    t.push_back(v);
  }
  return t;
}

void validate_tuple(const std::vector<Rat>& t, unsigned long k,
                    unsigned long n) {
  if (t.size() + 1 != k)
    throw DomainError("dispersion: tuple for n=" + std::to_string(n) +
                      " must have k-1 entries");
  Nat den = factorial(4 * n - 1);
  Nat floor_val = factorial(4 * n - 2);
  Rat prev(0);
  for (const Rat& v : t) {
    if (v <= prev || v >= 1)
      throw DomainError("dispersion: tuple not increasing inside (0,1)");
    Rat scaled = v * den;
    if (Nat(scaled.get_den()) != 1 || Nat(scaled.get_num()) < floor_val)
      throw DomainError(
          "dispersion: (4n-1)! q_l must be an integer >= (4n-2)! at n=" +
          std::to_string(n));
    prev = v;
  }
}

}  // namespace

DispersionSet dispersion_set(const DispersionParams& params) {
  const unsigned long k = params.k;
  const Rat& d = params.d;
  const Rat& lam = params.lambda;
  if (k < 1) throw DomainError("dispersion: k must be >= 1");
  if (sgn(d) <= 0 || d > Rat(1, k))
    throw DomainError("dispersion: d must be in (0, 1/k]");
  if (sgn(lam) < 0 || lam > 1)
    throw DomainError("dispersion: lambda must be in [0,1]");
  if (params.n_max < 1) throw DomainError("dispersion: n_max must be >= 1");

  DispersionSet out{SetDescriptor::explicit_set({}), {}};

  if (k == 1) {
    if (sgn(lam) == 0) {
      out.set = d == 1 ? SetDescriptor::interval_blocks(
                             BlockRule::factorial_singletons())
                       : SetDescriptor::geometric_ceil(1, Rat(1) / (1 - d));
      return out;
    }
    unsigned long lu = rat_num_ul(lam, "lambda");
    unsigned long lv = rat_den_ul(lam, "lambda");
    std::vector<SetDescriptor> pieces;
    for (unsigned long n = 1; n <= params.n_max; ++n) {
      Nat nf = factorial(n);
      Nat lead, j_lo;
      if (d < 1) {
        lead = ceil_rat(d * nf);
        // j >= (d n!)^lambda  <=>  j^lv >= (d n!)^lu
        j_lo = iroot_ceil(ceil_rat(rat_pow_ui(d * nf, lu)), lv);
      } else if (n == 1) {
        lead = 1;  // d_1 = 0^(1/lambda) degenerates; block is {1, 1!}
        j_lo = 1;
      } else {
        // d_n = ((n-1)/n)^(1/lambda)
        Nat target = ipow(Nat(n - 1), lv) * ipow(nf, lu);
        lead = iroot_ceil(ceil_rat(Rat(target, ipow(Nat(n), lv))), lu);
        // j >= ((n-1)/n) * (n!)^(lu/lv)
        j_lo = ceil_div(iroot_ceil(target, lv), Nat(n));
      }
      Nat j_hi = floor_rat_pow(Rat(nf), lu, lv);  // j <= (n!)^lambda
      pieces.push_back(SetDescriptor::explicit_set({lead, nf}, true));
      if (j_lo <= j_hi)
        pieces.push_back(SetDescriptor::power_root(lam, j_lo, j_hi));
    }
    out.set = SetDescriptor::union_of(std::move(pieces));
    return out;
  }

  // k >= 2: power piece B_n, tuple points C_n, geometric tail D_n
  std::vector<SetDescriptor> pieces;
  for (unsigned long n = 1; n <= params.n_max; ++n) {
    Nat f3 = factorial(4 * n - 3);
    Nat f1 = factorial(4 * n - 1);
    if (sgn(lam) > 0) {
      Rat lo = std::max(Rat(factorial(4 * n - 4)), Rat(d * f3));
      Rat hi = (2 * d / (2 - d)) * f3;
      auto [jl, jh] = j_window(lam, lo, hi);
      if (jl <= jh) pieces.push_back(SetDescriptor::power_root(lam, jl, jh));
    }
    std::vector<Rat> tuple =
        params.tuples ? params.tuples(n) : default_tuple(k, n);
    validate_tuple(tuple, k, n);
    std::vector<Nat> cpts;
    for (const Rat& qv : tuple) cpts.push_back(Nat(Rat(qv * f1).get_num()));
    cpts.push_back(f1);
    pieces.push_back(SetDescriptor::explicit_set(std::move(cpts), true));
    out.tuples.push_back(std::move(tuple));
    if (d < 1) {
      pieces.push_back(SetDescriptor::geometric_ceil(
          f1, Rat(1) / (1 - d), 1, {}, f1, f1 * Nat(4 * n)));
    }
  }
  out.set = SetDescriptor::union_of(std::move(pieces));
  return out;
}

SetDescriptor ndense_zero_lambda_set(std::optional<unsigned long> n_max) {
  return SetDescriptor::power_blocks(n_max);
}

SetDescriptor masked_set(SetDescriptor inner) {
  return SetDescriptor::masked(std::move(inner),
                               BlockRule::factorial_even_odd(true));
}

SetDescriptor powers_of_two() {
  return SetDescriptor::geometric_ceil(1, Rat(2));
}

SetDescriptor geometric_four_thirds() {
  return SetDescriptor::geometric_ceil(1, Rat(4, 3));
}

// ---------------------------------------------------------------------------
// CLI construction

namespace {

std::string get_or(const std::map<std::string, std::string>& m,
                   const std::string& key, const std::string& fallback) {
  auto it = m.find(key);
  return it == m.end() ? fallback : it->second;
}

unsigned long get_ul(const std::map<std::string, std::string>& m,
                     const std::string& key, unsigned long fallback) {
  auto it = m.find(key);
  if (it == m.end()) return fallback;
  Nat n = parse_nat(it->second);
  if (!n.fits_ulong_p()) throw DomainError(key + " too large");
  return n.get_ui();
}

}  // namespace

SetDescriptor build_family(const std::string& name,
                           const std::map<std::string, std::string>& params) {
  if (name == "naturals") return power_sequence(Rat(1));
  if (name == "squares") return power_sequence(Rat(1, 2));
  if (name == "power")
    return power_sequence(parse_rat(get_or(params, "q", "1/2")));
  if (name == "factorial_intervals")
    return factorial_interval_set(get_or(params, "closed", "false") == "true");
  if (name == "mixed_progression") return mixed_progression_set();
  if (name == "nolim") {
    NolimParams np;
    np.p = parse_rat(get_or(params, "p", "1/2"));
    np.q = parse_rat(get_or(params, "q", "7/10"));
    np.b1 = parse_nat(get_or(params, "b1", "10"));
    np.pair_count = get_ul(params, "pairs", 4);
    return nolim_set(np).set;
  }
  if (name == "dispersion") {
    DispersionParams dp;
    dp.k = get_ul(params, "k", 2);
    dp.d = parse_rat(get_or(params, "d", "1/4"));
    dp.lambda = parse_rat(get_or(params, "lambda", "1/2"));
    dp.n_max = get_ul(params, "nmax", 5);
    return dispersion_set(dp).set;
  }
  if (name == "ndense_zero_lambda") {
    std::optional<unsigned long> nm;
    if (params.count("nmax")) nm = get_ul(params, "nmax", 5);
    return ndense_zero_lambda_set(nm);
  }
  if (name == "powers_of_two") return powers_of_two();
  if (name == "geometric")
    return SetDescriptor::geometric_ceil(
        parse_nat(get_or(params, "anchor", "1")),
        parse_rat(get_or(params, "ratio", "2")));
  if (name == "explicit") {
    std::vector<Nat> pts;
    std::string s = get_or(params, "points", "");
    std::size_t pos = 0;
    while (pos < s.size()) {
      std::size_t c = s.find(',', pos);
      if (c == std::string::npos) c = s.size();
      if (c > pos) pts.push_back(parse_nat(s.substr(pos, c - pos)));
      pos = c + 1;
    }
    return SetDescriptor::explicit_set(std::move(pts));
  }
  throw DomainError("unknown family: " + name);
}

std::vector<std::string> known_families() {
  return {"naturals",
          "squares",
          "power",
          "factorial_intervals",
          "mixed_progression",
          "nolim",
          "dispersion",
          "ndense_zero_lambda",
          "powers_of_two",
          "geometric",
          "explicit"};
}

}  // namespace ratioblock
