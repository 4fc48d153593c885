#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ratioblock/descriptor.hpp"

namespace ratioblock {

/// Elements ceil(j^(1/q)), j = 1, 2, ... — counting grows like x^q.
SetDescriptor power_sequence(const Rat& q);

/// Integers in the blocks ((2k)!, (2k+1)!], or [(2k)!, (2k+1)!] when
/// closed_start is set.
SetDescriptor factorial_interval_set(bool closed_start = false);

/// Integers in ((2k-1)!, (2k)!] together with the even numbers in
/// ((2k)!, (2k+1)!].
SetDescriptor mixed_progression_set();

/// Two-exponent staircase: pieces with exponent p_k on (b_{2k-1}, b_{2k}]
/// alternate with exponent-q pieces on (b_{2k}, b_{2k+1}], making the
/// counting exponent oscillate between p and q.
struct NolimParams {
  Rat p;  // in [0, 1)
  Rat q;  // in (0, 1], p < q
  Nat b1 = 10;
  unsigned long pair_count = 4;  // builds pieces A_1 .. A_{2*pair_count}
  // k -> p_k, non-increasing toward p; defaults to the constant p
  std::function<Rat(unsigned long)> p_seq;
};

struct NolimSet {
  SetDescriptor set;
  std::vector<Nat> b;  // b_1 .. b_{2*pair_count + 1}
  Rat p, q;
};

NolimSet nolim_set(const NolimParams& params);

/// Families B_n / C_n / D_n giving prescribed dispersion d and counting
/// exponent lambda, with R^k dense and R^(k+1) not dense. k = 1 uses the
/// dedicated one-dimensional branches.
struct DispersionParams {
  unsigned long k = 2;
  Rat d;       // in (0, 1/k]
  Rat lambda;  // in [0, 1]
  unsigned long n_max = 5;
  // n -> (q_1, ..., q_{k-1}); each (4n-1)! * q_l must be an integer
  // >= (4n-2)! and the tuple strictly increasing inside (0,1).
  // Defaults to the smallest admissible tuple.
  std::function<std::vector<Rat>(unsigned long)> tuples;
};

struct DispersionSet {
  SetDescriptor set;
  std::vector<std::vector<Rat>> tuples;  // tuple used for each n <= n_max
};

DispersionSet dispersion_set(const DispersionParams& params);

/// Blocks {j^n : j in [n^(n-1), (n+1)^(n+1)]}: consecutive-element ratios
/// tend to 1 while the counting exponent tends to 0.
SetDescriptor ndense_zero_lambda_set(
    std::optional<unsigned long> n_max = {});

/// Restricts a set to the union of the closed blocks [(2k)!, (2k+1)!].
SetDescriptor masked_set(SetDescriptor inner);

/// Powers of two {2, 4, 8, ...}.
SetDescriptor powers_of_two();

/// ceil((4/3)^j) with duplicates collapsed: 2, 3, 4, 5, 6, 8, ...
SetDescriptor geometric_four_thirds();

/// CLI surface: build a named family from key=value parameters.
/// Known names: naturals, power, squares, factorial_intervals,
/// mixed_progression, nolim, dispersion, ndense_zero_lambda, powers_of_two,
/// geometric, explicit.
SetDescriptor build_family(const std::string& name,
                           const std::map<std::string, std::string>& params);
std::vector<std::string> known_families();

}  // namespace ratioblock
