#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <algorithm>
#include <random>
#include <set>
#include <vector>

#include "doctest.h"
#include "ratioblock/descriptor.hpp"

using namespace ratioblock;

namespace {

std::vector<Nat> enumerated(const SetDescriptor& s, unsigned long hi) {
  Budget b;
  return s.elements_in(Nat(0), Nat(hi), b);
}

// independent counting oracle: binary search over the materialized list
Nat brute_count(const std::vector<Nat>& elems, const Nat& x) {
  return Nat(std::upper_bound(elems.begin(), elems.end(), x) - elems.begin());
}

Nat brute_max_gap(const std::vector<Nat>& elems, const Nat& lo, const Nat& hi) {
  Nat best = 0;
  std::optional<Nat> prev;
  for (const Nat& v : elems) {
    if (v <= lo) continue;
    if (v > hi) break;
    if (prev && v - *prev > best) best = v - *prev;
    prev = v;
  }
  return best;
}

void check_count_matches_enumeration(const SetDescriptor& s, unsigned long hi,
                                     int samples = 400) {
  auto elems = enumerated(s, hi);
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<unsigned long> dist(0, hi);
  for (int i = 0; i < samples; ++i) {
    Nat x(dist(rng));
    CAPTURE(s.family_name());
    CAPTURE(x.get_str());
    REQUIRE(s.count(x) == brute_count(elems, x));
  }
  REQUIRE(s.count(hi) == Nat(elems.size()));
}

SetDescriptor naturals() { return SetDescriptor::power_root(Rat(1)); }
SetDescriptor squares() { return SetDescriptor::power_root(Rat(1, 2)); }

SetDescriptor factorial_intervals() {
  return SetDescriptor::interval_blocks(BlockRule::factorial_even_odd());
}

}  // namespace

TEST_CASE("integer roots are exact") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<unsigned long> dist(0, 1u << 30);
  for (int i = 0; i < 500; ++i) {
    Nat x(dist(rng));
    for (unsigned long k : {1ul, 2ul, 3ul, 5ul, 7ul}) {
      Nat r = iroot_floor(x, k);
      CHECK(ipow(r, k) <= x);
      CHECK(ipow(r + 1, k) > x);
      Nat c = iroot_ceil(x, k);
      CHECK(ipow(c, k) >= x);
      if (c > 0) CHECK(ipow(c - 1, k) < x);
    }
  }
}

TEST_CASE("floor of rational powers") {
  CHECK(floor_rat_pow(Rat(3, 2), 1, 2) == 1);
  CHECK(floor_rat_pow(Rat(12, 7), 1, 2) == 1);
  CHECK(floor_rat_pow(Rat(100), 1, 2) == 10);
  CHECK(floor_rat_pow(Rat(100), 7, 10) == 25);  // 100^0.7 = 25.11..
  CHECK(floor_rat_pow(Rat(1024), 1, 2) == 32);  // perfect power boundary
}

TEST_CASE("rational parsing") {
  CHECK(parse_rat("7/10") == Rat(7, 10));
  CHECK(parse_rat("3") == Rat(3));
  CHECK_THROWS_AS(parse_rat("a/b"), DomainError);
  CHECK_THROWS_AS(parse_rat("1/0"), DomainError);
  CHECK_THROWS_AS(parse_nat("-4"), DomainError);
}

TEST_CASE("power_root basics") {
  auto sq = squares();
  CHECK(sq.count(100) == 10);
  CHECK(sq.count(0) == 0);
  Budget b;
  CHECK(sq.elements_in(0, 10, b) == std::vector<Nat>{1, 4, 9});
  auto pre = take_prefix(sq, 5);
  CHECK(pre.elements == std::vector<Nat>{1, 4, 9, 16, 25});
  CHECK_THROWS_AS(SetDescriptor::power_root(Rat(3, 2)), DomainError);
}

TEST_CASE("factorial interval blocks") {
  auto f = factorial_intervals();
  auto elems = enumerated(f, 720);
  CHECK(Nat(elems.size()) == 100);  // (2,6] has 4, (24,120] has 96
  CHECK(f.count(6) == 4);
  CHECK(f.count(24) == 4);
  CHECK(f.count(120) == brute_count(elems, 120));
  CHECK(f.count(120) == 100);
  CHECK(f.count(720) == 100);
  CHECK(elems.front() == 3);
}

TEST_CASE("explicit sets") {
  auto e = SetDescriptor::explicit_set({Nat(3), Nat(5), Nat(8)});
  CHECK(e.count(5) == 2);
  Budget b;
  CHECK(e.elements_in(3, 8, b) == std::vector<Nat>{5, 8});
  CHECK(e.contains(5));
  CHECK(!e.contains(6));
  CHECK(e.cardinality() == 3);
  CHECK_THROWS_AS(SetDescriptor::explicit_set({Nat(0)}), DomainError);
}

TEST_CASE("geometric ceil walk") {
  // ceil(6*(4/3)^j) for j = 1..4 inside (6, 24]
  auto g = SetDescriptor::geometric_ceil(6, Rat(4, 3));
  Budget b;
  CHECK(g.elements_in(6, 24, b) == std::vector<Nat>{8, 11, 15, 19});
  // collisions at the small end: ceil((4/3)^j) = 2, 2, 3, ...
  auto h = SetDescriptor::geometric_ceil(1, Rat(4, 3));
  auto pre = take_prefix(h, 7);
  CHECK(pre.elements == std::vector<Nat>{2, 3, 4, 5, 6, 8, 10});
  CHECK(h.count(2) == 1);
  check_count_matches_enumeration(h, 1000000, 150);
}

TEST_CASE("union deduplication") {
  auto u = SetDescriptor::union_of(
      {SetDescriptor::explicit_set({Nat(2)}),
       SetDescriptor::explicit_set({Nat(2), Nat(5)})});
  auto pre = take_prefix(u, 2);
  CHECK(pre.elements == std::vector<Nat>{2, 5});
  CHECK(u.count(5) == 2);
  CHECK(u.count(2) == 1);
}

TEST_CASE("union inclusion-exclusion against brute force") {
  auto s = squares();
  auto g = SetDescriptor::geometric_ceil(1, Rat(2));  // powers of two
  auto u = SetDescriptor::union_of({s, g});
  auto se = enumerated(s, 100000);
  auto ge = enumerated(g, 100000);
  std::vector<Nat> inter;
  std::set_intersection(se.begin(), se.end(), ge.begin(), ge.end(),
                        std::back_inserter(inter));
  for (unsigned long x : {100ul, 4096ul, 65536ul, 100000ul}) {
    CHECK(u.count(x) == s.count(x) + g.count(x) - brute_count(inter, Nat(x)));
  }
}

TEST_CASE("power blocks") {
  auto p = SetDescriptor::power_blocks();
  auto pre = take_prefix(p, 4);
  CHECK(pre.elements == std::vector<Nat>{1, 2, 3, 4});  // block n=1: j^1
  CHECK(p.contains(729));  // 27^2 = 9^3, shared endpoint of blocks 2 and 3
  auto elems = enumerated(p, 729);
  CHECK(p.count(729) == Nat(elems.size()));
  check_count_matches_enumeration(p, 1000000, 200);
}

TEST_CASE("progression blocks: evens in factorial blocks") {
  auto ev =
      SetDescriptor::progression_blocks(Nat(2), BlockRule::factorial_even_odd());
  Budget b;
  CHECK(ev.elements_in(2, 6, b) == std::vector<Nat>{4, 6});
  CHECK(ev.count(120) == brute_count(enumerated(ev, 120), 120));
}

TEST_CASE("masked sets") {
  auto m =
      SetDescriptor::masked(squares(), BlockRule::factorial_even_odd(true));
  Budget b;
  CHECK(m.elements_in(1, 6, b) == std::vector<Nat>{4});  // squares in [2,6]
  check_count_matches_enumeration(m, 100000, 200);
}

TEST_CASE("count is monotone and steps by one at elements") {
  for (const auto& s :
       {squares(), factorial_intervals(),
        SetDescriptor::geometric_ceil(1, Rat(4, 3)),
        SetDescriptor::power_blocks()}) {
    auto elems = enumerated(s, 50000);
    for (std::size_t i = 0; i < elems.size(); i += 17) {
      CHECK(s.count(elems[i]) - s.count(elems[i] - 1) == 1);
      CHECK(s.count(elems[i]) == Nat(i + 1));
    }
  }
}

TEST_CASE("element queries") {
  auto f = factorial_intervals();
  CHECK(f.element_at(1) == 3);
  CHECK(f.element_at(4) == 6);
  CHECK(f.element_at(5) == 25);
  CHECK(*f.next_above(6) == 25);
  CHECK(*f.last_at_or_below(24) == 6);
  CHECK(!f.last_at_or_below(2).has_value());
  auto e = SetDescriptor::explicit_set({Nat(3), Nat(5)});
  CHECK(!e.next_above(5).has_value());
  CHECK_THROWS_AS(e.element_at(3), ExhaustedError);
}

TEST_CASE("max_gap_in agrees with brute force") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<unsigned long> dist(0, 80000);
  auto check_gaps = [&](const SetDescriptor& s) {
    auto elems = enumerated(s, 100000);
    for (int i = 0; i < 60; ++i) {
      unsigned long a = dist(rng), b = dist(rng);
      if (a > b) std::swap(a, b);
      CAPTURE(s.family_name());
      CAPTURE(a);
      CAPTURE(b);
      REQUIRE(s.max_gap_in(Nat(a), Nat(b)) ==
              brute_max_gap(elems, Nat(a), Nat(b)));
    }
    REQUIRE(s.max_gap_in(0, 100000) == brute_max_gap(elems, 0, 100000));
  };
  check_gaps(squares());
  check_gaps(SetDescriptor::power_root(Rat(7, 10)));
  check_gaps(factorial_intervals());
  check_gaps(
      SetDescriptor::progression_blocks(Nat(2), BlockRule::factorial_even_odd()));
  check_gaps(SetDescriptor::geometric_ceil(1, Rat(4, 3)));
  check_gaps(SetDescriptor::power_blocks());
  check_gaps(
      SetDescriptor::masked(squares(), BlockRule::factorial_even_odd(true)));
  check_gaps(SetDescriptor::union_of(
      {SetDescriptor::interval_blocks(BlockRule::factorial_odd_even()),
       SetDescriptor::progression_blocks(Nat(2),
                                         BlockRule::factorial_even_odd())}));
}

TEST_CASE("count matches enumeration on every family") {
  check_count_matches_enumeration(naturals(), 100000, 100);
  check_count_matches_enumeration(squares(), 1000000);
  check_count_matches_enumeration(SetDescriptor::power_root(Rat(1, 3)),
                                  1000000);
  check_count_matches_enumeration(SetDescriptor::power_root(Rat(7, 10)),
                                  1000000);
  check_count_matches_enumeration(factorial_intervals(), 1000000);
  check_count_matches_enumeration(
      SetDescriptor::interval_blocks(BlockRule::factorial_even_odd(true)),
      1000000);
  check_count_matches_enumeration(
      SetDescriptor::interval_blocks(BlockRule::factorial_singletons()),
      1000000, 150);
  check_count_matches_enumeration(SetDescriptor::power_blocks(), 1000000);
  check_count_matches_enumeration(SetDescriptor::geometric_ceil(1, Rat(2)),
                                  1000000, 150);
}

TEST_CASE("windowed power_root pieces") {
  // j in (floor(76^0.7), floor(1721^0.7)] gives values in (76, 1721]
  Nat j_lo = floor_rat_pow(Rat(76), 7, 10) + 1;
  Nat j_hi = floor_rat_pow(Rat(1721), 7, 10);
  auto piece = SetDescriptor::power_root(Rat(7, 10), j_lo, j_hi);
  CHECK(*piece.min_element() > 76);
  CHECK(*piece.max_element() <= 1721);
  check_count_matches_enumeration(piece, 2000, 100);
}

TEST_CASE("budget enforcement") {
  Budget tight;
  tight.limit = 10;
  CHECK_THROWS_AS(naturals().elements_in(0, 1000, tight),
                  BudgetExceededError);
  CHECK_THROWS_AS(take_prefix(SetDescriptor::explicit_set({Nat(1)}), 5),
                  ExhaustedError);
}

TEST_CASE("serialization round trip") {
  std::vector<SetDescriptor> sets;
  sets.push_back(squares());
  sets.push_back(SetDescriptor::power_root(Rat(7, 10), Nat(10), Nat(500)));
  sets.push_back(factorial_intervals());
  sets.push_back(
      SetDescriptor::progression_blocks(Nat(2), BlockRule::factorial_even_odd()));
  sets.push_back(SetDescriptor::power_blocks(5));
  sets.push_back(
      SetDescriptor::geometric_ceil(6, Rat(4, 3), 1, {}, Nat(6), Nat(24)));
  sets.push_back(SetDescriptor::explicit_set({Nat(2), Nat(6)}, true));
  sets.push_back(
      SetDescriptor::union_of({squares(), SetDescriptor::explicit_set({Nat(7)})}));
  sets.push_back(
      SetDescriptor::masked(squares(), BlockRule::factorial_even_odd(true)));
  for (const auto& s : sets) {
    auto text = s.dump();
    auto back = SetDescriptor::parse(text);
    CHECK(back.dump() == text);
    for (unsigned long x : {10ul, 100ul, 4321ul, 99991ul})
      CHECK(back.count(x) == s.count(x));
  }
  CHECK_THROWS_AS(SetDescriptor::parse("{\"family\":\"nope\",\"params\":{}}"),
                  DomainError);
}

TEST_CASE("enumerate_range precondition") {
  Budget b;
  CHECK_THROWS_AS(squares().enumerate_range(Nat(10), Nat(5), b,
                                            [](const Nat&) { return true; }),
                  DomainError);
}
