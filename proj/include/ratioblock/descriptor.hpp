#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "json.hpp"
#include "ratioblock/numeric.hpp"

namespace ratioblock {

/// Produces a strictly ordered sequence of half-open integer intervals
/// (lo_k, hi_k]. Factorial rules are the ones the block families are built
/// from; Explicit exists for tests and ad-hoc sets.
struct BlockRule {
  enum class Kind { FactorialAlternating, FactorialSingletons, Explicit };

  Kind kind = Kind::Explicit;
  // FactorialAlternating, block k >= 1:
  //   odd_start  -> ((2k-1)!, (2k)!]
  //   !odd_start -> ((2k)!, (2k+1)!]
  // closed_start widens to include the lower factorial itself.
  bool odd_start = false;
  bool closed_start = false;
  std::optional<unsigned long> k_max;
  std::vector<std::pair<Nat, Nat>> blocks;  // Explicit only; (lo, hi], sorted

  static BlockRule factorial_even_odd(bool closed_start = false,
                                      std::optional<unsigned long> k_max = {});
  static BlockRule factorial_odd_even(std::optional<unsigned long> k_max = {});
  static BlockRule factorial_singletons();
  static BlockRule explicit_blocks(std::vector<std::pair<Nat, Nat>> blocks);

  /// Visits canonical (lo, hi] blocks in increasing order while
  /// f returns true. closed_start is already folded into lo.
  void for_each_block(const std::function<bool(const Nat&, const Nat&)>& f) const;

  bool is_finite() const;
  nlohmann::ordered_json to_json() const;
  static BlockRule from_json(const nlohmann::ordered_json& j);
};

/// Symbolic description of a (possibly infinite) set of positive integers.
/// Immutable after construction; every operation is a pure function of the
/// description, so instances can be shared freely across threads.
///
/// The invariant all variants maintain: enumeration is strictly increasing
/// (duplicates collapsed), and count(x) agrees with the number of enumerated
/// elements <= x.
class SetDescriptor {
 public:
  struct Explicit {
    std::vector<Nat> points;  // sorted, deduplicated on construction
    bool finite_points_tag = false;
  };
  /// Elements ceil(j^(1/q)) for j in [j_min, j_max], q in (0,1].
  /// For q <= 1 consecutive values never collide (the real gap is >= 1),
  /// so counting reduces to floor(x^q) clamped to the j-range.
  struct PowerRoot {
    Rat q;
    Nat j_min = 1;
    std::optional<Nat> j_max;
  };
  struct IntervalBlocks {
    BlockRule rule;
  };
  /// Multiples of `step` inside each block.
  struct ProgressionBlocks {
    Nat step;
    BlockRule rule;
  };
  /// Block n >= 1 holds j^n for j in [n^(n-1), (n+1)^(n+1)]; consecutive
  /// blocks share one endpoint, deduplicated.
  struct PowerBlocks {
    std::optional<unsigned long> n_max;
  };
  /// Elements ceil(anchor * ratio^j) for j in [j_min, j_max], clipped to the
  /// optional value window (value_lo, value_hi]. Small-j collisions are
  /// deduplicated; counting walks the logarithmic-length j range exactly.
  struct GeometricCeil {
    Nat anchor;
    Rat ratio;  // > 1
    unsigned long j_min = 1;
    std::optional<unsigned long> j_max;
    std::optional<Nat> value_lo;
    std::optional<Nat> value_hi;
  };
  struct UnionOf {
    std::vector<SetDescriptor> parts;
  };
  struct Masked {
    std::shared_ptr<const SetDescriptor> inner;
    BlockRule mask;
  };

  using Variant = std::variant<Explicit, PowerRoot, IntervalBlocks,
                               ProgressionBlocks, PowerBlocks, GeometricCeil,
                               UnionOf, Masked>;

  explicit SetDescriptor(Variant v);

  static SetDescriptor explicit_set(std::vector<Nat> points,
                                    bool finite_points_tag = false);
  static SetDescriptor power_root(Rat q, Nat j_min = 1,
                                  std::optional<Nat> j_max = {});
  static SetDescriptor interval_blocks(BlockRule rule);
  static SetDescriptor progression_blocks(Nat step, BlockRule rule);
  static SetDescriptor power_blocks(std::optional<unsigned long> n_max = {});
  static SetDescriptor geometric_ceil(Nat anchor, Rat ratio,
                                      unsigned long j_min = 1,
                                      std::optional<unsigned long> j_max = {},
                                      std::optional<Nat> value_lo = {},
                                      std::optional<Nat> value_hi = {});
  static SetDescriptor union_of(std::vector<SetDescriptor> parts);
  static SetDescriptor masked(SetDescriptor inner, BlockRule mask);

  const Variant& variant() const { return *v_; }
  const char* family_name() const;

  /// A(x) = #{a <= x : a in the set}, by the variant's closed form.
  Nat count(const Nat& x) const;
  /// A evaluated at a real (rational) argument: counting functions are
  /// right-continuous step functions, so this is count(floor(x)).
  Nat count_at(const Rat& x) const;

  bool contains(const Nat& v) const;

  /// Yields the elements in (lo, hi] in increasing order while the callback
  /// returns true. hi empty means unbounded. Budget is charged per element.
  void enumerate_range(const Nat& lo, const std::optional<Nat>& hi,
                       Budget& budget,
                       const std::function<bool(const Nat&)>& yield) const;
  std::vector<Nat> elements_in(const Nat& lo, const Nat& hi,
                               Budget& budget) const;

  /// k-th smallest element (1-based). Throws ExhaustedError past the end.
  Nat element_at(const Nat& index) const;
  std::optional<Nat> next_above(const Nat& v) const;
  std::optional<Nat> last_at_or_below(const Nat& v) const;

  std::optional<Nat> min_element() const;
  /// Largest element of a finite set; empty for infinite sets.
  std::optional<Nat> max_element() const;
  bool is_finite() const;
  bool is_empty() const;
  /// Total cardinality of a finite set.
  Nat cardinality() const;

  /// Largest difference between consecutive elements that both lie in
  /// (lo, hi]. Exact; 0 when the window holds fewer than two elements.
  Nat max_gap_in(const Nat& lo, const Nat& hi) const;

  /// Structural landmarks (block edges, window endpoints) inside [lo, hi] —
  /// the places where counting ratios and gaps attain their extremes.
  std::vector<Nat> boundary_points(const Nat& lo, const Nat& hi) const;

  nlohmann::ordered_json to_json() const;
  static SetDescriptor from_json(const nlohmann::ordered_json& j);
  static SetDescriptor parse(const std::string& text);
  std::string dump(int indent = -1) const;

 private:
  std::shared_ptr<const Variant> v_;
  // Cached at construction.
  std::optional<Nat> hull_min_;  // empty iff set empty
  std::optional<Nat> hull_max_;  // empty iff infinite
  std::vector<Nat> union_dups_;  // UnionOf: overcounted values, sorted

  void init_cache();
};

/// Materialized strictly increasing truncation of a set: the first n
/// elements, paired with the description they came from.
struct Prefix {
  std::shared_ptr<const SetDescriptor> source;
  std::vector<Nat> elements;

  std::size_t size() const { return elements.size(); }
};

Prefix take_prefix(const SetDescriptor& set, std::size_t n, Budget& budget);
Prefix take_prefix(const SetDescriptor& set, std::size_t n);

}  // namespace ratioblock
