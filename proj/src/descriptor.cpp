#include "ratioblock/descriptor.hpp"

#include <algorithm>
#include <map>
#include <queue>

namespace ratioblock {

using nlohmann::ordered_json;

namespace {

constexpr unsigned long kMaxGeomSteps = 4'000'000;
constexpr std::size_t kSmallExplicit = 64;
// Ceiling for element searches on sets that never produce anything.
const Nat kSearchCeiling = Nat(1) << 512;

Nat clamp_nonneg(const Nat& x) { return x < 0 ? Nat(0) : x; }

unsigned long to_ulong(const Nat& x, const char* what) {
  if (!x.fits_ulong_p()) throw DomainError(std::string(what) + " too large");
  return x.get_ui();
}

// #multiples of step in (lo, hi]
Nat multiples_in(const Nat& step, const Nat& lo, const Nat& hi) {
  if (hi <= lo) return 0;
  Nat a, b;
  mpz_fdiv_q(a.get_mpz_t(), hi.get_mpz_t(), step.get_mpz_t());
  mpz_fdiv_q(b.get_mpz_t(), lo.get_mpz_t(), step.get_mpz_t());
  return a - b;
}

Nat first_multiple_above(const Nat& step, const Nat& lo) {
  Nat q;
  mpz_fdiv_q(q.get_mpz_t(), lo.get_mpz_t(), step.get_mpz_t());
  return (q + 1) * step;
}

Nat last_multiple_at_or_below(const Nat& step, const Nat& hi) {
  Nat q;
  mpz_fdiv_q(q.get_mpz_t(), hi.get_mpz_t(), step.get_mpz_t());
  return q * step;
}

struct PowerRootView {
  unsigned long u, v;  // q = u/v in lowest terms, exponent 1/q = v/u
  Nat j_min;
  std::optional<Nat> j_max;

  explicit PowerRootView(const SetDescriptor::PowerRoot& p) {
    u = to_ulong(Nat(p.q.get_num()), "power_root exponent numerator");
    v = to_ulong(Nat(p.q.get_den()), "power_root exponent denominator");
    j_min = p.j_min;
    j_max = p.j_max;
  }

  Nat element(const Nat& j) const { return iroot_ceil(ipow(j, v), u); }

  // largest j with element(j) <= x, ignoring the j-range
  Nat j_cap(const Nat& x) const {
    if (x <= 0) return 0;
    return iroot_floor(ipow(x, u), v);
  }

  Nat count(const Nat& x) const {
    Nat cap = j_cap(x);
    if (j_max && *j_max < cap) cap = *j_max;
    return clamp_nonneg(cap - j_min + 1);
  }
};

// A value window holding elements of one union part. Spans may over-cover
// (pure arithmetic, no element queries); exact intervals pin first/last to
// actual elements and are used for gap bridging.
struct SupportIv {
  Nat first;
  Nat last;
  const SetDescriptor* part;
  bool dedup_covered;  // duplicates inside handled by the union's dup list
};

bool is_small_explicit(const SetDescriptor& s) {
  const auto* e = std::get_if<SetDescriptor::Explicit>(&s.variant());
  return e && e->points.size() <= kSmallExplicit;
}

}  // namespace

// ---------------------------------------------------------------------------
// BlockRule

BlockRule BlockRule::factorial_even_odd(bool closed_start,
                                        std::optional<unsigned long> k_max) {
  BlockRule r;
  r.kind = Kind::FactorialAlternating;
  r.odd_start = false;
  r.closed_start = closed_start;
  r.k_max = k_max;
  return r;
}

BlockRule BlockRule::factorial_odd_even(std::optional<unsigned long> k_max) {
  BlockRule r;
  r.kind = Kind::FactorialAlternating;
  r.odd_start = true;
  r.k_max = k_max;
  return r;
}

BlockRule BlockRule::factorial_singletons() {
  BlockRule r;
  r.kind = Kind::FactorialSingletons;
  return r;
}

BlockRule BlockRule::explicit_blocks(std::vector<std::pair<Nat, Nat>> blocks) {
  BlockRule r;
  r.kind = Kind::Explicit;
  std::sort(blocks.begin(), blocks.end());
  for (std::size_t i = 0; i < blocks.size(); ++i) {
    if (blocks[i].second <= blocks[i].first)
      throw DomainError("explicit block with hi <= lo");
    if (i > 0 && blocks[i].first < blocks[i - 1].second)
      throw DomainError("explicit blocks overlap");
  }
  r.blocks = std::move(blocks);
  return r;
}

void BlockRule::for_each_block(
    const std::function<bool(const Nat&, const Nat&)>& f) const {
  switch (kind) {
    case Kind::Explicit:
      for (const auto& [lo, hi] : blocks)
        if (!f(lo, hi)) return;
      return;
    case Kind::FactorialSingletons: {
      // block m: (m! - 1, m!]
      Nat fact = 1;
      for (unsigned long m = 1;; ++m) {
        fact *= m;
        if (!f(fact - 1, fact)) return;
      }
    }
    case Kind::FactorialAlternating: {
      for (unsigned long k = 1;; ++k) {
        if (k_max && k > *k_max) return;
        unsigned long a = odd_start ? 2 * k - 1 : 2 * k;
        Nat lo = factorial(a);
        Nat hi = lo * (a + 1);
        if (closed_start) lo -= 1;
        if (!f(lo, hi)) return;
      }
    }
  }
}

bool BlockRule::is_finite() const {
  switch (kind) {
    case Kind::Explicit: return true;
    case Kind::FactorialSingletons: return false;
    case Kind::FactorialAlternating: return k_max.has_value();
  }
  return false;
}

ordered_json BlockRule::to_json() const {
  ordered_json j;
  switch (kind) {
    case Kind::FactorialAlternating:
      j["kind"] = "factorial_alternating";
      j["odd_start"] = odd_start;
      j["closed_start"] = closed_start;
      if (k_max) j["k_max"] = std::to_string(*k_max);
      break;
    case Kind::FactorialSingletons:
      j["kind"] = "factorial_singletons";
      break;
    case Kind::Explicit: {
      j["kind"] = "explicit";
      ordered_json arr = ordered_json::array();
      for (const auto& [lo, hi] : blocks)
        arr.push_back({to_string(lo), to_string(hi)});
      j["blocks"] = std::move(arr);
      break;
    }
  }
  return j;
}

BlockRule BlockRule::from_json(const ordered_json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "factorial_alternating") {
    BlockRule r;
    r.kind = Kind::FactorialAlternating;
    r.odd_start = j.value("odd_start", false);
    r.closed_start = j.value("closed_start", false);
    if (j.contains("k_max"))
      r.k_max = to_ulong(parse_nat(j.at("k_max").get<std::string>()), "k_max");
    return r;
  }
  if (kind == "factorial_singletons") return factorial_singletons();
  if (kind == "explicit") {
    std::vector<std::pair<Nat, Nat>> blocks;
    for (const auto& b : j.at("blocks"))
      blocks.emplace_back(parse_nat(b.at(0).get<std::string>()),
                          parse_nat(b.at(1).get<std::string>()));
    return explicit_blocks(std::move(blocks));
  }
  throw DomainError("unknown block rule kind: " + kind);
}

// ---------------------------------------------------------------------------
// Cursors: lazy strictly-increasing streams over (lo, hi]

namespace {

struct Cursor {
  virtual ~Cursor() = default;
  // next value, or empty when the range is exhausted
  virtual std::optional<Nat> next() = 0;
};

using CursorPtr = std::unique_ptr<Cursor>;

CursorPtr make_cursor(const SetDescriptor& set, const Nat& lo,
                      const std::optional<Nat>& hi, Budget& budget);

struct ExplicitCursor : Cursor {
  const std::vector<Nat>& pts;
  std::size_t i;
  std::optional<Nat> hi;
  Budget& budget;

  ExplicitCursor(const std::vector<Nat>& pts, const Nat& lo,
                 std::optional<Nat> hi, Budget& budget)
      : pts(pts), hi(std::move(hi)), budget(budget) {
    i = std::upper_bound(pts.begin(), pts.end(), lo) - pts.begin();
  }
  std::optional<Nat> next() override {
    if (i >= pts.size() || (hi && pts[i] > *hi)) return {};
    budget.charge();
    return pts[i++];
  }
};

struct PowerRootCursor : Cursor {
  PowerRootView view;
  Nat j;
  std::optional<Nat> hi;
  Budget& budget;

  PowerRootCursor(const SetDescriptor::PowerRoot& p, const Nat& lo,
                  std::optional<Nat> hi, Budget& budget)
      : view(p), hi(std::move(hi)), budget(budget) {
    j = view.j_cap(lo) + 1;  // first j with element > lo
    if (j < view.j_min) j = view.j_min;
  }
  std::optional<Nat> next() override {
    if (view.j_max && j > *view.j_max) return {};
    Nat e = view.element(j);
    if (hi && e > *hi) return {};
    budget.charge();
    j += 1;
    return e;
  }
};

// All integers (step == 1) or multiples of step inside blocks.
struct BlockIntsCursor : Cursor {
  const BlockRule rule;
  Nat step;
  Nat lo;
  std::optional<Nat> hi;
  Budget& budget;
  std::vector<std::pair<Nat, Nat>> clipped;
  std::size_t bi = 0;
  bool in_block = false;
  Nat cur, block_hi;

  BlockIntsCursor(const BlockRule& rule, Nat step, const Nat& lo,
                  std::optional<Nat> hi, Budget& budget)
      : rule(rule), step(std::move(step)), lo(lo), hi(std::move(hi)),
        budget(budget) {
    collect(Nat(0));
  }

  void collect(const Nat& from) {
    rule.for_each_block([&](const Nat& blo, const Nat& bhi) {
      if (hi && blo >= *hi) return false;
      if (bhi <= from) return true;
      Nat clo = std::max(blo, lo);
      Nat chi = hi ? std::min(bhi, *hi) : bhi;
      if (clo < chi) clipped.emplace_back(clo, chi);
      if (!hi) return clipped.size() < bi + 64;
      return true;
    });
  }

  std::optional<Nat> next() override {
    while (true) {
      if (in_block) {
        budget.charge();
        Nat out = cur;
        cur += step;
        if (cur > block_hi) in_block = false;
        return out;
      }
      if (bi >= clipped.size()) {
        if (hi || rule.is_finite()) return {};
        std::size_t before = clipped.size();
        collect(clipped.empty() ? lo : clipped.back().second);
        if (clipped.size() == before) return {};
      }
      const auto& [clo, chi] = clipped[bi];
      cur = first_multiple_above(step, clo);
      block_hi = chi;
      ++bi;
      if (cur <= block_hi) in_block = true;
    }
  }
};

struct PowerBlocksCursor : Cursor {
  std::optional<unsigned long> n_max;
  std::optional<Nat> hi;
  Budget& budget;
  unsigned long n = 0;
  Nat j, j_end;
  std::optional<Nat> last;
  Nat lo;

  PowerBlocksCursor(const SetDescriptor::PowerBlocks& p, const Nat& lo,
                    std::optional<Nat> hi, Budget& budget)
      : n_max(p.n_max), hi(std::move(hi)), budget(budget), lo(lo) {
    advance_block();
  }

  void advance_block() {
    while (true) {
      ++n;
      if (n_max && n > *n_max) {
        n = 0;
        return;
      }
      Nat j_start = ipow(Nat(n), n - 1);
      j_end = ipow(Nat(n + 1), n + 1);
      if (hi && ipow(j_start, n) > *hi) {
        n = 0;
        return;
      }
      if (ipow(j_end, n) <= lo) continue;  // entire block below range
      Nat j_lo = iroot_floor(lo, n) + 1;   // first j with j^n > lo
      j = std::max(j_start, j_lo);
      if (j <= j_end) return;
    }
  }

  std::optional<Nat> next() override {
    while (n != 0) {
      if (j > j_end) {
        advance_block();
        continue;
      }
      Nat e = ipow(j, n);
      j += 1;
      if (hi && e > *hi) {
        n = 0;
        return {};
      }
      if (last && e == *last) continue;  // shared block endpoint
      budget.charge();
      last = e;
      return e;
    }
    return {};
  }
};

struct GeometricCursor : Cursor {
  Nat anchor;
  Nat rp, rs;  // ratio = rp/rs
  unsigned long j, j_limit;
  bool has_j_limit;
  Nat P, S;  // rp^j, rs^j
  std::optional<Nat> hi;
  std::optional<Nat> last;
  Budget& budget;
  unsigned long steps = 0;

  GeometricCursor(const SetDescriptor::GeometricCeil& g, const Nat& lo,
                  std::optional<Nat> hi_in, Budget& budget)
      : anchor(g.anchor), rp(g.ratio.get_num()), rs(g.ratio.get_den()),
        budget(budget) {
    j = g.j_min;
    has_j_limit = g.j_max.has_value();
    j_limit = g.j_max.value_or(0);
    hi = std::move(hi_in);
    if (g.value_hi && (!hi || *g.value_hi < *hi)) hi = g.value_hi;
    Nat eff_lo = lo;
    if (g.value_lo && *g.value_lo > eff_lo) eff_lo = *g.value_lo;
    P = ipow(rp, j);
    S = ipow(rs, j);
    while (!(has_j_limit && j > j_limit)) {
      if (element() > eff_lo) break;
      step();
      if (++steps > kMaxGeomSteps)
        throw BudgetExceededError("geometric walk too long");
    }
  }

  Nat element() const {
    Nat e;
    Nat num = anchor * P;
    mpz_cdiv_q(e.get_mpz_t(), num.get_mpz_t(), S.get_mpz_t());
    return e;
  }

  void step() {
    ++j;
    P *= rp;
    S *= rs;
  }

  std::optional<Nat> next() override {
    while (true) {
      if (has_j_limit && j > j_limit) return {};
      if (++steps > kMaxGeomSteps)
        throw BudgetExceededError("geometric walk too long");
      Nat e = element();
      if (hi && e > *hi) return {};
      step();
      if (last && e == *last) continue;
      budget.charge();
      last = e;
      return e;
    }
  }
};

struct UnionCursor : Cursor {
  struct Head {
    Nat value;
    std::size_t idx;
    bool operator>(const Head& o) const { return value > o.value; }
  };
  std::vector<CursorPtr> children;
  std::priority_queue<Head, std::vector<Head>, std::greater<Head>> heap;
  std::optional<Nat> last;

  UnionCursor(const SetDescriptor::UnionOf& u, const Nat& lo,
              const std::optional<Nat>& hi, Budget& budget) {
    for (const auto& part : u.parts) {
      auto c = make_cursor(part, lo, hi, budget);
      if (auto v = c->next()) {
        heap.push({std::move(*v), children.size()});
        children.push_back(std::move(c));
      }
    }
  }

  std::optional<Nat> next() override {
    while (!heap.empty()) {
      Head h = heap.top();
      heap.pop();
      if (auto v = children[h.idx]->next())
        heap.push({std::move(*v), h.idx});
      if (last && h.value == *last) continue;
      last = h.value;
      return last;
    }
    return {};
  }
};

struct MaskedCursor : Cursor {
  const SetDescriptor& inner;
  Budget& budget;
  std::vector<std::pair<Nat, Nat>> clipped;
  std::size_t bi = 0;
  CursorPtr cur;
  const BlockRule rule;
  Nat lo;
  std::optional<Nat> hi;
  std::optional<Nat> inner_max;
  Nat rule_progress = 0;  // unclipped hi of the last fetched block

  MaskedCursor(const SetDescriptor::Masked& m, const Nat& lo,
               std::optional<Nat> hi, Budget& budget)
      : inner(*m.inner), budget(budget), rule(m.mask), lo(lo),
        hi(std::move(hi)) {
    inner_max = inner.max_element();
    fetch();
  }

  void fetch() {
    rule.for_each_block([&](const Nat& blo, const Nat& bhi) {
      if (hi && blo >= *hi) return false;
      if (inner_max && blo > *inner_max) return false;
      if (bhi <= rule_progress) return true;
      rule_progress = bhi;
      Nat clo = std::max(blo, lo);
      Nat chi = hi ? std::min(bhi, *hi) : bhi;
      if (clo < chi) clipped.emplace_back(clo, chi);
      return clipped.size() < bi + 64;
    });
  }

  std::optional<Nat> next() override {
    while (true) {
      if (cur) {
        if (auto v = cur->next()) return v;
        cur.reset();
      }
      if (bi >= clipped.size()) {
        std::size_t before = clipped.size();
        fetch();
        if (clipped.size() == before) return {};
      }
      budget.charge();  // per opened mask block
      cur = make_cursor(inner, clipped[bi].first,
                        std::optional<Nat>(clipped[bi].second), budget);
      ++bi;
    }
  }
};

CursorPtr make_cursor(const SetDescriptor& set, const Nat& lo,
                      const std::optional<Nat>& hi, Budget& budget) {
  return std::visit(
      [&](const auto& d) -> CursorPtr {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, SetDescriptor::Explicit>)
          return std::make_unique<ExplicitCursor>(d.points, lo, hi, budget);
        else if constexpr (std::is_same_v<T, SetDescriptor::PowerRoot>)
          return std::make_unique<PowerRootCursor>(d, lo, hi, budget);
        else if constexpr (std::is_same_v<T, SetDescriptor::IntervalBlocks>)
          return std::make_unique<BlockIntsCursor>(d.rule, Nat(1), lo, hi,
                                                   budget);
        else if constexpr (std::is_same_v<T, SetDescriptor::ProgressionBlocks>)
          return std::make_unique<BlockIntsCursor>(d.rule, d.step, lo, hi,
                                                   budget);
        else if constexpr (std::is_same_v<T, SetDescriptor::PowerBlocks>)
          return std::make_unique<PowerBlocksCursor>(d, lo, hi, budget);
        else if constexpr (std::is_same_v<T, SetDescriptor::GeometricCeil>)
          return std::make_unique<GeometricCursor>(d, lo, hi, budget);
        else if constexpr (std::is_same_v<T, SetDescriptor::UnionOf>)
          return std::make_unique<UnionCursor>(d, lo, hi, budget);
        else
          return std::make_unique<MaskedCursor>(d, lo, hi, budget);
      },
      set.variant());
}

// Coarse value windows per part, cheap (hulls and block walks only). Sets
// with disjoint spans are disjoint; over-coverage can only cause a harmless
// fallback, never a wrong count.
void collect_spans(const SetDescriptor& set, const Nat& clip_hi, bool as_dedup,
                   std::vector<SupportIv>& out) {
  auto emit = [&](const Nat& a, const Nat& b) {
    if (a > clip_hi || b < a) return;
    out.push_back({a, std::min(b, clip_hi), &set, as_dedup});
  };
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, SetDescriptor::Explicit>) {
          if (d.points.empty()) return;
          if (d.points.size() <= kSmallExplicit) {
            for (const Nat& p : d.points) emit(p, p);
          } else {
            emit(d.points.front(), d.points.back());
          }
        } else if constexpr (std::is_same_v<T, SetDescriptor::IntervalBlocks>) {
          d.rule.for_each_block([&](const Nat& lo, const Nat& hi) {
            if (lo >= clip_hi) return false;
            emit(lo + 1, hi);
            return true;
          });
        } else if constexpr (std::is_same_v<T,
                                            SetDescriptor::ProgressionBlocks>) {
          d.rule.for_each_block([&](const Nat& lo, const Nat& hi) {
            if (lo >= clip_hi) return false;
            if (multiples_in(d.step, lo, hi) > 0)
              emit(first_multiple_above(d.step, lo),
                   last_multiple_at_or_below(d.step, hi));
            return true;
          });
        } else if constexpr (std::is_same_v<T, SetDescriptor::UnionOf>) {
          for (const auto& part : d.parts)
            collect_spans(part, clip_hi, as_dedup || is_small_explicit(part),
                          out);
        } else if constexpr (std::is_same_v<T, SetDescriptor::Masked>) {
          d.mask.for_each_block([&](const Nat& lo, const Nat& hi) {
            if (lo >= clip_hi) return false;
            emit(lo + 1, hi);
            return true;
          });
        } else {
          if (set.is_empty()) return;
          Nat b = set.max_element() ? std::min(*set.max_element(), clip_hi)
                                    : clip_hi;
          emit(*set.min_element(), b);
        }
      },
      set.variant());
}

// Exact per-block intervals: first/last are actual elements. Costs element
// queries; used by gap analysis, not by counting.
void collect_support(const SetDescriptor& set, const Nat& clip_hi,
                     std::vector<SupportIv>& out) {
  auto emit = [&](const Nat& first, const Nat& last) {
    if (first > clip_hi || last < first) return;
    out.push_back({first, last, &set, false});
  };
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, SetDescriptor::Explicit>) {
          for (const Nat& p : d.points) {
            if (p > clip_hi) break;
            emit(p, p);
          }
        } else if constexpr (std::is_same_v<T, SetDescriptor::PowerRoot>) {
          PowerRootView view(d);
          Nat jb = view.j_cap(clip_hi);
          if (view.j_max && *view.j_max < jb) jb = *view.j_max;
          if (jb < view.j_min) return;
          emit(view.element(view.j_min), view.element(jb));
        } else if constexpr (std::is_same_v<T, SetDescriptor::IntervalBlocks>) {
          d.rule.for_each_block([&](const Nat& lo, const Nat& hi) {
            if (lo >= clip_hi) return false;
            Nat chi = std::min(hi, clip_hi);
            if (chi > lo) emit(lo + 1, chi);
            return true;
          });
        } else if constexpr (std::is_same_v<T,
                                            SetDescriptor::ProgressionBlocks>) {
          d.rule.for_each_block([&](const Nat& lo, const Nat& hi) {
            if (lo >= clip_hi) return false;
            Nat chi = std::min(hi, clip_hi);
            if (multiples_in(d.step, lo, chi) > 0)
              emit(first_multiple_above(d.step, lo),
                   last_multiple_at_or_below(d.step, chi));
            return true;
          });
        } else if constexpr (std::is_same_v<T, SetDescriptor::UnionOf>) {
          for (const auto& part : d.parts)
            collect_support(part, clip_hi, out);
        } else if constexpr (std::is_same_v<T, SetDescriptor::Masked>) {
          d.mask.for_each_block([&](const Nat& lo, const Nat& hi) {
            if (lo >= clip_hi) return false;
            Nat chi = std::min(hi, clip_hi);
            if (d.inner->count(chi) - d.inner->count(lo) > 0)
              emit(*d.inner->next_above(lo), *d.inner->last_at_or_below(chi));
            return true;
          });
        } else {
          // PowerBlocks, GeometricCeil: one contiguous stretch
          if (set.is_empty()) return;
          auto el = set.last_at_or_below(clip_hi);
          if (el) emit(*set.min_element(), *el);
        }
      },
      set.variant());
}

// Exact max gap for PowerRoot within j-window [ja, jb]. Real gaps
// (j+1)^s - j^s with s = v/u >= 1 are nondecreasing in j and the ceiling
// perturbs each by under one, so once s*j0^(s-1) <= M-1 every gap left of
// j0 stays below M.
Nat power_root_max_gap(const PowerRootView& view, const Nat& ja,
                       const Nat& jb) {
  if (jb <= ja) return 0;
  if (view.u == view.v) return 1;  // q = 1: consecutive integers
  Nat window = 64;
  while (true) {
    Nat j0 = jb - window < ja ? ja : Nat(jb - window);
    Nat m = 0;
    Nat prev = view.element(j0);
    for (Nat j = j0 + 1; j <= jb; ++j) {
      Nat e = view.element(j);
      if (e - prev > m) m = e - prev;
      prev = e;
    }
    if (j0 == ja) return m;
    if (m > 1) {
      // (v/u) * j0^((v-u)/u) <= m-1, both sides raised to the u-th power
      Nat lhs = ipow(Nat(view.v), view.u) * ipow(j0, view.v - view.u);
      Nat rhs = ipow(Nat((m - 1) * view.u), view.u);
      if (lhs <= rhs) return m;
    }
    window *= 2;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// SetDescriptor construction

SetDescriptor::SetDescriptor(Variant v)
    : v_(std::make_shared<const Variant>(std::move(v))) {
  init_cache();
}

SetDescriptor SetDescriptor::explicit_set(std::vector<Nat> points,
                                          bool finite_points_tag) {
  for (const Nat& p : points)
    if (p <= 0) throw DomainError("set elements must be positive integers");
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return SetDescriptor(Explicit{std::move(points), finite_points_tag});
}

SetDescriptor SetDescriptor::power_root(Rat q, Nat j_min,
                                        std::optional<Nat> j_max) {
  if (sgn(q) <= 0 || q > 1)
    throw DomainError("power_root: q must be in (0,1]");
  if (j_min < 1) throw DomainError("power_root: j_min must be >= 1");
  return SetDescriptor(
      PowerRoot{std::move(q), std::move(j_min), std::move(j_max)});
}

SetDescriptor SetDescriptor::interval_blocks(BlockRule rule) {
  return SetDescriptor(IntervalBlocks{std::move(rule)});
}

SetDescriptor SetDescriptor::progression_blocks(Nat step, BlockRule rule) {
  if (step < 1) throw DomainError("progression_blocks: step must be >= 1");
  return SetDescriptor(ProgressionBlocks{std::move(step), std::move(rule)});
}

SetDescriptor SetDescriptor::power_blocks(std::optional<unsigned long> n_max) {
  return SetDescriptor(PowerBlocks{n_max});
}

SetDescriptor SetDescriptor::geometric_ceil(Nat anchor, Rat ratio,
                                            unsigned long j_min,
                                            std::optional<unsigned long> j_max,
                                            std::optional<Nat> value_lo,
                                            std::optional<Nat> value_hi) {
  if (anchor < 1) throw DomainError("geometric_ceil: anchor must be >= 1");
  if (ratio <= 1) throw DomainError("geometric_ceil: ratio must be > 1");
  if (j_min < 1) throw DomainError("geometric_ceil: j_min must be >= 1");
  return SetDescriptor(GeometricCeil{std::move(anchor), std::move(ratio),
                                     j_min, j_max, std::move(value_lo),
                                     std::move(value_hi)});
}

SetDescriptor SetDescriptor::union_of(std::vector<SetDescriptor> parts) {
  return SetDescriptor(UnionOf{std::move(parts)});
}

SetDescriptor SetDescriptor::masked(SetDescriptor inner, BlockRule mask) {
  return SetDescriptor(
      Masked{std::make_shared<const SetDescriptor>(std::move(inner)),
             std::move(mask)});
}

const char* SetDescriptor::family_name() const {
  return std::visit(
      [](const auto& d) -> const char* {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Explicit>)
          return d.finite_points_tag ? "finite_points" : "explicit";
        else if constexpr (std::is_same_v<T, PowerRoot>)
          return "power_root";
        else if constexpr (std::is_same_v<T, IntervalBlocks>)
          return "interval_blocks";
        else if constexpr (std::is_same_v<T, ProgressionBlocks>)
          return "progression_blocks";
        else if constexpr (std::is_same_v<T, PowerBlocks>)
          return "power_blocks";
        else if constexpr (std::is_same_v<T, GeometricCeil>)
          return "geometric_ceil";
        else if constexpr (std::is_same_v<T, UnionOf>)
          return "union";
        else
          return "masked";
      },
      *v_);
}

// ---------------------------------------------------------------------------
// counting

Nat SetDescriptor::count(const Nat& x) const {
  if (x <= 0) return 0;
  if (hull_min_ && x < *hull_min_) return 0;
  return std::visit(
      [&](const auto& d) -> Nat {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Explicit>) {
          return Nat(std::upper_bound(d.points.begin(), d.points.end(), x) -
                     d.points.begin());
        } else if constexpr (std::is_same_v<T, PowerRoot>) {
          return PowerRootView(d).count(x);
        } else if constexpr (std::is_same_v<T, IntervalBlocks>) {
          Nat total = 0;
          d.rule.for_each_block([&](const Nat& lo, const Nat& hi) {
            if (lo >= x) return false;
            total += std::min(hi, x) - lo;
            return true;
          });
          return total;
        } else if constexpr (std::is_same_v<T, ProgressionBlocks>) {
          Nat total = 0;
          d.rule.for_each_block([&](const Nat& lo, const Nat& hi) {
            if (lo >= x) return false;
            total += multiples_in(d.step, lo, std::min(hi, x));
            return true;
          });
          return total;
        } else if constexpr (std::is_same_v<T, PowerBlocks>) {
          Nat total = 0;
          for (unsigned long n = 1;; ++n) {
            if (d.n_max && n > *d.n_max) break;
            Nat j_start = ipow(Nat(n), n - 1);
            if (ipow(j_start, n) > x) break;
            Nat j_end = ipow(Nat(n + 1), n + 1);
            Nat cap = std::min(iroot_floor(x, n), j_end);
            total += cap - j_start + 1;
            // shared endpoint with the next block counted twice
            bool next_exists = !d.n_max || n + 1 <= *d.n_max;
            if (next_exists && cap == j_end) total -= 1;
          }
          return total;
        } else if constexpr (std::is_same_v<T, GeometricCeil>) {
          // exact logarithmic-length walk with collision dedup
          Budget b;
          b.limit = kMaxGeomSteps;
          auto cur = make_cursor(*this, Nat(0), std::optional<Nat>(x), b);
          Nat total = 0;
          while (cur->next()) total += 1;
          return total;
        } else if constexpr (std::is_same_v<T, UnionOf>) {
          std::vector<SupportIv> ivs;
          for (const auto& part : d.parts)
            collect_spans(part, x, is_small_explicit(part), ivs);
          std::sort(ivs.begin(), ivs.end(),
                    [](const SupportIv& a, const SupportIv& b) {
                      return a.first < b.first;
                    });
          // an overlap between two parts is fine when at least one side's
          // values sit in the precomputed duplicate list
          bool clean = true;
          std::optional<Nat> run_last;  // max last among non-dedup spans
          for (const auto& iv : ivs) {
            if (iv.dedup_covered) continue;
            if (run_last && iv.first <= *run_last) {
              clean = false;
              break;
            }
            if (!run_last || iv.last > *run_last) run_last = iv.last;
          }
          if (clean) {
            Nat total = 0;
            for (const auto& part : d.parts) total += part.count(x);
            total -= Nat(std::upper_bound(union_dups_.begin(),
                                          union_dups_.end(), x) -
                         union_dups_.begin());
            return total;
          }
          Budget b;
          Nat total = 0;
          auto cur = make_cursor(*this, Nat(0), std::optional<Nat>(x), b);
          while (cur->next()) total += 1;
          return total;
        } else {  // Masked
          Nat total = 0;
          d.mask.for_each_block([&](const Nat& lo, const Nat& hi) {
            if (lo >= x) return false;
            total += d.inner->count(std::min(hi, x)) - d.inner->count(lo);
            return true;
          });
          return total;
        }
      },
      *v_);
}

Nat SetDescriptor::count_at(const Rat& x) const {
  if (sgn(x) <= 0) return 0;
  return count(floor_rat(x));
}

bool SetDescriptor::contains(const Nat& v) const {
  if (v < 1) return false;
  if (const auto* e = std::get_if<Explicit>(v_.get()))
    return std::binary_search(e->points.begin(), e->points.end(), v);
  return count(v) > count(v - 1);
}

void SetDescriptor::enumerate_range(
    const Nat& lo, const std::optional<Nat>& hi, Budget& budget,
    const std::function<bool(const Nat&)>& yield) const {
  if (hi && *hi < lo) throw DomainError("enumerate_range: hi < lo");
  auto cur = make_cursor(*this, lo, hi, budget);
  while (auto v = cur->next())
    if (!yield(*v)) return;
}

std::vector<Nat> SetDescriptor::elements_in(const Nat& lo, const Nat& hi,
                                            Budget& budget) const {
  std::vector<Nat> out;
  enumerate_range(lo, hi, budget, [&](const Nat& v) {
    out.push_back(v);
    return true;
  });
  return out;
}

Nat SetDescriptor::element_at(const Nat& index) const {
  if (index < 1) throw DomainError("element_at: index must be >= 1");
  if (is_empty() || (is_finite() && cardinality() < index))
    throw ExhaustedError("element_at: set has fewer elements");
  Nat lo = *hull_min_;
  if (count(lo) >= index) return lo;
  Nat hi = lo;
  while (count(hi) < index) {
    hi *= 2;
    if (hi > kSearchCeiling)
      throw ExhaustedError("element_at: no element below search ceiling");
  }
  // count(lo) < index <= count(hi)
  while (hi - lo > 1) {
    Nat mid = (lo + hi) / 2;
    if (count(mid) >= index)
      hi = mid;
    else
      lo = mid;
  }
  return hi;
}

std::optional<Nat> SetDescriptor::next_above(const Nat& v) const {
  Nat idx = count(v < 0 ? Nat(0) : v) + 1;
  try {
    return element_at(idx);
  } catch (const ExhaustedError&) {
    return {};
  }
}

std::optional<Nat> SetDescriptor::last_at_or_below(const Nat& v) const {
  if (v < 1) return {};
  Nat idx = count(v);
  if (idx == 0) return {};
  return element_at(idx);
}

std::optional<Nat> SetDescriptor::min_element() const { return hull_min_; }

std::optional<Nat> SetDescriptor::max_element() const { return hull_max_; }

bool SetDescriptor::is_finite() const {
  return hull_max_.has_value() || !hull_min_;
}

bool SetDescriptor::is_empty() const { return !hull_min_.has_value(); }

Nat SetDescriptor::cardinality() const {
  if (!is_finite()) throw DomainError("cardinality of an infinite set");
  if (is_empty()) return 0;
  return count(*hull_max_);
}

// ---------------------------------------------------------------------------
// gaps

Nat SetDescriptor::max_gap_in(const Nat& lo, const Nat& hi) const {
  if (hi <= lo) return 0;
  if (hull_min_ && hi < *hull_min_) return 0;
  return std::visit(
      [&](const auto& d) -> Nat {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Explicit>) {
          Nat best = 0;
          auto it = std::upper_bound(d.points.begin(), d.points.end(), lo);
          for (; it != d.points.end() && *it <= hi; ++it)
            if (it != d.points.begin() && *(it - 1) > lo && *it - *(it - 1) > best)
              best = *it - *(it - 1);
          return best;
        } else if constexpr (std::is_same_v<T, PowerRoot>) {
          PowerRootView view(d);
          Nat ja = std::max(view.j_min, Nat(view.j_cap(lo) + 1));
          Nat jb = view.j_cap(hi);
          if (view.j_max && *view.j_max < jb) jb = *view.j_max;
          return power_root_max_gap(view, ja, jb);
        } else if constexpr (std::is_same_v<T, IntervalBlocks> ||
                             std::is_same_v<T, ProgressionBlocks>) {
          Nat step = 1;
          if constexpr (std::is_same_v<T, ProgressionBlocks>) step = d.step;
          Nat best = 0;
          std::optional<Nat> prev_last;
          d.rule.for_each_block([&](const Nat& blo, const Nat& bhi) {
            if (blo >= hi) return false;
            Nat clo = std::max(blo, lo);
            Nat chi = std::min(bhi, hi);
            if (clo >= chi) return true;
            Nat n = multiples_in(step, clo, chi);
            if (n == 0) return true;
            Nat first = first_multiple_above(step, clo);
            Nat last = last_multiple_at_or_below(step, chi);
            if (prev_last) best = std::max(best, Nat(first - *prev_last));
            if (n > 1) best = std::max(best, step);
            prev_last = last;
            return true;
          });
          return best;
        } else if constexpr (std::is_same_v<T, PowerBlocks>) {
          Nat best = 0;
          std::optional<Nat> prev_last;
          for (unsigned long n = 1;; ++n) {
            if (d.n_max && n > *d.n_max) break;
            Nat j_start = ipow(Nat(n), n - 1);
            if (ipow(j_start, n) >= hi) break;
            Nat j_end = ipow(Nat(n + 1), n + 1);
            Nat ja = std::max(j_start, Nat(iroot_floor(lo, n) + 1));
            Nat jb = std::min(j_end, iroot_floor(hi, n));
            if (ja > jb) continue;
            Nat first = ipow(ja, n);
            Nat last = ipow(jb, n);
            if (prev_last && first > *prev_last)
              best = std::max(best, Nat(first - *prev_last));
            // per-block gaps grow with j, so the top pair decides
            if (jb > ja)
              best = std::max(best, Nat(last - ipow(Nat(jb - 1), n)));
            prev_last = last;
          }
          return best;
        } else if constexpr (std::is_same_v<T, GeometricCeil>) {
          Budget b;
          b.limit = kMaxGeomSteps;
          Nat best = 0;
          std::optional<Nat> prev;
          auto cur = make_cursor(*this, lo, std::optional<Nat>(hi), b);
          while (auto v = cur->next()) {
            if (prev && *v - *prev > best) best = *v - *prev;
            prev = *v;
          }
          return best;
        } else if constexpr (std::is_same_v<T, UnionOf>) {
          if (!union_dups_.empty()) {
            // overlapping parts: walk the merged stream
            Budget b;
            Nat best = 0;
            std::optional<Nat> prev;
            auto cur = make_cursor(*this, lo, std::optional<Nat>(hi), b);
            while (auto v = cur->next()) {
              if (prev && *v - *prev > best) best = *v - *prev;
              prev = *v;
            }
            return best;
          }
          std::vector<SupportIv> ivs;
          for (const auto& part : d.parts) collect_support(part, hi, ivs);
          std::sort(ivs.begin(), ivs.end(),
                    [](const SupportIv& a, const SupportIv& b) {
                      return a.first < b.first;
                    });
          Nat best = 0;
          std::optional<Nat> prev_last;
          for (const auto& iv : ivs) {
            if (iv.last <= lo) continue;
            Nat clo = std::max(lo, Nat(iv.first - 1));
            best = std::max(best, iv.part->max_gap_in(clo, iv.last));
            if (prev_last && iv.first > lo && iv.first > *prev_last)
              best = std::max(best, Nat(iv.first - *prev_last));
            if (!prev_last || iv.last > *prev_last) prev_last = iv.last;
          }
          return best;
        } else {  // Masked
          Nat best = 0;
          std::optional<Nat> prev_last;
          d.mask.for_each_block([&](const Nat& blo, const Nat& bhi) {
            if (blo >= hi) return false;
            Nat clo = std::max(blo, lo);
            Nat chi = std::min(bhi, hi);
            if (clo >= chi) return true;
            if (d.inner->count(chi) - d.inner->count(clo) <= 0) return true;
            Nat first = *d.inner->next_above(clo);
            Nat last = *d.inner->last_at_or_below(chi);
            if (prev_last && first > lo)
              best = std::max(best, Nat(first - *prev_last));
            best = std::max(best, d.inner->max_gap_in(clo, chi));
            prev_last = last;
            return true;
          });
          return best;
        }
      },
      *v_);
}

std::vector<Nat> SetDescriptor::boundary_points(const Nat& lo,
                                                const Nat& hi) const {
  std::vector<Nat> out;
  auto push = [&](const Nat& v) {
    if (v >= lo && v <= hi) out.push_back(v);
  };
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, IntervalBlocks> ||
                      std::is_same_v<T, ProgressionBlocks>) {
          d.rule.for_each_block([&](const Nat& blo, const Nat& bhi) {
            if (blo > hi) return false;
            push(blo);
            push(bhi);
            return true;
          });
        } else if constexpr (std::is_same_v<T, PowerBlocks>) {
          for (unsigned long n = 1;; ++n) {
            if (d.n_max && n > *d.n_max) break;
            Nat block_min = ipow(ipow(Nat(n), n - 1), n);
            if (block_min > hi) break;
            push(block_min);
            push(ipow(ipow(Nat(n + 1), n + 1), n));
          }
        } else if constexpr (std::is_same_v<T, GeometricCeil>) {
          if (d.value_lo) push(*d.value_lo);
          if (d.value_hi) push(*d.value_hi);
          if (hull_min_) push(*hull_min_);
          if (hull_max_) push(*hull_max_);
        } else if constexpr (std::is_same_v<T, UnionOf>) {
          for (const auto& part : d.parts) {
            auto sub = part.boundary_points(lo, hi);
            out.insert(out.end(), sub.begin(), sub.end());
          }
        } else if constexpr (std::is_same_v<T, Masked>) {
          d.mask.for_each_block([&](const Nat& blo, const Nat& bhi) {
            if (blo > hi) return false;
            push(blo);
            push(bhi);
            return true;
          });
          auto sub = d.inner->boundary_points(lo, hi);
          out.insert(out.end(), sub.begin(), sub.end());
        } else {
          if (hull_min_) push(*hull_min_);
          if (hull_max_) push(*hull_max_);
        }
      },
      *v_);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// construction cache

namespace {

void gather_small_explicit_points(const SetDescriptor& set,
                                  std::vector<Nat>& out) {
  if (const auto* e =
          std::get_if<SetDescriptor::Explicit>(&set.variant())) {
    if (e->points.size() <= kSmallExplicit)
      out.insert(out.end(), e->points.begin(), e->points.end());
    return;
  }
  if (const auto* u = std::get_if<SetDescriptor::UnionOf>(&set.variant()))
    for (const auto& part : u->parts)
      gather_small_explicit_points(part, out);
}

}  // namespace

void SetDescriptor::init_cache() {
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Explicit>) {
          if (!d.points.empty()) {
            hull_min_ = d.points.front();
            hull_max_ = d.points.back();
          }
        } else if constexpr (std::is_same_v<T, PowerRoot>) {
          PowerRootView view(d);
          if (view.j_max && *view.j_max < view.j_min) return;  // empty
          hull_min_ = view.element(view.j_min);
          if (view.j_max) hull_max_ = view.element(*view.j_max);
        } else if constexpr (std::is_same_v<T, IntervalBlocks> ||
                             std::is_same_v<T, ProgressionBlocks>) {
          Nat step = 1;
          if constexpr (std::is_same_v<T, ProgressionBlocks>) step = d.step;
          std::optional<Nat> first, last;
          bool finite = d.rule.is_finite();
          d.rule.for_each_block([&](const Nat& blo, const Nat& bhi) {
            if (multiples_in(step, blo, bhi) > 0) {
              if (!first) first = first_multiple_above(step, blo);
              last = last_multiple_at_or_below(step, bhi);
            }
            return finite || !first;  // infinite rule: stop at first element
          });
          hull_min_ = first;
          if (finite) hull_max_ = last;
        } else if constexpr (std::is_same_v<T, PowerBlocks>) {
          if (d.n_max && *d.n_max == 0) return;  // empty
          hull_min_ = Nat(1);
          if (d.n_max) {
            unsigned long n = *d.n_max;
            hull_max_ = ipow(ipow(Nat(n + 1), n + 1), n);
          }
        } else if constexpr (std::is_same_v<T, GeometricCeil>) {
          Budget b;
          b.limit = kMaxGeomSteps;
          auto cur = make_cursor(*this, Nat(0), std::nullopt, b);
          auto first = cur->next();
          if (!first) return;  // empty window
          hull_min_ = *first;
          if (d.j_max || d.value_hi) {
            Nat last = *first;
            while (auto v = cur->next()) last = *v;
            hull_max_ = last;
          }
        } else if constexpr (std::is_same_v<T, UnionOf>) {
          bool all_finite = true;
          for (const auto& part : d.parts) {
            if (part.is_empty()) continue;
            if (!part.is_finite()) all_finite = false;
            if (!hull_min_ || *part.min_element() < *hull_min_)
              hull_min_ = part.min_element();
          }
          if (!hull_min_) return;  // empty union
          if (all_finite) {
            Nat m = 0;
            for (const auto& part : d.parts)
              if (!part.is_empty()) m = std::max(m, *part.max_element());
            hull_max_ = m;
          }
          // Values appearing in several parts are overcounted by plain
          // summation; collect them through the small explicit parts.
          std::vector<Nat> candidates;
          for (const auto& part : d.parts)
            gather_small_explicit_points(part, candidates);
          std::sort(candidates.begin(), candidates.end());
          candidates.erase(std::unique(candidates.begin(), candidates.end()),
                           candidates.end());
          for (const Nat& p : candidates) {
            int mult = 0;
            for (const auto& part : d.parts)
              if (part.contains(p)) ++mult;
            for (int i = 1; i < mult; ++i) union_dups_.push_back(p);
          }
        } else {  // Masked
          Budget b;
          auto cur = make_cursor(*this, Nat(0), std::nullopt, b);
          std::optional<Nat> first;
          try {
            first = cur->next();
          } catch (const BudgetExceededError&) {
            throw DomainError(
                "masked: no element found within the probe budget");
          }
          if (!first) return;  // empty
          hull_min_ = *first;
          if (d.inner->is_finite() || d.mask.is_finite()) {
            std::optional<Nat> ub = d.inner->max_element();
            if (d.mask.is_finite()) {
              Nat last_hi = 0;
              d.mask.for_each_block([&](const Nat&, const Nat& bhi) {
                last_hi = bhi;
                return true;
              });
              if (!ub || last_hi < *ub) ub = last_hi;
            }
            if (ub) hull_max_ = element_at(count(*ub));
          }
        }
      },
      *v_);
}

// ---------------------------------------------------------------------------
// serialization

ordered_json SetDescriptor::to_json() const {
  ordered_json j;
  j["family"] = family_name();
  ordered_json p = ordered_json::object();
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Explicit>) {
          ordered_json arr = ordered_json::array();
          for (const Nat& v : d.points) arr.push_back(to_string(v));
          p["points"] = std::move(arr);
        } else if constexpr (std::is_same_v<T, PowerRoot>) {
          p["q"] = to_string(d.q);
          p["j_min"] = to_string(d.j_min);
          if (d.j_max) p["j_max"] = to_string(*d.j_max);
        } else if constexpr (std::is_same_v<T, IntervalBlocks>) {
          p["rule"] = d.rule.to_json();
        } else if constexpr (std::is_same_v<T, ProgressionBlocks>) {
          p["step"] = to_string(d.step);
          p["rule"] = d.rule.to_json();
        } else if constexpr (std::is_same_v<T, PowerBlocks>) {
          if (d.n_max) p["n_max"] = std::to_string(*d.n_max);
        } else if constexpr (std::is_same_v<T, GeometricCeil>) {
          p["anchor"] = to_string(d.anchor);
          p["ratio"] = to_string(d.ratio);
          p["j_min"] = std::to_string(d.j_min);
          if (d.j_max) p["j_max"] = std::to_string(*d.j_max);
          if (d.value_lo) p["value_lo"] = to_string(*d.value_lo);
          if (d.value_hi) p["value_hi"] = to_string(*d.value_hi);
        } else if constexpr (std::is_same_v<T, UnionOf>) {
          ordered_json arr = ordered_json::array();
          for (const auto& part : d.parts) arr.push_back(part.to_json());
          p["parts"] = std::move(arr);
        } else {  // Masked
          p["inner"] = d.inner->to_json();
          p["mask"] = d.mask.to_json();
        }
      },
      *v_);
  j["params"] = std::move(p);
  return j;
}

SetDescriptor SetDescriptor::from_json(const ordered_json& j) {
  const std::string family = j.at("family").get<std::string>();
  const ordered_json& p = j.at("params");
  auto get_nat = [&](const char* key) {
    return parse_nat(p.at(key).get<std::string>());
  };
  auto opt_nat = [&](const char* key) -> std::optional<Nat> {
    if (!p.contains(key)) return {};
    return parse_nat(p.at(key).get<std::string>());
  };
  if (family == "explicit" || family == "finite_points") {
    std::vector<Nat> pts;
    for (const auto& v : p.at("points"))
      pts.push_back(parse_nat(v.get<std::string>()));
    return explicit_set(std::move(pts), family == "finite_points");
  }
  if (family == "power_root")
    return power_root(parse_rat(p.at("q").get<std::string>()),
                      p.contains("j_min") ? get_nat("j_min") : Nat(1),
                      opt_nat("j_max"));
  if (family == "interval_blocks")
    return interval_blocks(BlockRule::from_json(p.at("rule")));
  if (family == "progression_blocks")
    return progression_blocks(get_nat("step"),
                              BlockRule::from_json(p.at("rule")));
  if (family == "power_blocks") {
    std::optional<unsigned long> n_max;
    if (p.contains("n_max"))
      n_max = to_ulong(parse_nat(p.at("n_max").get<std::string>()), "n_max");
    return power_blocks(n_max);
  }
  if (family == "geometric_ceil") {
    std::optional<unsigned long> j_max;
    if (p.contains("j_max"))
      j_max = to_ulong(parse_nat(p.at("j_max").get<std::string>()), "j_max");
    unsigned long j_min = 1;
    if (p.contains("j_min"))
      j_min = to_ulong(parse_nat(p.at("j_min").get<std::string>()), "j_min");
    return geometric_ceil(get_nat("anchor"),
                          parse_rat(p.at("ratio").get<std::string>()), j_min,
                          j_max, opt_nat("value_lo"), opt_nat("value_hi"));
  }
  if (family == "union") {
    std::vector<SetDescriptor> parts;
    for (const auto& part : p.at("parts")) parts.push_back(from_json(part));
    return union_of(std::move(parts));
  }
  if (family == "masked")
    return masked(from_json(p.at("inner")),
                  BlockRule::from_json(p.at("mask")));
  throw DomainError("unknown set family: " + family);
}

SetDescriptor SetDescriptor::parse(const std::string& text) {
  return from_json(ordered_json::parse(text));
}

std::string SetDescriptor::dump(int indent) const {
  return to_json().dump(indent);
}

// ---------------------------------------------------------------------------
// Prefix

Prefix take_prefix(const SetDescriptor& set, std::size_t n, Budget& budget) {
  if (n < 1) throw DomainError("take_prefix: n must be >= 1");
  Prefix p;
  p.source = std::make_shared<const SetDescriptor>(set);
  p.elements.reserve(n);
  set.enumerate_range(Nat(0), std::nullopt, budget, [&](const Nat& v) {
    p.elements.push_back(v);
    return p.elements.size() < n;
  });
  if (p.elements.size() < n)
    throw ExhaustedError("take_prefix: set exhausted after " +
                         std::to_string(p.elements.size()) + " elements");
  return p;
}

Prefix take_prefix(const SetDescriptor& set, std::size_t n) {
  Budget b;
  return take_prefix(set, n, b);
}

}  // namespace ratioblock
