#include "ratioblock/analysis.hpp"

#include <algorithm>
#include <cmath>

namespace ratioblock {

using nlohmann::ordered_json;

const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Converged: return "converged";
    case VerdictKind::Oscillating: return "oscillating";
    case VerdictKind::Diverging: return "diverging";
    case VerdictKind::Insufficient: return "insufficient";
  }
  return "?";
}

namespace {

// Assembles a LimitTrace from a full sequence of evaluations. Tail extremes
// run over the last half of the evaluations; recorded checkpoints are thinned
// to at most opt.max_checkpoints.
struct TraceBuilder {
  const TraceOptions& opt;
  std::vector<TracePoint> all;

  explicit TraceBuilder(const TraceOptions& opt) : opt(opt) {}

  void add(Nat t, double value, std::optional<Rat> exact = {}) {
    all.push_back({std::move(t), value, std::move(exact)});
  }

  LimitTrace finish() const {
    LimitTrace tr;
    if (all.size() < 2) {
      tr.checkpoints = all;
      tr.verdict.kind = VerdictKind::Insufficient;
      return tr;
    }
    std::size_t tail_start = all.size() / 2;
    bool first = true;
    for (std::size_t i = tail_start; i < all.size(); ++i) {
      const auto& pt = all[i];
      if (first || pt.value < tr.tail_inf) {
        tr.tail_inf = pt.value;
        tr.tail_inf_exact = pt.exact;
      }
      if (first || pt.value > tr.tail_sup) {
        tr.tail_sup = pt.value;
        tr.tail_sup_exact = pt.exact;
      }
      first = false;
    }
    if (tr.tail_sup - tr.tail_inf <= opt.tol) {
      tr.verdict.kind = VerdictKind::Converged;
      tr.verdict.value = (tr.tail_sup + tr.tail_inf) / 2;
    } else if (tr.tail_inf > opt.diverge_floor) {
      tr.verdict.kind = VerdictKind::Diverging;
      tr.verdict.value = tr.tail_inf;
    } else {
      tr.verdict.kind = VerdictKind::Oscillating;
      tr.verdict.value = tr.tail_sup;
    }
    // thin recorded checkpoints, keeping first/last
    std::size_t stride = std::max<std::size_t>(1, all.size() / opt.max_checkpoints);
    for (std::size_t i = 0; i < all.size(); ++i)
      if (i % stride == 0 || i + 1 == all.size()) tr.checkpoints.push_back(all[i]);
    return tr;
  }
};

// exponentially spaced indices 1..n (with both endpoints)
std::vector<std::size_t> exp_indices(std::size_t n, std::size_t per_octave = 16) {
  std::vector<std::size_t> out;
  std::size_t i = 1;
  double ratio = std::pow(2.0, 1.0 / static_cast<double>(per_octave));
  while (i <= n) {
    out.push_back(i);
    std::size_t next = static_cast<std::size_t>(std::ceil(i * ratio));
    i = std::max(next, i + 1);
  }
  if (out.back() != n) out.push_back(n);
  return out;
}

ordered_json rat_json(const Rat& r) {
  ordered_json j;
  j["exact"] = to_string(r);
  j["approx"] = to_double(r);
  return j;
}

}  // namespace

ordered_json LimitTrace::to_json() const {
  ordered_json j;
  ordered_json pts = ordered_json::array();
  for (const auto& pt : checkpoints) {
    ordered_json e;
    e["t"] = to_string(pt.t);
    e["value"] = pt.value;
    if (pt.exact) e["exact"] = to_string(*pt.exact);
    pts.push_back(std::move(e));
  }
  j["checkpoints"] = std::move(pts);
  j["inf"] = tail_inf;
  if (tail_inf_exact) j["inf_exact"] = to_string(*tail_inf_exact);
  j["sup"] = tail_sup;
  if (tail_sup_exact) j["sup_exact"] = to_string(*tail_sup_exact);
  ordered_json v;
  v["kind"] = to_string(verdict.kind);
  v["value"] = verdict.value;
  j["verdict"] = std::move(v);
  return j;
}

// ---------------------------------------------------------------------------
// step distribution function

Rat step_df(const Prefix& prefix, std::size_t n, const Rat& x) {
  if (n < 1 || n > prefix.size())
    throw DomainError("step_df: index out of range");
  if (sgn(x) < 0 || x > 1) throw DomainError("step_df: x must be in [0,1]");
  if (x == 1) return Rat(1);
  // a_i/a_n < x  <=>  a_i <= ceil(x a_n) - 1
  Nat thresh = ceil_rat(Rat(x * prefix.elements[n - 1])) - 1;
  auto end = prefix.elements.begin() + static_cast<std::ptrdiff_t>(n);
  std::size_t cnt =
      std::upper_bound(prefix.elements.begin(), end, thresh) -
      prefix.elements.begin();
  Rat r(Nat(cnt), Nat(n));
  r.canonicalize();
  return r;
}

DFEnvelope df_envelope(const Prefix& prefix, std::size_t window_lo,
                       std::size_t window_hi, const std::vector<Rat>& grid,
                       double tol) {
  if (window_lo < 1 || window_hi > prefix.size() || window_lo > window_hi)
    throw DomainError("df_envelope: empty or out-of-range window");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1])
      throw DomainError("df_envelope: grid must be strictly increasing");
  if (!grid.empty() && (sgn(grid.front()) < 0 || grid.back() > 1))
    throw DomainError("df_envelope: grid must lie in [0,1]");

  DFEnvelope env;
  env.grid = grid;
  env.window_lo = window_lo;
  env.window_hi = window_hi;
  env.lower.assign(grid.size(), Rat(2));
  env.upper.assign(grid.size(), Rat(-1));
  for (std::size_t n = window_lo; n <= window_hi; ++n) {
    for (std::size_t g = 0; g < grid.size(); ++g) {
      Rat f = step_df(prefix, n, grid[g]);
      if (f < env.lower[g]) env.lower[g] = f;
      if (f > env.upper[g]) env.upper[g] = f;
    }
  }
  env.singleton = true;
  for (std::size_t g = 0; g < grid.size(); ++g)
    if (to_double(env.upper[g]) - to_double(env.lower[g]) > tol)
      env.singleton = false;

  // model fit on interior grid points
  bool all_near_one = true;
  double q_sum = 0;
  std::size_t q_cnt = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (sgn(grid[g]) <= 0 || grid[g] >= 1) continue;
    double mid = (to_double(env.lower[g]) + to_double(env.upper[g])) / 2;
    if (to_double(env.upper[g]) < 1 - tol) all_near_one = false;
    if (mid > 0) {
      q_sum += std::log(mid) / log_of(grid[g]);
      ++q_cnt;
    }
  }
  if (all_near_one && q_cnt > 0) {
    env.model.kind = ModelDF::Kind::C0;
    env.model.q = 0;
  } else {
    env.model.kind = ModelDF::Kind::Power;
    env.model.q = q_cnt ? q_sum / static_cast<double>(q_cnt) : 0;
  }
  env.fit_error = 0;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    if (sgn(grid[g]) <= 0 || grid[g] >= 1) continue;
    double mid = (to_double(env.lower[g]) + to_double(env.upper[g])) / 2;
    double model = env.model.kind == ModelDF::Kind::C0
                       ? 1.0
                       : std::pow(to_double(grid[g]), env.model.q);
    env.fit_error = std::max(env.fit_error, std::fabs(mid - model));
  }
  return env;
}

ordered_json DFEnvelope::to_json() const {
  ordered_json j;
  ordered_json pts = ordered_json::array();
  for (std::size_t g = 0; g < grid.size(); ++g) {
    ordered_json e;
    e["x"] = rat_json(grid[g]);
    e["lower"] = rat_json(lower[g]);
    e["upper"] = rat_json(upper[g]);
    pts.push_back(std::move(e));
  }
  j["grid"] = std::move(pts);
  j["window"] = {window_lo, window_hi};
  j["singleton"] = singleton;
  j["model"] = model.kind == ModelDF::Kind::C0 ? "c0" : "power";
  j["model_q"] = model.q;
  j["fit_error"] = fit_error;
  return j;
}

// ---------------------------------------------------------------------------
// prefix traces

LimitTrace mean_ratio(const Prefix& prefix, const TraceOptions& opt) {
  if (prefix.size() < 2) throw DomainError("mean_ratio: need >= 2 elements");
  TraceBuilder tb(opt);
  auto idx = exp_indices(prefix.size());
  Nat sum = 0;
  std::size_t done = 0;
  for (std::size_t target : idx) {
    while (done < target) sum += prefix.elements[done++];
    Rat s(sum, Nat(target) * prefix.elements[target - 1]);
    s.canonicalize();
    tb.add(Nat(target), to_double(s), s);
  }
  return tb.finish();
}

LimitTrace lambda_trace(const Prefix& prefix, const TraceOptions& opt) {
  if (prefix.size() < 2) throw DomainError("lambda_trace: need >= 2 elements");
  TraceBuilder tb(opt);
  for (std::size_t n = 1; n <= prefix.size(); ++n) {
    const Nat& a = prefix.elements[n - 1];
    if (a == 1) continue;  // log 1 = 0
    tb.add(Nat(n), std::log(static_cast<double>(n)) / log_of(a));
  }
  return tb.finish();
}

LimitTrace dispersion_trace(const Prefix& prefix, const TraceOptions& opt) {
  if (prefix.size() < 2)
    throw DomainError("dispersion_trace: need >= 2 elements");
  TraceBuilder tb(opt);
  Nat max_gap = prefix.elements[0];  // a_1 seeds the max (a_0 = 0)
  for (std::size_t n = 2; n <= prefix.size(); ++n) {
    Nat gap = prefix.elements[n - 1] - prefix.elements[n - 2];
    if (gap > max_gap) max_gap = gap;
    Rat v(max_gap, prefix.elements[n - 1]);
    v.canonicalize();
    tb.add(Nat(n), to_double(v), v);
  }
  return tb.finish();
}

LimitTrace consecutive_ratio(const Prefix& prefix, const TraceOptions& opt) {
  if (prefix.size() < 2)
    throw DomainError("consecutive_ratio: need >= 2 elements");
  TraceBuilder tb(opt);
  for (std::size_t n = 1; n + 1 <= prefix.size(); ++n) {
    Rat r(prefix.elements[n], prefix.elements[n - 1]);
    r.canonicalize();
    tb.add(Nat(n), to_double(r), r);
  }
  return tb.finish();
}

LimitTrace index_dilation_ratio(const Prefix& prefix, unsigned long k,
                                const TraceOptions& opt) {
  if (k < 2) throw DomainError("index_dilation_ratio: k must be >= 2");
  if (prefix.size() < k)
    throw DomainError("index_dilation_ratio: prefix too short");
  TraceBuilder tb(opt);
  auto idx = exp_indices(prefix.size() / k);
  for (std::size_t n : idx) {
    Rat r(prefix.elements[k * n - 1], prefix.elements[n - 1]);
    r.canonicalize();
    tb.add(Nat(n), to_double(r), r);
  }
  return tb.finish();
}

// ---------------------------------------------------------------------------
// counting-function scans

LimitTrace ratio_scan(const SetDescriptor& set, const Rat& c,
                      const std::vector<Nat>& checkpoints,
                      const TraceOptions& opt) {
  if (sgn(c) <= 0) throw DomainError("ratio_scan: c must be > 0");
  TraceBuilder tb(opt);
  for (const Nat& t : checkpoints) {
    Nat den = set.count(t);
    if (den == 0)
      throw DomainError("ratio_scan: A(t) = 0 at t = " + to_string(t));
    Nat num = set.count_at(Rat(c * t));
    Rat v(num, den);
    v.canonicalize();
    tb.add(t, to_double(v), v);
  }
  return tb.finish();
}

LimitTrace dispersion_scan(const SetDescriptor& set,
                           const std::vector<Nat>& checkpoints,
                           const TraceOptions& opt) {
  TraceBuilder tb(opt);
  auto first = set.min_element();
  if (!first) throw DomainError("dispersion_scan: empty set");
  std::optional<Nat> prev_snapped;
  for (const Nat& x : checkpoints) {
    auto a = set.last_at_or_below(x);
    if (!a || *a == *first) continue;
    if (prev_snapped && *a == *prev_snapped) continue;
    prev_snapped = *a;
    Nat gap = set.max_gap_in(Nat(0), *a);
    if (*first > gap) gap = *first;
    Rat v(gap, *a);
    v.canonicalize();
    tb.add(*a, to_double(v), v);
  }
  return tb.finish();
}

LimitTrace lambda_scan(const SetDescriptor& set,
                       const std::vector<Nat>& checkpoints,
                       const TraceOptions& opt) {
  TraceBuilder tb(opt);
  for (const Nat& x : checkpoints) {
    if (x < 2) continue;
    Nat cnt = set.count(x);
    if (cnt < 1) continue;
    tb.add(x, log_of(cnt) / log_of(x));
  }
  return tb.finish();
}

// ---------------------------------------------------------------------------
// checkpoints

std::vector<Nat> geometric_checkpoints(const Nat& lo, const Nat& hi,
                                       std::size_t per_decade) {
  if (lo < 1 || hi < lo)
    throw DomainError("geometric_checkpoints: need 1 <= lo <= hi");
  // rational step close to 10^(1/per_decade); exact integer arithmetic so
  // the walk works beyond double range
  double step = std::pow(10.0, 1.0 / static_cast<double>(per_decade));
  Nat num(static_cast<unsigned long>(std::ceil(step * 4096)));
  Nat den(4096);
  std::vector<Nat> out;
  Nat t = lo;
  while (t <= hi) {
    out.push_back(t);
    Nat next;
    mpz_cdiv_q(next.get_mpz_t(), Nat(t * num).get_mpz_t(), den.get_mpz_t());
    t = next > t ? next : Nat(t + 1);
  }
  out.push_back(hi);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<Nat> structural_checkpoints(const SetDescriptor& set,
                                        const Nat& lo, const Nat& hi,
                                        std::size_t per_decade) {
  std::vector<Nat> out = geometric_checkpoints(lo, hi, per_decade);
  for (const Nat& b : set.boundary_points(lo, hi)) {
    out.push_back(b);
    if (b > lo) out.push_back(b - 1);
    if (b < hi) out.push_back(b + 1);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// lemma-style window comparison

ordered_json Lemma1Report::to_json() const {
  ordered_json j;
  j["grid_sup"] = rat_json(grid_sup);
  j["grid_inf"] = rat_json(grid_inf);
  j["restricted_sup"] = rat_json(restricted_sup);
  j["restricted_inf"] = rat_json(restricted_inf);
  j["sup_diff"] = sup_diff;
  j["inf_diff"] = inf_diff;
  j["grid_points"] = grid_points;
  j["restricted_points"] = restricted_points;
  return j;
}

Lemma1Report lemma1_check(const SetDescriptor& set, const Rat& c,
                          const Nat& lo, const Nat& hi,
                          std::size_t per_decade) {
  if (c <= 1) throw DomainError("lemma1_check: c must be > 1");
  if (lo < 1 || hi <= lo) throw DomainError("lemma1_check: bad window");
  auto skeleton = structural_checkpoints(set, lo, hi, per_decade);

  auto ratio_at = [&](const Rat& t) -> std::optional<Rat> {
    Nat den = set.count_at(t);
    if (den == 0) return {};
    Rat v(set.count_at(Rat(c * t)), den);
    v.canonicalize();
    return v;
  };

  Lemma1Report rep;
  bool grid_first = true;
  for (const Nat& t : skeleton) {
    auto v = ratio_at(Rat(t));
    if (!v) continue;
    ++rep.grid_points;
    if (grid_first || *v > rep.grid_sup) rep.grid_sup = *v;
    if (grid_first || *v < rep.grid_inf) rep.grid_inf = *v;
    grid_first = false;
  }

  // restricted form: t = a/c so that A(ct)/A(t) = A(a)/A(a/c)
  bool restr_first = true;
  std::optional<Nat> prev;
  for (const Nat& t : skeleton) {
    Nat ct = floor_rat(Rat(c * t));
    for (const auto& a : {set.last_at_or_below(ct), set.next_above(ct)}) {
      if (!a || (prev && *a == *prev)) continue;
      Rat tr = Rat(*a) / c;
      if (tr < Rat(lo) || tr > Rat(hi)) continue;
      auto v = ratio_at(tr);
      if (!v) continue;
      ++rep.restricted_points;
      if (restr_first || *v > rep.restricted_sup) rep.restricted_sup = *v;
      if (restr_first || *v < rep.restricted_inf) rep.restricted_inf = *v;
      restr_first = false;
    }
    prev = set.last_at_or_below(ct);
  }
  if (grid_first || restr_first)
    throw DomainError("lemma1_check: window holds no usable points");
  rep.sup_diff =
      std::fabs(to_double(rep.grid_sup) - to_double(rep.restricted_sup));
  rep.inf_diff =
      std::fabs(to_double(rep.grid_inf) - to_double(rep.restricted_inf));
  return rep;
}

// ---------------------------------------------------------------------------
// growth-condition probe

ordered_json NdenseProbeReport::to_json() const {
  ordered_json j;
  j["range"] = {to_string(range_lo), to_string(range_hi)};
  ordered_json arr = ordered_json::array();
  for (const auto& ch : checks) {
    ordered_json e;
    e["c"] = to_string(ch.c);
    e["checkpoints"] = ch.checkpoint_count;
    e["violations"] = ch.violation_count;
    e["tail_violations"] = ch.tail_violation_count;
    ordered_json w = ordered_json::array();
    for (const Nat& t : ch.witnesses) w.push_back(to_string(t));
    e["witnesses"] = std::move(w);
    if (ch.tail_min_diff) e["tail_min_diff"] = to_string(*ch.tail_min_diff);
    e["growth_holds"] = ch.growth_holds;
    e["difference_diverges"] = ch.difference_diverges;
    arr.push_back(std::move(e));
  }
  j["checks"] = std::move(arr);
  return j;
}

NdenseProbeReport ndense_probe(const SetDescriptor& set,
                               const std::vector<Rat>& cs, const Nat& lo,
                               const Nat& hi, std::size_t per_decade,
                               unsigned long growth_floor) {
  NdenseProbeReport rep;
  rep.range_lo = lo;
  rep.range_hi = hi;
  auto base = structural_checkpoints(set, lo, hi, per_decade);
  // include element-snapped points: growth failures start at elements
  std::vector<Nat> pts = base;
  for (const Nat& t : base) {
    if (auto a = set.last_at_or_below(t); a && *a >= lo) pts.push_back(*a);
    if (auto a = set.next_above(t); a && *a <= hi) pts.push_back(*a);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());

  for (const Rat& c : cs) {
    if (c <= 1) throw DomainError("ndense_probe: c must be > 1");
    NdenseCheck ch;
    ch.c = c;
    ch.checkpoint_count = pts.size();
    std::size_t tail_start = pts.size() / 2;
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const Nat& t = pts[i];
      Nat at = set.count(t);
      if (at == 0) continue;
      Nat act = set.count_at(Rat(c * t));
      Nat diff = act - at;
      if (diff == 0) {
        ++ch.violation_count;
        if (i >= tail_start) ++ch.tail_violation_count;
        if (ch.witnesses.size() < 64) ch.witnesses.push_back(t);
      }
      if (i >= tail_start && (!ch.tail_min_diff || diff < *ch.tail_min_diff))
        ch.tail_min_diff = diff;
    }
    ch.growth_holds = ch.tail_violation_count == 0;
    ch.difference_diverges =
        ch.growth_holds && ch.tail_min_diff && *ch.tail_min_diff >= growth_floor;
    rep.checks.push_back(std::move(ch));
  }
  return rep;
}

// ---------------------------------------------------------------------------
// attaining a target value

WindowAttainReport window_attaining(const Prefix& prefix, const Rat& c,
                                    const Rat& gamma, std::size_t window_lo,
                                    std::size_t window_hi) {
  if (sgn(c) <= 0 || c >= 1)
    throw DomainError("window_attaining: c must be in (0,1)");
  if (sgn(gamma) < 0 || gamma > 1)
    throw DomainError("window_attaining: gamma must be in [0,1]");
  if (window_lo < 1 || window_hi > prefix.size() || window_lo > window_hi)
    throw DomainError("window_attaining: empty window");
  WindowAttainReport rep;
  rep.residual = Rat(2);
  for (std::size_t n = window_lo; n <= window_hi; ++n) {
    Rat f = step_df(prefix, n, c);
    Rat res = rat_abs(f - gamma);
    if (res < rep.residual) {
      rep.residual = res;
      rep.f_value = f;
      rep.best_n = n;
    }
  }
  return rep;
}

}  // namespace ratioblock
