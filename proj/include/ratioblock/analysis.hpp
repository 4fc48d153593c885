#pragma once

#include <optional>
#include <vector>

#include "ratioblock/descriptor.hpp"

namespace ratioblock {

enum class VerdictKind { Converged, Oscillating, Diverging, Insufficient };

const char* to_string(VerdictKind k);

/// Finite surrogate for a liminf/limsup claim: extremes are taken over the
/// tail window (the last half of the evaluated points), and the sequence
/// counts as converged when the tail oscillation stays within tol.
struct Verdict {
  VerdictKind kind = VerdictKind::Insufficient;
  double value = 0;  // midpoint of the tail when converged
};

struct TracePoint {
  Nat t;  // index n or argument t, depending on the statistic
  double value;
  std::optional<Rat> exact;
};

struct LimitTrace {
  std::vector<TracePoint> checkpoints;
  double tail_inf = 0;
  double tail_sup = 0;
  std::optional<Rat> tail_inf_exact, tail_sup_exact;
  Verdict verdict;

  nlohmann::ordered_json to_json() const;
};

struct TraceOptions {
  double tol = 1e-2;
  double diverge_floor = 1e6;
  std::size_t max_checkpoints = 96;
};

/// F(A_n, x) = #{i <= n : a_i/a_n < x} / n for x in [0,1); F(A_n, 1) = 1.
Rat step_df(const Prefix& prefix, std::size_t n, const Rat& x);

/// The only possible limit shapes of a singleton family: the unit jump at 0
/// or a power x^q.
struct ModelDF {
  enum class Kind { C0, Power } kind = Kind::Power;
  double q = 0;
};

struct DFEnvelope {
  std::vector<Rat> grid;
  std::vector<Rat> lower, upper;  // pointwise extremes of F(A_n, .) over n
  std::size_t window_lo = 0, window_hi = 0;
  bool singleton = false;  // upper - lower < tol everywhere
  ModelDF model;
  double fit_error = 0;

  nlohmann::ordered_json to_json() const;
};

/// Pointwise envelope of the step distribution functions over a window of
/// block indices [window_lo, window_hi] (1-based, inclusive).
DFEnvelope df_envelope(const Prefix& prefix, std::size_t window_lo,
                       std::size_t window_hi, const std::vector<Rat>& grid,
                       double tol = 1e-2);

/// S_n = (sum of the first n elements) / (n a_n) at exponentially spaced n.
LimitTrace mean_ratio(const Prefix& prefix, const TraceOptions& opt = {});

/// log n / log a_n; the tail sup estimates the convergence exponent.
LimitTrace lambda_trace(const Prefix& prefix, const TraceOptions& opt = {});

/// (1/a_n) max{a_1, a_{i+1} - a_i : i < n}; the tail inf estimates the
/// dispersion. Max gaps are maintained incrementally.
LimitTrace dispersion_trace(const Prefix& prefix, const TraceOptions& opt = {});

/// a_{n+1}/a_n with tail extremes over every index.
LimitTrace consecutive_ratio(const Prefix& prefix,
                             const TraceOptions& opt = {});

/// a_{kn}/a_n at exponentially spaced n.
LimitTrace index_dilation_ratio(const Prefix& prefix, unsigned long k,
                                const TraceOptions& opt = {});

/// A(ct)/A(t) by closed-form counting, c t evaluated exactly as a rational.
LimitTrace ratio_scan(const SetDescriptor& set, const Rat& c,
                      const std::vector<Nat>& checkpoints,
                      const TraceOptions& opt = {});

/// Counting statistics evaluated at set elements snapped below the given
/// checkpoints: the descriptor-scale route to dispersion when prefixes are
/// enumeration-infeasible. Agrees with dispersion_trace at matched indices.
LimitTrace dispersion_scan(const SetDescriptor& set,
                           const std::vector<Nat>& checkpoints,
                           const TraceOptions& opt = {});

/// log A(x) / log x at the given arguments.
LimitTrace lambda_scan(const SetDescriptor& set,
                       const std::vector<Nat>& checkpoints,
                       const TraceOptions& opt = {});

/// Extremes of A(ct)/A(t) over a dense grid in [lo, hi] versus over the
/// restricted points t = a/c (a running over set elements near the grid).
struct Lemma1Report {
  Rat grid_sup, grid_inf;
  Rat restricted_sup, restricted_inf;
  double sup_diff = 0, inf_diff = 0;
  std::size_t grid_points = 0, restricted_points = 0;

  nlohmann::ordered_json to_json() const;
};

Lemma1Report lemma1_check(const SetDescriptor& set, const Rat& c,
                          const Nat& lo, const Nat& hi,
                          std::size_t per_decade = 48);

/// For each c: witnesses of A(ct) = A(t) (the growth condition failing) and
/// the minimum of A(ct) - A(t) over the tail window.
struct NdenseCheck {
  Rat c;
  std::size_t checkpoint_count = 0;
  std::size_t violation_count = 0;       // over the whole range
  std::size_t tail_violation_count = 0;  // over the tail window
  std::vector<Nat> witnesses;            // capped sample of violating t
  std::optional<Nat> tail_min_diff;
  bool growth_holds = false;      // condition: A(ct) > A(t) on the tail
  bool difference_diverges = false;  // tail min diff clears the floor
};

struct NdenseProbeReport {
  std::vector<NdenseCheck> checks;
  Nat range_lo, range_hi;

  nlohmann::ordered_json to_json() const;
};

NdenseProbeReport ndense_probe(const SetDescriptor& set,
                               const std::vector<Rat>& cs, const Nat& lo,
                               const Nat& hi, std::size_t per_decade = 48,
                               unsigned long growth_floor = 10);

/// argmin over n in [window_lo, window_hi] of |F(A_n, c) - gamma|.
struct WindowAttainReport {
  std::size_t best_n = 0;
  Rat f_value;
  Rat residual;
};

WindowAttainReport window_attaining(const Prefix& prefix, const Rat& c,
                                    const Rat& gamma, std::size_t window_lo,
                                    std::size_t window_hi);

/// Geometric checkpoints from lo to hi (exact integer stepping, usable at
/// factorial scale), merged with the set's structural boundary points when
/// a set is given.
std::vector<Nat> geometric_checkpoints(const Nat& lo, const Nat& hi,
                                       std::size_t per_decade = 16);
std::vector<Nat> structural_checkpoints(const SetDescriptor& set,
                                        const Nat& lo, const Nat& hi,
                                        std::size_t per_decade = 16);

}  // namespace ratioblock
