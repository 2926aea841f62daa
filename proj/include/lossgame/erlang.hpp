#pragma once

// Erlang-B blocking probability of an M/M/n/n loss system and its inverse in
// the offered load.

namespace lossgame {

/// Offered load a = lambda / mu, in erlangs.
class OfferedLoad {
 public:
  /// Throws DomainError unless the value is finite and non-negative.
  explicit OfferedLoad(double erlangs);
  double value() const noexcept { return value_; }

 private:
  double value_;
};

/// B(n, a) by the recurrence B(0,a) = 1, B(m,a) = a B(m-1,a) / (m + a B(m-1,a)).
/// Values below the smallest double underflow to zero; see log_erlang_b.
double erlang_b(int servers, OfferedLoad load);
inline double erlang_b(int servers, double load) { return erlang_b(servers, OfferedLoad(load)); }

/// log B(n, a), accurate where B itself underflows. Uses the reciprocal
/// recurrence 1/B(m) = 1 + (m/a) / B(m-1) carried in log space.
double log_erlang_b(int servers, OfferedLoad load);
inline double log_erlang_b(int servers, double load) {
  return log_erlang_b(servers, OfferedLoad(load));
}

/// The load a with B(n, a) = target, for n >= 1 and target in (0, 1).
/// Bracketed geometrically from a = 1 (or from the small-load estimate
/// a^n/n! ~ target when that is far smaller), then bisected in log a to full
/// double precision. Throws NoConvergenceError if bisection does not close.
OfferedLoad inverse_erlang_b(int servers, double target);

/// As inverse_erlang_b with the target given as log B, so targets far below
/// the double range are reachable.
OfferedLoad inverse_erlang_b_log(int servers, double log_target);

namespace detail {

/// Bisection for log a on a caller-supplied bracket [log_lo, log_hi] that is
/// known to contain the root. Used by the equilibrium solver to reuse brackets.
double solve_log_load(int servers, double log_target, double log_lo, double log_hi);

}  // namespace detail

}  // namespace lossgame
