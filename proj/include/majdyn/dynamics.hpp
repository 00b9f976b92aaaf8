#ifndef MAJDYN_DYNAMICS_HPP
#define MAJDYN_DYNAMICS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "majdyn/graph.hpp"

namespace majdyn {

/// Synchronous majority update: y_i = sgn(sum of effective voters of i),
/// voter count odd by the self-vote tie rule so the sum is never zero.
OpinionState step(const Graph& g, const OpinionState& x);

/// Weighted update y_i = sgn(sum_j w(i,j) x_j + self_weight * x_i when the
/// self-vote is active). Throws TieError if any vertex sum is exactly zero.
OpinionState weighted_step(const Graph& g, const OpinionState& x, double self_weight = 1.0);

/// Raw buffer form used by the run loop; y must not alias x.
void step_into(const Graph& g, std::span<const std::int8_t> x, std::span<std::int8_t> y);
void weighted_step_into(const Graph& g, std::span<const std::int8_t> x,
                        std::span<std::int8_t> y, double self_weight);

/// Quadratic potential over the uniformly rooted finite graph:
///   L = (1/4n) sum_i sum_{j in eff N(i)} w(i,j) (x_i(t+1) - x_j(t))^2,
/// self-vote term included with weight `self_weight` where active
/// (weight 1 for unweighted graphs).
double potential(const Graph& g, const OpinionState& x_t, const OpinionState& x_t1,
                 double self_weight = 1.0);

/// Unweighted exact path: returns 4n * L as an integer.
std::int64_t potential_quarters(const Graph& g, std::span<const std::int8_t> x_t,
                                std::span<const std::int8_t> x_t1);

/// Both sides of the potential decrement identity over three consecutive
/// states:  lhs = L_t - L_{t-1},
///          rhs = -(1/2n) sum_i (x_i(t+1) - x_i(t-1)) * S_i(t),
/// where S_i(t) is vertex i's effective weighted vote sum. The two agree
/// exactly; for unweighted graphs lhs_q/rhs_q carry the integer numerators
/// in units of 1/(4n).
struct DecrementCheck {
    double lhs;
    double rhs;
    bool exact = false;
    std::int64_t lhs_q = 0;
    std::int64_t rhs_q = 0;
    bool holds(double rel_tol = 1e-12) const;
};

DecrementCheck potential_decrement_check(const Graph& g, const OpinionState& x_prev,
                                         const OpinionState& x_cur, const OpinionState& x_next,
                                         double self_weight = 1.0);

/// Exact (eps, W): eps is the minimum achievable |weighted vote sum| over all
/// sign patterns at every vertex (meet-in-the-middle enumeration), W the
/// maximum effective weighted degree. Throws TieError with a witness pattern
/// when eps = 0 is achievable, std::invalid_argument when a degree exceeds
/// `max_enum_degree`.
RegularityParams validate_regularity(const Graph& g, double self_weight = 1.0,
                                     int max_enum_degree = 20);

/// Per-step statistics of one trajectory. Row t covers state x(t); potential
/// row t holds L_t, which couples x(t) to x(t+1).
struct Trace {
    std::vector<double> mean;
    std::vector<std::int64_t> flips2;       // |{i : x_i(t) != x_i(t-2)}|, 0 for t < 2
    std::vector<double> potential;
    std::vector<std::uint8_t> unanimous;
    std::vector<std::int64_t> flips2_per_vertex; // cumulative over the run
    std::int64_t steps() const { return static_cast<std::int64_t>(mean.size()) - 1; }
    double average_flips_per_vertex() const;
    std::string to_csv() const;
};

struct RunOutcome {
    enum class Kind { FixedPoint, PeriodTwo, BudgetExhausted };
    Kind kind;
    std::int64_t entry_time; // first t with state(t) == state(t-2); -1 if budget hit
    OpinionState final_state;
    OpinionState previous_state;
};

const char* to_string(RunOutcome::Kind k);

struct RunOptions {
    bool weighted = false;
    double self_weight = 1.0;
    std::int64_t max_steps = 10000;
    std::int64_t min_steps = 0; // keep stepping past detection, for observers
    bool check_identity = true; // assert the decrement identity every step
    bool check_flip_bound = true;
    std::optional<RegularityParams> regularity; // required for weighted bound check
    std::function<void(std::int64_t, std::span<const std::int8_t>)> observer;
};

/// Iterates the dynamics double-buffered until state(t) == state(t-2)
/// (detected hash-first, confirmed exactly) or the step budget runs out.
/// Checked invariants throw InvariantViolation.
std::pair<Trace, RunOutcome> run(const Graph& g, const OpinionState& x0,
                                 const RunOptions& options = {});

} // namespace majdyn

#endif
