#ifndef MAJDYN_GENERATORS_HPP
#define MAJDYN_GENERATORS_HPP

#include <cstdint>
#include <vector>

#include "majdyn/graph.hpp"
#include "majdyn/rng.hpp"

namespace majdyn {

/// Erdős–Rényi G(n, p): each unordered pair kept independently with
/// probability p, sampled with geometric pair skipping in O(edges).
Graph gen_gnp(std::int64_t n, double p, Rng& rng);

struct RrgStats {
    std::int64_t attempts = 0; // pairings drawn, including the accepted one
};

/// Uniform simple d-regular graph via the configuration model with
/// whole-sample rejection of pairings containing a loop or multi-edge.
/// Throws BudgetError after `max_attempts` rejected pairings.
Graph gen_random_regular(std::int64_t n, std::int64_t d, Rng& rng,
                         std::int64_t max_attempts = 10000, RrgStats* stats = nullptr);

/// As above, but additionally resamples until the result is connected.
Graph gen_random_regular_connected(std::int64_t n, std::int64_t d, Rng& rng,
                                   std::int64_t max_attempts = 10000,
                                   RrgStats* stats = nullptr);

/// Radius-r ball in the infinite d-regular tree: root of degree d, internal
/// vertices of degree d, leaves of degree 1. Truncation boundary effect: a
/// leaf's degree is odd, so its only effective voter is its neighbor and it
/// copies that opinion each step.
Graph gen_tree_ball(std::int64_t degree, std::int64_t radius);

/// Leveled graph: levels L_0..L_{depth-1} with |L_k| = 2^{k+1} - 1, each
/// vertex adjacent to all of L_{k-1}, L_k minus itself, and L_{k+1}.
struct LevelGraphSpec {
    std::int64_t depth;
};

Graph gen_level_graph(const LevelGraphSpec& spec);

/// Start offset of each level plus a final sentinel (size depth + 1).
std::vector<std::int64_t> level_graph_offsets(std::int64_t depth);
inline std::int64_t level_size(std::int64_t k) { return (std::int64_t{2} << k) - 1; }

/// I.i.d. opinions: +1 with probability q, else -1; time = 0.
OpinionState gen_opinions_iid(std::int64_t n, double q, Rng& rng);

// Small deterministic families used by experiments and the test zoo.
Graph cycle_graph(std::int64_t n);
Graph path_graph(std::int64_t n);
Graph complete_graph(std::int64_t n);

} // namespace majdyn

#endif
