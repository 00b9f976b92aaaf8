#ifndef MAJDYN_PERCOLATION_HPP
#define MAJDYN_PERCOLATION_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "majdyn/graph.hpp"
#include "majdyn/rng.hpp"

namespace majdyn {

/// Connected components of the subgraph induced by one opinion sign.
struct ComponentStructure {
    std::vector<std::int32_t> component; // -1 for vertices of the other sign
    std::vector<std::int64_t> sizes;     // indexed by component id
    std::int64_t member_count = 0;
    std::int64_t edge_count = 0;         // edges inside the induced subgraph
    std::int64_t count() const { return static_cast<std::int64_t>(sizes.size()); }
    std::int64_t largest() const;
    std::map<std::int64_t, std::int64_t> size_histogram() const;
};

ComponentStructure induced_subgraph_by_sign(const Graph& g, const OpinionState& x,
                                            std::int8_t sign);

/// First DFS back-edge cycle inside the sign-induced subgraph, or nullopt if
/// that subgraph is a forest. Deterministic: lowest-index roots, sorted
/// adjacency.
std::optional<std::vector<Vertex>> find_monochromatic_cycle(const Graph& g,
                                                            const OpinionState& x,
                                                            std::int8_t sign);

/// For a 4-regular graph (self-vote active everywhere, 5 voters): verifies
/// the cycle is valid and monochromatic, that every cycle vertex has at
/// least 2 same-sign neighbors on the cycle (hence >= 3 of its 5 votes are
/// fixed), and dynamically that one update step leaves the cycle unchanged.
/// Throws on a non-4-regular graph or a structurally invalid cycle.
bool certify_frozen(const Graph& g, const OpinionState& x, std::span<const Vertex> cycle);

/// Open-set summary of a site percolation sample.
struct SiteSample {
    std::int64_t open_count = 0;
    std::int64_t component_count = 0;
    std::int64_t largest_component = 0;
    bool has_cycle = false;
    std::optional<std::vector<Vertex>> witness_cycle;
};

/// Two-stage marking: a (p_base - eps) sample unioned with an independent
/// eps sprinkle, equal in distribution to Bernoulli(p_base - (p_base-eps)*eps).
struct TwoStageReport {
    double p_base;
    double eps;
    double p_effective;
    SiteSample stage1;
    SiteSample combined;
};

TwoStageReport two_stage_percolation(const Graph& g, double p_base, double eps, Rng& rng);

/// Per-sign cluster report of an opinion state: component count and size
/// histogram plus the witness cycle (vertex array) or null, for both signs.
nlohmann::ordered_json cluster_report_json(const Graph& g, const OpinionState& x);

} // namespace majdyn

#endif
