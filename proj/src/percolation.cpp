#include "majdyn/percolation.hpp"

#include <algorithm>
#include <stdexcept>

#include "majdyn/dynamics.hpp"
#include "majdyn/errors.hpp"

namespace majdyn {

namespace {

void require_sign(std::int8_t sign) {
    if (sign != 1 && sign != -1) throw std::invalid_argument("sign must be +1 or -1");
}

} // namespace

std::int64_t ComponentStructure::largest() const {
    std::int64_t best = 0;
    for (auto s : sizes) best = std::max(best, s);
    return best;
}

std::map<std::int64_t, std::int64_t> ComponentStructure::size_histogram() const {
    std::map<std::int64_t, std::int64_t> hist;
    for (auto s : sizes) ++hist[s];
    return hist;
}

ComponentStructure induced_subgraph_by_sign(const Graph& g, const OpinionState& x,
                                            std::int8_t sign) {
    require_sign(sign);
    if (x.size() != g.vertex_count())
        throw std::invalid_argument("opinion state length does not match graph");
    const std::int64_t n = g.vertex_count();
    ComponentStructure out;
    out.component.assign(n, -1);

    std::vector<Vertex> stack;
    for (Vertex root = 0; root < n; ++root) {
        if (x.values[root] != sign || out.component[root] != -1) continue;
        const auto id = static_cast<std::int32_t>(out.sizes.size());
        out.sizes.push_back(0);
        out.component[root] = id;
        stack.push_back(root);
        while (!stack.empty()) {
            const Vertex v = stack.back();
            stack.pop_back();
            ++out.sizes[id];
            ++out.member_count;
            for (Vertex u : g.neighbors(v)) {
                if (x.values[u] != sign) continue;
                out.edge_count += (u > v); // count each inside edge once
                if (out.component[u] == -1) {
                    out.component[u] = id;
                    stack.push_back(u);
                }
            }
        }
    }
    return out;
}

std::optional<std::vector<Vertex>> find_monochromatic_cycle(const Graph& g,
                                                            const OpinionState& x,
                                                            std::int8_t sign) {
    require_sign(sign);
    if (x.size() != g.vertex_count())
        throw std::invalid_argument("opinion state length does not match graph");
    const std::int64_t n = g.vertex_count();
    std::vector<Vertex> parent(n, -2); // -2 unvisited, -1 root
    std::vector<Vertex> stack;

    for (Vertex root = 0; root < n; ++root) {
        if (x.values[root] != sign || parent[root] != -2) continue;
        parent[root] = -1;
        stack.assign(1, root);
        while (!stack.empty()) {
            const Vertex v = stack.back();
            stack.pop_back();
            for (Vertex u : g.neighbors(v)) {
                if (x.values[u] != sign) continue;
                if (parent[u] == -2) {
                    parent[u] = v;
                    stack.push_back(u);
                } else if (u != parent[v] && v != parent[u]) {
                    // non-tree edge: close the cycle through both parent
                    // chains at their meeting point
                    std::vector<Vertex> anc;
                    for (Vertex w = v; w != -1; w = parent[w]) anc.push_back(w);
                    std::vector<std::uint8_t> mark(n, 0);
                    for (Vertex w : anc) mark[w] = 1;
                    Vertex meet = u;
                    while (!mark[meet]) meet = parent[meet];
                    std::vector<Vertex> cycle;
                    for (Vertex w = v; w != meet; w = parent[w]) cycle.push_back(w);
                    cycle.push_back(meet);
                    std::vector<Vertex> side;
                    for (Vertex w = u; w != meet; w = parent[w]) side.push_back(w);
                    std::reverse(side.begin(), side.end());
                    cycle.insert(cycle.end(), side.begin(), side.end());
                    if (cycle.size() >= 3) return cycle;
                }
            }
        }
    }
    return std::nullopt;
}

bool certify_frozen(const Graph& g, const OpinionState& x, std::span<const Vertex> cycle) {
    if (x.size() != g.vertex_count())
        throw std::invalid_argument("opinion state length does not match graph");
    for (Vertex v = 0; v < g.vertex_count(); ++v)
        if (g.degree(v) != 4)
            throw std::invalid_argument("certify_frozen: graph is not 4-regular (vertex " +
                                        std::to_string(v) + " has degree " +
                                        std::to_string(g.degree(v)) + ")");
    const std::size_t len = cycle.size();
    if (len < 3) throw std::invalid_argument("certify_frozen: cycle must have length >= 3");
    const std::int8_t sign = x.values[cycle[0]];
    std::vector<std::uint8_t> seen(g.vertex_count(), 0);
    for (std::size_t i = 0; i < len; ++i) {
        const Vertex v = cycle[i];
        if (v < 0 || v >= g.vertex_count())
            throw std::invalid_argument("certify_frozen: cycle vertex out of range");
        if (seen[v]) throw std::invalid_argument("certify_frozen: repeated cycle vertex");
        seen[v] = 1;
        if (x.values[v] != sign)
            throw std::invalid_argument("certify_frozen: cycle is not monochromatic");
        const Vertex next = cycle[(i + 1) % len];
        if (!g.has_edge(v, next))
            throw std::invalid_argument("certify_frozen: consecutive cycle vertices " +
                                        std::to_string(v) + ", " + std::to_string(next) +
                                        " are not adjacent");
    }

    // each cycle vertex must see >= 2 same-sign cycle neighbors; with the
    // self-vote that fixes 3 of its 5 votes
    for (std::size_t i = 0; i < len; ++i) {
        const Vertex v = cycle[i];
        int same_on_cycle = 0;
        for (Vertex u : g.neighbors(v)) same_on_cycle += (seen[u] && x.values[u] == sign);
        if (same_on_cycle < 2) return false;
    }

    // dynamic check: one update step leaves the cycle vertices unchanged
    const OpinionState y = step(g, x);
    for (Vertex v : cycle)
        if (y.values[v] != x.values[v]) return false;
    return true;
}

namespace {

SiteSample summarize_open_set(const Graph& g, const std::vector<std::int8_t>& open) {
    OpinionState state;
    state.values = open;
    SiteSample sample;
    for (auto v : open) sample.open_count += (v == 1);
    const auto comps = induced_subgraph_by_sign(g, state, 1);
    sample.component_count = comps.count();
    sample.largest_component = comps.largest();
    sample.witness_cycle = find_monochromatic_cycle(g, state, 1);
    sample.has_cycle = sample.witness_cycle.has_value();
    return sample;
}

} // namespace

TwoStageReport two_stage_percolation(const Graph& g, double p_base, double eps, Rng& rng) {
    if (!(eps > 0.0 && eps < p_base && p_base < 1.0))
        throw std::invalid_argument("two-stage percolation: need 0 < eps < p_base < 1");
    const std::int64_t n = g.vertex_count();
    TwoStageReport report;
    report.p_base = p_base;
    report.eps = eps;
    report.p_effective = p_base - (p_base - eps) * eps;

    std::vector<std::int8_t> stage1(n), combined(n);
    for (std::int64_t v = 0; v < n; ++v) {
        const bool first = rng.bernoulli(p_base - eps);
        const bool sprinkle = rng.bernoulli(eps);
        stage1[v] = first ? 1 : -1;
        combined[v] = (first || sprinkle) ? 1 : -1;
    }
    report.stage1 = summarize_open_set(g, stage1);
    report.combined = summarize_open_set(g, combined);
    return report;
}

nlohmann::ordered_json cluster_report_json(const Graph& g, const OpinionState& x) {
    nlohmann::ordered_json out;
    for (const auto& [sign, key] : {std::pair<std::int8_t, const char*>{1, "plus"},
                                   {-1, "minus"}}) {
        const auto comps = induced_subgraph_by_sign(g, x, sign);
        nlohmann::ordered_json side;
        side["members"] = comps.member_count;
        side["components"] = comps.count();
        side["largest"] = comps.largest();
        nlohmann::ordered_json hist = nlohmann::ordered_json::object();
        for (const auto& [size, count] : comps.size_histogram())
            hist[std::to_string(size)] = count;
        side["size_histogram"] = hist;
        const auto cycle = find_monochromatic_cycle(g, x, sign);
        side["witness_cycle"] = cycle ? nlohmann::ordered_json(*cycle)
                                      : nlohmann::ordered_json(nullptr);
        out[key] = side;
    }
    return out;
}

} // namespace majdyn
