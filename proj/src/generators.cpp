#include "majdyn/generators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "majdyn/errors.hpp"

namespace majdyn {

namespace {

Graph csr_from_lex_edges(std::int64_t n, const std::vector<Edge>& edges) {
    std::vector<std::int64_t> offsets(n + 1, 0);
    for (const auto& [i, j] : edges) {
        ++offsets[i + 1];
        ++offsets[j + 1];
    }
    for (std::int64_t v = 0; v < n; ++v) offsets[v + 1] += offsets[v];
    std::vector<Vertex> adjacency(edges.size() * 2);
    std::vector<std::int64_t> cursor(offsets.begin(), offsets.end() - 1);
    // edges are sorted by (i, j) with i < j, so appending the below-v
    // neighbors first and the above-v neighbors second leaves every list
    // sorted without a per-vertex sort
    for (const auto& [i, j] : edges) adjacency[cursor[j]++] = i;
    for (const auto& [i, j] : edges) adjacency[cursor[i]++] = j;
    return Graph::from_sorted_csr(n, std::move(offsets), std::move(adjacency));
}

} // namespace

Graph gen_gnp(std::int64_t n, double p, Rng& rng) {
    if (n < 1) throw std::invalid_argument("gnp: n must be >= 1");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("gnp: p must be in [0, 1]");

    std::vector<Edge> edges;
    const std::int64_t total_pairs = n * (n - 1) / 2;
    if (p >= 1.0) {
        edges.reserve(total_pairs);
        for (Vertex i = 0; i < n; ++i)
            for (Vertex j = i + 1; j < n; ++j) edges.push_back({i, j});
    } else if (p > 0.0) {
        edges.reserve(static_cast<std::size_t>(p * static_cast<double>(total_pairs) * 1.1) + 16);
        const double log1mp = std::log1p(-p);
        std::int64_t k = -1;      // linear index into the i < j pair sequence
        Vertex row = 0;           // current i
        std::int64_t row_end = n - 1; // one past the last index of row 0
        std::int64_t row_start = 0;
        while (true) {
            const double u = rng.next_double();
            const double skip = std::floor(std::log1p(-u) / log1mp);
            if (skip > static_cast<double>(total_pairs)) break;
            k += 1 + static_cast<std::int64_t>(skip);
            if (k >= total_pairs) break;
            while (k >= row_end) {
                ++row;
                row_start = row_end;
                row_end += n - 1 - row;
            }
            const Vertex j = static_cast<Vertex>(row + 1 + (k - row_start));
            edges.push_back({row, j});
        }
    }
    return csr_from_lex_edges(n, edges);
}

namespace {

/// One configuration-model pairing attempt; fills `edges` and returns true,
/// or returns false on the first loop/multi-edge. Scratch is reused.
bool try_pairing(std::int64_t n, std::int64_t d, Rng& rng, std::vector<Vertex>& stubs,
                 std::vector<std::vector<Vertex>>& adj_scratch, std::vector<Edge>& edges) {
    const std::int64_t total = n * d;
    stubs.clear();
    stubs.reserve(total);
    for (Vertex v = 0; v < n; ++v)
        for (std::int64_t c = 0; c < d; ++c) stubs.push_back(v);
    // Fisher–Yates with our rng for platform-stable output
    for (std::int64_t i = total - 1; i > 0; --i) {
        const auto j = static_cast<std::int64_t>(rng.bounded(static_cast<std::uint64_t>(i + 1)));
        std::swap(stubs[i], stubs[j]);
    }
    for (auto& l : adj_scratch) l.clear();
    edges.clear();
    for (std::int64_t k = 0; k < total; k += 2) {
        const Vertex a = stubs[k], b = stubs[k + 1];
        if (a == b) return false;
        auto& la = adj_scratch[a];
        if (std::find(la.begin(), la.end(), b) != la.end()) return false;
        la.push_back(b);
        adj_scratch[b].push_back(a);
        edges.push_back(a < b ? Edge{a, b} : Edge{b, a});
    }
    return true;
}

} // namespace

Graph gen_random_regular(std::int64_t n, std::int64_t d, Rng& rng, std::int64_t max_attempts,
                         RrgStats* stats) {
    if (n < 1 || d < 0) throw std::invalid_argument("random regular: need n >= 1, d >= 0");
    if (d >= n) throw std::invalid_argument("random regular: need d < n");
    if ((n * d) % 2 != 0)
        throw std::invalid_argument("random regular: n*d must be even");

    std::vector<Vertex> stubs;
    std::vector<std::vector<Vertex>> adj_scratch(n);
    std::vector<Edge> edges;
    for (std::int64_t attempt = 1; attempt <= max_attempts; ++attempt) {
        if (try_pairing(n, d, rng, stubs, adj_scratch, edges)) {
            if (stats) stats->attempts += attempt;
            std::sort(edges.begin(), edges.end(),
                      [](const Edge& a, const Edge& b) {
                          return a.i < b.i || (a.i == b.i && a.j < b.j);
                      });
            return csr_from_lex_edges(n, edges);
        }
    }
    throw BudgetError(max_attempts,
                      "random regular: no simple pairing within " +
                          std::to_string(max_attempts) + " attempts (n=" + std::to_string(n) +
                          ", d=" + std::to_string(d) + ")");
}

Graph gen_random_regular_connected(std::int64_t n, std::int64_t d, Rng& rng,
                                   std::int64_t max_attempts, RrgStats* stats) {
    for (std::int64_t attempt = 0; attempt < max_attempts; ++attempt) {
        Graph g = gen_random_regular(n, d, rng, max_attempts, stats);
        if (g.connected()) return g;
    }
    throw BudgetError(max_attempts, "random regular: no connected sample within budget");
}

Graph gen_tree_ball(std::int64_t degree, std::int64_t radius) {
    if (degree < 2) throw std::invalid_argument("tree ball: degree must be >= 2");
    if (radius < 0) throw std::invalid_argument("tree ball: radius must be >= 0");

    std::vector<Edge> edges;
    Vertex next = 1;
    std::vector<Vertex> frontier{0};
    for (std::int64_t r = 0; r < radius; ++r) {
        std::vector<Vertex> next_frontier;
        const std::int64_t children = (r == 0) ? degree : degree - 1;
        for (Vertex parent : frontier) {
            for (std::int64_t c = 0; c < children; ++c) {
                edges.push_back({parent, next});
                next_frontier.push_back(next);
                ++next;
            }
        }
        frontier = std::move(next_frontier);
    }
    return csr_from_lex_edges(next, edges);
}

std::vector<std::int64_t> level_graph_offsets(std::int64_t depth) {
    std::vector<std::int64_t> offsets(depth + 1, 0);
    for (std::int64_t k = 0; k < depth; ++k) offsets[k + 1] = offsets[k] + level_size(k);
    return offsets;
}

Graph gen_level_graph(const LevelGraphSpec& spec) {
    const std::int64_t depth = spec.depth;
    if (depth < 1) throw std::invalid_argument("level graph: depth must be >= 1");
    const auto lv = level_graph_offsets(depth);
    const std::int64_t n = lv[depth];

    std::vector<std::int64_t> offsets(n + 1, 0);
    for (std::int64_t k = 0; k < depth; ++k) {
        const std::int64_t below = (k > 0) ? level_size(k - 1) : 0;
        const std::int64_t above = (k + 1 < depth) ? level_size(k + 1) : 0;
        const std::int64_t deg = below + level_size(k) - 1 + above;
        for (std::int64_t v = lv[k]; v < lv[k + 1]; ++v) offsets[v + 1] = deg;
    }
    for (std::int64_t v = 0; v < n; ++v) offsets[v + 1] += offsets[v];

    std::vector<Vertex> adjacency(offsets[n]);
    std::int64_t cursor = 0;
    for (std::int64_t k = 0; k < depth; ++k) {
        const std::int64_t lo = (k > 0) ? lv[k - 1] : lv[k];
        const std::int64_t hi = (k + 1 < depth) ? lv[k + 2] : lv[k + 1];
        for (std::int64_t v = lv[k]; v < lv[k + 1]; ++v) {
            for (std::int64_t u = lo; u < hi; ++u)
                if (u != v) adjacency[cursor++] = static_cast<Vertex>(u);
        }
    }
    return Graph::from_sorted_csr(n, std::move(offsets), std::move(adjacency));
}

OpinionState gen_opinions_iid(std::int64_t n, double q, Rng& rng) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("opinions: q must be in [0, 1]");
    OpinionState s;
    s.values.resize(n);
    for (auto& v : s.values) v = rng.bernoulli(q) ? std::int8_t{1} : std::int8_t{-1};
    return s;
}

Graph cycle_graph(std::int64_t n) {
    if (n < 3) throw std::invalid_argument("cycle: n must be >= 3");
    std::vector<Edge> edges;
    edges.reserve(n);
    for (Vertex v = 0; v + 1 < n; ++v) edges.push_back({v, static_cast<Vertex>(v + 1)});
    edges.push_back({0, static_cast<Vertex>(n - 1)});
    return Graph::from_edges(n, edges);
}

Graph path_graph(std::int64_t n) {
    if (n < 1) throw std::invalid_argument("path: n must be >= 1");
    std::vector<Edge> edges;
    for (Vertex v = 0; v + 1 < n; ++v) edges.push_back({v, static_cast<Vertex>(v + 1)});
    return Graph::from_edges(n, edges);
}

Graph complete_graph(std::int64_t n) {
    if (n < 1) throw std::invalid_argument("complete: n must be >= 1");
    std::vector<Edge> edges;
    for (Vertex i = 0; i < n; ++i)
        for (Vertex j = i + 1; j < n; ++j) edges.push_back({i, j});
    return Graph::from_edges(n, edges);
}

} // namespace majdyn
