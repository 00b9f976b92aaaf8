#ifndef MAJDYN_GRAPH_HPP
#define MAJDYN_GRAPH_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace majdyn {

using Vertex = std::int32_t;

/// Undirected pair with i < j after normalization.
struct Edge {
    Vertex i;
    Vertex j;
};

/// Immutable simple undirected graph in CSR form, optionally edge-weighted.
///
/// Invariants established at construction and never mutated:
///   - no self-loops, no duplicate edges; neighbor lists strictly increasing
///   - symmetric: j in adj(i) iff i in adj(j)
///   - weights, when present, are attached per undirected edge and read back
///     identically from both endpoints
///
/// Safe to share across threads after construction.
class Graph {
public:
    /// Validating constructor. `endpoints` holds m unordered pairs; weights,
    /// if given, align with the pairs and must be non-negative. Rejects
    /// self-loops, duplicates, out-of-range indices and negative weights,
    /// naming the offending edge.
    static Graph from_edges(std::int64_t n, std::span<const Edge> endpoints,
                            std::span<const double> weights = {});

    /// Fast path for generators that guarantee validity (still checked in
    /// debug builds). Lists must describe a simple symmetric graph.
    static Graph from_sorted_csr(std::int64_t n, std::vector<std::int64_t> offsets,
                                 std::vector<Vertex> adjacency,
                                 std::vector<double> adjacency_weights = {});

    std::int64_t vertex_count() const { return n_; }
    std::int64_t edge_count() const { return static_cast<std::int64_t>(adjacency_.size()) / 2; }
    bool weighted() const { return !adjacency_weights_.empty(); }

    std::int64_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }
    std::int64_t max_degree() const { return max_degree_; }

    std::span<const Vertex> neighbors(Vertex v) const {
        return {adjacency_.data() + offsets_[v],
                static_cast<std::size_t>(offsets_[v + 1] - offsets_[v])};
    }
    /// Weights aligned with neighbors(v); empty span when unweighted.
    std::span<const double> neighbor_weights(Vertex v) const {
        if (!weighted()) return {};
        return {adjacency_weights_.data() + offsets_[v],
                static_cast<std::size_t>(offsets_[v + 1] - offsets_[v])};
    }

    bool has_edge(Vertex u, Vertex v) const;

    /// Canonical edge list: pairs with i < j in lexicographic order, with the
    /// per-edge weight when weighted.
    std::vector<Edge> edges() const;
    std::vector<double> edge_weights() const;

    bool connected() const;

    bool operator==(const Graph& other) const = default;

private:
    Graph() = default;

    std::int64_t n_ = 0;
    std::int64_t max_degree_ = 0;
    std::vector<std::int64_t> offsets_;
    std::vector<Vertex> adjacency_;
    std::vector<double> adjacency_weights_;
};

/// One ±1 opinion per vertex plus the step index it belongs to.
struct OpinionState {
    std::vector<std::int8_t> values;
    std::int64_t time = 0;

    std::int64_t size() const { return static_cast<std::int64_t>(values.size()); }
    /// Global mean m_t = (1/n) sum_i x_i.
    double mean() const;
    std::int64_t plus_count() const;
    bool unanimous() const;

    static OpinionState constant(std::int64_t n, std::int8_t value);
};

/// Certified tie margin and weighted-degree bound for a weighted graph.
struct RegularityParams {
    double epsilon;
    double W;
};

struct EffectiveNeighborhood {
    std::span<const Vertex> neighbors;
    bool include_self;
    std::int64_t voter_count() const {
        return static_cast<std::int64_t>(neighbors.size()) + (include_self ? 1 : 0);
    }
};

/// Tie rule: a vertex votes for itself exactly when its degree is even
/// (degree 0 included), so the voter count is always odd.
inline EffectiveNeighborhood effective_neighborhood(const Graph& g, Vertex v) {
    auto nbrs = g.neighbors(v);
    return {nbrs, (nbrs.size() % 2) == 0};
}

/// Text format: header "n m", then m lines "i j" or "i j w" with i < j;
/// '#' starts a comment. Weights round-trip exactly through 17 significant
/// digits.
void write_edge_list(const Graph& g, std::ostream& out);
Graph read_edge_list(std::istream& in);

void write_edge_list_file(const Graph& g, const std::string& path);
Graph read_edge_list_file(const std::string& path);

} // namespace majdyn

#endif
